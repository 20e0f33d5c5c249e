use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::Result;
use crate::limits::Limits;
use crate::measure::{MeasureSpec, C64};
use crate::spectrum::SpectrumSet;

/// `G[j,k] = μ̂(λ_j - λ_k)`, evaluated once per distinct difference.
pub fn gram_matrix(
    spec: &MeasureSpec,
    spectrum: &SpectrumSet,
    tol: f64,
    limits: &Limits,
) -> Result<DMatrix<C64>> {
    if let Some(n) = spectrum.cardinality() {
        limits.check_gram(usize::try_from(n).unwrap_or(usize::MAX))?;
    } else {
        limits.check_gram(usize::MAX)?;
    }
    let pts = spectrum.points(limits)?;
    let n = pts.len();
    let mut slot: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut diffs: Vec<Vec<f64>> = Vec::new();
    let mut index = vec![0usize; n * n];
    for j in 0..n {
        for k in j..n {
            let d: Vec<f64> = pts[j].iter().zip(&pts[k]).map(|(a, b)| a - b).collect();
            let key: Vec<u64> = d.iter().map(|x| (x + 0.0).to_bits()).collect();
            let s = *slot.entry(key).or_insert_with(|| {
                diffs.push(d);
                diffs.len() - 1
            });
            index[j * n + k] = s;
        }
    }
    let values: Vec<Result<C64>> = diffs.par_iter().map(|d| spec.fourier(d, tol)).collect();
    let values: Vec<C64> = values.into_iter().collect::<Result<_>>()?;
    let mut g = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for j in 0..n {
        g[(j, j)] = C64::new(values[index[j * n + j]].re, 0.0);
        for k in j + 1..n {
            let v = values[index[j * n + k]];
            g[(j, k)] = v;
            g[(k, j)] = v.conj();
        }
    }
    Ok(g)
}

/// `max_{j,k} |G[j,k] - δ_{jk}|`.
pub fn identity_deviation(g: &DMatrix<C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..g.nrows() {
        for k in 0..g.ncols() {
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((g[(j, k)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}
