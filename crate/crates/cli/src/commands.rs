use std::path::Path;

use anyhow::{bail, Context, Result};
use framedim::constructions::{
    build_digit_measure, counterexample_report, enumerate_spectrum, mixed_measure,
    non_spectral_certificate, CertificateConfig,
};
use framedim::estimate::{
    beurling_dim_estimate, entropy_dim_estimate, fourier_dim_estimate, lev_exponent_estimate,
    EntropyBound, FourierDimConfig, LevConfig,
};
use framedim::frame::{
    check_change_of_measure_sampled, check_counting_bound_sampled, check_restriction_lemma,
    check_small_freq_lowerbound, delta_for_epsilon, frame_bounds_atomic, frame_bounds_bracket,
    gram_matrix, identity_deviation, sample_below_delta,
};
use framedim::{
    Cell, DimensionEstimate, LemmaCheckRecord, Limits, MeasureDocument, MeasureSpec, Method,
    SpectrumDocument, SpectrumSet, TrialFunction, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{Bound, Command, GlobalArgs, MethodArg};
use crate::levels::{parse_levels, parse_schedule};

/// What a subcommand produced.
pub struct Outcome {
    pub result: Value,
    /// Checks whose failure turns the exit status to 2.
    pub checks: Vec<LemmaCheckRecord>,
    /// Named curves for CSV output.
    pub curves: Vec<(&'static str, DimensionEstimate)>,
}

impl Outcome {
    fn value(result: Value) -> Self {
        Outcome {
            result,
            checks: Vec::new(),
            curves: Vec::new(),
        }
    }

    fn estimate(name: &'static str, est: DimensionEstimate) -> Result<Self> {
        Ok(Outcome {
            result: serde_json::to_value(&est)?,
            checks: Vec::new(),
            curves: vec![(name, est)],
        })
    }

    fn check(rec: LemmaCheckRecord) -> Result<Self> {
        Ok(Outcome {
            result: serde_json::to_value(&rec)?,
            checks: vec![rec],
            curves: Vec::new(),
        })
    }
}

fn read_measure(path: &Path) -> Result<MeasureSpec> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    MeasureDocument::from_json(&text)
        .with_context(|| format!("parsing measure spec {}", path.display()))
}

fn read_spectrum(path: &Path) -> Result<SpectrumSet> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SpectrumDocument::from_json(&text)
        .with_context(|| format!("parsing spectrum {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn parse_cell(text: &str) -> Result<Cell> {
    let mut parts = text.splitn(3, ':');
    let (Some(b), Some(n), Some(idx)) = (parts.next(), parts.next(), parts.next()) else {
        bail!("cell must be BASE:DEPTH:i1,i2,...");
    };
    let index = idx
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<i128>()
                .with_context(|| format!("bad cell index `{x}`"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Cell::new(
        b.parse().context("cell base")?,
        n.parse().context("cell depth")?,
        index,
    )?)
}

pub fn run(command: &Command, global: &GlobalArgs) -> Result<Outcome> {
    let limits = Limits {
        max_atoms: global.max_atoms,
        max_gram: global.max_gram,
        max_depth: global.max_depth,
    };
    match command {
        Command::EntropyDim {
            measure,
            depth,
            bound,
            base,
        } => {
            let spec = read_measure(measure)?;
            let bound = match bound {
                Bound::Upper => EntropyBound::Upper,
                Bound::Lower => EntropyBound::Lower,
            };
            Outcome::estimate(
                "entropy",
                entropy_dim_estimate(&spec, *depth, bound, *base)?,
            )
        }
        Command::BeurlingDim {
            spectrum,
            method,
            schedule,
        } => {
            let set = read_spectrum(spectrum)?;
            let method = match method {
                MethodArg::TailMax => Method::TailMax,
                MethodArg::TailMin => Method::TailMin,
                MethodArg::SlopeFit => Method::SlopeFit,
            };
            let schedule = schedule.as_deref().map(parse_schedule).transpose()?;
            Outcome::estimate(
                "beurling",
                beurling_dim_estimate(&set, schedule.as_deref(), method, &limits)?,
            )
        }
        Command::FourierDim { measure, schedule } => {
            let spec = read_measure(measure)?;
            let mut config = FourierDimConfig::default();
            if let Some(s) = schedule {
                config.schedule = parse_schedule(s)?;
            }
            Outcome::estimate("fourier", fourier_dim_estimate(&spec, &config)?)
        }
        Command::LevExponent {
            measure,
            quad_tol,
            schedule,
        } => {
            let spec = read_measure(measure)?;
            let mut config = LevConfig {
                quad_tol: *quad_tol,
                ..LevConfig::default()
            };
            if let Some(s) = schedule {
                config.schedule = parse_schedule(s)?;
            }
            Outcome::estimate("lev", lev_exponent_estimate(&spec, &config)?)
        }
        Command::FrameBounds {
            measure,
            spectrum,
            trials,
        } => {
            let spec = read_measure(measure)?;
            let set = read_spectrum(spectrum)?;
            let report = if spec.atoms(&limits)?.is_some() {
                frame_bounds_atomic(&spec, &set, &limits)?
            } else {
                let half = set.diameter().max(1.0);
                let mut rng = ChaCha8Rng::seed_from_u64(global.seed);
                let d = spec.dim();
                let trials: Vec<TrialFunction> = (0..*trials)
                    .map(|_| {
                        let t: Vec<f64> = (0..d).map(|_| rng.random_range(-half..half)).collect();
                        TrialFunction::Exponentials(vec![(C64::new(1.0, 0.0), t)])
                    })
                    .collect();
                frame_bounds_bracket(&spec, &set, &trials, 1e-12, &limits)?
            };
            Ok(Outcome::value(serde_json::to_value(&report)?))
        }
        Command::Gram {
            measure,
            spectrum,
            tol,
            matrix,
        } => {
            let spec = read_measure(measure)?;
            let set = read_spectrum(spectrum)?;
            let g = gram_matrix(&spec, &set, *tol, &limits)?;
            let mut hermitian: f64 = 0.0;
            for i in 0..g.nrows() {
                for j in 0..g.ncols() {
                    hermitian = hermitian.max((g[(i, j)] - g[(j, i)].conj()).norm());
                }
            }
            let mut out = json!({
                "size": g.nrows(),
                "identity_deviation": identity_deviation(&g),
                "hermitian_deviation": hermitian,
                "tol": tol,
            });
            if *matrix {
                let rows: Vec<Vec<[f64; 2]>> = g
                    .row_iter()
                    .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                    .collect();
                out["matrix"] = serde_json::to_value(rows)?;
            }
            Ok(Outcome::value(out))
        }
        Command::CheckLemma41 {
            measure,
            samples,
            depth,
            tol,
        } => {
            let spec = read_measure(measure)?;
            Outcome::check(check_change_of_measure_sampled(
                &spec,
                *depth,
                *samples,
                global.seed,
                *tol,
                &limits,
            )?)
        }
        Command::CheckLemma42 {
            measure,
            epsilon,
            samples,
            depth,
        } => {
            let spec = read_measure(measure)?;
            let delta = delta_for_epsilon(*epsilon, spec.dim())?;
            let xs = sample_below_delta(delta, spec.dim(), *samples, global.seed);
            Outcome::check(check_small_freq_lowerbound(
                &spec, *epsilon, *depth, &xs, &limits,
            )?)
        }
        Command::CheckCountingBound {
            measure,
            spectrum,
            bessel,
            epsilon,
            trials,
            max_log2_h,
        } => {
            let spec = read_measure(measure)?;
            let set = read_spectrum(spectrum)?;
            let b = match bessel {
                Some(b) => *b,
                None => {
                    frame_bounds_atomic(&spec, &set, &limits)
                        .context("no --bessel given and the frame bounds could not be computed")?
                        .upper
                }
            };
            Outcome::check(check_counting_bound_sampled(
                &spec,
                &set,
                b,
                *epsilon,
                *trials,
                *max_log2_h,
                global.seed,
                &limits,
            )?)
        }
        Command::CheckRestriction {
            measure,
            spectrum,
            cell,
            tol,
        } => {
            let spec = read_measure(measure)?;
            let set = read_spectrum(spectrum)?;
            Outcome::check(check_restriction_lemma(
                &spec,
                &set,
                &parse_cell(cell)?,
                *tol,
                &limits,
            )?)
        }
        Command::BuildNu {
            p,
            levels,
            truncate,
            out,
        } => {
            let mut spec = build_digit_measure(*p, parse_levels(levels)?)?;
            if let Some(n) = truncate {
                spec = spec.truncate_digit(*n, &limits)?;
            }
            let doc = serde_json::to_value(MeasureDocument::new(spec))?;
            if let Some(path) = out {
                write_text(path, &framedim::json::canonical_value(&doc))?;
            }
            Ok(Outcome::value(doc))
        }
        Command::EnumerateSpectrum {
            p,
            levels,
            n,
            shift,
            out,
        } => {
            let set = enumerate_spectrum(*p, parse_levels(levels)?, *n, *shift, &limits)?;
            let doc = serde_json::to_value(SpectrumDocument::new(set.clone()))?;
            if let Some(path) = out {
                write_text(path, &framedim::json::canonical_value(&doc))?;
            }
            let points: Vec<Vec<f64>> = set.points(&limits)?;
            Ok(Outcome::value(json!({
                "spectrum": doc,
                "cardinality": points.len(),
                "points": points,
            })))
        }
        Command::CounterexampleReport { p, levels, nmax } => {
            let report = counterexample_report(*p, parse_levels(levels)?, *nmax, &limits)?;
            Ok(Outcome {
                result: serde_json::to_value(&report)?,
                checks: Vec::new(),
                curves: vec![
                    ("entropy", report.entropy_upper.clone()),
                    ("beurling", report.beurling.clone()),
                ],
            })
        }
        Command::NonSpectralCertificate {
            mu,
            nu,
            rho,
            entropy_depth,
        } => {
            let mu = read_measure(mu)?;
            let nu = read_measure(nu)?;
            let rho = match rho {
                Some(path) => read_measure(path)?,
                None => MeasureSpec::zero(mu.dim()),
            };
            let config = CertificateConfig {
                entropy_n_max: *entropy_depth,
                ..CertificateConfig::default()
            };
            let cert = non_spectral_certificate(&mu, &nu, &rho, &config)?;
            Ok(Outcome {
                result: serde_json::to_value(&cert)?,
                checks: Vec::new(),
                curves: vec![
                    ("fourier", cert.fourier_mu.clone()),
                    ("entropy", cert.entropy_nu.clone()),
                ],
            })
        }
        Command::Mixed { mu, nu, out } => {
            let rho = mixed_measure(read_measure(mu)?, read_measure(nu)?)?;
            let doc = serde_json::to_value(MeasureDocument::new(rho))?;
            if let Some(path) = out {
                write_text(path, &framedim::json::canonical_value(&doc))?;
            }
            Ok(Outcome::value(doc))
        }
    }
}
