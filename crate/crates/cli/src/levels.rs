//! Textual level-set descriptions used on the command line.

use anyhow::{bail, Context, Result};
use framedim::LevelSet;

/// Parses `all`, `evens`, `odds`, `empty`, `first:N`, `list:1,3,5`,
/// `periodic:M:r1,r2` or `osc:LOW,HIGH,GROWTH`.
pub fn parse_levels(text: &str) -> Result<LevelSet> {
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    let set = match kind {
        "all" => LevelSet::all(),
        "evens" => LevelSet::evens(),
        "odds" => LevelSet::odds(),
        "empty" => LevelSet::empty(),
        "first" => LevelSet::first(rest.parse().context("first:N needs an integer N")?),
        "list" => LevelSet::explicit(parse_list(rest)?)?,
        "periodic" => {
            let (m, residues) = rest.split_once(':').context("periodic:M:r1,r2,...")?;
            let modulus: u64 = m.parse().context("periodic modulus")?;
            let set = LevelSet::Periodic {
                modulus,
                residues: parse_list(residues)?,
                bound: None,
            };
            set.validate()?;
            set
        }
        "osc" => {
            let v: Vec<f64> = rest
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .context("osc:LOW,HIGH,GROWTH needs three reals")?;
            if v.len() != 3 {
                bail!("osc:LOW,HIGH,GROWTH needs three reals, got {}", v.len());
            }
            LevelSet::oscillating(v[0], v[1], v[2])?
        }
        other => bail!("unknown level set `{other}`"),
    };
    Ok(set)
}

fn parse_list(text: &str) -> Result<Vec<u64>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .with_context(|| format!("bad level `{x}`"))
        })
        .collect()
}

/// Comma-separated positive reals.
pub fn parse_schedule(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .with_context(|| format!("bad schedule entry `{x}`"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_sets() {
        assert_eq!(parse_levels("evens").unwrap(), LevelSet::evens());
        assert_eq!(parse_levels("first:3").unwrap().count_upto(10), 3);
        assert_eq!(
            parse_levels("list:1,4").unwrap().elements_upto(10),
            vec![1, 4]
        );
        assert_eq!(
            parse_levels("periodic:3:0").unwrap().elements_upto(9),
            vec![3, 6, 9]
        );
        let osc = parse_levels("osc:0.333,0.667,2").unwrap();
        // Both phases stop at the growth cap before reaching 0.333 or 0.667,
        // so the densities cycle through d_t = d_p / 2 and d_p = (d_t + 1) / 2.
        assert!((osc.liminf_density() - 1.0 / 3.0).abs() < 1e-12);
        assert!((osc.limsup_density() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_levels("primes").is_err());
        assert!(parse_levels("osc:0.1,0.2").is_err());
        assert!(parse_levels("first:x").is_err());
    }
}
