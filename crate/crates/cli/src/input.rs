use anyhow::{bail, Context, Result};
use clap::Args;
use ghz_bqt::bqt::EprInput;
use ghz_bqt::Complex64;

/// Inputs accepted within this distance of unit norm are rescaled; others are rejected.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Alice's state as `re0,im0,re1,im1`
    #[arg(long, allow_hyphen_values = true, conflicts_with = "alpha_angles")]
    pub alpha: Option<String>,
    /// Bob's state as `re0,im0,re1,im1`
    #[arg(long, allow_hyphen_values = true, conflicts_with = "beta_angles")]
    pub beta: Option<String>,
    /// Both states as `theta,phi` (c0 = cos θ, c1 = e^{iφ} sin θ)
    #[arg(long, allow_hyphen_values = true)]
    pub angles: Option<String>,
    /// Alice's state as `theta,phi`
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_angles: Option<String>,
    /// Bob's state as `theta,phi`
    #[arg(long, allow_hyphen_values = true)]
    pub beta_angles: Option<String>,
}

fn numbers(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .with_context(|| format!("{what}: `{s}` is not a list of numbers"))?;
    if v.len() != n {
        bail!(
            "{what}: expected {n} comma-separated numbers, got {}",
            v.len()
        );
    }
    if v.iter().any(|x| !x.is_finite()) {
        bail!("{what}: values must be finite");
    }
    Ok(v)
}

pub fn parse_amplitudes(s: &str, what: &str) -> Result<EprInput<f64>> {
    let v = numbers(s, 4, what)?;
    EprInput::normalized(
        Complex64::new(v[0], v[1]),
        Complex64::new(v[2], v[3]),
        NORM_TOLERANCE,
    )
    .map_err(|e| anyhow::anyhow!("{what}: {e}"))
}

pub fn parse_angles(s: &str, what: &str) -> Result<EprInput<f64>> {
    let v = numbers(s, 2, what)?;
    Ok(EprInput::from_angles(v[0], v[1]))
}

impl InputArgs {
    /// Alice's and Bob's inputs. Explicit per-party flags win over `--angles`.
    pub fn resolve(&self) -> Result<(EprInput<f64>, EprInput<f64>)> {
        let pick = |amps: &Option<String>,
                    angles: &Option<String>,
                    name: &str,
                    default: (f64, f64)|
         -> Result<EprInput<f64>> {
            if let Some(s) = amps {
                parse_amplitudes(s, &format!("--{name}"))
            } else if let Some(s) = angles {
                parse_angles(s, &format!("--{name}-angles"))
            } else if let Some(s) = &self.angles {
                parse_angles(s, "--angles")
            } else {
                Ok(EprInput::real(default.0, default.1)?)
            }
        };
        Ok((
            pick(&self.alpha, &self.alpha_angles, "alpha", (0.6, 0.8))?,
            pick(&self.beta, &self.beta_angles, "beta", (0.8, 0.6))?,
        ))
    }
}

/// Decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse::<u64>(),
    };
    r.map_err(|_| format!("`{s}` is not a 64-bit unsigned integer"))
}
