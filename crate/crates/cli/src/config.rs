//! Run configuration: a JSON file merged under command-line flags, then
//! resolved against per-command defaults and validated before any work.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use revivalkit::dynamics::TimeLimits;
use revivalkit::gauss::periodicity_set;
use revivalkit::wavepacket::{PacketSpec, Profile};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Model,
    Direct,
    Both,
}

impl Backend {
    pub fn wants_model(self) -> bool {
        self != Backend::Direct
    }

    pub fn wants_direct(self) -> bool {
        self != Backend::Model
    }
}

/// Everything a run can be told. Unset fields fall back to the defaults of
/// the command being run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Potential selector; only `canonical` (x^4 - x^2) is available.
    #[arg(long)]
    pub potential: Option<String>,
    /// Semiclassical parameters, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub h: Option<Vec<f64>>,
    /// Values of |ln h|, for h below the floating-point range (model backend only).
    #[arg(long = "log-h", value_delimiter = ',')]
    pub log_h: Option<Vec<f64>>,
    /// Rescaled packet energy in [-1, 1].
    #[arg(long = "E", allow_hyphen_values = true)]
    #[serde(rename = "E")]
    pub energy: Option<f64>,
    /// Exponent of the Delta set |n - n0| <= |ln h|^gamma.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Packet width exponent, L = |ln h|^(1 - gamma').
    #[arg(long = "gamma-prime")]
    pub gamma_prime: Option<f64>,
    /// First-order validity window |ln h|^alpha.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Second-order validity window |ln h|^beta.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Packet profile: gaussian or bump.
    #[arg(long)]
    pub chi: Option<String>,
    /// Absolute end of the time grid.
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    /// End of the time grid in units of |T_hyp|.
    #[arg(long)]
    pub periods: Option<f64>,
    /// Time samples per |T_hyp|.
    #[arg(long = "samples-per-period")]
    pub samples_per_period: Option<usize>,
    /// Numerators of the fractional revivals, paired with --q.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p: Option<Vec<i64>>,
    /// Denominators of the fractional revivals.
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<i64>>,
    /// Centre index used for the shifted Gauss coefficients.
    #[arg(long, allow_hyphen_values = true)]
    pub n0: Option<i64>,
    /// Spectrum source for return amplitudes.
    #[arg(long, value_enum)]
    pub backend: Option<Backend>,
    /// Output directory; defaults to $REVIVALKIT_OUT, then ./revivalkit-out.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweep points; 0 uses every core.
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overlay(self, flags: RunConfig) -> Self {
        macro_rules! pick {
            ($($f:ident),*) => { Self { $($f: flags.$f.or(self.$f)),* } };
        }
        pick!(
            potential, h, log_h, energy, gamma, gamma_prime, alpha, beta, chi, t_max, periods,
            samples_per_period, p, q, n0, backend, out, jobs
        )
    }
}

/// An explicit `--out` wins; `REVIVALKIT_OUT` only replaces the default.
pub fn output_dir(config: &RunConfig, default: PathBuf) -> PathBuf {
    config
        .out
        .clone()
        .or_else(|| std::env::var_os("REVIVALKIT_OUT").map(PathBuf::from))
        .unwrap_or(default)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Times up to |ln h|^alpha; defaults gamma' = 0.2, gamma = 0.9.
    Hyperbolic,
    /// Times up to the revival time; defaults gamma' = 0.8, gamma = 0.3, and
    /// gamma < 1/3 is enforced.
    Revival,
    /// No time evolution; the revival defaults without the revival constraint.
    Static,
}

/// One value of the semiclassical parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scale {
    /// `None` when only `|ln h|` was given.
    pub h: Option<f64>,
    pub log_h: f64,
}

impl Scale {
    pub fn label(&self) -> String {
        match self.h {
            Some(h) => format!("h_{h:e}"),
            None => format!("logh_{}", self.log_h),
        }
    }

    pub fn spec(&self, s: &Settings) -> Result<PacketSpec, CliError> {
        let spec = match self.h {
            Some(h) => PacketSpec::new(h, s.energy, s.gamma_prime, s.gamma, s.regime == Regime::Revival),
            None => PacketSpec::from_log_h(self.log_h, s.energy, s.gamma_prime, s.gamma, s.regime == Regime::Revival),
        };
        spec.and_then(|p| p.with_profile(s.profile.clone()))
            .map_err(|e| CliError::from_core(e, &self.label()))
    }
}

/// Smallest `h` the direct backend accepts; its grid grows like `1 / h`.
pub const DIRECT_MIN_H: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Settings {
    pub regime: Regime,
    pub scales: Vec<Scale>,
    pub energy: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
    pub alpha: f64,
    pub beta: f64,
    pub profile: Profile,
    pub t_max: Option<f64>,
    pub periods: Option<f64>,
    pub samples_per_period: Option<usize>,
    pub pairs: Vec<(i64, i64)>,
    pub backend: Backend,
    pub out: PathBuf,
    pub jobs: usize,
    /// The merged configuration, echoed into manifests.
    pub config: RunConfig,
}

impl Settings {
    /// Applies defaults for `regime` and checks every constraint that does
    /// not need a spectrum.
    pub fn resolve(config: RunConfig, regime: Regime, default_out: PathBuf) -> Result<Self, CliError> {
        match config.potential.as_deref() {
            None | Some("canonical") => {}
            Some(other) => return Err(CliError::Config(format!("unknown potential '{other}' (available: canonical)"))),
        }
        let scales = match (&config.h, &config.log_h) {
            (Some(_), Some(_)) => return Err(CliError::Config("give --h or --log-h, not both".into())),
            (Some(hs), None) => hs
                .iter()
                .map(|&h| {
                    if h > 0.0 && h < 1.0 {
                        Ok(Scale { h: Some(h), log_h: -h.ln() })
                    } else {
                        Err(CliError::Config(format!("h = {h} must lie in (0, 1)")))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?,
            (None, Some(ls)) => ls
                .iter()
                .map(|&l| {
                    if l > 0.0 && l.is_finite() {
                        Ok(Scale { h: None, log_h: l })
                    } else {
                        Err(CliError::Config(format!("|ln h| = {l} must be positive")))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?,
            (None, None) => vec![Scale { h: Some(1e-4), log_h: -(1e-4f64).ln() }],
        };
        let (gp_default, g_default) = match regime {
            Regime::Hyperbolic => (0.2, 0.9),
            Regime::Revival | Regime::Static => (0.8, 0.3),
        };
        let profile = match config.chi.as_deref() {
            None => Profile::Gaussian,
            Some(name) => Profile::from_name(name).map_err(|e| CliError::Config(e.to_string()))?,
        };
        let pairs = match (&config.p, &config.q) {
            (Some(p), Some(q)) if p.len() == q.len() => p.iter().copied().zip(q.iter().copied()).collect(),
            (Some(_), Some(_)) => return Err(CliError::Config("--p and --q must have the same length".into())),
            (None, None) => Vec::new(),
            _ => return Err(CliError::Config("--p and --q must be given together".into())),
        };
        for &(p, q) in &pairs {
            periodicity_set(p, q).map_err(|e| CliError::Config(e.to_string()))?;
        }
        let backend = config.backend.unwrap_or(Backend::Model);
        if backend.wants_direct() {
            if let Some(s) = scales.iter().find(|s| s.h.map_or(true, |h| h < DIRECT_MIN_H)) {
                return Err(CliError::Config(format!(
                    "the direct backend needs h >= {DIRECT_MIN_H:e} (got {})",
                    s.label()
                )));
            }
        }
        let out = output_dir(&config, default_out);
        let mut settings = Self {
            regime,
            scales,
            energy: config.energy.unwrap_or(0.0),
            gamma: config.gamma.unwrap_or(g_default),
            gamma_prime: config.gamma_prime.unwrap_or(gp_default),
            alpha: 0.0,
            beta: 0.0,
            profile,
            t_max: config.t_max,
            periods: config.periods,
            samples_per_period: config.samples_per_period,
            pairs,
            backend,
            out,
            jobs: config.jobs.unwrap_or(0),
            config,
        };
        if settings.samples_per_period == Some(0) {
            return Err(CliError::Config("--samples-per-period must be positive".into()));
        }
        // packet constraints and the time windows at every scale
        for scale in settings.scales.clone() {
            let spec = scale.spec(&settings)?;
            settings.alpha = settings.config.alpha.unwrap_or_else(|| spec.default_alpha());
            settings.beta = settings.config.beta.unwrap_or_else(|| spec.default_beta());
            let limits = settings.limits(&spec)?;
            if let Some(t_max) = settings.t_max {
                let (limit, exponent) = match regime {
                    Regime::Revival => (limits.order2_limit(), limits.beta),
                    _ => (limits.order1_limit(), limits.alpha),
                };
                if !(t_max > 0.0) || t_max > limit {
                    return Err(CliError::Config(format!(
                        "{}: time grid reaches {t_max} beyond the validity window {limit} = |ln h|^{exponent}",
                        scale.label()
                    )));
                }
            }
        }
        Ok(settings)
    }

    pub fn limits(&self, spec: &PacketSpec) -> Result<TimeLimits, CliError> {
        TimeLimits::new(spec, self.alpha, self.beta).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(config: RunConfig, regime: Regime) -> Result<Settings, CliError> {
        Settings::resolve(config, regime, PathBuf::from("out"))
    }

    #[test]
    fn flags_override_file_values() {
        let file: RunConfig = serde_json::from_str(r#"{"h": [1e-3], "E": 0.5, "gamma": 0.2}"#).unwrap();
        let flags = RunConfig {
            energy: Some(-0.25),
            ..RunConfig::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.energy, Some(-0.25));
        assert_eq!(merged.gamma, Some(0.2));
        assert_eq!(merged.h, Some(vec![1e-3]));
    }

    #[test]
    fn regime_defaults() {
        let s = resolve(RunConfig::default(), Regime::Hyperbolic).unwrap();
        assert_eq!((s.gamma_prime, s.gamma), (0.2, 0.9));
        assert_eq!(s.scales[0].label(), "h_1e-4");
        let s = resolve(RunConfig::default(), Regime::Revival).unwrap();
        assert_eq!((s.gamma_prime, s.gamma), (0.8, 0.3));
    }

    #[test]
    fn revival_constraint_only_for_revival_runs() {
        let config = RunConfig {
            gamma: Some(0.5),
            gamma_prime: Some(0.6),
            ..RunConfig::default()
        };
        assert!(resolve(config.clone(), Regime::Static).is_ok());
        assert!(matches!(resolve(config, Regime::Revival), Err(CliError::Config(_))));
    }

    #[test]
    fn rejects_inconsistent_settings() {
        let bad = [
            RunConfig {
                h: Some(vec![1e-3]),
                log_h: Some(vec![10.0]),
                ..RunConfig::default()
            },
            RunConfig {
                h: Some(vec![2.0]),
                ..RunConfig::default()
            },
            RunConfig {
                p: Some(vec![1]),
                ..RunConfig::default()
            },
            RunConfig {
                p: Some(vec![2]),
                q: Some(vec![4]),
                ..RunConfig::default()
            },
            RunConfig {
                log_h: Some(vec![50.0]),
                backend: Some(Backend::Direct),
                ..RunConfig::default()
            },
            RunConfig {
                potential: Some("quartic".into()),
                ..RunConfig::default()
            },
            RunConfig {
                t_max: Some(1e9),
                ..RunConfig::default()
            },
        ];
        for config in bad {
            let err = resolve(config.clone(), Regime::Hyperbolic).unwrap_err();
            assert!(matches!(err, CliError::Config(_)), "{config:?}: {err}");
        }
    }

    #[test]
    fn log_h_scales_have_no_h() {
        let config = RunConfig {
            log_h: Some(vec![400.0]),
            ..RunConfig::default()
        };
        let s = resolve(config, Regime::Revival).unwrap();
        assert_eq!(s.scales[0].h, None);
        assert_eq!(s.scales[0].label(), "logh_400");
    }
}
