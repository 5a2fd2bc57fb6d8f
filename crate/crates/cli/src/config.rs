//! Run configuration: an optional TOML file, overridden field by field by flags.

use std::path::{Path, PathBuf};

use clap::Args;
use mzient::optimizer::{linspace, FrequencySearch, SweepSpec, DEFAULT_COARSE_POINTS};
use mzient::protocols::check_fock_input;
use mzient::{DetectorModel, ProfileKind, SpectralProfile, SystemParams};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub system: SystemSection,
    pub input: InputSection,
    pub photon: PhotonSection,
    pub envelope: EnvelopeSection,
    pub detector: DetectorSection,
    pub search: SearchSection,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub e1: Option<f64>,
    pub gamma1: Option<f64>,
    pub beta1: Option<f64>,
    pub delta: Option<f64>,
    pub delta_over_gamma: Option<f64>,
    pub gamma2: Option<f64>,
    pub beta2: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputSection {
    pub n: Option<u32>,
    pub m: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhotonSection {
    pub omega: Option<f64>,
    pub omega_at: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvelopeSection {
    pub kind: Option<String>,
    pub center: Option<f64>,
    pub sigma: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorSection {
    pub model: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSection {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub points: Option<usize>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub delta_min: Option<f64>,
    pub delta_max: Option<f64>,
    pub delta_points: Option<usize>,
    pub g2_min: Option<f64>,
    pub g2_max: Option<f64>,
    pub g2_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// Flags shared by run, optimize and sweep. Each one overrides the
/// matching key of the config file.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// TOML config file with [system], [input], [photon], [envelope],
    /// [detector], [search], [sweep] and [output] sections.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Transition energy of emitter 1 (µeV).
    #[arg(long, allow_hyphen_values = true)]
    pub e1: Option<f64>,
    /// Waveguide decay rate of emitter 1 (µeV).
    #[arg(long)]
    pub gamma1: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    /// Detuning E2 − E1 (µeV).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "delta_over_gamma")]
    pub delta: Option<f64>,
    /// Detuning in units of Γ1.
    #[arg(long, allow_hyphen_values = true)]
    pub delta_over_gamma: Option<f64>,
    #[arg(long)]
    pub gamma2: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    /// Sets Γ1 and Γ2 together.
    #[arg(long, conflicts_with_all = ["gamma1", "gamma2"])]
    pub gamma: Option<f64>,
    /// Sets β1 and β2 together.
    #[arg(long, conflicts_with_all = ["beta1", "beta2"])]
    pub beta: Option<f64>,

    /// Photons in the upper input arm.
    #[arg(long)]
    pub n: Option<u32>,
    /// Photons in the lower input arm.
    #[arg(long)]
    pub m: Option<u32>,

    /// Photon energy (µeV).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "omega_at")]
    pub omega: Option<f64>,
    /// Named photon energy: resonance, resonance2 or midpoint.
    #[arg(long)]
    pub omega_at: Option<String>,

    /// Spectral envelope: monochromatic, lorentzian, gaussian or square.
    #[arg(long)]
    pub envelope: Option<String>,
    /// Envelope FWHM (µeV).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Envelope center (µeV); defaults to the photon energy.
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<f64>,

    /// nr (number resolving) or nnr (click detectors).
    #[arg(long)]
    pub detector: Option<String>,

    /// Lower edge of the frequency search window (µeV).
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
    /// Coarse grid points of the frequency search.
    #[arg(long)]
    pub points: Option<usize>,
    /// Final bracket width of the frequency search (µeV).
    #[arg(long)]
    pub tolerance: Option<f64>,

    #[arg(long, allow_hyphen_values = true)]
    pub delta_min: Option<f64>,
    #[arg(long)]
    pub delta_max: Option<f64>,
    #[arg(long)]
    pub delta_points: Option<usize>,
    #[arg(long)]
    pub g2_min: Option<f64>,
    #[arg(long)]
    pub g2_max: Option<f64>,
    #[arg(long)]
    pub g2_points: Option<usize>,

    /// Output CSV; a .meta.json sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Reserved; no current code path is random.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Where the photon energy comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaChoice {
    Value(f64),
    Resonance,
    Resonance2,
    Midpoint,
}

impl OmegaChoice {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "resonance" | "resonance1" | "e1" => Ok(Self::Resonance),
            "resonance2" | "e2" => Ok(Self::Resonance2),
            "midpoint" | "mid" => Ok(Self::Midpoint),
            other => Err(CliError::config(format!(
                "unknown omega_at '{other}' (expected resonance, resonance2 or midpoint)"
            ))),
        }
    }

    pub fn resolve(&self, sys: &SystemParams) -> f64 {
        match *self {
            Self::Value(w) => w,
            Self::Resonance => sys.emitter1.energy(),
            Self::Resonance2 => sys.emitter2.energy(),
            Self::Midpoint => sys.midpoint(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Value(w) => format!("{w}"),
            Self::Resonance => "resonance".into(),
            Self::Resonance2 => "resonance2".into(),
            Self::Midpoint => "midpoint".into(),
        }
    }
}

/// A fully resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub sys: SystemParams,
    pub photons: (u32, u32),
    pub omega: OmegaChoice,
    /// `None` for monochromatic photons.
    pub envelope: Option<(ProfileKind, Option<f64>, f64)>,
    pub detector: DetectorModel,
    pub search: (Option<f64>, Option<f64>, usize, Option<f64>),
    pub delta_axis: Vec<f64>,
    pub gamma_axis: Vec<f64>,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

pub fn load_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

impl Overrides {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(p) => load_file(p)?,
            None => FileConfig::default(),
        };
        resolve(file, self)
    }
}

fn resolve(file: FileConfig, o: &Overrides) -> Result<RunConfig, CliError> {
    let s = &file.system;
    let e1 = o.e1.or(s.e1).unwrap_or(0.0);
    let gamma1 = o.gamma.or(o.gamma1).or(s.gamma1).unwrap_or(1.0);
    let gamma2 = o.gamma.or(o.gamma2).or(s.gamma2).unwrap_or(gamma1);
    let beta1 = o.beta.or(o.beta1).or(s.beta1).unwrap_or(1.0);
    let beta2 = o.beta.or(o.beta2).or(s.beta2).unwrap_or(beta1);
    // δ and δ/Γ1 are one setting: a flag for either replaces both file keys.
    let delta = match (o.delta, o.delta_over_gamma, s.delta, s.delta_over_gamma) {
        (Some(d), _, _, _) => d,
        (None, Some(x), _, _) => x * gamma1,
        (None, None, Some(_), Some(_)) => {
            return Err(CliError::config("[system] sets both delta and delta_over_gamma"));
        }
        (None, None, Some(d), None) => d,
        (None, None, None, Some(x)) => x * gamma1,
        (None, None, None, None) => 1.0,
    };
    let sys = SystemParams::from_detuning(e1, gamma1, beta1, delta, gamma2, beta2)?;

    let photons = (o.n.or(file.input.n).unwrap_or(1), o.m.or(file.input.m).unwrap_or(0));

    let p = &file.photon;
    let omega = match (o.omega, &o.omega_at, p.omega, &p.omega_at) {
        (Some(w), _, _, _) => OmegaChoice::Value(w),
        (None, Some(at), _, _) => OmegaChoice::parse(at)?,
        (None, None, Some(_), Some(_)) => {
            return Err(CliError::config("[photon] sets both omega and omega_at"));
        }
        (None, None, Some(w), None) => OmegaChoice::Value(w),
        (None, None, None, Some(at)) => OmegaChoice::parse(at)?,
        (None, None, None, None) => OmegaChoice::Midpoint,
    };
    if let OmegaChoice::Value(w) = omega {
        if !w.is_finite() {
            return Err(CliError::config(format!("photon energy must be finite, got {w}")));
        }
    }

    let kind: ProfileKind = match o.envelope.as_ref().or(file.envelope.kind.as_ref()) {
        Some(k) => k.parse()?,
        None => ProfileKind::Monochromatic,
    };
    let envelope = if kind == ProfileKind::Monochromatic {
        None
    } else {
        let sigma = o.sigma.or(file.envelope.sigma);
        let center = o.center.or(file.envelope.center).unwrap_or_else(|| omega.resolve(&sys));
        // Validates the width up front.
        SpectralProfile::new(kind, center, sigma)?;
        Some((kind, sigma, center))
    };

    let detector: DetectorModel = match o.detector.as_ref().or(file.detector.model.as_ref()) {
        Some(d) => d.parse()?,
        None => DetectorModel::default(),
    };

    let (n, m) = photons;
    check_fock_input(n, m, &sys)?;
    if envelope.is_some() && !matches!(photons, (1, 0) | (1, 1)) {
        return Err(CliError::config(format!(
            "protocols: unsupported configuration: broadband envelopes are modelled for |1,0⟩ and |1,1⟩ only, not |{n},{m}⟩"
        )));
    }

    let q = &file.search;
    let points = o.points.or(q.points).unwrap_or(DEFAULT_COARSE_POINTS);
    if points < 3 {
        return Err(CliError::config(format!("search needs at least 3 coarse points, got {points}")));
    }
    let search = (o.lo.or(q.lo), o.hi.or(q.hi), points, o.tolerance.or(q.tolerance));

    let w = &file.sweep;
    let delta_axis = axis(
        "delta",
        o.delta_min.or(w.delta_min).unwrap_or(0.0),
        o.delta_max.or(w.delta_max).unwrap_or(3.0),
        o.delta_points.or(w.delta_points).unwrap_or(41),
    )?;
    let gamma_axis = axis(
        "g2",
        o.g2_min.or(w.g2_min).unwrap_or(0.2),
        o.g2_max.or(w.g2_max).unwrap_or(3.0),
        o.g2_points.or(w.g2_points).unwrap_or(41),
    )?;

    Ok(RunConfig {
        sys,
        photons,
        omega,
        envelope,
        detector,
        search,
        delta_axis,
        gamma_axis,
        out: o.out.clone().or(file.output.path),
        seed: o.seed.or(file.output.seed).unwrap_or(0),
    })
}

fn axis(name: &str, lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if points == 0 || !lo.is_finite() || !hi.is_finite() || (points > 1 && hi <= lo) {
        return Err(CliError::config(format!(
            "{name} axis needs finite bounds with max > min and at least one point, got [{lo}, {hi}] × {points}"
        )));
    }
    Ok(linspace(lo, hi, points))
}

impl RunConfig {
    pub fn omega_value(&self) -> f64 {
        self.omega.resolve(&self.sys)
    }

    /// Envelope centred at `omega` unless the config pins the center.
    pub fn profile_at(&self, omega: f64, pinned: bool) -> Result<SpectralProfile, CliError> {
        Ok(match self.envelope {
            None => SpectralProfile::monochromatic(omega)?,
            Some((kind, sigma, center)) => SpectralProfile::new(kind, if pinned { center } else { omega }, sigma)?,
        })
    }

    pub fn frequency_search(&self) -> FrequencySearch {
        let (lo, hi, points, tol) = self.search;
        let around = FrequencySearch::around(&self.sys);
        let mut s = FrequencySearch::new(lo.unwrap_or(around.lo), hi.unwrap_or(around.hi)).with_coarse_points(points);
        s.tolerance = tol.unwrap_or(around.tolerance);
        s
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec, CliError> {
        if self.envelope.is_some() {
            return Err(CliError::config("sweeps optimize monochromatic photons; drop the envelope setting"));
        }
        if self.search.0.is_some() || self.search.1.is_some() {
            return Err(CliError::config(
                "sweeps search a window around each cell's emitters; lo/hi do not apply",
            ));
        }
        let e1 = self.sys.emitter1;
        Ok(SweepSpec {
            photons: self.photons,
            energy1: e1.energy(),
            rate1: e1.rate(),
            beta1: e1.beta(),
            beta2: self.sys.emitter2.beta(),
            detector: self.detector,
            delta_axis: self.delta_axis.clone(),
            gamma_axis: self.gamma_axis.clone(),
            coarse_points: self.search.2,
        })
    }
}
