//! Figure data. Each id writes one or more CSVs named `fig<id>[...].csv` into
//! the output directory, each with a `.meta.json` sidecar holding every
//! parameter used.

use std::path::PathBuf;

use clap::Args;
use mzient::optimizer::{linspace, optimize_frequency, sweep, FrequencySearch, SweepSpec};
use mzient::protocols::{
    single_photon_broadband, single_photon_monochromatic, two_photon_broadband, two_photon_monochromatic,
};
use mzient::{DetectorModel, JointEnvelope, ProfileKind, SpectralProfile, SystemParams};

use crate::commands::{check_sweep, describe_system, grid_table, progress};
use crate::output::{Field, Table};
use crate::CliError;

pub const FIGURE_IDS: [&str; 13] = ["2b", "2c", "2d", "3a", "3b", "3c", "3d", "4a", "4b", "4c", "4d", "S1", "S2"];

/// Emitter linewidths of the line figures (µeV): lifetimes of about 1, 0.66 and 0.33 ns.
const GAMMAS: [f64; 3] = [0.66, 1.0, 2.0];
const BETAS: [f64; 2] = [1.0, 0.9];
const DELTA: f64 = 1.0;

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// Figure id: 2b 2c 2d 3a 3b 3c 3d 4a 4b 4c 4d S1 S2.
    pub id: String,
    #[arg(long, default_value = "figures")]
    pub out_dir: PathBuf,
    /// Emitter detuning δ (µeV) for the line figures.
    #[arg(long, default_value_t = DELTA)]
    pub delta: f64,
    /// Points along the x axis of a line figure (default depends on the id).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Points per axis of a grid figure (default 41, or 21 for S1).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Largest total photon number in S1.
    #[arg(long, default_value_t = 6)]
    pub max_photons: u32,
}

pub fn generate(args: &FigureArgs) -> Result<(), CliError> {
    let id = FIGURE_IDS
        .iter()
        .find(|f| f.eq_ignore_ascii_case(args.id.trim()))
        .ok_or_else(|| CliError::config(format!("unknown figure id '{}' (expected one of {})", args.id, FIGURE_IDS.join(", "))))?;
    if !(args.delta.is_finite() && args.delta >= 0.0) {
        return Err(CliError::config(format!("--delta must be finite and non-negative, got {}", args.delta)));
    }
    if matches!(args.samples, Some(s) if s < 2) || matches!(args.grid, Some(g) if g < 2) {
        return Err(CliError::config("--samples and --grid need at least 2 points"));
    }
    if args.max_photons == 0 || args.max_photons > 12 {
        return Err(CliError::config(format!("--max-photons must lie in 1..=12, got {}", args.max_photons)));
    }
    let tables = match *id {
        "2b" => vec![fig2b(args)?],
        "2c" => vec![fig2c(args)?],
        "2d" => vec![fig2d(args)?],
        "3a" => vec![fig3a(args)?],
        "3b" => vec![fig3b(args)?],
        "3c" => vec![fig3c(args)?],
        "3d" => vec![fig3d(args)?],
        "4a" => vec![fig4(args, "4a", (1, 0))?],
        "4b" => vec![fig4(args, "4b", (1, 1))?],
        "4c" => vec![fig4(args, "4c", (2, 1))?],
        "4d" => vec![fig4(args, "4d", (2, 2))?],
        "S1" => figs1(args)?,
        _ => figs2(args)?,
    };
    for mut t in tables {
        t.param("figure", *id);
        let path = args.out_dir.join(format!("fig{}.csv", t.name));
        t.write(&path)?;
        eprintln!("wrote {} ({} rows)", path.display(), t.rows.len());
    }
    Ok(())
}

fn pair(delta: f64, gamma: f64, beta: f64) -> Result<SystemParams, CliError> {
    Ok(SystemParams::from_detuning(0.0, gamma, beta, delta, gamma, beta)?)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

fn best(
    sys: &SystemParams,
    f: impl Fn(f64) -> mzient::Result<f64>,
) -> Result<mzient::optimizer::Optimum, CliError> {
    Ok(optimize_frequency(f, &FrequencySearch::around(sys))?)
}

/// Single-photon C_avg against photon energy.
fn fig2b(a: &FigureArgs) -> Result<Table, CliError> {
    let xs = linspace(-2.0, 3.0, a.samples.unwrap_or(401));
    let mut t = Table::new("2b", &["omega_minus_E1_ueV", "gamma_ueV", "beta", "c_avg"])
        .units(&[("omega_minus_E1_ueV", "ueV"), ("gamma_ueV", "ueV")]);
    for beta in BETAS {
        for gamma in GAMMAS {
            let sys = pair(a.delta, gamma, beta)?;
            for &x in &xs {
                let c = single_photon_monochromatic(&sys, x)?.c_avg;
                t.push(vec![x.into(), gamma.into(), beta.into(), c.into()]);
            }
        }
    }
    line_params(&mut t, a, xs.len());
    Ok(t)
}

/// Optimal single-photon energy and C_avg against the (common) linewidth.
fn fig2c(a: &FigureArgs) -> Result<Table, CliError> {
    let gammas = linspace(0.1, 3.0, a.samples.unwrap_or(59));
    let mut t = Table::new("2c", &["gamma_ueV", "beta", "omega_opt_minus_E1_ueV", "c_avg_max", "at_boundary"])
        .units(&[("gamma_ueV", "ueV"), ("omega_opt_minus_E1_ueV", "ueV")]);
    for beta in BETAS {
        for &gamma in &gammas {
            let sys = pair(a.delta, gamma, beta)?;
            let o = best(&sys, |w| single_photon_monochromatic(&sys, w).map(|r| r.c_avg))?;
            let w = o.omega - sys.emitter1.energy();
            t.push(vec![gamma.into(), beta.into(), w.into(), o.value.into(), o.at_boundary.into()]);
        }
    }
    t.param("delta_ueV", a.delta);
    t.param("e1_ueV", 0.0);
    t.param("samples", gammas.len());
    Ok(t)
}

/// Single-photon C_avg against envelope width, centred between the emitters.
fn fig2d(a: &FigureArgs) -> Result<Table, CliError> {
    let sys = pair(a.delta, 1.0, 1.0)?;
    let sigmas = log_grid(0.01, 4.0, a.samples.unwrap_or(41));
    let mut t = Table::new("2d", &["profile", "sigma_ueV", "c_avg"]).units(&[("sigma_ueV", "ueV")]);
    for kind in ProfileKind::BROADBAND {
        for &s in &sigmas {
            let p = SpectralProfile::new(kind, sys.midpoint(), Some(s))?;
            t.push(vec![kind.name().into(), s.into(), single_photon_broadband(&sys, &p)?.c_avg.into()]);
        }
    }
    describe_system(&mut t, &sys);
    t.param("center", "midpoint");
    t.param("samples", sigmas.len());
    Ok(t)
}

/// Two-photon C_avg against photon energy.
fn fig3a(a: &FigureArgs) -> Result<Table, CliError> {
    let xs = linspace(-2.0, 3.0, a.samples.unwrap_or(401));
    let mut t = Table::new("3a", &["omega_minus_E1_ueV", "gamma_ueV", "c_avg"])
        .units(&[("omega_minus_E1_ueV", "ueV"), ("gamma_ueV", "ueV")]);
    for gamma in GAMMAS {
        let sys = pair(a.delta, gamma, 1.0)?;
        for &x in &xs {
            let c = two_photon_monochromatic(&sys, x, DetectorModel::NumberResolving)?.c_avg;
            t.push(vec![x.into(), gamma.into(), c.into()]);
        }
    }
    line_params(&mut t, a, xs.len());
    t.param("beta", 1.0);
    t.param("detector", "nr");
    Ok(t)
}

/// Two-photon C_avg against envelope width.
fn fig3b(a: &FigureArgs) -> Result<Table, CliError> {
    let sys = pair(a.delta, 1.0, 1.0)?;
    let sigmas = log_grid(0.01, 4.0, a.samples.unwrap_or(41));
    let mut t = Table::new("3b", &["profile", "sigma_ueV", "c_avg"]).units(&[("sigma_ueV", "ueV")]);
    for kind in ProfileKind::BROADBAND {
        for &s in &sigmas {
            let xi = JointEnvelope::identical(SpectralProfile::new(kind, sys.midpoint(), Some(s))?);
            let c = two_photon_broadband(&sys, &xi, DetectorModel::NumberResolving)?.c_avg;
            t.push(vec![kind.name().into(), s.into(), c.into()]);
        }
    }
    describe_system(&mut t, &sys);
    t.param("center", "midpoint");
    t.param("detector", "nr");
    t.param("samples", sigmas.len());
    Ok(t)
}

/// Optimal C_avg against β, lowering both β or only β₂.
fn fig3c(a: &FigureArgs) -> Result<Table, CliError> {
    let betas = linspace(0.5, 1.0, a.samples.unwrap_or(26));
    let mut t = Table::new(
        "3c",
        &["photons", "loss_on", "gamma_ueV", "beta", "c_avg_max", "omega_opt_minus_E1_ueV"],
    )
    .units(&[("gamma_ueV", "ueV"), ("omega_opt_minus_E1_ueV", "ueV")]);
    for photons in [1u32, 2] {
        for loss_on in ["both", "emitter2"] {
            for gamma in GAMMAS {
                for &beta in &betas {
                    let b1 = if loss_on == "both" { beta } else { 1.0 };
                    let sys = SystemParams::from_detuning(0.0, gamma, b1, a.delta, gamma, beta)?;
                    let o = if photons == 1 {
                        best(&sys, |w| single_photon_monochromatic(&sys, w).map(|r| r.c_avg))?
                    } else {
                        best(&sys, |w| {
                            two_photon_monochromatic(&sys, w, DetectorModel::NumberResolving).map(|r| r.c_avg)
                        })?
                    };
                    t.push(vec![
                        photons.into(),
                        loss_on.into(),
                        gamma.into(),
                        beta.into(),
                        o.value.into(),
                        (o.omega - sys.emitter1.energy()).into(),
                    ]);
                }
            }
        }
    }
    t.param("delta_ueV", a.delta);
    t.param("e1_ueV", 0.0);
    t.param("detector", "nr");
    t.param("samples", betas.len());
    Ok(t)
}

/// Optimal one- and two-photon C_avg against δ/Γ for equal linewidths.
fn fig3d(a: &FigureArgs) -> Result<Table, CliError> {
    let ratios = linspace(0.0, 3.0, a.samples.unwrap_or(151));
    let mut t = Table::new("3d", &["photons", "delta_over_gamma", "c_avg_max", "omega_opt_minus_E1_ueV"])
        .units(&[("omega_opt_minus_E1_ueV", "ueV")]);
    for photons in [1u32, 2] {
        for &r in &ratios {
            let sys = pair(r, 1.0, 1.0)?;
            let o = if photons == 1 {
                best(&sys, |w| single_photon_monochromatic(&sys, w).map(|r| r.c_avg))?
            } else {
                best(&sys, |w| two_photon_monochromatic(&sys, w, DetectorModel::NumberResolving).map(|r| r.c_avg))?
            };
            t.push(vec![photons.into(), r.into(), o.value.into(), (o.omega - sys.emitter1.energy()).into()]);
        }
    }
    t.param("gamma_ueV", 1.0);
    t.param("beta", 1.0);
    t.param("e1_ueV", 0.0);
    t.param("detector", "nr");
    t.param("samples", ratios.len());
    Ok(t)
}

fn grid_spec(a: &FigureArgs, photons: (u32, u32), default: usize) -> SweepSpec {
    let n = a.grid.unwrap_or(default);
    SweepSpec::lossless(photons, linspace(0.0, 3.0, n), linspace(0.2, 3.0, n))
}

fn run_grid(spec: &SweepSpec, label: &str) -> Result<mzient::optimizer::SweepTable, CliError> {
    let report = progress(label);
    let table = sweep(spec, Some(&report))?;
    check_sweep(&table, label)?;
    Ok(table)
}

fn grid_params(t: &mut Table, spec: &SweepSpec) {
    t.param("e1_ueV", spec.energy1);
    t.param("gamma1_ueV", spec.rate1);
    t.param("beta", 1.0);
    t.param("detector", spec.detector.name());
    t.param("search_points", spec.coarse_points);
    t.param("delta_over_g1_range", vec![spec.delta_axis[0], *spec.delta_axis.last().unwrap()]);
    t.param("g2_over_g1_range", vec![spec.gamma_axis[0], *spec.gamma_axis.last().unwrap()]);
}

/// Optimal C_avg over (δ/Γ₁, Γ₂/Γ₁) for a Fock input.
fn fig4(a: &FigureArgs, id: &str, photons: (u32, u32)) -> Result<Table, CliError> {
    let spec = grid_spec(a, photons, 41);
    let result = run_grid(&spec, &format!("fig {id}"))?;
    let mut t = grid_table(id, &result);
    grid_params(&mut t, &spec);
    Ok(t)
}

/// One grid per |n,m⟩ with n ≥ m and n + m up to the photon limit.
fn figs1(a: &FigureArgs) -> Result<Vec<Table>, CliError> {
    let mut out = Vec::new();
    for total in 1..=a.max_photons {
        for m in 0..=total / 2 {
            let n = total - m;
            let spec = grid_spec(a, (n, m), 21);
            let name = format!("S1_n{n}_m{m}");
            let result = run_grid(&spec, &format!("fig {name}"))?;
            let mut t = grid_table(&name, &result);
            grid_params(&mut t, &spec);
            out.push(t);
        }
    }
    Ok(out)
}

/// Optimal photon energy maps for |1,0⟩ (S2a) and |1,1⟩ (S2b).
fn figs2(a: &FigureArgs) -> Result<Vec<Table>, CliError> {
    let mut out = Vec::new();
    for (name, photons) in [("S2a", (1, 0)), ("S2b", (1, 1))] {
        let spec = grid_spec(a, photons, 41);
        let result = run_grid(&spec, &format!("fig {name}"))?;
        let mut t = Table::new(name, &["delta_over_g1", "g2_over_g1", "omega_opt_minus_E1_over_g1", "c_avg_max"]);
        for cell in &result.cells {
            let r = cell.result.as_ref().expect("check_sweep rejects failed cells");
            t.push(vec![
                cell.delta_over_g1.into(),
                cell.g2_over_g1.into(),
                Field::Num(r.omega_opt_rel),
                r.c_avg_max.into(),
            ]);
        }
        t.param("photons", vec![photons.0, photons.1]);
        grid_params(&mut t, &spec);
        out.push(t);
    }
    Ok(out)
}

fn line_params(t: &mut Table, a: &FigureArgs, samples: usize) {
    t.param("delta_ueV", a.delta);
    t.param("e1_ueV", 0.0);
    t.param("gammas_ueV", GAMMAS.to_vec());
    t.param("samples", samples);
}
