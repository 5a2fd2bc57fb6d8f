//! run, optimize and sweep.

use std::io::Write;

use mzient::optimizer::{optimize_frequency, sweep as run_sweep, SweepTable};
use mzient::protocols::{fock_monochromatic, single_photon_broadband, two_photon_broadband};
use mzient::{JointEnvelope, ProtocolResult, SystemParams};

use crate::config::RunConfig;
use crate::output::{Field, Table};
use crate::CliError;

/// Runs the configured protocol with the photon (or envelope center) at `omega`.
fn protocol(cfg: &RunConfig, omega: f64, pinned: bool) -> Result<ProtocolResult, CliError> {
    let (n, m) = cfg.photons;
    let sys = &cfg.sys;
    let result = match cfg.envelope {
        None => fock_monochromatic(n, m, sys, omega, cfg.detector)?,
        Some(_) => {
            let profile = cfg.profile_at(omega, pinned)?;
            if (n, m) == (1, 0) {
                single_photon_broadband(sys, &profile)?
            } else {
                two_photon_broadband(sys, &JointEnvelope::identical(profile), cfg.detector)?
            }
        }
    };
    Ok(result)
}

pub fn describe_system(table: &mut Table, sys: &SystemParams) {
    let (a, b) = (sys.emitter1, sys.emitter2);
    table.param("e1_ueV", a.energy());
    table.param("gamma1_ueV", a.rate());
    table.param("beta1", a.beta());
    table.param("delta_ueV", sys.detuning());
    table.param("gamma2_ueV", b.rate());
    table.param("beta2", b.beta());
}

fn describe(table: &mut Table, cfg: &RunConfig) {
    describe_system(table, &cfg.sys);
    table.param("n", cfg.photons.0);
    table.param("m", cfg.photons.1);
    table.param("detector", cfg.detector.name());
    table.param("seed", cfg.seed);
    match cfg.envelope {
        None => table.param("envelope", "monochromatic"),
        Some((kind, sigma, _)) => {
            table.param("envelope", kind.name());
            table.param("sigma_ueV", sigma);
        }
    }
}

/// Writes to `--out` (plus sidecar) or prints the CSV to stdout.
fn emit(table: &Table, cfg: &RunConfig) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            let meta = table.write(path)?;
            eprintln!("wrote {} and {}", path.display(), meta.display());
            Ok(())
        }
        None => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(std::io::stdout().lock());
            let err = |e: csv::Error| CliError::config(format!("cannot write to stdout: {e}"));
            w.write_record(&table.columns).map_err(err)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Field::render)).map_err(err)?;
            }
            w.flush().map_err(|e| CliError::config(format!("cannot write to stdout: {e}")))
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let omega = cfg.omega_value();
    let result = protocol(cfg, omega, true)?;
    let (n, m) = cfg.photons;
    let mut out = std::io::stdout().lock();
    let envelope = &result.info.envelope;
    let _ = writeln!(out, "|{n},{m}⟩, {envelope}, detector {}", result.info.detector);
    let _ = writeln!(out, "{:<10} {:>20} {:>20}", "signature", "probability", "concurrence");
    for o in &result.outcomes {
        let _ = writeln!(out, "{:<10} {:>20.12} {:>20.12}", o.signature.to_string(), o.probability, o.concurrence);
    }
    let _ = writeln!(out, "sum Pr = {:.12}", result.total_probability());
    let _ = writeln!(out, "C_avg = {:.12}", result.c_avg);

    if let Some(path) = &cfg.out {
        let mut table = Table::new("run", &["p", "q", "probability", "concurrence"]);
        for o in &result.outcomes {
            table.push(vec![o.signature.p.into(), o.signature.q.into(), o.probability.into(), o.concurrence.into()]);
        }
        describe(&mut table, cfg);
        table.param("omega_ueV", omega);
        table.param("omega_at", cfg.omega.describe());
        table.param("c_avg", result.c_avg);
        let meta = table.write(path)?;
        eprintln!("wrote {} and {}", path.display(), meta.display());
    }
    Ok(())
}

pub fn optimize(cfg: &RunConfig) -> Result<(), CliError> {
    let search = cfg.frequency_search();
    let best = optimize_frequency(|w| protocol(cfg, w, false).map(|r| r.c_avg).map_err(to_core), &search)
        .map_err(CliError::from)?;
    let e1 = cfg.sys.emitter1.energy();
    println!("omega_opt = {:.12} µeV (omega_opt − E1 = {:.12} µeV)", best.omega, best.omega - e1);
    println!("C_avg max = {:.12}", best.value);
    println!("{} objective evaluations over [{}, {}] µeV", best.evaluations, search.lo, search.hi);
    if best.at_boundary {
        eprintln!(
            "warning: the optimum lies on the edge of the search window [{}, {}] µeV; widen it with --lo/--hi",
            search.lo, search.hi
        );
    }
    let mut table = Table::new(
        "optimize",
        &["omega_opt_ueV", "omega_opt_minus_E1_ueV", "c_avg_max", "at_boundary", "evaluations"],
    )
    .units(&[("omega_opt_ueV", "ueV"), ("omega_opt_minus_E1_ueV", "ueV")]);
    table.push(vec![
        best.omega.into(),
        (best.omega - e1).into(),
        best.value.into(),
        best.at_boundary.into(),
        Field::Int(best.evaluations as i64),
    ]);
    describe(&mut table, cfg);
    table.param("search_lo_ueV", search.lo);
    table.param("search_hi_ueV", search.hi);
    table.param("search_points", search.coarse_points);
    table.param("search_tolerance_ueV", search.tolerance);
    if cfg.out.is_some() {
        emit(&table, cfg)?;
    }
    Ok(())
}

// The optimizer takes core errors; numerical CLI errors round-trip through
// the numerical variant so the exit code survives.
fn to_core(e: CliError) -> mzient::Error {
    match e {
        CliError::Numerical(detail) => mzient::Error::Numerical { module: "cli", detail },
        CliError::Config(msg) => mzient::Error::Parameter(msg),
    }
}

pub const GRID_COLUMNS: [&str; 4] = ["delta_over_g1", "g2_over_g1", "c_avg_max", "omega_opt"];

/// Grid table in the shared four-column schema.
pub fn grid_table(name: &str, table: &SweepTable) -> Table {
    let mut t = Table::new(name, &GRID_COLUMNS).units(&[("omega_opt", "ueV")]);
    for cell in &table.cells {
        let (c, w) = match &cell.result {
            Ok(r) => (r.c_avg_max, r.omega_opt),
            Err(_) => (f64::NAN, f64::NAN),
        };
        t.push(vec![cell.delta_over_g1.into(), cell.g2_over_g1.into(), c.into(), w.into()]);
    }
    t.param("photons", vec![table.photons.0, table.photons.1]);
    t.param("delta_points", table.delta_axis.len());
    t.param("g2_points", table.gamma_axis.len());
    t.param("boundary_cells", table.cells.iter().filter(|c| c.result.as_ref().is_ok_and(|r| r.at_boundary)).count());
    t
}

/// Prints a warning for boundary optima and fails on any failed cell.
pub fn check_sweep(table: &SweepTable, label: &str) -> Result<(), CliError> {
    let edge = table.cells.iter().filter(|c| c.result.as_ref().is_ok_and(|r| r.at_boundary)).count();
    if edge > 0 {
        eprintln!("warning: {label}: {edge} cells have their optimum on the search window edge");
    }
    match table.cells.iter().find_map(|c| c.result.as_ref().err().map(|e| (c, e))) {
        None => Ok(()),
        Some((cell, e)) => Err(CliError::Numerical(format!(
            "{label}: {} of {} cells failed; first at δ/Γ1 = {}, Γ2/Γ1 = {}: {e}",
            table.failures(),
            table.cells.len(),
            cell.delta_over_g1,
            cell.g2_over_g1
        ))),
    }
}

/// Sweep progress on stderr in 10 % steps.
pub fn progress(label: &str) -> impl Fn(usize, usize) + Sync + '_ {
    move |done, total| {
        if total >= 10 && done % (total / 10) == 0 || done == total {
            eprintln!("{label}: {done}/{total} cells");
        }
    }
}

pub fn sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.sweep_spec()?;
    let report = progress("sweep");
    let result = run_sweep(&spec, Some(&report))?;
    let mut table = grid_table("sweep", &result);
    table.param("e1_ueV", spec.energy1);
    table.param("gamma1_ueV", spec.rate1);
    table.param("beta1", spec.beta1);
    table.param("beta2", spec.beta2);
    table.param("detector", spec.detector.name());
    table.param("seed", cfg.seed);
    table.param("search_points", spec.coarse_points);
    emit(&table, cfg)?;
    check_sweep(&result, "sweep")
}
