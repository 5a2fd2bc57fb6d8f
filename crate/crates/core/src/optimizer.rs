//! Photon-energy optimization and (δ, Γ₂) parameter sweeps.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::domain::{Signature, SystemParams};
use crate::error::{Error, Result};
use crate::protocols::{check_fock_input, fock_monochromatic, DetectorModel};

pub const DEFAULT_COARSE_POINTS: usize = 241;
/// Upper bound on the final bracket width, in µeV.
pub const DEFAULT_FREQUENCY_TOLERANCE: f64 = 1e-4;
/// Coarse maxima that get refined.
pub const REFINED_CANDIDATES: usize = 3;
/// Objective values closer than this count as equal; the lower energy wins.
pub const TIE_THRESHOLD: f64 = 1e-9;
/// Default window margin around the resonances, in units of the largest Γ.
pub const WINDOW_MARGIN: f64 = 3.0;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// How to search photon energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencySearch {
    pub lo: f64,
    pub hi: f64,
    pub coarse_points: usize,
    /// Golden-section refinement stops once the bracket is narrower than this.
    pub tolerance: f64,
}

impl FrequencySearch {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi, coarse_points: DEFAULT_COARSE_POINTS, tolerance: DEFAULT_FREQUENCY_TOLERANCE }
    }

    /// [min E − 3Γ_max, max E + 3Γ_max], refined to 10⁻⁶Γ_max (never coarser
    /// than the default tolerance) so results scale with the system.
    pub fn around(sys: &SystemParams) -> Self {
        let (e1, e2) = (sys.emitter1.energy(), sys.emitter2.energy());
        let g = sys.max_rate();
        let mut s = Self::new(e1.min(e2) - WINDOW_MARGIN * g, e1.max(e2) + WINDOW_MARGIN * g);
        s.tolerance = (1e-6 * g).min(DEFAULT_FREQUENCY_TOLERANCE);
        s
    }

    pub fn with_coarse_points(mut self, points: usize) -> Self {
        self.coarse_points = points;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.hi > self.lo) {
            return Err(Error::Search(format!("degenerate window [{}, {}]", self.lo, self.hi)));
        }
        if self.coarse_points < 3 {
            return Err(Error::Search(format!(
                "at least 3 coarse points are needed, got {}",
                self.coarse_points
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Search(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }

    fn coarse_grid(&self) -> Vec<f64> {
        let n = self.coarse_points - 1;
        let h = (self.hi - self.lo) / n as f64;
        (0..=n).map(|i| if i == n { self.hi } else { self.lo + i as f64 * h }).collect()
    }
}

/// Best photon energy found by [`optimize_frequency`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub omega: f64,
    pub value: f64,
    /// The optimum sits on an edge of the search window.
    pub at_boundary: bool,
    pub evaluations: usize,
}

fn better(a: (f64, f64), b: (f64, f64)) -> bool {
    // (omega, value): higher value wins, near-ties go to the lower energy.
    if (a.1 - b.1).abs() < TIE_THRESHOLD {
        a.0 < b.0
    } else {
        a.1 > b.1
    }
}

/// Maximizes `objective` over the search window: a coarse scan, then
/// golden-section refinement around the best few local maxima.
pub fn optimize_frequency<F>(objective: F, search: &FrequencySearch) -> Result<Optimum>
where
    F: Fn(f64) -> Result<f64>,
{
    search.validate()?;
    let grid = search.coarse_grid();
    let values = grid.iter().map(|&w| objective(w)).collect::<Result<Vec<_>>>()?;
    let mut evaluations = grid.len();

    let last = grid.len() - 1;
    let mut peaks: Vec<usize> = (0..=last)
        .filter(|&i| {
            (i == 0 || values[i] >= values[i - 1]) && (i == last || values[i] >= values[i + 1])
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    peaks.truncate(REFINED_CANDIDATES);

    let mut best = (grid[peaks[0]], values[peaks[0]]);
    for &i in &peaks {
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(last)];
        let (refined, n) = golden_section(&objective, lo, hi, search.tolerance)?;
        evaluations += n;
        for candidate in [(grid[i], values[i]), refined] {
            if better(candidate, best) {
                best = candidate;
            }
        }
    }
    let edge = 2.0 * search.tolerance;
    Ok(Optimum {
        omega: best.0,
        value: best.1,
        at_boundary: best.0 - search.lo <= edge || search.hi - best.0 <= edge,
        evaluations,
    })
}

fn golden_section<F>(objective: &F, mut a: f64, mut b: f64, tolerance: f64) -> Result<((f64, f64), usize)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    let mut evaluations = 2;
    while b - a > tolerance {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = objective(d)?;
        }
        evaluations += 1;
    }
    let mid = 0.5 * (a + b);
    let fm = objective(mid)?;
    evaluations += 1;
    let mut best = (mid, fm);
    for candidate in [(c, fc), (d, fd)] {
        if better(candidate, best) {
            best = candidate;
        }
    }
    Ok((best, evaluations))
}

/// A (δ/Γ₁, Γ₂/Γ₁) sweep of the optimal monochromatic Fock-state protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Photons in the upper and lower input arm.
    pub photons: (u32, u32),
    pub energy1: f64,
    pub rate1: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub detector: DetectorModel,
    pub delta_axis: Vec<f64>,
    pub gamma_axis: Vec<f64>,
    pub coarse_points: usize,
}

impl SweepSpec {
    /// Lossless emitters with E₁ = 0 and Γ₁ = 1 µeV.
    pub fn lossless(photons: (u32, u32), delta_axis: Vec<f64>, gamma_axis: Vec<f64>) -> Self {
        Self {
            photons,
            energy1: 0.0,
            rate1: 1.0,
            beta1: 1.0,
            beta2: 1.0,
            detector: DetectorModel::NumberResolving,
            delta_axis,
            gamma_axis,
            coarse_points: DEFAULT_COARSE_POINTS,
        }
    }

    pub fn system(&self, delta_over_g1: f64, g2_over_g1: f64) -> Result<SystemParams> {
        SystemParams::from_detuning(
            self.energy1,
            self.rate1,
            self.beta1,
            delta_over_g1 * self.rate1,
            g2_over_g1 * self.rate1,
            self.beta2,
        )
    }

    fn validate(&self) -> Result<()> {
        for (name, axis) in [("delta", &self.delta_axis), ("gamma2", &self.gamma_axis)] {
            if axis.is_empty() || axis.iter().any(|x| !x.is_finite()) {
                return Err(Error::param(format!("{name} axis must be non-empty and finite")));
            }
            if axis.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::param(format!("{name} axis must be strictly increasing")));
            }
        }
        if self.gamma_axis[0] <= 0.0 {
            return Err(Error::param("gamma2 axis must be positive"));
        }
        let (n, m) = self.photons;
        check_fock_input(n, m, &self.system(self.delta_axis[0], self.gamma_axis[0])?)
    }
}

/// Probability and concurrence of one signature at the optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeSummary {
    pub signature: Signature,
    pub probability: f64,
    pub concurrence: f64,
}

/// Optimum of one sweep cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOptimum {
    pub c_avg_max: f64,
    /// Absolute optimal photon energy (µeV).
    pub omega_opt: f64,
    /// (ω_opt − E₁)/Γ₁
    pub omega_opt_rel: f64,
    pub at_boundary: bool,
    pub outcomes: Vec<OutcomeSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub delta_over_g1: f64,
    pub g2_over_g1: f64,
    /// Failures are kept per cell as their error message.
    pub result: std::result::Result<CellOptimum, String>,
}

/// Cells in row-major order: one row per Γ₂/Γ₁ value, δ/Γ₁ varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub photons: (u32, u32),
    pub delta_axis: Vec<f64>,
    pub gamma_axis: Vec<f64>,
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    pub fn cell(&self, delta_index: usize, gamma_index: usize) -> &SweepCell {
        &self.cells[gamma_index * self.delta_axis.len() + delta_index]
    }

    /// Row of optimal C_avg at fixed Γ₂; failed cells read as NaN.
    pub fn row(&self, gamma_index: usize) -> Vec<f64> {
        (0..self.delta_axis.len())
            .map(|i| self.cell(i, gamma_index).result.as_ref().map_or(f64::NAN, |c| c.c_avg_max))
            .collect()
    }

    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.result.is_err()).count()
    }
}

/// Optimizes the photon energy of one cell.
pub fn optimize_cell(spec: &SweepSpec, delta_over_g1: f64, g2_over_g1: f64) -> Result<CellOptimum> {
    let sys = spec.system(delta_over_g1, g2_over_g1)?;
    let (n, m) = spec.photons;
    let search = FrequencySearch::around(&sys).with_coarse_points(spec.coarse_points);
    let run = |w: f64| fock_monochromatic(n, m, &sys, w, spec.detector);
    let best = optimize_frequency(|w| run(w).map(|r| r.c_avg), &search)?;
    let result = run(best.omega)?;
    Ok(CellOptimum {
        c_avg_max: best.value,
        omega_opt: best.omega,
        omega_opt_rel: (best.omega - spec.energy1) / spec.rate1,
        at_boundary: best.at_boundary,
        outcomes: result
            .outcomes
            .iter()
            .map(|o| OutcomeSummary {
                signature: o.signature,
                probability: o.probability,
                concurrence: o.concurrence,
            })
            .collect(),
    })
}

/// Runs every cell in parallel; `progress(done, total)` is called as cells finish.
pub fn sweep(spec: &SweepSpec, progress: Option<&(dyn Fn(usize, usize) + Sync)>) -> Result<SweepTable> {
    spec.validate()?;
    let nd = spec.delta_axis.len();
    let total = nd * spec.gamma_axis.len();
    let done = AtomicUsize::new(0);
    let cells = (0..total)
        .into_par_iter()
        .map(|idx| {
            let delta = spec.delta_axis[idx % nd];
            let gamma = spec.gamma_axis[idx / nd];
            let result = optimize_cell(spec, delta, gamma).map_err(|e| e.to_string());
            let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
            if let Some(report) = progress {
                report(finished, total);
            }
            SweepCell { delta_over_g1: delta, g2_over_g1: gamma, result }
        })
        .collect();
    Ok(SweepTable {
        photons: spec.photons,
        delta_axis: spec.delta_axis.clone(),
        gamma_axis: spec.gamma_axis.clone(),
        cells,
    })
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (n - 1) as f64;
            (0..n).map(|i| if i == n - 1 { hi } else { lo + i as f64 * h }).collect()
        }
    }
}
