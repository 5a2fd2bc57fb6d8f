//! Composite Gauss–Legendre quadrature with panel doubling.
//!
//! Two integration domains are supported: a finite window, and the whole
//! real line mapped onto (−π/2, π/2) by x = c + s·tan θ. The second form is
//! what the scattering integrals need, since Lorentzian tails and the pole
//! functions decay only algebraically.
//!
//! Breakpoints split the domain into segments so that kinks, jumps and narrow
//! peaks sit on panel edges. Each refinement round doubles the panels in every
//! segment; the estimate is accepted once two successive rounds agree to the
//! relative tolerance.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default number of panels before the first doubling (8 panels × 8 nodes).
pub const DEFAULT_PANELS: usize = 8;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_ROUNDS: usize = 6;
/// Differences below this are treated as converged regardless of magnitude.
pub const DEFAULT_ABS_TOLERANCE: f64 = 1e-14;
/// When an integral nearly cancels, accuracy is judged against this fraction
/// of ∫|f| instead of |∫f|.
pub const CANCELLATION_FLOOR: f64 = 1e-3;

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Anything that can be accumulated by a quadrature rule.
pub trait QuadValue: Sized {
    fn zero() -> Self;
    fn add_scaled(&mut self, other: &Self, weight: f64);
    /// Size of the difference, in the same norm as [`QuadValue::magnitude`].
    fn distance(&self, other: &Self) -> f64;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, weight: f64) {
        *self += weight * other;
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add_scaled(&mut self, other: &Self, weight: f64) {
        *self += other * weight;
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl QuadValue for Matrix4<Complex64> {
    fn zero() -> Self {
        Matrix4::zeros()
    }
    fn add_scaled(&mut self, other: &Self, weight: f64) {
        for (a, b) in self.iter_mut().zip(other.iter()) {
            *a += b * weight;
        }
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl<T: QuadValue, const N: usize> QuadValue for [T; N] {
    fn zero() -> Self {
        std::array::from_fn(|_| T::zero())
    }
    fn add_scaled(&mut self, other: &Self, weight: f64) {
        for (a, b) in self.iter_mut().zip(other) {
            a.add_scaled(b, weight);
        }
    }
    fn distance(&self, other: &Self) -> f64 {
        self.iter().zip(other).map(|(a, b)| a.distance(b)).sum()
    }
    fn magnitude(&self) -> f64 {
        self.iter().map(QuadValue::magnitude).sum()
    }
}

/// Integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// The finite interval [center − half_width, center + half_width].
    Window { center: f64, half_width: f64 },
    /// The real line through x = center + scale·tan θ.
    Line { center: f64, scale: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub domain: Domain,
    pub breakpoints: Vec<f64>,
    pub panels: usize,
    pub tolerance: f64,
    pub abs_tolerance: f64,
    pub max_rounds: usize,
}

impl QuadratureSpec {
    pub fn new(domain: Domain) -> Self {
        Self {
            domain,
            breakpoints: Vec::new(),
            panels: DEFAULT_PANELS,
            tolerance: DEFAULT_TOLERANCE,
            abs_tolerance: DEFAULT_ABS_TOLERANCE,
            max_rounds: DEFAULT_MAX_ROUNDS,
        }
    }

    pub fn window(center: f64, half_width: f64) -> Self {
        Self::new(Domain::Window { center, half_width })
    }

    pub fn line(center: f64, scale: f64) -> Self {
        Self::new(Domain::Line { center, scale })
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_abs_tolerance(mut self, abs_tolerance: f64) -> Self {
        self.abs_tolerance = abs_tolerance;
        self
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels;
        self
    }

    pub fn with_max_rounds(mut self, max_rounds: usize) -> Self {
        self.max_rounds = max_rounds;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.domain {
            Domain::Window { center, half_width } => {
                center.is_finite() && half_width.is_finite() && half_width > 0.0
            }
            Domain::Line { center, scale } => center.is_finite() && scale.is_finite() && scale > 0.0,
        };
        if !ok {
            return Err(Error::param(format!("invalid quadrature domain {:?}", self.domain)));
        }
        if !(self.tolerance > 0.0) || self.abs_tolerance < 0.0 {
            return Err(Error::param("quadrature tolerance must be positive"));
        }
        if self.panels < DEFAULT_PANELS {
            return Err(Error::param(format!(
                "at least {DEFAULT_PANELS} panels are required, got {}",
                self.panels
            )));
        }
        Ok(())
    }

    /// Segment edges in the integration variable (x for a window, θ for the line).
    fn edges(&self) -> Vec<f64> {
        let (lo, hi, map): (f64, f64, Box<dyn Fn(f64) -> f64>) = match self.domain {
            Domain::Window { center, half_width } => {
                (center - half_width, center + half_width, Box::new(|x| x))
            }
            Domain::Line { center, scale } => (
                -std::f64::consts::FRAC_PI_2,
                std::f64::consts::FRAC_PI_2,
                Box::new(move |x| ((x - center) / scale).atan()),
            ),
        };
        let mut edges = vec![lo, hi];
        edges.extend(
            self.breakpoints.iter().filter(|b| b.is_finite()).map(|&b| map(b)).filter(|&u| u > lo && u < hi),
        );
        edges.sort_by(f64::total_cmp);
        let min_gap = 1e-12 * (hi - lo);
        edges.dedup_by(|b, a| (*b - *a).abs() <= min_gap);
        if let Some(last) = edges.last_mut() {
            *last = hi;
        }
        edges
    }

    /// The composite rule used at refinement round `round`.
    pub fn rule(&self, round: usize) -> Rule {
        let edges = self.edges();
        let total = edges[edges.len() - 1] - edges[0];
        let factor = 1usize << round.min(20);
        let mut rule = Rule::default();
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let base = ((self.panels as f64) * (b - a) / total).round().max(1.0) as usize;
            let n = base * factor;
            let h = (b - a) / n as f64;
            for p in 0..n {
                let mid = a + (p as f64 + 0.5) * h;
                for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
                    for u in [mid - 0.5 * h * x, mid + 0.5 * h * x] {
                        let (node, jac) = self.map(u);
                        rule.nodes.push(node);
                        rule.weights.push(w * 0.5 * h * jac);
                    }
                }
            }
        }
        rule
    }

    fn map(&self, u: f64) -> (f64, f64) {
        match self.domain {
            Domain::Window { .. } => (u, 1.0),
            Domain::Line { center, scale } => {
                let c = u.cos();
                (center + scale * u.tan(), scale / (c * c))
            }
        }
    }
}

/// Nodes and weights of a composite rule.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate<T: QuadValue>(&self, f: impl FnMut(f64) -> T) -> T {
        self.integrate_with_l1(f).0
    }

    /// (∫f, ∫|f|)
    pub fn integrate_with_l1<T: QuadValue>(&self, mut f: impl FnMut(f64) -> T) -> (T, f64) {
        let mut acc = T::zero();
        let mut l1 = 0.0;
        for (x, w) in self.iter() {
            let v = f(x);
            l1 += w.abs() * v.magnitude();
            acc.add_scaled(&v, w);
        }
        (acc, l1)
    }
}

/// A converged integral and how it got there.
#[derive(Debug, Clone, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    /// Relative change between the last two rounds.
    pub relative_change: f64,
    /// Number of doublings performed.
    pub rounds: usize,
    pub evaluations: usize,
}

/// One refinement round: the value, integrand evaluations spent, and ∫|f|.
pub type Estimate<T> = (T, usize, f64);

/// Runs refinement rounds of `estimate(round)` until two successive values agree.
pub fn refine<T: QuadValue>(
    spec: &QuadratureSpec,
    module: &'static str,
    mut estimate: impl FnMut(usize) -> Result<Estimate<T>>,
) -> Result<Integral<T>> {
    spec.validate()?;
    let (mut previous, mut evaluations, _) = estimate(0)?;
    let mut last_change = f64::INFINITY;
    for round in 1..=spec.max_rounds {
        let (value, n, l1) = estimate(round)?;
        evaluations += n;
        let diff = value.distance(&previous);
        let scale = value.magnitude().max(CANCELLATION_FLOOR * l1);
        let change = if scale > 0.0 { diff / scale } else { diff };
        if !diff.is_finite() {
            return Err(Error::Numerical {
                module,
                detail: "integrand produced a non-finite value".into(),
            });
        }
        if diff <= spec.tolerance * scale || diff <= spec.abs_tolerance {
            return Ok(Integral { value, relative_change: change, rounds: round, evaluations });
        }
        if round == spec.max_rounds {
            return Err(Error::Quadrature {
                module,
                rounds: round,
                previous: previous.magnitude(),
                last: scale,
                change,
            });
        }
        previous = value;
        last_change = change;
    }
    // max_rounds == 0: a single estimate is accepted as is.
    Ok(Integral { value: previous, relative_change: last_change, rounds: 0, evaluations })
}

/// ∫ f over the spec's domain.
pub fn integrate_1d<T, F>(f: F, spec: &QuadratureSpec) -> Result<Integral<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    refine(spec, "envelopes", |round| {
        let rule = spec.rule(round);
        let (value, l1) = rule.integrate_with_l1(&f);
        Ok((value, rule.len(), l1))
    })
}

/// ∫∫ f(x, y) on the tensor product of two rules refined together.
pub fn integrate_2d<T, F>(f: F, x: &QuadratureSpec, y: &QuadratureSpec) -> Result<Integral<T>>
where
    T: QuadValue,
    F: Fn(f64, f64) -> T,
{
    y.validate()?;
    refine(x, "envelopes", |round| {
        let rx = x.rule(round);
        let ry = y.rule(round);
        let mut l1 = 0.0;
        let value = rx.integrate(|xi| {
            let (v, inner_l1) = ry.integrate_with_l1(|yi| f(xi, yi));
            l1 += inner_l1;
            v
        });
        Ok((value, rx.len() * ry.len(), l1))
    })
}

/// ∫ dx g(x, round) where `g` performs the inner integration itself at the
/// given refinement round, so that inner rules may depend on x.
pub fn integrate_nested<T, G>(outer: &QuadratureSpec, module: &'static str, inner: G) -> Result<Integral<T>>
where
    T: QuadValue,
    G: Fn(f64, usize) -> Result<(T, usize)>,
{
    refine(outer, module, |round| {
        let rule = outer.rule(round);
        let mut acc = T::zero();
        let mut evaluations = 0;
        let mut l1 = 0.0;
        for (x, w) in rule.iter() {
            let (value, n) = inner(x, round)?;
            l1 += w.abs() * value.magnitude();
            acc.add_scaled(&value, w);
            evaluations += n;
        }
        Ok((acc, evaluations, l1))
    })
}
