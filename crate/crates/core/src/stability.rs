//! Recovering a dictator from a near-maximum independent set of K_r^n.
//!
//! The indicator `f` of `J` is approximated by `f̂(0̄) + g_{i0}`, where `i0`
//! carries the most degree-one weight. That one-coordinate function is
//! rounded to {0,1}, and the dictator on `i0` overlapping `J` most is
//! returned along with every quantity needed to check the stability bounds.

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{
    all_dictators, dictator_set, epsilon_of, sym_diff_measure, DictatorSet, IndependentSet,
    VertexSet,
};
use crate::grid::{round01, BooleanFunction, GridFunction, Spectrum};
use crate::transform::{coordinate_component, coordinate_weights, fast_forward, level_weights};

/// Slack on the rounding inequality `‖f − g1‖² ≤ 4‖f − g‖²`.
pub const ROUNDING_SLACK: f64 = 1e-9;

/// Slack on the empirical bound `‖f^{>1}‖₂² ≤ 2ε/r`.
pub const TAIL_BOUND_SLACK: f64 = 1e-12;

/// Relative tolerance for ties between coordinate weights.
const TIE_TOLERANCE: f64 = 1e-12;

/// `λ = (1 − √½ − ¼) / (√½ + ¼)`.
pub fn lambda() -> f64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (1.0 - s - 0.25) / (s + 0.25)
}

/// A rational value reported together with its float approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Exact {
    pub numerator: u64,
    pub denominator: u64,
}

impl Exact {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.numerator, self.denominator)
    }
}

impl From<Ratio<u64>> for Exact {
    fn from(r: Ratio<u64>) -> Self {
        Exact { numerator: *r.numer(), denominator: *r.denom() }
    }
}

#[derive(Serialize)]
struct ExactRepr {
    numerator: u64,
    denominator: u64,
    value: f64,
}

fn serialize_exact<S: serde::Serializer>(e: &Exact, s: S) -> std::result::Result<S::Ok, S::Error> {
    ExactRepr { numerator: e.numerator, denominator: e.denominator, value: e.value() }.serialize(s)
}

fn serialize_complex_vec<S: serde::Serializer>(
    v: &[Complex64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|z| [z.re, z.im]))
}

/// Output of [`approximate_by_dictator`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryResult {
    /// Coordinate with the largest `a_i²`.
    pub i0: usize,
    /// `f̂(0̄) + g_{i0}(x)` for `x = 0..r`.
    #[serde(serialize_with = "serialize_complex_vec")]
    pub g: Vec<Complex64>,
    /// `g` rounded to the nearest of 0 and 1.
    pub g1: Vec<u8>,
    /// `(coord, value)` of the returned dictator.
    pub dictator: (usize, usize),
    /// `‖f − g‖₂²`, via Parseval.
    pub residual_g: f64,
    /// `‖f − g1‖₂²`, evaluated directly.
    pub residual_g1: f64,
    /// Set when `f` has no ones and every choice is a tie.
    pub degenerate: bool,
}

/// Which hypotheses of the stability statements hold for an input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    pub r_at_least_20: bool,
    pub epsilon_below_1e_9: bool,
    pub level1_at_most_1_over_r: bool,
    pub epsilon_below_1_over_1e8_r: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub r: usize,
    pub n: usize,
    pub set_size: usize,
    #[serde(serialize_with = "serialize_exact")]
    pub epsilon: Exact,
    /// `‖f^{>1}‖₂²`.
    pub tail_weight: f64,
    /// `2ε/r`.
    pub tail_bound: f64,
    pub tail_bound_holds: bool,
    /// `‖f^{=1}‖₂²`.
    pub level1_weight: f64,
    /// `|f̂(0̄)|²`.
    pub level0_weight: f64,
    pub a_sq_sorted: Vec<f64>,
    pub recovery: RecoveryResult,
    /// `|J △ I| / r^n` for the recovered dictator `I`.
    #[serde(serialize_with = "serialize_exact")]
    pub symdiff: Exact,
    /// `40ε/r`.
    #[serde(serialize_with = "serialize_exact")]
    pub theorem_bound: Exact,
    pub theorem_bound_holds: bool,
    /// `2·10⁹·ε/r`, the trivial bound for large ε.
    #[serde(serialize_with = "serialize_exact")]
    pub trivial_bound: Exact,
    pub hypotheses: Hypotheses,
    pub oracle_dictator: (usize, usize),
    #[serde(serialize_with = "serialize_exact")]
    pub oracle_symdiff: Exact,
    pub oracle_agrees: bool,
}

/// Constants and quantities surrounding the two claims bounding `a_2²` and
/// `Σ_{i≥2} a_i²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimDiagnostics {
    /// `‖f^{>1}‖₂²`, taken as ε.
    pub epsilon: f64,
    pub a2_sq: f64,
    /// `2000·ε`.
    pub claim1_threshold: f64,
    pub claim1_holds: bool,
    pub tail_sum_from_2: f64,
    /// `4·ε`.
    pub claim2_threshold: f64,
    pub claim2_holds: bool,
    pub lambda: f64,
    pub lambda_sq: f64,
}

fn argmax_first(values: &[f64], tol: f64) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] + tol {
            best = i;
        }
    }
    best
}

/// `argmax_i a_i²`, ties toward the smallest index. Weights within
/// `10⁻¹²·‖f‖₂²` of each other count as tied.
pub fn dominant_coordinate(spec: &Spectrum) -> usize {
    let weights = coordinate_weights(spec);
    argmax_first(&weights, TIE_TOLERANCE * spec.norm_sq())
}

/// Approximates a Boolean function by `f̂(0̄) + g_{i0}`, rounds it, and picks
/// the dictator on `i0` with the largest overlap with `{f = 1}`.
pub fn approximate_by_dictator(f: &BooleanFunction) -> Result<RecoveryResult> {
    let shape = f.shape();
    let spec = fast_forward(f.function());
    let i0 = dominant_coordinate(&spec);
    let component = coordinate_component(&spec, i0)?;
    let weights = coordinate_weights(&spec);
    let tail = level_weights(&spec).above(1);

    let mean = spec.mean();
    let g: Vec<Complex64> = component.values.iter().map(|&v| mean + v).collect();
    let g1: Vec<u8> = g.iter().map(|&z| round01(z)).collect();

    let residual_g = weights.iter().enumerate().filter(|&(i, _)| i != i0).map(|(_, w)| w).sum::<f64>()
        + tail;
    let residual_g1 = f
        .function()
        .values()
        .iter()
        .enumerate()
        .map(|(k, &z)| (z - f64::from(g1[shape.coord(k, i0)])).norm_sqr())
        .sum::<f64>()
        / shape.size() as f64;

    let mut overlap = vec![0usize; shape.r()];
    let ones = f.ones();
    for &k in &ones {
        overlap[shape.coord(k, i0)] += 1;
    }
    let value = overlap
        .iter()
        .enumerate()
        .fold(0, |best, (j, &c)| if c > overlap[best] { j } else { best });

    Ok(RecoveryResult {
        i0,
        g,
        g1,
        dictator: (i0, value),
        residual_g,
        residual_g1,
        degenerate: ones.is_empty(),
    })
}

/// Brute-force nearest dictator: minimises `|J △ S_{i,j}|` over all `r·n`
/// dictators, ties toward the smallest `(i, j)`.
pub fn nearest_dictator_oracle(set: &VertexSet) -> (DictatorSet, Ratio<u64>) {
    all_dictators(set.shape())
        .into_iter()
        .map(|d| {
            let m = sym_diff_measure(set, &d).expect("same shape");
            (d, m)
        })
        .reduce(|best, next| if next.1 < best.1 { next } else { best })
        .expect("at least one dictator")
}

/// Runs the full recovery on the indicator of `set` and checks the result
/// against the stability bounds and the brute-force oracle.
pub fn recover_independent_set(set: &IndependentSet) -> Result<(DictatorSet, StabilityReport)> {
    let shape = set.shape();
    if shape.r() < 3 {
        return Err(Error::domain(format!("stability recovery needs r ≥ 3, got r = {}", shape.r())));
    }
    let r = shape.r() as u64;
    let f = BooleanFunction::indicator(shape, set.members())?;
    let spec = fast_forward(f.function());
    let levels = level_weights(&spec);
    let recovery = approximate_by_dictator(&f)?;
    let (coord, value) = recovery.dictator;
    let dictator = dictator_set(shape, coord, value)?;

    let epsilon = epsilon_of(set);
    let eps = Exact::from(epsilon);
    let tail_weight = levels.above(1);
    let tail_bound = 2.0 * eps.value() / r as f64;
    let symdiff = sym_diff_measure(set, &dictator)?;
    let theorem_bound = epsilon * Ratio::new(40, r);
    let trivial_bound = epsilon * Ratio::new(2_000_000_000, r);
    let level1_weight = levels.level(1);

    let mut a_sq_sorted = coordinate_weights(&spec);
    a_sq_sorted.sort_by(|a, b| b.total_cmp(a));

    let (oracle, oracle_symdiff) = nearest_dictator_oracle(set);
    let eps_num = u128::from(*epsilon.numer());
    let eps_den = u128::from(*epsilon.denom());
    let hypotheses = Hypotheses {
        r_at_least_20: r >= 20,
        epsilon_below_1e_9: eps_num * 1_000_000_000 < eps_den,
        level1_at_most_1_over_r: level1_weight <= 1.0 / r as f64 + TAIL_BOUND_SLACK,
        epsilon_below_1_over_1e8_r: eps_num * 100_000_000 * u128::from(r) < eps_den,
    };

    let report = StabilityReport {
        r: shape.r(),
        n: shape.n(),
        set_size: set.len(),
        epsilon: eps,
        tail_weight,
        tail_bound,
        tail_bound_holds: tail_weight <= tail_bound + TAIL_BOUND_SLACK,
        level1_weight,
        level0_weight: spec.mean().norm_sqr(),
        a_sq_sorted,
        symdiff: symdiff.into(),
        theorem_bound: theorem_bound.into(),
        theorem_bound_holds: symdiff <= theorem_bound,
        trivial_bound: trivial_bound.into(),
        hypotheses,
        oracle_dictator: (oracle.coord(), oracle.value()),
        oracle_symdiff: oracle_symdiff.into(),
        oracle_agrees: oracle == dictator,
        recovery,
    };
    Ok((dictator, report))
}

/// Result of [`corollary_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorollaryCheck {
    /// Some dictator contains the whole set.
    pub contained: bool,
    /// First containing dictator in `(coord, value)` order.
    pub witness: Option<(usize, usize)>,
    /// `c = min(10⁻⁹, (1 − 1/r)^{n−1}) / 40`.
    pub threshold: f64,
    /// `ε < c`.
    pub hypothesis_holds: bool,
}

/// Whether `set` lies inside a single dictator, and whether its ε is small
/// enough for containment to be guaranteed.
pub fn corollary_check(set: &IndependentSet) -> CorollaryCheck {
    let shape = set.shape();
    let witness = (0..shape.n())
        .flat_map(|i| (0..shape.r()).map(move |j| (i, j)))
        .find(|&(i, j)| set.count_on(i, j) == set.len());
    let r = shape.r() as f64;
    let threshold = 1e-9f64.min((1.0 - 1.0 / r).powi(shape.n() as i32 - 1)) / 40.0;
    let eps = Exact::from(epsilon_of(set)).value();
    CorollaryCheck {
        contained: witness.is_some(),
        witness,
        threshold,
        hypothesis_holds: eps < threshold,
    }
}

/// Quantities bounding `a_2²` and `Σ_{i≥2} a_i²`, with ε taken as the
/// measured `‖f^{>1}‖₂²`.
pub fn claim_diagnostics(f: &BooleanFunction) -> ClaimDiagnostics {
    let spec = fast_forward(f.function());
    claim_diagnostics_from_spectrum(&spec)
}

pub(crate) fn claim_diagnostics_from_spectrum(spec: &Spectrum) -> ClaimDiagnostics {
    let epsilon = level_weights(spec).above(1);
    let mut a = coordinate_weights(spec);
    a.sort_by(|x, y| y.total_cmp(x));
    let a2_sq = a.get(1).copied().unwrap_or(0.0);
    let tail_sum_from_2: f64 = a.iter().skip(1).sum();
    let lambda = lambda();
    ClaimDiagnostics {
        epsilon,
        a2_sq,
        claim1_threshold: 2000.0 * epsilon,
        claim1_holds: a2_sq <= 2000.0 * epsilon + TAIL_BOUND_SLACK,
        tail_sum_from_2,
        claim2_threshold: 4.0 * epsilon,
        claim2_holds: tail_sum_from_2 <= 4.0 * epsilon + TAIL_BOUND_SLACK,
        lambda,
        lambda_sq: lambda * lambda,
    }
}

/// `‖f − g‖₂²` evaluated pointwise, for checking the Parseval form of the
/// residual.
pub fn direct_residual(f: &BooleanFunction, recovery: &RecoveryResult) -> f64 {
    let shape = f.shape();
    f.function()
        .values()
        .iter()
        .enumerate()
        .map(|(k, &z)| (z - recovery.g[shape.coord(k, recovery.i0)]).norm_sqr())
        .sum::<f64>()
        / shape.size() as f64
}

/// `‖f − round01(g)‖₂²` for an arbitrary `g` on the same grid.
pub fn rounding_residual(f: &BooleanFunction, g: &GridFunction) -> Result<f64> {
    f.shape().ensure_same(&g.shape())?;
    Ok(f.function()
        .values()
        .iter()
        .zip(g.values())
        .map(|(&a, &b)| (a - f64::from(round01(b))).norm_sqr())
        .sum::<f64>()
        / f.shape().size() as f64)
}
