//! Bennett's inequality and the specialised tail bound derived from it for
//! sums of bounded degree-one components.
//!
//! Exponents are formed first and exponentiated last; valid regimes reach
//! exponents around −10³.

use crate::error::{Error, Result};

/// Scale between `σ²` and `ε′` in the specialised bound: `σ² = 10⁴·ε′`.
pub const VARIANCE_SCALE: f64 = 1e4;

/// Smallest threshold accepted by [`lemma33_tail`].
pub const MIN_THRESHOLD: f64 = 1.0 / 6.0;

/// Inputs to Bennett's bound for `Pr[Σ X_i ≥ t]` with `X_i ≤ c` a.s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailParams {
    sigma_sq: f64,
    c: f64,
    t: f64,
}

impl TailParams {
    pub fn new(sigma_sq: f64, c: f64, t: f64) -> Result<Self> {
        for (name, v) in [("sigma_sq", sigma_sq), ("c", c), ("t", t)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be finite and positive, got {v}")));
            }
        }
        Ok(Self { sigma_sq, c, t })
    }

    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// `h(u) = (1 + u)·ln(1 + u) − u`.
pub fn bennett_h(u: f64) -> Result<f64> {
    if u.is_nan() || u < 0.0 {
        return Err(Error::domain(format!("h(u) needs u ≥ 0, got {u}")));
    }
    if u < 1e-3 {
        // Σ_{k≥2} (−1)^k u^k / (k(k−1)); avoids cancellation near 0
        let mut term = u * u;
        let mut sum = 0.0;
        for k in 2..10 {
            let kf = k as f64;
            sum += term / (kf * (kf - 1.0));
            term *= -u;
        }
        return Ok(sum);
    }
    Ok((1.0 + u) * u.ln_1p() - u)
}

/// `ln` of [`bennett_tail`]: `−(σ²/c²)·h(tc/σ²)`.
pub fn bennett_log_tail(p: &TailParams) -> f64 {
    let u = p.t * p.c / p.sigma_sq;
    -(p.sigma_sq / (p.c * p.c)) * bennett_h(u).expect("u > 0 for valid params")
}

/// `exp(−(σ²/c²)·h(tc/σ²))`. Underflows to 0 only once the exponent drops
/// below roughly −745; use [`bennett_log_tail`] there.
pub fn bennett_tail(p: &TailParams) -> f64 {
    bennett_log_tail(p).exp()
}

/// True when `(eps_prime, c, t)` satisfy `t ≥ 1/6` and
/// `t ≥ 10⁴·e·ε′/c`, the regime of [`lemma33_tail`].
pub fn lemma33_in_regime(eps_prime: f64, c: f64, t: f64) -> bool {
    eps_prime > 0.0
        && c > 0.0
        && t.is_finite()
        && t >= MIN_THRESHOLD
        && t >= VARIANCE_SCALE * std::f64::consts::E * eps_prime / c
}

/// `ln` of [`lemma33_tail`].
pub fn lemma33_log_tail(eps_prime: f64, c: f64, t: f64) -> Result<f64> {
    if !(eps_prime.is_finite() && eps_prime > 0.0 && c.is_finite() && c > 0.0) {
        return Err(Error::domain(format!(
            "need finite eps' > 0 and c > 0, got eps'={eps_prime}, c={c}"
        )));
    }
    if !lemma33_in_regime(eps_prime, c, t) {
        return Err(Error::domain(format!(
            "t = {t} outside regime t ≥ max(1/6, 1e4·e·eps'/c) = {}",
            MIN_THRESHOLD.max(VARIANCE_SCALE * std::f64::consts::E * eps_prime / c)
        )));
    }
    let ratio = t * c / (VARIANCE_SCALE * std::f64::consts::E * eps_prime);
    Ok(-(t / c) * ratio.ln())
}

/// `exp(−(t/c)·ln(10⁻⁴·t·c / (e·ε′)))`: Bennett's bound with
/// `σ² = 10⁴ε′` after lower-bounding `h(u) ≥ u·ln(u/e)`. Always at least
/// `bennett_tail(10⁴ε′, c, t)`.
pub fn lemma33_tail(eps_prime: f64, c: f64, t: f64) -> Result<f64> {
    Ok(lemma33_log_tail(eps_prime, c, t)?.exp())
}

/// `2·exp((1/(6c))·ln(6·10⁴·e·ε′/c))`, the integrated tail used to bound
/// `‖f − 1‖₂² − ‖d(f,{0,1})‖₂²`; it must come out below `ε′`.
pub fn lemma33_integrated_bound(eps_prime: f64, c: f64) -> Result<f64> {
    if !(eps_prime.is_finite() && eps_prime > 0.0 && c.is_finite() && c > 0.0) {
        return Err(Error::domain(format!(
            "need finite eps' > 0 and c > 0, got eps'={eps_prime}, c={c}"
        )));
    }
    let inner = 6.0 * VARIANCE_SCALE * std::f64::consts::E * eps_prime / c;
    Ok(2.0 * (inner.ln() / (6.0 * c)).exp())
}

/// `√(10⁴·r·ε′)`, the pointwise bound on `|Re g_i(x)|`.
pub fn component_bound(r: usize, eps_prime: f64) -> f64 {
    (VARIANCE_SCALE * r as f64 * eps_prime).sqrt()
}
