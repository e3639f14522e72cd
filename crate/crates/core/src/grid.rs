//! The group Z_r^n, dense complex functions on it, and the basic
//! measurements (inner product, p-norms, distance to {0,1}).
//!
//! Points are stored by index using little-endian mixed radix: coordinate 0
//! varies fastest, so `index = Σ_i p_i · r^i`. Coordinates are zero-based
//! throughout the crate.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default upper bound on `r^n`.
pub const DEFAULT_SIZE_CAP: usize = 1 << 24;

/// Values of a [`BooleanFunction`] must lie this close to 0 or 1.
pub const DEFAULT_BOOL_TOLERANCE: f64 = 1e-6;

/// The pair `(r, n)` describing Z_r^n (equivalently the vertex set of K_r^n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridShape {
    r: usize,
    n: usize,
    size: usize,
}

impl GridShape {
    pub fn new(r: usize, n: usize) -> Result<Self> {
        Self::with_cap(r, n, DEFAULT_SIZE_CAP)
    }

    pub fn with_cap(r: usize, n: usize, cap: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::Shape(format!("radix r must be at least 2, got {r}")));
        }
        if n < 1 {
            return Err(Error::Shape(format!("dimension n must be at least 1, got {n}")));
        }
        let size = u32::try_from(n)
            .ok()
            .and_then(|n| (r as u128).checked_pow(n))
            .unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::SizeCap { size, cap });
        }
        Ok(Self { r, n, size: size as usize })
    }

    /// Zero-dimensional grid with a single point. Only produced by
    /// restricting every coordinate of a function.
    pub(crate) fn point_grid(r: usize) -> Self {
        Self { r, n: 0, size: 1 }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `r = 2` is a valid group but the stability results need `r ≥ 3`.
    pub fn is_binary(&self) -> bool {
        self.r == 2
    }

    /// `r^i`, the index stride of coordinate `i`.
    pub fn stride(&self, i: usize) -> usize {
        self.r.pow(i as u32)
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        if p.coords.len() != self.n {
            return Err(Error::validation(format!(
                "point has {} coordinates, shape {self} needs {}",
                p.coords.len(),
                self.n
            )));
        }
        if let Some((i, &c)) = p.coords.iter().enumerate().find(|(_, &c)| c >= self.r) {
            return Err(Error::validation(format!(
                "coordinate {i} = {c} out of range for radix {}",
                self.r
            )));
        }
        Ok(())
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.size {
            return Err(Error::validation(format!(
                "index {index} out of range for shape {self}"
            )));
        }
        Ok(())
    }

    pub fn index_of(&self, p: &Point) -> Result<usize> {
        self.check_point(p)?;
        Ok(p.coords.iter().rev().fold(0, |acc, &c| acc * self.r + c))
    }

    pub fn point_of(&self, index: usize) -> Result<Point> {
        self.check_index(index)?;
        let mut coords = vec![0; self.n];
        self.fill_coords(index, &mut coords);
        Ok(Point { coords })
    }

    /// Writes the coordinates of `index` into `out` without validation.
    pub(crate) fn fill_coords(&self, mut index: usize, out: &mut [usize]) {
        for c in out.iter_mut() {
            *c = index % self.r;
            index /= self.r;
        }
    }

    /// Coordinate `i` of the point at `index`.
    pub(crate) fn coord(&self, index: usize, i: usize) -> usize {
        (index / self.stride(i)) % self.r
    }

    /// `|S|` for the multi-index stored at `index`.
    pub fn support_size_at(&self, mut index: usize) -> usize {
        let mut count = 0;
        for _ in 0..self.n {
            if index % self.r != 0 {
                count += 1;
            }
            index /= self.r;
        }
        count
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.size).map(move |k| {
            let mut coords = vec![0; self.n];
            self.fill_coords(k, &mut coords);
            Point { coords }
        })
    }

    pub(crate) fn ensure_same(&self, other: &GridShape) -> Result<()> {
        if self.r != other.r || self.n != other.n {
            return Err(Error::ShapeMismatch {
                left: self.to_string(),
                right: other.to_string(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for GridShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z_{}^{}", self.r, self.n)
    }
}

/// An element of Z_r^n. Validity is checked against a [`GridShape`] on use.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    coords: Vec<usize>,
}

/// Fourier multi-indices share the representation of points.
pub type MultiIndex = Point;

impl Point {
    pub fn new(coords: Vec<usize>) -> Self {
        Self { coords }
    }

    pub fn zero(n: usize) -> Self {
        Self { coords: vec![0; n] }
    }

    /// `j · e_i`.
    pub fn axis(n: usize, i: usize, j: usize) -> Self {
        let mut coords = vec![0; n];
        coords[i] = j;
        Self { coords }
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    /// Number of nonzero coordinates.
    pub fn support_size(&self) -> usize {
        self.coords.iter().filter(|&&c| c != 0).count()
    }
}

impl From<Vec<usize>> for Point {
    fn from(coords: Vec<usize>) -> Self {
        Self { coords }
    }
}

/// Table of the r-th roots of unity `ω^k = exp(2πik/r)`.
#[derive(Clone, Debug)]
pub struct RootsOfUnity {
    table: Vec<Complex64>,
}

impl RootsOfUnity {
    pub fn new(r: usize) -> Self {
        let table = (0..r)
            .map(|k| {
                // exact at multiples of a quarter turn
                if (4 * k) % r == 0 {
                    match (4 * k) / r {
                        0 => Complex64::new(1.0, 0.0),
                        1 => Complex64::new(0.0, 1.0),
                        2 => Complex64::new(-1.0, 0.0),
                        _ => Complex64::new(0.0, -1.0),
                    }
                } else {
                    let theta = std::f64::consts::TAU * k as f64 / r as f64;
                    Complex64::new(theta.cos(), theta.sin())
                }
            })
            .collect();
        Self { table }
    }

    pub fn r(&self) -> usize {
        self.table.len()
    }

    /// `ω^k`, exponent reduced mod r.
    pub fn pow(&self, k: usize) -> Complex64 {
        self.table[k % self.table.len()]
    }

    /// `ω^{-k}`.
    pub fn pow_neg(&self, k: usize) -> Complex64 {
        let r = self.table.len();
        self.table[(r - k % r) % r]
    }
}

/// Characters `u_S` of one shape sharing a roots-of-unity table.
#[derive(Clone, Debug)]
pub struct Characters {
    shape: GridShape,
    roots: RootsOfUnity,
}

impl Characters {
    pub fn new(shape: GridShape) -> Self {
        Self { roots: RootsOfUnity::new(shape.r()), shape }
    }

    pub fn roots(&self) -> &RootsOfUnity {
        &self.roots
    }

    /// `Σ_i S_i T_i mod r`.
    pub fn exponent(&self, s: &[usize], t: &[usize]) -> usize {
        s.iter().zip(t).map(|(a, b)| a * b).sum::<usize>() % self.shape.r()
    }

    pub fn eval(&self, s: &MultiIndex, t: &Point) -> Result<Complex64> {
        self.shape.check_point(s)?;
        self.shape.check_point(t)?;
        Ok(self.roots.pow(self.exponent(s.coords(), t.coords())))
    }

    /// `u_S` as a dense function.
    pub fn function(&self, s: &MultiIndex) -> Result<GridFunction> {
        self.shape.check_point(s)?;
        let mut t = vec![0; self.shape.n()];
        let values = (0..self.shape.size())
            .map(|k| {
                self.shape.fill_coords(k, &mut t);
                self.roots.pow(self.exponent(s.coords(), &t))
            })
            .collect();
        GridFunction::new(self.shape, values)
    }
}

/// `u_S(T) = exp(2πi Σ S_i T_i / r)`.
pub fn character(s: &MultiIndex, t: &Point, shape: GridShape) -> Result<Complex64> {
    Characters::new(shape).eval(s, t)
}

/// A dense complex-valued function on Z_r^n, indexed by point index.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    shape: GridShape,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(shape: GridShape, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != shape.size() {
            return Err(Error::validation(format!(
                "{} values given for shape {shape} of size {}",
                values.len(),
                shape.size()
            )));
        }
        if let Some(k) = values.iter().position(|z| !z.is_finite()) {
            return Err(Error::validation(format!("non-finite value at index {k}")));
        }
        Ok(Self { shape, values })
    }

    pub fn zeros(shape: GridShape) -> Self {
        Self { shape, values: vec![Complex64::new(0.0, 0.0); shape.size()] }
    }

    pub fn constant(shape: GridShape, c: Complex64) -> Self {
        Self { shape, values: vec![c; shape.size()] }
    }

    pub fn from_real(shape: GridShape, values: &[f64]) -> Result<Self> {
        Self::new(shape, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Builds a function by evaluating `f` at every point's coordinates.
    pub fn from_fn(shape: GridShape, mut f: impl FnMut(&[usize]) -> Complex64) -> Result<Self> {
        let mut t = vec![0; shape.n()];
        let values = (0..shape.size())
            .map(|k| {
                shape.fill_coords(k, &mut t);
                f(&t)
            })
            .collect();
        Self::new(shape, values)
    }

    /// 0/1 indicator of the given point indices.
    pub fn indicator(shape: GridShape, members: &[usize]) -> Result<Self> {
        let mut values = vec![Complex64::new(0.0, 0.0); shape.size()];
        for &m in members {
            shape.check_index(m)?;
            values[m] = Complex64::new(1.0, 0.0);
        }
        Ok(Self { shape, values })
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, p: &Point) -> Result<Complex64> {
        Ok(self.values[self.shape.index_of(p)?])
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.shape.ensure_same(&other.shape)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(GridFunction { shape: self.shape, values })
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        GridFunction {
            shape: self.shape,
            values: self.values.iter().map(|z| z * c).collect(),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        mean(self.values.iter().map(|z| z.norm_sqr()), self.shape.size())
    }
}

/// A [`GridFunction`] whose values all lie within `tolerance` of 0 or 1.
#[derive(Clone, Debug, PartialEq)]
pub struct BooleanFunction {
    function: GridFunction,
    tolerance: f64,
}

impl BooleanFunction {
    pub fn new(function: GridFunction) -> Result<Self> {
        Self::with_tolerance(function, DEFAULT_BOOL_TOLERANCE)
    }

    pub fn with_tolerance(function: GridFunction, tolerance: f64) -> Result<Self> {
        if let Some(k) = function.values.iter().position(|&z| dist01(z) > tolerance) {
            return Err(Error::validation(format!(
                "value {} at index {k} is not within {tolerance:e} of 0 or 1",
                function.values[k]
            )));
        }
        Ok(Self { function, tolerance })
    }

    pub fn indicator(shape: GridShape, members: &[usize]) -> Result<Self> {
        Ok(Self {
            function: GridFunction::indicator(shape, members)?,
            tolerance: DEFAULT_BOOL_TOLERANCE,
        })
    }

    pub fn function(&self) -> &GridFunction {
        &self.function
    }

    pub fn shape(&self) -> GridShape {
        self.function.shape
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Indices where the function rounds to 1.
    pub fn ones(&self) -> Vec<usize> {
        self.function
            .values
            .iter()
            .enumerate()
            .filter(|(_, &z)| round01(z) == 1)
            .map(|(k, _)| k)
            .collect()
    }
}

/// Fourier coefficients `f̂(S)`, indexed by multi-index index.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    shape: GridShape,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(shape: GridShape, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != shape.size() {
            return Err(Error::validation(format!(
                "{} coefficients given for shape {shape} of size {}",
                coeffs.len(),
                shape.size()
            )));
        }
        if let Some(k) = coeffs.iter().position(|z| !z.is_finite()) {
            return Err(Error::validation(format!("non-finite coefficient at index {k}")));
        }
        Ok(Self { shape, coeffs })
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, s: &MultiIndex) -> Result<Complex64> {
        Ok(self.coeffs[self.shape.index_of(s)?])
    }

    /// `f̂(0̄)`, the mean of the original function.
    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `Σ_S |f̂(S)|²`.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn mean(terms: impl Iterator<Item = f64>, size: usize) -> f64 {
    terms.sum::<f64>() / size as f64
}

/// `⟨f, g⟩ = E_T[f(T)·conj(g(T))]` under the uniform measure.
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    f.shape.ensure_same(&g.shape)?;
    let sum: Complex64 = f.values.iter().zip(&g.values).map(|(a, b)| a * b.conj()).sum();
    Ok(sum / f.shape.size() as f64)
}

/// `(E|f|^p)^{1/p}`.
pub fn p_norm(f: &GridFunction, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::domain(format!("p-norm needs p ≥ 1, got {p}")));
    }
    if p == 2.0 {
        return Ok(f.norm_sq().sqrt());
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let m = mean(f.values.iter().map(|z| z.norm().powf(p)), f.shape.size());
    Ok(m.powf(1.0 / p))
}

/// `d(z, {0,1}) = min(|z|, |z − 1|)`.
pub fn dist01(z: Complex64) -> f64 {
    z.norm().min((z - 1.0).norm())
}

/// Nearest of 0 or 1; the bisector `|z| = |z − 1|` rounds to 0.
pub fn round01(z: Complex64) -> u8 {
    if z.norm_sqr() <= (z - 1.0).norm_sqr() {
        0
    } else {
        1
    }
}

/// `‖d(f, {0,1})‖₂²`.
pub fn dist01_norm_sq(f: &GridFunction) -> f64 {
    mean(f.values.iter().map(|&z| dist01(z).powi(2)), f.shape.size())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn worked() -> GridFunction {
        // {(0,0), (0,1)} on Z_3^2: indices 0 and 3
        GridFunction::indicator(GridShape::new(3, 2).unwrap(), &[0, 3]).unwrap()
    }

    #[test]
    fn index_examples() {
        let s = GridShape::new(3, 2).unwrap();
        assert_eq!(s.index_of(&Point::new(vec![0, 0])).unwrap(), 0);
        assert_eq!(s.index_of(&Point::new(vec![1, 0])).unwrap(), 1);
        assert_eq!(s.index_of(&Point::new(vec![0, 1])).unwrap(), 3);
        assert!(s.index_of(&Point::new(vec![3, 0])).is_err());
        assert!(s.index_of(&Point::new(vec![0])).is_err());
        assert!(s.point_of(9).is_err());
    }

    #[test]
    fn index_bijection_exhaustive() {
        for (r, n) in [(3, 2), (5, 3), (10, 4), (2, 13)] {
            let s = GridShape::new(r, n).unwrap();
            for k in 0..s.size() {
                let p = s.point_of(k).unwrap();
                assert_eq!(s.index_of(&p).unwrap(), k);
                assert_eq!(s.support_size_at(k), p.support_size());
            }
        }
    }

    #[test]
    fn shape_validation() {
        assert!(GridShape::new(1, 3).is_err());
        assert!(GridShape::new(3, 0).is_err());
        assert!(matches!(GridShape::new(2, 25), Err(Error::SizeCap { .. })));
        assert!(matches!(GridShape::new(7, 1000), Err(Error::SizeCap { .. })));
        assert!(GridShape::new(2, 24).is_ok());
        assert!(GridShape::with_cap(2, 25, 1 << 25).is_ok());
        assert!(GridShape::new(2, 3).unwrap().is_binary());
        assert!(!GridShape::new(3, 3).unwrap().is_binary());
    }

    #[test]
    fn character_examples() {
        let s32 = GridShape::new(3, 2).unwrap();
        let t = Point::new(vec![2, 1]);
        assert_eq!(character(&Point::zero(2), &t, s32).unwrap(), c(1.0, 0.0));
        let s42 = GridShape::new(4, 2).unwrap();
        let z = character(&Point::new(vec![1, 0]), &Point::new(vec![1, 0]), s42).unwrap();
        assert_eq!(z, c(0.0, 1.0));
        let z = character(&Point::new(vec![1, 2]), &Point::new(vec![2, 2]), s32).unwrap();
        assert!((z - c(1.0, 0.0)).norm() < 1e-12);
        assert!(character(&Point::new(vec![1]), &t, s32).is_err());
    }

    #[test]
    fn orthonormality_exhaustive() {
        for r in 3..=6 {
            for n in 1..=2 {
                let shape = GridShape::new(r, n).unwrap();
                let chars = Characters::new(shape);
                let us: Vec<_> = shape.points().map(|s| chars.function(&s).unwrap()).collect();
                for (a, ua) in us.iter().enumerate() {
                    for (b, ub) in us.iter().enumerate() {
                        let ip = inner_product(ua, ub).unwrap();
                        let want = if a == b { 1.0 } else { 0.0 };
                        assert!((ip - c(want, 0.0)).norm() < 1e-10, "r={r} n={n} {a} {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn inner_product_and_norms() {
        let f = worked();
        let ip = inner_product(&f, &f).unwrap();
        assert!((ip.re - 2.0 / 9.0).abs() < 1e-15 && ip.im == 0.0);
        assert!((p_norm(&f, 2.0).unwrap() - (2.0f64 / 9.0).sqrt()).abs() < 1e-15);

        let shape = f.shape();
        let one = GridFunction::constant(shape, c(1.0, 0.0));
        for p in [1.0, 1.5, 2.0, 3.0, 7.0] {
            assert!((p_norm(&one, p).unwrap() - 1.0).abs() < 1e-15);
        }
        let atom = GridFunction::indicator(shape, &[4]).unwrap();
        assert!((p_norm(&atom, 2.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(p_norm(&atom, 0.5).is_err());
        assert!(p_norm(&atom, f64::NAN).is_err());

        let other = GridFunction::zeros(GridShape::new(3, 3).unwrap());
        assert!(matches!(inner_product(&f, &other), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn dist01_examples() {
        assert_eq!(dist01(c(0.5, 0.0)), 0.5);
        assert_eq!(dist01(c(1.0, 0.0)), 0.0);
        assert!((dist01(c(0.3, 0.4)) - 0.5).abs() < 1e-15);
        assert_eq!(round01(c(0.5, 0.0)), 0);
        assert_eq!(round01(c(0.5000001, 0.0)), 1);
    }

    #[test]
    fn dist01_norm_examples() {
        let shape = GridShape::new(3, 2).unwrap();
        assert_eq!(dist01_norm_sq(&worked()), 0.0);
        let half = GridFunction::constant(shape, c(0.5, 0.0));
        assert!((dist01_norm_sq(&half) - 0.25).abs() < 1e-15);
        let f = GridFunction::from_fn(shape, |x| {
            if x[0] == 0 {
                c(2.0 / 3.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
        .unwrap();
        assert!((dist01_norm_sq(&f) - 1.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn function_validation() {
        let shape = GridShape::new(3, 1).unwrap();
        assert!(GridFunction::new(shape, vec![c(0.0, 0.0); 2]).is_err());
        assert!(GridFunction::new(shape, vec![c(f64::NAN, 0.0); 3]).is_err());
        assert!(GridFunction::indicator(shape, &[3]).is_err());
        let bad = GridFunction::from_real(shape, &[0.0, 0.5, 1.0]).unwrap();
        assert!(BooleanFunction::new(bad).is_err());
        let ok = GridFunction::from_real(shape, &[0.0, 1.0 + 1e-9, 1.0]).unwrap();
        assert_eq!(BooleanFunction::new(ok).unwrap().ones(), vec![1, 2]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn character_has_unit_modulus(r in 2usize..12, seed in proptest::collection::vec(0usize..1000, 8)) {
                let n = 4;
                let shape = GridShape::new(r, n).unwrap();
                let s = Point::new(seed[..4].iter().map(|x| x % r).collect());
                let t = Point::new(seed[4..].iter().map(|x| x % r).collect());
                let z = character(&s, &t, shape).unwrap();
                prop_assert!((z.norm() - 1.0).abs() < 1e-12);
            }

            #[test]
            fn dist01_below_both_anchors(re in -5.0f64..5.0, im in -5.0f64..5.0) {
                let z = c(re, im);
                prop_assert!(dist01(z) <= z.norm());
                prop_assert!(dist01(z) <= (z - 1.0).norm());
            }
        }

        proptest! {
            #[test]
            fn two_norm_matches_inner_product(vals in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 27)) {
                let shape = GridShape::new(3, 3).unwrap();
                let f = GridFunction::new(shape, vals.iter().map(|&(a, b)| c(a, b)).collect()).unwrap();
                let ip = inner_product(&f, &f).unwrap();
                let norm2 = p_norm(&f, 2.0).unwrap().powi(2);
                prop_assert!((norm2 - ip.re).abs() <= 1e-12 * ip.re.max(1e-300));
                prop_assert!(ip.im.abs() < 1e-12);
            }
        }
    }
}
