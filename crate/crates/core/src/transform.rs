//! Fourier transform on Z_r^n and the spectral decompositions built on it.
//!
//! `f̂(S) = E_T[f(T)·conj(u_S(T))]`, so `f̂(0̄)` is the mean of `f` and
//! Parseval reads `‖f‖₂² = Σ_S |f̂(S)|²`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Characters, GridFunction, GridShape, RootsOfUnity, Spectrum};

/// Level weights above 1 smaller than this count as numerical noise when
/// checking that a function has degree at most one.
pub const DEGREE_ONE_TOLERANCE: f64 = 1e-10;

/// Direct O(N²) evaluation of every coefficient. Reference implementation
/// for [`fast_forward`].
pub fn forward(f: &GridFunction) -> Spectrum {
    let shape = f.shape();
    let size = shape.size();
    let n = shape.n();
    let chars = Characters::new(shape);
    let mut coords = vec![0; size * n];
    for (k, chunk) in coords.chunks_mut(n.max(1)).enumerate().take(size) {
        shape.fill_coords(k, &mut chunk[..n]);
    }
    let point = |k: usize| &coords[k * n..(k + 1) * n];
    let values = f.values();
    let coeffs = (0..size)
        .map(|s| {
            let sum: Complex64 = (0..size)
                .map(|t| values[t] * chars.roots().pow_neg(chars.exponent(point(s), point(t))))
                .sum();
            sum / size as f64
        })
        .collect();
    Spectrum::new(shape, coeffs).expect("transform of a finite function is finite")
}

/// Same contract as [`forward`], computed by one pass of size-r DFTs along
/// each axis: O(N·n·r) work.
pub fn fast_forward(f: &GridFunction) -> Spectrum {
    let shape = f.shape();
    let mut data = f.values().to_vec();
    let roots = RootsOfUnity::new(shape.r());
    for axis in 0..shape.n() {
        axis_pass(&mut data, shape, axis, &roots, Direction::Forward);
    }
    let scale = 1.0 / shape.size() as f64;
    data.iter_mut().for_each(|z| *z *= scale);
    Spectrum::new(shape, data).expect("transform of a finite function is finite")
}

/// `f(T) = Σ_S f̂(S)·u_S(T)`, evaluated axis by axis.
pub fn inverse(spec: &Spectrum) -> GridFunction {
    let shape = spec.shape();
    let mut data = spec.coeffs().to_vec();
    let roots = RootsOfUnity::new(shape.r());
    for axis in 0..shape.n() {
        axis_pass(&mut data, shape, axis, &roots, Direction::Inverse);
    }
    GridFunction::new(shape, data).expect("synthesis of a finite spectrum is finite")
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

fn axis_pass(
    data: &mut [Complex64],
    shape: GridShape,
    axis: usize,
    roots: &RootsOfUnity,
    dir: Direction,
) {
    let r = shape.r();
    let stride = shape.stride(axis);
    let block = stride * r;
    let mut line = vec![Complex64::new(0.0, 0.0); r];
    let mut out = vec![Complex64::new(0.0, 0.0); r];
    for block_start in (0..data.len()).step_by(block) {
        for offset in 0..stride {
            let start = block_start + offset;
            for (x, slot) in line.iter_mut().enumerate() {
                *slot = data[start + x * stride];
            }
            for (k, slot) in out.iter_mut().enumerate() {
                *slot = line
                    .iter()
                    .enumerate()
                    .map(|(x, &v)| {
                        let w = match dir {
                            Direction::Forward => roots.pow_neg(k * x),
                            Direction::Inverse => roots.pow(k * x),
                        };
                        v * w
                    })
                    .sum();
            }
            for (x, &v) in out.iter().enumerate() {
                data[start + x * stride] = v;
            }
        }
    }
}

/// `‖f^{=k}‖₂²` for `k = 0..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelWeights {
    weights: Vec<f64>,
}

impl LevelWeights {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn level(&self, k: usize) -> f64 {
        self.weights.get(k).copied().unwrap_or(0.0)
    }

    /// `‖f^{>k}‖₂²`.
    pub fn above(&self, k: usize) -> f64 {
        self.weights.iter().skip(k + 1).sum()
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `‖f^{≥1}‖₂²`.
    pub fn variance(&self) -> f64 {
        self.above(0)
    }
}

pub fn level_weights(spec: &Spectrum) -> LevelWeights {
    let shape = spec.shape();
    let mut weights = vec![0.0; shape.n() + 1];
    for (k, c) in spec.coeffs().iter().enumerate() {
        weights[shape.support_size_at(k)] += c.norm_sqr();
    }
    LevelWeights { weights }
}

/// `Σ_{S : keep(|S|)} f̂(S)·u_S`.
pub fn project(spec: &Spectrum, keep: impl Fn(usize) -> bool) -> GridFunction {
    let shape = spec.shape();
    let coeffs = spec
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, &c)| if keep(shape.support_size_at(k)) { c } else { Complex64::new(0.0, 0.0) })
        .collect();
    inverse(&Spectrum::new(shape, coeffs).expect("subset of a finite spectrum"))
}

/// The degree-one part of `f` living on a single coordinate:
/// `g_i = Σ_{j=1}^{r-1} f̂(j·e_i)·u_{j·e_i}`, tabulated over `x_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateComponent {
    pub coord: usize,
    pub values: Vec<Complex64>,
    /// `a_i² = ‖g_i‖₂²`.
    pub weight_sq: f64,
}

impl CoordinateComponent {
    pub fn weight(&self) -> f64 {
        self.weight_sq.sqrt()
    }
}

pub fn coordinate_component(spec: &Spectrum, coord: usize) -> Result<CoordinateComponent> {
    let shape = spec.shape();
    if coord >= shape.n() {
        return Err(Error::validation(format!(
            "coordinate {coord} out of range for {shape}"
        )));
    }
    let r = shape.r();
    let stride = shape.stride(coord);
    let roots = RootsOfUnity::new(r);
    let axis_coeffs: Vec<Complex64> = (1..r).map(|j| spec.coeffs()[j * stride]).collect();
    let values = (0..r)
        .map(|x| {
            axis_coeffs
                .iter()
                .enumerate()
                .map(|(jm1, &c)| c * roots.pow((jm1 + 1) * x))
                .sum()
        })
        .collect();
    let weight_sq = axis_coeffs.iter().map(|c| c.norm_sqr()).sum();
    Ok(CoordinateComponent { coord, values, weight_sq })
}

/// `a_i²` for every coordinate.
pub fn coordinate_weights(spec: &Spectrum) -> Vec<f64> {
    let shape = spec.shape();
    (0..shape.n())
        .map(|i| {
            let stride = shape.stride(i);
            (1..shape.r()).map(|j| spec.coeffs()[j * stride].norm_sqr()).sum()
        })
        .collect()
}

/// Fixes the coordinates in `fixed` (pairs of coordinate and value) of a
/// degree-≤1 function and returns the function of the remaining
/// coordinates, kept in their original order.
pub fn restrict(fle1: &GridFunction, fixed: &[(usize, usize)]) -> Result<GridFunction> {
    let shape = fle1.shape();
    let mut is_fixed = vec![false; shape.n()];
    let mut base = 0;
    for &(i, y) in fixed {
        if i >= shape.n() {
            return Err(Error::validation(format!("coordinate {i} out of range for {shape}")));
        }
        if y >= shape.r() {
            return Err(Error::validation(format!(
                "value {y} for coordinate {i} out of range for radix {}",
                shape.r()
            )));
        }
        if std::mem::replace(&mut is_fixed[i], true) {
            return Err(Error::validation(format!("coordinate {i} fixed twice")));
        }
        base += y * shape.stride(i);
    }
    let high = level_weights(&fast_forward(fle1)).above(1);
    if high >= DEGREE_ONE_TOLERANCE {
        return Err(Error::domain(format!(
            "restriction needs a degree-≤1 function; weight above level 1 is {high:e}"
        )));
    }

    let free: Vec<usize> = (0..shape.n()).filter(|&i| !is_fixed[i]).collect();
    let residual = if free.is_empty() {
        GridShape::point_grid(shape.r())
    } else {
        GridShape::with_cap(shape.r(), free.len(), usize::MAX)?
    };
    let mut x = vec![0; free.len()];
    let values = (0..residual.size())
        .map(|k| {
            residual.fill_coords(k, &mut x);
            let index = base
                + free.iter().zip(&x).map(|(&i, &xi)| xi * shape.stride(i)).sum::<usize>();
            fle1.values()[index]
        })
        .collect();
    GridFunction::new(residual, values)
}
