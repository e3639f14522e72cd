//! The weak product K_r^n: two vertices are adjacent iff they differ in
//! every coordinate. Independent sets, dictator sets and exhaustive
//! enumeration at desk scale.

use std::ops::Deref;

use num_rational::Ratio;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{GridShape, Point};

/// Largest grid handled by [`enumerate_by_subsets`].
pub const SUBSET_ENUMERATION_LIMIT: usize = 32;

/// A sorted, duplicate-free set of vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSet {
    shape: GridShape,
    members: Vec<usize>,
}

impl VertexSet {
    pub fn new(shape: GridShape, mut members: Vec<usize>) -> Result<Self> {
        for &m in &members {
            shape.check_index(m)?;
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self { shape, members })
    }

    pub fn empty(shape: GridShape) -> Self {
        Self { shape, members: Vec::new() }
    }

    pub fn from_points(shape: GridShape, points: &[Point]) -> Result<Self> {
        let members = points.iter().map(|p| shape.index_of(p)).collect::<Result<_>>()?;
        Self::new(shape, members)
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }

    pub fn points(&self) -> Vec<Point> {
        self.members
            .iter()
            .map(|&m| self.shape.point_of(m).expect("members are validated"))
            .collect()
    }

    /// `|A| / r^n`.
    pub fn measure(&self) -> Ratio<u64> {
        Ratio::new(self.len() as u64, self.shape.size() as u64)
    }

    /// Members whose coordinate `coord` equals `value`.
    pub fn count_on(&self, coord: usize, value: usize) -> usize {
        self.members.iter().filter(|&&m| self.shape.coord(m, coord) == value).count()
    }
}

/// A [`VertexSet`] with no two members adjacent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndependentSet(VertexSet);

impl IndependentSet {
    pub fn new(set: VertexSet) -> Result<Self> {
        if let Some((a, b)) = find_adjacent_pair(&set) {
            let shape = set.shape;
            return Err(Error::NotIndependent {
                first: shape.point_of(a)?.coords().to_vec(),
                second: shape.point_of(b)?.coords().to_vec(),
            });
        }
        Ok(Self(set))
    }

    pub fn into_vertex_set(self) -> VertexSet {
        self.0
    }
}

impl Deref for IndependentSet {
    type Target = VertexSet;

    fn deref(&self) -> &VertexSet {
        &self.0
    }
}

impl TryFrom<VertexSet> for IndependentSet {
    type Error = Error;

    fn try_from(set: VertexSet) -> Result<Self> {
        Self::new(set)
    }
}

/// `{x : x_coord = value}`, a maximum independent set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DictatorSet {
    set: IndependentSet,
    coord: usize,
    value: usize,
}

impl DictatorSet {
    pub fn coord(&self) -> usize {
        self.coord
    }

    pub fn value(&self) -> usize {
        self.value
    }

    pub fn independent_set(&self) -> &IndependentSet {
        &self.set
    }
}

impl Deref for DictatorSet {
    type Target = VertexSet;

    fn deref(&self) -> &VertexSet {
        &self.set
    }
}

pub fn adjacent(u: &Point, v: &Point) -> Result<bool> {
    if u.coords().len() != v.coords().len() {
        return Err(Error::ShapeMismatch {
            left: format!("{}-dimensional point", u.coords().len()),
            right: format!("{}-dimensional point", v.coords().len()),
        });
    }
    Ok(u.coords().iter().zip(v.coords()).all(|(a, b)| a != b))
}

/// Adjacency by index, without validation.
pub(crate) fn adjacent_at(shape: GridShape, mut a: usize, mut b: usize) -> bool {
    let r = shape.r();
    for _ in 0..shape.n() {
        if a % r == b % r {
            return false;
        }
        a /= r;
        b /= r;
    }
    true
}

/// First adjacent pair in index order, if any.
pub fn find_adjacent_pair(set: &VertexSet) -> Option<(usize, usize)> {
    let m = &set.members;
    for (k, &a) in m.iter().enumerate() {
        for &b in &m[k + 1..] {
            if adjacent_at(set.shape, a, b) {
                return Some((a, b));
            }
        }
    }
    None
}

pub fn is_independent(set: &VertexSet) -> bool {
    find_adjacent_pair(set).is_none()
}

pub fn dictator_set(shape: GridShape, coord: usize, value: usize) -> Result<DictatorSet> {
    if coord >= shape.n() {
        return Err(Error::validation(format!("coordinate {coord} out of range for {shape}")));
    }
    if value >= shape.r() {
        return Err(Error::validation(format!(
            "value {value} out of range for radix {}",
            shape.r()
        )));
    }
    let members = (0..shape.size()).filter(|&k| shape.coord(k, coord) == value).collect();
    Ok(DictatorSet { set: IndependentSet(VertexSet { shape, members }), coord, value })
}

/// All `r·n` dictator sets ordered by `(coord, value)`.
pub fn all_dictators(shape: GridShape) -> Vec<DictatorSet> {
    (0..shape.n())
        .flat_map(|i| (0..shape.r()).map(move |j| (i, j)))
        .map(|(i, j)| dictator_set(shape, i, j).expect("in range"))
        .collect()
}

/// `ε` with `|J|/|G| = (1 − ε)/r`, i.e. `ε = (r^{n−1} − |J|) / r^{n−1}`.
pub fn epsilon_of(set: &IndependentSet) -> Ratio<u64> {
    let max = (set.shape().size() / set.shape().r()) as u64;
    Ratio::new(max - set.len() as u64, max)
}

/// `|A △ B| / r^n`.
pub fn sym_diff_measure(a: &VertexSet, b: &VertexSet) -> Result<Ratio<u64>> {
    a.shape.ensure_same(&b.shape)?;
    let (x, y) = (&a.members, &b.members);
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let diff = (x.len() + y.len() - 2 * common) as u64;
    Ok(Ratio::new(diff, a.shape.size() as u64))
}

/// Output of an enumeration. `truncated` is set when more sets existed than
/// the cap allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct Enumeration {
    pub sets: Vec<IndependentSet>,
    pub truncated: bool,
}

#[derive(Clone)]
struct Bitset(Vec<u64>);

impl Bitset {
    fn empty(len: usize) -> Self {
        Bitset(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, k: usize) {
        self.0[k / 64] |= 1 << (k % 64);
    }

    fn clear(&mut self, k: usize) {
        self.0[k / 64] &= !(1 << (k % 64));
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &Bitset) -> Bitset {
        Bitset(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn and_not(&self, other: &Bitset) -> Bitset {
        Bitset(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + b)
            })
        })
    }
}

/// For every vertex, the set of other vertices it agrees with somewhere
/// (its non-neighbours in K_r^n).
fn compatibility(shape: GridShape) -> Vec<Bitset> {
    let size = shape.size();
    (0..size)
        .map(|v| {
            let mut b = Bitset::empty(size);
            for w in (0..size).filter(|&w| w != v && !adjacent_at(shape, v, w)) {
                b.set(w);
            }
            b
        })
        .collect()
}

struct SizedSearch {
    shape: GridShape,
    target: usize,
    cap: usize,
    compat: Vec<Bitset>,
    out: Vec<IndependentSet>,
    truncated: bool,
}

impl SizedSearch {
    fn extend(&mut self, chosen: &mut Vec<usize>, candidates: Bitset) {
        if self.truncated {
            return;
        }
        if chosen.len() == self.target {
            if self.out.len() == self.cap {
                self.truncated = true;
            } else {
                let set = VertexSet { shape: self.shape, members: chosen.clone() };
                self.out.push(IndependentSet(set));
            }
            return;
        }
        let mut remaining = candidates;
        while let Some(v) = remaining.first() {
            remaining.clear(v);
            if chosen.len() + 1 + remaining.count() < self.target {
                break;
            }
            let next = remaining.and(&self.compat[v]);
            chosen.push(v);
            self.extend(chosen, next);
            chosen.pop();
            if self.truncated {
                return;
            }
        }
    }
}

/// All independent sets of exactly `size` vertices, in lexicographic order,
/// by branch-and-bound over vertices in index order.
pub fn independent_sets_of_size(shape: GridShape, size: usize, cap: usize) -> Enumeration {
    let mut search = SizedSearch {
        shape,
        target: size,
        cap,
        compat: compatibility(shape),
        out: Vec::new(),
        truncated: false,
    };
    if size <= shape.size() {
        let mut all = Bitset::empty(shape.size());
        (0..shape.size()).for_each(|v| all.set(v));
        search.extend(&mut Vec::with_capacity(size), all);
    }
    Enumeration { sets: search.out, truncated: search.truncated }
}

/// Independent sets of size `r^{n−1}`.
pub fn max_independent_sets(shape: GridShape, cap: usize) -> Enumeration {
    independent_sets_of_size(shape, shape.size() / shape.r(), cap)
}

/// Brute force over all `size`-subsets of the vertex set. Only for grids
/// with at most [`SUBSET_ENUMERATION_LIMIT`] points.
pub fn enumerate_by_subsets(shape: GridShape, size: usize) -> Result<Vec<IndependentSet>> {
    let total = shape.size();
    if total > SUBSET_ENUMERATION_LIMIT {
        return Err(Error::domain(format!(
            "subset enumeration limited to {SUBSET_ENUMERATION_LIMIT} points, {shape} has {total}"
        )));
    }
    if size > total {
        return Ok(Vec::new());
    }
    let neighbours: Vec<u64> = (0..total)
        .map(|v| {
            (0..total)
                .filter(|&w| w != v && adjacent_at(shape, v, w))
                .fold(0u64, |m, w| m | 1 << w)
        })
        .collect();
    let to_set = |mask: u64| {
        let members = (0..total).filter(|&v| mask >> v & 1 == 1).collect();
        IndependentSet(VertexSet { shape, members })
    };
    let independent = |mask: u64| {
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            if neighbours[v] & mask != 0 {
                return false;
            }
            rest &= rest - 1;
        }
        true
    };
    let mut out = Vec::new();
    if size == 0 {
        out.push(to_set(0));
        return Ok(out);
    }
    // Gosper's hack: every mask with `size` bits, in increasing order
    let limit = 1u64 << total;
    let mut mask = (1u64 << size) - 1;
    while mask < limit {
        if independent(mask) {
            out.push(to_set(mask));
        }
        let low = mask & mask.wrapping_neg();
        let ripple = mask + low;
        mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
    out.sort_by(|a, b| a.members.cmp(&b.members));
    Ok(out)
}

/// Every inclusion-maximal independent set (Bron–Kerbosch with pivoting on
/// the non-adjacency graph), in lexicographic order.
pub fn maximal_independent_sets(shape: GridShape, cap: usize) -> Enumeration {
    struct Bk {
        shape: GridShape,
        cap: usize,
        compat: Vec<Bitset>,
        out: Vec<IndependentSet>,
        truncated: bool,
    }

    impl Bk {
        fn run(&mut self, chosen: &mut Vec<usize>, p: Bitset, x: Bitset) {
            if self.truncated {
                return;
            }
            if p.is_empty() {
                if x.is_empty() {
                    if self.out.len() == self.cap {
                        self.truncated = true;
                        return;
                    }
                    let mut members = chosen.clone();
                    members.sort_unstable();
                    self.out.push(IndependentSet(VertexSet { shape: self.shape, members }));
                }
                return;
            }
            let pivot = p
                .iter()
                .chain(x.iter())
                .max_by_key(|&u| (p.and(&self.compat[u]).count(), std::cmp::Reverse(u)))
                .expect("p is non-empty");
            let branch = p.and_not(&self.compat[pivot]);
            let (mut p, mut x) = (p, x);
            for v in branch.iter() {
                chosen.push(v);
                self.run(chosen, p.and(&self.compat[v]), x.and(&self.compat[v]));
                chosen.pop();
                p.clear(v);
                x.set(v);
                if self.truncated {
                    return;
                }
            }
        }
    }

    let size = shape.size();
    let mut all = Bitset::empty(size);
    (0..size).for_each(|v| all.set(v));
    let mut bk = Bk { shape, cap, compat: compatibility(shape), out: Vec::new(), truncated: false };
    bk.run(&mut Vec::new(), all, Bitset::empty(size));
    let mut sets = bk.out;
    sets.sort_by(|a, b| a.members.cmp(&b.members));
    Enumeration { sets, truncated: bk.truncated }
}

/// Removes `k` members of `dictator` chosen uniformly without replacement
/// by a ChaCha8 generator seeded with `seed`.
pub fn perturb(dictator: &DictatorSet, k: usize, seed: u64) -> Result<IndependentSet> {
    let members = dictator.members();
    if k > members.len() {
        return Err(Error::validation(format!(
            "cannot remove {k} vertices from a dictator set of size {}",
            members.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drop = vec![false; members.len()];
    for pos in index::sample(&mut rng, members.len(), k) {
        drop[pos] = true;
    }
    let kept = members.iter().zip(&drop).filter(|(_, &d)| !d).map(|(&m, _)| m).collect();
    Ok(IndependentSet(VertexSet { shape: dictator.shape(), members: kept }))
}
