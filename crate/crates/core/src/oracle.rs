//! Brute-force validation over tiny finite fields: point counts of
//! representation varieties, general linear groups and semistable loci,
//! compared against motive evaluations.

use crate::dt::{ss_stack_motive, HnCache};
use crate::error::{Error, Result};
use crate::motive::{gl_motive, gl_point_count, rep_space_motive};
use crate::quiver::{slope, DimVector, Quiver, StabilityWeights};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// Oracle configuration: the field size and enumeration limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FFConfig {
    pub q: u64,
    /// Hard cap on the enumeration size `q^(dim R_d)`.
    pub guard: u128,
    /// Maximum total dimension for subspace enumeration.
    pub max_total_dim: u64,
}

impl FFConfig {
    pub fn new(q: u64) -> Result<Self> {
        if !matches!(q, 2..=4) {
            return Err(Error::UnsupportedFieldSize(q));
        }
        Ok(FFConfig {
            q,
            guard: 10_000_000,
            max_total_dim: 3,
        })
    }
}

/// Field arithmetic for q in {2, 3, 4}; elements are encoded as 0..q-1.
/// For q = 4 the elements are 0, 1, a, a+1 with a^2 = a + 1.
#[derive(Debug, Clone, Copy)]
struct Field {
    q: u64,
}

const GF4_MUL: [[u8; 4]; 4] = [
    [0, 0, 0, 0],
    [0, 1, 2, 3],
    [0, 2, 3, 1],
    [0, 3, 1, 2],
];

impl Field {
    fn new(q: u64) -> Self {
        Field { q }
    }

    fn add(&self, a: u8, b: u8) -> u8 {
        match self.q {
            2 => a ^ b,
            3 => (a + b) % 3,
            4 => a ^ b,
            _ => unreachable!(),
        }
    }

    fn neg(&self, a: u8) -> u8 {
        match self.q {
            2 | 4 => a,
            3 => (3 - a) % 3,
            _ => unreachable!(),
        }
    }

    fn mul(&self, a: u8, b: u8) -> u8 {
        match self.q {
            2 => a & b,
            3 => (a * b) % 3,
            4 => GF4_MUL[a as usize][b as usize],
            _ => unreachable!(),
        }
    }

    fn inv(&self, a: u8) -> u8 {
        debug_assert!(a != 0);
        (1..self.q as u8).find(|&b| self.mul(a, b) == 1).unwrap()
    }
}

/// A matrix over the small field, stored row-major.
#[derive(Debug, Clone)]
struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl Matrix {
    fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    fn set(&mut self, r: usize, c: usize, value: u8) {
        self.data[r * self.cols + c] = value;
    }

    /// Apply to a column vector.
    fn apply(&self, field: &Field, v: &[u8]) -> Vec<u8> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = 0u8;
                for c in 0..self.cols {
                    acc = field.add(acc, field.mul(self.get(r, c), v[c]));
                }
                acc
            })
            .collect()
    }
}

/// Dimension of `R_d` as an exponent: `sum a_ij d_i d_j`.
fn rep_space_dim(quiver: &Quiver, d: &DimVector) -> u64 {
    let mut dim = 0;
    for i in 0..quiver.vertex_count() {
        for j in 0..quiver.vertex_count() {
            dim += quiver.arrow_count(i, j) * d.entry(i) * d.entry(j);
        }
    }
    dim
}

fn check_guard(quiver: &Quiver, d: &DimVector, cfg: &FFConfig) -> Result<u64> {
    let dim = rep_space_dim(quiver, d);
    let size = (cfg.q as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if size > cfg.guard {
        return Err(Error::GuardExceeded {
            size,
            guard: cfg.guard,
        });
    }
    Ok(dim)
}

/// `|R_d(F_q)| = q^(sum a_ij d_i d_j)`, closed form cross-checked by literal
/// enumeration when small.
pub fn count_reps(quiver: &Quiver, d: &DimVector, cfg: &FFConfig) -> Result<BigInt> {
    let dim = check_guard(quiver, d, cfg)?;
    let closed = num_traits::pow::pow(BigInt::from(cfg.q), dim as usize);
    let size = (cfg.q as u128).pow(dim as u32);
    if size <= 100_000 {
        let mut literal: u128 = 0;
        let mut odometer = vec![0u8; dim as usize];
        loop {
            literal += 1;
            let mut idx = 0;
            loop {
                if idx == odometer.len() {
                    break;
                }
                odometer[idx] += 1;
                if (odometer[idx] as u64) < cfg.q {
                    break;
                }
                odometer[idx] = 0;
                idx += 1;
            }
            if idx == odometer.len() {
                break;
            }
        }
        debug_assert_eq!(literal, size);
        if literal != size {
            return Err(Error::GuardExceeded {
                size: literal,
                guard: size,
            });
        }
    }
    Ok(closed)
}

/// `|G_d(F_q)| = prod_i prod_{k<d_i} (q^(d_i) - q^k)`.
pub fn count_gl(d: &DimVector, cfg: &FFConfig) -> BigInt {
    gl_point_count(d, cfg.q)
}

/// All subspaces of `F_q^n` of dimension `k`, as echelonized bases.
fn subspaces(field: &Field, n: usize, k: usize) -> Vec<Vec<Vec<u8>>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if k > n {
        return Vec::new();
    }
    let q = field.q;
    let total = (q as u128).pow(n as u32) as usize;
    let decode = |mut idx: usize| -> Vec<u8> {
        let mut v = vec![0u8; n];
        for slot in v.iter_mut() {
            *slot = (idx % q as usize) as u8;
            idx /= q as usize;
        }
        v
    };
    // Enumerate k-tuples of vectors, echelonize, dedupe.
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let mut tuple = vec![0usize; k];
    loop {
        let vectors: Vec<Vec<u8>> = tuple.iter().map(|&i| decode(i)).collect();
        if let Some(basis) = echelonize(field, &vectors) {
            if basis.len() == k && seen.insert(basis.clone()) {
                out.push(basis);
            }
        }
        // advance odometer
        let mut idx = 0;
        loop {
            if idx == k {
                return out;
            }
            tuple[idx] += 1;
            if tuple[idx] < total {
                break;
            }
            tuple[idx] = 0;
            idx += 1;
        }
    }
}

/// Reduced row echelon basis of the span; `None` if any vector is zero after
/// reduction is fine (dependent sets shrink). Returns rows sorted by pivot.
fn echelonize(field: &Field, vectors: &[Vec<u8>]) -> Option<Vec<Vec<u8>>> {
    let n = vectors.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for v in vectors {
        let mut v = v.clone();
        for row in &rows {
            let pivot = row.iter().position(|&x| x != 0).unwrap();
            let factor = v[pivot];
            if factor != 0 {
                for i in 0..n {
                    v[i] = field.add(v[i], field.neg(field.mul(factor, row[i])));
                }
            }
        }
        if let Some(pivot) = v.iter().position(|&x| x != 0) {
            let inv = field.inv(v[pivot]);
            for x in v.iter_mut() {
                *x = field.mul(inv, *x);
            }
            // back-substitute into existing rows
            for row in rows.iter_mut() {
                let factor = row[pivot];
                if factor != 0 {
                    for i in 0..n {
                        row[i] = field.add(row[i], field.neg(field.mul(factor, v[i])));
                    }
                }
            }
            rows.push(v);
        }
    }
    rows.sort_by_key(|row| row.iter().position(|&x| x != 0));
    Some(rows)
}

fn in_span(field: &Field, basis: &[Vec<u8>], v: &[u8]) -> bool {
    let mut v = v.to_vec();
    for row in basis {
        let pivot = row.iter().position(|&x| x != 0).unwrap();
        let factor = v[pivot];
        if factor != 0 {
            for i in 0..v.len() {
                v[i] = field.add(v[i], field.neg(field.mul(factor, row[i])));
            }
        }
    }
    v.iter().all(|&x| x == 0)
}

/// One point of `R_d(F_q)`: a matrix for every individual arrow.
struct RepPoint {
    // (source vertex, target vertex, matrix)
    maps: Vec<(usize, usize, Matrix)>,
}

fn arrow_list(quiver: &Quiver) -> Vec<(usize, usize)> {
    let mut arrows = Vec::new();
    for i in 0..quiver.vertex_count() {
        for j in 0..quiver.vertex_count() {
            for _ in 0..quiver.arrow_count(i, j) {
                arrows.push((i, j));
            }
        }
    }
    arrows
}

/// Iterate over all representation points, calling `visit` on each.
fn for_each_rep(
    quiver: &Quiver,
    d: &DimVector,
    cfg: &FFConfig,
    mut visit: impl FnMut(&RepPoint),
) {
    let arrows = arrow_list(quiver);
    let mut slots: Vec<(usize, usize, usize)> = Vec::new(); // (arrow idx, row, col)
    for (idx, &(i, j)) in arrows.iter().enumerate() {
        for r in 0..d.entry(j) as usize {
            for c in 0..d.entry(i) as usize {
                slots.push((idx, r, c));
            }
        }
    }
    let mut values = vec![0u8; slots.len()];
    loop {
        let mut point = RepPoint {
            maps: arrows
                .iter()
                .map(|&(i, j)| (i, j, Matrix::zero(d.entry(j) as usize, d.entry(i) as usize)))
                .collect(),
        };
        for (&(idx, r, c), &val) in slots.iter().zip(values.iter()) {
            point.maps[idx].2.set(r, c, val);
        }
        visit(&point);
        let mut idx = 0;
        loop {
            if idx == values.len() {
                return;
            }
            values[idx] += 1;
            if (values[idx] as u64) < cfg.q {
                break;
            }
            values[idx] = 0;
            idx += 1;
        }
    }
}

/// A graded subspace given by one echelon basis per vertex.
fn graded_subspaces(
    field: &Field,
    d: &DimVector,
    e: &DimVector,
) -> Vec<Vec<Vec<Vec<u8>>>> {
    let mut per_vertex: Vec<Vec<Vec<Vec<u8>>>> = Vec::new();
    for i in 0..d.len() {
        per_vertex.push(subspaces(field, d.entry(i) as usize, e.entry(i) as usize));
    }
    // cartesian product
    let mut out: Vec<Vec<Vec<Vec<u8>>>> = vec![Vec::new()];
    for choices in per_vertex {
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for prefix in &out {
            for choice in &choices {
                let mut tuple = prefix.clone();
                tuple.push(choice.clone());
                next.push(tuple);
            }
        }
        out = next;
    }
    out
}

fn is_invariant(field: &Field, point: &RepPoint, subspace: &[Vec<Vec<u8>>]) -> bool {
    for (src, dst, matrix) in &point.maps {
        for basis_vec in &subspace[*src] {
            let image = matrix.apply(field, basis_vec);
            if !in_span(field, &subspace[*dst], &image) {
                return false;
            }
        }
    }
    true
}

/// Exact count of theta-semistable points of `R_d(F_q)`: a representation is
/// semistable iff no invariant graded subspace has slope exceeding the slope
/// of `d`. Exhaustive over representations and subspaces.
pub fn count_semistable(
    quiver: &Quiver,
    theta: &StabilityWeights,
    d: &DimVector,
    cfg: &FFConfig,
) -> Result<BigInt> {
    if d.is_zero() {
        return Err(Error::ZeroDimVector);
    }
    check_guard(quiver, d, cfg)?;
    if d.total() > cfg.max_total_dim {
        return Err(Error::GuardExceeded {
            size: d.total() as u128,
            guard: cfg.max_total_dim as u128,
        });
    }
    let field = Field::new(cfg.q);
    let mu = slope(theta, d)?;

    // Destabilizing dimension vectors: nonzero proper e <= d with larger slope.
    let mut destabilizing: Vec<Vec<Vec<Vec<u8>>>> = Vec::new();
    for e in DimVector::iter_box(d) {
        if e.is_zero() || &e == d {
            continue;
        }
        if slope(theta, &e)? > mu {
            destabilizing.extend(graded_subspaces(&field, d, &e));
        }
    }

    let mut count = BigInt::from(0);
    for_each_rep(quiver, d, cfg, |point| {
        let destabilized = destabilizing
            .iter()
            .any(|subspace| is_invariant(&field, point, subspace));
        if !destabilized {
            count += 1;
        }
    });
    Ok(count)
}

/// Oracle equality: `evaluate(ss_stack_motive * gl_motive, L = q)` must equal
/// the brute-force semistable count.
pub fn verify_ss_motive(
    quiver: &Quiver,
    theta: &StabilityWeights,
    d: &DimVector,
    cfg: &FFConfig,
) -> Result<bool> {
    let mut cache = HnCache::new();
    let motive = ss_stack_motive(quiver, theta, d, &mut cache)?.mul(&gl_motive(d));
    let value = motive.evaluate(&BigRational::from_integer(BigInt::from(cfg.q)))?;
    if !value.denom().is_one() {
        return Ok(false);
    }
    let counted = count_semistable(quiver, theta, d, cfg)?;
    Ok(value.to_integer() == counted)
}

/// Check `evaluate(rep_space_motive, L=q) = |R_d|` and
/// `evaluate(gl_motive, L=q) = |G_d|`.
pub fn verify_point_counts(quiver: &Quiver, d: &DimVector, cfg: &FFConfig) -> Result<bool> {
    let q = BigRational::from_integer(BigInt::from(cfg.q));
    let reps = count_reps(quiver, d, cfg)?;
    let rep_eval = rep_space_motive(quiver, d)?.evaluate(&q)?;
    let gl = count_gl(d, cfg);
    let gl_eval = gl_motive(d).evaluate(&q)?;
    Ok(rep_eval == BigRational::from_integer(reps) && gl_eval == BigRational::from_integer(gl))
}
