//! Quiver combinatorics: dimension vectors, Euler forms, stability slopes,
//! genericity checks, framed quivers and Ext-quivers.

use crate::error::{Error, Result};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

/// A finite quiver: an ordered list of vertex labels and an arrow-multiplicity
/// matrix `arrows[i][j]` = number of arrows from vertex `i` to vertex `j`.
///
/// Vertices are indexed by their position in the label list; labels are
/// cosmetic and only used for input and display.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    labels: Vec<String>,
    arrows: Vec<Vec<u64>>,
}

impl Quiver {
    pub fn new(labels: Vec<String>, arrows: Vec<Vec<u64>>) -> Result<Self> {
        let n = labels.len();
        if arrows.len() != n || arrows.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidQuiver(format!(
                "arrow matrix must be {n}x{n} for {n} vertices"
            )));
        }
        Ok(Quiver { labels, arrows })
    }

    /// Quiver with one vertex and `m` loops.
    pub fn loop_quiver(m: u64) -> Self {
        Quiver {
            labels: vec!["1".to_owned()],
            arrows: vec![vec![m]],
        }
    }

    /// The m-Kronecker quiver: two vertices, `m` arrows from the first to the second.
    pub fn kronecker(m: u64) -> Self {
        Quiver {
            labels: vec!["1".to_owned(), "2".to_owned()],
            arrows: vec![vec![0, m], vec![0, 0]],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn arrow_matrix(&self) -> &[Vec<u64>] {
        &self.arrows
    }

    pub fn arrow_count(&self, src: usize, dst: usize) -> u64 {
        self.arrows[src][dst]
    }

    fn check_dim(&self, d: &DimVector) -> Result<()> {
        if d.len() != self.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: self.vertex_count(),
                got: d.len(),
            });
        }
        Ok(())
    }

    /// Euler form `(d, e) = sum_i d_i e_i - sum_{a: i -> j} d_i e_j`.
    pub fn euler_form(&self, d: &DimVector, e: &DimVector) -> Result<i64> {
        self.check_dim(d)?;
        self.check_dim(e)?;
        let mut value = 0i64;
        for i in 0..self.vertex_count() {
            value += d.entry(i) as i64 * e.entry(i) as i64;
            for j in 0..self.vertex_count() {
                value -= self.arrows[i][j] as i64 * d.entry(i) as i64 * e.entry(j) as i64;
            }
        }
        Ok(value)
    }

    /// Antisymmetrized Euler form `<d, e> = (d, e) - (e, d)`.
    pub fn antisym_form(&self, d: &DimVector, e: &DimVector) -> Result<i64> {
        Ok(self.euler_form(d, e)? - self.euler_form(e, d)?)
    }

    /// True iff the arrow matrix is symmetric.
    pub fn is_symmetric(&self) -> bool {
        let n = self.vertex_count();
        (0..n).all(|i| (0..n).all(|j| self.arrows[i][j] == self.arrows[j][i]))
    }

    /// The framed quiver: one extra vertex labelled `∞` appended after the
    /// existing ones, with `f_i` arrows from `∞` to vertex `i`.
    pub fn framed(&self, f: &DimVector) -> Result<Quiver> {
        self.check_dim(f)?;
        let n = self.vertex_count();
        let mut labels = self.labels.clone();
        labels.push("∞".to_owned());
        let mut arrows = vec![vec![0u64; n + 1]; n + 1];
        for i in 0..n {
            for j in 0..n {
                arrows[i][j] = self.arrows[i][j];
            }
        }
        for i in 0..n {
            arrows[n][i] = f.entry(i);
        }
        Ok(Quiver { labels, arrows })
    }
}

#[derive(Serialize, Deserialize)]
struct QuiverRepr {
    vertices: Vec<String>,
    arrows: Vec<(String, String, u64)>,
}

impl Serialize for Quiver {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut arrows = Vec::new();
        for i in 0..self.vertex_count() {
            for j in 0..self.vertex_count() {
                if self.arrows[i][j] > 0 {
                    arrows.push((self.labels[i].clone(), self.labels[j].clone(), self.arrows[i][j]));
                }
            }
        }
        QuiverRepr {
            vertices: self.labels.clone(),
            arrows,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Quiver {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = QuiverRepr::deserialize(deserializer)?;
        let n = repr.vertices.len();
        let index = |label: &str| repr.vertices.iter().position(|l| l == label);
        let mut arrows = vec![vec![0u64; n]; n];
        for (src, dst, count) in &repr.arrows {
            let i = index(src).ok_or_else(|| {
                serde::de::Error::custom(format!("arrow references unknown vertex `{src}`"))
            })?;
            let j = index(dst).ok_or_else(|| {
                serde::de::Error::custom(format!("arrow references unknown vertex `{dst}`"))
            })?;
            arrows[i][j] += count;
        }
        Quiver::new(repr.vertices, arrows).map_err(serde::de::Error::custom)
    }
}

/// A dimension vector: one natural number per vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimVector(Vec<u64>);

impl DimVector {
    pub fn new(entries: Vec<u64>) -> Self {
        DimVector(entries)
    }

    pub fn zero(len: usize) -> Self {
        DimVector(vec![0; len])
    }

    /// The `i`-th unit vector of the given length.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut e = vec![0; len];
        e[i] = 1;
        DimVector(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entry(&self, i: usize) -> u64 {
        self.0[i]
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    /// `|d|`, the sum of the entries.
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &DimVector) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &DimVector) -> DimVector {
        DimVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise subtraction; caller must ensure `other <= self`.
    pub fn sub(&self, other: &DimVector) -> DimVector {
        DimVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: u64) -> DimVector {
        DimVector(self.0.iter().map(|a| a * k).collect())
    }

    /// Dot product with another vector of naturals.
    pub fn dot(&self, other: &DimVector) -> u64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// All vectors `0 <= d <= bound` componentwise, in odometer order.
    pub fn iter_box(bound: &DimVector) -> impl Iterator<Item = DimVector> + '_ {
        let len = bound.len();
        let count: u128 = bound.0.iter().map(|&b| b as u128 + 1).product();
        (0..count).map(move |mut idx| {
            let mut entries = vec![0u64; len];
            for i in (0..len).rev() {
                let base = bound.0[i] as u128 + 1;
                entries[i] = (idx % base) as u64;
                idx /= base;
            }
            DimVector(entries)
        })
    }

    /// Graded lexicographic order: first by total, then lexicographically.
    pub fn graded_lex(&self, other: &DimVector) -> std::cmp::Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl std::fmt::Display for DimVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// King stability weights: one integer per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StabilityWeights(Vec<i64>);

impl StabilityWeights {
    pub fn new(theta: Vec<i64>) -> Self {
        StabilityWeights(theta)
    }

    pub fn trivial(len: usize) -> Self {
        StabilityWeights(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[i64] {
        &self.0
    }

    pub fn pairing(&self, d: &DimVector) -> i64 {
        self.0
            .iter()
            .zip(d.entries())
            .map(|(t, &x)| t * x as i64)
            .sum()
    }
}

/// King slope `theta . d / |d|` as an exact rational.
pub fn slope(theta: &StabilityWeights, d: &DimVector) -> Result<Rational64> {
    if d.is_zero() {
        return Err(Error::ZeroDimVector);
    }
    Ok(Rational64::new(theta.pairing(d), d.total() as i64))
}

/// Bounded mu-genericity check: `<d, e> = 0` for all nonzero `d, e <= bound`
/// of slope `mu`. Only vectors inside the box are inspected.
pub fn is_mu_generic(
    quiver: &Quiver,
    theta: &StabilityWeights,
    mu: Rational64,
    bound: &DimVector,
) -> Result<bool> {
    let class: Vec<DimVector> = DimVector::iter_box(bound)
        .filter(|d| !d.is_zero())
        .filter(|d| slope(theta, d) == Ok(mu))
        .collect();
    for d in &class {
        for e in &class {
            if quiver.antisym_form(d, e)? != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Input data for a local Ext-quiver: the Gram matrix `p[k][l] = (gamma^k, gamma^l)`
/// of Euler pairings of the simple summands, their multiplicities, and an
/// optional framing datum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtQuiverSpec {
    pub gram: Vec<Vec<i64>>,
    pub multiplicities: DimVector,
    pub framing_dims: Option<Vec<u64>>,
}

impl ExtQuiverSpec {
    pub fn validate(&self) -> Result<()> {
        let s = self.gram.len();
        if s == 0 || self.gram.iter().any(|row| row.len() != s) {
            return Err(Error::InvalidGram("Gram matrix must be square and nonempty".into()));
        }
        for k in 0..s {
            for l in 0..s {
                if self.gram[k][l] != self.gram[l][k] {
                    return Err(Error::InvalidGram(format!(
                        "Gram matrix not symmetric at ({k}, {l})"
                    )));
                }
            }
            if self.gram[k][k] > 1 {
                return Err(Error::InvalidGram(format!(
                    "diagonal entry ({k}, {k}) = {} exceeds 1",
                    self.gram[k][k]
                )));
            }
        }
        if self.multiplicities.len() != s {
            return Err(Error::DimensionMismatch {
                expected: s,
                got: self.multiplicities.len(),
            });
        }
        if let Some(f) = &self.framing_dims {
            if f.len() != s {
                return Err(Error::DimensionMismatch { expected: s, got: f.len() });
            }
        }
        Ok(())
    }
}

/// The local Ext-quiver of a collection of simples with pairing matrix `p`:
/// vertex set `{1..s}` with `delta_kl - p[k][l]` arrows from `k` to `l`.
pub fn ext_quiver(spec: &ExtQuiverSpec) -> Result<Quiver> {
    spec.validate()?;
    let s = spec.gram.len();
    let mut arrows = vec![vec![0u64; s]; s];
    for k in 0..s {
        for l in 0..s {
            let delta = i64::from(k == l);
            let count = delta - spec.gram[k][l];
            if count < 0 {
                return Err(Error::InvalidGram(format!(
                    "delta_kl - p[k][l] = {count} < 0 at ({k}, {l})"
                )));
            }
            arrows[k][l] = count as u64;
        }
    }
    let labels = (1..=s).map(|k| k.to_string()).collect();
    Quiver::new(labels, arrows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(entries: &[u64]) -> DimVector {
        DimVector::new(entries.to_vec())
    }

    #[test]
    fn euler_form_examples() {
        let one_loop = Quiver::loop_quiver(1);
        assert_eq!(one_loop.euler_form(&d(&[1]), &d(&[1])).unwrap(), 0);

        for m in 0..5 {
            let q = Quiver::loop_quiver(m);
            for k in 0..4i64 {
                let dk = d(&[k as u64]);
                assert_eq!(q.euler_form(&dk, &dk).unwrap(), (1 - m as i64) * k * k);
            }
        }

        let kron2 = Quiver::kronecker(2);
        assert_eq!(kron2.euler_form(&d(&[1, 1]), &d(&[1, 1])).unwrap(), 0);
    }

    #[test]
    fn euler_form_rejects_mismatched_vectors() {
        let q = Quiver::kronecker(2);
        assert!(matches!(
            q.euler_form(&d(&[1]), &d(&[1, 1])),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn antisym_form_examples() {
        let sym = Quiver::new(
            vec!["a".into(), "b".into()],
            vec![vec![1, 3], vec![3, 0]],
        )
        .unwrap();
        for dd in DimVector::iter_box(&d(&[2, 2])) {
            for ee in DimVector::iter_box(&d(&[2, 2])) {
                assert_eq!(sym.antisym_form(&dd, &ee).unwrap(), 0);
            }
        }

        let kron1 = Quiver::kronecker(1);
        assert_eq!(kron1.antisym_form(&d(&[1, 0]), &d(&[0, 1])).unwrap(), -1);

        let kron3 = Quiver::kronecker(3);
        assert_eq!(kron3.antisym_form(&d(&[2, 1]), &d(&[2, 1])).unwrap(), 0);
    }

    #[test]
    fn antisym_is_difference_of_euler_forms() {
        let q = Quiver::new(
            vec!["a".into(), "b".into()],
            vec![vec![2, 1], vec![0, 1]],
        )
        .unwrap();
        for dd in DimVector::iter_box(&d(&[2, 2])) {
            for ee in DimVector::iter_box(&d(&[2, 2])) {
                let lhs = q.antisym_form(&dd, &ee).unwrap();
                let rhs = q.euler_form(&dd, &ee).unwrap() - q.euler_form(&ee, &dd).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn euler_form_is_bilinear() {
        let q = Quiver::new(
            vec!["a".into(), "b".into()],
            vec![vec![1, 2], vec![1, 0]],
        )
        .unwrap();
        let vs: Vec<DimVector> = DimVector::iter_box(&d(&[2, 2])).collect();
        for a in &vs {
            for b in &vs {
                for c in &vs {
                    let lhs = q.euler_form(&a.add(b), c).unwrap();
                    let rhs = q.euler_form(a, c).unwrap() + q.euler_form(b, c).unwrap();
                    assert_eq!(lhs, rhs);
                    let lhs = q.euler_form(c, &a.add(b)).unwrap();
                    let rhs = q.euler_form(c, a).unwrap() + q.euler_form(c, b).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn is_symmetric_examples() {
        assert!(Quiver::loop_quiver(3).is_symmetric());
        assert!(!Quiver::kronecker(2).is_symmetric());
        let two = Quiver::new(
            vec!["a".into(), "b".into()],
            vec![vec![0, 3], vec![3, 0]],
        )
        .unwrap();
        assert!(two.is_symmetric());
    }

    #[test]
    fn symmetry_matches_vanishing_antisym_on_units() {
        for arrows in [
            vec![vec![0u64, 2], vec![2, 0]],
            vec![vec![1, 2], vec![1, 0]],
            vec![vec![0, 1], vec![0, 0]],
        ] {
            let q = Quiver::new(vec!["a".into(), "b".into()], arrows).unwrap();
            let mut vanish = true;
            for i in 0..2 {
                for j in 0..2 {
                    let ei = DimVector::unit(2, i);
                    let ej = DimVector::unit(2, j);
                    vanish &= q.antisym_form(&ei, &ej).unwrap() == 0;
                }
            }
            assert_eq!(q.is_symmetric(), vanish);
        }
    }

    #[test]
    fn slope_examples() {
        let theta = StabilityWeights::new(vec![1, -1]);
        assert_eq!(slope(&theta, &d(&[1, 1])).unwrap(), Rational64::new(0, 1));
        let theta = StabilityWeights::new(vec![1, 0]);
        assert_eq!(slope(&theta, &d(&[1, 1])).unwrap(), Rational64::new(1, 2));
        let theta = StabilityWeights::new(vec![0]);
        assert_eq!(slope(&theta, &d(&[5])).unwrap(), Rational64::new(0, 1));
        assert!(matches!(slope(&theta, &d(&[0])), Err(Error::ZeroDimVector)));
    }

    #[test]
    fn mu_generic_examples() {
        let kron2 = Quiver::kronecker(2);
        let theta = StabilityWeights::new(vec![1, -1]);
        assert!(is_mu_generic(&kron2, &theta, Rational64::new(0, 1), &d(&[3, 3])).unwrap());

        let one_loop = Quiver::loop_quiver(1);
        let zero = StabilityWeights::new(vec![0]);
        assert!(is_mu_generic(&one_loop, &zero, Rational64::new(0, 1), &d(&[4])).unwrap());

        let a2 = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![vec![0, 1], vec![0, 0]],
        )
        .unwrap();
        let ones = StabilityWeights::new(vec![1, 1]);
        assert!(!is_mu_generic(&a2, &ones, Rational64::new(1, 1), &d(&[1, 1])).unwrap());
    }

    #[test]
    fn framed_quiver_examples() {
        let q = Quiver::loop_quiver(1).framed(&d(&[1])).unwrap();
        assert_eq!(q.vertex_count(), 2);
        assert_eq!(q.arrow_count(1, 0), 1);
        assert_eq!(q.arrow_count(0, 0), 1);
        assert_eq!(q.arrow_count(0, 1), 0);
        assert_eq!(q.arrow_count(1, 1), 0);

        let q = Quiver::loop_quiver(0).framed(&d(&[3])).unwrap();
        assert_eq!(q.arrow_count(1, 0), 3);
        assert_eq!(q.arrow_count(0, 0), 0);

        let q = Quiver::kronecker(2).framed(&d(&[1, 0])).unwrap();
        assert_eq!(q.vertex_count(), 3);
        assert_eq!(q.arrow_count(2, 0), 1);
        assert_eq!(q.arrow_count(2, 1), 0);
        assert_eq!(q.arrow_count(0, 1), 2);
    }

    #[test]
    fn framed_quiver_preserves_euler_form_away_from_infinity() {
        let q = Quiver::kronecker(3);
        let framed = q.framed(&d(&[2, 1])).unwrap();
        for dd in DimVector::iter_box(&d(&[2, 2])) {
            for ee in DimVector::iter_box(&d(&[2, 2])) {
                let mut de = dd.entries().to_vec();
                de.push(0);
                let mut ee2 = ee.entries().to_vec();
                ee2.push(0);
                assert_eq!(
                    q.euler_form(&dd, &ee).unwrap(),
                    framed
                        .euler_form(&DimVector::new(de.clone()), &DimVector::new(ee2))
                        .unwrap()
                );
            }
        }
    }

    #[test]
    fn ext_quiver_examples() {
        let spec = ExtQuiverSpec {
            gram: vec![vec![1]],
            multiplicities: d(&[1]),
            framing_dims: None,
        };
        let q = ext_quiver(&spec).unwrap();
        assert_eq!(q.vertex_count(), 1);
        assert_eq!(q.arrow_count(0, 0), 0);

        let spec = ExtQuiverSpec {
            gram: vec![vec![0]],
            multiplicities: d(&[1]),
            framing_dims: None,
        };
        assert_eq!(ext_quiver(&spec).unwrap().arrow_count(0, 0), 1);

        let spec = ExtQuiverSpec {
            gram: vec![vec![1, -1], vec![-1, 1]],
            multiplicities: d(&[1, 1]),
            framing_dims: None,
        };
        let q = ext_quiver(&spec).unwrap();
        assert_eq!(q.arrow_count(0, 0), 0);
        assert_eq!(q.arrow_count(1, 1), 0);
        assert_eq!(q.arrow_count(0, 1), 1);
        assert_eq!(q.arrow_count(1, 0), 1);
    }

    #[test]
    fn ext_quiver_rejects_negative_arrow_counts() {
        let spec = ExtQuiverSpec {
            gram: vec![vec![1, 1], vec![1, 1]],
            multiplicities: d(&[1, 1]),
            framing_dims: None,
        };
        assert!(matches!(ext_quiver(&spec), Err(Error::InvalidGram(_))));
    }

    #[test]
    fn ext_quiver_is_symmetric_and_recovers_gram() {
        let spec = ExtQuiverSpec {
            gram: vec![vec![0, -2], vec![-2, 1]],
            multiplicities: d(&[2, 1]),
            framing_dims: None,
        };
        let q = ext_quiver(&spec).unwrap();
        assert!(q.is_symmetric());
        for k in 0..2 {
            for l in 0..2 {
                let ek = DimVector::unit(2, k);
                let el = DimVector::unit(2, l);
                assert_eq!(q.euler_form(&ek, &el).unwrap(), spec.gram[k][l]);
            }
        }
    }

    #[test]
    fn box_iteration_and_graded_lex() {
        let all: Vec<DimVector> = DimVector::iter_box(&d(&[2, 1])).collect();
        assert_eq!(all.len(), 6);
        let mut sorted = all.clone();
        sorted.sort_by(|a, b| a.graded_lex(b));
        assert_eq!(sorted.first().unwrap(), &d(&[0, 0]));
        assert_eq!(sorted.last().unwrap(), &d(&[2, 1]));
    }
}
