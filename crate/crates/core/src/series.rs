//! Box-truncated multivariate power series over [`RationalMotive`] with the
//! lambda-ring operations: Adams lifts, plethystic Exp (Sym) and Log.
//!
//! Truncation is componentwise: a series over box `B` stores coefficients for
//! dimension vectors `d <= B` only, and every operation silently drops keys
//! outside the box.

use crate::error::{Error, Result};
use crate::motive::RationalMotive;
use crate::quiver::DimVector;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    bound: DimVector,
    coeffs: BTreeMap<DimVector, RationalMotive>,
}

impl TruncatedSeries {
    /// The zero series over the given box.
    pub fn new(bound: DimVector) -> Self {
        TruncatedSeries {
            bound,
            coeffs: BTreeMap::new(),
        }
    }

    /// The multiplicative unit: coefficient 1 at `d = 0`.
    pub fn one(bound: DimVector) -> Self {
        let mut s = TruncatedSeries::new(bound);
        s.set_coefficient(DimVector::zero(s.bound.len()), RationalMotive::one());
        s
    }

    pub fn from_terms<I>(bound: DimVector, terms: I) -> Self
    where
        I: IntoIterator<Item = (DimVector, RationalMotive)>,
    {
        let mut s = TruncatedSeries::new(bound);
        for (d, c) in terms {
            s.add_to_coefficient(&d, c);
        }
        s
    }

    pub fn bound(&self) -> &DimVector {
        &self.bound
    }

    pub fn coefficient(&self, d: &DimVector) -> RationalMotive {
        self.coeffs.get(d).cloned().unwrap_or_else(RationalMotive::zero)
    }

    pub fn constant_term(&self) -> RationalMotive {
        self.coefficient(&DimVector::zero(self.bound.len()))
    }

    /// Stored (nonzero) terms.
    pub fn terms(&self) -> impl Iterator<Item = (&DimVector, &RationalMotive)> {
        self.coeffs.iter()
    }

    /// Support keys in graded lexicographic order.
    pub fn support_graded_lex(&self) -> Vec<DimVector> {
        let mut keys: Vec<DimVector> = self.coeffs.keys().cloned().collect();
        keys.sort_by(|a, b| a.graded_lex(b));
        keys
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn set_coefficient(&mut self, d: DimVector, value: RationalMotive) {
        if !d.le(&self.bound) {
            return; // outside the box: truncated away
        }
        if value.is_zero() {
            self.coeffs.remove(&d);
        } else {
            self.coeffs.insert(d, value);
        }
    }

    pub fn add_to_coefficient(&mut self, d: &DimVector, value: RationalMotive) {
        if !d.le(&self.bound) || value.is_zero() {
            return;
        }
        let sum = self.coefficient(d).add(&value);
        self.set_coefficient(d.clone(), sum);
    }

    fn check_box(&self, other: &Self) -> Result<()> {
        if self.bound != other.bound {
            return Err(Error::BoxMismatch(
                self.bound.entries().to_vec(),
                other.bound.entries().to_vec(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_box(other)?;
        let mut out = self.clone();
        for (d, c) in &other.coeffs {
            out.add_to_coefficient(d, c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            bound: self.bound.clone(),
            coeffs: self.coeffs.iter().map(|(d, c)| (d.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Cauchy convolution over dimension vectors, truncated to the box.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_box(other)?;
        let mut out = TruncatedSeries::new(self.bound.clone());
        for (d1, c1) in &self.coeffs {
            for (d2, c2) in &other.coeffs {
                let d = d1.add(d2);
                if d.le(&self.bound) {
                    out.add_to_coefficient(&d, c1.mul(c2));
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &RationalMotive) -> Self {
        if c.is_zero() {
            return TruncatedSeries::new(self.bound.clone());
        }
        TruncatedSeries {
            bound: self.bound.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(d, x)| (d.clone(), x.mul(c)))
                .collect(),
        }
    }

    pub fn scale_rational(&self, c: &BigRational) -> Self {
        self.scale(&RationalMotive::from_rational(c.clone()))
    }

    pub fn pow(&self, exp: u32) -> Result<Self> {
        let mut out = TruncatedSeries::one(self.bound.clone());
        for _ in 0..exp {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Apply the bar involution `v -> v^(-1)` to every coefficient.
    pub fn bar_coefficients(&self) -> Self {
        TruncatedSeries {
            bound: self.bound.clone(),
            coeffs: self.coeffs.iter().map(|(d, c)| (d.clone(), c.bar())).collect(),
        }
    }

    /// The Adams companion on series: the coefficient at `d` maps by `psi_n`
    /// to position `n * d`.
    pub fn adams(&self, n: u64) -> Self {
        let mut out = TruncatedSeries::new(self.bound.clone());
        for (d, c) in &self.coeffs {
            let nd = d.scale(n);
            if nd.le(&self.bound) {
                out.add_to_coefficient(&nd, c.adams(n));
            }
        }
        out
    }

    /// Ordinary truncated exponential; requires zero constant term.
    fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut out = TruncatedSeries::one(self.bound.clone());
        let mut term = TruncatedSeries::one(self.bound.clone());
        let max_order = self.bound.total();
        for k in 1..=max_order {
            term = term.mul(self)?.scale_rational(&BigRational::new(
                1.into(),
                i64::try_from(k).unwrap().into(),
            ));
            if term.is_zero() {
                break;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Ordinary truncated logarithm; requires constant term 1.
    fn log(&self) -> Result<Self> {
        if !self.constant_term().is_one() {
            return Err(Error::ConstantTermNotOne);
        }
        let mut h = self.clone();
        h.set_coefficient(DimVector::zero(self.bound.len()), RationalMotive::zero());
        let mut out = TruncatedSeries::new(self.bound.clone());
        let mut power = TruncatedSeries::one(self.bound.clone());
        let max_order = self.bound.total();
        for k in 1..=max_order {
            power = power.mul(&h)?;
            if power.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            let coeff = BigRational::new(sign.into(), i64::try_from(k).unwrap().into());
            out = out.add(&power.scale_rational(&coeff))?;
        }
        Ok(out)
    }

    /// Plethystic exponential `Exp(f) = exp(sum_{n>=1} psi_n(f) / n)`;
    /// requires support away from zero.
    pub fn plethystic_exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut accum = TruncatedSeries::new(self.bound.clone());
        for n in 1..=self.bound.total().max(1) {
            let layer = self.adams(n);
            if layer.is_zero() {
                continue;
            }
            accum = accum.add(&layer.scale_rational(&BigRational::new(
                1.into(),
                i64::try_from(n).unwrap().into(),
            )))?;
        }
        accum.exp()
    }

    /// Plethystic logarithm `Log(g) = sum_{n>=1} (mu(n)/n) psi_n(log g)`;
    /// requires constant term 1. Exact inverse of [`Self::plethystic_exp`]
    /// within the box.
    pub fn plethystic_log(&self) -> Result<Self> {
        let inner = self.log()?;
        let mut out = TruncatedSeries::new(self.bound.clone());
        for n in 1..=self.bound.total().max(1) {
            let mu = mobius(n);
            if mu == 0 {
                continue;
            }
            let layer = inner.adams(n);
            if layer.is_zero() {
                continue;
            }
            out = out.add(&layer.scale_rational(&BigRational::new(
                mu.into(),
                i64::try_from(n).unwrap().into(),
            )))?;
        }
        Ok(out)
    }
}

/// The Moebius function by trial factorization; `n` is bounded by the box
/// total so this stays tiny.
pub fn mobius(n: u64) -> i64 {
    debug_assert!(n >= 1);
    let mut n = n;
    let mut factors = 0;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0; // square factor
            }
            factors += 1;
        }
        p += 1;
    }
    if n > 1 {
        factors += 1;
    }
    if factors % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesTerm {
    d: DimVector,
    value: RationalMotive,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    #[serde(rename = "box")]
    bound: DimVector,
    coeffs: Vec<SeriesTerm>,
}

impl Serialize for TruncatedSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .support_graded_lex()
            .into_iter()
            .map(|d| SeriesTerm {
                value: self.coefficient(&d),
                d,
            })
            .collect();
        SeriesRepr {
            bound: self.bound.clone(),
            coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        Ok(TruncatedSeries::from_terms(
            repr.bound,
            repr.coeffs.into_iter().map(|t| (t.d, t.value)),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motive::LaurentPoly;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn dv(entries: &[u64]) -> DimVector {
        DimVector::new(entries.to_vec())
    }

    fn univariate(bound: u64, terms: &[(u64, RationalMotive)]) -> TruncatedSeries {
        TruncatedSeries::from_terms(
            dv(&[bound]),
            terms.iter().map(|(k, c)| (dv(&[*k]), c.clone())),
        )
    }

    fn one_plus(bound: u64, terms: &[(u64, RationalMotive)]) -> TruncatedSeries {
        let mut s = univariate(bound, terms);
        s.set_coefficient(dv(&[0]), RationalMotive::one());
        s
    }

    #[test]
    fn mul_examples() {
        let one_plus_t = one_plus(2, &[(1, RationalMotive::one())]);
        let one_minus_t = one_plus(2, &[(1, RationalMotive::from_integer(-1))]);
        let prod = one_plus_t.mul(&one_minus_t).unwrap();
        let expected = one_plus(2, &[(2, RationalMotive::from_integer(-1))]);
        assert_eq!(prod, expected);

        let vt = one_plus(3, &[(1, RationalMotive::v_power(1))]);
        assert_eq!(vt.mul(&TruncatedSeries::one(dv(&[3]))).unwrap(), vt);

        let one_plus_t = one_plus(1, &[(1, RationalMotive::one())]);
        let sq = one_plus_t.mul(&one_plus_t).unwrap();
        assert_eq!(sq, one_plus(1, &[(1, RationalMotive::from_integer(2))]));
    }

    #[test]
    fn box_mismatch_rejected() {
        let a = TruncatedSeries::one(dv(&[2]));
        let b = TruncatedSeries::one(dv(&[3]));
        assert!(matches!(a.mul(&b), Err(Error::BoxMismatch(_, _))));
    }

    #[test]
    fn adams_series_examples() {
        let vt = univariate(4, &[(1, RationalMotive::v_power(1))]);
        let got = vt.adams(2);
        let expected = univariate(4, &[(2, RationalMotive::v_power(2).neg())]);
        assert_eq!(got, expected);

        let f = univariate(4, &[(1, RationalMotive::one()), (2, RationalMotive::one())]);
        let expected = univariate(4, &[(2, RationalMotive::one()), (4, RationalMotive::one())]);
        assert_eq!(f.adams(2), expected);

        let g = univariate(4, &[(2, RationalMotive::v_power(5))]);
        assert!(g.adams(3).is_zero());
    }

    #[test]
    fn exp_of_t_is_geometric_series() {
        let t = univariate(5, &[(1, RationalMotive::one())]);
        let exp = t.plethystic_exp().unwrap();
        let expected = TruncatedSeries::from_terms(
            dv(&[5]),
            (0..=5).map(|k| (dv(&[k]), RationalMotive::one())),
        );
        assert_eq!(exp, expected);
    }

    #[test]
    fn exp_of_line_element_terminates() {
        let vt = univariate(5, &[(1, RationalMotive::v_power(1))]);
        let exp = vt.plethystic_exp().unwrap();
        let expected = one_plus(5, &[(1, RationalMotive::v_power(1))]);
        assert_eq!(exp, expected);
    }

    #[test]
    fn exp_of_proj_vir_2_matches_product_formula() {
        // Exp((v + v^(-1)) t) = (1 + v t)(1 + v^(-1) t); coefficient at t^2 is 1.
        let p = RationalMotive::from_laurent(crate::motive::proj_vir(2).unwrap());
        let f = univariate(4, &[(1, p)]);
        let exp = f.plethystic_exp().unwrap();
        assert_eq!(exp.coefficient(&dv(&[2])), RationalMotive::one());

        let left = one_plus(4, &[(1, RationalMotive::v_power(1))]);
        let right = one_plus(4, &[(1, RationalMotive::v_power(-1))]);
        assert_eq!(exp, left.mul(&right).unwrap());
    }

    #[test]
    fn exp_rejects_nonzero_constant_term() {
        let s = TruncatedSeries::one(dv(&[3]));
        assert!(matches!(
            s.plethystic_exp(),
            Err(Error::NonzeroConstantTerm)
        ));
    }

    #[test]
    fn log_examples() {
        let g = one_plus(4, &[(1, RationalMotive::v_power(1))]);
        let log = g.plethystic_log().unwrap();
        assert_eq!(log, univariate(4, &[(1, RationalMotive::v_power(1))]));

        // Log(1/(1 - t)) = t
        let geometric = TruncatedSeries::from_terms(
            dv(&[4]),
            (0..=4).map(|k| (dv(&[k]), RationalMotive::one())),
        );
        let log = geometric.plethystic_log().unwrap();
        assert_eq!(log, univariate(4, &[(1, RationalMotive::one())]));

        let zero = TruncatedSeries::new(dv(&[4]));
        assert!(matches!(
            zero.plethystic_log(),
            Err(Error::ConstantTermNotOne)
        ));
    }

    #[test]
    fn two_variable_round_trip() {
        // Log(Exp(t1 + v t2)) = t1 + v t2 over box (2, 2)
        let f = TruncatedSeries::from_terms(
            dv(&[2, 2]),
            [
                (dv(&[1, 0]), RationalMotive::one()),
                (dv(&[0, 1]), RationalMotive::v_power(1)),
            ],
        );
        let round = f.plethystic_exp().unwrap().plethystic_log().unwrap();
        assert_eq!(round, f);
    }

    #[test]
    fn line_element_law() {
        // Exp(-c (-v)^k t^d) = (1 - (-v)^k t^d)^c for c in {1, 2, 3}
        for k in -2i64..=3 {
            for c in 1u32..=3 {
                for d in 1u64..=2 {
                    let bound = dv(&[6]);
                    let minus_line = RationalMotive::from_laurent(LaurentPoly::monomial(
                        k,
                        if k % 2 == 0 { rat(-1) } else { rat(1) },
                    ));
                    let arg = TruncatedSeries::from_terms(
                        bound.clone(),
                        [(dv(&[d]), minus_line.scale(&rat(c as i64)))],
                    );
                    let exp = arg.plethystic_exp().unwrap();

                    let line_term = RationalMotive::from_laurent(LaurentPoly::monomial(
                        k,
                        if k % 2 == 0 { rat(1) } else { rat(-1) },
                    ));
                    let base = TruncatedSeries::from_terms(
                        bound.clone(),
                        [
                            (dv(&[0]), RationalMotive::one()),
                            (dv(&[d]), line_term.neg()),
                        ],
                    );
                    assert_eq!(exp, base.pow(c).unwrap(), "k={k} c={c} d={d}");
                }
            }
        }
    }

    #[test]
    fn mobius_values() {
        let expected = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
        for (i, &m) in expected.iter().enumerate() {
            assert_eq!(mobius(i as u64 + 1), m, "mu({})", i + 1);
        }
    }

    #[test]
    fn serde_round_trip() {
        let s = TruncatedSeries::from_terms(
            dv(&[2, 2]),
            [
                (dv(&[1, 0]), RationalMotive::v_power(-3)),
                (
                    dv(&[1, 1]),
                    RationalMotive::new(
                        LaurentPoly::one(),
                        LaurentPoly::l_power(1).sub(&LaurentPoly::one()),
                    )
                    .unwrap(),
                ),
            ],
        );
        let json = serde_json::to_string(&s).unwrap();
        let back: TruncatedSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    fn sparse_series_strategy() -> impl Strategy<Value = TruncatedSeries> {
        // up to 4 random monomial coefficients at random positions in box (4, 4)
        let term = (0u64..=4, 0u64..=4, -3i64..=3, prop_oneof![Just(1i64), Just(-1), Just(2)]);
        proptest::collection::vec(term, 0..4).prop_map(|terms| {
            TruncatedSeries::from_terms(
                dv(&[4, 4]),
                terms.into_iter().filter(|(a, b, _, _)| *a + *b > 0).map(
                    |(a, b, e, c)| {
                        (
                            dv(&[a, b]),
                            RationalMotive::from_laurent(LaurentPoly::monomial(e, rat(c))),
                        )
                    },
                ),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn exp_log_round_trip(f in sparse_series_strategy()) {
            let round = f.plethystic_exp().unwrap().plethystic_log().unwrap();
            prop_assert_eq!(round, f);
        }

        #[test]
        fn exp_is_homomorphism(f in sparse_series_strategy(), g in sparse_series_strategy()) {
            let lhs = f.add(&g).unwrap().plethystic_exp().unwrap();
            let rhs = f.plethystic_exp().unwrap().mul(&g.plethystic_exp().unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn adams_composition(f in sparse_series_strategy(), n in 1u64..=3, m in 1u64..=3) {
            prop_assert_eq!(f.adams(n).adams(m), f.adams(n * m));
        }
    }
}
