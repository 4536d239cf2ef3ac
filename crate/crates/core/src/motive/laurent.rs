//! Sparse Laurent polynomials in `v = L^(1/2)` with exact rational coefficients.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;

/// A Laurent polynomial `sum c_e v^e`; no zero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigRational>,
}

pub(crate) fn rat_pow(base: &BigRational, exp: i64) -> BigRational {
    if exp == 0 {
        return BigRational::one();
    }
    let mut result = BigRational::one();
    let mut b = base.clone();
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        let sq = &b * &b;
        b = sq;
        e >>= 1;
    }
    if exp < 0 {
        result.recip()
    } else {
        result
    }
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(0, BigRational::one())
    }

    pub fn monomial(exp: i64, coeff: BigRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(exp, coeff);
        }
        LaurentPoly { coeffs }
    }

    /// `v^exp` with coefficient 1.
    pub fn v_power(exp: i64) -> Self {
        LaurentPoly::monomial(exp, BigRational::one())
    }

    /// `L^exp = v^(2 exp)`.
    pub fn l_power(exp: i64) -> Self {
        LaurentPoly::v_power(2 * exp)
    }

    pub fn from_integer(n: i64) -> Self {
        LaurentPoly::monomial(0, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigRational)>>(terms: I) -> Self {
        let mut p = LaurentPoly::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn coefficient(&self, exp: i64) -> BigRational {
        self.coeffs.get(&exp).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Lowest exponent (valuation); `None` for the zero polynomial.
    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn add_term(&mut self, exp: i64, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(exp).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&e, c) in &other.coeffs {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = LaurentPoly::zero();
        for (&e1, c1) in &self.coeffs {
            for (&e2, c2) in &other.coeffs {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, x)| (e, x * c)).collect(),
        }
    }

    /// Multiply by `v^shift`.
    pub fn shift(&self, delta: i64) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e + delta, c.clone())).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut out = LaurentPoly::one();
        for _ in 0..exp {
            out = out.mul(self);
        }
        out
    }

    /// The substitution `v -> v^(-1)`.
    pub fn bar(&self) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Adams operation: `v^k -> (-1)^((n+1)k) v^(nk)`, the ring endomorphism
    /// with `psi_n(-v) = (-v)^n`.
    pub fn adams(&self, n: u64) -> Self {
        let n = n as i64;
        LaurentPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&e, c)| {
                    let flip = (n + 1) * e % 2 != 0;
                    (n * e, if flip { -c.clone() } else { c.clone() })
                })
                .collect(),
        }
    }

    /// True iff every coefficient is an integer.
    pub fn all_integer(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    /// True iff every exponent has the given parity (vacuously true for 0).
    pub fn uniform_parity(&self, parity: i64) -> bool {
        self.coeffs.keys().all(|e| e.rem_euclid(2) == parity.rem_euclid(2))
    }

    /// True iff all exponents are even, i.e. the polynomial lies in `Q[L^(+-1)]`.
    pub fn even_exponents(&self) -> bool {
        self.coeffs.keys().all(|e| e % 2 == 0)
    }

    /// Evaluate at a nonzero rational value of `v`.
    pub fn eval(&self, v: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (&e, c) in &self.coeffs {
            acc += c * rat_pow(v, e);
        }
        acc
    }

    /// Evaluate a polynomial with even exponents at `L = q`.
    pub fn eval_in_l(&self, q: &BigRational) -> BigRational {
        debug_assert!(self.even_exponents());
        let mut acc = BigRational::zero();
        for (&e, c) in &self.coeffs {
            acc += c * rat_pow(q, e / 2);
        }
        acc
    }

    /// Value at `v = 1` (the sum of coefficients).
    pub fn eval_at_one(&self) -> BigRational {
        self.coeffs.values().cloned().sum()
    }

    /// Coefficient vector over `min_exp..=max_exp` with the given step,
    /// including interior zeros. Step must divide all exponent gaps.
    pub fn coefficient_sequence(&self, step: i64) -> Vec<BigRational> {
        let (Some(lo), Some(hi)) = (self.min_exp(), self.max_exp()) else {
            return Vec::new();
        };
        let mut out = Vec::with_capacity(((hi - lo) / step + 1) as usize);
        let mut e = lo;
        while e <= hi {
            out.push(self.coefficient(e));
            e += step;
        }
        out
    }

    /// Split into `(valuation, dense integer coefficients, rational scale)`:
    /// `self = scale * v^valuation * sum dense[i] v^i` with the dense part
    /// primitive over `Z`. Zero polynomial yields an empty dense part.
    pub(crate) fn to_primitive_dense(&self) -> (i64, Vec<BigInt>, BigRational) {
        if self.is_zero() {
            return (0, Vec::new(), BigRational::one());
        }
        let lo = self.min_exp().unwrap();
        let hi = self.max_exp().unwrap();
        let mut denom_lcm = BigInt::one();
        for c in self.coeffs.values() {
            denom_lcm = denom_lcm.lcm(c.denom());
        }
        let mut dense = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (&e, c) in &self.coeffs {
            dense[(e - lo) as usize] = c.numer() * (&denom_lcm / c.denom());
        }
        let content = super::gcd::content(&dense);
        for x in &mut dense {
            *x = &*x / &content;
        }
        (lo, dense, BigRational::new(content, denom_lcm))
    }

    pub(crate) fn from_dense(valuation: i64, dense: &[BigInt], scale: &BigRational) -> Self {
        let mut p = LaurentPoly::zero();
        for (i, c) in dense.iter().enumerate() {
            if !c.is_zero() {
                p.add_term(valuation + i as i64, BigRational::from_integer(c.clone()) * scale);
            }
        }
        p
    }
}

/// The Gaussian binomial `[N, n]` in `L = v^2`, computed as
/// `prod_{k=1}^{n} (L^(N-n+k) - 1) / (L^k - 1)` by exact division.
pub fn qbinom(big_n: u64, n: u64) -> Result<LaurentPoly> {
    if n > big_n {
        return Err(Error::QBinomRange { big_n, n });
    }
    let mut numerator = LaurentPoly::one();
    let mut denominator = LaurentPoly::one();
    for k in 1..=n {
        let num_factor = LaurentPoly::l_power((big_n - n + k) as i64).sub(&LaurentPoly::one());
        let den_factor = LaurentPoly::l_power(k as i64).sub(&LaurentPoly::one());
        numerator = numerator.mul(&num_factor);
        denominator = denominator.mul(&den_factor);
    }
    let (nv, nd, ns) = numerator.to_primitive_dense();
    let (dv, dd, ds) = denominator.to_primitive_dense();
    let quot = super::gcd::div_exact(&nd, &dd)
        .expect("q-binomial numerator is divisible by its denominator");
    Ok(LaurentPoly::from_dense(nv - dv, &quot, &(ns / ds)))
}

/// `[P^(n-1)]_vir = (v^n - v^(-n)) / (v - v^(-1)) = v^(n-1) + v^(n-3) + ... + v^(1-n)`.
pub fn proj_vir(n: u64) -> Result<LaurentPoly> {
    if n == 0 {
        return Err(Error::ProjVirZero);
    }
    let n = n as i64;
    Ok(LaurentPoly::from_terms(
        (0..n).map(|j| (n - 1 - 2 * j, BigRational::one())),
    ))
}

/// `[P^(n-1)] = 1 + L + ... + L^(n-1)`.
pub fn proj_space(n: u64) -> Result<LaurentPoly> {
    if n == 0 {
        return Err(Error::ProjVirZero);
    }
    Ok(LaurentPoly::from_terms(
        (0..n as i64).map(|j| (2 * j, BigRational::one())),
    ))
}

fn format_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub(crate) fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let numer: BigInt = n.trim().parse().ok()?;
            let denom: BigInt = d.trim().parse().ok()?;
            if denom.is_zero() {
                return None;
            }
            Some(BigRational::new(numer, denom))
        }
        None => {
            let numer: BigInt = s.trim().parse().ok()?;
            Some(BigRational::from_integer(numer))
        }
    }
}

impl std::fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (&e, c)) in self.coeffs.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_part = format_rational(&mag);
            match (e, coeff_part.as_str()) {
                (0, _) => write!(f, "{coeff_part}")?,
                (1, "1") => write!(f, "v")?,
                (1, _) => write!(f, "{coeff_part}*v")?,
                (_, "1") => write!(f, "v^{e}")?,
                _ => write!(f, "{coeff_part}*v^{e}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.coeffs.len()))?;
        for (&e, c) in &self.coeffs {
            map.serialize_entry(&e.to_string(), &format_rational(c))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct PolyVisitor;
        impl<'de> Visitor<'de> for PolyVisitor {
            type Value = LaurentPoly;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a map from exponent strings to coefficient strings")
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut access: A,
            ) -> std::result::Result<LaurentPoly, A::Error> {
                let mut p = LaurentPoly::zero();
                while let Some((exp, coeff)) = access.next_entry::<String, String>()? {
                    let e: i64 = exp
                        .trim()
                        .parse()
                        .map_err(|_| serde::de::Error::custom(format!("bad exponent `{exp}`")))?;
                    let c = parse_rational(&coeff).ok_or_else(|| {
                        serde::de::Error::custom(format!("bad coefficient `{coeff}`"))
                    })?;
                    p.add_term(e, c);
                }
                Ok(p)
            }
        }
        deserializer.deserialize_map(PolyVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn arithmetic_basics() {
        let p = LaurentPoly::v_power(2).sub(&LaurentPoly::one());
        let q = LaurentPoly::v_power(2).add(&LaurentPoly::one());
        let prod = p.mul(&q);
        assert_eq!(prod, LaurentPoly::v_power(4).sub(&LaurentPoly::one()));
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn qbinom_examples() {
        let p = qbinom(2, 1).unwrap();
        assert_eq!(p, LaurentPoly::l_power(1).add(&LaurentPoly::one()));

        let p = qbinom(4, 2).unwrap();
        let expected = LaurentPoly::from_terms([
            (0, rat(1)),
            (2, rat(1)),
            (4, rat(2)),
            (6, rat(1)),
            (8, rat(1)),
        ]);
        assert_eq!(p, expected);

        assert!(qbinom(5, 0).unwrap().is_one());
        assert!(matches!(qbinom(2, 3), Err(Error::QBinomRange { .. })));
    }

    #[test]
    fn qbinom_degree_and_positivity() {
        for big_n in 0..=8u64 {
            for n in 0..=big_n {
                let p = qbinom(big_n, n).unwrap();
                assert!(p.terms().all(|(_, c)| c.is_integer() && c.is_positive()));
                assert_eq!(p.max_exp().unwrap(), 2 * (n * (big_n - n)) as i64);
                assert_eq!(p.min_exp().unwrap(), 0);
            }
        }
    }

    #[test]
    fn qbinom_pascal_recurrence() {
        for big_n in 1..=12u64 {
            for n in 1..=big_n {
                let lhs = qbinom(big_n, n).unwrap();
                let a = qbinom(big_n - 1, n - 1).unwrap();
                let b = if n < big_n {
                    qbinom(big_n - 1, n).unwrap()
                } else {
                    LaurentPoly::zero()
                };
                let rhs = a.add(&LaurentPoly::l_power(n as i64).mul(&b));
                assert_eq!(lhs, rhs, "[{big_n},{n}]");
            }
        }
    }

    #[test]
    fn proj_vir_examples() {
        assert!(proj_vir(1).unwrap().is_one());
        assert_eq!(
            proj_vir(2).unwrap(),
            LaurentPoly::from_terms([(1, rat(1)), (-1, rat(1))])
        );
        assert_eq!(
            proj_vir(3).unwrap(),
            LaurentPoly::from_terms([(2, rat(1)), (0, rat(1)), (-2, rat(1))])
        );
        assert!(matches!(proj_vir(0), Err(Error::ProjVirZero)));
    }

    #[test]
    fn proj_vir_identity_and_palindromy() {
        let v_minus = LaurentPoly::v_power(1).sub(&LaurentPoly::v_power(-1));
        for n in 1..=9u64 {
            let p = proj_vir(n).unwrap();
            assert_eq!(p.bar(), p);
            assert_eq!(p.eval_at_one(), rat(n as i64));
            let lhs = p.mul(&v_minus);
            let rhs = LaurentPoly::v_power(n as i64).sub(&LaurentPoly::v_power(-(n as i64)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn adams_examples() {
        let v = LaurentPoly::v_power(1);
        assert_eq!(v.adams(2), LaurentPoly::monomial(2, -rat(1)));
        assert_eq!(v.adams(3), LaurentPoly::v_power(3));
        // psi_2(L) = L^2
        assert_eq!(LaurentPoly::l_power(1).adams(2), LaurentPoly::l_power(2));
    }

    #[test]
    fn adams_is_multiplicative_on_polys() {
        let p = LaurentPoly::from_terms([(1, rat(2)), (-3, rat(1))]);
        let q = LaurentPoly::from_terms([(0, rat(1)), (2, rat(-5))]);
        for n in 1..=5 {
            assert_eq!(p.mul(&q).adams(n), p.adams(n).mul(&q.adams(n)));
        }
    }

    #[test]
    fn bar_examples() {
        assert_eq!(LaurentPoly::v_power(3).bar(), LaurentPoly::v_power(-3));
        let pal = LaurentPoly::from_terms([(1, rat(1)), (-1, rat(1))]);
        assert_eq!(pal.bar(), pal);
    }

    #[test]
    fn serde_round_trip() {
        let p = LaurentPoly::from_terms([(-2, rat(1)), (0, BigRational::new(1.into(), 2.into())), (3, rat(-7))]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"-2":"1","0":"1/2","3":"-7"}"#);
        let back: LaurentPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn alternating_qbinom_identity() {
        // sum_n (-1)^n L^(n(n-1)/2) [N, n] vanishes for N >= 1 and is 1 for N = 0.
        for big_n in 0..=12u64 {
            let mut acc = LaurentPoly::zero();
            for n in 0..=big_n {
                let sign = if n % 2 == 0 { rat(1) } else { rat(-1) };
                let twist = LaurentPoly::l_power((n * n.saturating_sub(1) / 2) as i64);
                acc = acc.add(&twist.mul(&qbinom(big_n, n).unwrap()).scale(&sign));
            }
            if big_n == 0 {
                assert!(acc.is_one());
            } else {
                assert!(acc.is_zero(), "N = {big_n}: {acc}");
            }
        }
    }
}
