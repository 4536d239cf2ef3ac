//! The coefficient field: rational functions in `v = L^(1/2)` kept in a
//! reduced canonical form, together with the motive constructors used by the
//! engine ([G_d], [R_d], q-binomials, virtual projective spaces).

mod gcd;
mod laurent;

pub use laurent::{proj_space, proj_vir, qbinom, LaurentPoly};

use crate::error::{Error, Result};
use crate::quiver::{DimVector, Quiver};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// A reduced fraction of Laurent polynomials in `v`.
///
/// Canonical form: numerator and denominator are coprime, the denominator has
/// primitive integer coefficients, positive leading coefficient and valuation
/// zero (all `v`-shifts and rational scalars live in the numerator). Equality
/// of canonical forms is plain structural equality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalMotive {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalMotive {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: LaurentPoly, den: LaurentPoly) -> Self {
        if num.is_zero() {
            return RationalMotive {
                num: LaurentPoly::zero(),
                den: LaurentPoly::one(),
            };
        }
        let (nval, ndense, nscale) = num.to_primitive_dense();
        let (dval, ddense, dscale) = den.to_primitive_dense();
        let g = gcd::gcd_zx(&ndense, &ddense);
        let (nred, dred) = if g.len() == 1 && g[0].is_one() {
            (ndense, ddense)
        } else {
            (
                gcd::div_exact(&ndense, &g).expect("gcd divides numerator"),
                gcd::div_exact(&ddense, &g).expect("gcd divides denominator"),
            )
        };
        let mut scale = nscale / dscale;
        let mut dred = dred;
        if dred.last().is_some_and(|c| c.is_negative()) {
            for c in &mut dred {
                *c = -c.clone();
            }
            scale = -scale;
        }
        RationalMotive {
            num: LaurentPoly::from_dense(nval - dval, &nred, &scale),
            den: LaurentPoly::from_dense(0, &dred, &BigRational::one()),
        }
    }

    pub fn zero() -> Self {
        RationalMotive {
            num: LaurentPoly::zero(),
            den: LaurentPoly::one(),
        }
    }

    pub fn one() -> Self {
        RationalMotive {
            num: LaurentPoly::one(),
            den: LaurentPoly::one(),
        }
    }

    pub fn from_laurent(p: LaurentPoly) -> Self {
        RationalMotive {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_laurent(LaurentPoly::from_integer(n))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self::from_laurent(LaurentPoly::monomial(0, c))
    }

    /// `v^exp`.
    pub fn v_power(exp: i64) -> Self {
        Self::from_laurent(LaurentPoly::v_power(exp))
    }

    /// `L^exp`.
    pub fn l_power(exp: i64) -> Self {
        Self::from_laurent(LaurentPoly::l_power(exp))
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return Self::reduced(self.num.add(&other.num), self.den.clone());
        }
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        Self::reduced(num, self.den.mul(&other.den))
    }

    pub fn neg(&self) -> Self {
        RationalMotive {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::reduced(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::reduced(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn inverse(&self) -> Result<Self> {
        RationalMotive::one().div(self)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalMotive {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..exp {
            out = out.mul(self);
        }
        out
    }

    /// Adams operation `psi_n`: the ring endomorphism with `psi_n(-v) = (-v)^n`,
    /// applied to numerator and denominator.
    pub fn adams(&self, n: u64) -> Self {
        Self::reduced(self.num.adams(n), self.den.adams(n))
    }

    /// Bar involution: the substitution `v -> v^(-1)`.
    pub fn bar(&self) -> Self {
        Self::reduced(self.num.bar(), self.den.bar())
    }

    /// True iff the motive reduces to a Laurent polynomial with integer
    /// coefficients, i.e. lies in `Z[v^(+-1)]`.
    pub fn is_integral_laurent(&self) -> bool {
        self.den.is_one() && self.num.all_integer()
    }

    /// The underlying Laurent polynomial when [`Self::is_integral_laurent`] holds.
    pub fn as_integral_laurent(&self) -> Option<&LaurentPoly> {
        if self.is_integral_laurent() {
            Some(&self.num)
        } else {
            None
        }
    }

    /// Strict-ring audit: membership in the localized ring
    /// `Z[L^(+-1/2), (L^N - 1)^(-1) : N <= max_n]`, i.e. the numerator has
    /// integer coefficients and every denominator factor divides some
    /// `L^N - 1`. Bounded check: only `N <= max_n` is inspected.
    pub fn in_localized_ring(&self, max_n: u64) -> bool {
        if !self.num.all_integer() {
            return false;
        }
        let (_, mut den, _) = self.den.to_primitive_dense();
        'outer: while den.len() > 1 {
            for n in (1..=max_n).rev() {
                let (_, factor, _) = LaurentPoly::l_power(n as i64)
                    .sub(&LaurentPoly::one())
                    .to_primitive_dense();
                let g = gcd::gcd_zx(&den, &factor);
                if g.len() > 1 {
                    den = gcd::div_exact(&den, &g).expect("gcd divides");
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }

    /// Evaluate at `L = q` for a nonzero exact rational `q`.
    ///
    /// When numerator and denominator lie in the subring generated by `L`
    /// (all `v`-exponents even) the substitution happens directly in `L`;
    /// otherwise `q` must be the square of a rational and `v = sqrt(q)` is
    /// substituted. A vanishing denominator is a pole error.
    pub fn evaluate(&self, q: &BigRational) -> Result<BigRational> {
        if q.is_zero() {
            return Err(Error::ZeroEvaluationPoint);
        }
        if self.num.even_exponents() && self.den.even_exponents() {
            let den = self.den.eval_in_l(q);
            if den.is_zero() {
                return Err(Error::Pole(q.to_string()));
            }
            return Ok(self.num.eval_in_l(q) / den);
        }
        let root = rational_sqrt(q).ok_or_else(|| Error::OddParityEvaluation(q.to_string()))?;
        let den = self.den.eval(&root);
        if den.is_zero() {
            return Err(Error::Pole(q.to_string()));
        }
        Ok(self.num.eval(&root) / den)
    }
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let sn = q.numer().sqrt();
    let sd = q.denom().sqrt();
    if &(&sn * &sn) == q.numer() && &(&sd * &sd) == q.denom() {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

impl std::fmt::Display for RationalMotive {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// The motive of `G_d`: `prod_i L^(d_i choose 2) prod_{n=1}^{d_i} (L^n - 1)`.
pub fn gl_motive(d: &DimVector) -> RationalMotive {
    let mut p = LaurentPoly::one();
    for &di in d.entries() {
        let di = di as i64;
        p = p.mul(&LaurentPoly::v_power(di * (di - 1)));
        for n in 1..=di {
            p = p.mul(&LaurentPoly::l_power(n).sub(&LaurentPoly::one()));
        }
    }
    RationalMotive::from_laurent(p)
}

/// The motive of the representation space `R_d`: `L^(sum a_ij d_i d_j)`.
pub fn rep_space_motive(quiver: &Quiver, d: &DimVector) -> Result<RationalMotive> {
    if d.len() != quiver.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: quiver.vertex_count(),
            got: d.len(),
        });
    }
    let mut exp = 0i64;
    for i in 0..quiver.vertex_count() {
        for j in 0..quiver.vertex_count() {
            exp += (quiver.arrow_count(i, j) * d.entry(i) * d.entry(j)) as i64;
        }
    }
    Ok(RationalMotive::l_power(exp))
}

/// The point count of `GL_d(F_q)` as an exact integer, `prod_i prod_{k<d_i} (q^(d_i) - q^k)`.
pub fn gl_point_count(d: &DimVector, q: u64) -> BigInt {
    let mut count = BigInt::one();
    let q = BigInt::from(q);
    for &di in d.entries() {
        let qdi = num_traits::pow::pow(q.clone(), di as usize);
        for k in 0..di {
            count *= &qdi - num_traits::pow::pow(q.clone(), k as usize);
        }
    }
    count
}
