//! The engine: stack and semistable-stack motives, DT extraction via the
//! plethystic logarithm, integrality/positivity/unimodularity audits, framed
//! series, local DT via Ext-quivers, nullcone bounds and intersection Betti
//! numbers.

use crate::error::{Error, Result};
use crate::motive::{gl_motive, proj_space, proj_vir, rep_space_motive, LaurentPoly, RationalMotive};
use crate::quiver::{ext_quiver, is_mu_generic, slope, DimVector, ExtQuiverSpec, Quiver, StabilityWeights};
use crate::series::TruncatedSeries;
use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Stability data for a DT computation: either the trivial stability on a
/// symmetric quiver, or a mu-generic King stability restricted to one slope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stability {
    Trivial,
    King { theta: StabilityWeights, mu: Rational64 },
}

/// Per-dimension-vector DT invariants with integrality metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DTResult {
    pub quiver: Quiver,
    pub stability: Option<StabilityWeights>,
    pub slope: Option<Rational64>,
    pub bound: DimVector,
    /// `Omega_d` for every nonzero `d <= bound` (of the given slope when
    /// stability is present), including zero values.
    pub omega: BTreeMap<DimVector, RationalMotive>,
    /// `integral[d]` is true iff `omega[d]` reduces to an integer Laurent polynomial.
    pub integral: BTreeMap<DimVector, bool>,
}

impl DTResult {
    pub fn omega_series(&self) -> TruncatedSeries {
        TruncatedSeries::from_terms(
            self.bound.clone(),
            self.omega.iter().map(|(d, c)| (d.clone(), c.clone())),
        )
    }
}

/// `[R_d] / [G_d]`, the motive of the stack of all representations
/// (untwisted; the `v^((d,d))` twist is applied by the series builder).
pub fn stack_motive(quiver: &Quiver, d: &DimVector) -> Result<RationalMotive> {
    rep_space_motive(quiver, d)?.div(&gl_motive(d))
}

/// Memo table for the Harder-Narasimhan recursion.
#[derive(Debug, Default)]
pub struct HnCache {
    table: BTreeMap<DimVector, RationalMotive>,
}

impl HnCache {
    pub fn new() -> Self {
        Self::default()
    }
}

/// All ordered decompositions `d = d^1 + ... + d^s` (`s >= 1`, parts nonzero)
/// with strictly decreasing slopes, every part's slope below `upper`.
fn hn_decompositions(
    theta: &StabilityWeights,
    d: &DimVector,
    upper: Option<Rational64>,
) -> Vec<Vec<DimVector>> {
    let mut out = Vec::new();
    for first in DimVector::iter_box(d) {
        if first.is_zero() {
            continue;
        }
        let mu = slope(theta, &first).expect("nonzero part");
        if let Some(u) = upper {
            if mu >= u {
                continue;
            }
        }
        if &first == d {
            out.push(vec![first]);
        } else {
            let rest = d.sub(&first);
            for mut tail in hn_decompositions(theta, &rest, Some(mu)) {
                let mut decomp = Vec::with_capacity(tail.len() + 1);
                decomp.push(first.clone());
                decomp.append(&mut tail);
                out.push(decomp);
            }
        }
    }
    out
}

/// The semistable stack motive `s_d = [R_d^(theta-ss)] / [G_d]`, computed by
/// the Harder-Narasimhan recursion
///
/// `s_d = [R_d]/[G_d] - sum L^(-sum_{k<l} (d^l, d^k)) prod_k s_{d^k}`
///
/// over proper ordered decompositions with strictly decreasing slopes. The
/// twist exponent is the fiber dimension count of the exact-sequence bundle.
pub fn ss_stack_motive(
    quiver: &Quiver,
    theta: &StabilityWeights,
    d: &DimVector,
    cache: &mut HnCache,
) -> Result<RationalMotive> {
    if d.is_zero() {
        return Err(Error::ZeroDimVector);
    }
    if let Some(hit) = cache.table.get(d) {
        return Ok(hit.clone());
    }
    let mut value = stack_motive(quiver, d)?;
    for decomp in hn_decompositions(theta, d, None) {
        if decomp.len() < 2 {
            continue;
        }
        let mut twist_exp = 0i64;
        for k in 0..decomp.len() {
            for l in (k + 1)..decomp.len() {
                twist_exp -= quiver.euler_form(&decomp[l], &decomp[k])?;
            }
        }
        let mut term = RationalMotive::l_power(twist_exp);
        for part in &decomp {
            term = term.mul(&ss_stack_motive(quiver, theta, part, cache)?);
        }
        value = value.sub(&term);
    }
    cache.table.insert(d.clone(), value.clone());
    Ok(value)
}

fn slope_class(stability: &Stability, bound: &DimVector) -> Result<Vec<DimVector>> {
    let class: Vec<DimVector> = match stability {
        Stability::Trivial => DimVector::iter_box(bound).filter(|d| !d.is_zero()).collect(),
        Stability::King { theta, mu } => DimVector::iter_box(bound)
            .filter(|d| !d.is_zero())
            .filter(|d| slope(theta, d).ok() == Some(*mu))
            .collect(),
    };
    if class.is_empty() {
        return Err(Error::EmptySlopeClass);
    }
    Ok(class)
}

fn check_stability_preconditions(
    quiver: &Quiver,
    stability: &Stability,
    bound: &DimVector,
) -> Result<()> {
    if bound.len() != quiver.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: quiver.vertex_count(),
            got: bound.len(),
        });
    }
    match stability {
        Stability::Trivial => {
            if !quiver.is_symmetric() {
                return Err(Error::SymmetryViolation(
                    "trivial stability requires a symmetric quiver".into(),
                ));
            }
        }
        Stability::King { theta, mu } => {
            if theta.len() != quiver.vertex_count() {
                return Err(Error::DimensionMismatch {
                    expected: quiver.vertex_count(),
                    got: theta.len(),
                });
            }
            if !is_mu_generic(quiver, theta, *mu, bound)? {
                return Err(Error::GenericityViolation(format!(
                    "the antisymmetrized Euler form does not vanish on the slope-{mu} \
                     sublattice inside the box"
                )));
            }
        }
    }
    Ok(())
}

/// The generating series `A = 1 + sum v^((d,d)) s_d t^d` over the slope class,
/// with `s_d` the (semi)stable stack motive.
pub fn a_series(
    quiver: &Quiver,
    stability: &Stability,
    bound: &DimVector,
) -> Result<TruncatedSeries> {
    check_stability_preconditions(quiver, stability, bound)?;
    let class = slope_class(stability, bound)?;
    let mut series = TruncatedSeries::one(bound.clone());
    let mut cache = HnCache::new();
    for d in class {
        let s_d = match stability {
            Stability::Trivial => stack_motive(quiver, &d)?,
            Stability::King { theta, .. } => ss_stack_motive(quiver, theta, &d, &mut cache)?,
        };
        let twist = RationalMotive::v_power(quiver.euler_form(&d, &d)?);
        series.set_coefficient(d, twist.mul(&s_d));
    }
    Ok(series)
}

fn v_minus_v_inverse() -> RationalMotive {
    RationalMotive::from_laurent(LaurentPoly::v_power(1).sub(&LaurentPoly::v_power(-1)))
}

/// Compute the DT invariants `Omega_d = (v - v^(-1)) Log(A)_d` for every
/// nonzero `d` in the box (restricted to the slope class under King
/// stability).
pub fn dt_series(quiver: &Quiver, stability: &Stability, bound: &DimVector) -> Result<DTResult> {
    let a = a_series(quiver, stability, bound)?;
    let log = a.plethystic_log()?;
    let class = slope_class(stability, bound)?;
    let factor = v_minus_v_inverse();
    let mut omega = BTreeMap::new();
    let mut integral = BTreeMap::new();
    for d in class {
        let value = factor.mul(&log.coefficient(&d));
        integral.insert(d.clone(), value.is_integral_laurent());
        omega.insert(d, value);
    }
    let (stab, mu) = match stability {
        Stability::Trivial => (None, None),
        Stability::King { theta, mu } => (Some(theta.clone()), Some(*mu)),
    };
    Ok(DTResult {
        quiver: quiver.clone(),
        stability: stab,
        slope: mu,
        bound: bound.clone(),
        omega,
        integral,
    })
}

/// Definition round-trip: `Exp(Omega / (v - v^(-1)))` must reproduce the
/// A-series exactly within the box.
pub fn sym_reconstructs(result: &DTResult) -> Result<bool> {
    let stability = match (&result.stability, result.slope) {
        (Some(theta), Some(mu)) => Stability::King {
            theta: theta.clone(),
            mu,
        },
        _ => Stability::Trivial,
    };
    let a = a_series(&result.quiver, &stability, &result.bound)?;
    let inv = v_minus_v_inverse().inverse()?;
    let arg = result.omega_series().scale(&inv);
    Ok(arg.plethystic_exp()? == a)
}

/// Integrality audit: `Omega_d` must lie in `Z[v^(+-1)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralityReport {
    pub per_d: BTreeMap<DimVector, bool>,
    pub violations: Vec<DimVector>,
}

impl IntegralityReport {
    pub fn all_integral(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_integrality(result: &DTResult) -> IntegralityReport {
    let entries: Vec<(&DimVector, &RationalMotive)> = result.omega.iter().collect();
    let flags: Vec<(DimVector, bool)> = entries
        .par_iter()
        .map(|(d, omega)| ((*d).clone(), omega.is_integral_laurent()))
        .collect();
    let mut per_d = BTreeMap::new();
    let mut violations = Vec::new();
    for (d, ok) in flags {
        if !ok {
            violations.push(d.clone());
        }
        per_d.insert(d, ok);
    }
    violations.sort_by(|a, b| a.graded_lex(b));
    IntegralityReport { per_d, violations }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositivityEntry {
    pub nonnegative: bool,
    pub uniform_parity: bool,
}

impl PositivityEntry {
    pub fn pass(&self) -> bool {
        self.nonnegative && self.uniform_parity
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositivityReport {
    pub per_d: BTreeMap<DimVector, PositivityEntry>,
}

impl PositivityReport {
    pub fn all_pass(&self) -> bool {
        self.per_d.values().all(PositivityEntry::pass)
    }
}

fn require_integral(result: &DTResult) -> Result<()> {
    for (d, omega) in &result.omega {
        if !omega.is_integral_laurent() {
            return Err(Error::NonIntegral(d.entries().to_vec()));
        }
    }
    Ok(())
}

/// Positivity audit: all coefficients nonnegative and all exponents of one
/// parity, per dimension vector. Requires integrality.
pub fn check_positivity(result: &DTResult) -> Result<PositivityReport> {
    require_integral(result)?;
    let entries: Vec<(&DimVector, &RationalMotive)> = result.omega.iter().collect();
    let rows: Vec<(DimVector, PositivityEntry)> = entries
        .par_iter()
        .map(|(d, omega)| {
            let poly = omega.as_integral_laurent().expect("checked integral");
            let nonnegative = poly.terms().all(|(_, c)| !c.is_negative());
            let uniform_parity = match poly.min_exp() {
                None => true,
                Some(e) => poly.uniform_parity(e),
            };
            ((*d).clone(), PositivityEntry { nonnegative, uniform_parity })
        })
        .collect();
    Ok(PositivityReport {
        per_d: rows.into_iter().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnimodularEntry {
    pub palindromic: bool,
    pub unimodal: bool,
}

impl UnimodularEntry {
    pub fn pass(&self) -> bool {
        self.palindromic && self.unimodal
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnimodularReport {
    pub per_d: BTreeMap<DimVector, UnimodularEntry>,
}

impl UnimodularReport {
    pub fn all_pass(&self) -> bool {
        self.per_d.values().all(UnimodularEntry::pass)
    }
}

fn unimodular_entry(poly: &LaurentPoly) -> UnimodularEntry {
    if poly.is_zero() {
        return UnimodularEntry { palindromic: true, unimodal: true };
    }
    let step = if poly.uniform_parity(poly.min_exp().unwrap()) { 2 } else { 1 };
    let seq = poly.coefficient_sequence(step);
    let palindromic = seq.iter().eq(seq.iter().rev());
    let peak = seq
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.cmp(b))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let unimodal = seq.windows(2).enumerate().all(|(i, w)| {
        if i < peak {
            w[0] <= w[1]
        } else {
            w[0] >= w[1]
        }
    });
    UnimodularEntry { palindromic, unimodal }
}

/// Unimodularity audit: the coefficient sequence (ordered by exponent) is
/// palindromic and unimodal per dimension vector. Requires integrality.
pub fn check_unimodular(result: &DTResult) -> Result<UnimodularReport> {
    require_integral(result)?;
    let entries: Vec<(&DimVector, &RationalMotive)> = result.omega.iter().collect();
    let rows: Vec<(DimVector, UnimodularEntry)> = entries
        .par_iter()
        .map(|(d, omega)| {
            let poly = omega.as_integral_laurent().expect("checked integral");
            ((*d).clone(), unimodular_entry(poly))
        })
        .collect();
    Ok(UnimodularReport {
        per_d: rows.into_iter().collect(),
    })
}

/// The framed (PT-DT) generating series.
///
/// Stack form (`normalized = false`):
/// `Exp(sum_d v [P^(f.d - 1)] Omega_d t^d)` with `[P^(n-1)] = 1 + L + ... + L^(n-1)`;
/// valid for every framing vector. Its coefficient at `d` for the point
/// quiver is `v^(d^2) [f, d]`, the Grassmannian count.
///
/// Normalized form (`normalized = true`, every `f_i` even):
/// `Exp(sum_d [P^(f.d - 1)]_vir Omega_d t^d)`; coefficient at `d` is the
/// IC-normalized (virtual) motive of the framed moduli space `M_{f,d}`. The
/// two forms differ by the lambda-ring twist `t^d -> L^(f.d/2) t^d`.
pub fn framed_series(
    quiver: &Quiver,
    stability: &Stability,
    framing: &DimVector,
    bound: &DimVector,
    normalized: bool,
) -> Result<TruncatedSeries> {
    if framing.len() != quiver.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: quiver.vertex_count(),
            got: framing.len(),
        });
    }
    if normalized && framing.entries().iter().any(|f| f % 2 == 1) {
        return Err(Error::OddFraming(framing.entries().to_vec()));
    }
    let result = dt_series(quiver, stability, bound)?;
    let mut arg = TruncatedSeries::new(bound.clone());
    for (d, omega) in &result.omega {
        if omega.is_zero() {
            continue;
        }
        let fd = framing.dot(d);
        if fd == 0 {
            return Err(Error::ZeroFramingDegree(d.entries().to_vec()));
        }
        let weight = if normalized {
            RationalMotive::from_laurent(proj_vir(fd)?)
        } else {
            RationalMotive::from_laurent(proj_space(fd)?.shift(1))
        };
        arg.set_coefficient(d.clone(), weight.mul(omega));
    }
    arg.plethystic_exp()
}

/// Local DT at a semisimple point: the DT series of the Ext-quiver under
/// trivial stability with the bar involution applied coefficientwise.
pub fn local_dt(spec: &ExtQuiverSpec, bound: &DimVector) -> Result<TruncatedSeries> {
    let quiver = ext_quiver(spec)?;
    let result = dt_series(&quiver, &Stability::Trivial, bound)?;
    Ok(result.omega_series().bar_coefficients())
}

/// The closed-form nullcone dimension bound for a symmetric quiver:
/// `dim N_d - dim G_d <= -(d,d)/2 + (1/2) sum_k (k,k) d_k - |d|`.
pub fn nullcone_bound(quiver: &Quiver, d: &DimVector) -> Result<Rational64> {
    if !quiver.is_symmetric() {
        return Err(Error::SymmetryViolation(
            "the nullcone bound requires a symmetric quiver".into(),
        ));
    }
    if d.len() != quiver.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: quiver.vertex_count(),
            got: d.len(),
        });
    }
    let dd = quiver.euler_form(d, d)?;
    let mut unit_sum = 0i64;
    for k in 0..quiver.vertex_count() {
        let ek = DimVector::unit(quiver.vertex_count(), k);
        unit_sum += quiver.euler_form(&ek, &ek)? * d.entry(k) as i64;
    }
    Ok(Rational64::new(-dd, 2) + Rational64::new(unit_sum, 2) - Rational64::from_integer(d.total() as i64))
}

/// The stratum-dimension estimate of one ordered thin decomposition:
/// `-sum_{k<l} (d^l, d^k) - sum_i sum_k (d_i^k)^2`. All parts must be unit
/// vectors summing to `d`. For a symmetric quiver this value is independent
/// of the decomposition and equals [`nullcone_bound`].
pub fn thin_decomposition_value(
    quiver: &Quiver,
    d: &DimVector,
    parts: &[DimVector],
) -> Result<Rational64> {
    if parts.is_empty() {
        return Err(Error::BadThinDecomposition("no parts".into()));
    }
    let mut sum = DimVector::zero(d.len());
    for part in parts {
        if part.len() != d.len() {
            return Err(Error::BadThinDecomposition(format!(
                "part {part} has wrong length"
            )));
        }
        if part.total() != 1 {
            return Err(Error::BadThinDecomposition(format!(
                "part {part} is not a unit vector"
            )));
        }
        sum = sum.add(part);
    }
    if &sum != d {
        return Err(Error::BadThinDecomposition(format!(
            "parts sum to {sum}, expected {d}"
        )));
    }
    let mut value = 0i64;
    for k in 0..parts.len() {
        for l in (k + 1)..parts.len() {
            value -= quiver.euler_form(&parts[l], &parts[k])?;
        }
    }
    for part in parts {
        for i in 0..part.len() {
            value -= (part.entry(i) * part.entry(i)) as i64;
        }
    }
    Ok(Rational64::from_integer(value))
}

/// All ordered thin decompositions of `d` (permutations of the multiset of
/// `|d|` unit vectors). Intended for exhaustive checks at small `|d|`.
pub fn thin_decompositions(d: &DimVector) -> Vec<Vec<DimVector>> {
    fn go(remaining: &mut Vec<u64>, acc: &mut Vec<DimVector>, out: &mut Vec<Vec<DimVector>>) {
        if remaining.iter().all(|&r| r == 0) {
            out.push(acc.clone());
            return;
        }
        for i in 0..remaining.len() {
            if remaining[i] > 0 {
                remaining[i] -= 1;
                acc.push(DimVector::unit(remaining.len(), i));
                go(remaining, acc, out);
                acc.pop();
                remaining[i] += 1;
            }
        }
    }
    let mut remaining = d.entries().to_vec();
    let mut out = Vec::new();
    let mut acc = Vec::new();
    go(&mut remaining, &mut acc, &mut out);
    out
}

/// The default moduli-space dimension `1 - (d, d)` used by Betti extraction.
pub fn moduli_dimension(quiver: &Quiver, d: &DimVector) -> Result<i64> {
    Ok(1 - quiver.euler_form(d, d)?)
}

/// Extract compactly-supported intersection Betti numbers from an integral DT
/// invariant: `b_(e + dim_m)` = coefficient of `v^e`. Every exponent must be
/// congruent to `dim_m` mod 2 and every coefficient nonnegative (Tate
/// purity); violations abort with a diagnostic. The zero invariant yields an
/// empty map (no stable points).
pub fn ic_betti(omega: &RationalMotive, dim_m: i64) -> Result<BTreeMap<i64, u64>> {
    let Some(poly) = omega.as_integral_laurent() else {
        return Err(Error::ParityViolation(
            "input is not an integral Laurent polynomial".into(),
        ));
    };
    let mut betti = BTreeMap::new();
    for (e, c) in poly.terms() {
        if (e - dim_m).rem_euclid(2) != 0 {
            return Err(Error::ParityViolation(format!(
                "exponent {e} is not congruent to dim = {dim_m} mod 2; either there are \
                 no stable points or purity fails"
            )));
        }
        if c.is_negative() {
            return Err(Error::ParityViolation(format!(
                "negative coefficient {c} at v^{e} cannot be a Betti number"
            )));
        }
        let b = c.to_integer().to_u64().ok_or_else(|| {
            Error::ParityViolation(format!("coefficient {c} at v^{e} out of range"))
        })?;
        betti.insert(e + dim_m, b);
    }
    Ok(betti)
}

/// The numerical DT invariant: `Omega_d` evaluated at `v = 1`.
pub fn euler_specialization(omega: &RationalMotive) -> Result<BigInt> {
    let Some(poly) = omega.as_integral_laurent() else {
        return Err(Error::NonIntegral(Vec::new()));
    };
    Ok(poly.eval_at_one().to_integer())
}

fn rational_to_string(r: &Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn parse_rational64(s: &str) -> Option<Rational64> {
    match s.split_once('/') {
        Some((n, d)) => {
            let numer: i64 = n.trim().parse().ok()?;
            let denom: i64 = d.trim().parse().ok()?;
            if denom == 0 {
                return None;
            }
            Some(Rational64::new(numer, denom))
        }
        None => Some(Rational64::from_integer(s.trim().parse().ok()?)),
    }
}

#[derive(Serialize, Deserialize)]
struct DtEntryRepr {
    d: DimVector,
    omega: RationalMotive,
    integral: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    betti: Option<BTreeMap<String, u64>>,
}

#[derive(Serialize, Deserialize)]
struct DTResultRepr {
    quiver: Quiver,
    theta: Option<StabilityWeights>,
    mu: Option<String>,
    #[serde(rename = "box")]
    bound: DimVector,
    dt: Vec<DtEntryRepr>,
}

impl Serialize for DTResult {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut keys: Vec<&DimVector> = self.omega.keys().collect();
        keys.sort_by(|a, b| a.graded_lex(b));
        let dt = keys
            .into_iter()
            .map(|d| {
                let omega = self.omega[d].clone();
                let betti = if omega.is_zero() {
                    None
                } else {
                    moduli_dimension(&self.quiver, d)
                        .ok()
                        .and_then(|dim| ic_betti(&omega, dim).ok())
                        .map(|b| b.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
                };
                DtEntryRepr {
                    d: d.clone(),
                    integral: self.integral[d],
                    omega,
                    betti,
                }
            })
            .collect();
        DTResultRepr {
            quiver: self.quiver.clone(),
            theta: self.stability.clone(),
            mu: self.slope.map(|m| rational_to_string(&m)),
            bound: self.bound.clone(),
            dt,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DTResult {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = DTResultRepr::deserialize(deserializer)?;
        let mu = match &repr.mu {
            None => None,
            Some(s) => Some(
                parse_rational64(s)
                    .ok_or_else(|| serde::de::Error::custom(format!("bad slope `{s}`")))?,
            ),
        };
        let mut omega = BTreeMap::new();
        let mut integral = BTreeMap::new();
        for entry in repr.dt {
            integral.insert(entry.d.clone(), entry.integral);
            omega.insert(entry.d, entry.omega);
        }
        Ok(DTResult {
            quiver: repr.quiver,
            stability: repr.theta,
            slope: mu,
            bound: repr.bound,
            omega,
            integral,
        })
    }
}
