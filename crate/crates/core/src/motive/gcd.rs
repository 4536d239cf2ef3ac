//! Dense polynomial gcd over Z, used to keep rational motives reduced.
//!
//! Polynomials are coefficient vectors indexed by degree (no leading zeros).
//! The gcd uses the modular (Brown) algorithm: compute monic gcds mod large
//! word-size primes, lift by CRT and verify by exact division. Fraction
//! reduction is by far the hottest path in the engine, so this avoids the
//! coefficient blow-up of a rational Euclidean remainder sequence.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

fn trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn degree<T>(p: &[T]) -> usize {
    p.len().saturating_sub(1)
}

/// Gcd of the coefficients, nonnegative; zero for the zero polynomial.
pub fn content(p: &[BigInt]) -> BigInt {
    let mut c = BigInt::zero();
    for coeff in p {
        c = c.gcd(coeff);
        if c.is_one() {
            break;
        }
    }
    c
}

fn scale_down(p: &[BigInt], c: &BigInt) -> Vec<BigInt> {
    p.iter().map(|x| x / c).collect()
}

/// Exact division over Z; returns `None` when the division leaves a remainder.
pub fn div_exact(num: &[BigInt], den: &[BigInt]) -> Option<Vec<BigInt>> {
    if den.is_empty() {
        return None;
    }
    if num.is_empty() {
        return Some(Vec::new());
    }
    if num.len() < den.len() {
        return None;
    }
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let lead = &den[dn];
    let mut quot = vec![BigInt::zero(); num.len() - den.len() + 1];
    for k in (0..quot.len()).rev() {
        let r = rem[k + dn].clone();
        if r.is_zero() {
            continue;
        }
        let (q, s) = r.div_rem(lead);
        if !s.is_zero() {
            return None;
        }
        for (i, c) in den.iter().enumerate() {
            let prod = c * &q;
            rem[k + i] -= prod;
        }
        quot[k] = q;
    }
    if rem.iter().all(|c| c.is_zero()) {
        Some(quot)
    } else {
        None
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    // Deterministic Miller-Rabin base set for u64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn prime_after(mut n: u64) -> u64 {
    loop {
        n += 1;
        if is_prime_u64(n) {
            return n;
        }
    }
}

fn reduce_mod(p: &[BigInt], m: u64) -> Vec<u64> {
    let mm = BigInt::from(m);
    let mut out: Vec<u64> = p
        .iter()
        .map(|c| {
            let r = c.mod_floor(&mm);
            let (_, digits) = r.to_u64_digits();
            digits.first().copied().unwrap_or(0)
        })
        .collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// Monic gcd over F_p, coefficients indexed by degree.
fn gcd_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    while !r1.is_empty() {
        // r0 mod r1
        let inv_lead = invmod(*r1.last().unwrap(), p);
        while r0.len() >= r1.len() && !r0.is_empty() {
            let shift = r0.len() - r1.len();
            let q = mulmod(*r0.last().unwrap(), inv_lead, p);
            if q != 0 {
                for (i, &c) in r1.iter().enumerate() {
                    let sub = mulmod(q, c, p);
                    let idx = shift + i;
                    r0[idx] = (r0[idx] + p - sub) % p;
                }
            }
            while r0.last() == Some(&0) {
                r0.pop();
            }
        }
        std::mem::swap(&mut r0, &mut r1);
    }
    if r0.is_empty() {
        return r0;
    }
    let inv_lead = invmod(*r0.last().unwrap(), p);
    for c in &mut r0 {
        *c = mulmod(*c, inv_lead, p);
    }
    r0
}

fn to_symmetric(r: &BigInt, m: &BigInt) -> BigInt {
    if r * 2 > *m {
        r - m
    } else {
        r.clone()
    }
}

/// Gcd of two integer polynomials, returned primitive with positive leading
/// coefficient (the content gcd is included).
pub fn gcd_zx(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    if a.is_empty() {
        if let Some(c) = b.last() {
            if c.is_negative() {
                return b.iter().map(|x| -x).collect();
            }
        }
        return b;
    }
    if b.is_empty() {
        if a.last().is_some_and(|c| c.is_negative()) {
            return a.iter().map(|x| -x).collect();
        }
        return a;
    }
    let ca = content(&a);
    let cb = content(&b);
    let c = ca.gcd(&cb);
    let a = scale_down(&a, &ca);
    let b = scale_down(&b, &cb);
    if a.len() == 1 || b.len() == 1 {
        return vec![c];
    }
    let lc_gcd = a.last().unwrap().gcd(b.last().unwrap());

    let mut prime = 1u64 << 62;
    let mut modulus = BigInt::one();
    let mut lifted: Vec<BigInt> = Vec::new();
    let mut best_deg = usize::MAX;
    loop {
        prime = prime_after(prime);
        let pa = reduce_mod(&a, prime);
        let pb = reduce_mod(&b, prime);
        if pa.len() != a.len() || pb.len() != b.len() {
            continue; // prime divides a leading coefficient
        }
        let mut gp = gcd_mod_p(&pa, &pb, prime);
        if gp.len() == 1 {
            return vec![c];
        }
        if degree(&gp) > best_deg {
            continue; // unlucky prime
        }
        let scale = {
            let l = reduce_mod(std::slice::from_ref(&lc_gcd), prime);
            l.first().copied().unwrap_or(0)
        };
        for x in &mut gp {
            *x = mulmod(*x, scale, prime);
        }
        if degree(&gp) < best_deg {
            best_deg = degree(&gp);
            modulus = BigInt::from(prime);
            lifted = gp.iter().map(|&x| to_symmetric(&BigInt::from(x), &modulus)).collect();
        } else {
            let p_big = BigInt::from(prime);
            let m_inv = {
                let m_mod_p = reduce_mod(&[modulus.clone()], prime)[0];
                invmod(m_mod_p, prime)
            };
            let new_modulus = &modulus * &p_big;
            for (h, &g) in lifted.iter_mut().zip(gp.iter()) {
                let h_mod_p = reduce_mod(std::slice::from_ref(h), prime).first().copied().unwrap_or(0);
                let diff = (g + prime - h_mod_p) % prime;
                let t = mulmod(diff, m_inv, prime);
                *h += &modulus * BigInt::from(t);
                let r = h.mod_floor(&new_modulus);
                *h = to_symmetric(&r, &new_modulus);
            }
            modulus = new_modulus;
        }
        let mut candidate = lifted.clone();
        trim(&mut candidate);
        if candidate.is_empty() {
            continue;
        }
        let cc = content(&candidate);
        let candidate = scale_down(&candidate, &cc);
        if div_exact(&a, &candidate).is_some() && div_exact(&b, &candidate).is_some() {
            let mut g: Vec<BigInt> = candidate.iter().map(|x| x * &c).collect();
            if g.last().is_some_and(|x| x.is_negative()) {
                for x in &mut g {
                    *x = -x.clone();
                }
            }
            return g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(coeffs: &[i64]) -> Vec<BigInt> {
        coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        // (x + 1) and (x + 2)
        let g = gcd_zx(&poly(&[1, 1]), &poly(&[2, 1]));
        assert_eq!(g, poly(&[1]));
    }

    #[test]
    fn gcd_recovers_common_factor() {
        // (x^2 - 1) = (x - 1)(x + 1), (x^2 + 2x + 1) = (x + 1)^2
        let g = gcd_zx(&poly(&[-1, 0, 1]), &poly(&[1, 2, 1]));
        assert_eq!(g, poly(&[1, 1]));
    }

    #[test]
    fn gcd_includes_content() {
        let g = gcd_zx(&poly(&[6, 6]), &poly(&[4, 4]));
        assert_eq!(g, poly(&[2, 2]));
    }

    #[test]
    fn gcd_of_cyclotomic_products() {
        // (x^4 - 1) and (x^6 - 1): gcd = x^2 - 1
        let mut a = vec![BigInt::zero(); 5];
        a[0] = BigInt::from(-1);
        a[4] = BigInt::from(1);
        let mut b = vec![BigInt::zero(); 7];
        b[0] = BigInt::from(-1);
        b[6] = BigInt::from(1);
        assert_eq!(gcd_zx(&a, &b), poly(&[-1, 0, 1]));
    }

    #[test]
    fn exact_division() {
        let q = div_exact(&poly(&[-1, 0, 1]), &poly(&[1, 1])).unwrap();
        assert_eq!(q, poly(&[-1, 1]));
        assert!(div_exact(&poly(&[1, 0, 1]), &poly(&[1, 1])).is_none());
    }

    #[test]
    fn miller_rabin_agrees_on_small_numbers() {
        let primes: Vec<u64> = (2..200).filter(|&n| is_prime_u64(n)).collect();
        let sieve: Vec<u64> = (2..200u64)
            .filter(|&n| (2..n).all(|d| d * d > n || n % d != 0))
            .collect();
        assert_eq!(primes, sieve);
        assert!(is_prime_u64(2305843009213693951)); // 2^61 - 1
    }
}
