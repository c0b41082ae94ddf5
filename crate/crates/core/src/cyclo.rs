//! Exact arithmetic in cyclotomic fields ℚ(ζ_N).
//!
//! A [`CycNum`] is a polynomial in ζ_N with rational coefficients, kept in
//! canonical form: the remainder modulo the N-th cyclotomic polynomial Φ_N,
//! stored as an integer coefficient vector over a single positive denominator
//! with no common factor. Canonical forms are unique, so exact equality is a
//! structural comparison once two values are raised to a common conductor.
//!
//! The power basis {1, ζ, …, ζ^{φ(N)−1}} is an integral basis of ℚ(ζ_N), so
//! algebraic integers are exactly the values with denominator 1.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Euler totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn divisors(n: u64) -> Vec<u64> {
    let mut ds = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            ds.push(d);
            if d != n / d {
                ds.push(n / d);
            }
        }
        d += 1;
    }
    ds.sort_unstable();
    ds
}

/// Cached data for one conductor: Φ_N as a monic integer polynomial
/// (ascending coefficients) of degree φ(N).
struct Field {
    phi: usize,
    min_poly: Vec<BigInt>,
}

fn field(n: u64) -> Arc<Field> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Field>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().unwrap().get(&n) {
        return f.clone();
    }
    let poly = cyclotomic_poly(n);
    let f = Arc::new(Field {
        phi: poly.len() - 1,
        min_poly: poly,
    });
    // Write-once per key: a racing thread may have inserted the same value.
    cache
        .lock()
        .unwrap()
        .entry(n)
        .or_insert_with(|| f.clone())
        .clone()
}

/// Φ_N by repeated exact division of x^N − 1 by Φ_d over the proper divisors d.
fn cyclotomic_poly(n: u64) -> Vec<BigInt> {
    assert!(n >= 1, "conductor must be positive");
    // x^n - 1
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let phi_d = field(d);
        num = poly_div_exact(&num, &phi_d.min_poly);
    }
    num
}

/// Exact division of integer polynomials, divisor monic. Panics on nonzero
/// remainder (cannot happen for cyclotomic factors).
fn poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = a.to_vec();
    let db = b.len() - 1;
    let da = rem.len() - 1;
    assert!(da >= db);
    let mut quot = vec![BigInt::zero(); da - db + 1];
    for i in (db..=da).rev() {
        if rem[i].is_zero() {
            continue;
        }
        let c = rem[i].clone();
        quot[i - db] = c.clone();
        for j in 0..=db {
            rem[i - db + j] -= &c * &b[j];
        }
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()), "non-exact division");
    quot
}

/// Reduce an integer coefficient vector modulo the monic Φ_N in place,
/// returning exactly φ(N) coefficients.
fn reduce_mod(field: &Field, mut v: Vec<BigInt>) -> Vec<BigInt> {
    let phi = field.phi;
    if v.len() > phi {
        for i in (phi..v.len()).rev() {
            if v[i].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut v[i], BigInt::zero());
            for j in 0..phi {
                let t = &c * &field.min_poly[j];
                v[i - phi + j] -= t;
            }
        }
    }
    v.truncate(phi);
    v.resize(phi, BigInt::zero());
    v
}

/// An element of ℚ(ζ_N) in canonical form.
#[derive(Clone)]
pub struct CycNum {
    conductor: u64,
    /// Exactly φ(N) integer coefficients, ascending powers of ζ_N.
    num: Vec<BigInt>,
    /// Positive; gcd(content(num), den) = 1.
    den: BigInt,
}

impl CycNum {
    fn normalized(conductor: u64, num: Vec<BigInt>, den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        let mut num = num;
        let mut den = den;
        if den.is_negative() {
            den = -den;
            for c in &mut num {
                *c = -std::mem::take(c);
            }
        }
        let mut g = den.clone();
        for c in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            den /= &g;
            for c in &mut num {
                *c /= &g;
            }
        }
        CycNum {
            conductor,
            num,
            den,
        }
    }

    fn from_raw(conductor: u64, raw: Vec<BigInt>, den: BigInt) -> Self {
        let f = field(conductor);
        Self::normalized(conductor, reduce_mod(&f, raw), den)
    }

    pub fn zero() -> Self {
        CycNum {
            conductor: 1,
            num: vec![BigInt::zero()],
            den: BigInt::one(),
        }
    }

    pub fn one() -> Self {
        CycNum {
            conductor: 1,
            num: vec![BigInt::one()],
            den: BigInt::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        CycNum {
            conductor: 1,
            num: vec![BigInt::from(n)],
            den: BigInt::one(),
        }
    }

    pub fn from_rat(r: &Rat) -> Self {
        CycNum::normalized(1, vec![r.numer().clone()], r.denom().clone())
    }

    /// ζ_N^k with the exponent taken mod N. Rejects conductor 0.
    pub fn root_of_unity(conductor: u64, exponent: i64) -> Result<Self> {
        if conductor == 0 {
            return Err(Error::malformed("conductor must be >= 1"));
        }
        let n = conductor as i64;
        let k = exponent.rem_euclid(n) as usize;
        let mut raw = vec![BigInt::zero(); k + 1];
        raw[k] = BigInt::one();
        Ok(CycNum::from_raw(conductor, raw, BigInt::one()))
    }

    /// Infallible ζ_N^k for internal call sites with known-good conductors.
    pub fn zeta(conductor: u64, exponent: i64) -> Self {
        Self::root_of_unity(conductor, exponent).expect("conductor >= 1")
    }

    /// e^{2πi·num/den}, exponent reduced.
    pub fn phase(num: i64, den: u64) -> Self {
        Self::zeta(den, num)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::zeta(4, 1)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coefficients(&self) -> impl Iterator<Item = Rat> + '_ {
        self.num
            .iter()
            .map(move |c| Rat::new(c.clone(), self.den.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one()
            && self.num[0].is_one()
            && self.num.iter().skip(1).all(|c| c.is_zero())
    }

    /// Some(rational value) when the element lies in ℚ.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.num.iter().skip(1).all(|c| c.is_zero()) {
            Some(Rat::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn is_integer(&self) -> bool {
        self.as_rational().map_or(false, |r| r.is_integer())
    }

    /// Raise to a conductor that the current one divides.
    pub fn raised(&self, n: u64) -> CycNum {
        if n == self.conductor {
            return self.clone();
        }
        assert!(
            n % self.conductor == 0,
            "can only raise conductor {} to a multiple, got {}",
            self.conductor,
            n
        );
        let step = (n / self.conductor) as usize;
        let mut raw = vec![BigInt::zero(); (self.num.len() - 1) * step + 1];
        for (j, c) in self.num.iter().enumerate() {
            raw[j * step] = c.clone();
        }
        CycNum::from_raw(n, raw, self.den.clone())
    }

    fn common(&self, other: &CycNum) -> (CycNum, CycNum, u64) {
        let n = self.conductor.lcm(&other.conductor);
        (self.raised(n), other.raised(n), n)
    }

    pub fn add(&self, other: &CycNum) -> CycNum {
        let (a, b, n) = self.common(other);
        let num: Vec<BigInt> = a
            .num
            .iter()
            .zip(&b.num)
            .map(|(x, y)| x * &b.den + y * &a.den)
            .collect();
        CycNum::normalized(n, num, &a.den * &b.den)
    }

    pub fn sub(&self, other: &CycNum) -> CycNum {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CycNum {
        CycNum {
            conductor: self.conductor,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &CycNum) -> CycNum {
        let (a, b, n) = self.common(other);
        let mut raw = vec![BigInt::zero(); a.num.len() + b.num.len() - 1];
        for (i, x) in a.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                raw[i + j] += x * y;
            }
        }
        CycNum::from_raw(n, raw, &a.den * &b.den)
    }

    pub fn scale(&self, r: &Rat) -> CycNum {
        let num: Vec<BigInt> = self.num.iter().map(|c| c * r.numer()).collect();
        CycNum::normalized(self.conductor, num, &self.den * r.denom())
    }

    pub fn pow(&self, k: u64) -> CycNum {
        let mut result = CycNum::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        result
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// Φ_N, which is irreducible over ℚ.
    pub fn inv(&self) -> Result<CycNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = field(self.conductor);
        let a: Vec<Rat> = self.coefficients().collect();
        let m: Vec<Rat> = f
            .min_poly
            .iter()
            .map(|c| Rat::new(c.clone(), BigInt::one()))
            .collect();
        // Extended gcd over ℚ[x]: r0 = Φ, r1 = a; track s-coefficients on a.
        let mut r0 = m;
        let mut r1 = trim(a);
        let mut s0: Vec<Rat> = vec![];
        let mut s1: Vec<Rat> = vec![Rat::one()];
        while degree(&r1) > 0 {
            let (q, r) = rat_poly_divmod(&r0, &r1);
            let s = rat_poly_sub(&s0, &rat_poly_mul(&q, &s1));
            r0 = r1;
            r1 = trim(r);
            s0 = s1;
            s1 = s;
        }
        // r1 is a nonzero constant g: s1 * a ≡ g  (mod Φ), so a⁻¹ = s1/g.
        let g = r1
            .first()
            .cloned()
            .filter(|c| !c.is_zero())
            .expect("Phi_N irreducible: gcd with nonzero element is a unit");
        let inv_coeffs: Vec<Rat> = s1.iter().map(|c| c / &g).collect();
        Ok(CycNum::from_rat_poly(self.conductor, &inv_coeffs))
    }

    fn from_rat_poly(conductor: u64, coeffs: &[Rat]) -> CycNum {
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let raw: Vec<BigInt> = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        CycNum::from_raw(conductor, raw, den)
    }

    pub fn div(&self, other: &CycNum) -> Result<CycNum> {
        Ok(self.mul(&other.inv()?))
    }

    /// Galois automorphism ζ ↦ ζ^k for gcd(k, N) = 1.
    pub fn galois(&self, k: u64) -> CycNum {
        let n = self.conductor;
        assert!(n.gcd(&k) == 1, "galois exponent must be coprime to conductor");
        let mut raw = vec![BigInt::zero(); n as usize];
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = ((j as u64) * k % n) as usize;
            raw[e] += c;
        }
        CycNum::from_raw(n, raw, self.den.clone())
    }

    /// Complex conjugation ζ ↦ ζ⁻¹.
    pub fn conj(&self) -> CycNum {
        if self.conductor <= 2 {
            return self.clone();
        }
        self.galois(self.conductor - 1)
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// |x|² = x · conj(x).
    pub fn abs_sq(&self) -> CycNum {
        self.mul(&self.conj())
    }

    /// Re(x) as an exact element.
    pub fn real_part(&self) -> CycNum {
        self.add(&self.conj()).scale(&Rat::new(BigInt::one(), BigInt::from(2)))
    }

    /// Im(x) as an exact (real) element.
    pub fn imag_part(&self) -> CycNum {
        // (x - conj(x)) / (2i)
        self.sub(&self.conj())
            .mul(&CycNum::zeta(4, -1))
            .scale(&Rat::new(BigInt::one(), BigInt::from(2)))
    }

    /// If this value is a root of unity, return the reduced exponent
    /// (num, den) with value e^{2πi·num/den}. Roots of unity in ℚ(ζ_N) all
    /// lie in μ_N (N even) or μ_{2N} (N odd).
    pub fn as_root_of_unity(&self) -> Option<(u64, u64)> {
        if !self.den.is_one() {
            return None;
        }
        if !self.abs_sq().is_one() {
            return None;
        }
        let n = self.conductor;
        let l = if n % 2 == 0 { n } else { 2 * n };
        let target = self.raised(l.lcm(&self.conductor));
        let mut power = CycNum::zeta(target.conductor(), 0);
        let step = CycNum::zeta(target.conductor(), (target.conductor() / l) as i64);
        for j in 0..l {
            if power == target {
                let g = j.gcd(&l);
                return Some(if j == 0 { (0, 1) } else { (j / g, l / g) });
            }
            power = power.mul(&step);
        }
        None
    }

    /// A total-order key for deterministic sorting of exact values; orders by
    /// canonical form at a common conductor, not by numeric magnitude.
    pub fn sort_key(&self) -> (u64, Vec<BigInt>, BigInt) {
        (self.conductor, self.num.clone(), self.den.clone())
    }

    pub(crate) fn raw_parts(&self) -> (&[BigInt], &BigInt) {
        (&self.num, &self.den)
    }
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.num == other.num && self.den == other.den;
        }
        let (a, b, _) = self.common(other);
        a.num == b.num && a.den == b.den
    }
}

impl Eq for CycNum {}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let r = Rat::new(c.clone(), self.den.clone());
            if first {
                first = false;
            } else if r.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let abs = if !first || !r.is_negative() { r.abs() } else { r.clone() };
            let shown = if first && r.is_negative() { r } else { abs };
            if j == 0 {
                write!(f, "{}", shown)?;
            } else {
                if !shown.abs().is_one() {
                    write!(f, "{}*", shown)?;
                } else if shown.is_negative() {
                    write!(f, "-")?;
                }
                if j == 1 {
                    write!(f, "z{}", self.conductor)?;
                } else {
                    write!(f, "z{}^{}", self.conductor, j)?;
                }
            }
        }
        Ok(())
    }
}

fn trim(mut v: Vec<Rat>) -> Vec<Rat> {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
    v
}

fn degree(v: &[Rat]) -> usize {
    if v.len() <= 1 {
        0
    } else {
        v.len() - 1
    }
}

fn rat_poly_divmod(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let lead = b.last().unwrap();
    if rem.len() < b.len() {
        return (vec![], rem);
    }
    let mut quot = vec![Rat::zero(); rem.len() - db];
    for i in (db..rem.len()).rev() {
        if rem[i].is_zero() {
            continue;
        }
        let c = &rem[i] / lead;
        quot[i - db] = c.clone();
        for j in 0..=db {
            let t = &c * &b[j];
            rem[i - db + j] -= t;
        }
    }
    (quot, trim(rem))
}

fn rat_poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn rat_poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

/// sin(aπ/n) as an exact element, via (ζ_{2n}^a − ζ_{2n}^{−a}) / 2i.
pub fn sin_pi(a: i64, n: u64) -> CycNum {
    assert!(n >= 1);
    let z = CycNum::zeta(2 * n, a);
    let zc = CycNum::zeta(2 * n, -a);
    z.sub(&zc)
        .mul(&CycNum::zeta(4, -1))
        .scale(&Rat::new(BigInt::one(), BigInt::from(2)))
}

/// sin(aπ/n) / sin(bπ/n), exact and real; rejects a vanishing denominator.
pub fn sin_ratio(a: i64, b: i64, n: u64) -> Result<CycNum> {
    if n == 0 {
        return Err(Error::malformed("sin_ratio: n must be >= 1"));
    }
    if b.rem_euclid(n as i64) == 0 {
        return Err(Error::malformed("sin_ratio: zero denominator sin(b*pi/n)"));
    }
    sin_pi(a, n).div(&sin_pi(b, n))
}

/// √m for a non-negative integer, as an exact element of a cyclotomic field.
///
/// Uses ζ₈ + ζ₈⁻¹ = √2 and quadratic Gauss sums Σ ζ_p^{a²} for odd primes,
/// which evaluate to √p (p ≡ 1 mod 4) or i√p (p ≡ 3 mod 4).
pub fn sqrt_nat(m: u64) -> CycNum {
    if m == 0 {
        return CycNum::zero();
    }
    let mut square_part: u64 = 1;
    let mut rest = m;
    let mut result = CycNum::one();
    let mut p: u64 = 2;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            square_part *= p.pow(e / 2);
            if e % 2 == 1 {
                result = result.mul(&sqrt_prime(p));
            }
        }
        p += 1;
    }
    if rest > 1 {
        result = result.mul(&sqrt_prime(rest));
    }
    result.scale(&Rat::from_integer(BigInt::from(square_part)))
}

fn sqrt_prime(p: u64) -> CycNum {
    if p == 2 {
        return CycNum::zeta(8, 1).add(&CycNum::zeta(8, -1));
    }
    let mut raw = vec![BigInt::zero(); p as usize];
    for a in 0..p {
        raw[((a * a) % p) as usize] += BigInt::one();
    }
    let gauss = CycNum::from_raw(p, raw, BigInt::one());
    if p % 4 == 1 {
        gauss
    } else {
        // g = i√p, so √p = −i·g.
        gauss.mul(&CycNum::zeta(4, -1))
    }
}

/// √r for a non-negative rational, when the radicand fits in u64.
pub fn sqrt_rational(r: &Rat) -> Option<CycNum> {
    if r.is_negative() {
        return None;
    }
    let p: u64 = u64::try_from(r.numer().clone()).ok()?;
    let q: u64 = u64::try_from(r.denom().clone()).ok()?;
    let pq = p.checked_mul(q)?;
    Some(sqrt_nat(pq).scale(&Rat::new(BigInt::one(), BigInt::from(q))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Rat {
        Rat::new(BigInt::one(), BigInt::from(2))
    }

    #[test]
    fn unit_conductor() {
        assert!(CycNum::zeta(1, 0).is_one());
        assert_eq!(CycNum::root_of_unity(0, 1).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn cube_roots_sum_to_minus_one() {
        let s = CycNum::zeta(3, 1).add(&CycNum::zeta(3, 2));
        assert_eq!(s, CycNum::from_int(-1));
    }

    #[test]
    fn zeta_power_wraps() {
        assert_eq!(CycNum::zeta(5, 7), CycNum::zeta(5, 2));
        assert!(CycNum::zeta(6, 6).is_one());
    }

    #[test]
    fn conductor_raising_preserves_value() {
        let a = CycNum::zeta(4, 1);
        assert_eq!(a.raised(8), CycNum::zeta(8, 2));
        assert_eq!(a.raised(12), CycNum::zeta(12, 3));
        assert_eq!(a, CycNum::zeta(8, 2));
    }

    #[test]
    fn mul_across_conductors() {
        let a = CycNum::zeta(8, 1);
        assert_eq!(a.mul(&a), CycNum::zeta(4, 1));
        assert_eq!(CycNum::zeta(5, 1).conj(), CycNum::zeta(5, 4));
    }

    #[test]
    fn sqrt_two_forms_agree() {
        let s = CycNum::zeta(8, 1).sub(&CycNum::zeta(8, 3));
        assert_eq!(s, sqrt_nat(2));
        assert_eq!(s.mul(&s), CycNum::from_int(2));
    }

    #[test]
    fn inverse_of_sqrt_two() {
        let s = CycNum::zeta(8, 1).sub(&CycNum::zeta(8, 3));
        let inv = s.inv().unwrap();
        assert!(s.mul(&inv).is_one());
        assert_eq!(inv, s.scale(&half()));
        assert!(CycNum::zero().inv().is_err());
    }

    #[test]
    fn sin_ratio_cases() {
        assert!(sin_ratio(1, 1, 8).unwrap().is_one());
        assert!(sin_ratio(3, 1, 4).unwrap().is_one());
        assert_eq!(sin_ratio(2, 1, 4).unwrap(), sqrt_nat(2));
        assert!(sin_ratio(4, 4, 4).is_err());
    }

    #[test]
    fn sqrt_nat_squares() {
        for m in [1u64, 2, 3, 5, 6, 8, 12, 15, 30, 49] {
            let s = sqrt_nat(m);
            assert_eq!(s.mul(&s), CycNum::from_int(m as i64), "sqrt({m})^2");
            assert!(s.is_real(), "sqrt({m}) real");
        }
    }

    #[test]
    fn root_of_unity_detection() {
        assert_eq!(CycNum::one().as_root_of_unity(), Some((0, 1)));
        assert_eq!(CycNum::from_int(-1).as_root_of_unity(), Some((1, 2)));
        assert_eq!(CycNum::zeta(16, 3).as_root_of_unity(), Some((3, 16)));
        assert_eq!(CycNum::zeta(6, 2).as_root_of_unity(), Some((1, 3)));
        assert_eq!(CycNum::zeta(7, 1).neg().as_root_of_unity(), Some((9, 14)));
        assert_eq!(sqrt_nat(2).as_root_of_unity(), None);
        assert_eq!(CycNum::from_int(2).as_root_of_unity(), None);
    }

    #[test]
    fn real_and_imaginary_parts() {
        let z = CycNum::zeta(8, 1);
        let re = z.real_part();
        let im = z.imag_part();
        assert!(re.is_real() && im.is_real());
        assert_eq!(re, sqrt_nat(2).scale(&half()));
        assert_eq!(im, sqrt_nat(2).scale(&half()));
        assert_eq!(
            re.add(&im.mul(&CycNum::i())),
            z
        );
    }

    #[test]
    fn conj_is_involutive_automorphism() {
        let a = CycNum::zeta(12, 1).add(&CycNum::from_int(3));
        let b = CycNum::zeta(12, 5).scale(&half());
        assert_eq!(a.conj().conj(), a);
        assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
        assert_eq!(a.add(&b).conj(), a.conj().add(&b.conj()));
    }

    #[test]
    fn galois_permutes_roots() {
        let a = CycNum::zeta(5, 1);
        assert_eq!(a.galois(2), CycNum::zeta(5, 2));
        assert_eq!(a.galois(2).galois(3), CycNum::zeta(5, 1));
    }
}
