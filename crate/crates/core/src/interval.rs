//! Certified numeric evaluation of cyclotomic numbers.
//!
//! Evaluation uses dyadic interval arithmetic: every bound is an integer at
//! scale 2^−prec and every rounding is outward, so the true value always lies
//! inside the reported interval. Sign decisions double the working precision
//! until the interval excludes zero; exact zero is decided first on the
//! canonical form, so the loop always terminates.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cyclo::CycNum;

#[derive(Clone, Debug)]
pub struct DyInterval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn div_floor(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -(-a).div_floor(b)
}

impl DyInterval {
    fn point(v: BigInt, prec: u32) -> Self {
        DyInterval {
            lo: v.clone(),
            hi: v,
            prec,
        }
    }

    fn zero(prec: u32) -> Self {
        Self::point(BigInt::zero(), prec)
    }

    /// Tight outward-rounded enclosure of num/den (den > 0).
    fn from_rat(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        debug_assert!(den.is_positive());
        let scaled = num << prec;
        DyInterval {
            lo: div_floor(&scaled, den),
            hi: div_ceil(&scaled, den),
            prec,
        }
    }

    fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.prec, other.prec);
        DyInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            prec: self.prec,
        }
    }

    fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.prec, other.prec);
        DyInterval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
            prec: self.prec,
        }
    }

    fn neg(&self) -> Self {
        DyInterval {
            lo: -&self.hi,
            hi: -&self.lo,
            prec: self.prec,
        }
    }

    fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.prec, other.prec);
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = cands.iter().min().unwrap();
        let hi = cands.iter().max().unwrap();
        let scale = BigInt::one() << self.prec;
        DyInterval {
            lo: div_floor(lo, &scale),
            hi: div_ceil(hi, &scale),
            prec: self.prec,
        }
    }

    fn mul_int(&self, k: i64) -> Self {
        let k = BigInt::from(k);
        let a = &self.lo * &k;
        let b = &self.hi * &k;
        DyInterval {
            lo: a.clone().min(b.clone()),
            hi: a.max(b),
            prec: self.prec,
        }
    }

    fn div_uint(&self, k: u64) -> Self {
        let k = BigInt::from(k);
        DyInterval {
            lo: div_floor(&self.lo, &k),
            hi: div_ceil(&self.hi, &k),
            prec: self.prec,
        }
    }

    fn widen(&self, ulps: u64) -> Self {
        let u = BigInt::from(ulps);
        DyInterval {
            lo: &self.lo - &u,
            hi: &self.hi + &u,
            prec: self.prec,
        }
    }

    fn sup_abs(&self) -> BigInt {
        self.lo.abs().max(self.hi.abs())
    }

    /// Sign certified only when the interval excludes zero.
    fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else {
            None
        }
    }

    fn width(&self) -> BigInt {
        &self.hi - &self.lo
    }

    fn mid_f64(&self) -> f64 {
        let two = BigInt::from(2);
        BigRational::new(&self.lo + &self.hi, two << self.prec)
            .to_f64()
            .unwrap_or(f64::NAN)
    }
}

/// Enclosure of arctan(1/m) by the alternating Leibniz series.
fn atan_recip(m: u64, prec: u32) -> DyInterval {
    let scale = BigInt::one() << prec;
    let m2 = BigInt::from(m) * BigInt::from(m);
    let mut denom = BigInt::from(m);
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let mut j: u64 = 0;
    loop {
        let d = &denom * BigInt::from(2 * j + 1);
        let f = div_floor(&scale, &d);
        if f.is_zero() {
            break;
        }
        if j % 2 == 0 {
            lo += &f;
            hi += &f + 1;
        } else {
            lo -= &f + 1;
            hi -= &f;
        }
        denom *= &m2;
        j += 1;
    }
    // Alternating tail is below one ulp once the term underflows.
    DyInterval { lo, hi, prec }.widen(1)
}

/// π via Machin's formula, cached per precision.
fn pi(prec: u32) -> DyInterval {
    static CACHE: OnceLock<Mutex<HashMap<u32, (BigInt, BigInt)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some((lo, hi)) = cache.lock().unwrap().get(&prec) {
        return DyInterval {
            lo: lo.clone(),
            hi: hi.clone(),
            prec,
        };
    }
    let v = atan_recip(5, prec)
        .mul_int(16)
        .sub(&atan_recip(239, prec).mul_int(4));
    cache
        .lock()
        .unwrap()
        .insert(prec, (v.lo.clone(), v.hi.clone()));
    v
}

/// cos and sin of 2πk/n with guaranteed enclosures.
fn cos_sin_two_pi(k: i64, n: u64, prec: u32) -> (DyInterval, DyInterval) {
    // Reduce the angle to magnitude at most π before the Taylor series.
    let mut k = k.rem_euclid(n as i64);
    if 2 * k > n as i64 {
        k -= n as i64;
    }
    let theta = pi(prec).mul_int(2 * k).div_uint(n).widen(1);
    let theta_sq = theta.mul(&theta);
    let mut cos = DyInterval::point(BigInt::one() << prec, prec);
    let mut sin = theta.clone();
    let mut cos_term = cos.clone();
    let mut sin_term = sin.clone();
    let mut j: u64 = 1;
    loop {
        cos_term = cos_term.mul(&theta_sq).div_uint((2 * j - 1) * 2 * j).neg();
        sin_term = sin_term.mul(&theta_sq).div_uint(2 * j * (2 * j + 1)).neg();
        cos = cos.add(&cos_term);
        sin = sin.add(&sin_term);
        // |theta| <= pi + eps, so the term ratio is < 1/2 as soon as
        // (2j+1)(2j+2) > 2 theta^2; from there the tail is under twice the
        // next term.
        if (2 * j + 1) * (2 * j + 2) > 40 {
            let bound = cos_term.sup_abs().max(sin_term.sup_abs());
            if bound <= BigInt::from(2) {
                cos = cos.widen(6);
                sin = sin.widen(6);
                break;
            }
        }
        j += 1;
    }
    (cos, sin)
}

/// Enclosures of the real and imaginary parts of a cyclotomic number.
pub fn enclose(x: &CycNum, prec: u32) -> (DyInterval, DyInterval) {
    let n = x.conductor();
    let (coeffs, den) = x.raw_parts();
    let mut re = DyInterval::zero(prec);
    let mut im = DyInterval::zero(prec);
    for (j, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let r = DyInterval::from_rat(c, den, prec);
        let (cos, sin) = cos_sin_two_pi(j as i64, n, prec);
        re = re.add(&r.mul(&cos));
        im = im.add(&r.mul(&sin));
    }
    (re, im)
}

const PREC_CAP: u32 = 1 << 16;

/// Certified sign of an exactly-real cyclotomic number.
///
/// Zero is decided on the canonical form; otherwise interval precision is
/// doubled until the enclosure excludes zero, which must happen for a
/// nonzero value.
pub fn certified_sign(x: &CycNum) -> i8 {
    assert!(x.is_real(), "certified_sign requires an exactly real value");
    if x.is_zero() {
        return 0;
    }
    let mut prec = 64;
    loop {
        let (re, _) = enclose(x, prec);
        if let Some(s) = re.sign() {
            return s;
        }
        prec *= 2;
        assert!(prec <= PREC_CAP, "sign certification exceeded precision cap");
    }
}

/// Floating snapshot of a cyclotomic number together with everything that is
/// decided exactly: zero-ness, reality, and the certified sign of the real
/// part.
#[derive(Clone, Debug)]
pub struct Approx {
    pub re: f64,
    pub im: f64,
    pub is_zero: bool,
    pub is_real: bool,
    /// Sign of Re(x): −1, 0, +1. Zero only when Re(x) is exactly zero.
    pub real_sign: i8,
}

impl CycNum {
    /// Interval evaluation at `bits` of certified absolute accuracy
    /// (clamped to at least 53).
    pub fn approx(&self, bits: u32) -> Approx {
        let bits = bits.max(53);
        if self.is_zero() {
            return Approx {
                re: 0.0,
                im: 0.0,
                is_zero: true,
                is_real: true,
                real_sign: 0,
            };
        }
        let is_real = self.is_real();
        let re_exact = self.real_part();
        let real_sign = if re_exact.is_zero() {
            0
        } else {
            certified_sign(&re_exact)
        };
        let mut prec = bits + 16;
        loop {
            let (re, im) = enclose(self, prec);
            let tol = BigInt::one() << (prec - bits);
            if re.width() <= tol && im.width() <= tol {
                return Approx {
                    re: re.mid_f64(),
                    im: im.mid_f64(),
                    is_zero: false,
                    is_real,
                    real_sign,
                };
            }
            prec *= 2;
            assert!(prec <= PREC_CAP, "approx exceeded precision cap");
        }
    }

    /// Convenience double-precision value.
    pub fn to_c64(&self) -> (f64, f64) {
        let a = self.approx(53);
        (a.re, a.im)
    }

    /// Exactly real with certified positive sign.
    pub fn is_positive_real(&self) -> bool {
        self.is_real() && !self.is_zero() && certified_sign(self) > 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::{sin_ratio, sqrt_nat};

    #[test]
    fn approx_of_zero_flags_exact() {
        let a = CycNum::zero().approx(64);
        assert!(a.is_zero);
        assert_eq!(a.real_sign, 0);
    }

    #[test]
    fn approx_of_zeta8() {
        let a = CycNum::zeta(8, 1).approx(64);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a.re - r).abs() < 1e-12, "re {}", a.re);
        assert!((a.im - r).abs() < 1e-12, "im {}", a.im);
        assert!(!a.is_real);
        assert_eq!(a.real_sign, 1);
    }

    #[test]
    fn sqrt_two_is_certified_positive() {
        let s = CycNum::zeta(8, 1).sub(&CycNum::zeta(8, 3));
        assert!(s.is_real());
        assert_eq!(certified_sign(&s), 1);
        let a = s.approx(64);
        assert!((a.re - 2f64.sqrt()).abs() < 1e-12);
        assert!(s.neg().is_positive_real() == false);
        assert!(s.is_positive_real());
    }

    #[test]
    fn sin_ratio_numeric() {
        let v = sin_ratio(2, 1, 4).unwrap().approx(64);
        assert!((v.re - 1.414_213_562_373_095).abs() < 1e-12);
        assert!(v.is_real);
    }

    #[test]
    fn enclosures_match_direct_float_eval() {
        // z = 1/2 + zeta_12^5 - 3 zeta_12
        let z = CycNum::from_rat(&crate::cyclo::Rat::new(1.into(), 2.into()))
            .add(&CycNum::zeta(12, 5))
            .sub(&CycNum::zeta(12, 1).scale(&crate::cyclo::Rat::from_integer(3.into())));
        let a = z.approx(80);
        let t1 = 2.0 * std::f64::consts::PI * 5.0 / 12.0;
        let t2 = 2.0 * std::f64::consts::PI / 12.0;
        let re = 0.5 + t1.cos() - 3.0 * t2.cos();
        let im = t1.sin() - 3.0 * t2.sin();
        assert!((a.re - re).abs() < 1e-10);
        assert!((a.im - im).abs() < 1e-10);
    }

    #[test]
    fn imaginary_detection_is_exact() {
        let i = CycNum::i();
        let a = i.approx(64);
        assert!(!a.is_real);
        assert_eq!(a.real_sign, 0);
        assert!(sqrt_nat(3).approx(64).is_real);
    }
}
