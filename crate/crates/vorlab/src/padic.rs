//! Fixed-precision arithmetic in Q_p for odd p.
//!
//! Elements are stored as `p^val * unit` with the unit known modulo `p^prec`.
//! Zero is the only element with infinite valuation. Residue arithmetic mod
//! `p^n` lives in [`Zmod`], which the other modules use directly for hot loops.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// Default working precision N.
pub const DEFAULT_PRECISION: u32 = 24;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Checks that `p` is an odd prime.
pub fn check_odd_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::UnsupportedPrime(2));
    }
    Ok(())
}

pub fn ipow(p: u64, n: u32) -> u128 {
    (p as u128).pow(n)
}

/// `a*b mod m` for any modulus below 2^127.
pub fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return (a % m) * (b % m) % m;
    }
    let (mut a, mut b) = (a % m, b % m);
    let mut r = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            r = (r + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    r
}

pub fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m))
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `v_p(n)` for nonzero integers, `None` for zero.
pub fn val_int(n: i128, p: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let (mut n, p) = (n.abs(), p as i128);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Some(v)
}

/// Strips the `p`-part: returns `(v_p(n), n / p^v)`.
pub fn split_p(n: i128, p: u64) -> (u32, i128) {
    let v = val_int(n, p).unwrap_or(0);
    (v, n / (p as i128).pow(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

/// `v_p(num/den)`.
pub fn valuation(num: i128, den: i128, p: u64) -> Valuation {
    assert!(den != 0, "zero denominator");
    match (val_int(num, p), val_int(den, p)) {
        (None, _) => Valuation::Infinite,
        (Some(a), Some(b)) => Valuation::Finite(a as i64 - b as i64),
        (Some(_), None) => unreachable!(),
    }
}

/// Residue ring Z/p^n with p odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Zmod {
    pub p: u64,
    pub n: u32,
    pub m: u128,
}

impl Zmod {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        check_odd_prime(p)?;
        let m = (p as u128)
            .checked_pow(n)
            .filter(|m| *m < (1u128 << 126))
            .ok_or(Error::ModulusTooLarge { p, n })?;
        Ok(Zmod { p, n, m })
    }

    pub fn red(&self, x: i128) -> u128 {
        if self.m > i128::MAX as u128 {
            unreachable!()
        }
        x.rem_euclid(self.m as i128) as u128
    }

    pub fn add(&self, a: u128, b: u128) -> u128 {
        (a % self.m + b % self.m) % self.m
    }

    pub fn sub(&self, a: u128, b: u128) -> u128 {
        (a % self.m + self.m - b % self.m) % self.m
    }

    pub fn neg(&self, a: u128) -> u128 {
        (self.m - a % self.m) % self.m
    }

    pub fn mul(&self, a: u128, b: u128) -> u128 {
        mul_mod(a, b, self.m)
    }

    pub fn pow(&self, a: u128, e: u128) -> u128 {
        pow_mod(a, e, self.m)
    }

    pub fn inv(&self, a: u128) -> Result<u128> {
        if a % self.p as u128 == 0 {
            return Err(Error::Zero);
        }
        // Units: a^(phi - 1).
        let phi = self.m / self.p as u128 * (self.p as u128 - 1);
        Ok(self.pow(a, phi - 1))
    }

    pub fn is_unit(&self, a: u128) -> bool {
        a % self.p as u128 != 0
    }

    /// Canonical square root of a unit: the root whose residue mod p lies
    /// in `1..=(p-1)/2`, Hensel-lifted to precision n.
    pub fn sqrt_unit(&self, x: u128) -> Result<u128> {
        let p = self.p as u128;
        if x % p == 0 {
            return Err(Error::Zero);
        }
        let r0 = (1..=(p - 1) / 2)
            .find(|t| (t * t) % p == x % p)
            .ok_or(Error::NotASquare(self.p))?;
        let two_inv = self.inv(2)?;
        let mut r = r0;
        // Newton doubles the number of correct digits each step.
        let mut prec = 1u32;
        while prec < self.n {
            let t = self.mul(x, self.inv(r)?);
            r = self.mul(self.add(r, t), two_inv);
            prec *= 2;
        }
        Ok(r)
    }

    /// `log_p(u)` for `u = 1 mod p`, as a residue mod p^n.
    pub fn log(&self, u: u128) -> Result<u128> {
        let p = self.p;
        if u % p as u128 != 1 % p as u128 {
            return Err(Error::NotPrincipalUnit);
        }
        let z0 = self.sub(u, 1);
        if z0 == 0 {
            return Ok(0);
        }
        // Terms z^k/k with v(z) >= 1 have valuation >= k - v_p(k).
        let kmax = self.n as u64 + 2 * (64 - (self.n as u64).leading_zeros() as u64) + 4;
        let extra = {
            let mut e = 0u32;
            let mut q = p;
            while q <= kmax {
                e += 1;
                q = q.saturating_mul(p);
            }
            e
        };
        let big = Zmod::new(p, self.n + extra)?;
        let z = z0;
        let mut zk = 1u128;
        let mut acc = 0u128;
        for k in 1..=kmax {
            zk = big.mul(zk, z);
            let (vk, kk) = split_p(k as i128, p);
            let num = zk / (p as u128).pow(vk);
            let term = big.mul(num, big.inv(kk as u128)?);
            acc = if k % 2 == 1 { big.add(acc, term) } else { big.sub(acc, term) };
        }
        Ok(acc % self.m)
    }

    /// Exponential series, used as an oracle for `log`. Needs `v_p(x) >= 1`.
    pub fn exp(&self, x: u128) -> Result<u128> {
        let p = self.p as u128;
        if x % p != 0 {
            return Err(Error::Invalid("exp needs v_p(x) >= 1".into()));
        }
        // v_p(k!) <= k/(p-1); terms have valuation >= k(1 - 1/(p-1)).
        let kmax = 2 * self.n as u64 * (self.p - 1) / (self.p - 2).max(1) + 8;
        let extra = (kmax / (self.p - 1)) as u32 + 1;
        let big = Zmod::new(self.p, self.n + extra)?;
        let mut acc = 1u128;
        let mut num = 1u128;
        let mut fact_v = 0u32;
        let mut fact_unit = 1u128;
        for k in 1..=kmax {
            num = big.mul(num, x);
            let (vk, kk) = split_p(k as i128, self.p);
            fact_v += vk;
            fact_unit = big.mul(fact_unit, kk as u128);
            let pv = (self.p as u128).pow(fact_v);
            if num % pv != 0 {
                return Err(Error::Precision { needed: fact_v, have: self.n + extra });
            }
            let term = big.mul(num / pv, big.inv(fact_unit)?);
            acc = big.add(acc, term);
        }
        Ok(acc % self.m)
    }
}

/// Working precision for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PadicPrecisionConfig {
    pub working_precision: u32,
}

impl Default for PadicPrecisionConfig {
    fn default() -> Self {
        PadicPrecisionConfig { working_precision: DEFAULT_PRECISION }
    }
}

impl PadicPrecisionConfig {
    /// Checks `N >= 2 a + 4` for the largest conductor exponent `a` of a run.
    pub fn check_conductor(&self, a: u32) -> Result<()> {
        let needed = 2 * a + 4;
        if self.working_precision < needed {
            return Err(Error::Precision { needed, have: self.working_precision });
        }
        Ok(())
    }
}

/// An element `p^val * unit` of Q_p with the unit known mod `p^prec`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicNumber {
    pub p: u64,
    pub val: Valuation,
    pub unit: u128,
    pub prec: u32,
}

impl PadicNumber {
    pub fn zero(p: u64, prec: u32) -> Self {
        PadicNumber { p, val: Valuation::Infinite, unit: 0, prec }
    }

    pub fn from_rational(num: i128, den: i128, p: u64, cfg: PadicPrecisionConfig) -> Result<Self> {
        check_odd_prime(p)?;
        if den == 0 {
            return Err(Error::Invalid("zero denominator".into()));
        }
        let prec = cfg.working_precision;
        if num == 0 {
            return Ok(Self::zero(p, prec));
        }
        let (vn, un) = split_p(num, p);
        let (vd, ud) = split_p(den, p);
        let z = Zmod::new(p, prec)?;
        let unit = z.mul(z.red(un), z.inv(z.red(ud))?);
        Ok(PadicNumber { p, val: Valuation::Finite(vn as i64 - vd as i64), unit, prec })
    }

    pub fn from_int(n: i128, p: u64, cfg: PadicPrecisionConfig) -> Result<Self> {
        Self::from_rational(n, 1, p, cfg)
    }

    /// `p^val * unit` from a unit residue.
    pub fn from_parts(p: u64, val: i64, unit: u128, prec: u32) -> Result<Self> {
        let z = Zmod::new(p, prec)?;
        if !z.is_unit(unit) {
            return Err(Error::Invalid("unit part divisible by p".into()));
        }
        Ok(PadicNumber { p, val: Valuation::Finite(val), unit: unit % z.m, prec })
    }

    pub fn is_zero(&self) -> bool {
        self.val == Valuation::Infinite
    }

    fn ring(&self) -> Zmod {
        Zmod::new(self.p, self.prec).expect("validated at construction")
    }

    /// |x|_p.
    pub fn abs(&self) -> f64 {
        match self.val {
            Valuation::Infinite => 0.0,
            Valuation::Finite(v) => (self.p as f64).powi(-v as i32),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_prime(o)?;
        let prec = self.prec.min(o.prec);
        match (self.val, o.val) {
            (Valuation::Finite(a), Valuation::Finite(b)) => {
                let z = Zmod::new(self.p, prec)?;
                Ok(PadicNumber { p: self.p, val: Valuation::Finite(a + b), unit: z.mul(self.unit, o.unit), prec })
            }
            _ => Ok(Self::zero(self.p, prec)),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match self.val {
            Valuation::Infinite => Err(Error::Zero),
            Valuation::Finite(v) => {
                let z = self.ring();
                Ok(PadicNumber { p: self.p, val: Valuation::Finite(-v), unit: z.inv(self.unit)?, prec: self.prec })
            }
        }
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return *self;
        }
        PadicNumber { unit: self.ring().neg(self.unit), ..*self }
    }

    /// Sum; cancellation of leading digits lowers the relative precision,
    /// and running out of digits is an error rather than a silent zero.
    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_prime(o)?;
        let (a, b) = match (self.val, o.val) {
            (Valuation::Infinite, _) => return Ok(*o),
            (_, Valuation::Infinite) => return Ok(*self),
            (Valuation::Finite(a), Valuation::Finite(b)) => (a, b),
        };
        let (lo, hi, vlo, vhi) = if a <= b { (self, o, a, b) } else { (o, self, b, a) };
        let shift = (vhi - vlo) as u32;
        // Absolute precision of each operand is val + prec.
        let prec = lo.prec.min(shift.saturating_add(hi.prec));
        let z = Zmod::new(self.p, prec)?;
        let s = z.add(lo.unit, z.mul(hi.unit, ipow(self.p, shift.min(prec))));
        if s == 0 {
            return Err(Error::Precision { needed: prec + 1, have: prec });
        }
        let (k, _) = split_p(s as i128, self.p);
        let unit = s / ipow(self.p, k);
        Ok(PadicNumber { p: self.p, val: Valuation::Finite(vlo + k as i64), unit, prec: prec - k })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    /// Value mod p^k as a residue; requires `val >= 0` and enough precision.
    pub fn residue(&self, k: u32) -> Result<u128> {
        match self.val {
            Valuation::Infinite => Ok(0),
            Valuation::Finite(v) if v < 0 => Err(Error::Invalid("negative valuation has no residue".into())),
            Valuation::Finite(v) => {
                let v = v as u32;
                if v >= k {
                    return Ok(0);
                }
                if k - v > self.prec {
                    return Err(Error::Precision { needed: k - v, have: self.prec });
                }
                let z = Zmod::new(self.p, k)?;
                Ok(z.mul(self.unit, ipow(self.p, v)))
            }
        }
    }

    fn same_prime(&self, o: &Self) -> Result<()> {
        if self.p != o.p {
            return Err(Error::PrimeMismatch(self.p, o.p));
        }
        Ok(())
    }
}

impl Serialize for PadicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PadicNumber", 4)?;
        st.serialize_field("p", &self.p)?;
        match self.val {
            Valuation::Finite(v) => st.serialize_field("val", &v)?,
            Valuation::Infinite => st.serialize_field("val", "inf")?,
        }
        st.serialize_field("unit", &self.unit.to_string())?;
        st.serialize_field("prec", &self.prec)?;
        st.end()
    }
}

/// `log_p(u)` for `u` in 1 + pZ_p.
pub fn padic_log(u: &PadicNumber, cfg: PadicPrecisionConfig) -> Result<PadicNumber> {
    check_odd_prime(u.p)?;
    if u.val != Valuation::Finite(0) {
        return Err(Error::NotPrincipalUnit);
    }
    let prec = cfg.working_precision.min(u.prec);
    let z = Zmod::new(u.p, prec)?;
    let r = z.log(u.unit % z.m)?;
    if r == 0 {
        return Ok(PadicNumber::zero(u.p, prec));
    }
    let (k, unit) = split_p(r as i128, u.p);
    Ok(PadicNumber { p: u.p, val: Valuation::Finite(k as i64), unit: unit as u128, prec: prec - k })
}

/// Canonical square root of a unit (residue mod p in the lower half-range).
pub fn sqrt_unit(x: &PadicNumber, cfg: PadicPrecisionConfig) -> Result<PadicNumber> {
    check_odd_prime(x.p)?;
    if x.val != Valuation::Finite(0) {
        return Err(Error::Invalid("sqrt_unit needs a unit".into()));
    }
    let prec = cfg.working_precision.min(x.prec);
    let z = Zmod::new(x.p, prec)?;
    let r = z.sqrt_unit(x.unit % z.m)?;
    Ok(PadicNumber { p: x.p, val: Valuation::Finite(0), unit: r, prec })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PadicPrecisionConfig {
        PadicPrecisionConfig::default()
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(12, 1, 2), Valuation::Finite(2));
        assert_eq!(valuation(5, 3, 3), Valuation::Finite(-1));
        assert_eq!(valuation(0, 1, 7), Valuation::Infinite);
    }

    #[test]
    fn log_of_one_is_zero() {
        let one = PadicNumber::from_int(1, 5, cfg()).unwrap();
        assert!(padic_log(&one, cfg()).unwrap().is_zero());
    }

    #[test]
    fn log_exp_round_trip() {
        let z = Zmod::new(5, 24).unwrap();
        let r = z.log(6).unwrap();
        assert_eq!(z.exp(r).unwrap(), 6);
    }

    #[test]
    fn log_valuation_7() {
        let u = PadicNumber::from_int(50, 7, cfg()).unwrap();
        let l = padic_log(&u, cfg()).unwrap();
        assert_eq!(l.val, Valuation::Finite(2));
    }

    #[test]
    fn log_rejects() {
        let u = PadicNumber::from_int(2, 5, cfg()).unwrap();
        assert_eq!(padic_log(&u, cfg()), Err(Error::NotPrincipalUnit));
        assert!(matches!(PadicNumber::from_int(3, 2, cfg()), Err(Error::UnsupportedPrime(2))));
    }

    #[test]
    fn sqrt_examples() {
        let one = PadicNumber::from_int(1, 7, cfg()).unwrap();
        assert_eq!(sqrt_unit(&one, cfg()).unwrap().unit, 1);
        let two = PadicNumber::from_int(2, 7, cfg()).unwrap();
        let r = sqrt_unit(&two, cfg()).unwrap();
        assert_eq!(r.unit % 7, 3);
        let z = Zmod::new(7, 24).unwrap();
        assert_eq!(z.mul(r.unit, r.unit), 2);
        let two5 = PadicNumber::from_int(2, 5, cfg()).unwrap();
        assert_eq!(sqrt_unit(&two5, cfg()), Err(Error::NotASquare(5)));
    }

    #[test]
    fn add_with_cancellation_tracks_precision() {
        let c = PadicPrecisionConfig { working_precision: 6 };
        let a = PadicNumber::from_int(1, 5, c).unwrap();
        let b = PadicNumber::from_int(-26, 5, c).unwrap();
        let s = a.add(&b).unwrap();
        assert_eq!(s.val, Valuation::Finite(2));
        assert_eq!(s.prec, 4);
        assert!(a.sub(&a).is_err());
    }

    #[test]
    fn serializes_with_inf_sentinel() {
        let z = PadicNumber::zero(7, 24);
        let s = serde_json::to_string(&z).unwrap();
        assert_eq!(s, r#"{"p":7,"val":"inf","unit":"0","prec":24}"#);
    }

    #[test]
    fn precision_config_bound() {
        assert!(cfg().check_conductor(10).is_ok());
        assert!(cfg().check_conductor(11).is_err());
    }
}
