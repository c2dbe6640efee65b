//! Characters of (Z/l^a)^*, additive characters, Gauss sums and the α_μ of
//! the p-adic log description.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::padic::{check_odd_prime, inv_mod, ipow, split_p, PadicNumber, Valuation, Zmod};
use crate::{Error, Result};

/// `e(num/den) = exp(2πi num/den)`, reducing the fraction first.
pub fn e_frac(num: i128, den: i128) -> Complex64 {
    let r = num.rem_euclid(den);
    Complex64::from_polar(1.0, 2.0 * PI * (r as f64) / (den as f64))
}

/// `e(x)` for real x.
pub fn e(x: f64) -> Complex64 {
    let f = x - x.floor();
    Complex64::from_polar(1.0, 2.0 * PI * f)
}

pub fn phi_pow(p: u64, a: u32) -> u64 {
    if a == 0 {
        1
    } else {
        p.pow(a - 1) * (p - 1)
    }
}

/// Exact root of unity `e(exponent/order)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootOfUnity {
    pub order: u64,
    pub exponent: u64,
}

impl RootOfUnity {
    pub fn one() -> Self {
        RootOfUnity { order: 1, exponent: 0 }
    }

    pub fn new(order: u64, exponent: i128) -> Self {
        let mut r = RootOfUnity { order, exponent: exponent.rem_euclid(order as i128) as u64 };
        r.reduce();
        r
    }

    fn reduce(&mut self) {
        let g = crate::padic::gcd(self.order as i128, self.exponent as i128).max(1) as u64;
        self.order /= g;
        self.exponent /= g;
    }

    pub fn mul(&self, o: &Self) -> Self {
        let g = crate::padic::gcd(self.order as i128, o.order as i128) as u128;
        let l = self.order as u128 / g * o.order as u128;
        let e = (self.exponent as u128 * (l / self.order as u128) + o.exponent as u128 * (l / o.order as u128)) % l;
        Self::new(l as u64, e as i128)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.order, -(self.exponent as i128))
    }

    pub fn is_one(&self) -> bool {
        self.exponent == 0
    }

    pub fn to_complex(&self) -> Complex64 {
        e_frac(self.exponent as i128, self.order as i128)
    }
}

/// Smallest positive primitive root of (Z/p^a)^*.
pub fn primitive_root(p: u64, a: u32) -> u64 {
    let m = p.pow(a.max(1));
    let phi = phi_pow(p, a.max(1));
    let mut factors = Vec::new();
    let mut n = phi;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            factors.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    (2..m)
        .find(|&g| {
            g % p != 0
                && factors
                    .iter()
                    .all(|&q| crate::padic::pow_mod(g as u128, (phi / q) as u128, m as u128) != 1)
        })
        .unwrap_or(1)
}

/// Discrete-log table of (Z/p^a)^* against the smallest primitive root.
#[derive(Debug)]
pub struct DlogTable {
    pub p: u64,
    pub a: u32,
    pub modulus: u64,
    pub phi: u64,
    pub gen: u64,
    log: Vec<u32>,
}

impl DlogTable {
    fn build(p: u64, a: u32) -> Self {
        let modulus = p.pow(a);
        let phi = phi_pow(p, a);
        let gen = if a == 0 { 1 } else { primitive_root(p, a) };
        let mut log = vec![u32::MAX; modulus as usize];
        let mut x = 1u64 % modulus.max(1);
        for j in 0..phi {
            log[x as usize] = j as u32;
            x = x * gen % modulus.max(1);
        }
        DlogTable { p, a, modulus, phi, gen, log }
    }

    /// Cached table; modulus capped at 10^7 residues.
    pub fn get(p: u64, a: u32) -> Result<Arc<DlogTable>> {
        static CACHE: OnceLock<RwLock<HashMap<(u64, u32), Arc<DlogTable>>>> = OnceLock::new();
        check_odd_prime(p)?;
        let m = (p as u128).pow(a);
        if m > 10_000_000 {
            return Err(Error::ModulusTooLarge { p, n: a });
        }
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(t) = cache.read().expect("cache poisoned").get(&(p, a)) {
            return Ok(t.clone());
        }
        let t = Arc::new(Self::build(p, a));
        cache.write().expect("cache poisoned").insert((p, a), t.clone());
        Ok(t)
    }

    /// Discrete log of a unit residue; `None` if `x` is divisible by p.
    pub fn log(&self, x: i128) -> Option<u64> {
        let r = x.rem_euclid(self.modulus as i128) as usize;
        match self.log[r] {
            u32::MAX => None,
            j => Some(j as u64),
        }
    }
}

/// A character of (Z/l^a)^*, given by μ(g) = e(log_image/φ(l^a)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiplicativeCharacter {
    pub l: u64,
    pub a: u32,
    pub gen: u64,
    pub log_image: u64,
}

impl MultiplicativeCharacter {
    pub fn new(l: u64, a: u32, index: u64) -> Result<Self> {
        let t = DlogTable::get(l, a)?;
        Ok(MultiplicativeCharacter { l, a, gen: t.gen, log_image: index % t.phi })
    }

    pub fn trivial(l: u64) -> Self {
        MultiplicativeCharacter { l, a: 0, gen: 1, log_image: 0 }
    }

    /// The Legendre symbol mod l.
    pub fn quadratic(l: u64) -> Result<Self> {
        Self::new(l, 1, (l - 1) / 2)
    }

    pub fn phi(&self) -> u64 {
        phi_pow(self.l, self.a)
    }

    pub fn is_trivial(&self) -> bool {
        self.log_image == 0
    }

    /// a(μ): smallest a' with μ trivial on 1 + l^{a'} Z_l.
    pub fn conductor(&self) -> u32 {
        let phi = self.phi() as u128;
        (0..=self.a)
            .find(|&k| (self.log_image as u128 * phi_pow(self.l, k) as u128) % phi == 0)
            .unwrap_or(self.a)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.a
    }

    /// μ(x) for a unit residue x as an exact root of unity.
    pub fn eval_root(&self, x: i128) -> Result<RootOfUnity> {
        if self.a == 0 {
            if x % self.l as i128 == 0 {
                return Err(Error::Zero);
            }
            return Ok(RootOfUnity::one());
        }
        let t = DlogTable::get(self.l, self.a)?;
        let j = t.log(x).ok_or(Error::Zero)?;
        Ok(RootOfUnity::new(self.phi(), (j as u128 * self.log_image as u128 % self.phi() as u128) as i128))
    }

    /// μ on a unit, 0 on multiples of l (Dirichlet convention).
    pub fn dirichlet(&self, x: i128) -> Complex64 {
        match self.eval_root(x) {
            Ok(r) => r.to_complex(),
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// μ(x) for nonzero rational x, using μ(ϖ) = 1.
    pub fn eval(&self, num: i128, den: i128) -> Result<Complex64> {
        if num == 0 || den == 0 {
            return Err(Error::Zero);
        }
        let (_, un) = split_p(num, self.l);
        let (_, ud) = split_p(den, self.l);
        let m = ipow(self.l, self.a.max(1)) as i128;
        let u = un.rem_euclid(m) * inv_mod(ud, m).ok_or(Error::Zero)? % m;
        Ok(self.eval_root(u)?.to_complex())
    }

    pub fn eval_padic(&self, x: &PadicNumber) -> Result<Complex64> {
        if x.p != self.l {
            return Err(Error::PrimeMismatch(x.p, self.l));
        }
        if x.val == Valuation::Infinite {
            return Err(Error::Zero);
        }
        if self.a > x.prec {
            return Err(Error::Precision { needed: self.a, have: x.prec });
        }
        Ok(self.eval_root((x.unit % ipow(self.l, self.a.max(1))) as i128)?.to_complex())
    }

    pub fn conj(&self) -> Self {
        if self.a == 0 {
            return *self;
        }
        MultiplicativeCharacter { log_image: (self.phi() - self.log_image) % self.phi(), ..*self }
    }

    /// The same character viewed mod l^b (b at least the conductor).
    pub fn at_level(&self, b: u32) -> Result<Self> {
        if b == self.a {
            return Ok(*self);
        }
        if b == 0 {
            if !self.is_trivial() {
                return Err(Error::Imprimitive { l: self.l, a: 0, conductor: self.conductor() });
            }
            return Ok(Self::trivial(self.l));
        }
        if self.a == 0 {
            return Self::new(self.l, b, 0);
        }
        let c = self.conductor();
        if b < c {
            return Err(Error::Imprimitive { l: self.l, a: b, conductor: c });
        }
        let target = DlogTable::get(self.l, b)?;
        let phi_b = target.phi as u128;
        // μ(g_b) where g_b is the generator mod l^b lifted to mod l^a (or reduced).
        let own = DlogTable::get(self.l, self.a)?;
        // μ(g_b), with g_b read mod l^a; exact because b >= a(μ).
        let d = own.log(target.gen as i128).expect("generator is a unit") as u128;
        let num = d * self.log_image as u128 % self.phi() as u128;
        let val = num * phi_b / self.phi() as u128;
        Ok(MultiplicativeCharacter { l: self.l, a: b, gen: target.gen, log_image: (val % phi_b) as u64 })
    }

    /// Restriction to the conductor.
    pub fn primitive(&self) -> Self {
        self.at_level(self.conductor()).expect("conductor level is valid")
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.l != o.l {
            return Err(Error::PrimeMismatch(self.l, o.l));
        }
        let b = self.a.max(o.a);
        let x = self.at_level(b)?;
        let y = o.at_level(b)?;
        let phi = phi_pow(self.l, b);
        Ok(MultiplicativeCharacter { log_image: (x.log_image + y.log_image) % phi.max(1), ..x })
    }

    /// Equality as functions (ignores the modulus used to present them).
    pub fn same_as(&self, o: &Self) -> bool {
        self.l == o.l && self.primitive() == o.primitive()
    }
}

/// All characters mod l^a (the set ₗ𝔛ₐ), trivial first.
pub fn characters_mod(l: u64, a: u32) -> Result<Vec<MultiplicativeCharacter>> {
    if a == 0 {
        check_odd_prime(l)?;
        return Ok(vec![MultiplicativeCharacter::trivial(l)]);
    }
    let t = DlogTable::get(l, a)?;
    Ok((0..t.phi).map(|j| MultiplicativeCharacter { l, a, gen: t.gen, log_image: j }).collect())
}

/// Primitive characters mod l^a (the set ₗ𝔛ₐ′).
pub fn primitive_characters(l: u64, a: u32) -> Result<Vec<MultiplicativeCharacter>> {
    Ok(characters_mod(l, a)?.into_iter().filter(|m| m.conductor() == a).collect())
}

/// Product of characters at several primes; absent primes act trivially.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CharacterTuple {
    pub entries: BTreeMap<u64, MultiplicativeCharacter>,
}

impl CharacterTuple {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, mu: MultiplicativeCharacter) -> Self {
        self.entries.insert(mu.l, mu);
        self
    }

    pub fn get(&self, p: u64) -> MultiplicativeCharacter {
        self.entries.get(&p).copied().unwrap_or_else(|| MultiplicativeCharacter::trivial(p))
    }

    pub fn eval(&self, num: i128, den: i128) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for mu in self.entries.values() {
            acc *= mu.eval(num, den)?;
        }
        Ok(acc)
    }
}

/// A place of Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Place {
    Infinite,
    Finite(u64),
}

/// `{num/den}_p` as `(r, k)` meaning r/p^k with 0 <= r < p^k.
pub fn padic_fractional_part(num: i128, den: i128, p: u64) -> (i128, u32) {
    assert!(den != 0, "zero denominator");
    let (k, d) = split_p(den, p);
    if k == 0 {
        return (0, 0);
    }
    let m = (p as i128).pow(k);
    let (vn, un) = split_p(num, p);
    if num == 0 || vn >= k {
        return (0, 0);
    }
    let r = (p as i128).pow(vn) * un % m * inv_mod(d, m).expect("unit") % m;
    (r.rem_euclid(m), k)
}

/// ψ_∞(x) = e(x), ψ_p(x) = e(−{x}_p).
pub fn additive_char(place: Place, num: i128, den: i128) -> Complex64 {
    match place {
        Place::Infinite => e_frac(num, den),
        Place::Finite(p) => {
            let (r, k) = padic_fractional_part(num, den, p);
            if k == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                e_frac(-r, (p as i128).pow(k))
            }
        }
    }
}

/// ψ_p(x/p^k) for an integer x.
pub fn psi_p(p: u64, x: i128, k: u32) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    e_frac(-x, (p as i128).pow(k))
}

/// ε(1/2, μ) = l^{−a/2} Σ_x μ(x) ψ_l(x/l^a) for primitive μ.
pub fn epsilon_factor(mu: &MultiplicativeCharacter) -> Result<Complex64> {
    let c = mu.conductor();
    if c == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if c != mu.a {
        return Err(Error::Imprimitive { l: mu.l, a: mu.a, conductor: c });
    }
    let t = DlogTable::get(mu.l, mu.a)?;
    let m = t.modulus as i128;
    let phi = t.phi as i128;
    let mut x = 1i128;
    let mut s = Complex64::new(0.0, 0.0);
    for j in 0..phi {
        s += e_frac(j * mu.log_image as i128 % phi, phi) * e_frac(-x, m);
        x = x * t.gen as i128 % m;
    }
    Ok(s / (m as f64).sqrt())
}

/// ε(s, μ) = l^{(1/2 − s) a(μ)} ε(1/2, μ).
pub fn epsilon_at_s(mu: &MultiplicativeCharacter, s: Complex64) -> Result<Complex64> {
    let e0 = epsilon_factor(mu)?;
    let a = mu.conductor() as f64;
    let l = mu.l as f64;
    Ok(e0 * (Complex64::new(0.5, 0.0) - s).scale(a * l.ln()).exp())
}

/// α_μ with μ(1 + l^κ x) = ψ_l(α_μ log_l(1 + l^κ x)/l^n), known mod l^{n−κ}.
pub fn alpha_of_char(mu: &MultiplicativeCharacter, kappa: u32) -> Result<PadicNumber> {
    if mu.is_trivial() {
        return Err(Error::TrivialCharacter);
    }
    let mu = mu.primitive();
    let (l, n) = (mu.l, mu.a);
    if kappa < 1 || kappa >= n {
        return Err(Error::KappaOutOfRange { kappa, max: n.saturating_sub(1) });
    }
    let t = DlogTable::get(l, n)?;
    let u = 1 + l.pow(kappa) as i128;
    let d = t.log(u).expect("principal unit") as u128;
    let phi = t.phi as u128;
    let q = ipow(l, n - kappa);
    // μ(u) = e(s/l^{n−κ}).
    let s = (d * mu.log_image as u128 % phi) * q / phi % q;
    // log u = l^κ w.
    let zn = Zmod::new(l, n + 2)?;
    let lg = zn.log(u as u128)?;
    let w = lg / ipow(l, kappa);
    let zq = Zmod::new(l, n - kappa)?;
    let alpha = zq.mul(zq.neg(s % q), zq.inv(w % q)?);
    PadicNumber::from_parts(l, 0, alpha, n - kappa)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn quadratic_mod_5() {
        let q = MultiplicativeCharacter::quadratic(5).unwrap();
        assert!(close(q.eval(2, 1).unwrap(), Complex64::new(-1.0, 0.0), 1e-15));
        assert!(close(q.eval(4, 1).unwrap(), Complex64::new(1.0, 0.0), 1e-15));
        assert!(close(q.eval(10, 1).unwrap(), Complex64::new(-1.0, 0.0), 1e-15));
    }

    #[test]
    fn homomorphism_mod_125() {
        for mu in characters_mod(5, 3).unwrap().iter().step_by(7) {
            for x in (1..125).filter(|x| x % 5 != 0) {
                for y in (1..125).filter(|y| y % 5 != 0).step_by(3) {
                    let lhs = mu.eval_root(x * y).unwrap();
                    let rhs = mu.eval_root(x).unwrap().mul(&mu.eval_root(y).unwrap());
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn conductor_matches_kernel() {
        for l in [3u64, 5, 7] {
            for a in 1..=3 {
                let m = l.pow(a) as i128;
                for mu in characters_mod(l, a).unwrap() {
                    let c = (0..=a)
                        .find(|&k| {
                            let step = l.pow(k) as i128;
                            (0..m / step)
                                .map(|x| 1 + step * x)
                                .filter(|u| u % l as i128 != 0)
                                .all(|u| mu.eval_root(u).unwrap().is_one())
                        })
                        .unwrap();
                    assert_eq!(mu.conductor(), c);
                }
            }
        }
    }

    #[test]
    fn level_change_preserves_values() {
        for mu in characters_mod(7, 3).unwrap() {
            let c = mu.conductor();
            let nu = mu.primitive();
            assert_eq!(nu.a, c);
            for x in (1..343).filter(|x| x % 7 != 0) {
                assert!(close(mu.dirichlet(x), nu.dirichlet(x), 1e-12));
            }
        }
    }

    #[test]
    fn psi_trivial_on_integers() {
        for z in [3, 7, 10] {
            assert!(close(additive_char(Place::Finite(7), z, 1), Complex64::new(1.0, 0.0), 1e-15));
        }
        let v = additive_char(Place::Finite(5), 2, 5) * additive_char(Place::Infinite, 2, 5);
        assert!(close(v, Complex64::new(1.0, 0.0), 1e-14));
    }

    #[test]
    fn product_formula() {
        for (num, den) in [(7i128, 45i128), (-11, 3 * 25 * 49), (1, 105), (22, 27)] {
            let mut acc = additive_char(Place::Infinite, num, den);
            for p in [3, 5, 7] {
                acc *= additive_char(Place::Finite(p), num, den);
            }
            assert!(close(acc, Complex64::new(1.0, 0.0), 1e-12));
        }
    }

    #[test]
    fn gauss_sums() {
        for (l, a) in [(5u64, 2u32), (7, 2), (3, 3)] {
            for mu in primitive_characters(l, a).unwrap() {
                let e1 = epsilon_factor(&mu).unwrap();
                assert!((e1.norm() - 1.0).abs() < 1e-10);
                let e2 = epsilon_factor(&mu.conj()).unwrap();
                assert!(close(e1 * e2, mu.dirichlet(-1), 1e-10));
            }
        }
        let mu = characters_mod(5, 2).unwrap()[5];
        assert!(matches!(epsilon_factor(&mu), Err(Error::Imprimitive { .. })));
        let triv = MultiplicativeCharacter::trivial(5);
        assert!(close(epsilon_factor(&triv).unwrap(), Complex64::new(1.0, 0.0), 1e-15));
    }

    #[test]
    fn epsilon_rescaling() {
        let mu = primitive_characters(5, 2).unwrap()[3];
        let e0 = epsilon_factor(&mu).unwrap();
        assert!(close(epsilon_at_s(&mu, Complex64::new(0.0, 0.0)).unwrap(), e0 * 5.0, 1e-12));
        assert!(close(epsilon_at_s(&mu, Complex64::new(0.5, 0.0)).unwrap(), e0, 1e-14));
    }

    #[test]
    fn alpha_identity_exhaustive() {
        let (l, n, kappa) = (5u64, 4u32, 1u32);
        let zl = Zmod::new(l, 24).unwrap();
        for mu in primitive_characters(l, n).unwrap().into_iter().step_by(17) {
            let alpha = alpha_of_char(&mu, kappa).unwrap();
            let q = ipow(l, n - kappa) as i128;
            for x in 0..q {
                let u = 1 + 5 * x;
                let lg = zl.log(u as u128).unwrap();
                let arg = zl.mul(alpha.unit, lg) % ipow(l, n);
                let rhs = psi_p(l, arg as i128, n);
                assert!(close(mu.dirichlet(u), rhs, 1e-10));
            }
            let ab = alpha_of_char(&mu.conj(), kappa).unwrap();
            assert_eq!((ab.unit + alpha.unit) % q as u128, 0);
        }
    }

    #[test]
    fn alpha_truncated_form() {
        let (l, n, kappa) = (7u64, 4u32, 2u32);
        let mu = primitive_characters(l, n).unwrap()[10];
        let alpha = alpha_of_char(&mu, kappa).unwrap();
        for x in 0..49i128 {
            let u = 1 + 49 * x;
            let rhs = psi_p(l, alpha.unit as i128 * x, n - kappa);
            assert!(close(mu.dirichlet(u), rhs, 1e-10));
        }
        assert_eq!(alpha_of_char(&MultiplicativeCharacter::trivial(7), 1), Err(Error::TrivialCharacter));
    }
}
