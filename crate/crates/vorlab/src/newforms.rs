//! Exact q-expansions of the test newforms and their Hecke data.

use crate::characters::{MultiplicativeCharacter, RootOfUnity};
use crate::localdata::{LocalRepresentation, QuasiCharacter};
use crate::padic::{gcd, is_prime, split_p};
use crate::{Complex64, Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Product of η(dz)^{r_d}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaQuotientSpec {
    pub factors: Vec<(u64, i32)>,
}

impl EtaQuotientSpec {
    pub fn new(factors: Vec<(u64, i32)>) -> Result<Self> {
        let s = EtaQuotientSpec { factors };
        s.q_shift()?;
        Ok(s)
    }

    /// Twice the weight, i.e. Σ r_d.
    pub fn weight_times_two(&self) -> i32 {
        self.factors.iter().map(|f| f.1).sum()
    }

    pub fn weight(&self) -> f64 {
        self.weight_times_two() as f64 / 2.0
    }

    /// Order of vanishing at ∞, Σ d r_d / 24.
    pub fn q_shift(&self) -> Result<usize> {
        let s: i64 = self.factors.iter().map(|&(d, r)| d as i64 * r as i64).sum();
        if s % 24 != 0 || s < 0 {
            return Err(Error::InvalidEta(format!("Σ d·r_d = {s} is not a nonnegative multiple of 24")));
        }
        if self.factors.iter().any(|f| f.0 == 0) {
            return Err(Error::InvalidEta("scale 0".into()));
        }
        Ok((s / 24) as usize)
    }

    /// Smallest N with d | N for all d and N·Σ r_d/d ≡ 0 mod 24.
    pub fn level(&self) -> u64 {
        let l = self.factors.iter().fold(1u64, |acc, &(d, _)| acc / gcd(acc as i128, d as i128) as u64 * d);
        (1..=24u64)
            .map(|t| t * l)
            .find(|&n| {
                let s: i64 = self.factors.iter().map(|&(d, r)| (n / d) as i64 * r as i64).sum();
                s % 24 == 0
            })
            .unwrap_or(24 * l)
    }
}

/// Nonzero terms of Π(1−q^n) up to q^n_max.
fn pentagonal(n_max: usize) -> Vec<(usize, i128)> {
    let mut out = vec![(0, 1)];
    for k in 1.. {
        let a = k * (3 * k - 1) / 2;
        if a > n_max {
            break;
        }
        let s = if k % 2 == 0 { 1 } else { -1 };
        out.push((a, s));
        let b = k * (3 * k + 1) / 2;
        if b <= n_max {
            out.push((b, s));
        }
    }
    out
}

/// Nonzero terms of Π(1−q^n)³ = Σ (−1)^k (2k+1) q^{k(k+1)/2}.
fn jacobi_cube(n_max: usize) -> Vec<(usize, i128)> {
    (0..)
        .map(|k: usize| (k * (k + 1) / 2, k))
        .take_while(|&(e, _)| e <= n_max)
        .map(|(e, k)| (e, if k % 2 == 0 { 1 } else { -1 } * (2 * k as i128 + 1)))
        .collect()
}

fn mul_sparse(dense: &[i128], sparse: &[(usize, i128)], stride: usize) -> Result<Vec<i128>> {
    let n = dense.len();
    let mut out = vec![0i128; n];
    for &(e, c) in sparse {
        let shift = e * stride;
        if shift >= n {
            break;
        }
        for i in 0..n - shift {
            let d = dense[i];
            if d == 0 {
                continue;
            }
            let t = d.checked_mul(c).ok_or(Error::Overflow(i + shift))?;
            out[i + shift] = out[i + shift].checked_add(t).ok_or(Error::Overflow(i + shift))?;
        }
    }
    Ok(out)
}

/// Inverse of a series with constant term 1, exact.
fn invert(f: &[i128]) -> Result<Vec<i128>> {
    let n = f.len();
    let mut g = vec![0i128; n];
    g[0] = 1;
    let nz: Vec<(usize, i128)> = f.iter().enumerate().skip(1).filter(|x| *x.1 != 0).map(|(i, &c)| (i, c)).collect();
    for i in 1..n {
        let mut s = 0i128;
        for &(j, c) in &nz {
            if j > i {
                break;
            }
            s = s.checked_sub(c.checked_mul(g[i - j]).ok_or(Error::Overflow(i))?).ok_or(Error::Overflow(i))?;
        }
        g[i] = s;
    }
    Ok(g)
}

/// Coefficients a(0..=n_max) of the eta quotient.
pub fn expand_eta_coefficients(spec: &EtaQuotientSpec, n_max: usize) -> Result<Vec<i128>> {
    let shift = spec.q_shift()?;
    let len = n_max + 1;
    if shift > n_max {
        return Ok(vec![0; len]);
    }
    let body = len - shift;
    let mut acc = vec![0i128; body];
    acc[0] = 1;
    for &(d, r) in &spec.factors {
        let d = d as usize;
        let (cube, single) = (r.unsigned_abs() / 3, r.unsigned_abs() % 3);
        let jac = jacobi_cube(body / d + 1);
        let pent = pentagonal(body / d + 1);
        if r > 0 {
            for _ in 0..cube {
                acc = mul_sparse(&acc, &jac, d)?;
            }
            for _ in 0..single {
                acc = mul_sparse(&acc, &pent, d)?;
            }
        } else if r < 0 {
            let mut base = vec![0i128; body];
            base[0] = 1;
            for _ in 0..cube {
                base = mul_sparse(&base, &jac, d)?;
            }
            for _ in 0..single {
                base = mul_sparse(&base, &pent, d)?;
            }
            let inv = invert(&base)?;
            acc = mul_dense(&acc, &inv)?;
        }
    }
    let mut out = vec![0i128; shift];
    out.extend(acc);
    Ok(out)
}

fn mul_dense(a: &[i128], b: &[i128]) -> Result<Vec<i128>> {
    let nz: Vec<(usize, i128)> = b.iter().enumerate().filter(|x| *x.1 != 0).map(|(i, &c)| (i, c)).collect();
    mul_sparse(a, &nz, 1)
}

/// Exact value of a twisted coefficient: integer times a root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExactCoefficient {
    pub integer: i128,
    pub root: RootOfUnity,
}

impl ExactCoefficient {
    pub fn to_complex(&self) -> Complex64 {
        self.root.to_complex() * self.integer as f64
    }

    /// Some(n) when the value lies in Z.
    pub fn as_integer(&self) -> Option<i128> {
        if self.integer == 0 || self.root.is_one() {
            return Some(self.integer);
        }
        let r = self.root;
        if 2 * r.exponent == r.order {
            return Some(-self.integer);
        }
        None
    }
}

/// q-expansion of a newform, possibly twisted by a character mod a prime.
#[derive(Clone, Debug, Serialize)]
pub struct QExpansion {
    pub label: String,
    pub weight: u32,
    pub level: u64,
    #[serde(skip)]
    base: Arc<Vec<i128>>,
    pub twist: Option<MultiplicativeCharacter>,
    /// Nebentypus; None means trivial.
    pub nebentypus: Option<MultiplicativeCharacter>,
}

impl QExpansion {
    pub fn from_eta(label: &str, spec: &EtaQuotientSpec, n_max: usize) -> Result<Self> {
        let k2 = spec.weight_times_two();
        if k2 <= 0 || k2 % 2 != 0 {
            return Err(Error::InvalidEta(format!("weight {}/2 is not a positive integer", k2)));
        }
        let base = expand_eta_coefficients(spec, n_max)?;
        if base.get(1) != Some(&1) {
            return Err(Error::InvalidEta("a(1) ≠ 1".into()));
        }
        Ok(QExpansion {
            label: label.into(),
            weight: (k2 / 2) as u32,
            level: spec.level(),
            base: Arc::new(base),
            twist: None,
            nebentypus: None,
        })
    }

    pub fn n_max(&self) -> usize {
        self.base.len() - 1
    }

    pub fn coefficient(&self, n: u64) -> Result<ExactCoefficient> {
        if n == 0 || n as usize > self.n_max() {
            return Err(Error::OutOfRange { n, max: self.n_max() as u64 });
        }
        let integer = self.base[n as usize];
        let root = match &self.twist {
            None => RootOfUnity::one(),
            Some(chi) => match chi.eval_root(n as i128) {
                Ok(r) => r,
                Err(_) => return Ok(ExactCoefficient { integer: 0, root: RootOfUnity::one() }),
            },
        };
        Ok(ExactCoefficient { integer, root })
    }

    /// Integer coefficient; errors if the twist makes it non-rational.
    pub fn integer_coefficient(&self, n: u64) -> Result<i128> {
        self.coefficient(n)?
            .as_integer()
            .ok_or_else(|| Error::Unsupported(format!("a({n}) is not rational")))
    }

    /// λ(n) = a(n)/n^{(k−1)/2}.
    pub fn normalized_lambda(&self, n: u64) -> Result<Complex64> {
        let a = self.coefficient(n)?.to_complex();
        Ok(a / (n as f64).powf((self.weight as f64 - 1.0) / 2.0))
    }

    /// ω(p) for p ∤ N.
    pub fn omega(&self, p: u64) -> Complex64 {
        match &self.nebentypus {
            None => Complex64::new(1.0, 0.0),
            Some(c) => c.dirichlet(p as i128),
        }
    }

    /// f ⊗ χ for χ primitive mod a power of p with p ∤ N.
    pub fn twist(&self, chi: &MultiplicativeCharacter) -> Result<Self> {
        if chi.is_trivial() {
            return Ok(self.clone());
        }
        let p = chi.l;
        if self.level % p == 0 {
            return Err(Error::LevelNotCoprime { level: self.level, p });
        }
        if self.twist.is_some() {
            return Err(Error::Unsupported("iterated twists".into()));
        }
        let q = crate::padic::ipow(p, chi.conductor()) as u64;
        let neb = if chi.mul(chi)?.is_trivial() { None } else { Some(chi.mul(chi)?) };
        if self.nebentypus.is_some() {
            return Err(Error::Unsupported("twist of a form with nebentypus".into()));
        }
        Ok(QExpansion {
            label: format!("{}_x{}", self.label, q),
            level: self.level * q * q,
            twist: Some(chi.primitive()),
            nebentypus: neb,
            ..self.clone()
        })
    }

    /// Local component at p as used by the Voronoi assembly.
    pub fn local_representation(&self, p: u64) -> Result<LocalRepresentation> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let (v, _) = split_p(self.level as i128, p);
        let untwisted_level = match &self.twist {
            Some(chi) if chi.l == p => {
                let base = QExpansion { twist: None, nebentypus: None, level: self.level / crate::padic::ipow(p, 2 * chi.conductor()) as u64, ..self.clone() };
                let pi = base.local_representation(p)?;
                // the idelic character attached to χ restricts to χ̄ on Z_p^×
                return pi.twist(&QuasiCharacter::new(chi.conj(), Complex64::new(1.0, 0.0)));
            }
            _ => v,
        };
        match untwisted_level {
            0 => {
                let lam = self.normalized_lambda(p)?;
                LocalRepresentation::unramified_from_hecke(p, lam, self.omega(p))
            }
            1 if self.nebentypus.is_none() => {
                // λ(p) = ξ p^{−1/2} for ξ St with ξ unramified, ξ(ϖ) = ±1
                let lam = self.normalized_lambda(p)?;
                let xi = lam * (p as f64).sqrt();
                LocalRepresentation::steinberg(QuasiCharacter::unramified(p, Complex64::new(xi.re.signum(), 0.0)))
            }
            _ => Err(Error::Unsupported(format!("local type of {} at {p}", self.label))),
        }
    }
}

/// Fixed test catalog.
pub fn catalog(name: &str, n_max: usize) -> Result<QExpansion> {
    match name {
        "delta" => QExpansion::from_eta("delta", &EtaQuotientSpec::new(vec![(1, 24)])?, n_max),
        "f11" => QExpansion::from_eta("f11", &EtaQuotientSpec::new(vec![(1, 2), (11, 2)])?, n_max),
        "delta_x3" => catalog("delta", n_max)?.twist(&MultiplicativeCharacter::quadratic(3)?),
        "delta_x5" => catalog("delta", n_max)?.twist(&MultiplicativeCharacter::quadratic(5)?),
        _ => Err(Error::Invalid(format!("unknown form {name}; known: delta, f11, delta_x3, delta_x5"))),
    }
}

pub const CATALOG: [&str; 4] = ["delta", "f11", "delta_x3", "delta_x5"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_coefficients() {
        let d = catalog("delta", 30).unwrap();
        let want = [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920];
        for (i, &w) in want.iter().enumerate() {
            assert_eq!(d.integer_coefficient(i as u64 + 1).unwrap(), w);
        }
        assert_eq!(d.level, 1);
        assert_eq!(d.weight, 12);
    }

    #[test]
    fn f11_coefficients() {
        let f = catalog("f11", 20).unwrap();
        let want = [1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2, 4];
        for (i, &w) in want.iter().enumerate() {
            assert_eq!(f.integer_coefficient(i as u64 + 1).unwrap(), w);
        }
        assert_eq!(f.level, 11);
        assert_eq!(f.weight, 2);
    }

    #[test]
    fn eta_quotient_inverse_factor() {
        // η(2z)^16/η(z)^8 has q-shift 1 and weight 4
        let s = EtaQuotientSpec::new(vec![(1, -8), (2, 16)]).unwrap();
        let c = expand_eta_coefficients(&s, 6).unwrap();
        // q Π (1+q^n)^8 (1−q^{2n})^8: a(2)=8
        assert_eq!(c[1], 1);
        assert_eq!(c[2], 8);
        assert!(EtaQuotientSpec::new(vec![(1, 1)]).is_err());
    }

    #[test]
    fn multiplicativity_exact() {
        for name in ["delta", "f11"] {
            let f = catalog(name, 40_000).unwrap();
            for m in 1..=200u64 {
                for n in 1..=200u64 {
                    if gcd(m as i128, n as i128) == 1 {
                        let a = f.integer_coefficient(m * n).unwrap();
                        let b = f.integer_coefficient(m).unwrap() * f.integer_coefficient(n).unwrap();
                        assert_eq!(a, b, "{name} {m} {n}");
                    }
                }
            }
        }
    }

    #[test]
    fn hecke_recursion_exact() {
        for name in ["delta", "f11"] {
            let f = catalog(name, 100_000).unwrap();
            for p in [2u64, 3, 5, 7, 13] {
                let pk = (p as i128).pow(f.weight - 1);
                for j in 1..=5u32 {
                    if p.pow(j + 1) > f.n_max() as u64 {
                        break;
                    }
                    let lhs = f.integer_coefficient(p.pow(j + 1)).unwrap();
                    let rhs = f.integer_coefficient(p).unwrap() * f.integer_coefficient(p.pow(j)).unwrap()
                        - pk * f.integer_coefficient(p.pow(j - 1)).unwrap();
                    assert_eq!(lhs, rhs, "{name} p={p} j={j}");
                }
            }
        }
    }

    #[test]
    fn level_11_bad_prime() {
        let f = catalog("f11", 2000).unwrap();
        assert_eq!(f.integer_coefficient(11).unwrap(), 1);
        for n in 1..=150u64 {
            assert_eq!(f.integer_coefficient(11 * n).unwrap(), f.integer_coefficient(n).unwrap());
        }
        let lam = f.normalized_lambda(11).unwrap();
        assert!((lam.re - 1.0 / 11f64.sqrt()).abs() < 1e-15);
        let pi = f.local_representation(11).unwrap();
        assert_eq!(pi.conductor(), 1);
        assert!((pi.epsilon().unwrap() + 1.0).norm() < 1e-12);
    }

    #[test]
    fn lambda_properties() {
        let d = catalog("delta", 10_000).unwrap();
        assert!((d.normalized_lambda(1).unwrap().re - 1.0).abs() < 1e-15);
        for p in (2..=100u64).filter(|&p| is_prime(p)) {
            assert!(d.normalized_lambda(p).unwrap().norm() <= 2.0);
        }
        let l2 = d.normalized_lambda(2).unwrap();
        assert!((d.normalized_lambda(4).unwrap() - (l2 * l2 - 1.0)).norm() < 1e-13);
        assert!(d.normalized_lambda(10_001).is_err());
    }

    #[test]
    fn quadratic_twist_mod_3() {
        let d = catalog("delta", 100).unwrap();
        let t = catalog("delta_x3", 100).unwrap();
        assert_eq!(t.level, 9);
        for n in 1..=100u64 {
            let chi = match n % 3 {
                0 => 0,
                1 => 1,
                _ => -1,
            };
            assert_eq!(t.integer_coefficient(n).unwrap(), d.integer_coefficient(n).unwrap() * chi);
        }
        let pi = t.local_representation(3).unwrap();
        assert_eq!(pi.conductor(), 2);
        assert_eq!(d.twist(&MultiplicativeCharacter::trivial(7)).unwrap().integer_coefficient(7).unwrap(), -16744);
        let f = catalog("f11", 10).unwrap();
        assert!(f.twist(&MultiplicativeCharacter::quadratic(11).unwrap()).is_err());
    }

    #[test]
    fn general_twist_is_exact_root_times_integer() {
        let d = catalog("delta", 50).unwrap();
        let chi = MultiplicativeCharacter::new(5, 1, 1).unwrap();
        let t = d.twist(&chi).unwrap();
        assert_eq!(t.level, 25);
        assert!(t.nebentypus.is_some());
        let c = t.coefficient(2).unwrap();
        assert_eq!(c.integer, -24);
        assert!((c.to_complex() - chi.dirichlet(2) * -24.0).norm() < 1e-12);
    }
}
