//! Local representations of GL(2, Q_p): L- and ε-factors, Hecke eigenvalues,
//! the c-constant tables of the Whittaker new-vector, and the p-adic Hankel
//! transform at the special prime.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::characters::{characters_mod, epsilon_factor, psi_p, MultiplicativeCharacter};
use crate::mellin::{b_function, mellin, UnitBruhatFunction};
use crate::padic::{check_odd_prime, inv_mod, split_p, PadicNumber, Valuation};
use crate::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// ζ_p(s) = (1 − p^{−s})^{−1}.
pub fn zeta_p(p: u64, s: f64) -> f64 {
    1.0 / (1.0 - (p as f64).powf(-s))
}

/// Complete homogeneous symmetric polynomial h_m of the given roots.
pub fn complete_homogeneous(roots: &[Complex64], m: i64) -> Complex64 {
    if m < 0 {
        return ZERO;
    }
    // h over the first i roots, updated root by root.
    let mut h = vec![ZERO; m as usize + 1];
    h[0] = ONE;
    for r in roots {
        for k in 1..=m as usize {
            let prev = h[k - 1];
            h[k] += r * prev;
        }
    }
    h[m as usize]
}

/// A quasi-character χ of Q_p^×: χ(p^k u) = at_p^k · unit(u).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiCharacter {
    pub unit: MultiplicativeCharacter,
    pub at_p: Complex64,
}

impl QuasiCharacter {
    pub fn new(unit: MultiplicativeCharacter, at_p: Complex64) -> Self {
        QuasiCharacter { unit: unit.primitive(), at_p }
    }

    pub fn unramified(p: u64, at_p: Complex64) -> Self {
        QuasiCharacter { unit: MultiplicativeCharacter::trivial(p), at_p }
    }

    pub fn trivial(p: u64) -> Self {
        Self::unramified(p, ONE)
    }

    pub fn p(&self) -> u64 {
        self.unit.l
    }

    pub fn conductor(&self) -> u32 {
        self.unit.conductor()
    }

    pub fn is_unramified(&self) -> bool {
        self.unit.is_trivial()
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        Ok(Self::new(self.unit.mul(&o.unit)?, self.at_p * o.at_p))
    }

    pub fn inv(&self) -> Self {
        Self::new(self.unit.conj(), 1.0 / self.at_p)
    }

    pub fn same_unit(&self, mu: &MultiplicativeCharacter) -> bool {
        self.unit.same_as(mu)
    }

    /// χ(num/den).
    pub fn eval(&self, num: i128, den: i128) -> Result<Complex64> {
        let (vn, _) = split_p(num, self.p());
        let (vd, _) = split_p(den, self.p());
        let k = vn as i32 - vd as i32;
        Ok(self.at_p.powi(k) * self.unit.eval(num, den)?)
    }

    /// ε(1/2, χ) = χ(ϖ)^{a(χ)} ε(1/2, χ|units).
    pub fn epsilon(&self) -> Result<Complex64> {
        let a = self.conductor();
        Ok(self.at_p.powi(a as i32) * epsilon_factor(&self.unit)?)
    }
}

/// User-supplied ε data for a supercuspidal π₀: for each twist ν, the pair
/// (ε(1/2, νπ₀), a(νπ₀)).
#[derive(Debug, Clone, Serialize)]
pub struct EpsilonOracle {
    pub p: u64,
    pub conductor: u32,
    pub central: QuasiCharacter,
    #[serde(skip)]
    entries: HashMap<MultiplicativeCharacter, (Complex64, u32)>,
}

impl EpsilonOracle {
    pub fn new(p: u64, conductor: u32, central: QuasiCharacter) -> Self {
        EpsilonOracle { p, conductor, central, entries: HashMap::new() }
    }

    pub fn insert(&mut self, nu: MultiplicativeCharacter, eps: Complex64, conductor: u32) -> Result<()> {
        if (eps.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::Invalid(format!("oracle ε has modulus {}", eps.norm())));
        }
        self.entries.insert(nu.primitive(), (eps, conductor));
        Ok(())
    }

    pub fn get(&self, nu: &MultiplicativeCharacter) -> Result<(Complex64, u32)> {
        self.entries
            .get(&nu.primitive())
            .copied()
            .ok_or_else(|| Error::MissingEpsilon(format!("p={} twist index {} mod p^{}", self.p, nu.log_image, nu.a)))
    }

    /// Random unit ε values for all twists of conductor ≤ `max_twist`, with
    /// a(νπ₀) = max(a(π₀), 2a(ν)). Trivial central character.
    pub fn synthetic(p: u64, conductor: u32, max_twist: u32, seed: u64) -> Result<Self> {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut o = Self::new(p, conductor, QuasiCharacter::trivial(p));
        for nu in characters_mod(p, max_twist)? {
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let a = conductor.max(2 * nu.conductor());
            o.insert(nu, Complex64::from_polar(1.0, th), a)?;
        }
        Ok(o)
    }
}

/// π = χ ⊗ π₀ for a supercuspidal π₀ described by an oracle.
#[derive(Debug, Clone, Serialize)]
pub struct Supercuspidal {
    pub oracle: Arc<EpsilonOracle>,
    pub shift: QuasiCharacter,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// χ₁ ⊞ χ₂.
    PrincipalSeries { chi1: QuasiCharacter, chi2: QuasiCharacter },
    /// χ St.
    Steinberg { chi: QuasiCharacter },
    Supercuspidal(Supercuspidal),
}

/// Finer classification used by the tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Unramified,
    /// Both ramified, different restrictions to the units.
    PsDistinct,
    /// Same restriction to the units.
    PsEqual,
    /// a(χ₁) > a(χ₂) = 0.
    PsSplit,
    SteinbergUnramified,
    SteinbergRamified,
    Supercuspidal,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalRepresentation {
    pub p: u64,
    pub family: Family,
    /// Allows |χ_i(ϖ)| ≠ 1 (p-adic complementary series).
    pub complementary: bool,
}

impl LocalRepresentation {
    pub fn principal_series(chi1: QuasiCharacter, chi2: QuasiCharacter) -> Result<Self> {
        Self::ps_inner(chi1, chi2, false)
    }

    pub fn complementary_series(chi1: QuasiCharacter, chi2: QuasiCharacter) -> Result<Self> {
        Self::ps_inner(chi1, chi2, true)
    }

    fn ps_inner(chi1: QuasiCharacter, chi2: QuasiCharacter, complementary: bool) -> Result<Self> {
        let p = chi1.p();
        check_odd_prime(p)?;
        if chi2.p() != p {
            return Err(Error::PrimeMismatch(p, chi2.p()));
        }
        if !complementary {
            for c in [chi1, chi2] {
                if (c.at_p.norm() - 1.0).abs() > 1e-10 {
                    return Err(Error::Invalid("non-unitary χ(ϖ) needs the complementary flag".into()));
                }
            }
        }
        // Keep the ramified character first.
        let (chi1, chi2) = if chi1.conductor() < chi2.conductor() { (chi2, chi1) } else { (chi1, chi2) };
        Ok(LocalRepresentation { p, family: Family::PrincipalSeries { chi1, chi2 }, complementary })
    }

    /// Unramified π with Satake parameters α₁, α₂.
    pub fn unramified(p: u64, a1: Complex64, a2: Complex64) -> Result<Self> {
        let c = (a1.norm() - 1.0).abs() > 1e-10 || (a2.norm() - 1.0).abs() > 1e-10;
        Self::ps_inner(QuasiCharacter::unramified(p, a1), QuasiCharacter::unramified(p, a2), c)
    }

    /// Unramified π from λ(p) and ω(ϖ): roots of X² − λX + ω.
    pub fn unramified_from_hecke(p: u64, lambda_p: Complex64, omega: Complex64) -> Result<Self> {
        let disc = (lambda_p * lambda_p - 4.0 * omega).sqrt();
        Self::unramified(p, (lambda_p + disc) / 2.0, (lambda_p - disc) / 2.0)
    }

    pub fn steinberg(chi: QuasiCharacter) -> Result<Self> {
        check_odd_prime(chi.p())?;
        Ok(LocalRepresentation { p: chi.p(), family: Family::Steinberg { chi }, complementary: false })
    }

    pub fn supercuspidal(oracle: EpsilonOracle) -> Result<Self> {
        check_odd_prime(oracle.p)?;
        let p = oracle.p;
        oracle.get(&MultiplicativeCharacter::trivial(p))?;
        Ok(LocalRepresentation {
            p,
            family: Family::Supercuspidal(Supercuspidal { oracle: Arc::new(oracle), shift: QuasiCharacter::trivial(p) }),
            complementary: false,
        })
    }

    pub fn kind(&self) -> Kind {
        match &self.family {
            Family::PrincipalSeries { chi1, chi2 } => {
                match (chi1.is_unramified(), chi2.is_unramified()) {
                    (true, true) => Kind::Unramified,
                    (false, true) | (true, false) => Kind::PsSplit,
                    _ if chi1.unit.same_as(&chi2.unit) => Kind::PsEqual,
                    _ => Kind::PsDistinct,
                }
            }
            Family::Steinberg { chi } if chi.is_unramified() => Kind::SteinbergUnramified,
            Family::Steinberg { .. } => Kind::SteinbergRamified,
            Family::Supercuspidal(_) => Kind::Supercuspidal,
        }
    }

    /// a(π).
    pub fn conductor(&self) -> u32 {
        match &self.family {
            Family::PrincipalSeries { chi1, chi2 } => chi1.conductor() + chi2.conductor(),
            Family::Steinberg { chi } => 1.max(2 * chi.conductor()),
            Family::Supercuspidal(s) => s.oracle.get(&s.shift.unit).map(|e| e.1).unwrap_or(s.oracle.conductor),
        }
    }

    /// ω_π as a quasi-character.
    pub fn central(&self) -> QuasiCharacter {
        match &self.family {
            Family::PrincipalSeries { chi1, chi2 } => chi1.mul(chi2).expect("same prime"),
            Family::Steinberg { chi } => chi.mul(chi).expect("same prime"),
            Family::Supercuspidal(s) => {
                let sh2 = s.shift.mul(&s.shift).expect("same prime");
                s.oracle.central.mul(&sh2).expect("same prime")
            }
        }
    }

    /// χπ for a quasi-character χ.
    pub fn twist(&self, chi: &QuasiCharacter) -> Result<Self> {
        let family = match &self.family {
            Family::PrincipalSeries { chi1, chi2 } => {
                return Self::ps_inner(chi1.mul(chi)?, chi2.mul(chi)?, self.complementary);
            }
            Family::Steinberg { chi: c } => Family::Steinberg { chi: c.mul(chi)? },
            Family::Supercuspidal(s) => {
                Family::Supercuspidal(Supercuspidal { oracle: s.oracle.clone(), shift: s.shift.mul(chi)? })
            }
        };
        Ok(LocalRepresentation { family, ..self.clone() })
    }

    /// μπ for μ ∈ ₚ𝔛 (μ(ϖ) = 1).
    pub fn twist_by(&self, mu: &MultiplicativeCharacter) -> Result<Self> {
        self.twist(&QuasiCharacter::new(*mu, ONE))
    }

    /// π̃ = ω^{−1} π.
    pub fn contragredient(&self) -> Result<Self> {
        self.twist(&self.central().inv())
    }

    /// Reciprocal roots β with L(s, π) = Π (1 − β p^{−s})^{−1}.
    pub fn l_roots(&self) -> Vec<Complex64> {
        let sq = (self.p as f64).sqrt();
        match &self.family {
            Family::PrincipalSeries { chi1, chi2 } => {
                [chi1, chi2].iter().filter(|c| c.is_unramified()).map(|c| c.at_p).collect()
            }
            Family::Steinberg { chi } if chi.is_unramified() => vec![chi.at_p / sq],
            _ => vec![],
        }
    }

    /// L(s, π).
    pub fn local_l(&self, s: Complex64) -> Result<Complex64> {
        let ps = Complex64::new(self.p as f64, 0.0).powc(-s);
        let mut acc = ONE;
        for b in self.l_roots() {
            let f = ONE - b * ps;
            if f.norm() < 1e-14 {
                return Err(Error::Invalid(format!("pole of L(s, π_{}) at s = {}", self.p, s)));
            }
            acc /= f;
        }
        Ok(acc)
    }

    /// λ_π(p^m); zero for negative m.
    pub fn local_lambda(&self, m: i64) -> Complex64 {
        complete_homogeneous(&self.l_roots(), m)
    }

    /// ε(1/2, π).
    pub fn epsilon(&self) -> Result<Complex64> {
        match &self.family {
            Family::PrincipalSeries { chi1, chi2 } => Ok(chi1.epsilon()? * chi2.epsilon()?),
            Family::Steinberg { chi } if chi.is_unramified() => Ok(-chi.at_p),
            Family::Steinberg { chi } => Ok(chi.epsilon()?.powi(2)),
            Family::Supercuspidal(s) => {
                let (e, a) = s.oracle.get(&s.shift.unit)?;
                Ok(e * s.shift.at_p.powi(a as i32))
            }
        }
    }

    /// δ_{μπ}: the degree of L(s, μπ), except the split family puts δ_π = l.
    pub fn delta(&self, mu: &MultiplicativeCharacter, l: u32) -> Result<u32> {
        if self.kind() == Kind::PsSplit && mu.is_trivial() {
            return Ok(l);
        }
        Ok(self.twist_by(mu)?.l_roots().len() as u32)
    }

    /// The ramified χ_i (or χ) whose inverse untwists, for table lookups.
    fn untwisting(&self) -> Vec<QuasiCharacter> {
        match &self.family {
            Family::PrincipalSeries { chi1, chi2 } => vec![*chi1, *chi2],
            Family::Steinberg { chi } => vec![*chi],
            Family::Supercuspidal(_) => vec![],
        }
    }

    /// Bound 5 p^{1/2} max(1,t) max(1,|α_i|)^{|t|} on table values.
    pub fn cp_bound(&self, t: i64) -> f64 {
        let amax = self.alpha_max();
        5.0 * (self.p as f64).sqrt() * (t.max(1) as f64) * amax.max(1.0).powi(t.unsigned_abs() as i32)
    }

    /// Literal form of the bound, 5 p^{1/2} t max|α_i|^t.
    pub fn cp_bound_literal(&self, t: i64) -> f64 {
        5.0 * (self.p as f64).sqrt() * (t as f64) * self.alpha_max().powi(t as i32)
    }

    fn alpha_max(&self) -> f64 {
        match &self.family {
            Family::PrincipalSeries { chi1, chi2 } => chi1.at_p.norm().max(chi2.at_p.norm()),
            _ => 1.0,
        }
    }
}

/// Which reading of the ps-equal t ≥ 0 entry to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TableVariant {
    /// ε(μ)(λ(p^t)/λ(p^{t+2}) − p^{−1})/ζ_p(1); agrees with the Voronoi identity.
    #[default]
    Corrected,
    /// ε(μ)((1+p^{−1}−p^{−2})/ζ_p(1)² · λ(p^t)/λ(p^{t+2}) − ζ_p(1)^{−1}).
    AsPrinted,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub family: Kind,
    pub l: u32,
    pub t: i64,
    pub mu: MultiplicativeCharacter,
    pub row: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CConstant {
    pub value: Complex64,
    pub provenance: Provenance,
}

/// c_p(π, l, t, μ) from the tables.
pub fn c_constant(pi: &LocalRepresentation, l: u32, t: i64, mu: &MultiplicativeCharacter) -> Result<CConstant> {
    c_constant_with(pi, l, t, mu, TableVariant::Corrected)
}

pub fn c_constant_with(
    pi: &LocalRepresentation,
    l: u32,
    t: i64,
    mu: &MultiplicativeCharacter,
    variant: TableVariant,
) -> Result<CConstant> {
    let p = pi.p;
    if mu.l != p {
        return Err(Error::PrimeMismatch(mu.l, p));
    }
    if mu.conductor() > l {
        return Err(Error::NotAddressable(format!("a(μ) = {} exceeds l = {}", mu.conductor(), l)));
    }
    let kind = pi.kind();
    let pf = p as f64;
    let z1 = zeta_p(p, 1.0);
    let mu = mu.primitive();
    let row = |s: &str| s.to_string();
    let done = |value: Complex64, r: String| {
        Ok(CConstant { value, provenance: Provenance { family: kind, l, t, mu, row: r } })
    };
    if matches!(kind, Kind::Unramified | Kind::SteinbergUnramified) {
        return Err(Error::NotAddressable(format!("{kind:?} is not covered by the tables")));
    }
    let tilde = pi.contragredient()?;
    let eps_tilde = tilde.epsilon()?;
    // ε(1/2, μ^{−1} π̃) ε(1/2, μ): the generic column.
    let generic = || -> Result<Complex64> { Ok(tilde.twist_by(&mu.conj())?.epsilon()? * epsilon_factor(&mu)?) };

    if mu.is_trivial() {
        return match (kind, l) {
            (_, 0) => done(eps_tilde / z1, row("l=0, μ=1")),
            (Kind::PsSplit, 1) => Err(Error::NotAddressable("split table has no l=1 row".into())),
            (Kind::PsSplit, _) => {
                let chi1 = pi.untwisting()[0];
                done(eps_tilde * chi1.at_p.powi(l as i32) * pf.powf(-(l as f64) / 2.0), row("l>1, μ=1"))
            }
            (_, 1) => done(-eps_tilde / pf.sqrt(), row("l=1, μ=1")),
            _ => done(ZERO, row("l>1, μ=1")),
        };
    }
    if l == 0 {
        unreachable!("a(μ) <= l forces μ = 1");
    }
    let lr = if l == 1 { "l=1" } else { "l>1" };
    match kind {
        Kind::Supercuspidal => done(generic()?, format!("{lr}, μ≠1")),
        Kind::SteinbergRamified => {
            let chi = pi.untwisting()[0];
            if chi.same_unit(&mu.conj()) {
                let e = epsilon_factor(&mu)?;
                if t <= -2 {
                    done(e * pf.powf(-1.5), format!("{lr}, μ=χ^-1, t<=-2"))
                } else {
                    done(-e * pf.sqrt() / zeta_p(p, 2.0), format!("{lr}, μ=χ^-1, t>-2"))
                }
            } else {
                generic_or_zero(&mu, l, generic, kind, t, lr)
            }
        }
        Kind::PsDistinct => {
            for chi in pi.untwisting() {
                if chi.same_unit(&mu.conj()) {
                    let a = pi.twist_by(&mu)?.conductor() as i64;
                    let base = generic()? / chi.at_p;
                    return if t <= -a - 1 {
                        done(-base / pf, format!("{lr}, μ=χ_i^-1, t<=-a(μπ)-1"))
                    } else {
                        done(base / z1, format!("{lr}, μ=χ_i^-1, t>-a(μπ)-1"))
                    };
                }
            }
            generic_or_zero(&mu, l, generic, kind, t, lr)
        }
        Kind::PsEqual => {
            let chi1 = pi.untwisting()[0];
            if chi1.same_unit(&mu.conj()) {
                let e = epsilon_factor(&mu)?;
                if t <= -2 {
                    return done(e * pf.powi(-2), format!("{lr}, μ=χ1^-1, t<=-2"));
                }
                if t == -1 {
                    return done(-e / pf / z1, format!("{lr}, μ=χ1^-1, t=-1"));
                }
                let tw = pi.twist_by(&mu)?;
                let den = tw.local_lambda(t + 2);
                if den.norm() < 1e-300 {
                    return Err(Error::Invalid(format!("λ(p^{}) vanishes in the ps-equal ratio", t + 2)));
                }
                let ratio = tw.local_lambda(t) / den;
                let v = match variant {
                    TableVariant::Corrected => e * (ratio - 1.0 / pf) / z1,
                    TableVariant::AsPrinted => e * ((1.0 + 1.0 / pf - 1.0 / (pf * pf)) / (z1 * z1) * ratio - 1.0 / z1),
                };
                done(v, format!("{lr}, μ=χ1^-1, t>=0 ({variant:?})"))
            } else {
                generic_or_zero(&mu, l, generic, kind, t, lr)
            }
        }
        Kind::PsSplit => {
            if l == 1 {
                return Err(Error::NotAddressable("split table has no l=1 row".into()));
            }
            let omega = pi.central();
            let chi2 = pi.untwisting()[1];
            if omega.same_unit(&mu.conj()) {
                let a = pi.twist_by(&mu)?.conductor() as i64;
                let w = omega.unit.dirichlet(-1) * chi2.at_p.powi(1 - l as i32);
                if t <= -a - 1 {
                    done(-w / pf, "l>1, μ=ω^-1, t<=-a(μπ)-1".to_string())
                } else {
                    done(w, "l>1, μ=ω^-1, t>-a(μπ)-1".to_string())
                }
            } else {
                generic_or_zero(&mu, l, generic, kind, t, lr)
            }
        }
        Kind::Unramified | Kind::SteinbergUnramified => unreachable!(),
    }
}

/// Third column: listed for primitive μ ∈ ₚ𝔛ₗ′; other μ do not occur in the
/// expansion and carry the value 0.
fn generic_or_zero(
    mu: &MultiplicativeCharacter,
    l: u32,
    generic: impl Fn() -> Result<Complex64>,
    kind: Kind,
    t: i64,
    lr: &str,
) -> Result<CConstant> {
    let (value, row) = if mu.conductor() == l {
        (generic()?, format!("{lr}, generic μ"))
    } else {
        (ZERO, format!("{lr}, a(μ)<l (unlisted, zero)"))
    };
    Ok(CConstant { value, provenance: Provenance { family: kind, l, t, mu: *mu, row } })
}

/// c_{t,l}(μ) = c_p ζ_p(1) p^{−(l+t+a(μπ))/2} λ_{μπ}(p^{t+a(μπ)+δ}).
pub fn c_coefficient(pi: &LocalRepresentation, t: i64, l: u32, mu: &MultiplicativeCharacter, variant: TableVariant) -> Result<Complex64> {
    let tw = pi.twist_by(mu)?;
    let a = tw.conductor() as i64;
    let delta = pi.delta(mu, l)? as i64;
    let lam = tw.local_lambda(t + a + delta);
    if lam == ZERO {
        return Ok(ZERO);
    }
    let cp = c_constant_with(pi, l, t, mu, variant)?.value;
    let pf = pi.p as f64;
    Ok(cp * zeta_p(pi.p, 1.0) * pf.powf(-((l as i64 + t + a) as f64) / 2.0) * lam)
}

/// W_π(g_{t,l,v}) with g_{t,l,v} = a(ϖ^t) w n(v ϖ^{−l}) and v a unit.
pub fn whittaker_at(pi: &LocalRepresentation, t: i64, l: u32, v: i128) -> Result<Complex64> {
    whittaker_at_with(pi, t, l, v, TableVariant::Corrected)
}

pub fn whittaker_at_with(pi: &LocalRepresentation, t: i64, l: u32, v: i128, variant: TableVariant) -> Result<Complex64> {
    let p = pi.p;
    if v % p as i128 == 0 {
        return Err(Error::Invalid("v must be a unit".into()));
    }
    let pf = p as f64;
    let n = pi.conductor();
    match pi.kind() {
        Kind::Unramified | Kind::SteinbergUnramified if l == 0 => {
            // N₀ display; for unramified π this is the spherical vector.
            if t + (n as i64) < 0 {
                return Ok(ZERO);
            }
            let eps = pi.contragredient()?.epsilon()?;
            Ok(eps * pf.powf(-((t + n as i64) as f64) / 2.0) * pi.local_lambda(t + n as i64))
        }
        Kind::Unramified | Kind::SteinbergUnramified if l >= n => {
            // a(γ) w n(ζ) with γ = ϖ^t, ζ = v ϖ^{−l}; the high-conductor case −v(ζ) ≥ n.
            let m = t + 2 * l as i64;
            if m < 0 {
                return Ok(ZERO);
            }
            let omega = pi.central();
            let md = (p as i128).pow(l);
            let vinv = inv_mod(v, md.max(2)).expect("unit");
            // ω(−ζγ^{−1}) = ω(−v) ω(ϖ)^{−l−t}; ψ_p(−γζ^{−1}) = ψ_p(−v^{−1} ϖ^{t+l}).
            let w = omega.unit.eval(-v, 1)? * omega.at_p.powi(-(l as i32) - t as i32);
            let ps = if t + l as i64 >= 0 { ONE } else { psi_p(p, -vinv, (-(t + l as i64)) as u32) };
            Ok(w * ps * pf.powf(-(m as f64) / 2.0) * pi.local_lambda(m))
        }
        Kind::Unramified | Kind::SteinbergUnramified => {
            Err(Error::NotAddressable(format!("0 < l = {l} < a(π) = {n} for an unramified-type π")))
        }
        _ => {
            let mut acc = ZERO;
            for mu in characters_mod(p, l)? {
                let c = c_coefficient(pi, t, l, &mu, variant)?;
                if c != ZERO {
                    acc += c * mu.dirichlet(v);
                }
            }
            Ok(acc)
        }
    }
}

/// Precomputed p-adic Hankel transform W̃_l(y) of a fixed W_l.
///
/// For each μ with nonzero Mellin coefficient we keep the constants
/// K_j(μ) = l^{j/2} B_{μπ̃,1/2}(ϖ^{−a(μπ̃)−j}) ε(1/2, μπ) 𝔐[W^ω](μ^{−1}),
/// so that W̃_l(l^j u) = Σ_μ μ(u)^{−1} K_j(μ).
#[derive(Debug, Clone)]
pub struct HankelTable {
    pub l: u64,
    pub kappa: u32,
    pub vmin: i64,
    pub vmax: i64,
    terms: Vec<(MultiplicativeCharacter, Vec<Complex64>)>,
    /// dense[j − vmin][u mod l^κ], filled by `densify`.
    dense: Option<Vec<Vec<Complex64>>>,
}

impl HankelTable {
    /// Tabulates valuations up to `vmax`, with the μ-sum over ₗ𝔛_κ.
    pub fn build(w: &UnitBruhatFunction, pi: &LocalRepresentation, vmax: i64) -> Result<Self> {
        let mut t = Self::build_level(w, pi, vmax, 0)?;
        t.densify();
        Ok(t)
    }

    /// Same transform with the μ-sum running over ₗ𝔛_{κ+extra}.
    pub fn build_level(w: &UnitBruhatFunction, pi: &LocalRepresentation, vmax: i64, extra: u32) -> Result<Self> {
        let l = pi.p;
        if w.l != l {
            return Err(Error::PrimeMismatch(w.l, l));
        }
        let omega = pi.central();
        let kw = w.kappa.max(omega.conductor());
        let kappa = kw + extra;
        let wom = UnitBruhatFunction::from_fn(l, kappa, |x| omega.unit.dirichlet(x) * w.eval(x))?;
        let tilde = pi.contragredient()?;
        let vmin = -(2 * kw as i64).max(pi.conductor() as i64) - 2;
        let mut terms = Vec::new();
        for mu in characters_mod(l, kappa)? {
            let m = mellin(&wom, &mu.conj())?;
            if m == ZERO {
                continue;
            }
            let rho = tilde.twist_by(&mu)?;
            let a = rho.conductor() as i64;
            let eps = pi.twist_by(&mu)?.epsilon()?;
            let mut ks = Vec::with_capacity((vmax - vmin + 1) as usize);
            for j in vmin..=vmax {
                // B at ϖ^{−a} y^{−1}, valuation −a − j.
                let b = b_function(&rho, 0.5, -a - j)?;
                ks.push(b * eps * m * (l as f64).powf(j as f64 / 2.0));
            }
            terms.push((mu, ks));
        }
        Ok(HankelTable { l, kappa, vmin, vmax, terms, dense: None })
    }

    /// Expands the table over all unit residues mod l^κ.
    pub fn densify(&mut self) {
        let modulus = (self.l as i128).pow(self.kappa) as usize;
        let mut dense = vec![vec![ZERO; modulus]; (self.vmax - self.vmin + 1) as usize];
        for (mu, ks) in &self.terms {
            let vals: Vec<Complex64> = (0..modulus).map(|u| mu.dirichlet(u as i128).conj()).collect();
            for (row, k) in dense.iter_mut().zip(ks) {
                if *k == ZERO {
                    continue;
                }
                for (slot, v) in row.iter_mut().zip(&vals) {
                    *slot += k * v;
                }
            }
        }
        self.dense = Some(dense);
    }

    /// W̃_l(y) for y = l^j · u; valuations below the table are zero.
    pub fn value(&self, j: i64, u: i128) -> Result<Complex64> {
        if j > self.vmax {
            return Err(Error::OutOfRange { n: j as u64, max: self.vmax.max(0) as u64 });
        }
        if j < self.vmin {
            return Ok(ZERO);
        }
        let i = (j - self.vmin) as usize;
        if let Some(d) = &self.dense {
            let m = (self.l as i128).pow(self.kappa);
            return Ok(d[i][u.rem_euclid(m) as usize]);
        }
        Ok(self.terms.iter().map(|(mu, ks)| ks[i] * mu.dirichlet(u).conj()).sum())
    }

    /// Smallest tabulated valuation with a nonzero entry (exact zero test).
    pub fn support_start(&self) -> Option<i64> {
        (self.vmin..=self.vmax).find(|&j| {
            let i = (j - self.vmin) as usize;
            self.terms.iter().any(|(_, ks)| ks[i] != ZERO)
        })
    }

    pub fn num_characters(&self) -> usize {
        self.terms.len()
    }
}

/// W̃_l(y) of the p-adic Hankel transform.
pub fn p_adic_hankel(w: &UnitBruhatFunction, pi: &LocalRepresentation, y: &PadicNumber) -> Result<Complex64> {
    let j = match y.val {
        Valuation::Infinite => return Err(Error::Zero),
        Valuation::Finite(j) => j,
    };
    let t = HankelTable::build_level(w, pi, j.max(0), 0)?;
    if y.prec < t.kappa {
        return Err(Error::Precision { needed: t.kappa, have: y.prec });
    }
    t.value(j, (y.unit % (y.p as u128).pow(t.kappa)) as i128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::primitive_characters;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn lambda_examples() {
        let u = LocalRepresentation::unramified(5, Complex64::from_polar(1.0, 0.3), Complex64::from_polar(1.0, -0.3)).unwrap();
        assert!((u.local_lambda(1) - c(2.0 * 0.3f64.cos())).norm() < 1e-14);
        let st = LocalRepresentation::steinberg(QuasiCharacter::trivial(5)).unwrap();
        assert!((st.local_lambda(2) - c(0.2)).norm() < 1e-15);
        let chi = primitive_characters(5, 1).unwrap()[0];
        let ps = LocalRepresentation::principal_series(QuasiCharacter::new(chi, ONE), QuasiCharacter::new(chi.conj(), ONE)).unwrap();
        assert_eq!(ps.local_lambda(1), ZERO);
        assert_eq!(ps.local_lambda(0), ONE);
    }

    #[test]
    fn l_factor_examples() {
        let st = LocalRepresentation::steinberg(QuasiCharacter::trivial(5)).unwrap();
        let s = Complex64::new(0.7, 0.2);
        let expect = 1.0 / (ONE - Complex64::new(5.0, 0.0).powc(-s - 0.5));
        assert!((st.local_l(s).unwrap() - expect).norm() < 1e-14);
        let u = LocalRepresentation::unramified(5, ONE, ONE).unwrap();
        assert!((u.local_l(ONE).unwrap() - c(1.0 / 0.64)).norm() < 1e-13);
        let sc = LocalRepresentation::supercuspidal(EpsilonOracle::synthetic(5, 2, 1, 3).unwrap()).unwrap();
        assert_eq!(sc.local_l(s).unwrap(), ONE);
    }

    #[test]
    fn conductors_of_twists() {
        for l in [3u64, 5, 7] {
            let u = LocalRepresentation::unramified(l, ONE, ONE).unwrap();
            for mu in characters_mod(l, 2).unwrap() {
                assert_eq!(u.twist_by(&mu).unwrap().conductor(), 2 * mu.conductor());
                let chi = primitive_characters(l, 1).unwrap()[0];
                let ps = LocalRepresentation::principal_series(QuasiCharacter::new(chi, ONE), QuasiCharacter::trivial(l)).unwrap();
                let tw = ps.twist_by(&mu).unwrap();
                let a1 = chi.mul(&mu).unwrap().conductor();
                assert_eq!(tw.conductor(), a1 + mu.conductor());
            }
        }
    }

    #[test]
    fn steinberg_epsilon_and_central() {
        let st = LocalRepresentation::steinberg(QuasiCharacter::trivial(11)).unwrap();
        assert_eq!(st.epsilon().unwrap(), c(-1.0));
        assert_eq!(st.conductor(), 1);
        let chi = primitive_characters(5, 1).unwrap()[1];
        let st2 = LocalRepresentation::steinberg(QuasiCharacter::new(chi, ONE)).unwrap();
        assert_eq!(st2.conductor(), 2);
        assert!((st2.epsilon().unwrap() - epsilon_factor(&chi).unwrap().powi(2)).norm() < 1e-14);
        assert!(st2.central().unit.same_as(&chi.mul(&chi).unwrap()));
    }

    #[test]
    fn table_examples() {
        let sc = LocalRepresentation::supercuspidal(EpsilonOracle::synthetic(5, 2, 2, 7).unwrap()).unwrap();
        let triv = MultiplicativeCharacter::trivial(5);
        let v = c_constant(&sc, 0, 0, &triv).unwrap().value;
        let e = sc.contragredient().unwrap().epsilon().unwrap();
        assert!((v - e / zeta_p(5, 1.0)).norm() < 1e-14);

        let chi = primitive_characters(5, 1).unwrap()[0];
        let st = LocalRepresentation::steinberg(QuasiCharacter::new(chi, ONE)).unwrap();
        let mu = chi.conj();
        let v = c_constant(&st, 1, -3, &mu).unwrap().value;
        assert!((v - epsilon_factor(&mu).unwrap() * 5f64.powf(-1.5)).norm() < 1e-14);

        let mu1 = primitive_characters(5, 1).unwrap()[2];
        assert!(matches!(c_constant(&st, 0, 0, &mu1), Err(Error::NotAddressable(_))));
    }

    #[test]
    fn missing_oracle_entry() {
        let sc = LocalRepresentation::supercuspidal(EpsilonOracle::synthetic(5, 2, 1, 7).unwrap()).unwrap();
        let mu = primitive_characters(5, 2).unwrap()[0];
        assert!(matches!(c_constant(&sc, 2, 0, &mu), Err(Error::MissingEpsilon(_))));
    }

    #[test]
    fn spherical_whittaker() {
        let u = LocalRepresentation::unramified_from_hecke(7, c(0.9), ONE).unwrap();
        let w = whittaker_at(&u, 1, 0, 3).unwrap();
        assert!((w - c(0.9 / 7f64.sqrt())).norm() < 1e-13);
        assert_eq!(whittaker_at(&u, -1, 0, 3).unwrap(), ZERO);
    }

    #[test]
    fn unit_indicator_hankel_matches_display() {
        // Only μ = 1 contributes: W̃(ϖ^j u) = p^{j/2} B_{π̃,1/2}(ϖ^{−j}).
        let p = 5u64;
        let lam = 0.37;
        let pi = LocalRepresentation::unramified_from_hecke(p, c(lam), ONE).unwrap();
        let w = UnitBruhatFunction::indicator(p, 1).unwrap();
        let t = HankelTable::build(&w, &pi, 6).unwrap();
        let pf = p as f64;
        let h = |k: i64| pi.local_lambda(k);
        for j in -4..=6i64 {
            // Four-case display with π = π̃, ω = 1 and y^{−1} of valuation −j.
            let expect = if j >= 0 {
                pf.powf(j as f64 / 2.0)
                    * pf.powf(-(j as f64) / 2.0)
                    * (h(j) - h(1) * h(j + 1) / pf + h(j + 2) / (pf * pf))
            } else if j == -1 {
                pf.powf(-0.5) * pf.powf(-0.5) * (h(1) / pf - h(1))
            } else if j == -2 {
                c(pf.powf(-1.0) / pf)
            } else {
                ZERO
            };
            assert!((t.value(j, 2).unwrap() - expect).norm() < 1e-12, "j={j}");
        }
    }
}
