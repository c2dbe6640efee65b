//! Mellin analysis of unit-supported functions on Q_l^× and the special
//! function B_{π,κ}.

use num_complex::Complex64;
use rand::Rng;

use crate::characters::{characters_mod, e_frac, DlogTable, MultiplicativeCharacter};
use crate::localdata::{complete_homogeneous, LocalRepresentation};
use crate::padic::check_odd_prime;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A function on Z_l^× (zero elsewhere), constant mod l^κ.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitBruhatFunction {
    pub l: u64,
    pub kappa: u32,
    /// Indexed by residue mod l^κ; entries at non-units are zero.
    values: Vec<Complex64>,
}

impl UnitBruhatFunction {
    pub fn from_fn(l: u64, kappa: u32, f: impl Fn(i128) -> Complex64) -> Result<Self> {
        check_odd_prime(l)?;
        if kappa == 0 {
            return Err(Error::Invalid("level κ must be at least 1".into()));
        }
        let m = l.pow(kappa);
        let values = (0..m)
            .map(|x| if x % l == 0 { ZERO } else { f(x as i128) })
            .collect();
        Ok(UnitBruhatFunction { l, kappa, values })
    }

    /// Indicator of Z_l^×.
    pub fn indicator(l: u64, kappa: u32) -> Result<Self> {
        Self::from_fn(l, kappa, |_| Complex64::new(1.0, 0.0))
    }

    pub fn random(l: u64, kappa: u32, rng: &mut impl Rng) -> Result<Self> {
        let m = l.pow(kappa) as usize;
        let vals: Vec<Complex64> = (0..m).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        Self::from_fn(l, kappa, |x| vals[x as usize])
    }

    pub fn eval(&self, x: i128) -> Complex64 {
        let m = self.values.len() as i128;
        self.values[x.rem_euclid(m) as usize]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn modulus(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.l != o.l || self.kappa != o.kappa {
            return Err(Error::Invalid("mismatched Bruhat functions".into()));
        }
        Ok(UnitBruhatFunction { values: self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect(), ..self.clone() })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        UnitBruhatFunction { values: self.values.iter().map(|v| v * c).collect(), ..self.clone() }
    }

    /// Max |f − g| over residues.
    pub fn max_diff(&self, o: &Self) -> f64 {
        self.values.iter().zip(&o.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Mellin coefficients S(μ), μ ∈ ₗ𝔛_κ, indexed by μ's log image mod l^κ.
#[derive(Debug, Clone, PartialEq)]
pub struct MellinSpectrum {
    pub l: u64,
    pub kappa: u32,
    pub coefficients: Vec<Complex64>,
}

impl MellinSpectrum {
    pub fn get(&self, mu: &MultiplicativeCharacter) -> Result<Complex64> {
        if mu.conductor() > self.kappa {
            return Ok(ZERO);
        }
        let m = mu.at_level(self.kappa)?;
        Ok(self.coefficients[m.log_image as usize])
    }

    pub fn characters(&self) -> Result<Vec<MultiplicativeCharacter>> {
        characters_mod(self.l, self.kappa)
    }
}

/// 𝔐W(μ) = (1/φ(l^κ)) Σ_x W(x) μ(x); zero when a(μ) > κ.
pub fn mellin(w: &UnitBruhatFunction, mu: &MultiplicativeCharacter) -> Result<Complex64> {
    if mu.l != w.l {
        return Err(Error::PrimeMismatch(mu.l, w.l));
    }
    if mu.conductor() > w.kappa {
        return Ok(ZERO);
    }
    let mu = mu.at_level(w.kappa)?;
    let t = DlogTable::get(w.l, w.kappa)?;
    let phi = t.phi as i128;
    let m = t.modulus as i128;
    let mut acc = ZERO;
    let mut x = 1i128;
    for j in 0..phi {
        let v = w.values[x as usize];
        if v != ZERO {
            acc += v * e_frac(j * mu.log_image as i128 % phi, phi);
        }
        x = x * t.gen as i128 % m;
    }
    Ok(acc / phi as f64)
}

/// The full spectrum of W at its own level.
pub fn mellin_spectrum(w: &UnitBruhatFunction) -> Result<MellinSpectrum> {
    let coefficients = characters_mod(w.l, w.kappa)?
        .iter()
        .map(|mu| mellin(w, mu))
        .collect::<Result<Vec<_>>>()?;
    Ok(MellinSpectrum { l: w.l, kappa: w.kappa, coefficients })
}

/// f(y) = Σ_μ μ(y)^{−1} S(μ).
pub fn mellin_inverse(s: &MellinSpectrum) -> Result<UnitBruhatFunction> {
    let t = DlogTable::get(s.l, s.kappa)?;
    let phi = t.phi as i128;
    let mut vals = vec![ZERO; t.modulus as usize];
    let mut x = 1i128;
    for i in 0..phi {
        let mut acc = ZERO;
        for (j, c) in s.coefficients.iter().enumerate() {
            if *c != ZERO {
                acc += c * e_frac(-(i * j as i128 % phi), phi);
            }
        }
        vals[x as usize] = acc;
        x = x * t.gen as i128 % t.modulus as i128;
    }
    Ok(UnitBruhatFunction { l: s.l, kappa: s.kappa, values: vals })
}

/// N(X)/D(1/X): a polynomial in X over a polynomial in X^{−1} with D(0) = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentRatio {
    pub numerator: Vec<Complex64>,
    pub denominator: Vec<Complex64>,
    /// Roots r of D written as Π (1 − r X^{−1}); expansion needs |r| < 1.
    pub denominator_roots: Vec<Complex64>,
}

impl LaurentRatio {
    /// Π(1 − n_i X) / Π(1 − d_j X^{−1}).
    pub fn from_roots(num_roots: &[Complex64], den_roots: &[Complex64]) -> Self {
        LaurentRatio {
            numerator: poly_from_roots(num_roots),
            denominator: poly_from_roots(den_roots),
            denominator_roots: den_roots.to_vec(),
        }
    }

    pub fn expandable(&self) -> bool {
        self.denominator_roots.iter().all(|r| r.norm() < 1.0)
    }

    /// Coefficient of X^m in the expansion in non-positive powers of X for
    /// the denominator. Nonzero only for m ≤ deg N.
    pub fn coefficient(&self, m: i64) -> Result<Complex64> {
        if !self.expandable() {
            return Err(Error::NotExpandable(format!("denominator roots {:?}", self.denominator_roots)));
        }
        let mut acc = ZERO;
        for (d, nd) in self.numerator.iter().enumerate() {
            let k = d as i64 - m;
            if k >= 0 {
                acc += nd * complete_homogeneous(&self.denominator_roots, k);
            }
        }
        Ok(acc)
    }

    /// Value at a point X on the unit circle.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        let n: Complex64 = self.numerator.iter().enumerate().map(|(d, c)| c * x.powi(d as i32)).sum();
        let d: Complex64 = self.denominator.iter().enumerate().map(|(k, c)| c * x.powi(-(k as i32))).sum();
        n / d
    }
}

/// Coefficients of Π(1 − r_i X), constant term first.
fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![ZERO; c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i] += ci;
            next[i + 1] -= r * ci;
        }
        c = next;
    }
    c
}

/// L(1−κ−it, π̃)/L(κ+it, π) as a ratio in X = p^{−it}.
pub fn b_ratio(pi: &LocalRepresentation, kappa: f64) -> Result<LaurentRatio> {
    let pf = pi.p as f64;
    let num: Vec<Complex64> = pi.l_roots().iter().map(|b| b * pf.powf(-kappa)).collect();
    let den: Vec<Complex64> = pi.contragredient()?.l_roots().iter().map(|b| b * pf.powf(kappa - 1.0)).collect();
    Ok(LaurentRatio::from_roots(&num, &den))
}

/// B_{π,κ}(y) for v_p(y) = m: the coefficient of X^m.
pub fn b_function(pi: &LocalRepresentation, kappa: f64, m: i64) -> Result<Complex64> {
    b_ratio(pi, kappa)?.coefficient(m)
}

/// The defining t-integral of B by an n-point trapezoid rule over one period.
pub fn b_function_quadrature(pi: &LocalRepresentation, kappa: f64, m: i64, n: usize) -> Result<Complex64> {
    let r = b_ratio(pi, kappa)?;
    if !r.expandable() {
        return Err(Error::NotExpandable("quadrature oracle needs the same expansion".into()));
    }
    let lp = (pi.p as f64).ln();
    let h = 2.0 * std::f64::consts::PI / lp / n as f64;
    let mut acc = ZERO;
    for i in 0..n {
        let t = -std::f64::consts::PI / lp + i as f64 * h;
        // X = p^{−it}, |y|^{−it} = p^{imt} = X^{−m}.
        let x = Complex64::from_polar(1.0, -t * lp);
        acc += r.eval(x) * x.powi(-(m as i32));
    }
    Ok(acc * h * lp / (2.0 * std::f64::consts::PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localdata::QuasiCharacter;
    use rand::SeedableRng;

    #[test]
    fn constant_function_spectrum() {
        let w = UnitBruhatFunction::indicator(5, 2).unwrap();
        let s = mellin_spectrum(&w).unwrap();
        assert!((s.coefficients[0] - 1.0).norm() < 1e-15);
        assert!(s.coefficients[1..].iter().all(|c| c.norm() < 1e-14));
        let far = crate::characters::primitive_characters(5, 3).unwrap()[0];
        assert_eq!(mellin(&w, &far).unwrap(), ZERO);
    }

    #[test]
    fn delta_mass_is_flat() {
        let w = UnitBruhatFunction::from_fn(7, 2, |x| if x == 1 { 1.0.into() } else { ZERO }).unwrap();
        let s = mellin_spectrum(&w).unwrap();
        for c in &s.coefficients {
            assert!((c - 1.0 / 42.0).norm() < 1e-15);
        }
    }

    #[test]
    fn character_spectrum_is_indicator() {
        let mu0 = MultiplicativeCharacter::new(5, 2, 7).unwrap();
        let w = UnitBruhatFunction::from_fn(5, 2, |x| mu0.dirichlet(x)).unwrap();
        for mu in characters_mod(5, 2).unwrap() {
            let v = mellin(&w, &mu).unwrap();
            let expect = if mu.same_as(&mu0.conj()) { 1.0 } else { 0.0 };
            assert!((v - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn round_trip() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        let w = UnitBruhatFunction::random(5, 3, &mut rng).unwrap();
        let back = mellin_inverse(&mellin_spectrum(&w).unwrap()).unwrap();
        assert!(w.max_diff(&back) < 1e-12);
    }

    #[test]
    fn b_trivial_l_factor() {
        let chi = crate::characters::primitive_characters(5, 1).unwrap()[0];
        let pi = LocalRepresentation::steinberg(QuasiCharacter::new(chi, 1.0.into())).unwrap();
        for m in -3..=3 {
            let b = b_function(&pi, 0.5, m).unwrap();
            assert_eq!(b, if m == 0 { Complex64::new(1.0, 0.0) } else { ZERO });
        }
    }

    #[test]
    fn b_steinberg_vs_quadrature() {
        let pi = LocalRepresentation::steinberg(QuasiCharacter::trivial(5)).unwrap();
        for m in -5..=2 {
            let a = b_function(&pi, 0.5, m).unwrap();
            let q = b_function_quadrature(&pi, 0.5, m, 10_000).unwrap();
            assert!((a - q).norm() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn non_expandable_rejected() {
        let pi = LocalRepresentation::complementary_series(
            QuasiCharacter::unramified(3, Complex64::new(0.2, 0.0)),
            QuasiCharacter::unramified(3, Complex64::new(5.0, 0.0)),
        )
        .unwrap();
        assert!(matches!(b_function(&pi, 0.5, 0), Err(Error::NotExpandable(_))));
    }
}
