//! Depth-aspect constructions at the special prime: the l-adic Farey
//! dissection, the pieces W_l(s; ·), and the oscillatory character sums 𝔏_{s,c}.

use std::collections::HashMap;

use serde::Serialize;

use crate::characters::{alpha_of_char, e, e_frac, epsilon_factor, primitive_characters, psi_p, MultiplicativeCharacter};
use crate::hankel::SmoothWindow;
use crate::newforms::QExpansion;
use crate::padic::{gcd, inv_mod, ipow, Zmod};
use crate::{Complex64, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One class Z_l^×[a,b,k] = {m : m ≡ bα/a mod l^{q+|r|+k}}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FareyCell {
    pub a: i64,
    pub b: u64,
    pub k: u32,
    /// Exponent q + |r| + k of the defining congruence.
    pub level: u32,
    /// bα/a mod l^level.
    pub residue: u64,
}

impl FareyCell {
    pub fn contains(&self, l: u64, m: i128) -> bool {
        let md = ipow(l, self.level) as i128;
        m % l as i128 != 0 && m.rem_euclid(md) == self.residue as i128
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Dissection {
    pub l: u64,
    pub q: u32,
    pub r: i32,
    pub alpha: u64,
    pub cells: Vec<FareyCell>,
    /// Residues are checked mod l^check_level.
    pub check_level: u32,
    pub unit_residues: u64,
}

/// Greedy S⁰: admissible (a,b,k) by increasing k, then |a|+b; a cell is
/// accepted iff its class is disjoint from those already accepted.
pub fn farey_dissect(l: u64, alpha: u64, q: u32, r: i32) -> Result<Dissection> {
    if alpha % l == 0 {
        return Err(Error::Invalid("α must be a unit".into()));
    }
    if r.unsigned_abs() > q {
        return Err(Error::Invalid(format!("|r| = {} exceeds q = {q}", r.unsigned_abs())));
    }
    let ra = r.unsigned_abs();
    let (rp, rm) = (r.max(0) as u32, (-r).max(0) as u32);
    let top = 2 * q;
    let big = ipow(l, top) as u64;
    let mut owner: Vec<Option<usize>> = vec![None; big as usize];
    let mut cells: Vec<FareyCell> = Vec::new();
    for k in 0..=(q - ra) {
        let level = q + ra + k;
        let md = ipow(l, level) as i128;
        let bmax = ipow(l, k + 2 * rm) as i64;
        let amax = ipow(l, k + 2 * rp) as i64;
        let mut cand = Vec::new();
        for b in 1..=bmax {
            for a in -amax..=amax {
                if a == 0 || a % l as i64 == 0 || b % l as i64 == 0 || gcd(a as i128, b as i128) != 1 {
                    continue;
                }
                cand.push((a.unsigned_abs() + b as u64, a, b as u64));
            }
        }
        cand.sort();
        for (_, a, b) in cand {
            if cells.iter().any(|c| c.a == a && c.b == b) {
                continue;
            }
            let ainv = inv_mod(a as i128, md).ok_or(Error::Zero)?;
            let residue = ((b as i128 * alpha as i128 % md) * ainv % md) as u64;
            let step = md as u64;
            let lifts: Vec<u64> = (0..big / step).map(|j| residue + j * step).collect();
            if lifts.iter().any(|&x| owner[x as usize].is_some()) {
                continue;
            }
            for &x in &lifts {
                owner[x as usize] = Some(cells.len());
            }
            cells.push(FareyCell { a, b, k, level, residue });
        }
    }
    let units = (0..big).filter(|x| x % l != 0).count() as u64;
    let missing: Vec<u64> = (0..big).filter(|&x| x % l != 0 && owner[x as usize].is_none()).take(5).collect();
    if !missing.is_empty() {
        return Err(Error::Dissection(format!(
            "greedy cover incomplete for l={l}, q={q}, r={r}, α={alpha}: e.g. residues {missing:?} mod {big}"
        )));
    }
    Ok(Dissection { l, q, r, alpha, cells, check_level: top, unit_residues: units })
}

#[derive(Clone, Debug, Serialize)]
pub struct DissectionCheck {
    pub partition: bool,
    pub unique_k: bool,
    pub k_bounded: bool,
    pub cells: usize,
}

/// Exhaustive partition, uniqueness-of-k and k ≤ q − |r| checks.
pub fn check_dissection(d: &Dissection) -> DissectionCheck {
    let big = ipow(d.l, d.check_level) as i128;
    let partition = (0..big)
        .filter(|x| x % d.l as i128 != 0)
        .all(|x| d.cells.iter().filter(|c| c.contains(d.l, x)).count() == 1)
        && (0..big).filter(|x| x % d.l as i128 == 0).all(|x| d.cells.iter().all(|c| !c.contains(d.l, x)));
    let mut ks: HashMap<(i64, u64), u32> = HashMap::new();
    let mut unique_k = true;
    for c in &d.cells {
        if let Some(k) = ks.insert((c.a, c.b), c.k) {
            unique_k &= k == c.k;
        }
    }
    let k_bounded = d.cells.iter().all(|c| c.k <= d.q - d.r.unsigned_abs());
    DissectionCheck { partition, unique_k, k_bounded, cells: d.cells.len() }
}

/// e(a b̄ m / l^h) = e(−a·(l^h)⁻¹·m / b) e(a m / (b l^h)); returns |LHS − RHS|.
pub fn reciprocity_check(l: u64, a: i64, b: u64, h: u32, m: i64) -> Result<f64> {
    let lh = ipow(l, h) as i128;
    let bbar = inv_mod(b as i128, lh).ok_or(Error::Zero)?;
    let lbar = inv_mod(lh, b as i128).ok_or(Error::Zero)?;
    let lhs = e_frac(a as i128 * bbar * m as i128, lh);
    let rhs = e_frac(-(a as i128) * lbar * m as i128, b as i128) * e(a as f64 * m as f64 / (b as f64 * lh as f64));
    Ok((lhs - rhs).norm())
}

/// Parameters of the depth-aspect setup: π_l = χ_l|·|^{κ₁} ⊞ χ_l|·|^{κ₂}
/// with χ_l primitive mod l^{n_l/2}.
#[derive(Clone, Debug)]
pub struct DepthInstance {
    pub l: u64,
    pub n_l: u32,
    pub chi: MultiplicativeCharacter,
    /// α_χ as an integer representative mod l^{n_l/2 − 1}.
    pub alpha: u64,
    pub q: u32,
    pub r: i32,
    pub m_scale: f64,
    pub form: Option<QExpansion>,
}

impl DepthInstance {
    pub fn new(l: u64, n_l: u32, chi_index: u64, q: u32, r: i32, m_scale: f64) -> Result<Self> {
        if n_l % 2 != 0 || n_l < 4 {
            return Err(Error::Invalid(format!("n_l = {n_l} must be even and ≥ 4")));
        }
        if 8 * q > n_l || r.unsigned_abs() > q {
            return Err(Error::Invalid(format!("need q ≤ n_l/8 and |r| ≤ q (q={q}, r={r})")));
        }
        let n = n_l / 2;
        let chi = MultiplicativeCharacter::new(l, n, chi_index)?;
        if !chi.is_primitive() {
            return Err(Error::Imprimitive { l, a: n, conductor: chi.conductor() });
        }
        let alpha = alpha_of_char(&chi, 1)?.unit as u64;
        Ok(DepthInstance { l, n_l, chi, alpha, q, r, m_scale, form: None })
    }

    pub fn with_form(mut self, f: QExpansion) -> Self {
        self.form = Some(f);
        self
    }

    pub fn n(&self) -> u32 {
        self.n_l / 2
    }

    pub fn dissect(&self) -> Result<Dissection> {
        farey_dissect(self.l, self.alpha, self.q, self.r)
    }

    /// W_∞(x) = e(a x/(b l^n)) F(x/M) for the cell's (a, b), F the bump on [1,2].
    pub fn w_inf(&self, s: &FareyCell) -> Result<SmoothWindow> {
        let theta = s.a as f64 / (s.b as f64 * ipow(self.l, self.n()) as f64);
        SmoothWindow::modulated(self.m_scale, 2.0 * self.m_scale, theta)
    }
}

/// W_l(s; m) = 1_cell(m) χ_l(m)⁻¹ ψ_l(a b̄ m / l^{n_l/2}).
pub fn w_l_s(s: &FareyCell, inst: &DepthInstance, m: i128) -> Complex64 {
    if !s.contains(inst.l, m) {
        return ZERO;
    }
    let n = inst.n();
    let ln = ipow(inst.l, n) as i128;
    let bbar = inv_mod(s.b as i128, ln).expect("b is a unit");
    inst.chi.dirichlet(m).conj() * psi_p(inst.l, (s.a as i128 * bbar % ln) * m.rem_euclid(ln) % ln, n)
}

/// Exact periodicity of W_l(s;·) modulo l^{n_l/2 − q − |r| − k}.
pub fn periodicity_holds(s: &FareyCell, inst: &DepthInstance) -> bool {
    let n = inst.n();
    let ln = ipow(inst.l, n) as i128;
    let per = ipow(inst.l, n - inst.q - inst.r.unsigned_abs() - s.k) as i128;
    (0..ln).all(|m| (w_l_s(s, inst, m) - w_l_s(s, inst, m + per)).norm() < 1e-12)
}

/// 𝔐[W_l(s;·)](μ) for all primitive μ mod l^c, averaged over (Z/l^n)^×.
fn cell_spectrum(s: &FareyCell, inst: &DepthInstance, c: u32) -> Result<Vec<(MultiplicativeCharacter, Complex64, Complex64)>> {
    let n = inst.n();
    let ln = ipow(inst.l, n) as i128;
    let w: Vec<(i128, Complex64)> = (0..ln).map(|x| (x, w_l_s(s, inst, x))).filter(|v| v.1 != ZERO).collect();
    let phi = (ln / inst.l as i128 * (inst.l as i128 - 1)) as f64;
    let mut out = Vec::new();
    for mu in primitive_characters(inst.l, c)? {
        let m: Complex64 = w.iter().map(|(x, v)| v * mu.dirichlet(*x)).sum::<Complex64>() / phi;
        let eps = epsilon_factor(&mu)?;
        out.push((mu, eps * eps, m));
    }
    Ok(out)
}

/// 𝔏_{s,c}(m) = Σ_{μ ∈ ₗ𝔛′_c} ε(1/2,μ)² μ(m b̄²) 𝔐[W_l(s;·)](μ) for several m at once.
pub fn l_sc_bruteforce_many(s: &FareyCell, inst: &DepthInstance, c: u32, ms: &[i128]) -> Result<Vec<Complex64>> {
    check_c(s, inst, c)?;
    let spec = cell_spectrum(s, inst, c)?;
    let ln = ipow(inst.l, inst.n()) as i128;
    let bbar = inv_mod(s.b as i128, ln).ok_or(Error::Zero)?;
    Ok(ms
        .iter()
        .map(|&m| {
            let arg = m.rem_euclid(ln) * bbar % ln * bbar % ln;
            spec.iter().map(|(mu, e2, mm)| e2 * mu.dirichlet(arg) * mm).sum()
        })
        .collect())
}

pub fn l_sc_bruteforce(s: &FareyCell, inst: &DepthInstance, c: u32, m: i128) -> Result<Complex64> {
    Ok(l_sc_bruteforce_many(s, inst, c, &[m])?[0])
}

fn check_c(s: &FareyCell, inst: &DepthInstance, c: u32) -> Result<()> {
    let hi = inst.n() as i64 - inst.q as i64 - inst.r.unsigned_abs() as i64 - s.k as i64;
    if c < 2 || c as i64 > hi {
        return Err(Error::Invalid(format!("c = {c} outside 2..={hi}")));
    }
    Ok(())
}

/// p^{−1/2} Σ_t ψ_p(u t²/p) for odd ρ, 1 for even ρ.
fn gauss_eps(p: u64, u: u128, rho: u32) -> Complex64 {
    if rho % 2 == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let s: Complex64 = (0..p as u128).map(|t| psi_p(p, ((u % p as u128) * t * t % p as u128) as i128, 1)).sum();
    s / (p as f64).sqrt()
}

/// Residues mod p^{n+12}: the logarithm loses a few digits to division by p.
fn working_ring(p: u64, n: u32) -> Result<Zmod> {
    Zmod::new(p, n + 12)
}

/// Stationary-phase evaluation of 𝔏_{s,c}(m); zero off the square locus.
///
/// With x_c = bα/a, X = m/(ab), s = (αX)^{−1/2} and T = ±2s, v solves
/// 2α(v³ − v) = T p^{n−c} near 1 and g(v) = α(v² − 2 log v) + T p^{n−c}/v; then
/// 𝔏 = p^{(c−n)/2} χ̄(x_c) Σ_± ε(±s, p^c) ψ(g(v)/p^n) [· ε(g''(v)/2, p) for odd n].
pub fn l_sc_closed_form(s: &FareyCell, inst: &DepthInstance, c: u32, m: i128) -> Result<Complex64> {
    check_c(s, inst, c)?;
    let p = inst.l;
    let n = inst.n();
    let z = working_ring(p, n)?;
    let al = inst.alpha as u128;
    let a = z.red(s.a as i128);
    let b = z.red(s.b as i128);
    let xc = z.mul(z.mul(b, al), z.inv(a)?);
    let x = z.mul(z.red(m), z.inv(z.mul(a, b))?);
    let ax = z.mul(al, x);
    let root = match z.sqrt_unit(ax) {
        Ok(r) => r,
        Err(Error::NotASquare(_)) | Err(Error::Zero) => return Ok(ZERO),
        Err(e) => return Err(e),
    };
    let sq = z.inv(root)?;
    let pnc = ipow(p, n - c);
    let two = z.red(2);
    let ln = ipow(p, n);
    let mut tot = ZERO;
    for sg in [1i128, -1] {
        let ssg = z.mul(z.red(sg), sq);
        let t = z.mul(two, ssg);
        let tp = z.mul(t, pnc);
        let mut v = 1u128;
        for _ in 0..16 {
            let v3 = z.mul(z.mul(v, v), v);
            let g = z.sub(z.mul(z.mul(two, al), z.sub(v3, v)), tp);
            let gp = z.mul(z.mul(two, al), z.sub(z.mul(z.red(3), z.mul(v, v)), 1));
            v = z.sub(v, z.mul(g, z.inv(gp)?));
        }
        let vinv = z.inv(v)?;
        let lg = z.log(v)?;
        let gv = z.add(z.mul(al, z.sub(z.mul(v, v), z.mul(two, lg))), z.mul(tp, vinv));
        let mut term = gauss_eps(p, ssg, c) * psi_p(p, (gv % ln) as i128, n);
        if n % 2 == 1 {
            let vi2 = z.mul(vinv, vinv);
            let g2 = z.add(z.mul(al, z.add(two, z.mul(two, vi2))), z.mul(z.mul(two, tp), z.mul(vi2, vinv)));
            term *= gauss_eps(p, z.mul(g2, z.inv(two)?), 1);
        }
        tot += term;
    }
    let xr = (xc % ln) as i128;
    Ok((p as f64).powf((c as f64 - n as f64) / 2.0) * inst.chi.dirichlet(xr).conj() * tot)
}

/// The uncorrected Φ_c^± formula taken literally (γ = 1, ρ = c, ψ_p of the bracket at
/// p^{−c}). Kept for comparison only.
pub fn l_sc_as_printed(s: &FareyCell, inst: &DepthInstance, c: u32, m: i128) -> Result<Complex64> {
    check_c(s, inst, c)?;
    let p = inst.l;
    let n = inst.n();
    let z = working_ring(p, n)?;
    let al = inst.alpha as u128;
    let a = z.red(s.a as i128);
    let b = z.red(s.b as i128);
    let x = z.mul(z.red(m), z.inv(z.mul(a, b))?);
    let ax = z.mul(al, x);
    let root = match z.sqrt_unit(ax) {
        Ok(r) => r,
        Err(Error::NotASquare(_)) | Err(Error::Zero) => return Ok(ZERO),
        Err(e) => return Err(e),
    };
    let _ = root;
    let p2 = ipow(p, 2 * (n - c));
    let p1 = ipow(p, n - c);
    let quarter = z.inv(z.red(4))?;
    let half = z.inv(z.red(2))?;
    let inner = z.add(ax, z.mul(quarter, z.mul(p2, z.mul(x, x))));
    let r_in = z.sqrt_unit(inner)?;
    let pc = ipow(p, c);
    let mut tot = ZERO;
    for sg in [1i128, -1] {
        let sr = z.mul(z.red(sg), r_in);
        let arg = z.add(z.add(al, z.mul(half, z.mul(p2, x))), z.mul(p1, sr));
        let chi_v = inst.chi.dirichlet((arg % ipow(p, n)) as i128);
        let br = z.add(z.mul(half, z.mul(p1, x)), sr);
        // ψ_p(−br/p^c)
        let ps = psi_p(p, -((br % pc) as i128), c);
        let eps = gauss_eps(p, z.mul(z.red(sg), z.sqrt_unit(ax)?), c);
        tot += eps * chi_v * ps;
    }
    let ln = ipow(p, n) as i128;
    let abar_b = z.mul(z.inv(a)?, b);
    Ok((p as f64).powf(-((inst.n_l + 2 * c) as f64) / 4.0) * inst.chi.dirichlet((abar_b % ln as u128) as i128) * tot)
}

/// L_s = Σ_m λ_{π₀}(m) e(−a (l^{n})⁻¹ m / b) W_∞(m) W_l(s; m).
pub fn assemble_l_s(s: &FareyCell, inst: &DepthInstance) -> Result<Complex64> {
    let f = inst.form.as_ref().ok_or_else(|| Error::Invalid("depth instance has no form".into()))?;
    let w = inst.w_inf(s)?;
    let ln = ipow(inst.l, inst.n()) as i128;
    let lbar = inv_mod(ln, s.b as i128).ok_or(Error::Zero)?;
    let mut acc = ZERO;
    for m in (w.a.ceil() as u64)..=(w.b.floor() as u64) {
        let wl = w_l_s(s, inst, m as i128);
        if wl == ZERO {
            continue;
        }
        let ph = e_frac(-(s.a as i128) * lbar * m as i128, s.b as i128);
        acc += f.normalized_lambda(m)? * ph * w.eval(m as f64) * wl;
    }
    Ok(acc)
}

/// L = Σ_{(m,l)=1} λ_{π₀}(m) χ̄_l(m) F(m/M).
pub fn undissected_l(inst: &DepthInstance) -> Result<Complex64> {
    let f = inst.form.as_ref().ok_or_else(|| Error::Invalid("depth instance has no form".into()))?;
    let w = SmoothWindow::bump(inst.m_scale, 2.0 * inst.m_scale)?;
    let mut acc = ZERO;
    for m in (w.a.ceil() as u64)..=(w.b.floor() as u64) {
        if m % inst.l == 0 {
            continue;
        }
        acc += f.normalized_lambda(m)? * inst.chi.dirichlet(m as i128).conj() * w.eval(m as f64);
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize)]
pub struct LscComparison {
    pub cells: usize,
    pub points: usize,
    pub max_abs_diff: f64,
    pub nonzero_points: usize,
    /// brute/closed at the first nonzero point, per parity of n_l/2.
    pub gamma_re: f64,
    pub gamma_im: f64,
    pub max_abs_diff_as_printed: f64,
}

/// Closed form vs brute force over all cells, all admissible c in `cs`, and
/// all m mod l^`m_exp` prime to l.
pub fn lsc_grid(inst: &DepthInstance, cs: &[u32], m_exp: u32) -> Result<LscComparison> {
    let d = inst.dissect()?;
    let ms: Vec<i128> = (1..ipow(inst.l, m_exp) as i128).filter(|m| m % inst.l as i128 != 0).collect();
    let mut out = LscComparison { cells: d.cells.len(), points: 0, max_abs_diff: 0.0, nonzero_points: 0, gamma_re: f64::NAN, gamma_im: f64::NAN, max_abs_diff_as_printed: 0.0 };
    for s in &d.cells {
        for &c in cs {
            if check_c(s, inst, c).is_err() {
                continue;
            }
            let brute = l_sc_bruteforce_many(s, inst, c, &ms)?;
            for (m, bv) in ms.iter().zip(brute) {
                let cv = l_sc_closed_form(s, inst, c, *m)?;
                let pv = l_sc_as_printed(s, inst, c, *m)?;
                out.points += 1;
                out.max_abs_diff = out.max_abs_diff.max((cv - bv).norm());
                out.max_abs_diff_as_printed = out.max_abs_diff_as_printed.max((pv - bv).norm());
                if cv.norm() > 1e-9 {
                    out.nonzero_points += 1;
                    if out.gamma_re.is_nan() {
                        let g = bv / cv;
                        out.gamma_re = g.re;
                        out.gamma_im = g.im;
                    }
                }
            }
        }
    }
    Ok(out)
}
