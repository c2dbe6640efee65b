//! Both sides of the Voronoi summation formula with an additive twist a/b
//! and a special prime l.

use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::characters::{characters_mod, e_frac};
use crate::hankel::{default_nodes, hankel_fixed, ArchimedeanType, Sign, SmoothWindow};
use crate::localdata::{c_coefficient, whittaker_at_with, HankelTable, LocalRepresentation, TableVariant};
use crate::mellin::UnitBruhatFunction;
use crate::newforms::{catalog, QExpansion};
use crate::padic::{gcd, inv_mod, ipow, is_prime, split_p};
use crate::report::{ser_complex, ser_f64};
use crate::{Complex64, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Prime factorization by trial division.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Which part of the level a prime belongs to, by comparing v_p(b) with n_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// v_p(b) = 0.
    N0,
    /// 0 < v_p(b) < n_p.
    N1,
    /// n_p ≤ v_p(b).
    N2,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeBranch {
    pub p: u64,
    pub n_p: u32,
    pub v_b: u32,
    pub branch: Branch,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelSplit {
    pub n0: u64,
    pub n1: u64,
    pub n2: u64,
    pub b0: u64,
    pub b1: u64,
    pub b2: u64,
    pub primes: Vec<PrimeBranch>,
}

impl LevelSplit {
    /// b₀² b₂² b₁ N₁ N₀.
    pub fn dual_denominator(&self) -> u64 {
        self.b0 * self.b0 * self.b2 * self.b2 * self.b1 * self.n1 * self.n0
    }

    pub fn primes_in(&self, b: Branch) -> impl Iterator<Item = &PrimeBranch> {
        self.primes.iter().filter(move |x| x.branch == b)
    }
}

pub fn split_level(n: u64, a: i64, b: u64) -> Result<LevelSplit> {
    if b == 0 || n == 0 {
        return Err(Error::Invalid("level and denominator must be positive".into()));
    }
    if gcd(a as i128, b as i128) != 1 {
        return Err(Error::Invalid(format!("gcd({a}, {b}) ≠ 1")));
    }
    let (mut n0, mut n1, mut n2, mut b2) = (1, 1, 1, 1);
    let mut primes = Vec::new();
    for (p, n_p) in factor(n) {
        let (v_b, _) = split_p(b as i128, p);
        let pn = ipow(p, n_p) as u64;
        let branch = if v_b == 0 {
            n0 *= pn;
            Branch::N0
        } else if v_b < n_p {
            n1 *= pn;
            Branch::N1
        } else {
            n2 *= pn;
            b2 *= ipow(p, v_b) as u64;
            Branch::N2
        };
        primes.push(PrimeBranch { p, n_p, v_b, branch });
    }
    let b1 = gcd(b as i128, n1 as i128) as u64;
    let b0 = b / (b1 * b2);
    Ok(LevelSplit { n0, n1, n2, b0, b1, b2, primes })
}

/// Dual-sum cut: stop after `consecutive` terms below `relative` × max, or
/// below the quadrature roundoff floor `roundoff` · 2π · (B − A) · max|W̃_l|.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TruncationPolicy {
    pub consecutive: usize,
    pub relative: f64,
    pub roundoff: f64,
    /// Hard cap on dual terms per c.
    pub max_terms: u64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { consecutive: 20, relative: 1e-13, roundoff: 1e-16, max_terms: 5_000_000 }
    }
}

/// How the places p | N₁ are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RhsPath {
    /// Full form when N₁ > 1, rough form otherwise.
    #[default]
    Auto,
    /// Local Whittaker values W(g_{t,l,v}) directly.
    Rough,
    /// Expansion Σ_μ c_{t,l}(μ) μ(v) through the c-constants.
    Full,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VoronoiOptions {
    pub tolerance: f64,
    pub variant: TableVariant,
    pub path: RhsPath,
    pub policy: TruncationPolicy,
    /// Sensitivity sentinel: uses e(+·) in place of e(−·) in the dual phase.
    pub flip_phase: bool,
    /// Sensitivity sentinel: negates η.
    pub flip_epsilon: bool,
    /// Every n-th archimedean value is recomputed on a doubled grid.
    pub quadrature_check_stride: u64,
}

impl Default for VoronoiOptions {
    fn default() -> Self {
        VoronoiOptions {
            tolerance: 1e-6,
            variant: TableVariant::Corrected,
            path: RhsPath::Auto,
            policy: TruncationPolicy::default(),
            flip_phase: false,
            flip_epsilon: false,
            quadrature_check_stride: 97,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VoronoiInstance {
    pub form: QExpansion,
    pub l: u64,
    pub a: i64,
    pub b: u64,
    pub w_inf: SmoothWindow,
    pub w_l: UnitBruhatFunction,
    pub options: VoronoiOptions,
}

impl VoronoiInstance {
    pub fn new(form: QExpansion, l: u64, a: i64, b: u64, w_inf: SmoothWindow, w_l: UnitBruhatFunction) -> Result<Self> {
        if !is_prime(l) || l == 2 {
            return Err(Error::UnsupportedPrime(l));
        }
        if b % l == 0 {
            return Err(Error::Invalid(format!("l = {l} divides b = {b}")));
        }
        if w_l.l != l {
            return Err(Error::PrimeMismatch(w_l.l, l));
        }
        if gcd(a as i128, b as i128) != 1 {
            return Err(Error::Invalid(format!("gcd({a}, {b}) ≠ 1")));
        }
        Ok(VoronoiInstance { form, l, a, b, w_inf, w_l, options: VoronoiOptions::default() })
    }

    pub fn with_options(mut self, options: VoronoiOptions) -> Self {
        self.options = options;
        self
    }

    /// Level away from l.
    pub fn level(&self) -> u64 {
        let (_, rest) = split_p(self.form.level as i128, self.l);
        rest as u64
    }

    pub fn split(&self) -> Result<LevelSplit> {
        split_level(self.level(), self.a, self.b)
    }

    pub fn archimedean(&self) -> Result<ArchimedeanType> {
        ArchimedeanType::discrete(self.form.weight)
    }
}

/// Σ e(−am/b) λ(m) W_∞(m) W_l(m) over m ∈ supp W_∞.
pub fn lhs_sum(inst: &VoronoiInstance) -> Result<Complex64> {
    let lo = inst.w_inf.a.ceil().max(1.0) as u64;
    let hi = inst.w_inf.b.floor() as u64;
    let mut acc = ZERO;
    for m in lo..=hi {
        let wl = inst.w_l.eval(m as i128);
        if wl == ZERO {
            continue;
        }
        let wi = inst.w_inf.eval(m as f64);
        if wi == ZERO {
            continue;
        }
        let phase = e_frac(-(inst.a as i128) * m as i128, inst.b as i128);
        acc += phase * inst.form.normalized_lambda(m)? * wi * wl;
    }
    Ok(acc)
}

/// η(π,a,b) = Π_{p|N₀} ε(1/2, π_p) Π_{p|b₀N₂} ω_{π,p}(−ab).
pub fn eta_unit(inst: &VoronoiInstance, split: &LevelSplit) -> Result<Complex64> {
    let mut eta = ONE;
    for pb in split.primes_in(Branch::N0) {
        eta *= inst.form.local_representation(pb.p)?.epsilon()?;
    }
    let ab = -(inst.a as i128) * inst.b as i128;
    let mut ps: Vec<u64> = factor(split.b0).into_iter().map(|f| f.0).collect();
    ps.extend(split.primes_in(Branch::N2).map(|x| x.p));
    // trivial nebentypus: every ω_p is trivial
    for p in ps.into_iter().filter(|_| inst.form.nebentypus.is_some()) {
        eta *= inst.form.local_representation(p)?.central().eval(ab, 1)?;
    }
    if (eta.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidEta(format!("|η| = {}", eta.norm())));
    }
    Ok(eta)
}

/// Per-c record of the dual sum.
#[derive(Clone, Debug, Serialize)]
pub struct LevelRecord {
    pub c: i64,
    /// Last dual index m examined.
    pub m_last: u64,
    pub terms: u64,
    #[serde(serialize_with = "ser_complex")]
    pub partial: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualSum {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub c_min: i64,
    pub c_cut: i64,
    pub levels: Vec<LevelRecord>,
    /// Predicted vanishing of W̃_l at c_min − 1, c_min − 2.
    pub guard_ok: bool,
    #[serde(serialize_with = "ser_f64")]
    pub tail_estimate: f64,
    #[serde(serialize_with = "ser_f64")]
    pub quadrature_error: f64,
    pub transforms: u64,
    pub path: RhsPath,
    #[serde(serialize_with = "ser_complex")]
    pub eta: Complex64,
    pub max_m: u64,
}

struct N1Place {
    p: u64,
    rep: LocalRepresentation,
    l_p: u32,
    modulus: i128,
    b_rest_inv: i128,
    d_unit_inv: i128,
    v_d: u32,
    l_pow: i128,
    l_inv: i128,
    cache: HashMap<(i64, i128), Complex64>,
}

impl N1Place {
    fn factor(&mut self, inst: &VoronoiInstance, c: i64, m: u64, path: RhsPath) -> Result<Complex64> {
        let (vm, mu) = split_p(m as i128, self.p);
        let t = vm as i64 - self.v_d as i64;
        let md = self.modulus;
        let lc = if c >= 0 { pow_mod_i(self.l_pow, c as u32, md) } else { pow_mod_i(self.l_inv, (-c) as u32, md) };
        let u = (mu.rem_euclid(md) * lc % md) * self.d_unit_inv % md;
        let uinv = inv_mod(u, md).ok_or(Error::Zero)?;
        let w = ((inst.a as i128).rem_euclid(md) * self.b_rest_inv % md) * uinv % md;
        let key_mod = (self.p as i128).pow(self.l_p.max(1));
        let key = (t, w % key_mod);
        let wv = match self.cache.get(&key) {
            Some(v) => *v,
            None => {
                let v = match path {
                    RhsPath::Full => {
                        let mut acc = ZERO;
                        for mu in characters_mod(self.p, self.l_p)? {
                            let cc = c_coefficient(&self.rep, t, self.l_p, &mu, inst.options.variant)?;
                            if cc != ZERO {
                                acc += cc * mu.dirichlet(w);
                            }
                        }
                        acc
                    }
                    _ => whittaker_at_with(&self.rep, t, self.l_p, w, inst.options.variant)?,
                };
                self.cache.insert(key, v);
                v
            }
        };
        if wv == ZERO {
            return Ok(ZERO);
        }
        let om = self.rep.central().unit.dirichlet(u);
        Ok((self.p as f64).powf(t as f64 / 2.0) * om * wv)
    }
}

fn pow_mod_i(b: i128, e: u32, m: i128) -> i128 {
    let mut r = 1 % m;
    for _ in 0..e {
        r = r * b % m;
    }
    r
}

/// The dual side. `path` selects how places p | N₁ are evaluated.
pub fn rhs_sum(inst: &VoronoiInstance, split: &LevelSplit, path: RhsPath) -> Result<DualSum> {
    let path = match path {
        RhsPath::Auto if split.n1 > 1 => RhsPath::Full,
        RhsPath::Auto => RhsPath::Rough,
        p => p,
    };
    let opts = inst.options;
    let arch = inst.archimedean()?;
    let l = inst.l;
    let d = split.dual_denominator();
    let q = (split.b0 * split.b2) as i128;
    let inv = inv_mod(inst.a as i128 * split.n0 as i128 * split.n1 as i128, q)
        .ok_or_else(|| Error::Invalid("aN₀N₁ not invertible mod b₀b₂".into()))?;
    let mut eta = eta_unit(inst, split)?;
    if opts.flip_epsilon {
        eta = -eta;
    }
    if inst.form.nebentypus.is_some() && split.n2 > 1 {
        return Err(Error::Unsupported("λ_{π^{N₂}} for nontrivial central character".into()));
    }
    let pref = eta / ((split.b0 * split.b2) as f64 * (split.n0 as f64).sqrt());

    let pi_l = inst.form.local_representation(l)?;
    let kw = inst.w_l.kappa.max(pi_l.central().conductor());
    let c_min = -(2 * kw as i64).max(pi_l.conductor() as i64);
    let table = HankelTable::build(&inst.w_l, &pi_l, c_min + 60)?;
    let lk = (l as i128).pow(table.kappa);
    let units: Vec<i128> = (1..lk).filter(|u| u % l as i128 != 0).collect();
    let mut guard_ok = table.vmin <= c_min - 2;
    for j in [c_min - 2, c_min - 1] {
        for &u in &units {
            if table.value(j, u)? != ZERO {
                guard_ok = false;
            }
        }
    }
    let d_inv_l = inv_mod(d as i128, lk).ok_or(Error::Zero)?;

    let mut places = Vec::new();
    for pb in split.primes_in(Branch::N1) {
        let p = pb.p;
        let modulus = (p as i128).pow(pb.n_p.max(pb.v_b));
        let (v_d, d_unit) = split_p(d as i128, p);
        let (_, b_rest) = split_p(inst.b as i128, p);
        places.push(N1Place {
            p,
            rep: inst.form.local_representation(p)?,
            l_p: pb.v_b,
            modulus,
            b_rest_inv: inv_mod(b_rest, modulus).ok_or(Error::Zero)?,
            d_unit_inv: inv_mod(d_unit, modulus).ok_or(Error::Zero)?,
            v_d,
            l_pow: l as i128 % modulus,
            l_inv: inv_mod(l as i128, modulus).ok_or(Error::Zero)?,
            cache: HashMap::new(),
        });
    }
    let n1_primes: Vec<u64> = places.iter().map(|x| x.p).collect();

    let mut value = ZERO;
    let mut levels = Vec::new();
    let mut max_metric = 0.0f64;
    let mut y_at_max = 0.0f64;
    let mut tail = 0.0f64;
    let mut qerr = 0.0f64;
    let mut transforms = 0u64;
    let mut max_m = 0u64;
    let mut c_cut = table.vmax;
    let lf = l as f64;
    let floor = opts.policy.roundoff * 2.0 * std::f64::consts::PI * (inst.w_inf.b - inst.w_inf.a);
    for c in c_min..=table.vmax {
        let row_max = units.iter().map(|&u| table.value(c, u).map(|v| v.norm())).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
        if row_max == 0.0 {
            levels.push(LevelRecord { c, m_last: 0, terms: 0, partial: ZERO });
            continue;
        }
        let lc = if c >= 0 { pow_mod_i(l as i128 % q.max(1), c as u32, q) } else { pow_mod_i(inv_mod(l as i128, q).unwrap_or(0), (-c) as u32, q) };
        let scale = lf.powi(c as i32) / d as f64;
        let mut partial = ZERO;
        let mut run = 0usize;
        let mut run_sum = 0.0;
        let mut level_live = false;
        let mut m = 0u64;
        let mut terms = 0u64;
        loop {
            m += 1;
            if m % l == 0 {
                continue;
            }
            if terms >= opts.policy.max_terms {
                return Err(Error::Invalid(format!("dual sum exceeded {} terms at c = {c}", opts.policy.max_terms)));
            }
            terms += 1;
            let y = scale * m as f64;
            let n = default_nodes(&inst.w_inf, y);
            let wi = hankel_fixed(&inst.w_inf, arch, Sign::Plus, y, n)?;
            transforms += 1;
            if opts.quadrature_check_stride > 0 && transforms % opts.quadrature_check_stride == 0 {
                let fine = hankel_fixed(&inst.w_inf, arch, Sign::Plus, y, 2 * n)?;
                qerr = qerr.max((fine - wi).norm() * row_max);
            }
            let metric = wi.norm() * row_max;
            if metric > max_metric {
                max_metric = metric;
                y_at_max = y;
            }
            let threshold = (opts.policy.relative * max_metric).max(floor * row_max);
            if metric < threshold && y > y_at_max {
                run += 1;
                run_sum += metric;
                if run >= opts.policy.consecutive {
                    break;
                }
            } else {
                run = 0;
                run_sum = 0.0;
                level_live = true;
            }
            if wi == ZERO {
                continue;
            }
            let u = (m as i128 % lk) * d_inv_l % lk;
            let wl = table.value(c, u)?;
            if wl == ZERO {
                continue;
            }
            let mut local = ONE;
            for pl in places.iter_mut() {
                local *= pl.factor(inst, c, m, path)?;
            }
            if local == ZERO {
                continue;
            }
            let mut m_red = m;
            for &p in &n1_primes {
                m_red = split_p(m_red as i128, p).1 as u64;
            }
            max_m = max_m.max(m_red);
            let lam = inst.form.normalized_lambda(m_red)?;
            if lam == ZERO {
                continue;
            }
            let num = lc * (m as i128 % q) % q * inv % q;
            let phase = if q == 1 { ONE } else { e_frac(if opts.flip_phase { -num } else { num }, q) };
            partial += phase * lam * wi * wl * local;
        }
        tail = tail.max(run_sum);
        value += partial;
        levels.push(LevelRecord { c, m_last: m, terms, partial });
        if !level_live {
            c_cut = c;
            break;
        }
    }
    Ok(DualSum {
        value: value * pref,
        c_min,
        c_cut,
        levels,
        guard_ok,
        tail_estimate: tail * pref.norm(),
        quadrature_error: qerr * pref.norm(),
        transforms,
        path,
        eta,
        max_m,
    })
}

/// Proposition form: requires N₁ = 1.
pub fn rhs_sum_rough(inst: &VoronoiInstance, split: &LevelSplit) -> Result<DualSum> {
    if split.n1 != 1 {
        return Err(Error::Unsupported("rough form needs N₁ = 1; use the full form".into()));
    }
    rhs_sum(inst, split, RhsPath::Rough)
}

/// Theorem form with the c-constant expansion at p | N₁.
pub fn rhs_sum_full(inst: &VoronoiInstance, split: &LevelSplit) -> Result<DualSum> {
    rhs_sum(inst, split, RhsPath::Full)
}

#[derive(Clone, Debug, Serialize)]
pub struct VoronoiReport {
    pub form: String,
    pub l: u64,
    pub a: i64,
    pub b: u64,
    pub window: SmoothWindow,
    pub split: LevelSplit,
    #[serde(serialize_with = "ser_complex")]
    pub lhs: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub rhs: Complex64,
    #[serde(serialize_with = "ser_f64")]
    pub abs_error: f64,
    #[serde(serialize_with = "ser_f64")]
    pub rel_error: f64,
    #[serde(serialize_with = "ser_f64")]
    pub tolerance: f64,
    pub pass: bool,
    pub dual: DualSum,
    pub policy: TruncationPolicy,
    pub variant: TableVariant,
    pub branches: Vec<Branch>,
    pub runtime_ms: u128,
}

pub fn verify(inst: &VoronoiInstance) -> Result<VoronoiReport> {
    let start = Instant::now();
    let split = inst.split()?;
    let lhs = lhs_sum(inst)?;
    let dual = rhs_sum(inst, &split, inst.options.path)?;
    let abs_error = (lhs - dual.value).norm();
    let rel_error = if lhs.norm() > 0.0 { abs_error / lhs.norm() } else { abs_error };
    let pass = rel_error <= inst.options.tolerance && dual.guard_ok;
    let mut branches: Vec<Branch> = split.primes.iter().map(|p| p.branch).collect();
    branches.dedup();
    Ok(VoronoiReport {
        form: inst.form.label.clone(),
        l: inst.l,
        a: inst.a,
        b: inst.b,
        window: inst.w_inf,
        lhs,
        rhs: dual.value,
        abs_error,
        rel_error,
        tolerance: inst.options.tolerance,
        pass,
        policy: inst.options.policy,
        variant: inst.options.variant,
        split,
        dual,
        branches,
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// Rough upper bound on the dual index needed: scans y geometrically for the
/// point past which |W̃_∞| stays below the truncation threshold.
pub fn dual_cutoff_y(w: &SmoothWindow, arch: ArchimedeanType, relative: f64) -> Result<f64> {
    let mut y = 1e-3 / w.b;
    let mut best = 0.0f64;
    let mut quiet = 0;
    let mut last_loud = y;
    while quiet < 48 {
        let v = hankel_fixed(w, arch, Sign::Plus, y, default_nodes(w, y))?.norm();
        if v > best {
            best = v;
        }
        if v >= relative * best {
            quiet = 0;
            last_loud = y;
        } else {
            quiet += 1;
        }
        y *= 1.05;
        if y > 1e12 {
            break;
        }
    }
    Ok(last_loud * 1.05)
}

/// Coefficients needed for both sides of an instance of `form_level`.
pub fn coefficients_needed(level: u64, l: u64, a: i64, b: u64, w: &SmoothWindow, weight: u32, c_min: i64) -> Result<usize> {
    let (_, rest) = split_p(level as i128, l);
    let split = split_level(rest as u64, a, b)?;
    let y = dual_cutoff_y(w, ArchimedeanType::discrete(weight)?, 1e-13)?;
    let d = split.dual_denominator() as f64;
    let dual = y * d * (l as f64).powi(-c_min as i32) * 1.5;
    Ok((dual.max(w.b) as usize) + 256)
}

/// The catalog form `name` with enough coefficients for an instance.
pub fn sized_form(name: &str, l: u64, a: i64, b: u64, w_inf: &SmoothWindow, w_l: &UnitBruhatFunction) -> Result<QExpansion> {
    let probe = catalog(name, 32)?;
    let pi_l = probe.local_representation(l)?;
    let kw = w_l.kappa.max(pi_l.central().conductor());
    let c_min = -(2 * kw as i64).max(pi_l.conductor() as i64);
    let n = coefficients_needed(probe.level, l, a, b, w_inf, probe.weight, c_min)?;
    catalog(name, n)
}

/// Runs `verify` on a catalog form, doubling the coefficient table whenever
/// the dual sum outruns the size estimate.
pub fn verify_catalog(
    name: &str,
    l: u64,
    a: i64,
    b: u64,
    w_inf: SmoothWindow,
    w_l: UnitBruhatFunction,
    options: VoronoiOptions,
) -> Result<VoronoiReport> {
    let mut form = sized_form(name, l, a, b, &w_inf, &w_l)?;
    loop {
        let n = form.n_max();
        let inst = VoronoiInstance::new(form, l, a, b, w_inf, w_l.clone())?.with_options(options);
        match verify(&inst) {
            Err(Error::OutOfRange { .. }) if n < 1 << 25 => form = catalog(name, 2 * n)?,
            r => return r,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_examples() {
        let s = split_level(11, 1, 7).unwrap();
        assert_eq!((s.n0, s.n1, s.n2), (11, 1, 1));
        let s = split_level(11, 1, 77).unwrap();
        assert_eq!((s.n0, s.n1, s.n2, s.b0, s.b2), (1, 1, 11, 7, 11));
        let s = split_level(9, 1, 3).unwrap();
        assert_eq!((s.n0, s.n1, s.n2, s.b1, s.b0), (1, 9, 1, 3, 1));
        assert_eq!(s.dual_denominator(), 27);
        assert!(split_level(9, 3, 3).is_err());
    }

    #[test]
    fn branch_exclusivity() {
        for n in 1..300u64 {
            for b in 1..60u64 {
                let s = split_level(n, 1, b).unwrap();
                assert_eq!(s.n0 * s.n1 * s.n2, n);
                assert_eq!(s.b0 * s.b1 * s.b2, b);
                assert_eq!(s.primes.len(), factor(n).len());
            }
        }
    }

    #[test]
    fn factor_small() {
        assert_eq!(factor(5929), vec![(7, 2), (11, 2)]);
        assert_eq!(factor(1), vec![]);
        assert_eq!(factor(97), vec![(97, 1)]);
    }
}
