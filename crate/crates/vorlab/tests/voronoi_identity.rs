//! Voronoi identity beyond the acceptance instances: an independent left-hand
//! side, weights at l that are not indicators, and a single depth cell.

use std::f64::consts::PI;

use vorlab::characters::{psi_p, MultiplicativeCharacter};
use vorlab::depthlab::{assemble_l_s, w_l_s, DepthInstance};
use vorlab::hankel::SmoothWindow;
use vorlab::mellin::UnitBruhatFunction;
use vorlab::newforms::catalog;
use vorlab::padic::inv_mod;
use vorlab::voronoi::{lhs_sum, verify_catalog, VoronoiInstance, VoronoiOptions};
use vorlab::Complex64;

fn chi_bar_psi(l: u64) -> UnitBruhatFunction {
    let chi = MultiplicativeCharacter::new(l, 2, 1).unwrap();
    UnitBruhatFunction::from_fn(l, 2, |x| chi.dirichlet(x).conj() * psi_p(l, x, 2)).unwrap()
}

/// Σ e(−an/b) a(n) n^{−11/2} F(n/M) W_l(n) straight from integer coefficients
/// and the bump formula.
#[test]
fn lhs_matches_direct_sum() {
    let m = 300.0;
    let w = SmoothWindow::bump(m, 2.0 * m).unwrap();
    let wl = chi_bar_psi(3);
    let form = catalog("delta", 700).unwrap();
    let inst = VoronoiInstance::new(form.clone(), 3, 1, 2, w, wl.clone()).unwrap();
    let mut direct = Complex64::new(0.0, 0.0);
    for n in 301..600u64 {
        if n % 3 == 0 {
            continue;
        }
        let u = (n as f64 - m) / m;
        let bump = (4.0 - 1.0 / (u * (1.0 - u))).exp();
        let lambda = form.integer_coefficient(n).unwrap() as f64 / (n as f64).powf(5.5);
        let phase = Complex64::from_polar(1.0, -2.0 * PI * (n % 2) as f64 / 2.0);
        direct += phase * lambda * bump * wl.eval(n as i128);
    }
    let lib = lhs_sum(&inst).unwrap();
    assert!((lib - direct).norm() < 1e-12 * direct.norm(), "{lib} vs {direct}");
}

#[test]
fn character_weights_at_l() {
    let chi = MultiplicativeCharacter::new(3, 2, 1).unwrap();
    let conj = UnitBruhatFunction::from_fn(3, 2, |x| chi.dirichlet(x).conj()).unwrap();
    for wl in [conj, chi_bar_psi(3)] {
        let w = SmoothWindow::bump(300.0, 600.0).unwrap();
        let r = verify_catalog("delta", 3, 1, 2, w, wl, VoronoiOptions::default()).unwrap();
        assert!(r.pass && r.rel_error < 1e-9, "rel {:e}", r.rel_error);
        assert_eq!(r.dual.c_min, -4);
        assert!(r.dual.guard_ok);
    }
}

#[test]
fn modulated_window_level_11() {
    let w = SmoothWindow::modulated(2000.0, 4000.0, 0.0016).unwrap();
    let wl = UnitBruhatFunction::indicator(11, 1).unwrap();
    let r = verify_catalog("f11", 11, 1, 7, w, wl, VoronoiOptions::default()).unwrap();
    assert!(r.pass, "rel {:e}", r.rel_error);
}

/// b = 4 so that the dual phase is not real and the ψ flip is visible.
#[test]
fn sentinels_break_a_character_instance() {
    let w = SmoothWindow::bump(300.0, 600.0).unwrap();
    for options in [
        VoronoiOptions { flip_phase: true, ..Default::default() },
        VoronoiOptions { flip_epsilon: true, ..Default::default() },
    ] {
        let r = verify_catalog("delta", 3, 1, 4, w, chi_bar_psi(3), options).unwrap();
        assert!(r.rel_error > 1e-2, "rel {:e}", r.rel_error);
    }
    let r = verify_catalog("delta", 3, 1, 4, w, chi_bar_psi(3), VoronoiOptions::default()).unwrap();
    assert!(r.pass, "rel {:e}", r.rel_error);
}

/// One cell of the depth dissection at n_l = 4, q = 0: the Voronoi formula
/// applied to W_∞(s; ·) and W_l(s; ·) must reproduce L_s.
#[test]
fn depth_cell_through_voronoi() {
    let inst = DepthInstance::new(5, 4, 1, 0, 0, 100.0).unwrap();
    let d = inst.dissect().unwrap();
    let s = d.cells[0];
    let w = inst.w_inf(&s).unwrap();
    let ln = 25i128;
    let a = if s.b == 1 { 1 } else { (s.a as i128 * inv_mod(ln, s.b as i128).unwrap()).rem_euclid(s.b as i128) as i64 };
    let wl = UnitBruhatFunction::from_fn(5, 2, |x| w_l_s(&s, &inst, x)).unwrap();
    let r = verify_catalog("delta", 5, a, s.b, w, wl, VoronoiOptions::default()).unwrap();
    let form = catalog("delta", 256).unwrap();
    let l_s = assemble_l_s(&s, &inst.clone().with_form(form)).unwrap();
    assert!((r.lhs - l_s).norm() < 1e-12 * l_s.norm());
    assert!(r.rel_error < 1e-9, "rel {:e}", r.rel_error);
}
