//! Local ingredients against independently known values.

use vorlab::characters::{epsilon_factor, MultiplicativeCharacter};
use vorlab::hankel::{hankel_transform, ArchimedeanType, Sign, SmoothWindow};
use vorlab::newforms::catalog;
use vorlab::Complex64;

/// Quadratic Gauss sums: τ = √p or i√p, and ψ(x) = e(−x/p) contributes χ(−1).
#[test]
fn quadratic_epsilon() {
    let i = Complex64::i();
    for (p, want) in [(3, -i), (5, Complex64::new(1.0, 0.0)), (7, -i), (13, Complex64::new(1.0, 0.0))] {
        let eps = epsilon_factor(&MultiplicativeCharacter::quadratic(p).unwrap()).unwrap();
        assert!((eps - want).norm() < 1e-12, "p={p}: {eps}");
    }
}

#[test]
fn ramanujan_tau_and_level_11() {
    let d = catalog("delta", 30).unwrap();
    let tau = [(2, -24), (3, 252), (5, 4830), (7, -16744), (11, 534612), (13, -577738), (23, 18643272)];
    for (n, t) in tau {
        assert_eq!(d.integer_coefficient(n).unwrap(), t, "tau({n})");
    }
    let f = catalog("f11", 30).unwrap();
    let ap = [(2, -2), (3, -1), (5, 1), (7, -2), (11, 1), (13, 4), (17, -2), (19, 0), (23, -1), (29, 0)];
    for (p, a) in ap {
        assert_eq!(f.integer_coefficient(p).unwrap(), a, "a({p})");
    }
}

#[test]
fn twisted_delta_coefficients() {
    let d = catalog("delta", 40).unwrap();
    let t = catalog("delta_x3", 40).unwrap();
    assert_eq!(t.level, 9);
    for n in 1..=40u64 {
        let chi = match n % 3 {
            0 => 0,
            1 => 1,
            _ => -1,
        };
        assert_eq!(t.integer_coefficient(n).unwrap(), chi * d.integer_coefficient(n).unwrap(), "n={n}");
    }
}

/// i^k 2π ∫ J_{k−1}(4π√(xy)) F(x) dx by adaptive quadrature in mpmath (30 digits).
#[test]
fn hankel_transform_values() {
    let cases = [
        (12, 2.5, 50.0, 100.0, 0.0010308363705646807209),
        (2, 0.37, 20.0, 40.0, 0.22261355885407542864),
        (12, 0.05, 50.0, 100.0, -9.5543624452598514955),
    ];
    for (k, y, a, b, want) in cases {
        let w = SmoothWindow::bump(a, b).unwrap();
        let h = hankel_transform(&w, ArchimedeanType::discrete(k).unwrap(), Sign::Plus, y).unwrap();
        assert!(h.target_met);
        assert!((h.value - Complex64::new(want, 0.0)).norm() < 1e-12 * want.abs().max(1.0), "k={k} y={y}: {}", h.value);
    }
}
