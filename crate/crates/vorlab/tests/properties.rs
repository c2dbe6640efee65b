use proptest::prelude::*;

use vorlab::characters::{characters_mod, MultiplicativeCharacter};
use vorlab::mellin::{mellin_inverse, mellin_spectrum, UnitBruhatFunction};
use vorlab::padic::inv_mod;
use vorlab::Complex64;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 11])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_mod_prime_power(p in prime(), n in 1u32..5, x in 1i128..100_000) {
        let m = (p as i128).pow(n);
        prop_assume!(x % p as i128 != 0);
        let y = inv_mod(x, m).unwrap();
        prop_assert_eq!((x * y).rem_euclid(m), 1);
    }

    #[test]
    fn characters_are_multiplicative(p in prime(), a in 1u32..4, idx in 0u64..1000, x in 1i128..10_000, y in 1i128..10_000) {
        let mu = MultiplicativeCharacter::new(p, a, idx % (p.pow(a - 1) * (p - 1))).unwrap();
        let lhs = mu.dirichlet(x * y);
        let rhs = mu.dirichlet(x) * mu.dirichlet(y);
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn mellin_inverts(p in prime(), kappa in 1u32..3, vals in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 121)) {
        let w = UnitBruhatFunction::from_fn(p, kappa, |x| {
            let (re, im) = vals[(x as usize) % vals.len()];
            Complex64::new(re, im)
        }).unwrap();
        let back = mellin_inverse(&mellin_spectrum(&w).unwrap()).unwrap();
        prop_assert!(w.max_diff(&back) < 1e-12);
    }

    /// Orthogonality of characters mod p^a summed over a unit.
    #[test]
    fn character_sum_detects_one(p in prime(), a in 1u32..3, x in 1i128..1000) {
        prop_assume!(x % p as i128 != 0);
        let m = (p as i128).pow(a);
        let s: Complex64 = characters_mod(p, a).unwrap().iter().map(|mu| mu.dirichlet(x)).sum();
        let want = if x.rem_euclid(m) == 1 { (p.pow(a - 1) * (p - 1)) as f64 } else { 0.0 };
        prop_assert!((s - want).norm() < 1e-9);
    }
}
