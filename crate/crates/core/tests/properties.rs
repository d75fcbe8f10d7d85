use proptest::prelude::*;

use palinverse::forward::{eig_full, nearest_distance};
use palinverse::io::{format_complex, parse_complex, system_from_str, system_to_string};
use palinverse::iep::solve_iep_full;
use palinverse::numerics::{c, cr, diag, fro, CMatrix, Star, C64};
use palinverse::random::{random_cmatrix, rng};
use palinverse::structfact::star_factorize;
use palinverse::system::{PalindromicSystem, SymmetryClass};

fn class_strategy() -> impl Strategy<Value = SymmetryClass> {
    prop::sample::select(SymmetryClass::ALL.to_vec())
}

fn star_scalar(class: SymmetryClass, z: C64) -> C64 {
    match class.star {
        Star::Transpose => z,
        Star::Conjugate => z.conj(),
    }
}

fn star(class: SymmetryClass, m: &CMatrix) -> CMatrix {
    match class.star {
        Star::Transpose => m.transpose(),
        Star::Conjugate => m.adjoint(),
    }
}

fn evaluate(sys: &PalindromicSystem, lambda: C64) -> CMatrix {
    let eps = cr(f64::from(sys.class().epsilon));
    star(sys.class(), sys.a1()) * (lambda * lambda) + sys.a0() * lambda + sys.a1() * eps
}

/// A structured matrix of the kind the factorization expects, built directly from its definition.
fn structured(class: SymmetryClass, n: usize, rank: usize, seed: u64) -> CMatrix {
    let mut r = rng(seed);
    let g = random_cmatrix(&mut r, n, rank.max(1));
    let d = random_cmatrix(&mut r, rank.max(1), rank.max(1));
    let core = match (class.star, class.epsilon) {
        (Star::Transpose, 1) => &d - d.transpose(),
        (Star::Transpose, _) => &d + d.transpose(),
        // B⋆ = −εB: skew-Hermitian for ε = 1, Hermitian for ε = −1.
        (Star::Conjugate, 1) => &d - d.adjoint(),
        (Star::Conjugate, _) => &d + d.adjoint(),
    };
    let b = &g * core * star(class, &g);
    if rank == 0 {
        b * cr(0.0)
    } else {
        b
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coefficients_satisfy_the_palindromic_identity(class in class_strategy(), n in 1usize..6, seed: u64,
                                                     re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let lambda = c(re, im);
        prop_assume!(lambda.norm() > 0.1);
        let sys = PalindromicSystem::random(class, n, false, &mut rng(seed));
        // Q(λ)⋆ = ε λ⋆² Q(1/λ⋆)
        let lhs = star(class, &evaluate(&sys, lambda));
        let ls = star_scalar(class, lambda);
        let rhs = evaluate(&sys, cr(1.0) / ls) * (ls * ls * cr(f64::from(class.epsilon)));
        prop_assert!(fro(&(&lhs - &rhs)) <= 1e-12 * fro(&lhs).max(1.0));
    }

    #[test]
    fn spectrum_is_closed_under_pairing(class in class_strategy(), n in 1usize..7, seed: u64) {
        let sys = PalindromicSystem::random(class, n, false, &mut rng(seed));
        let eigs = eig_full(&sys).unwrap();
        prop_assert_eq!(eigs.values.len(), 2 * n);
        for &v in &eigs.values {
            let partner = class.partner(v);
            let d = nearest_distance(partner, &eigs.values) / partner.norm().max(1.0);
            prop_assert!(d <= 1e-6, "partner of {} missing by {:e}", v, d);
        }
    }

    #[test]
    fn factorization_reconstructs(class in class_strategy(), n in 1usize..9, rank_frac in 0.0f64..=1.0, seed: u64) {
        let mut rank = (rank_frac * n as f64).round() as usize;
        if class == SymmetryClass::T_PAL {
            rank -= rank % 2;
        }
        let b = structured(class, n, rank, seed);
        let f = star_factorize(&b, class).unwrap();
        prop_assert!(fro(&(f.reconstruct() - &b)) <= 1e-10 * fro(&b).max(1.0));
        prop_assert_eq!(f.rank(), rank);
        // Y must be invertible for the factorization to be a congruence.
        prop_assert!(f.y.clone().try_inverse().is_some());
    }

    #[test]
    fn complex_literals_round_trip(re in prop::num::f64::NORMAL | prop::num::f64::ZERO,
                                   im in prop::num::f64::NORMAL | prop::num::f64::ZERO) {
        let z = c(re, im);
        let back = parse_complex(&format_complex(z)).unwrap();
        prop_assert_eq!(back.re.to_bits(), z.re.to_bits());
        prop_assert_eq!(back.im.to_bits(), z.im.to_bits());
    }

    #[test]
    fn system_files_are_byte_stable(class in class_strategy(), n in 1usize..5, seed: u64) {
        let sys = PalindromicSystem::random(class, n, false, &mut rng(seed));
        let text = system_to_string(&sys);
        let back = system_from_str(&text).unwrap();
        prop_assert_eq!(system_to_string(&back), text);
    }

    #[test]
    fn solves_are_deterministic(class in class_strategy(), seed in 0u64..1000) {
        let lam = c(0.5, 0.3);
        let x = CMatrix::from_fn(1, 2, |_, j| cr(1.0 + j as f64));
        let t = diag(&[lam, class.partner(lam)]);
        let a = solve_iep_full(&x, &t, class, seed);
        let b = solve_iep_full(&x, &t, class, seed);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!(system_to_string(&a), system_to_string(&b)),
            (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
            _ => prop_assert!(false, "same seed, different outcome"),
        }
    }
}
