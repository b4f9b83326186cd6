use proptest::prelude::*;
use subspace_rip::projection::{normalized_columns, quasi_ortho_report};
use subspace_rip::{
    make_pair, make_projector, make_set, orthonormality_error, principal_angles, project, DMatrix, PairSpec,
    ProjectionMode, SetMode, SubspaceFamily,
};

/// Feasible `(N, d1, d2, affinity)`.
fn feasible_spec() -> impl Strategy<Value = PairSpec> {
    (1usize..6, 0usize..5, 0usize..20, 0.0f64..=1.0, any::<u64>()).prop_map(|(d1, extra, slack, frac, seed)| {
        let d2 = d1 + extra;
        // A target of at most 1 keeps every rescaled cosine feasible.
        PairSpec::uniform(d1 + d2 + slack, d1, d2, frac, seed)
    })
}

proptest! {
    #[test]
    fn pair_round_trip(spec in feasible_spec()) {
        let pair = make_pair(&spec).unwrap();
        prop_assert!(orthonormality_error(pair.x1.basis()) < 1e-12);
        prop_assert!(orthonormality_error(pair.x2.basis()) < 1e-12);
        let measured = principal_angles(&pair.x1, &pair.x2).unwrap().affinity();
        prop_assert!((measured - spec.target_affinity).abs() < 1e-9);
        let again = make_pair(&spec).unwrap();
        prop_assert_eq!(pair.x1.basis(), again.x1.basis());
    }

    #[test]
    fn explicit_cosines_are_reproduced(c in prop::collection::vec(0.0f64..=1.0, 1..5), seed in any::<u64>()) {
        let d1 = c.len();
        let spec = PairSpec::explicit(3 * d1 + 2, d1 + 1, c.clone(), seed);
        let pair = make_pair(&spec).unwrap();
        let mut want = c;
        want.sort_by(|a, b| b.total_cmp(a));
        let got = principal_angles(&pair.x1, &pair.x2).unwrap();
        for (g, w) in got.cosines().iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-9);
        }
    }

    #[test]
    fn set_of_two_matches_pair(d in 1usize..4, slack in 0usize..10, aff in 0.0f64..=1.0, seed in any::<u64>()) {
        let n = 2 * d + slack;
        let set = make_set(n, d, 2, seed, &SetMode::Prescribed(vec![aff])).unwrap();
        let pair = make_pair(&PairSpec::uniform(n, d, d, aff, seed)).unwrap();
        prop_assert_eq!(set[0].basis(), pair.x1.basis());
        prop_assert_eq!(set[1].basis(), pair.x2.basis());
    }

    #[test]
    fn quasi_report_reconstructs(n in 20usize..60, d in 1usize..6, seed in any::<u64>()) {
        let x = make_set(200, d, 1, seed, &SetMode::Independent).unwrap().remove(0);
        let p = make_projector(n, 200, seed ^ 3).unwrap();
        let a = normalized_columns(&p, &x).unwrap();
        let r = quasi_ortho_report(&a).unwrap();
        prop_assert!(r.reconstruction_error < 1e-10);
        prop_assert!(orthonormality_error(&r.v) < 1e-10);
        for i in 0..d {
            prop_assert!(r.r_bar[(i, i)] == 0.0);
            for j in 0..i {
                prop_assert_eq!(r.u_bar[(i, j)], 0.0);
            }
        }
    }
}

#[test]
fn projector_is_deterministic_per_seed() {
    let a = make_projector(30, 80, 5).unwrap();
    let b = make_projector(30, 80, 5).unwrap();
    let c = make_projector(30, 80, 6).unwrap();
    assert_eq!(a.matrix(), b.matrix());
    assert_ne!(a.matrix(), c.matrix());
}

#[test]
fn projected_basis_spans_image() {
    let x = make_set(50, 3, 1, 9, &SetMode::Independent).unwrap().remove(0);
    let p = make_projector(20, 50, 1).unwrap();
    let y = project(&p, &x).unwrap();
    assert_eq!(y.basis().shape(), (20, 3));
    let image = p.matrix() * x.basis();
    let residual = &image - y.basis() * (y.basis().transpose() * &image);
    assert!(residual.norm() < 1e-10 * image.norm());
}

#[test]
fn family_modes_agree_on_shapes() {
    let members = make_set(40, 2, 3, 4, &SetMode::Independent).unwrap();
    let fam = SubspaceFamily::new(members).unwrap();
    for mode in [ProjectionMode::Full, ProjectionMode::Frame] {
        let out = fam.project(10, 7, mode).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|s| s.basis().shape() == (10, 2)));
    }
}

#[test]
fn repeated_column_is_rejected() {
    let a = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    assert!(quasi_ortho_report(&a).is_ok());
    let dup = DMatrix::from_column_slice(3, 2, &[0.6, 0.8, 0.0, 0.6, 0.8, 0.0]);
    assert!(quasi_ortho_report(&dup).is_err());
}
