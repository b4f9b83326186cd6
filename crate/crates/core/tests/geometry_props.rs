use proptest::prelude::*;
use subspace_rip::subspace::same_span;
use subspace_rip::{
    affinity, affinity_sq, distance, orthonormalize, principal_angles, random_orthonormal, DMatrix, Subspace,
};

fn subspace(ambient: usize, dim: usize, seed: u64) -> Subspace {
    Subspace::from_orthonormal(random_orthonormal(ambient, dim, seed).unwrap()).unwrap()
}

/// Triples in a common ambient space with dimensions in 1..=4.
fn triple() -> impl Strategy<Value = (Subspace, Subspace, Subspace)> {
    (5usize..=12, 1usize..=4, 1usize..=4, 1usize..=4, any::<u64>()).prop_map(|(n, a, b, c, seed)| {
        (subspace(n, a, seed), subspace(n, b, seed ^ 1), subspace(n, c, seed ^ 2))
    })
}

fn pair() -> impl Strategy<Value = (Subspace, Subspace)> {
    (2usize..=100, any::<u64>())
        .prop_flat_map(|(n, seed)| (Just(n), 1..=n.min(8), 1..=n.min(8), Just(seed)))
        .prop_map(|(n, d1, d2, seed)| (subspace(n, d1, seed), subspace(n, d2, seed.wrapping_add(7))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn metric_axioms((x, y, z) in triple()) {
        let dxy = distance(&x, &y).unwrap();
        let dyx = distance(&y, &x).unwrap();
        let dyz = distance(&y, &z).unwrap();
        let dxz = distance(&x, &z).unwrap();
        prop_assert!(dxy >= 0.0);
        prop_assert!((dxy - dyx).abs() <= 1e-12);
        prop_assert!(dxz <= dxy + dyz + 1e-10);
        prop_assert!(distance(&x, &x).unwrap() <= 1e-12);
    }

    #[test]
    fn zero_distance_iff_same_span(n in 3usize..10, d in 1usize..3, seed in any::<u64>()) {
        let x = subspace(n, d, seed);
        let mixed = x.basis() * random_orthonormal(d, d, seed ^ 5).unwrap();
        let y = orthonormalize(&mixed).unwrap();
        prop_assert!(same_span(&x, &y).unwrap());
        prop_assert!(distance(&x, &y).unwrap() < 1e-7);
        let z = subspace(n, d, seed ^ 9);
        prop_assert_eq!(same_span(&x, &z).unwrap(), distance(&x, &z).unwrap() < 1e-7);
    }

    #[test]
    fn distance_affinity_identity((x, y) in pair()) {
        let d = distance(&x, &y).unwrap();
        let a2 = affinity_sq(&x, &y).unwrap();
        let half = (x.dim() + y.dim()) as f64 / 2.0;
        prop_assert!((d * d + a2 - half).abs() <= 1e-10);
    }

    #[test]
    fn angles_symmetric_and_ordered((x, y) in pair()) {
        let a = principal_angles(&x, &y).unwrap();
        let b = principal_angles(&y, &x).unwrap();
        prop_assert_eq!(a.len(), x.dim().min(y.dim()));
        for (p, q) in a.cosines().iter().zip(b.cosines()) {
            prop_assert!((p - q).abs() <= 1e-12);
        }
        prop_assert!(a.cosines().windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(a.cosines().iter().all(|c| (0.0..=1.0).contains(c)));
        let aff = affinity(&x, &y).unwrap();
        prop_assert!((aff * aff - a.affinity_sq()).abs() <= 1e-10);
        prop_assert!(aff <= (x.dim().min(y.dim()) as f64).sqrt() + 1e-12);
    }

    #[test]
    fn affinity_is_basis_invariant((x, y) in pair(), seed in any::<u64>()) {
        let q = random_orthonormal(x.dim(), x.dim(), seed).unwrap();
        let rotated = orthonormalize(&(x.basis() * q)).unwrap();
        let before = affinity(&x, &y).unwrap();
        let after = affinity(&rotated, &y).unwrap();
        prop_assert!((before - after).abs() <= 1e-10);
    }
}

#[test]
fn ambient_mismatch_is_reported() {
    let a = subspace(4, 2, 1);
    let b = subspace(5, 2, 1);
    assert!(principal_angles(&a, &b).is_err());
    assert!(distance(&a, &b).is_err());
}

#[test]
fn coordinate_examples() {
    let e12 = Subspace::coordinate(4, &[0, 1]).unwrap();
    let e34 = Subspace::coordinate(4, &[2, 3]).unwrap();
    assert_eq!(affinity(&e12, &e34).unwrap(), 0.0);
    let line = Subspace::from_columns(&DMatrix::from_column_slice(3, 1, &[0.5, 3f64.sqrt() / 2.0, 0.0])).unwrap();
    let e1 = Subspace::coordinate(3, &[0]).unwrap();
    assert!((affinity(&line, &e1).unwrap() - 0.5).abs() < 1e-12);
}
