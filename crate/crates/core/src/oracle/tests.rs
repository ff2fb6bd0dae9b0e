use super::*;
use crate::toric::{BlowUp, BundleSpec, CenterSpec, PicBasis};
use proptest::prelude::*;

fn binom(n: i64, k: i64) -> u64 {
    if k < 0 || n < k {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Bott: `h^0(O(d)) = C(d+n, n)`, `h^n(O(d)) = C(-d-1, n)`.
fn bott(n: usize, d: i64) -> HVector {
    let mut h = HVector::zeros(n + 1);
    h.0[0] = binom(d + n as i64, n as i64);
    h.0[n] += binom(-d - 1, n as i64);
    h
}

/// Lattice points `u` in a fixed wide box with `<u, v> >= -a` for every ray.
fn polytope_count(fan: &Fan, coeffs: &[i64], radius: i64) -> u64 {
    let n = fan.dim();
    let mut count = 0;
    let mut u = vec![-radius; n];
    loop {
        let ok = fan
            .rays()
            .iter()
            .zip(coeffs)
            .all(|(r, &a)| r.vector.iter().zip(&u).map(|(x, y)| x * y).sum::<i64>() >= -a);
        if ok {
            count += 1;
        }
        let mut k = 0;
        while k < n && u[k] == radius {
            u[k] = -radius;
            k += 1;
        }
        if k == n {
            return count;
        }
        u[k] += 1;
    }
}

/// The cone-counting formula evaluated over a fixed wide box, with no
/// arrangement-based bounds and no caching.
fn brute_force(fan: &Fan, coeffs: &[i64], radius: i64) -> HVector {
    let n = fan.dim();
    let cones: Vec<u64> = fan
        .cones()
        .iter()
        .map(|c| c.iter().fold(0u64, |m, &i| m | (1 << i)))
        .collect();
    let mut h = HVector::zeros(n + 1);
    let mut u = vec![-radius; n];
    loop {
        let mut mask = 0u64;
        for (i, (r, &a)) in fan.rays().iter().zip(coeffs).enumerate() {
            let d: i64 = r.vector.iter().zip(&u).map(|(x, y)| x * y).sum();
            if d < -a {
                mask |= 1 << i;
            }
        }
        let r = reduced_cohomology_ranks(&SupportComplex::new(mask, &cones), n - 1);
        for (i, x) in r.into_iter().enumerate() {
            h.0[i] += x;
        }
        let mut k = 0;
        while k < n && u[k] == radius {
            u[k] = -radius;
            k += 1;
        }
        if k == n {
            return h;
        }
        u[k] += 1;
    }
}

fn p1xp1_blown_up_at_point() -> Fan {
    BlowUp::new(
        &BundleSpec::new(1, vec![0, 0]).unwrap(),
        &CenterSpec::parse("b1,f1"),
    )
    .unwrap()
    .fan
}

#[test]
fn p1_minus_two() {
    let fan = Fan::projective_space(1);
    let h = cohomology_dims(&fan, &PicClass::projective(-2)).unwrap();
    assert_eq!(h.0, vec![0, 1]);
}

#[test]
fn point_has_one_section() {
    let fan = Fan::split_bundle(0, &[0]);
    assert_eq!(
        cohomology_dims(&fan, &PicClass::point()).unwrap().0,
        vec![1]
    );
}

#[test]
fn projective_spaces_match_bott() {
    for n in 1..=3 {
        let fan = Fan::projective_space(n);
        for d in -5..=5 {
            assert_eq!(
                cohomology_dims(&fan, &PicClass::projective(d)).unwrap(),
                bott(n, d),
                "P^{n}, O({d})"
            );
        }
    }
}

#[test]
fn blown_up_quadric_example() {
    let fan = p1xp1_blown_up_at_point();
    let cls = PicClass::blow_up(1, 1, -1);
    let h = cohomology_dims(&fan, &cls).unwrap();
    assert_eq!(h.0, vec![3, 0, 0]);
    assert_eq!(h, brute_force(&fan, &fan.tdivisor_lift(&cls), 8));
}

#[test]
fn matches_brute_force_on_small_blow_up() {
    let fan = p1xp1_blown_up_at_point();
    for a in -3..=3 {
        for b in -3..=3 {
            for k in -2..=2 {
                let cls = PicClass::blow_up(a, b, k);
                let coeffs = fan.tdivisor_lift(&cls);
                assert_eq!(
                    cohomology_dims(&fan, &cls).unwrap(),
                    brute_force(&fan, &coeffs, 12),
                    "{cls:?}"
                );
            }
        }
    }
}

#[test]
fn matches_brute_force_on_hirzebruch_threefold_blow_up() {
    let spec = BundleSpec::new(2, vec![0, 1]).unwrap();
    let fan = BlowUp::new(&spec, &CenterSpec::parse("b1,f1")).unwrap().fan;
    for a in -2..=2 {
        for b in -2..=2 {
            for k in -1..=2 {
                let cls = PicClass::blow_up(a, b, k);
                let coeffs = fan.tdivisor_lift(&cls);
                assert_eq!(
                    cohomology_dims(&fan, &cls).unwrap(),
                    brute_force(&fan, &coeffs, 8),
                    "{cls:?}"
                );
            }
        }
    }
}

#[test]
fn h0_counts_polytope_points() {
    let spec = BundleSpec::new(1, vec![0, 2]).unwrap();
    let fan = Fan::projective_bundle(&spec).unwrap();
    for a in -1..=4 {
        for b in 0..=3 {
            let cls = PicClass::bundle(a, b);
            let h = cohomology_dims(&fan, &cls).unwrap();
            assert_eq!(
                h.0[0],
                polytope_count(&fan, &fan.tdivisor_lift(&cls), 20),
                "{cls:?}"
            );
        }
    }
}

#[test]
fn serre_duality_on_blow_ups() {
    for (s, deg, center) in [
        (1, vec![0, 1], "b1,f1"),
        (2, vec![0, 1], "b1,b2"),
        (1, vec![0, 0, 1], "b0,f1,f2"),
    ] {
        let b = BlowUp::new(
            &BundleSpec::new(s, deg).unwrap(),
            &CenterSpec::parse(center),
        )
        .unwrap();
        let oracle = Oracle::new(b.fan.clone());
        let kx = b.canonical_class();
        let n = b.fan.dim();
        for a in -2..=2 {
            for bb in -2..=2 {
                for k in -1..=2 {
                    let cls = PicClass::blow_up(a, bb, k);
                    let h = oracle.cohomology(&cls).unwrap();
                    let dual = oracle.cohomology(&(&kx - &cls)).unwrap();
                    for i in 0..=n {
                        assert_eq!(h.get(i), dual.get(n - i), "{center}: {cls:?} in degree {i}");
                    }
                }
            }
        }
    }
}

#[test]
fn explicit_divisor_entry_point_agrees() {
    let fan = p1xp1_blown_up_at_point();
    let cls = PicClass::blow_up(2, -1, 1);
    assert_eq!(
        cohomology_of_divisor(&fan, &fan.tdivisor_lift(&cls)).unwrap(),
        cohomology_dims(&fan, &cls).unwrap()
    );
}

#[test]
fn euler_pairing_is_chi_of_difference() {
    let fan = Fan::projective_space(2);
    let a = PicClass::projective(1);
    let b = PicClass::projective(-2);
    // chi(O(-3)) on P^2 is 1
    assert_eq!(euler_pairing(&fan, &a, &b).unwrap(), 1);
}

#[test]
fn basis_mismatch_is_reported() {
    let fan = Fan::projective_space(2);
    let err = cohomology_dims(&fan, &PicClass::bundle(0, 0)).unwrap_err();
    assert!(matches!(err, OracleError::BasisMismatch(_)));
}

#[test]
fn disk_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let fan = p1xp1_blown_up_at_point();
    let cls = PicClass::blow_up(1, 1, -1);
    let first = Oracle::new(fan.clone()).with_disk_cache(Some(DiskCache::new(dir.path())));
    let h = first.cohomology(&cls).unwrap();
    let key = DiskCache::key(&fan.canonical_json(), &cls);
    assert_eq!(DiskCache::new(dir.path()).get(&key), Some(h.clone()));
    let second = Oracle::new(fan).with_disk_cache(Some(DiskCache::new(dir.path())));
    assert_eq!(second.cohomology(&cls).unwrap(), h);
}

#[test]
fn hvector_helpers() {
    let mut h = HVector(vec![1, 2, 0]);
    assert_eq!(h.euler(), -1);
    h.add_shifted(&HVector(vec![1, 1]), 2);
    assert_eq!(h.0, vec![1, 2, 1, 1]);
    assert!(!h.is_acyclic());
    assert!(HVector::unit(3, 0).is_acyclic());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Cohomology depends only on the class: adding a principal divisor
    /// `div(chi^m)` to the lift changes nothing.
    #[test]
    fn class_invariance(a in -3i64..=3, b in -3i64..=3, k in -2i64..=2, m in proptest::collection::vec(-3i64..=3, 2)) {
        let fan = p1xp1_blown_up_at_point();
        prop_assert_eq!(fan.basis(), PicBasis::BlowUp);
        let cls = PicClass::blow_up(a, b, k);
        let mut coeffs = fan.tdivisor_lift(&cls);
        for (c, r) in coeffs.iter_mut().zip(fan.rays()) {
            *c += r.vector.iter().zip(&m).map(|(x, y)| x * y).sum::<i64>();
        }
        prop_assert_eq!(fan.class_of_divisor(&coeffs), cls.clone());
        prop_assert_eq!(cohomology_of_divisor(&fan, &coeffs).unwrap(), cohomology_dims(&fan, &cls).unwrap());
    }
}
