use std::f64::consts::PI;

use kp5_core::numtheory::{generate_admissible, pell_fundamental, AdmissibleIndex};
use kp5_core::resonance::{omega, resonance_kpi5, LatticeFrequency};
use kp5_core::spectral::{energy_norms, SpectralField, TorusGrid};
use num_bigint::BigInt;
use proptest::prelude::*;

fn nonzero(range: std::ops::RangeInclusive<i64>) -> impl Strategy<Value = i64> {
    range.prop_filter("nonzero", |m| *m != 0)
}

proptest! {
    #[test]
    fn composition_preserves_the_norm(i in 0usize..6, steps in 0usize..4) {
        let unit = pell_fundamental(7).unwrap();
        let idx = generate_admissible(6).unwrap()[i].clone();
        let mut p = idx.hyperbola_point();
        for _ in 0..steps {
            p = p.compose(&unit);
        }
        prop_assert_eq!(p.norm(), BigInt::from(-3));
    }

    #[test]
    fn closed_form_matches_symbol_difference(
        m1 in nonzero(-200..=200), k1 in -500i64..=500,
        m2 in nonzero(-200..=200), k2 in -500i64..=500,
    ) {
        prop_assume!(m1 + m2 != 0);
        let (f1, f2) = (LatticeFrequency::new(m1, k1), LatticeFrequency::new(m2, k2));
        let closed = resonance_kpi5(&f1, &f2).unwrap();
        let diff = omega(&LatticeFrequency::new(m1 + m2, k1 + k2)).unwrap()
            - omega(&f1).unwrap()
            - omega(&f2).unwrap();
        prop_assert_eq!(closed, diff);
    }

    #[test]
    fn resonance_is_symmetric(m1 in nonzero(-50..=50), k1 in -50i64..=50, m2 in nonzero(-50..=50), k2 in -50i64..=50) {
        prop_assume!(m1 + m2 != 0);
        let (f1, f2) = (LatticeFrequency::new(m1, k1), LatticeFrequency::new(m2, k2));
        prop_assert_eq!(resonance_kpi5(&f1, &f2).unwrap(), resonance_kpi5(&f2, &f1).unwrap());
    }

    #[test]
    fn non_admissible_indices_are_rejected(n in 1u64..100_000) {
        let admissible = (n * n + n + 1) % 7 == 0 && {
            let q = (n * n + n + 1) / 7;
            let r = (q as f64).sqrt().round() as u64;
            r * r == q
        };
        prop_assert_eq!(AdmissibleIndex::new(n).is_ok(), admissible);
    }

    #[test]
    fn spectral_round_trip(modes in prop::collection::vec((1i64..=5, -4i64..=4, -1.0f64..1.0, 0.0f64..6.3), 1..6)) {
        let g = TorusGrid::new(16, 16).unwrap();
        let mut u = SpectralField::zeros(g);
        for &(m, k, a, ph) in &modes {
            u.add_cos(m, k, a, ph).unwrap();
        }
        let back = SpectralField::from_physical(g, &u.to_physical()).unwrap();
        prop_assert!(back.sub(&u).unwrap().l2() <= 1e-13 * (1.0 + u.l2()));
    }

    #[test]
    fn parseval(modes in prop::collection::vec((1i64..=5, -4i64..=4, -1.0f64..1.0, 0.0f64..6.3), 1..6)) {
        let g = TorusGrid::new(16, 16).unwrap();
        let mut u = SpectralField::zeros(g);
        for &(m, k, a, ph) in &modes {
            u.add_cos(m, k, a, ph).unwrap();
        }
        let phys = u.to_physical();
        let quadrature = phys.iter().map(|v| v * v).sum::<f64>() * g.area() / phys.len() as f64;
        let spectral = energy_norms(&u, 2.0).unwrap().l2.powi(2);
        prop_assert!((quadrature - spectral).abs() <= 1e-12 * (1.0 + spectral));
        prop_assert!((u.l2_sq() - spectral).abs() <= 1e-12 * (1.0 + spectral));
    }
}

#[test]
fn first_admissible_indices() {
    let ns: Vec<i64> = generate_admissible(3).unwrap().iter().map(|i| i.n_i64().unwrap()).collect();
    assert_eq!(ns, [2, 18, 653]);
    assert_eq!(AdmissibleIndex::new(2).unwrap().alpha_index_i64(), Some(6));
    assert_eq!(AdmissibleIndex::new(18).unwrap().alpha_index_i64(), Some(2394));
}

#[test]
fn cos_x_norm_on_the_torus() {
    let g = TorusGrid::new(8, 8).unwrap();
    let u = SpectralField::single_cos(g, 1, 0, 1.0).unwrap();
    assert!((u.l2() - (2.0 * PI * PI / 35f64.sqrt()).sqrt()).abs() < 1e-14);
}

#[test]
fn omega_npm1_lies_in_the_cubic_band() {
    use kp5_core::resonance::omega_npm1;
    use num_rational::BigRational;
    for idx in generate_admissible(5).unwrap() {
        let n3 = BigRational::from_integer(idx.n().pow(3));
        let (minus, plus) = omega_npm1(&idx).unwrap();
        for om in [minus, plus] {
            assert!(om > BigRational::from_integer(0.into()));
            let lo = &n3 * BigRational::from_integer(10.into());
            let hi = &n3 * BigRational::from_integer(100.into());
            assert!(om >= lo && om <= hi, "n = {}: {om}", idx.n());
        }
    }
}
