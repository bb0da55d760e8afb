//! Brute-force torsion indexes against quoted values and the closed forms.

use torsionlab::generators::{Family, GeneratorLabel};
use torsionlab::sublattice::{torsion_oracle, torsion_oracle_with, OracleOptions};
use torsionlab::torsion::{hspin_bounds, tau2_pgo, tau2_so, tau2_spin};
use torsionlab::RingContext;

fn tau2(family: Family, n: usize) -> u64 {
    let ctx = RingContext::new(n).unwrap();
    let r = torsion_oracle(&ctx, family.label()).unwrap();
    assert_eq!(r.tau, ibig::UBig::from(1u8) << r.tau2 as usize, "odd part of {family} n={n}");
    r.tau2
}

#[test]
fn so_is_two_to_the_n_minus_one() {
    for n in 3..=7 {
        assert_eq!(tau2(Family::So, n), n as u64 - 1);
    }
}

#[test]
fn quoted_spin_and_hspin_values() {
    assert_eq!(tau2(Family::Spin, 6), 1);
    assert_eq!(tau2(Family::Spin, 8), 3);
    assert_eq!(tau2(Family::Hspin, 4), 3);
    assert_eq!(tau2(Family::Hspin, 6), 2);
    assert_eq!(tau2(Family::Hspin, 8), 6);
}

#[test]
fn closed_forms_agree_with_the_oracle() {
    for n in 3..=7u64 {
        assert_eq!(tau2(Family::Spin, n as usize), tau2_spin(n).unwrap(), "spin n={n}");
        assert_eq!(tau2(Family::So, n as usize), tau2_so(n).unwrap(), "so n={n}");
        assert_eq!(tau2(Family::Pgo, n as usize), tau2_pgo(n).unwrap(), "pgo n={n}");
    }
    for n in [4u64, 6, 8] {
        let b = hspin_bounds(n).unwrap();
        let t = tau2(Family::Hspin, n as usize);
        assert!(b.lower <= t && t <= b.upper, "n={n}: {} <= {t} <= {}", b.lower, b.upper);
        assert_eq!(b.upper, t);
    }
}

#[test]
fn indexes_divide_along_subring_inclusions() {
    for n in [4usize, 6] {
        let (spin, so, pgo, hspin) =
            (tau2(Family::Spin, n), tau2(Family::So, n), tau2(Family::Pgo, n), tau2(Family::Hspin, n));
        assert!(spin <= so && so <= pgo, "n={n}");
        assert!(spin <= hspin && hspin <= pgo, "n={n}");
    }
}

#[test]
fn truncated_oracle_keeps_the_two_part() {
    let ctx = RingContext::new(8).unwrap();
    let opts = OracleOptions { modulus_bits: Some(7), ..OracleOptions::default() };
    let r = torsion_oracle_with(&ctx, GeneratorLabel::RHspin, opts).unwrap();
    assert_eq!(r.tau2, 6);
}

#[test]
fn oracle_rejects_odd_hspin_and_tiny_rank() {
    assert!(torsion_oracle(&RingContext::new(5).unwrap(), GeneratorLabel::RHspin).is_err());
    assert!(torsion_oracle(&RingContext::new(2).unwrap(), GeneratorLabel::RPrimeSo).is_err());
}
