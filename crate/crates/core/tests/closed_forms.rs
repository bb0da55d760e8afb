//! Closed-form values against direct searches written independently here.

use torsionlab::torsion::{hspin_bounds, hspin_elementary_bound, m0_of, n0_of, tau2_spin};

/// Smallest n with C(n,2) + 1 >= 4^s, by linear scan from a safe start.
fn n0_direct(s: u32) -> u128 {
    let target = 1u128 << (2 * s);
    let mut n = (1u128 << s) - 1;
    while n * (n - 1) / 2 + 1 < target {
        n += 1;
    }
    n
}

#[test]
fn thresholds_match_direct_search() {
    for s in 2..=20 {
        assert_eq!(n0_of(s), n0_direct(s), "s={s}");
        let m0 = m0_of(s).unwrap();
        let gap = |m: u64| 2 * m as i64 - tau2_spin(m + 1).unwrap() as i64;
        assert!(gap(m0) > s as i64 - 3);
        assert!((0..m0).all(|m| gap(m) <= s as i64 - 3));
    }
}

#[test]
fn table_rows() {
    let rows: Vec<(u32, u128, u64)> = (2..=10).map(|s| (s, n0_of(s), m0_of(s).unwrap())).collect();
    assert_eq!(
        rows,
        vec![
            (2, 6, 0),
            (3, 12, 1),
            (4, 24, 1),
            (5, 46, 2),
            (6, 91, 2),
            (7, 182, 3),
            (8, 363, 4),
            (9, 725, 4),
            (10, 1449, 5)
        ]
    );
}

#[test]
fn spin_three_clause_shape() {
    assert_eq!(tau2_spin(4).unwrap(), 1);
    assert_eq!(tau2_spin(6).unwrap(), 1);
    assert_eq!(tau2_spin(12).unwrap(), 5);
    for s in 2..=10u32 {
        let lo = (1u64 << s) + 1;
        let hi = 1u64 << (s + 1);
        let (n0, m0) = (n0_direct(s) as u64, m0_of(s).unwrap());
        for n in lo..=hi {
            let want = if n <= (1 << s) + m0 {
                n + 1 - 2 * s as u64
            } else if n < n0 {
                n - 2 * s as u64
            } else {
                n - 2 * s as u64 - 1
            };
            assert_eq!(tau2_spin(n).unwrap(), want, "n={n}");
        }
    }
}

#[test]
fn hspin_bounds_are_consistent() {
    for n in (4..=128u64).step_by(2) {
        let b = hspin_bounds(n).unwrap();
        assert!(b.lower <= b.upper, "n={n}");
        assert_eq!(b.lower, tau2_spin(n).unwrap(), "n={n}");
        assert!(b.upper <= hspin_elementary_bound(n).unwrap(), "n={n}");
        if b.equality_known {
            assert_eq!(b.lower, b.upper, "n={n}");
        }
    }
    assert!(hspin_bounds(7).is_err());
}
