use weylbound::counting::Dimension;
use weylbound::kernel::{
    counting_pairing, diagonal_value, kernel_f_even, kernel_odd, mehler_fock_roundtrip, shifted_to_unshifted,
    KernelCase, PointPairInvariant, TestFunction,
};
use weylbound::specfun::QuadratureSpec;

fn bumps() -> Vec<TestFunction> {
    vec![
        TestFunction::standard(),
        TestFunction::new(1.5, 2.0).unwrap(),
        TestFunction::bump(0.7).unwrap(),
    ]
}

#[test]
fn diagonal_matches_kernel_limit_for_three_bumps() {
    let s = QuadratureSpec::default();
    let origin = PointPairInvariant::new(0.0).unwrap();
    for g in bumps() {
        let h = |t: f64| g.cosine_transform(t);
        let even = kernel_f_even(&g, origin, &s).unwrap();
        let d2 = diagonal_value(2, h, &s).unwrap();
        assert!((even - d2).abs() < 1e-6 * d2.abs().max(1e-3), "n=2 a={}: {even} vs {d2}", g.support_bound());
        for (n, m) in [(1, 0), (3, 1)] {
            let k = kernel_odd(&g, origin, m).unwrap();
            let d = diagonal_value(n, h, &s).unwrap();
            assert!((k - d).abs() < 1e-6 * d.abs().max(1e-3), "n={n} a={}: {k} vs {d}", g.support_bound());
        }
    }
}

#[test]
fn diagonal_equals_counting_pairing() {
    let s = QuadratureSpec::default();
    for g in &bumps()[..2] {
        let h = |t: f64| g.cosine_transform(t);
        for n in [2, 3, 4] {
            let lhs = diagonal_value(n, shifted_to_unshifted(h, n), &s).unwrap();
            let rhs = counting_pairing(Dimension::new(n).unwrap(), h, &s).unwrap();
            assert!((lhs / rhs - 1.0).abs() < 1e-6, "n={n}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn roundtrip_rank_zero_even() {
    let e = mehler_fock_roundtrip(0, KernelCase::Even, &TestFunction::standard(), &[0.0, 0.5, 1.0]).unwrap();
    assert!(e < 1e-3, "error {e}");
}

#[test]
fn roundtrip_rank_one_both_cases() {
    let g = TestFunction::standard();
    for case in [KernelCase::Even, KernelCase::Odd] {
        let e = mehler_fock_roundtrip(1, case, &g, &[0.0, 0.5, 1.0]).unwrap();
        assert!(e < 1e-3, "{case:?}: error {e}");
    }
}

#[test]
fn roundtrip_rank_two_odd() {
    let e = mehler_fock_roundtrip(2, KernelCase::Odd, &TestFunction::standard(), &[0.0, 0.5, 1.0]).unwrap();
    assert!(e < 1e-3, "error {e}");
}

#[test]
fn roundtrip_rejects_far_samples() {
    assert!(mehler_fock_roundtrip(0, KernelCase::Odd, &TestFunction::standard(), &[5.0]).is_err());
    assert!(mehler_fock_roundtrip(3, KernelCase::Odd, &TestFunction::standard(), &[0.0]).is_err());
}
