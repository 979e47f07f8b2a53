//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the report is always printed; the
//! process exits nonzero when any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use weylbound::counting::{
    g_norm_exact, global_counting_bounds, local_counting_bounds, local_counting_bounds_lowdim, Dimension,
    LocalGeometry,
};
use weylbound::eigenfunction::{surface_gl_constant, surface_gl_constant_printed, surface_nl_bounds, tanh_moment};
use weylbound::heat::{remainder_upper_surface, spectral_partial_sums, HeatQuery, HyperbolicSurface, Spectrum};
use weylbound::io::{parse_eigenvalue_file, ParseOptions};
use weylbound::kernel::{
    counting_pairing, diagonal_value, mehler_fock_roundtrip, shifted_to_unshifted, KernelCase, TestFunction,
};
use weylbound::nu::nu;
use weylbound::specfun::{euclidean_ball_volume, QuadratureSpec};
use weylbound::zeta::{det_bounds, DetQuery};

const KNOWN_DET: f64 = 4.72273280444557;

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol
}

fn bolza_spectrum() -> Spectrum {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/bolza_eigenvalues.dat");
    parse_eigenvalue_file(path, ParseOptions { closed: true, sqrt_input: false })
        .expect("vendored Bolza eigenvalues")
        .parsed
}

// the ν₃ target is written to the stated eight digits
#[allow(clippy::approx_constant)]
fn nu_constants(o: &mut Outcome) {
    for (m, expect, tol) in [(1, PI, 1e-10), (2, 4.73004074, 1e-7), (3, 6.28318530, 1e-7), (4, 7.81870734, 1e-7)] {
        match nu(m) {
            Ok(c) => o.check(close(c.value, expect, tol), format!("nu({m}) = {} vs {expect}", c.value)),
            Err(e) => o.check(false, format!("nu({m}): {e}")),
        }
    }
}

fn moment_integrals(o: &mut Outcome) {
    for (k, expect) in [(1, -17.0 / 960.0), (2, -407.0 / 40320.0), (3, -1943.0 / 215040.0)] {
        let v = tanh_moment(k).unwrap();
        o.check(close(v, expect, 1e-9), format!("I_{k} = {v} vs {expect}"));
    }
}

fn g_norm_oracle(o: &mut Outcome) {
    let g2 = g_norm_exact(Dimension::new(2).unwrap()).unwrap();
    o.check(close(g2, 1.0 / (48.0 * PI), 1e-8), format!("sup|F_2 - p_a| = {g2}"));
    let s2 = surface_gl_constant(2).unwrap();
    o.check(close(s2, 29.0 / (1260.0 * PI), 1e-9), format!("G^2 = {s2}"));
    let s1 = surface_gl_constant(1).unwrap();
    o.check(close(s1, 17.0 / (1920.0 * PI), 1e-9), format!("G^1 = {s1}"));
    let s3 = surface_gl_constant(3).unwrap();
    let oracle = 19.0 / (210.0 * PI);
    o.check(close(s3, oracle, 1e-9), format!("G^3 = {s3} vs oracle {oracle}"));
    let printed = surface_gl_constant_printed(3).unwrap();
    o.note(format!("G^3 printed {printed:.10} exceeds computed by {:.3}%", 100.0 * (printed / s3 - 1.0)));
}

fn bolza_determinant(o: &mut Outcome) {
    let spectrum = bolza_spectrum();
    let surface = HyperbolicSurface::bolza();
    let q20 = DetQuery::new(20.0, 0.3524, 2.2165, surface, spectrum.clone()).unwrap();
    let r = det_bounds(&q20).unwrap();
    o.check(close(r.det.upper, 4.88303, 2e-2), format!("c=20 upper {}", r.det.upper));
    o.check(close(r.det.lower, 4.51591, 2e-2), format!("c=20 lower {}", r.det.lower));
    o.check(r.det.contains(KNOWN_DET), format!("c=20 bracket {:?} misses {KNOWN_DET}", r.det));
    let approx = (-(r.parts.l1_head + r.parts.l2)).exp();
    o.check(close(approx, 4.73115, 5e-3), format!("c=20 head+L2 estimate {approx}"));
    o.note(format!("c=20 det in [{:.5}, {:.5}]", r.det.lower, r.det.upper));

    let q50 = DetQuery::new(50.0, 0.22161, 2.2165, surface, spectrum).unwrap();
    let r = det_bounds(&q50).unwrap();
    // the two printed estimates are listed in the wrong order; compare as a set
    let (a, b) = (4.71927, 4.7253);
    let as_set = (close(r.det.lower, a, 5e-3) && close(r.det.upper, b, 5e-3))
        || (close(r.det.lower, b, 5e-3) && close(r.det.upper, a, 5e-3));
    o.check(as_set && r.det.lower <= r.det.upper, format!("c=50 bracket {:?}", r.det));
    o.note(format!("c=50 det in [{:.5}, {:.5}]", r.det.lower, r.det.upper));
}

fn master_cross_check(o: &mut Outcome) {
    let spec = QuadratureSpec::default();
    for g in [TestFunction::standard(), TestFunction::new(1.5, 2.0).unwrap()] {
        let h = |t: f64| g.cosine_transform(t);
        for n in [2, 3, 4] {
            let lhs = diagonal_value(n, shifted_to_unshifted(h, n), &spec);
            let rhs = counting_pairing(Dimension::new(n).unwrap(), h, &spec);
            match (lhs, rhs) {
                (Ok(l), Ok(r)) => {
                    let rel = (l / r - 1.0).abs();
                    o.check(rel < 1e-6, format!("n={n} a={}: {l} vs {r}", g.support_bound()));
                    o.note(format!("n={n} a={} rel {rel:.1e}", g.support_bound()));
                }
                (l, r) => o.check(false, format!("n={n}: {l:?} / {r:?}")),
            }
        }
    }
}

fn mehler_fock(o: &mut Outcome) {
    let g = TestFunction::standard();
    let u = [0.0, 0.5, 1.0];
    for (m, case, tol) in [
        (0, KernelCase::Odd, 1e-8),
        (0, KernelCase::Even, 1e-3),
        (1, KernelCase::Odd, 1e-3),
        (1, KernelCase::Even, 1e-3),
    ] {
        match mehler_fock_roundtrip(m, case, &g, &u) {
            Ok(e) => {
                o.check(e < tol, format!("m={m} {case:?}: error {e}"));
                o.note(format!("m={m} {case:?} {e:.1e}"));
            }
            Err(e) => o.check(false, format!("m={m} {case:?}: {e}")),
        }
    }
}

fn inequality_suite(o: &mut Outcome) {
    let mut runner = TestRunner::new_with_rng(
        Config::with_cases(1000),
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let strategy = (2u32..=6, 0.2f64..10.0, 0.0f64..100.0);
    let mut violations = 0;
    for _ in 0..1000 {
        let (n, d, tau) = strategy.new_tree(&mut runner).unwrap().current();
        let geom = LocalGeometry::new(d).unwrap();
        let dim = Dimension::new(n).unwrap();
        let mut pairs = vec![local_counting_bounds(dim, geom, tau)];
        if n <= 4 {
            pairs.push(local_counting_bounds_lowdim(n, geom, tau));
        }
        if n == 2 {
            pairs.extend((2..=8).map(|l| surface_nl_bounds(l, geom, tau)));
        }
        for p in pairs {
            if !matches!(p, Ok(b) if b.lower <= b.upper) {
                violations += 1;
                o.check(false, format!("n={n} d={d} tau={tau}: {p:?}"));
            }
        }
    }
    o.note(format!("1000 random (n, d, τ): {violations} violations"));

    let spectrum = bolza_spectrum();
    let surface = HyperbolicSurface::bolza();
    let geom = LocalGeometry::new(surface.systole).unwrap();
    for c in [0.0, 10.0, 20.0, 50.0] {
        for i in 0..=50 {
            let t = 0.05 * (100f64).powf(i as f64 / 50.0);
            let bound = surface.area() * remainder_upper_surface(geom, HeatQuery::new(t, c).unwrap()).unwrap();
            let (_, witness) = spectral_partial_sums(&spectrum, t, c).unwrap();
            o.check(bound >= witness, format!("R_t^c at c={c} t={t}: {bound} < {witness}"));
        }
    }
    for c in [20.0, 50.0, 200.0] {
        let count = spectrum.count_up_to(c) as f64;
        let b = global_counting_bounds(Dimension::new(2).unwrap(), surface.area(), surface.systole, c.sqrt()).unwrap();
        o.check(b.upper > count, format!("c={c}: upper {} vs count {count}", b.upper));
        o.note(format!("c={c}: {count} eigenvalues in [{:.1}, {:.1}]", b.lower, b.upper));
    }
}

fn weyl_asymptotics(o: &mut Outcome) {
    let tau: f64 = 1e4;
    let geom = LocalGeometry::new(1.0).unwrap();
    for n in [2u32, 3, 4] {
        let lead = euclidean_ball_volume(n) / (2.0 * PI).powi(n as i32);
        let scale = tau.powi(n as i32) * lead;
        let dim = Dimension::new(n).unwrap();
        for (name, b) in [
            ("generic", local_counting_bounds(dim, geom, tau).unwrap()),
            ("refined", local_counting_bounds_lowdim(n, geom, tau).unwrap()),
        ] {
            let (lo, up) = (b.lower / scale - 1.0, b.upper / scale - 1.0);
            o.check(
                lo.abs() < 1e-2 && up.abs() < 1e-2,
                format!("n={n} {name}: relative deviations {lo:.3e}, {up:.3e}"),
            );
        }
    }
}

fn main() {
    type Criterion = (&'static str, fn(&mut Outcome), Duration);
    let criteria: [Criterion; 8] = [
        ("nu constants", nu_constants, Duration::from_secs(1)),
        ("moment integrals", moment_integrals, Duration::from_secs(1)),
        ("G-norm oracle", g_norm_oracle, Duration::from_secs(1)),
        ("Bolza determinant", bolza_determinant, Duration::from_secs(10)),
        ("kernel/counting cross-check", master_cross_check, Duration::from_secs(30)),
        ("Mehler-Fock round trips", mehler_fock, Duration::from_secs(60)),
        ("inequality suite", inequality_suite, Duration::from_secs(10)),
        ("Weyl asymptotics", weyl_asymptotics, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let mut o = Outcome::new();
        let start = Instant::now();
        run(&mut o);
        let took = start.elapsed();
        o.check(took <= *budget, format!("took {took:.2?}, budget {budget:?}"));
        let status = if o.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {}: {status} {name} ({took:.2?})", i + 1);
        for n in &o.notes {
            println!("    {n}");
        }
        for f in &o.failures {
            println!("    failed: {f}");
        }
        if !o.failures.is_empty() {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
