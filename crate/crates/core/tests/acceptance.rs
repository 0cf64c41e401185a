//! One test per acceptance criterion (or part of one). Each prints a single
//! `PASS`/`FAIL` line on the real stdout, so the verdicts show up even when
//! the harness captures test output.

use std::f64::consts::{FRAC_PI_4, PI};
use std::io::Write;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ptheta::bounds::{m_bound, psi, solve_c0, xi};
use ptheta::series::{bilateral_series, g_tail, theta, triple_product, EvalConfig};
use ptheta::spectra::{
    classify_pair, refine_to_full_theta, render_svg, scan_truncation_spectrum, FigureOptions, RegionSpec,
    DEFAULT_K_SCHEDULE, DEFAULT_STABILITY_TOL, KNOWN_VALUES,
};
use ptheta::torusopt::{minimize_on_torus, objective_and_gradient, TorusProblem, DEFAULT_RESTARTS, DEFAULT_TOL};
use ptheta::verify::{certify_separation_direct, run_k1_chain, run_k2_grid, run_sector2, GridSpec, SECTOR1_B_RANGE};
use ptheta::zeros::{
    count_zeros_disk, double_zero_seed, refine_double_zero, roots_truncation, truncation_order_for_radius,
    ContourConfig, DoubleZeroConfig, ZeroSource, DEFAULT_KMAX,
};

fn report(criterion: &str, pass: bool, elapsed: Duration, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{verdict} criterion {criterion} ({:.2} s): {detail}", elapsed.as_secs_f64());
    assert!(pass, "criterion {criterion}: {detail}");
}

fn within(v: f64, lo: f64, hi: f64) -> bool {
    lo < v && v < hi
}

/// `|a − b| ≤ tol` decided in integer units of `1e-5`, so that a difference
/// of exactly `1e-4` is not lost to float noise.
fn close_units(a: f64, b: f64, tol_units: i64) -> bool {
    ((a * 1e5).round() as i64 - (b * 1e5).round() as i64).abs() <= tol_units
}

#[test]
fn criterion_1_constants() {
    let t = Instant::now();
    let c0: f64 = solve_c0();
    let checks: [(&str, f64, f64, f64); 10] = [
        ("xi(0.6,0.5)", xi(0.6, 0.5), 0.2344, 0.2345),
        ("xi(0.5,0.4)", xi(0.5, 0.4), 0.2674, 0.2675),
        ("xi(0.4,0.36)", xi(0.4, 0.36), 0.1225, 0.1226),
        ("xi(0.36,0.24)", xi(0.36, 0.24), 0.4729, 0.4730),
        ("psi(0.5)", psi(0.5), 0.0682, 0.0683),
        ("psi(0.6)-psi(0.5)", psi(0.6) - psi(0.5), 0.0853, 0.0854),
        ("psi(0.5)-psi(0.4)", psi(0.5) - psi(0.4), 0.0416, 0.0417),
        ("psi(0.4)-psi(0.36)", psi(0.4) - psi(0.36), 0.00938, 0.00939),
        ("psi(0.36)-psi(0.24)", psi(0.36) - psi(0.24), 0.01393, 0.01394),
        ("c0", c0, 0.2078750206 - 1e-9, 0.2078750206 + 1e-9),
    ];
    let bad: Vec<String> = checks
        .iter()
        .filter(|(_, v, lo, hi)| !within(*v, *lo, *hi))
        .map(|(n, v, lo, hi)| format!("{n} = {v} not in ({lo}, {hi})"))
        .collect();
    let el = t.elapsed();
    let pass = bad.is_empty() && el < Duration::from_secs(1);
    report(
        "1 (constants)",
        pass,
        el,
        &if bad.is_empty() { format!("c0 = {c0:.10}, all 10 values in range") } else { bad.join("; ") },
    );
}

#[test]
fn criterion_2_torus_minima() {
    let t = Instant::now();
    // (r, expected min, expected arg(q x), expected arg q); the printed
    // 0.78540 is π/4.
    let cases = [(0.5, 0.45784, 2.38345, FRAC_PI_4), (0.36, 0.55011, 3.44113, FRAC_PI_4)];
    let mut detail = Vec::new();
    let mut pass = true;
    for (r, mu, phase, b) in cases {
        let p = TorusProblem::new(3, r, 1.5, SECTOR1_B_RANGE).unwrap();
        let m = minimize_on_torus(&p, 0, DEFAULT_RESTARTS, DEFAULT_TOL).unwrap();
        let ok = (m.mu - mu).abs() <= 2e-4 && (m.qx_phase() - phase).abs() <= 1e-3 && (m.b_star - b).abs() <= 1e-3;
        pass &= ok;
        detail.push(format!(
            "r={r}: min {:.5} at arg(qx) {:.5}, arg q {:.5}",
            m.mu,
            m.qx_phase(),
            m.b_star
        ));
    }
    let el = t.elapsed();
    report("2 (torus minima)", pass && el < Duration::from_secs(30), el, &detail.join("; "));
}

#[test]
fn criterion_3_k2_grid_rows_and_max() {
    let t = Instant::now();
    let c = run_k2_grid(&GridSpec::default(), SECTOR1_B_RANGE, 0).unwrap();
    let el = t.elapsed();
    let pass = c.rows.len() == 159
        && c.rows.iter().all(|r| r.eta > 0.0)
        && (c.mu_max - 7.60808216).abs() <= 1e-4
        && el < Duration::from_secs(600);
    report(
        "3 (k2 grid: 159 rows with eta > 0, max mu)",
        pass,
        el,
        &format!("{} rows, min eta {:.6}, max mu {:.8}", c.rows.len(), c.min_eta, c.mu_max),
    );
}

#[test]
fn criterion_3_k2_grid_min_mu() {
    let t = Instant::now();
    let c = run_k2_grid(&GridSpec::default(), SECTOR1_B_RANGE, 0).unwrap();
    let el = t.elapsed();
    report(
        "3 (k2 grid: min mu)",
        (c.mu_min - 0.74930884).abs() <= 1e-4,
        el,
        &format!("min mu {:.8}, expected 0.74930884", c.mu_min),
    );
}

#[test]
fn criterion_3_sector2() {
    let t = Instant::now();
    let c = run_sector2(0).unwrap();
    let el = t.elapsed();
    report(
        "3 (sector 2: all rho > 0)",
        c.rows.iter().all(|r| r.rho > 0.0) && el < Duration::from_secs(600),
        el,
        &format!("{} rows, min rho {:.6}", c.rows.len(), c.min_rho),
    );
}

#[test]
fn criterion_3_k1_chain() {
    let t = Instant::now();
    let r = run_k1_chain(0).unwrap();
    let expected = [
        ("r in [0.5,0.6]", 0.0618),
        ("r in [0.4,0.5]", 0.0725),
        ("r in [0.36,0.4]", 0.40083),
        ("r in [0.24,0.36]", 0.04588),
        ("r < 0.24", 0.224),
    ];
    let mut pass = r.overall_pass && close_units(r.overall_margin, 0.04588, 10);
    let mut detail = Vec::new();
    for (step, want) in expected {
        let got = r.margin(step).map_or(f64::NAN, |m| m.value);
        pass &= close_units(got, want, 10);
        detail.push(format!("{step}: {got:.5}"));
    }
    detail.push(format!("overall {:.5}", r.overall_margin));
    let el = t.elapsed();
    report("3 (k1 chain margins)", pass, el, &detail.join(", "));
}

#[test]
fn criterion_4_known_spectral_values() {
    let t = Instant::now();
    let cfg = DoubleZeroConfig::default();
    let mut pass = true;
    let mut detail = Vec::new();
    // Start a little off each printed value; the seed comes from a
    // degree-20 truncation.
    for (name, tol) in [("q~1", 1e-6), ("q~2", 1e-6), ("q~3", 1e-6), ("q-1", 1e-7)] {
        let k = KNOWN_VALUES.iter().find(|k| k.name == name).unwrap();
        let q0 = Complex64::new(k.q.0 + 2e-4, 0.0);
        let x0 = double_zero_seed(q0, 20).unwrap();
        let dz = refine_double_zero(q0, x0, None, &cfg).unwrap();
        let ok = (dz.q - Complex64::new(k.q.0, 0.0)).norm() <= tol;
        pass &= ok;
        detail.push(format!("{name} {:.10}", dz.q.re));
    }
    let region = RegionSpec::new((0.4, 0.47), (0.1, 0.15), 41).unwrap();
    let v = scan_truncation_spectrum(8, &region, 0).unwrap();
    let full = refine_to_full_theta(&v[0], DEFAULT_K_SCHEDULE, DEFAULT_STABILITY_TOL).unwrap();
    let want = Complex64::new(0.4353184958, 0.1230440086);
    let ok = (full.q_star.re - want.re).abs() <= 1e-9 && (full.q_star.im - want.im).abs() <= 1e-9;
    pass &= ok;
    detail.push(format!("v+ {:.10}", full.q_star));
    let el = t.elapsed();
    report("4 (known spectral values)", pass && el < Duration::from_secs(300), el, &detail.join(", "));
}

fn theta8_first_value() -> ptheta::spectra::SpectralValue {
    let region = RegionSpec::new((0.4, 0.7), (0.0, 0.3), 61).unwrap();
    scan_truncation_spectrum(8, &region, 0)
        .unwrap()
        .into_iter()
        .min_by(|a, b| {
            let w = Complex64::new(0.5374009225, 0.1800191987);
            (a.q_star - w).norm().total_cmp(&(b.q_star - w).norm())
        })
        .unwrap()
}

#[test]
fn criterion_4_theta8_scan() {
    let t = Instant::now();
    let v = theta8_first_value();
    let ok = (v.q_star.re - 0.5374009225).abs() <= 1e-8 && (v.q_star.im - 0.1800191987).abs() <= 1e-8;
    let el = t.elapsed();
    report("4 (theta_8 scan value)", ok, el, &format!("{:.10}", v.q_star));
}

#[test]
fn criterion_4_theta8_smallest_zeros() {
    let t = Instant::now();
    let v = theta8_first_value();
    let zeros = roots_truncation(v.q_star, 8).unwrap().zeros;
    let printed = [(-2.0471, -1.4799), (-4.7152, 1.7057), (-2.4631, 7.6623), (-2.4639, 7.6621), (1.6159, 20.5308)];
    // Printed values are cut after 4 decimals. The two members of the double
    // zero are matched to the closer printed entry.
    let mut used = [false; 5];
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for z in &zeros[..5] {
        let (i, d) = printed
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, p)| (i, (z.re - p.0).abs().max((z.im - p.1).abs())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        used[i] = true;
        worst = worst.max(d);
        detail.push(format!("{:.6}{:+.6}i vs {}{:+}i", z.re, z.im, printed[i].0, printed[i].1));
    }
    let el = t.elapsed();
    report(
        "4 (theta_8 five smallest zeros to 4 decimals)",
        worst < 1e-4,
        el,
        &format!("max deviation {worst:.1e}: {}", detail.join(", ")),
    );
}

#[test]
fn criterion_4_classification() {
    let t = Instant::now();
    let cfg = DoubleZeroConfig::default();
    let q0 = Complex64::new(0.3095, 0.0);
    let dz = refine_double_zero(q0, double_zero_seed(q0, 20).unwrap(), None, &cfg).unwrap();
    let p1 = classify_pair(dz.source, dz.q, dz.x).unwrap();

    let region = RegionSpec::new((0.4, 0.47), (0.1, 0.15), 41).unwrap();
    let v = &scan_truncation_spectrum(8, &region, 0).unwrap()[0];
    let v_full = refine_to_full_theta(v, DEFAULT_K_SCHEDULE, DEFAULT_STABILITY_TOL).unwrap();
    let pv = classify_pair(v_full.source, v_full.q_star, v_full.x_star).unwrap();
    let pv_conj = classify_pair(v_full.source, v_full.q_star.conj(), v_full.x_star.conj()).unwrap();

    let w = refine_to_full_theta(&theta8_first_value(), DEFAULT_K_SCHEDULE, DEFAULT_STABILITY_TOL).unwrap();
    let pw = classify_pair(w.source, w.q_star, w.x_star).unwrap();
    let el = t.elapsed();
    let pass = p1 == (1, 2) && pv == (2, 3) && pv_conj == (2, 3) && pw == (3, 4) && w.would_be;
    report(
        "4 (pair classification)",
        pass,
        el,
        &format!("q~1 {p1:?}, v+ {pv:?}, v- {pv_conj:?}, w1 {pw:?} at {:.10}", w.q_star),
    );
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(20240501)
}

fn random_q(r: &mut ChaCha8Rng, abs: (f64, f64), arg: (f64, f64)) -> Complex64 {
    Complex64::from_polar(r.gen_range(abs.0..abs.1), r.gen_range(arg.0..arg.1))
}

#[test]
fn criterion_5_product_vs_bilateral() {
    let t = Instant::now();
    let cfg = EvalConfig::default();
    let mut r = rng();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let q = random_q(&mut r, (0.05, 0.8), (-PI, PI));
        // |x| between |q|^{1/2} and |q|^{-3/2} keeps both sides of moderate size.
        let e = r.gen_range(-1.5..0.5);
        let x = Complex64::from_polar(q.norm().powf(e), r.gen_range(-PI..PI));
        let p = triple_product(q, x, &cfg).unwrap().value;
        let b = bilateral_series(q, x, &cfg).unwrap().value;
        worst = worst.max((p - b).norm() / b.norm().max(1.0));
    }
    let el = t.elapsed();
    report(
        "5 (triple product = bilateral series, 1000 samples)",
        worst <= 1e-12,
        el,
        &format!("max deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_5_quasi_periodicity() {
    let t = Instant::now();
    let cfg = EvalConfig::default();
    let mut r = rng();
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let q = random_q(&mut r, (0.05, 0.8), (-PI, PI));
        let x = Complex64::from_polar(q.norm().powf(r.gen_range(-1.0..0.5)), r.gen_range(-PI..PI));
        let lhs = bilateral_series(q, x / q, &cfg).unwrap().value;
        let rhs = x * bilateral_series(q, x, &cfg).unwrap().value;
        worst = worst.max((lhs - rhs).norm() / rhs.norm());
    }
    let el = t.elapsed();
    report(
        "5 (quasi-periodicity)",
        worst <= 1e-10,
        el,
        &format!("max relative deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_5_g_bound() {
    let t = Instant::now();
    let cfg = EvalConfig::default();
    let mut r = rng();
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..1000 {
        let q = random_q(&mut r, (0.02, 0.95), (-PI, PI));
        let k = r.gen_range(3..=8);
        let x = Complex64::from_polar(q.norm().powf(-(k as f64) + 0.5), r.gen_range(-PI..PI));
        let g = g_tail(q, x, &cfg).unwrap();
        worst_ratio = worst_ratio.max((g.value.norm() + g.tail_bound) / m_bound(q.norm()));
    }
    let el = t.elapsed();
    report(
        "5 (|G| <= M on |x| = |q|^(1/2-k))",
        worst_ratio <= 1.0,
        el,
        &format!("max |G|/M {worst_ratio:.6}"),
    );
}

#[test]
fn criterion_5_theta_is_bilateral_minus_g() {
    let t = Instant::now();
    let cfg = EvalConfig::default();
    let mut r = rng();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let q = random_q(&mut r, (0.05, 0.9), (-PI, PI));
        let x = Complex64::from_polar(q.norm().powf(r.gen_range(-3.0..0.5)), r.gen_range(-PI..PI));
        let th = theta(q, x, &cfg).unwrap();
        let p = triple_product(q, x, &cfg).unwrap();
        let g = g_tail(q, x, &cfg).unwrap();
        let scale = th.value.norm() + p.value.norm() + g.value.norm();
        let allowed = th.tail_bound + p.tail_bound + g.tail_bound + 1e-13 * scale;
        worst = worst.max((th.value - (p.value - g.value)).norm() / allowed);
    }
    let el = t.elapsed();
    report(
        "5 (theta = product - G within tail bounds)",
        worst <= 1.0,
        el,
        &format!("max deviation / allowance {worst:.3}"),
    );
}

#[test]
fn criterion_5_gradient() {
    let t = Instant::now();
    let mut r = rng();
    let mut worst: f64 = 0.0;
    for _ in 0..300 {
        let k = r.gen_range(3..=6);
        let rad = r.gen_range(0.2..0.6);
        let p = TorusProblem::new(k, rad, k as f64 / 2.0, (0.0, 2.0 * PI)).unwrap();
        let (a, b) = (r.gen_range(0.0..2.0 * PI), r.gen_range(0.0..2.0 * PI));
        let (_, ga, gb) = objective_and_gradient(&p, a, b);
        let h = 1e-6;
        let f = |a, b| objective_and_gradient(&p, a, b).0;
        let fa = (f(a + h, b) - f(a - h, b)) / (2.0 * h);
        let fb = (f(a, b + h) - f(a, b - h)) / (2.0 * h);
        let scale = ga.hypot(gb).max(1.0);
        worst = worst.max((ga - fa).hypot(gb - fb) / scale);
    }
    let el = t.elapsed();
    report(
        "5 (gradient vs finite differences)",
        worst <= 1e-6,
        el,
        &format!("max relative deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_5_contour_counts() {
    let t = Instant::now();
    let cfg = ContourConfig::default();
    let mut r = rng();
    let mut mismatches = Vec::new();
    let mut done = 0;
    while done < 200 {
        let q = random_q(&mut r, (0.1, 0.7), (-PI, PI));
        let radius = q.norm().powf(-r.gen_range(0.5..4.5));
        let k = truncation_order_for_radius(q, 2.0 * radius).unwrap();
        let zeros = roots_truncation(q, k).unwrap().zeros;
        // Skip circles passing too close to a zero; the count is then
        // numerically undefined.
        if zeros.iter().any(|z| (z.norm() / radius - 1.0).abs() < 1e-3) {
            continue;
        }
        let inside = zeros.iter().filter(|z| z.norm() < radius).count();
        let counted = count_zeros_disk(q, radius, &cfg).unwrap();
        if inside != counted {
            mismatches.push(format!("q={q:.4} R={radius:.3}: {counted} vs {inside}"));
        }
        done += 1;
    }
    let el = t.elapsed();
    report(
        "5 (argument principle = truncation roots, 200 q)",
        mismatches.is_empty(),
        el,
        &if mismatches.is_empty() { "all 200 counts agree".into() } else { mismatches.join("; ") },
    );
}

#[test]
fn criterion_5_direct_separation() {
    let t = Instant::now();
    let cfg = ContourConfig::default();
    let mut r = rng();
    let mut failures = Vec::new();
    for _ in 0..50 {
        let q = random_q(&mut r, (0.02, 0.6), (FRAC_PI_4, 7.0 * FRAC_PI_4));
        let set = certify_separation_direct(q, DEFAULT_KMAX, &cfg).unwrap();
        if !set.separated {
            failures.push(format!("{q:.5}"));
        }
    }
    let el = t.elapsed();
    report(
        "5 (direct separation on 50 sector samples)",
        failures.is_empty() && el < Duration::from_secs(120),
        el,
        &if failures.is_empty() { "all separated".into() } else { format!("not separated: {}", failures.join(", ")) },
    );
}

#[test]
fn criterion_6_figure() {
    let t = Instant::now();
    let region = RegionSpec::new((-1.2, 1.2), (-1.2, 1.2), 241).unwrap();
    let vals = scan_truncation_spectrum(15, &region, 0).unwrap();
    let pts: Vec<Complex64> = vals.iter().map(|v| v.q_star).collect();
    let symmetric = pts.iter().all(|p| pts.iter().any(|c| (c - p.conj()).norm() <= 1e-8));
    let mut missing = Vec::new();
    for n in 1..=6u32 {
        for m in 0..n {
            let z = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64);
            if !pts.iter().any(|p| (p - z).norm() < 0.1) {
                missing.push(format!("{m}/{n}"));
            }
        }
    }
    let svg = render_svg(&pts, &FigureOptions::default());
    let elements = ["id=\"unit-circle\"", "data-radius=\"0.309\"", "id=\"origin\""]
        .iter()
        .all(|e| svg.contains(e));
    let all_truncation = vals.iter().all(|v| v.source == ZeroSource::Truncation(15));
    let el = t.elapsed();
    let pass = symmetric && missing.is_empty() && elements && all_truncation && el < Duration::from_secs(900);
    report(
        "6 (theta_15 figure)",
        pass,
        el,
        &format!(
            "{} points, conjugation-symmetric: {symmetric}, roots of unity without a cluster: {:?}, svg elements: {elements}",
            pts.len(),
            missing
        ),
    );
}
