use super::*;

fn c(re: f64, im: f64) -> ComplexValue {
    ComplexValue::new(re, im)
}

#[test]
fn l1_at_one_matches_romberg() {
    let cfg = QuadratureConfig::default();
    let a = laplace_quadrature(1, c(1.0, 0.0), &cfg).unwrap();
    let b = laplace_romberg(1, c(1.0, 0.0), &cfg).unwrap();
    assert!((a.value - b.value).norm() <= 2.0 * cfg.tol, "{} vs {}", a.value, b.value);
    assert!(a.value.im.abs() <= a.err_estimate);
    assert!(a.value.re > 0.0);
}

#[test]
fn l2_at_half_matches_romberg() {
    let cfg = QuadratureConfig::default();
    let a = laplace_quadrature(2, c(0.5, 0.0), &cfg).unwrap();
    let b = laplace_romberg(2, c(0.5, 0.0), &cfg).unwrap();
    assert!((a.value - b.value).norm() <= 2.0 * cfg.tol, "{} vs {}", a.value, b.value);
    assert!(a.value.im.abs() <= a.err_estimate);
}

#[test]
fn complex_s_matches_romberg() {
    let cfg = QuadratureConfig::default();
    for (k, s) in [(1, c(0.4, 1.3)), (2, c(0.7, -2.5)), (2, c(0.3, 9.0))] {
        let a = laplace_quadrature(k, s, &cfg).unwrap();
        let b = laplace_romberg(k, s, &cfg).unwrap();
        assert!(
            (a.value - b.value).norm() <= a.err_estimate + b.err_estimate,
            "k = {k}, s = {s}: {} vs {}",
            a.value,
            b.value
        );
    }
}

#[test]
fn doubling_cutoff_stays_within_estimate() {
    let cfg = QuadratureConfig::default();
    let wide = QuadratureConfig {
        cutoff_factor: 2.0 * cfg.cutoff_factor,
        ..cfg
    };
    for (k, s) in [(1, c(0.2, 0.0)), (2, c(0.1, 0.5))] {
        let a = laplace_quadrature(k, s, &cfg).unwrap();
        let b = laplace_quadrature(k, s, &wide).unwrap();
        assert!((a.value - b.value).norm() < a.err_estimate, "k = {k}, s = {s}");
    }
}

#[test]
fn identical_across_thread_counts() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let g = LineGrid::build(0.0, 60, 16, 1).unwrap();
            g.integrate(2, 0, 60, |t| (-c(0.3, 0.2) * t).exp()).value
        })
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.re.to_bits(), b.re.to_bits());
    assert_eq!(a.im.to_bits(), b.im.to_bits());
}

#[test]
fn errors() {
    let cfg = QuadratureConfig::default();
    assert!(matches!(laplace_quadrature(1, c(0.0, 1.0), &cfg), Err(Error::Domain(_))));
    assert!(matches!(laplace_quadrature(3, c(1.0, 0.0), &cfg), Err(Error::Domain(_))));
    let tiny = QuadratureConfig {
        max_panels: 10,
        ..cfg
    };
    assert!(matches!(laplace_quadrature(2, c(0.5, 0.0), &tiny), Err(Error::Convergence(_))));
    assert!(matches!(moment_integral(1, 0.0), Err(Error::Range(_))));
    assert!(matches!(moment_integral(1, 6e4), Err(Error::Range(_))));
    assert!(matches!(mellin_z2(c(1.0, 2.0), &P4::zero(), &cfg), Err(Error::Domain(_))));
}

#[test]
fn moments_small_and_monotone() {
    assert!(moment_integral(1, 1e-9).unwrap().value < 1e-8);
    let ts: Vec<f64> = (1..=200).map(|i| 0.37 * i as f64).collect();
    for k in [1, 2] {
        let rec = moment_integrals(k, &ts).unwrap();
        for w in rec.windows(2) {
            assert!(w[1].value >= w[0].value, "k = {k} at T = {}", w[1].t);
        }
    }
}

#[test]
fn i1_at_100_matches_romberg() {
    let m = moment_integral(1, 100.0).unwrap();
    let f = |t: f64| Ok(c(abs_zeta_sq(t)?, 0.0));
    let r = romberg::romberg_blocks(&f, 0.0, 100.0, 1e-12, 1e-12).unwrap();
    assert!((m.value - r.value.re).abs() <= 1e-5, "{} vs {}", m.value, r.value.re);
}

#[test]
fn i2_leading_order() {
    let t = 1e4f64;
    let i2 = moment_integral(2, t).unwrap().value;
    let ratio = i2 / (t * t.ln().powi(4) / (2.0 * PI * PI));
    assert!((0.5..=2.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn e2_compositions() {
    let lead = P4 {
        a: [0.0, 0.0, 0.0, 0.0, P4::LEADING],
    };
    let t = 300.0f64;
    let i2 = moment_integral(2, t).unwrap().value;
    let e = e2_error_term(t, &lead).unwrap();
    let direct = i2 - t * t.ln().powi(4) / (2.0 * PI * PI);
    assert!((e - direct).abs() <= 1e-12 * i2);
    let p = P4::with_lower(-0.2, 0.5, 0.3, 0.1);
    let e = e2_error_term(2.0, &p).unwrap();
    assert_eq!(e, moment_integral(2, 2.0).unwrap().value - 2.0 * p.eval(2f64.ln()));
    assert!(e2_error_term(1.0, &p).is_err());
}

#[test]
fn identity_residuals() {
    for (k, t) in [(1, 5.0), (2, 10.0), (1, 1.0)] {
        let chk = laplace_identity(k, t).unwrap();
        assert!(chk.residual <= 1e-5 * chk.lhs.abs(), "k = {k}, T = {t}: {chk:?}");
    }
}

#[test]
fn trivial_bound_holds() {
    for (k, t) in [(1, 10.0), (2, 50.0), (1, 1.0)] {
        assert!(trivial_bound_check(k, t).unwrap(), "k = {k}, T = {t}");
    }
}

#[test]
fn mellin_symmetries() {
    let cfg = QuadratureConfig {
        max_x: 3000.0,
        ..QuadratureConfig::default()
    };
    let p4 = P4::with_lower(0.0, 0.0, 0.0, 0.0);
    let w = c(2.0, 1.0);
    let a = mellin_z2(w, &p4, &cfg).unwrap().value;
    let b = mellin_z2(w.conj(), &p4, &cfg).unwrap().value;
    assert!((a - b.conj()).norm() <= 1e-9);
    let z4 = mellin_z2(c(4.0, 0.0), &p4, &cfg).unwrap().value;
    assert!(z4.im.abs() < 1e-12);
    for y in [1.0, 5.0, 10.0] {
        let v = mellin_z2(c(4.0, y), &p4, &cfg).unwrap().value;
        assert!(v.norm() <= z4.re, "y = {y}");
    }
}

#[test]
fn mellin_matches_romberg_on_short_range() {
    let cfg = QuadratureConfig {
        max_x: 2000.0,
        ..QuadratureConfig::default()
    };
    let p4 = P4::with_lower(0.0, 0.0, 0.0, 0.0);
    let w = c(2.0, 0.0);
    let a = mellin_z2(w, &p4, &cfg).unwrap();
    let b = mellin_z2_romberg(w, &p4, &cfg).unwrap();
    assert!((a.value - b.value).norm() <= 1e-7 * a.value.norm());
}

#[test]
fn log_power_tails_against_quadrature() {
    let w = c(2.5, 1.5);
    let x = 3.0f64;
    let tails = log_power_tails(w, x);
    // substitute t = x e^u
    let rule = GaussRule::new(32);
    for (j, tail) in tails.iter().enumerate() {
        let mut acc = c(0.0, 0.0);
        for m in 0..80 {
            let (a, b) = (0.5 * m as f64, 0.5 * (m + 1) as f64);
            for (u, wt) in rule.mapped(a, b) {
                let t = x * u.exp();
                acc += cpow(c(t, 0.0), -w) * (t.ln().powi(j as i32) * t * wt);
            }
        }
        assert!((acc - tail).norm() < 1e-12 * tail.norm().max(1.0), "j = {j}");
    }
}

#[test]
fn gamma_derivatives_by_differences() {
    let g = gamma_derivatives_at_one();
    assert!((g[1] + EULER_GAMMA).abs() < 1e-15);
    let h = 1e-2;
    let lg = |x: f64| crate::special::gamma(c(x, 0.0)).unwrap().re;
    // five-point stencils
    let d2 = (-lg(1.0 + 2.0 * h) + 16.0 * lg(1.0 + h) - 30.0 * lg(1.0) + 16.0 * lg(1.0 - h) - lg(1.0 - 2.0 * h))
        / (12.0 * h * h);
    assert!((d2 - g[2]).abs() < 1e-6);
    // 30-digit reference for the fourth derivative
    assert!((g[4] - 23.561_474_084_025_6).abs() < 1e-12);
}

#[test]
fn log_moments_against_quadrature() {
    let s = c(0.7, 0.4);
    let m = log_moments(s);
    assert!((m[0] - s.inv()).norm() < 1e-15);
    // t = e^u over u in [-40, 5]
    let rule = GaussRule::new(32);
    for (j, mj) in m.iter().enumerate() {
        let mut acc = c(0.0, 0.0);
        for p in 0..180 {
            let (a, b) = (-40.0 + 0.25 * p as f64, -40.0 + 0.25 * (p + 1) as f64);
            for (u, wt) in rule.mapped(a, b) {
                let t = u.exp();
                acc += (-s * t).exp() * (u.powi(j as i32) * t * wt);
            }
        }
        assert!((acc - mj).norm() < 1e-10 * mj.norm().max(1.0), "j = {j}: {acc} vs {mj}");
    }
}

#[test]
fn e2_laplace_zero_polynomial() {
    let cfg = QuadratureConfig::default();
    let s = c(0.5, 0.0);
    let e = e2_laplace(s, &P4::zero(), &cfg).unwrap();
    let l2 = laplace_quadrature(2, s, &cfg).unwrap();
    assert_eq!(e.value, l2.value / s);
    assert!(e.value.im.abs() <= e.err_estimate);
}

#[test]
fn e2_laplace_against_direct_integral() {
    let cfg = QuadratureConfig::default();
    let s = 0.5;
    let p4 = P4::with_lower(0.65, 0.25, -0.1, 0.1);
    let e = e2_laplace(c(s, 0.0), &p4, &cfg).unwrap().value.re;
    // geometric panels near 0 for the log singularity, unit panels after
    let mut edges = vec![0.0];
    let mut x = 1e-12f64;
    while x < 1.0 {
        edges.push(x);
        x *= 4.0;
    }
    let mut t = 1.0;
    while t <= 90.0 {
        edges.push(t);
        t += 0.5;
    }
    let rule = GaussRule::new(16);
    let mut nodes = Vec::new();
    for ab in edges.windows(2) {
        nodes.extend(rule.mapped(ab[0], ab[1]));
    }
    let ts: Vec<f64> = nodes.iter().map(|n| n.0).collect();
    let e2 = e2_error_terms_unchecked(&ts, &p4);
    let direct: f64 = nodes.iter().zip(&e2).map(|((t, w), v)| w * v * (-s * t).exp()).sum();
    assert!((direct - e).abs() <= 1e-4 * e.abs(), "{direct} vs {e}");
}

fn e2_error_terms_unchecked(ts: &[f64], p4: &P4) -> Vec<f64> {
    moment_integrals(2, ts)
        .unwrap()
        .into_iter()
        .map(|r| r.value - r.t * p4.eval(r.t.ln()))
        .collect()
}

#[test]
fn majorant_validated_on_computed_range() {
    let c = QuadratureConfig::default().majorant_c;
    let mut worst = 0.0f64;
    let mut t = 0.0f64;
    while t <= MAX_MOMENT_T {
        let r = crate::zeta_line::abs_zeta_pow4(t).unwrap() / (c * (1.0 + t).powf(2.0 / 3.0));
        worst = worst.max(r);
        t += 0.05;
    }
    assert!(worst < 0.5, "worst ratio {worst}");
}
