use super::{finite, ComplexValue, EULER_GAMMA, PI};
use crate::{Error, Result};

/// Below this modulus `bessel_k0` sums the ascending series.
pub const K0_SERIES_RADIUS: f64 = 6.0;

/// Above this modulus the exponentially scaled factor is summed as the
/// divergent asymptotic series (optimal truncation error ~ e^{-2|z|}).
const ASYMPTOTIC_RADIUS: f64 = 40.0;

/// `|arg z|` beyond which the large-argument branch uses the continuation
/// `K0(z) = K0(-z) -+ i pi I0(-z)`.
const CONTINUATION_ARG: f64 = 0.75 * PI;

/// Ascending series
/// `K0(z) = sum_k (z^2/4)^k / (k!)^2 (H_k - gamma - Log(z/2))`.
///
/// Merging the logarithm into each coefficient keeps the cancellation near
/// the positive real axis to a few digits for `|z| <= 8`.
pub fn bessel_k0_series(z: ComplexValue) -> Result<ComplexValue> {
    check_arg(z)?;
    let q = z * z * 0.25;
    let shift = (z * 0.5).ln() + EULER_GAMMA;
    let mut term = ComplexValue::new(1.0, 0.0);
    let mut harmonic = 0.0f64;
    let mut sum = -shift;
    let mut k = 0u32;
    loop {
        k += 1;
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        let add = term * (harmonic - shift);
        sum += add;
        if add.norm() <= 1e-17 * sum.norm() && term.norm() < 1.0 {
            break;
        }
        if k > 400 {
            return Err(Error::Convergence(format!("K0 series at {z}")));
        }
    }
    finite(sum, "bessel_k0_series")
}

/// `S(z)` in `K0(z) = sqrt(pi/(2z)) e^{-z} S(z)`, valid for `|arg z| < pi`.
///
/// For moderate `|z|` this uses
/// `S(z) = (2/sqrt(pi)) int_0^inf e^{-v^2} (1 + v^2/(2z))^{-1/2} dv`
/// with the trapezoid rule; the integrand is analytic in a strip around the
/// real axis whose half-width is `sqrt(2|z|) cos(arg(z)/2)`, so the rule
/// converges geometrically. For large `|z|` the asymptotic series
/// `1 - 1/(8z) + 9/(128 z^2) - ...` is summed to its smallest term.
fn k0_scaled_factor(z: ComplexValue) -> ComplexValue {
    if z.norm() >= ASYMPTOTIC_RADIUS {
        let inv = z.inv();
        let mut term = ComplexValue::new(1.0, 0.0);
        let mut sum = term;
        let mut prev = f64::INFINITY;
        for k in 1..200 {
            let kf = k as f64;
            let next = term * inv * (-(2.0 * kf - 1.0).powi(2) / (8.0 * kf));
            let mag = next.norm();
            if mag >= prev || mag < 1e-18 {
                break;
            }
            prev = mag;
            term = next;
            sum += term;
        }
        return sum;
    }
    let strip = (2.0 * z.norm()).sqrt() * (0.5 * z.arg()).cos();
    let h = (2.0 * PI * 0.8 * strip / 50.0).min(0.125);
    let two_z = 2.0 * z;
    let f = |v: f64| -> ComplexValue {
        let v2 = v * v;
        (1.0 + v2 / two_z).sqrt().inv() * (-v2).exp()
    };
    let mut sum = f(0.0) * 0.5;
    let mut j = 1;
    loop {
        let v = j as f64 * h;
        if v > 6.6 {
            break;
        }
        sum += f(v);
        j += 1;
    }
    sum * (2.0 * h / PI.sqrt())
}

/// `I0(z)` by the trapezoid rule on `(1/2pi) int_0^{2pi} e^{z cos t} dt`,
/// which converges geometrically for any `z`.
pub fn bessel_i0(z: ComplexValue) -> ComplexValue {
    let n = 64 + (2.0 * (60.0 * z.norm()).sqrt()).ceil() as usize;
    let mut sum = ComplexValue::new(0.0, 0.0);
    for j in 0..n {
        let t = 2.0 * PI * j as f64 / n as f64;
        sum += (z * t.cos()).exp();
    }
    sum / n as f64
}

/// Large-argument branch: `sqrt(pi/(2z)) e^{-z} S(z)` where `|arg z| <= 3pi/4`,
/// and the continuation formula across the negative real axis elsewhere.
pub fn bessel_k0_large(z: ComplexValue) -> Result<ComplexValue> {
    check_arg(z)?;
    if z.arg().abs() <= CONTINUATION_ARG {
        let v = (PI / (2.0 * z)).sqrt() * (-z).exp() * k0_scaled_factor(z);
        return finite(v, "bessel_k0_large");
    }
    let w = -z;
    let sign = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let kw = (PI / (2.0 * w)).sqrt() * (-w).exp() * k0_scaled_factor(w);
    let v = kw - ComplexValue::new(0.0, sign * PI) * bessel_i0(w);
    finite(v, "bessel_k0_large")
}

/// Modified Bessel function `K0(z)` on the principal branch.
///
/// Uses the ascending series for `|z| <= K0_SERIES_RADIUS` and the
/// exponentially scaled large-argument form beyond.
pub fn bessel_k0(z: ComplexValue) -> Result<ComplexValue> {
    check_arg(z)?;
    if z.norm() <= K0_SERIES_RADIUS {
        bessel_k0_series(z)
    } else {
        bessel_k0_large(z)
    }
}

fn check_arg(z: ComplexValue) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("K0 of non-finite {z}")));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain("K0 has a logarithmic singularity at 0".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    fn rel(a: ComplexValue, b: ComplexValue) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn k0_at_one() {
        let v = bessel_k0(c(1.0, 0.0)).unwrap();
        assert!((v.re - 0.421_024_438_240_708_3).abs() < 1e-14);
        assert!(v.im.abs() < 1e-16);
    }

    #[test]
    fn k0_small_argument_log() {
        let v = bessel_k0(c(0.01, 0.0)).unwrap();
        let approx = -(0.005f64).ln() - EULER_GAMMA;
        assert!((v.re - approx).abs() < 1e-3);
        assert!((v.re - 4.72119).abs() < 1e-3);
    }

    #[test]
    fn k0_at_twenty_matches_series() {
        let z = c(20.0, 0.0);
        let large = bessel_k0(z).unwrap();
        // leading terms of the asymptotic form
        let lead = (PI / 40.0).sqrt() * (-20.0f64).exp() * (1.0 - 1.0 / 160.0 + 9.0 / 51200.0);
        assert!((large.re - lead).abs() / lead < 1e-5);
        // reference value from a 30-digit evaluation
        let reference = 5.741_237_815_336_524_3e-10;
        assert!((large.re - reference).abs() / reference < 1e-10);
    }

    #[test]
    fn overlap_agreement() {
        for i in 0..=8 {
            let r = 4.0 + 0.5 * i as f64;
            for j in 0..=12 {
                let th = -PI + (2.0 * PI) * j as f64 / 12.0;
                let z = ComplexValue::from_polar(r, th);
                let a = bessel_k0_series(z).unwrap();
                let b = bessel_k0_large(z).unwrap();
                assert!(rel(a, b) <= 1e-9, "z = {z}: {a} vs {b}, rel {}", rel(a, b));
            }
        }
    }

    #[test]
    fn conjugate_symmetry_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let r = 10f64.powf(rng.gen_range(-3.0..2.7));
            let th = rng.gen_range(-3.1..3.1);
            let z = ComplexValue::from_polar(r, th);
            let a = bessel_k0(z.conj()).unwrap();
            let b = bessel_k0(z).unwrap().conj();
            assert!(rel(a, b) < 1e-14, "z = {z}");
        }
    }

    #[test]
    fn imaginary_axis_against_hankel() {
        // K0(iy) = -(pi/2) (Y0(y) + i J0(y)); J0(10) and Y0(10) tabulated.
        let v = bessel_k0(c(0.0, 10.0)).unwrap();
        let j0 = -0.245_935_764_451_348_3;
        let y0 = 0.055_671_167_283_599_39;
        assert!((v.re + PI / 2.0 * y0).abs() < 1e-13);
        assert!((v.im + PI / 2.0 * j0).abs() < 1e-13);
    }

    #[test]
    fn ode_residual_by_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let r = rng.gen_range(1.0..50.0);
            let th = rng.gen_range(-2.0..2.0);
            let z = ComplexValue::from_polar(r, th);
            let h = 1e-4 * r;
            let k = |w| bessel_k0(w).unwrap();
            let f0 = k(z);
            let fp = k(z + h);
            let fm = k(z - h);
            let d1 = (fp - fm) / (2.0 * h);
            let d2 = (fp - 2.0 * f0 + fm) / (h * h);
            let res = z * d2 + d1 - z * f0;
            let scale = (z * f0).norm();
            assert!(res.norm() / scale < 1e-5, "z = {z}: {}", res.norm() / scale);
        }
    }

    #[test]
    fn domain_error_at_zero() {
        assert!(matches!(bessel_k0(c(0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn i0_against_series() {
        let z = c(3.0, 2.0);
        let mut term = c(1.0, 0.0);
        let mut sum = term;
        for k in 1..80 {
            term *= z * z * 0.25 / ((k * k) as f64);
            sum += term;
        }
        assert!(rel(bessel_i0(z), sum) < 1e-14);
    }
}
