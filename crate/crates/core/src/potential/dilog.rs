//! Principal-branch dilogarithm.
//!
//! The argument is mapped into `|z| ≤ 1, Re z ≤ 1/2` (or the reflection
//! region) and the Bernoulli series in `u = −log(1 − z)` is summed there.
//! On the cut `(1, ∞)` the value is the limit from below.

use crate::quandle::C64;
use std::f64::consts::PI;

const PI2_6: f64 = PI * PI / 6.0;

// B_{2n} / (2n+1)!, n = 1..
const BF: [f64; 12] = [
    1.0 / 36.0,
    -1.0 / 3600.0,
    1.0 / 211680.0,
    -1.0 / 10886400.0,
    1.0 / 526901760.0,
    -4.0647616451442256e-11,
    8.921691020456452e-13,
    -1.9939295860721074e-14,
    4.518980029619918e-16,
    -1.0356517612181247e-17,
    2.395218621026187e-19,
    -5.581785874325009e-21,
];

/// Σ B_n uⁿ⁺¹/(n+1)! = u − u²/4 + Σ_{n≥1} B_{2n} u^{2n+1}/(2n+1)!.
fn bernoulli_series(u: C64) -> C64 {
    let u2 = u * u;
    let mut acc = C64::new(0.0, 0.0);
    for &b in BF.iter().rev() {
        acc = acc * u2 + b;
    }
    u - 0.25 * u2 + acc * u2 * u
}

fn li2_real(x: f64) -> f64 {
    // x ≤ 1 only
    if x == 1.0 {
        return PI2_6;
    }
    li2_core(C64::new(x, 0.0)).re
}

/// Core transformation for `z` with `Im z ≥ 0` or real `z ≤ 1`.
fn li2_core(z: C64) -> C64 {
    let nz = z.norm_sqr();
    if nz < 1e-30 {
        return z * (1.0 + 0.25 * z);
    }
    let one = C64::new(1.0, 0.0);
    if z.re <= 0.5 {
        if nz > 1.0 {
            // inversion: Li₂(z) = −Li₂(1/z) − π²/6 − ½log²(−z)
            let lz = (-z).ln();
            let u = -(one - one / z).ln();
            -bernoulli_series(u) - 0.5 * lz * lz - PI2_6
        } else {
            bernoulli_series(-(one - z).ln())
        }
    } else if nz <= 2.0 * z.re {
        // |1 − z| ≤ 1, reflection: Li₂(z) = −Li₂(1−z) + π²/6 − log z log(1−z)
        let u = -z.ln();
        -bernoulli_series(u) + u * (one - z).ln() + PI2_6
    } else {
        // |1 − z| > 1, inversion then the series in −log(1 − 1/z)
        let lz = (-z).ln();
        let u = -(one - one / z).ln();
        -bernoulli_series(u) - 0.5 * lz * lz - PI2_6
    }
}

pub fn li2(z: C64) -> C64 {
    if !z.is_finite() {
        return C64::new(f64::NAN, f64::NAN);
    }
    if z.im == 0.0 {
        let x = z.re;
        if x <= 1.0 {
            return C64::new(li2_real(x), 0.0);
        }
        // from below the cut: π²/3 − ½log²x − Li₂(1/x) − iπ log x
        let l = x.ln();
        return C64::new(PI * PI / 3.0 - 0.5 * l * l - li2_real(1.0 / x), -PI * l);
    }
    if z.im < 0.0 {
        li2_core(z.conj()).conj()
    } else {
        li2_core(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quandle::c;

    /// Independent oracle: the defining power series, slowly but directly.
    fn series(z: C64) -> C64 {
        let mut sum = c(0.0, 0.0);
        let mut zk = z;
        for k in 1..4000 {
            let term = zk / (k as f64 * k as f64);
            sum += term;
            if term.norm() < 1e-18 {
                break;
            }
            zk *= z;
        }
        sum
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn classical_values() {
        assert_eq!(li2(c(0.0, 0.0)), c(0.0, 0.0));
        assert!((li2(c(1.0, 0.0)).re - PI2_6).abs() < 1e-15);
        assert!((li2(c(-1.0, 0.0)).re + PI * PI / 12.0).abs() < 1e-15);
        let half = li2(c(0.5, 0.0)).re;
        let ln2 = (2f64).ln();
        assert!((half - (PI * PI / 12.0 - 0.5 * ln2 * ln2)).abs() < 1e-15);
        // Li₂(2) from below = π²/4 − iπ log 2
        let v = li2(c(2.0, 0.0));
        assert!((v - c(PI * PI / 4.0, -PI * ln2)).norm() < 1e-14);
    }

    #[test]
    fn matches_power_series_inside_disc() {
        let pts = [
            c(0.3, 0.4),
            c(-0.7, 0.2),
            c(0.6, -0.5),
            c(0.1, 0.85),
            c(-0.45, -0.8),
            c(0.9, 0.05),
            c(0.49, 0.0),
            c(0.51, 0.2),
        ];
        for z in pts {
            assert!(rel(li2(z), series(z)) < 1e-13, "{z}: {} vs {}", li2(z), series(z));
        }
    }

    #[test]
    fn matches_reference_values() {
        // reference values from an independent 30-digit evaluation
        let cases = [
            (c(3.0, 1.0), c(1.345928870821083, 3.365110402666194)),
            (c(-5.0, 2.0), c(-2.823415189139893, 0.7042392336430174)),
            (c(1.0, 1.0), c(0.6168502750680849, 1.4603621167531196)),
            (c(0.5, 0.8660254037844386), c(0.27415567780803773, 1.0149416064096537)),
            (c(10.0, -0.001), c(0.5359871226629837, -7.2335647056658505)),
            (c(1.5, 1e-9), c(2.374395268178085, 1.2738062053816988)),
            (c(1.0001, -0.0002), c(1.6454679144451567, -0.0020844210676820474)),
            (c(-0.3, -4.0), c(-1.4574049195455112, -2.322712790506195)),
        ];
        for (z, want) in cases {
            assert!(rel(li2(z), want) < 1e-13, "{z}: got {} want {want}", li2(z));
        }
    }

    #[test]
    fn functional_equations() {
        for z in [c(0.2, 0.7), c(2.5, -1.3), c(-3.0, 0.4), c(0.8, -0.1)] {
            let one = c(1.0, 0.0);
            // reflection Li₂(z) + Li₂(1−z) = π²/6 − log z log(1−z)
            let lhs = li2(z) + li2(one - z);
            let rhs = c(PI2_6, 0.0) - z.ln() * (one - z).ln();
            assert!((lhs - rhs).norm() < 1e-13);
            // inversion off the cut
            let lhs = li2(z) + li2(one / z);
            let rhs = c(-PI2_6, 0.0) - 0.5 * (-z).ln() * (-z).ln();
            assert!((lhs - rhs).norm() < 1e-13);
        }
    }

    #[test]
    fn conjugation_symmetry_off_cut() {
        for z in [c(0.2, 0.7), c(2.5, 1.3), c(-3.0, 0.4)] {
            assert!((li2(z.conj()) - li2(z).conj()).norm() < 1e-15);
        }
    }
}
