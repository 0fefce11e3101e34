//! Bounded simulated binary crossover and polynomial mutation in the form
//! used by the reference NSGA-II implementation.

use rand::Rng;

use crate::math::{abs, powf};

/// Crossover of two parents in place. Each variable is recombined with
/// probability 1/2 and the children then swap it with probability 1/2.
pub fn sbx<R: Rng + ?Sized>(
    a: &mut [f64],
    b: &mut [f64],
    bounds: &[(f64, f64)],
    eta: f64,
    rng: &mut R,
) {
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        if rng.random::<f64>() > 0.5 || abs(a[i] - b[i]) <= 1e-14 {
            continue;
        }
        let (y1, y2) = if a[i] < b[i] { (a[i], b[i]) } else { (b[i], a[i]) };
        let u: f64 = rng.random();
        let spread = |beta: f64| {
            let alpha = 2.0 - powf(beta, -(eta + 1.0));
            if u <= 1.0 / alpha {
                powf(u * alpha, 1.0 / (eta + 1.0))
            } else {
                powf(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0))
            }
        };
        let bq = spread(1.0 + 2.0 * (y1 - lo) / (y2 - y1));
        let c1 = (0.5 * (y1 + y2 - bq * (y2 - y1))).clamp(lo, hi);
        let bq = spread(1.0 + 2.0 * (hi - y2) / (y2 - y1));
        let c2 = (0.5 * (y1 + y2 + bq * (y2 - y1))).clamp(lo, hi);
        if rng.random::<f64>() <= 0.5 {
            a[i] = c2;
            b[i] = c1;
        } else {
            a[i] = c1;
            b[i] = c2;
        }
    }
}

/// Mutates each variable with probability `probability`.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    x: &mut [f64],
    bounds: &[(f64, f64)],
    probability: f64,
    eta: f64,
    rng: &mut R,
) {
    let power = 1.0 / (eta + 1.0);
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        if rng.random::<f64>() >= probability {
            continue;
        }
        let range = hi - lo;
        let d1 = (*v - lo) / range;
        let d2 = (hi - *v) / range;
        let u: f64 = rng.random();
        let dq = if u < 0.5 {
            let val = 2.0 * u + (1.0 - 2.0 * u) * powf(1.0 - d1, eta + 1.0);
            powf(val, power) - 1.0
        } else {
            let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * powf(1.0 - d2, eta + 1.0);
            1.0 - powf(val, power)
        };
        *v = (*v + dq * range).clamp(lo, hi);
    }
}
