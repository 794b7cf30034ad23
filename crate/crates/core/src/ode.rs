//! Adaptive Dormand-Prince 4(5) integration for small real systems.

use crate::{Error, Result};

/// Integrate dy/dx = f(x, y) from x0 to x1 with adaptive steps, recording the
/// solution at the given output points (must be increasing, within [x0, x1]).
///
/// Dense output between accepted steps uses cubic Hermite interpolation on
/// (y, f); with rtol ~ 1e-10 and output grids that are much coarser than the
/// accepted steps this stays well below the solver tolerance.
pub fn integrate_dopri5<F>(
    f: F,
    x0: f64,
    x1: f64,
    y0: Vec<f64>,
    rtol: f64,
    atol: f64,
    outputs: &[f64],
) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    // Dormand-Prince coefficients.
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];

    let n = y0.len();
    let span = x1 - x0;
    if span <= 0.0 {
        return Err(Error::domain("integrate_dopri5: x1 must exceed x0"));
    }
    let mut x = x0;
    let mut y = y0;
    let mut dy = f(x, &y);
    let mut h = (span / 100.0).min(1e-3 * span.max(1.0));
    let h_min = span * 1e-14;

    let mut out = Vec::with_capacity(outputs.len());
    let mut out_iter = outputs.iter().peekable();
    // Emit any output points at or before x0.
    while let Some(&&xo) = out_iter.peek() {
        if xo <= x + 1e-300 {
            out.push(y.clone());
            out_iter.next();
        } else {
            break;
        }
    }

    let mut k = vec![vec![0.0; n]; 7];
    let max_steps = 2_000_000usize;
    let mut steps = 0usize;
    while x < x1 {
        steps += 1;
        if steps > max_steps {
            return Err(Error::solver("integrate_dopri5: step budget exhausted"));
        }
        if h < h_min {
            return Err(Error::solver("integrate_dopri5: step underflow"));
        }
        if x + h > x1 {
            h = x1 - x;
        }
        k[0].copy_from_slice(&dy);
        for s in 0..6 {
            let mut ys = y.clone();
            for j in 0..=s {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..n {
                        ys[i] += h * a * k[j][i];
                    }
                }
            }
            k[s + 1] = f(x + C[s] * h, &ys);
        }
        // 5th order solution is the s=5 stage combination (FSAL form).
        let mut y5 = y.clone();
        for j in 0..6 {
            let a = A[5][j];
            if a != 0.0 {
                for i in 0..n {
                    y5[i] += h * a * k[j][i];
                }
            }
        }
        // Error estimate.
        let mut err: f64 = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for j in 0..7 {
                e += E[j] * k[j][i];
            }
            e *= h;
            let sc = atol + rtol * y[i].abs().max(y5[i].abs());
            err = err.max((e / sc).abs());
        }
        if err <= 1.0 {
            let x_new = x + h;
            let dy_new = f(x_new, &y5);
            // Dense output via cubic Hermite on the accepted interval.
            while let Some(&&xo) = out_iter.peek() {
                if xo <= x_new + 1e-300 {
                    let t = ((xo - x) / h).clamp(0.0, 1.0);
                    let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
                    let h10 = t * (1.0 - t) * (1.0 - t);
                    let h01 = t * t * (3.0 - 2.0 * t);
                    let h11 = t * t * (t - 1.0);
                    let mut yi = vec![0.0; n];
                    for i in 0..n {
                        yi[i] = h00 * y[i] + h10 * h * dy[i] + h01 * y5[i] + h11 * h * dy_new[i];
                    }
                    out.push(yi);
                    out_iter.next();
                } else {
                    break;
                }
            }
            x = x_new;
            y = y5;
            dy = dy_new;
        }
        let safety = 0.9 * (1.0 / err.max(1e-10)).powf(0.2);
        h *= safety.clamp(0.2, 5.0);
    }
    // Anything left (xo == x1 up to roundoff).
    for _ in out_iter {
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let outs: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let sol = integrate_dopri5(|_, y| vec![-y[0]], 0.0, 1.0, vec![1.0], 1e-10, 1e-12, &outs).unwrap();
        for (i, y) in sol.iter().enumerate() {
            let x = i as f64 * 0.1;
            assert!((y[0] - (-x).exp()).abs() < 1e-8, "at {x}: {} vs {}", y[0], (-x).exp());
        }
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let sol =
            integrate_dopri5(|_, y| vec![y[1], -y[0]], 0.0, 20.0, vec![1.0, 0.0], 1e-11, 1e-13, &[20.0])
                .unwrap();
        let e = sol[0][0] * sol[0][0] + sol[0][1] * sol[0][1];
        assert!((e - 1.0).abs() < 1e-7);
    }
}
