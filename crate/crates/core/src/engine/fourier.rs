//! FFT-based helpers on uniform grids: bandlimited shifts along one axis and
//! Bluestein evaluation of scaled discrete Fourier sums.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Visit every line of an `n`-dimensional `N^n` row-major array along `axis`
/// as a gathered vector, replacing it with the closure's output.
pub(crate) fn map_lines<F>(data: &mut [Complex64], dims: usize, points: usize, axis: usize, mut f: F)
where
    F: FnMut(&mut Vec<Complex64>),
{
    let stride = points.pow((dims - 1 - axis) as u32);
    let outer = data.len() / (stride * points);
    let mut line = vec![Complex64::new(0.0, 0.0); points];
    for o in 0..outer {
        for s in 0..stride {
            let base = o * stride * points + s;
            for (k, v) in line.iter_mut().enumerate() {
                *v = data[base + k * stride];
            }
            f(&mut line);
            for (k, v) in line.iter().enumerate() {
                data[base + k * stride] = *v;
            }
        }
    }
}

/// Angular wavenumbers of the DFT modes for `points` samples at `spacing`.
/// The Nyquist mode is reported as negative.
pub(crate) fn wavenumbers(points: usize, spacing: f64) -> Vec<f64> {
    let l = points as f64 * spacing;
    (0..points)
        .map(|j| {
            let j = if j < points / 2 { j as i64 } else { j as i64 - points as i64 };
            2.0 * PI * j as f64 / l
        })
        .collect()
}

/// Forward FFT of one line.
fn fft(line: &mut [Complex64]) {
    FftPlanner::new().plan_fft_forward(line.len()).process(line);
}

fn ifft(line: &mut [Complex64]) {
    let n = line.len() as f64;
    FftPlanner::new().plan_fft_inverse(line.len()).process(line);
    for v in line.iter_mut() {
        *v /= n;
    }
}

/// Multiplier applied to mode `j` for a translation by `t`; the Nyquist mode
/// uses the symmetric `cos` form so real data stays real.
fn mode_factor(j: usize, points: usize, k: f64, t: f64) -> Complex64 {
    if j == points / 2 {
        Complex64::new((k * t).cos(), 0.0)
    } else {
        Complex64::from_polar(1.0, k * t)
    }
}

/// `f(x) ↦ f(x − s)` on one periodic line by spectral interpolation.
pub(crate) fn shift_line(line: &mut [Complex64], spacing: f64, s: f64) {
    let n = line.len();
    let ks = wavenumbers(n, spacing);
    fft(line);
    for (j, v) in line.iter_mut().enumerate() {
        *v *= mode_factor(j, n, ks[j], -s);
    }
    ifft(line);
}

/// `out_j = Σ_k a_k exp(i·sign·y_j·x_k)` with `x_k = x0 + k·dx`,
/// `y_j = y0 + j·dy`, `j < n_out`, computed by Bluestein's chirp convolution.
pub(crate) fn scaled_dft(a: &[Complex64], x0: f64, dx: f64, y0: f64, dy: f64, sign: f64, n_out: usize) -> Vec<Complex64> {
    let n_in = a.len();
    if n_in == 0 || n_out == 0 {
        return vec![Complex64::new(0.0, 0.0); n_out];
    }
    let beta = sign * dx * dy;
    let len = (n_in + n_out - 1).next_power_of_two();
    let mut p = vec![Complex64::new(0.0, 0.0); len];
    for (k, v) in a.iter().enumerate() {
        let kf = k as f64;
        p[k] = v * Complex64::from_polar(1.0, sign * y0 * dx * kf + 0.5 * beta * kf * kf);
    }
    let mut h = vec![Complex64::new(0.0, 0.0); len];
    for m in 0..n_out {
        let mf = m as f64;
        h[m] = Complex64::from_polar(1.0, -0.5 * beta * mf * mf);
    }
    for m in 1..n_in {
        let mf = m as f64;
        h[len - m] = Complex64::from_polar(1.0, -0.5 * beta * mf * mf);
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    fwd.process(&mut p);
    fwd.process(&mut h);
    for (pv, hv) in p.iter_mut().zip(h.iter()) {
        *pv *= hv;
    }
    inv.process(&mut p);
    let scale = 1.0 / len as f64;
    (0..n_out)
        .map(|j| {
            let jf = j as f64;
            let outer = Complex64::from_polar(1.0, sign * (y0 * x0 + x0 * dy * jf) + 0.5 * beta * jf * jf);
            p[j] * scale * outer
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(a: &[Complex64], x0: f64, dx: f64, y0: f64, dy: f64, sign: f64, n_out: usize) -> Vec<Complex64> {
        (0..n_out)
            .map(|j| {
                let y = y0 + j as f64 * dy;
                a.iter()
                    .enumerate()
                    .map(|(k, v)| v * Complex64::from_polar(1.0, sign * y * (x0 + k as f64 * dx)))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn bluestein_matches_direct_sum() {
        let a: Vec<Complex64> = (0..37).map(|k| Complex64::new((k as f64 * 0.3).sin(), (k as f64 * 0.17).cos())).collect();
        for (sign, n_out) in [(1.0, 20), (-1.0, 64), (-1.0, 37)] {
            let fast = scaled_dft(&a, -2.3, 0.13, -1.7, 0.21, sign, n_out);
            let slow = direct(&a, -2.3, 0.13, -1.7, 0.21, sign, n_out);
            let err = fast.iter().zip(&slow).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(err < 1e-11, "err {err}");
        }
    }

    #[test]
    fn integer_shift_is_rotation() {
        let mut line: Vec<Complex64> = (0..16).map(|k| Complex64::new(k as f64, -(k as f64))).collect();
        let orig = line.clone();
        shift_line(&mut line, 0.5, 1.5);
        for k in 0..16 {
            assert!((line[(k + 3) % 16] - orig[k]).norm() < 1e-12);
        }
    }
}
