//! Phase-space transforms on `(x, p)` grids for `n = 1`: the symplectic
//! Fourier transform and the kernel-to-Weyl-symbol map.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::descriptor::MWDescriptor;
use super::fourier::{map_lines, scaled_dft, shift_line};
use super::grid::{GridFlags, GridFunction, GridSpec};
use crate::error::{Error, Result};
use crate::gaussian::{quad_fourier_kernel, QuadExp};
use crate::linalg::{to_complex, CVec, RMat, RVec};
use crate::symplectic::FreeGenerator;

fn phase_space_grid(a: &GridFunction, what: &str) -> Result<GridSpec> {
    let spec = *a.spec();
    if spec.n() != 2 {
        return Err(Error::Unsupported(format!("{what} is implemented for n=1 (a two-dimensional grid) only")));
    }
    Ok(spec)
}

/// `F_σa(z) = (2π)^{−1} ∫ exp(iσ(z,z'))a(z')dz'` with
/// `σ(z,z') = p x' − p' x`, on the same `(x, p)` grid.
pub fn symplectic_fourier(a: &GridFunction) -> Result<GridFunction> {
    let spec = phase_space_grid(a, "symplectic_fourier")?;
    let npts = spec.points();
    let h = spec.spacing();
    let x0 = -spec.half_extent();
    let mut data = a.samples().to_vec();
    // p' → x with e^{−i x p'}
    map_lines(&mut data, 2, npts, 1, |line| *line = scaled_dft(line, x0, h, x0, h, -1.0, npts));
    // x' → p with e^{i p x'}; the second index becomes p
    map_lines(&mut data, 2, npts, 0, |line| *line = scaled_dft(line, x0, h, x0, h, 1.0, npts));
    // after both passes data[x'-slot=p][p'-slot=x]; transpose to [x][p]
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for i in 0..npts {
        for j in 0..npts {
            out[j * npts + i] = data[i * npts + j];
        }
    }
    let scale = h * h / (2.0 * PI);
    for v in out.iter_mut() {
        *v *= scale;
    }
    let flags = GridFlags { truncation: a.flags.truncation || a.is_truncated(), ..a.flags };
    Ok(GridFunction::from_parts(spec, out, flags))
}

/// `a(x,p) = ∫ exp(−ipy) K(x + y/2, x − y/2) dy` from a kernel sampled on an
/// `(x, x')` grid; the output lives on the `(x, p)` grid with the same nodes.
///
/// With `y = rΔ`, even `r` lands on nodes of `K`, odd `r` on nodes of `K`
/// shifted by `Δ/2` in both arguments, which is obtained by bandlimited
/// interpolation.
pub fn kernel_to_symbol(k: &GridFunction) -> Result<GridFunction> {
    let spec = phase_space_grid(k, "kernel_to_symbol")?;
    let npts = spec.points();
    let h = spec.spacing();
    let x0 = -spec.half_extent();
    let mut half = k.samples().to_vec();
    for axis in 0..2 {
        map_lines(&mut half, 2, npts, axis, |line| shift_line(line, h, -0.5 * h));
    }
    let at = |data: &[Complex64], u: i64, v: i64| -> Complex64 {
        if u < 0 || v < 0 || u >= npts as i64 || v >= npts as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            data[u as usize * npts + v as usize]
        }
    };
    let rmax = 2 * npts as i64 - 1;
    let len = (2 * rmax + 1) as usize;
    let mut out = vec![Complex64::new(0.0, 0.0); spec.len()];
    let mut line = vec![Complex64::new(0.0, 0.0); len];
    for j in 0..npts as i64 {
        for (slot, r) in (-rmax..=rmax).enumerate() {
            line[slot] = if r.rem_euclid(2) == 0 {
                let s = r / 2;
                at(k.samples(), j + s, j - s)
            } else {
                let s = (r - 1) / 2;
                at(&half, j + s, j - s - 1)
            };
        }
        let row = scaled_dft(&line, -(rmax as f64) * h, h, x0, h, -1.0, npts);
        for (l, v) in row.into_iter().enumerate() {
            out[j as usize * npts + l] = v * h;
        }
    }
    let flags = GridFlags { truncation: k.flags.truncation || k.is_truncated(), ..k.flags };
    Ok(GridFunction::from_parts(spec, out, flags))
}

/// Twisted symbol of `desc` (`n = 1`) damped by `exp(−ε_x x² − ε_p p²)`,
/// sampled on the phase-space grid.
pub fn windowed_twisted_symbol(desc: &MWDescriptor, spec: GridSpec, eps_x: f64, eps_p: f64) -> Result<GridFunction> {
    if desc.n() != 1 || spec.n() != 2 {
        return Err(Error::Unsupported("windowed symbols are built for n=1 only".into()));
    }
    let pre = desc.prefactor();
    let ms = desc.ms();
    Ok(GridFunction::from_fn(spec, |z| {
        let damp = -eps_x * z[0] * z[0] - eps_p * z[1] * z[1];
        pre * Complex64::new(damp, 0.5 * (ms * z).dot(z)).exp()
    }))
}

/// Kernel of `Ŝ_{W,m}` (`n = 1`) with the windowing dual to
/// [`windowed_twisted_symbol`]: `K` is averaged along the diagonal with the
/// normalized Gaussian of variance `2ε_p` and multiplied by
/// `exp(−ε_x(x − x')²)`. Both windowed objects then represent the same
/// operator, so `kernel_to_symbol` of one equals `symplectic_fourier` of the
/// other.
pub fn windowed_kernel(gen: &FreeGenerator, spec: GridSpec, eps_x: f64, eps_p: f64) -> Result<GridFunction> {
    if gen.n() != 1 || spec.n() != 2 {
        return Err(Error::Unsupported("windowed kernels are built for n=1 only".into()));
    }
    if !(eps_x > 0.0 && eps_p > 0.0) {
        return Err(Error::InvalidParameter("window widths must be positive".into()));
    }
    // K(x1 − u, x2 − u) over (x1, x2, u)
    let shift = RMat::from_row_slice(2, 3, &[1.0, 0.0, -1.0, 0.0, 1.0, -1.0]);
    let kern = quad_fourier_kernel(gen).pullback(&shift, &RVec::zeros(2));
    let mut a = RMat::zeros(3, 3);
    a[(0, 0)] = -2.0 * eps_x;
    a[(1, 1)] = -2.0 * eps_x;
    a[(0, 1)] = 2.0 * eps_x;
    a[(1, 0)] = 2.0 * eps_x;
    a[(2, 2)] = -1.0 / (2.0 * eps_p);
    let window = QuadExp::new(to_complex(&a), CVec::zeros(3), Complex64::new(-0.5 * (4.0 * PI * eps_p).ln(), 0.0));
    let joint = kern.mul(&window).integrate_out(&[2])?;
    Ok(GridFunction::from_fn(spec, |x| joint.eval(x)))
}

/// Weyl symbol of `∫ a_σ(z₀)T(z₀)dz₀` from its twisted symbol:
/// `a(z) = ∫ e^{iσ(z₀,z)} a_σ(z₀)dz₀ = 2π·F_σa_σ(−z)`.
pub fn weyl_from_twisted(a_sigma: &GridFunction) -> Result<GridFunction> {
    let f = symplectic_fourier(a_sigma)?;
    let spec = *f.spec();
    let npts = spec.points();
    let src = f.samples();
    // −x_k = x_{N−k}; the k = 0 edge wraps onto itself
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    for i in 0..npts {
        for j in 0..npts {
            let (ri, rj) = ((npts - i) % npts, (npts - j) % npts);
            out[i * npts + j] = src[ri * npts + rj] * (2.0 * PI);
        }
    }
    Ok(GridFunction::from_parts(spec, out, f.flags))
}

/// Largest deviation between the two sides of the kernel/symbol bridge for
/// one generator: `kernel_to_symbol(windowed kernel)` against the Weyl
/// symbol obtained from the windowed twisted symbol with `ν` from the index
/// formula.
pub fn symbol_bridge_residual(gen: &FreeGenerator, spec: GridSpec, eps: f64) -> Result<f64> {
    let desc = MWDescriptor::from_generator(gen)?;
    let from_kernel = kernel_to_symbol(&windowed_kernel(gen, spec, eps, eps)?)?;
    let from_symbol = weyl_from_twisted(&windowed_twisted_symbol(&desc, spec, eps, eps)?)?;
    from_kernel.max_abs_diff(&from_symbol)
}
