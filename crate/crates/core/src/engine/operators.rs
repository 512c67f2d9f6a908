//! Grid versions of the Heisenberg–Weyl operators and quadratic Fourier
//! transforms.

use num_complex::Complex64;

use super::fourier::{map_lines, scaled_dft, shift_line};
use super::grid::{GridFlags, GridFunction};
use crate::error::{Error, Result};
use crate::gaussian::quad_fourier_prefactor;
use crate::linalg::{RMat, I};
use crate::symplectic::{FreeGenerator, PhaseSpacePoint};

/// Relative level above which mass beyond `0.8·X` raises the overflow flag.
const OUTER_BAND_TOL: f64 = 1e-10;

const LATTICE_TOL: f64 = 1e-12;

fn lattice_steps(shift: f64, spacing: f64) -> Option<i64> {
    let r = shift / spacing;
    let k = r.round();
    ((r - k).abs() < LATTICE_TOL).then_some(k as i64)
}

/// `T(z₀)f(x) = exp(i(⟨p₀,x⟩ − ½⟨p₀,x₀⟩)) f(x − x₀)`.
///
/// Lattice-aligned position shifts are index rotations; other shifts use
/// bandlimited interpolation. Both wrap around periodically.
pub fn hw_apply(z0: &PhaseSpacePoint, f: &GridFunction) -> Result<GridFunction> {
    let spec = *f.spec();
    let n = spec.n();
    if z0.n() != n {
        return Err(Error::Dimension(format!("z₀ has n={}, grid has n={n}", z0.n())));
    }
    let npts = spec.points();
    let h = spec.spacing();
    let mut data = f.samples().to_vec();
    for axis in 0..n {
        let s = z0.x[axis];
        if s == 0.0 {
            continue;
        }
        match lattice_steps(s, h) {
            Some(k) => {
                let k = k.rem_euclid(npts as i64) as usize;
                map_lines(&mut data, n, npts, axis, |line| line.rotate_right(k));
            }
            None => map_lines(&mut data, n, npts, axis, |line| shift_line(line, h, s)),
        }
    }
    let c = -0.5 * z0.p.dot(&z0.x);
    for (k, v) in data.iter_mut().enumerate() {
        let x = spec.coords(k);
        *v *= Complex64::from_polar(1.0, z0.p.dot(&x) + c);
    }
    let mut out = GridFunction::from_parts(spec, data, f.flags);
    let band = 0.8 * spec.half_extent();
    out.flags.domain_overflow |= z0.x.iter().any(|v| v.abs() > band) || out.reaches_outer_band(OUTER_BAND_TOL);
    Ok(out)
}

fn check_generator(gen: &FreeGenerator, f: &GridFunction) -> Result<()> {
    if gen.n() != f.spec().n() {
        return Err(Error::Dimension(format!("generator n={}, grid n={}", gen.n(), f.spec().n())));
    }
    Ok(())
}

fn input_flags(f: &GridFunction) -> GridFlags {
    GridFlags { truncation: f.flags.truncation || f.is_truncated(), ..f.flags }
}

/// `exp(½i⟨Mx,x⟩)` at every node.
fn chirp(f: &GridFunction, m: &RMat) -> Vec<Complex64> {
    let spec = f.spec();
    (0..spec.len())
        .map(|k| {
            let x = spec.coords(k);
            Complex64::from_polar(1.0, 0.5 * (m * &x).dot(&x))
        })
        .collect()
}

/// `Ŝ_{W,m}f(x) = (2πi)^{−n/2} i^m √|det L| ∫ exp(iW(x,x'))f(x')dx'` by the
/// trapezoid rule on the grid, evaluated at every node.
pub fn quad_fourier_grid(gen: &FreeGenerator, f: &GridFunction) -> Result<GridFunction> {
    check_generator(gen, f)?;
    let spec = *f.spec();
    let nodes = spec.nodes();
    let npts = spec.points();
    let pref = quad_fourier_prefactor(gen) * spec.cell();
    let q_chirp = chirp(f, gen.q());
    let p_chirp = chirp(f, gen.p());
    let g: Vec<Complex64> = f.samples().iter().zip(&q_chirp).map(|(a, b)| a * b).collect();
    let l = gen.l();
    // e^{−i x_j L_ab x'_k}
    let cross = |a: usize, b: usize| -> Vec<Complex64> {
        let mut t = Vec::with_capacity(npts * npts);
        for &xj in &nodes {
            for &xk in &nodes {
                t.push(Complex64::from_polar(1.0, -xj * l[(a, b)] * xk));
            }
        }
        t
    };
    let mut out = vec![Complex64::new(0.0, 0.0); spec.len()];
    match spec.n() {
        1 => {
            let e = cross(0, 0);
            for j in 0..npts {
                let row = &e[j * npts..(j + 1) * npts];
                let s: Complex64 = row.iter().zip(&g).map(|(a, b)| a * b).sum();
                out[j] = s;
            }
        }
        _ => {
            let (e11, e12, e21, e22) = (cross(0, 0), cross(0, 1), cross(1, 0), cross(1, 1));
            let mut c = vec![Complex64::new(0.0, 0.0); npts];
            for j1 in 0..npts {
                for j2 in 0..npts {
                    for k2 in 0..npts {
                        c[k2] = e12[j1 * npts + k2] * e22[j2 * npts + k2];
                    }
                    let mut total = Complex64::new(0.0, 0.0);
                    for k1 in 0..npts {
                        let row = &g[k1 * npts..(k1 + 1) * npts];
                        let inner: Complex64 = row.iter().zip(&c).map(|(a, b)| a * b).sum();
                        total += e11[j1 * npts + k1] * e21[j2 * npts + k1] * inner;
                    }
                    out[j1 * npts + j2] = total;
                }
            }
        }
    }
    for (v, pc) in out.iter_mut().zip(&p_chirp) {
        *v *= pref * pc;
    }
    Ok(GridFunction::from_parts(spec, out, input_flags(f)))
}

/// `Ŝ_{W,m} = V_{−P} M_{L,m} Ĵ V_{−Q}` applied factor by factor.
///
/// `Ĵ` followed by the dilation `f ↦ f(Lx)` is a scaled DFT onto the nodes
/// `Lx_j`, done by the chirp-z transform along each axis; this needs `L`
/// diagonal when `n = 2`.
pub fn factored_apply(gen: &FreeGenerator, f: &GridFunction) -> Result<GridFunction> {
    check_generator(gen, f)?;
    let spec = *f.spec();
    let n = spec.n();
    let l = gen.l();
    for a in 0..n {
        for b in 0..n {
            if a != b && l[(a, b)] != 0.0 {
                return Err(Error::Unsupported("factored_apply needs a diagonal L for n=2".into()));
            }
        }
    }
    let npts = spec.points();
    let h = spec.spacing();
    let x0 = -spec.half_extent();
    // V_{−Q}
    let mut data: Vec<Complex64> = f.samples().iter().zip(chirp(f, gen.q())).map(|(a, b)| a * b).collect();
    // Ĵ then f ↦ f(Lx): Σ_k e^{−i(L_aa x_j) x_k} along each axis
    for axis in 0..n {
        let la = l[(axis, axis)];
        map_lines(&mut data, n, npts, axis, |line| {
            *line = scaled_dft(line, x0, h, la * x0, la * h, -1.0, npts);
        });
    }
    let m_factor = I.powu(gen.m() as u32) * gen.det_l().abs().sqrt();
    let j_factor = Complex64::from_polar((2.0 * std::f64::consts::PI).powf(-0.5 * n as f64), -std::f64::consts::FRAC_PI_4 * n as f64);
    let scale = m_factor * j_factor * spec.cell();
    // V_{−P}
    for (v, pc) in data.iter_mut().zip(chirp(f, gen.p())) {
        *v *= scale * pc;
    }
    Ok(GridFunction::from_parts(spec, data, input_flags(f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::grid::GridSpec;
    use crate::gaussian::{gauss_hw, gauss_quad_fourier, GaussianState};
    use crate::linalg::{CMat, RVec};
    use crate::maslov::inverse_generator;

    fn gen1(p: f64, l: f64, q: f64, m: i64) -> FreeGenerator {
        let e = |v| RMat::from_element(1, 1, v);
        FreeGenerator::new(e(p), e(l), e(q), m).unwrap()
    }

    fn spec1() -> GridSpec {
        GridSpec::default_for(1).unwrap()
    }

    fn g0() -> GridFunction {
        GridFunction::from_gaussian(spec1(), &GaussianState::standard(1)).unwrap()
    }

    fn pt(x: f64, p: f64) -> PhaseSpacePoint {
        PhaseSpacePoint::new(RVec::from_element(1, x), RVec::from_element(1, p))
    }

    #[test]
    fn hw_identity_and_lattice_shift() {
        let f = g0();
        assert_eq!(hw_apply(&pt(0.0, 0.0), &f).unwrap().samples(), f.samples());
        let h = spec1().spacing();
        let out = hw_apply(&pt(4.0 * h, 0.0), &f).unwrap();
        for k in 0..256 {
            assert_eq!(out.samples()[(k + 4) % 256], f.samples()[k]);
        }
        assert!(!out.flags.domain_overflow);
        assert!(hw_apply(&pt(10.0, 0.0), &f).unwrap().flags.domain_overflow);
    }

    #[test]
    fn hw_matches_closed_form_off_lattice() {
        let g = GaussianState::standard(1);
        let z = pt(0.731, -1.2);
        let grid = hw_apply(&z, &g0()).unwrap();
        let exact = GridFunction::from_gaussian(spec1(), &gauss_hw(&z, &g)).unwrap();
        assert!(grid.max_abs_diff(&exact).unwrap() < 1e-12);
    }

    #[test]
    fn hw_commutation_phase() {
        let f = g0();
        let (z0, z1) = (pt(1.0, 0.0), pt(0.0, 1.0));
        let lhs = hw_apply(&z0, &hw_apply(&z1, &f).unwrap()).unwrap();
        let rhs = hw_apply(&z1, &hw_apply(&z0, &f).unwrap()).unwrap();
        // σ(z0, z1) = ⟨p0,x1⟩ − ⟨p1,x0⟩ = −1
        let err = lhs.max_abs_diff(&rhs.scaled(Complex64::from_polar(1.0, -1.0))).unwrap();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn fourier_generator_on_g0() {
        let f = g0();
        let out = quad_fourier_grid(&gen1(0.0, 1.0, 0.0, 0), &f).unwrap();
        let expect = f.scaled(Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4));
        assert!(out.max_abs_diff(&expect).unwrap() < 1e-6);
        let fac = factored_apply(&gen1(0.0, 1.0, 0.0, 0), &f).unwrap();
        assert!(fac.max_abs_diff(&out).unwrap() < 1e-8);
    }

    #[test]
    fn grid_matches_oracle_and_is_unitary() {
        let g = GaussianState::new(
            CMat::from_element(1, 1, Complex64::new(0.3, 1.4)),
            RVec::from_element(1, 0.4),
            RVec::from_element(1, -0.6),
            Complex64::new(0.8, 0.1),
        )
        .unwrap();
        let f = GridFunction::from_gaussian(spec1(), &g).unwrap();
        for gen in [gen1(1.0, 1.0, 1.0, 0), gen1(0.4, -1.3, 0.9, 1), gen1(-0.7, 0.8, 0.2, 2)] {
            let exact = GridFunction::from_gaussian(spec1(), &gauss_quad_fourier(&gen, &g).unwrap()).unwrap();
            let direct = quad_fourier_grid(&gen, &f).unwrap();
            let chain = factored_apply(&gen, &f).unwrap();
            assert!(direct.max_abs_diff(&exact).unwrap() < 1e-6);
            assert!(chain.max_abs_diff(&direct).unwrap() < 1e-6);
            assert!((direct.l2_norm() - f.l2_norm()).abs() < 1e-6);
            let back = quad_fourier_grid(&inverse_generator(&gen), &direct).unwrap();
            assert!(back.max_abs_diff(&f).unwrap() < 1e-5);
            assert!(!direct.flags.truncation);
        }
    }

    #[test]
    fn two_dimensional_grid() {
        let spec = GridSpec::new(2, 8.0, 64).unwrap();
        let g = GaussianState::standard(2);
        let f = GridFunction::from_gaussian(spec, &g).unwrap();
        let gen = FreeGenerator::new(
            RMat::from_row_slice(2, 2, &[0.5, 0.2, 0.2, -0.3]),
            RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.2]),
            RMat::from_row_slice(2, 2, &[0.1, 0.0, 0.0, 0.4]),
            1,
        )
        .unwrap();
        let exact = GridFunction::from_gaussian(spec, &gauss_quad_fourier(&gen, &g).unwrap()).unwrap();
        let direct = quad_fourier_grid(&gen, &f).unwrap();
        let chain = factored_apply(&gen, &f).unwrap();
        assert!(direct.max_abs_diff(&exact).unwrap() < 1e-6);
        assert!(chain.max_abs_diff(&exact).unwrap() < 1e-6);
        let skew = FreeGenerator::new(RMat::zeros(2, 2), RMat::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]), RMat::zeros(2, 2), 0).unwrap();
        assert!(matches!(factored_apply(&skew, &f), Err(Error::Unsupported(_))));
    }

    #[test]
    fn chirp_with_zero_p_is_identity() {
        let f = g0();
        let c = chirp(&f, &RMat::zeros(1, 1));
        assert!(c.iter().all(|v| *v == Complex64::new(1.0, 0.0)));
    }
}
