//! Mod-4 index arithmetic for free generators.
//!
//! A free generator `(P, L, Q)` admits two integers `m` (mod 4) with
//! `mπ ≡ arg det L`, one for each of the two metaplectic lifts. The Weyl
//! operator `R(S_W)` equals `Ŝ_{W,m}` exactly when its phase index is
//! `ν ≡ m − Inert(P + Q − L − Lᵀ) (mod 4)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inverse, sym_eigenvalues, RMat, RVec};
use crate::symplectic::{
    cayley_ms, inertia_of, FreeGenerator, GeneratingForm, SymplecticMatrix, DET_TOL, INERTIA_ZERO_TOL,
};

/// Index data for one free generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaslovData {
    pub m: u8,
    pub inert: usize,
    pub nu: u8,
}

/// The two admissible values of `m` for `L`: `{0, 2}` when `det L > 0`,
/// `{1, 3}` when `det L < 0`.
pub fn m_choices(l: &RMat) -> Result<[u8; 2]> {
    let det = l.determinant();
    if !(det.abs() > DET_TOL) {
        return Err(Error::InvalidParameter(format!("det L={det:e}")));
    }
    Ok(if det > 0.0 { [0, 2] } else { [1, 3] })
}

fn nondegenerate_fixed_point_matrix(form: &GeneratingForm) -> Result<RMat> {
    let a = form.fixed_point_matrix();
    let det = a.determinant();
    let ev = sym_eigenvalues(&a);
    let smallest = ev.iter().copied().min_by(|x, y| x.abs().total_cmp(&y.abs())).unwrap_or(0.0);
    if !(det.abs() > DET_TOL) || smallest.abs() <= INERTIA_ZERO_TOL {
        return Err(Error::EigenvalueOne(format!(
            "det(P+Q−L−Lᵀ)=0 (eigenvalue {smallest:e}), so det(S−I)=0"
        )));
    }
    Ok(a)
}

/// `ν = (m − Inert(P+Q−L−Lᵀ)) mod 4`.
pub fn mw_index(g: &FreeGenerator) -> Result<MaslovData> {
    let a = nondegenerate_fixed_point_matrix(g.form())?;
    let inert = inertia_of(&a, INERTIA_ZERO_TOL)?.inert();
    let nu = (g.m() as i64 - inert as i64).rem_euclid(4) as u8;
    Ok(MaslovData { m: g.m(), inert, nu })
}

/// Generator of `Ŝ_{W,m}⁻¹`: `W*(x,x') = −W(x',x)` and `m* = n − m`, which
/// gives `(P*, L*, Q*) = (−Q, −Lᵀ, −P)`.
pub fn inverse_generator(g: &FreeGenerator) -> FreeGenerator {
    let n = g.n() as i64;
    let form = GeneratingForm {
        p: -g.q().clone(),
        l: -g.l().transpose(),
        q: -g.p().clone(),
    };
    // det(−Lᵀ) = (−1)ⁿ det L and n − m has parity n + m, so parity holds.
    FreeGenerator::from_form(form, n - g.m() as i64).expect("inverse generator parity")
}

/// The two values of `ν` (mod 4) that make `R(S)` metaplectic, fixed mod 2
/// by `(−1)^ν = (−1)ⁿ sign det(S−I)`; the smaller one comes first.
pub fn nu_choices(s: &SymplecticMatrix) -> Result<[u8; 2]> {
    let det = s.det_minus_identity();
    if !(det.abs() > DET_TOL) {
        return Err(Error::EigenvalueOne(format!("det(S−I)={det:e}")));
    }
    let odd = (s.n() % 2 == 1) != (det < 0.0);
    Ok(if odd { [1, 3] } else { [0, 2] })
}

/// Both sides of `⟨M_S(0,p₀),(0,p₀)⟩ = −⟨(P+Q−L−Lᵀ)⁻¹p₀, p₀⟩`.
pub fn verify_restricted_quadratic(form: &GeneratingForm, p0: &RVec) -> Result<(f64, f64)> {
    let n = form.n();
    if p0.len() != n {
        return Err(Error::Dimension(format!("p0 has length {}, expected {n}", p0.len())));
    }
    let a = nondegenerate_fixed_point_matrix(form)?;
    let ms = cayley_ms(&form.free_matrix())?;
    let mut z = RVec::zeros(2 * n);
    z.rows_mut(n, n).copy_from(p0);
    let lhs = (&ms * &z).dot(&z);
    let rhs = -(inverse(&a, "P+Q−L−Lᵀ")? * p0).dot(p0);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    fn gen1(p: f64, l: f64, q: f64, m: i64) -> FreeGenerator {
        let e = |v| RMat::from_element(1, 1, v);
        FreeGenerator::new(e(p), e(l), e(q), m).unwrap()
    }

    #[test]
    fn m_choice_follows_sign_of_det_l() {
        assert_eq!(m_choices(&RMat::from_element(1, 1, 1.0)).unwrap(), [0, 2]);
        assert_eq!(m_choices(&RMat::from_element(1, 1, -1.0)).unwrap(), [1, 3]);
        assert_eq!(m_choices(&(RMat::identity(2, 2) * 2.0)).unwrap(), [0, 2]);
        assert!(m_choices(&RMat::zeros(2, 2)).is_err());
    }

    #[test]
    fn index_examples() {
        assert_eq!(mw_index(&gen1(0.0, 1.0, 0.0, 0)).unwrap(), MaslovData { m: 0, inert: 1, nu: 3 });
        assert_eq!(mw_index(&gen1(0.0, 1.0, 0.0, 2)).unwrap(), MaslovData { m: 2, inert: 1, nu: 1 });
        let err = mw_index(&gen1(1.0, 1.0, 1.0, 0)).unwrap_err();
        assert!(matches!(err, Error::EigenvalueOne(_)));
        assert!(err.to_string().contains("det(P+Q−L−Lᵀ)=0"));
    }

    #[test]
    fn inverse_generator_examples() {
        let g = gen1(0.0, 1.0, 0.0, 0);
        let gi = inverse_generator(&g);
        assert_eq!((gi.p()[0], gi.l()[0], gi.q()[0], gi.m()), (0.0, -1.0, 0.0, 1));
        assert_eq!(gi.free_matrix().matrix(), &(-crate::symplectic::standard_j(1)));
        assert_eq!(inverse_generator(&gi), g);

        let g = gen1(1.0, 1.0, 1.0, 0);
        let gi = inverse_generator(&g);
        assert_eq!((gi.p()[0], gi.l()[0], gi.q()[0], gi.m()), (-1.0, -1.0, -1.0, 1));
        let prod = g.free_matrix().compose(&gi.free_matrix()).into_matrix();
        assert!(max_abs(&(prod - RMat::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn nu_parity_matches_index_formula() {
        for (p, l, q, m) in [(0.0, 1.0, 0.0, 0), (0.4, -1.3, 0.9, 1), (2.0, 0.5, -0.5, 2), (-0.3, -2.0, 0.1, 3)] {
            let g = gen1(p, l, q, m);
            let nu = mw_index(&g).unwrap().nu;
            assert!(nu_choices(&g.free_matrix()).unwrap().contains(&nu));
        }
        let minus = SymplecticMatrix::new(-RMat::identity(2, 2)).unwrap();
        assert_eq!(nu_choices(&minus).unwrap(), [1, 3]);
        assert!(nu_choices(&SymplecticMatrix::identity(1)).is_err());
    }

    #[test]
    fn restricted_quadratic_examples() {
        let g = gen1(0.0, 1.0, 0.0, 0);
        let (l, r) = verify_restricted_quadratic(g.form(), &RVec::from_element(1, 1.0)).unwrap();
        assert!((l - 0.5).abs() < 1e-15 && (r - 0.5).abs() < 1e-15);
        let (l, r) = verify_restricted_quadratic(g.form(), &RVec::zeros(1)).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
        let d = gen1(1.0, 1.0, 1.0, 0);
        assert!(verify_restricted_quadratic(d.form(), &RVec::zeros(1)).is_err());
    }
}
