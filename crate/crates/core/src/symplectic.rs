//! Symplectic linear algebra on `R^{2n} = R^n_x × R^n_p`.
//!
//! Phase-space vectors are ordered `z = (x, p)` and the symplectic form is
//! `σ(z, z') = ⟨Jz, z'⟩ = ⟨p, x'⟩ − ⟨p', x⟩` with `J = [[0, I], [−I, 0]]`.
//! A matrix `S` is symplectic when `SᵀJS = J`; it is *free* when its upper
//! right block `B` is invertible, in which case it is generated by the
//! quadratic form `W(x, x') = ½⟨Px, x⟩ − ⟨Lx, x'⟩ + ½⟨Qx', x'⟩`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{asymmetry, blocks, inverse, max_abs, sym_eigenvalues, symmetrize, RMat, RVec};

/// Membership threshold for `‖SᵀJS − J‖_max`.
pub const SYMPLECTIC_TOL: f64 = 1e-10;
/// Degeneracy threshold on determinants.
pub const DET_TOL: f64 = 1e-12;
/// Asymmetry tolerated before an input counts as non-symmetric.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Eigenvalues with modulus below this are counted as zero by the index code.
pub const INERTIA_ZERO_TOL: f64 = 1e-10;

/// The standard symplectic matrix `J = [[0, I], [−I, 0]]` of size `2n`.
pub fn standard_j(n: usize) -> RMat {
    let z = RMat::zeros(n, n);
    let id = RMat::identity(n, n);
    blocks(&z, &id, &(-&id), &z)
}

/// `σ(z, z') = ⟨Jz, z'⟩`.
pub fn sigma(z: &RVec, zp: &RVec) -> f64 {
    let n = z.len() / 2;
    (standard_j(n) * z).dot(zp)
}

fn check_even_square(m: &RMat) -> Result<usize> {
    if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) || m.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "expected a square matrix of even size, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows() / 2)
}

/// `‖SᵀJS − J‖_max`.
pub fn symplectic_residual(m: &RMat) -> Result<f64> {
    let n = check_even_square(m)?;
    let j = standard_j(n);
    Ok(max_abs(&(m.transpose() * &j * m - j)))
}

pub fn is_symplectic(m: &RMat, tol: f64) -> Result<bool> {
    Ok(symplectic_residual(m)? <= tol)
}

/// A phase-space point `z = (x, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpacePoint {
    pub x: RVec,
    pub p: RVec,
}

impl PhaseSpacePoint {
    pub fn new(x: RVec, p: RVec) -> Self {
        assert_eq!(x.len(), p.len(), "x and p must have equal length");
        Self { x, p }
    }

    pub fn zero(n: usize) -> Self {
        Self { x: RVec::zeros(n), p: RVec::zeros(n) }
    }

    pub fn from_z(z: &RVec) -> Self {
        let n = z.len() / 2;
        Self { x: z.rows(0, n).into_owned(), p: z.rows(n, n).into_owned() }
    }

    pub fn to_z(&self) -> RVec {
        RVec::from_iterator(2 * self.n(), self.x.iter().chain(self.p.iter()).copied())
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self { x: &self.x * k, p: &self.p * k }
    }
}

/// A real `2n × 2n` matrix satisfying `SᵀJS = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    n: usize,
    m: RMat,
}

impl SymplecticMatrix {
    /// Validates membership in `Sp(n)` at [`SYMPLECTIC_TOL`].
    pub fn new(m: RMat) -> Result<Self> {
        Self::with_tolerance(m, SYMPLECTIC_TOL)
    }

    pub fn with_tolerance(m: RMat, tol: f64) -> Result<Self> {
        let residual = symplectic_residual(&m)?;
        if !(residual <= tol) {
            return Err(Error::NotSymplectic { residual });
        }
        Ok(Self { n: m.nrows() / 2, m })
    }

    /// Wraps a matrix known to be symplectic by construction (products,
    /// inverses) without re-checking it.
    pub(crate) fn from_trusted(m: RMat) -> Self {
        Self { n: m.nrows() / 2, m }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_trusted(RMat::identity(2 * n, 2 * n))
    }

    pub fn j(n: usize) -> Self {
        Self::from_trusted(standard_j(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &RMat {
        &self.m
    }

    pub fn into_matrix(self) -> RMat {
        self.m
    }

    fn block(&self, r: usize, c: usize) -> RMat {
        self.m.view((r * self.n, c * self.n), (self.n, self.n)).into_owned()
    }

    pub fn a(&self) -> RMat {
        self.block(0, 0)
    }

    pub fn b(&self) -> RMat {
        self.block(0, 1)
    }

    pub fn c(&self) -> RMat {
        self.block(1, 0)
    }

    pub fn d(&self) -> RMat {
        self.block(1, 1)
    }

    /// Product `self · other`.
    pub fn compose(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        Self::from_trusted(&self.m * &other.m)
    }

    /// `S⁻¹ = −J Sᵀ J`.
    pub fn inverse(&self) -> SymplecticMatrix {
        let j = standard_j(self.n);
        Self::from_trusted(-(&j * self.m.transpose() * &j))
    }

    pub fn apply(&self, z: &RVec) -> RVec {
        &self.m * z
    }

    pub fn det(&self) -> f64 {
        self.m.determinant()
    }

    /// `det(S − I)`; zero exactly when `S` has eigenvalue one.
    pub fn det_minus_identity(&self) -> f64 {
        (&self.m - RMat::identity(2 * self.n, 2 * self.n)).determinant()
    }

    /// `S` is free iff `Sℓ_P ∩ ℓ_P = 0`, i.e. `det B ≠ 0`.
    pub fn is_free(&self) -> bool {
        self.b().determinant().abs() > DET_TOL
    }
}

/// The quadratic generating form `W(x,x') = ½⟨Px,x⟩ − ⟨Lx,x'⟩ + ½⟨Qx',x'⟩`
/// without a choice of the integer `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingForm {
    pub p: RMat,
    pub l: RMat,
    pub q: RMat,
}

impl GeneratingForm {
    /// Validates shapes, symmetry of `P`, `Q` and invertibility of `L`.
    /// `P` and `Q` are stored symmetrized.
    pub fn new(p: RMat, l: RMat, q: RMat) -> Result<Self> {
        let n = l.nrows();
        for (name, m) in [("P", &p), ("L", &l), ("Q", &q)] {
            if m.nrows() != n || m.ncols() != n || n == 0 {
                return Err(Error::Dimension(format!(
                    "{name} must be {n}×{n}, got {}×{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        for (name, m) in [("P", &p), ("Q", &q)] {
            let a = asymmetry(m);
            if a > SYMMETRY_TOL {
                return Err(Error::InvalidGenerator(format!("{name} is not symmetric (asymmetry {a:e})")));
            }
        }
        let det_l = l.determinant();
        if !(det_l.abs() > DET_TOL) {
            return Err(Error::InvalidGenerator(format!("det L={det_l:e}")));
        }
        Ok(Self { p: symmetrize(&p), l, q: symmetrize(&q) })
    }

    pub fn n(&self) -> usize {
        self.l.nrows()
    }

    pub fn det_l(&self) -> f64 {
        self.l.determinant()
    }

    /// Attach the Maslov-type integer `m`; it must match the sign of `det L`.
    pub fn with_m(self, m: i64) -> Result<FreeGenerator> {
        FreeGenerator::from_form(self, m)
    }

    /// `P + Q − L − Lᵀ`, whose determinant controls `det(S_W − I)`.
    pub fn fixed_point_matrix(&self) -> RMat {
        &self.p + &self.q - &self.l - self.l.transpose()
    }

    /// The free symplectic matrix
    /// `S_W = [[L⁻¹Q, L⁻¹], [PL⁻¹Q − Lᵀ, PL⁻¹]]`.
    pub fn free_matrix(&self) -> SymplecticMatrix {
        // L is invertible by construction.
        let li = self.l.clone().try_inverse().expect("L invertible");
        let a = &li * &self.q;
        let d = &self.p * &li;
        let c = &self.p * &li * &self.q - self.l.transpose();
        SymplecticMatrix::from_trusted(blocks(&a, &li, &c, &d))
    }
}

/// A generating form together with `m ∈ {0,1,2,3}`, where
/// `mπ ≡ arg det L (mod 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeGenerator {
    form: GeneratingForm,
    m: u8,
}

impl FreeGenerator {
    pub fn new(p: RMat, l: RMat, q: RMat, m: i64) -> Result<Self> {
        Self::from_form(GeneratingForm::new(p, l, q)?, m)
    }

    pub fn from_form(form: GeneratingForm, m: i64) -> Result<Self> {
        let m = m.rem_euclid(4) as u8;
        let det_l = form.det_l();
        if (det_l > 0.0) != m.is_multiple_of(2) {
            return Err(Error::Parity { m, det_l });
        }
        Ok(Self { form, m })
    }

    pub fn form(&self) -> &GeneratingForm {
        &self.form
    }

    pub fn p(&self) -> &RMat {
        &self.form.p
    }

    pub fn l(&self) -> &RMat {
        &self.form.l
    }

    pub fn q(&self) -> &RMat {
        &self.form.q
    }

    pub fn m(&self) -> u8 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.form.n()
    }

    pub fn free_matrix(&self) -> SymplecticMatrix {
        self.form.free_matrix()
    }
}

impl std::ops::Deref for FreeGenerator {
    type Target = GeneratingForm;

    fn deref(&self) -> &GeneratingForm {
        &self.form
    }
}

/// `S_W` for a generator; see [`GeneratingForm::free_matrix`].
pub fn free_from_generator(g: &FreeGenerator) -> SymplecticMatrix {
    g.free_matrix()
}

/// Recovers `(P, L, Q) = (DB⁻¹, B⁻¹, B⁻¹A)` from a free matrix.
pub fn generator_from_free(s: &SymplecticMatrix) -> Result<GeneratingForm> {
    let b = s.b();
    let det_b = b.determinant();
    if !(det_b.abs() > DET_TOL) {
        return Err(Error::NotFree { det_b });
    }
    let bi = inverse(&b, "B")?;
    let p = s.d() * &bi;
    let q = &bi * s.a();
    // Symplecticity makes B⁻¹A and DB⁻¹ symmetric up to rounding; the
    // asymmetry is bounded relative to their size.
    let scale = 1.0 + max_abs(&p).max(max_abs(&q));
    let asym = asymmetry(&p).max(asymmetry(&q));
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::InvalidParameter(format!(
            "DB⁻¹ or B⁻¹A not symmetric (asymmetry {asym:e}); input not symplectic?"
        )));
    }
    Ok(GeneratingForm { p: symmetrize(&p), l: bi, q: symmetrize(&q) })
}

/// The Cayley-type matrix `M_S = ½J(S+I)(S−I)⁻¹`.
///
/// Defined only when `S` has no eigenvalue one. The result is symmetric and
/// equals `½J + J(S−I)⁻¹`.
pub fn cayley_ms(s: &SymplecticMatrix) -> Result<RMat> {
    let n = s.n();
    let id = RMat::identity(2 * n, 2 * n);
    let sm = s.matrix() - &id;
    let det = sm.determinant();
    if !(det.abs() > DET_TOL) {
        return Err(Error::EigenvalueOne(format!("det(S−I)={det:e}; R(S) is undefined")));
    }
    let j = standard_j(n);
    // ½J(S+I)(S−I)⁻¹ = ½J + J(S−I)⁻¹, which avoids forming S+I
    let m = &j * 0.5 + &j * inverse(&sm, "S−I")?;
    let asym = asymmetry(&m);
    if asym > SYMMETRY_TOL * max_abs(&m).max(1.0) {
        return Err(Error::InvalidParameter(format!("M_S not symmetric (asymmetry {asym:e}); S not symplectic?")));
    }
    Ok(symmetrize(&m))
}

/// Inverts the Cayley map: `S = (2M − J)⁻¹(2M + J)`.
pub fn cayley_inverse(m: &RMat) -> Result<SymplecticMatrix> {
    let n = check_even_square(m)?;
    let asym = asymmetry(m);
    if asym > SYMMETRY_TOL * max_abs(m).max(1.0) {
        return Err(Error::InvalidParameter(format!("M is not symmetric (asymmetry {asym:e})")));
    }
    let j = standard_j(n);
    let lhs = m * 2.0 - &j;
    let det = lhs.determinant();
    if !(det.abs() > DET_TOL) {
        return Err(Error::InvalidParameter(format!("2M−J is singular (det {det:e})")));
    }
    // (2M−J)⁻¹(2M+J) = I + 2(2M−J)⁻¹J
    let s = RMat::identity(2 * n, 2 * n) + inverse(&lhs, "2M−J")? * &j * 2.0;
    Ok(SymplecticMatrix::from_trusted(s))
}

/// `det(S_W − I)` through the block factorization
/// `(−1)ⁿ det(L⁻¹) det(P + Q − L − Lᵀ)`.
pub fn det_s_minus_i_factored(form: &GeneratingForm) -> f64 {
    let n = form.n();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * form.fixed_point_matrix().determinant() / form.det_l()
}

/// Eigenvalue counts of a real symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl Inertia {
    /// Signature `n₊ − n₋`.
    pub fn sgn(&self) -> i64 {
        self.n_plus as i64 - self.n_minus as i64
    }

    /// Number of negative eigenvalues.
    pub fn inert(&self) -> usize {
        self.n_minus
    }

    pub fn dim(&self) -> usize {
        self.n_plus + self.n_minus + self.n_zero
    }
}

pub fn inertia_of(m: &RMat, zero_tol: f64) -> Result<Inertia> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!("inertia of a {}×{} matrix", m.nrows(), m.ncols())));
    }
    let asym = asymmetry(m);
    if asym > SYMPLECTIC_TOL * max_abs(m).max(1.0) {
        return Err(Error::InvalidParameter(format!("matrix is not symmetric (asymmetry {asym:e})")));
    }
    let mut inertia = Inertia { n_plus: 0, n_minus: 0, n_zero: 0 };
    for ev in sym_eigenvalues(&symmetrize(m)) {
        if ev.abs() <= zero_tol {
            inertia.n_zero += 1;
        } else if ev > 0.0 {
            inertia.n_plus += 1;
        } else {
            inertia.n_minus += 1;
        }
    }
    Ok(inertia)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m1(v: f64) -> RMat {
        RMat::from_element(1, 1, v)
    }

    fn mat(rows: &[&[f64]]) -> RMat {
        RMat::from_row_slice(rows.len(), rows[0].len(), &rows.concat())
    }

    #[test]
    fn j_squares_to_minus_identity() {
        for n in 1..=4 {
            let j = standard_j(n);
            assert_eq!(&j * &j, -RMat::identity(2 * n, 2 * n));
            assert_eq!(j.transpose(), -&j);
        }
        assert_eq!(standard_j(1), mat(&[&[0.0, 1.0], &[-1.0, 0.0]]));
    }

    #[test]
    fn sigma_matches_hand_expansion() {
        // σ((1,0),(0,1)) = ⟨p,x'⟩ − ⟨p',x⟩ = 0·0 − 1·1
        let z = RVec::from_vec(vec![1.0, 0.0]);
        let zp = RVec::from_vec(vec![0.0, 1.0]);
        assert_eq!(sigma(&z, &zp), -1.0);
    }

    #[test]
    fn membership() {
        assert!(is_symplectic(&RMat::identity(4, 4), 1e-12).unwrap());
        assert!(is_symplectic(&standard_j(2), 1e-12).unwrap());
        assert!(!is_symplectic(&RMat::from_diagonal_element(2, 2, 2.0), 1e-10).unwrap());
        assert!(matches!(is_symplectic(&RMat::identity(3, 3), 1e-10), Err(Error::Dimension(_))));
    }

    #[test]
    fn free_matrix_examples() {
        let s = FreeGenerator::new(m1(0.0), m1(1.0), m1(0.0), 0).unwrap().free_matrix();
        assert_eq!(s.matrix(), &standard_j(1));
        let s = FreeGenerator::new(m1(1.0), m1(1.0), m1(1.0), 0).unwrap().free_matrix();
        assert_eq!(s.matrix(), &mat(&[&[1.0, 1.0], &[0.0, 1.0]]));
        let s = FreeGenerator::new(m1(0.0), m1(2.0), m1(0.0), 0).unwrap().free_matrix();
        assert_eq!(s.matrix(), &mat(&[&[0.0, 0.5], &[-2.0, 0.0]]));
    }

    #[test]
    fn generator_validation() {
        assert!(matches!(
            GeneratingForm::new(m1(0.0), m1(0.0), m1(0.0)),
            Err(Error::InvalidGenerator(_))
        ));
        assert!(matches!(
            FreeGenerator::new(m1(0.0), m1(-1.0), m1(0.0), 0),
            Err(Error::Parity { .. })
        ));
        let p = mat(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(GeneratingForm::new(p, RMat::identity(2, 2), RMat::zeros(2, 2)).is_err());
    }

    #[test]
    fn generator_recovery() {
        let g = generator_from_free(&SymplecticMatrix::j(1)).unwrap();
        assert_eq!((g.p[0], g.l[0], g.q[0]), (0.0, 1.0, 0.0));
        let shear = SymplecticMatrix::new(mat(&[&[1.0, 1.0], &[0.0, 1.0]])).unwrap();
        let g = generator_from_free(&shear).unwrap();
        assert_eq!((g.p[0], g.l[0], g.q[0]), (1.0, 1.0, 1.0));
        assert!(matches!(
            generator_from_free(&SymplecticMatrix::identity(1)),
            Err(Error::NotFree { .. })
        ));
    }

    #[test]
    fn cayley_examples() {
        let ms = cayley_ms(&SymplecticMatrix::from_trusted(-RMat::identity(2, 2))).unwrap();
        assert_eq!(ms, RMat::zeros(2, 2));

        let ms = cayley_ms(&SymplecticMatrix::j(1)).unwrap();
        assert!(max_abs(&(ms - RMat::identity(2, 2) * 0.5)) < 1e-15);

        let s = SymplecticMatrix::new(mat(&[&[2.0, 0.0], &[0.0, 0.5]])).unwrap();
        let ms = cayley_ms(&s).unwrap();
        assert!(max_abs(&(ms - mat(&[&[0.0, -1.5], &[-1.5, 0.0]]))) < 1e-14);

        let shear = SymplecticMatrix::new(mat(&[&[1.0, 1.0], &[0.0, 1.0]])).unwrap();
        assert!(matches!(cayley_ms(&shear), Err(Error::EigenvalueOne(_))));
    }

    #[test]
    fn cayley_inverse_examples() {
        let s = cayley_inverse(&RMat::zeros(2, 2)).unwrap();
        assert_eq!(s.matrix(), &-RMat::identity(2, 2));
        let s = cayley_inverse(&(RMat::identity(2, 2) * 0.5)).unwrap();
        assert!(max_abs(&(s.matrix() - standard_j(1))) < 1e-15);
        // det(2M − J) = 4ab + 1 for M = diag(a, b)
        let m = mat(&[&[0.5, 0.0], &[0.0, -0.5]]);
        assert!(matches!(cayley_inverse(&m), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn factored_determinant_hand_cases() {
        let cases = [((0.0, 1.0, 0.0), 2.0), ((1.0, 1.0, 1.0), 0.0), ((0.0, 2.0, 0.0), 2.0)];
        for ((p, l, q), expected) in cases {
            let g = GeneratingForm::new(m1(p), m1(l), m1(q)).unwrap();
            assert_eq!(g.free_matrix().det_minus_identity(), expected);
            assert_eq!(det_s_minus_i_factored(&g), expected);
        }
    }

    #[test]
    fn inertia_examples() {
        let m = RMat::from_diagonal(&RVec::from_vec(vec![1.0, -2.0, 0.0]));
        let i = inertia_of(&m, 1e-10).unwrap();
        assert_eq!((i.n_plus, i.n_minus, i.n_zero, i.sgn(), i.inert()), (1, 1, 1, 0, 1));
        assert_eq!(inertia_of(&m1(-2.0), 1e-10).unwrap().inert(), 1);
        let g = GeneratingForm::new(m1(0.0), m1(1.0), m1(0.0)).unwrap();
        assert_eq!(g.fixed_point_matrix(), m1(-2.0));
        assert!(inertia_of(&mat(&[&[0.0, 1.0], &[0.0, 0.0]]), 1e-10).is_err());
    }

    #[test]
    fn symplectic_inverse_and_determinant() {
        let s = FreeGenerator::new(m1(0.3), m1(-2.0), m1(1.7), 1).unwrap().free_matrix();
        let prod = s.compose(&s.inverse());
        assert!(max_abs(&(prod.into_matrix() - RMat::identity(2, 2))) < 1e-14);
        assert!((s.det() - 1.0).abs() < 1e-12);
    }
}
