//! Dense complex linear algebra shared by every other module.
//!
//! Decompositions are delegated to nalgebra, except the SVD: nalgebra's complex SVD loses
//! accuracy on matrices with repeated singular values (every skew-symmetric matrix has them),
//! so a one-sided Jacobi SVD is used instead. This module also adds the rank decisions,
//! pivot guards and orderings the solvers depend on.

use nalgebra::{ComplexField, DMatrix, DVector, Schur, SymmetricEigen, LU, QR};

use crate::error::{Error, Result};

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type RMatrix = DMatrix<f64>;

/// Relative pivot threshold used by [`linear_solve`].
pub const PIVOT_TOL: f64 = 1e-13;
/// Default rank cutoff relative to the largest singular value.
pub const RANK_TOL: f64 = 1e-10;

const SCHUR_MAX_ITER: usize = 10_000;
const JACOBI_MAX_SWEEPS: usize = 100;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// The adjoint used by a symmetry class: plain transpose or conjugate transpose.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Star {
    Transpose,
    Conjugate,
}

impl Star {
    pub fn apply(self, m: &CMatrix) -> CMatrix {
        match self {
            Star::Transpose => m.transpose(),
            Star::Conjugate => m.adjoint(),
        }
    }

    pub fn scalar(self, z: C64) -> C64 {
        match self {
            Star::Transpose => z,
            Star::Conjugate => z.conj(),
        }
    }
}

pub fn fro(m: &CMatrix) -> f64 {
    m.norm()
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_finite(m: &CMatrix) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Build a matrix from nested rows; panics on ragged input.
pub fn from_rows(rows: &[Vec<C64>]) -> CMatrix {
    let r = rows.len();
    let cols = rows.first().map_or(0, |x| x.len());
    CMatrix::from_fn(r, cols, |i, j| rows[i][j])
}

pub fn from_real_rows(rows: &[&[f64]]) -> CMatrix {
    let r = rows.len();
    let cols = rows.first().map_or(0, |x| x.len());
    CMatrix::from_fn(r, cols, |i, j| cr(rows[i][j]))
}

pub fn diag(values: &[C64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_column_slice(values))
}

pub fn eye(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMatrix {
    CMatrix::zeros(r, c)
}

pub fn block_diag(blocks: &[&CMatrix]) -> CMatrix {
    let r: usize = blocks.iter().map(|b| b.nrows()).sum();
    let c: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(r, c);
    let (mut i, mut j) = (0, 0);
    for b in blocks {
        out.view_mut((i, j), (b.nrows(), b.ncols())).copy_from(*b);
        i += b.nrows();
        j += b.ncols();
    }
    out
}

pub fn hstack(blocks: &[&CMatrix]) -> CMatrix {
    let r = blocks.first().map_or(0, |b| b.nrows());
    let c: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(r, c);
    let mut j = 0;
    for b in blocks {
        assert_eq!(b.nrows(), r, "hstack row mismatch");
        out.view_mut((0, j), (r, b.ncols())).copy_from(*b);
        j += b.ncols();
    }
    out
}

pub fn vstack(blocks: &[&CMatrix]) -> CMatrix {
    let c = blocks.first().map_or(0, |b| b.ncols());
    let r: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(r, c);
    let mut i = 0;
    for b in blocks {
        assert_eq!(b.ncols(), c, "vstack column mismatch");
        out.view_mut((i, 0), (b.nrows(), c)).copy_from(*b);
        i += b.nrows();
    }
    out
}

/// Solve `A X = B` by partially pivoted LU.
pub fn linear_solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() || a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "solve: A is {}x{}, B is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    if a.nrows() == 0 {
        return Ok(CMatrix::zeros(0, b.ncols()));
    }
    ensure_finite(a)?;
    ensure_finite(b)?;
    let scale = fro(a);
    let lu = LU::new(a.clone());
    let u = lu.u();
    let guard = PIVOT_TOL * scale;
    if scale == 0.0 || u.diagonal().iter().any(|p| p.norm() < guard) {
        return Err(Error::SingularMatrix);
    }
    lu.solve(b).ok_or(Error::SingularMatrix)
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    linear_solve(a, &eye(a.nrows()))
}

/// Solve `X A = B` for `X`.
pub fn right_solve(b: &CMatrix, a: &CMatrix) -> Result<CMatrix> {
    Ok(linear_solve(&a.transpose(), &b.transpose())?.transpose())
}

/// Thin SVD with singular values sorted in decreasing order.
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

/// One-sided Jacobi SVD of a matrix with at least as many rows as columns.
///
/// Returns `(U, σ, V)` with `U` m×c, `V` c×c unitary and σ in decreasing order. Columns of `U`
/// belonging to negligible singular values are completed to an orthonormal set.
fn jacobi_svd<T: ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>) -> (DMatrix<T>, Vec<f64>, DMatrix<T>) {
    let (m, c) = a.shape();
    debug_assert!(m >= c);
    let mut u = a.clone();
    let mut v = DMatrix::<T>::identity(c, c);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..c {
            for q in (p + 1)..c {
                let alpha = u.column(p).norm_squared();
                let beta = u.column(q).norm_squared();
                let gamma = u.column(p).dotc(&u.column(q));
                let g = gamma.modulus();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let w = gamma.unscale(g);
                let (cs_t, sn_w, sn_wc) = (T::from_real(cs), w.scale(sn), w.conjugate().scale(sn));
                for mat in [&mut u, &mut v] {
                    for i in 0..mat.nrows() {
                        let (xp, xq) = (mat[(i, p)], mat[(i, q)]);
                        mat[(i, p)] = cs_t * xp - sn_wc * xq;
                        mat[(i, q)] = sn_w * xp + cs_t * xq;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..c).map(|j| u.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let s: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let v = v.select_columns(&order);
    let hi = s.first().copied().unwrap_or(0.0);
    let floor = hi * f64::EPSILON * m.max(c) as f64;
    let mut out = DMatrix::<T>::zeros(m, c);
    let mut filled = 0;
    for (k, &i) in order.iter().enumerate() {
        if s[k] <= floor || s[k] == 0.0 {
            break;
        }
        out.set_column(k, &u.column(i).unscale(s[k]));
        filled += 1;
    }
    // Complete with unit vectors orthogonalized against the columns already present.
    let mut e = 0;
    while filled < c && e < m {
        let mut x = DVector::<T>::zeros(m);
        x[e] = T::one();
        e += 1;
        for _ in 0..2 {
            for j in 0..filled {
                let coef = out.column(j).dotc(&x);
                x -= out.column(j) * coef;
            }
        }
        let nx = x.norm();
        if nx > 0.5 {
            out.set_column(filled, &x.unscale(nx));
            filled += 1;
        }
    }
    (out, s, v)
}

fn thin_svd<T: ComplexField<RealField = f64> + Copy>(m: &DMatrix<T>) -> (DMatrix<T>, Vec<f64>, DMatrix<T>) {
    if m.nrows() >= m.ncols() {
        jacobi_svd(m)
    } else {
        let (v, s, u) = jacobi_svd(&m.adjoint());
        (u, s, v)
    }
}

pub fn svd(m: &CMatrix) -> Svd {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Svd {
            u: CMatrix::zeros(r, 0),
            s: vec![],
            v: CMatrix::zeros(c, 0),
        };
    }
    let (u, s, v) = thin_svd(m);
    Svd { u, s, v }
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    thin_svd(m).1
}

/// σ_min/σ_max, zero for an empty or zero matrix.
pub fn rcond(m: &CMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 && m.is_square() => lo / hi,
        _ => 0.0,
    }
}

pub fn numerical_rank(m: &CMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let hi = s.first().copied().unwrap_or(0.0);
    if hi == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * hi).count()
}

/// Orthonormal basis of the complex null space of `m`.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let (r, c) = m.shape();
    if c == 0 {
        return CMatrix::zeros(0, 0);
    }
    let padded = if r < c {
        vstack(&[m, &CMatrix::zeros(c - r, c)])
    } else {
        m.clone()
    };
    let d = svd(&padded);
    let hi = d.s.first().copied().unwrap_or(0.0);
    let rank = if hi == 0.0 {
        0
    } else {
        d.s.iter().filter(|&&x| x > rel_tol * hi).count()
    };
    d.v.columns(rank, c - rank).into_owned()
}

/// Orthonormal basis of the real null space of a real matrix.
///
/// Singular values up to `rel_tol·max(σ_max, scale)` count as zero; `scale` bounds the
/// norm of the operator so that an operator that is zero up to rounding keeps its full null space.
pub fn null_space_real(m: &RMatrix, rel_tol: f64, scale: f64) -> RMatrix {
    let (r, c) = m.shape();
    if c == 0 {
        return RMatrix::zeros(0, 0);
    }
    let padded = if r < c {
        let mut p = RMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let (_, s, v) = jacobi_svd(&padded);
    let hi = s.iter().copied().fold(0.0_f64, f64::max).max(scale);
    let keep: Vec<usize> = (0..s.len())
        .filter(|&i| hi == 0.0 || s[i] <= rel_tol * hi)
        .collect();
    let mut out = RMatrix::zeros(c, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        out.set_column(k, &v.column(i));
    }
    out
}

/// Real least squares `min ‖A x − b‖` by SVD with a relative cutoff.
pub fn lstsq_real(a: &RMatrix, b: &DVector<f64>, rel_tol: f64) -> DVector<f64> {
    if a.ncols() == 0 {
        return DVector::zeros(0);
    }
    let (u, s, v) = thin_svd(a);
    let hi = s.first().copied().unwrap_or(0.0);
    let cut = if hi == 0.0 { 1.0 } else { rel_tol * hi };
    let mut x = DVector::zeros(a.ncols());
    for (k, &sk) in s.iter().enumerate() {
        if sk > cut {
            x += v.column(k) * (u.column(k).dot(b) / sk);
        }
    }
    x
}

/// Orthonormal columns completing `q` (orthonormal, n×r) to a basis of ℂⁿ.
pub fn orthonormal_complement(q: &CMatrix) -> CMatrix {
    let n = q.nrows();
    let r = q.ncols();
    if r >= n {
        return CMatrix::zeros(n, 0);
    }
    let mut basis: Vec<DVector<C64>> = q.column_iter().map(|c| c.into_owned()).collect();
    let mut extra = Vec::with_capacity(n - r);
    // Candidates from the identity, picked by largest residual after projection.
    let mut candidates: Vec<DVector<C64>> = (0..n)
        .map(|i| {
            let mut e = DVector::zeros(n);
            e[i] = cr(1.0);
            e
        })
        .collect();
    while extra.len() < n - r {
        let mut best: Option<(f64, DVector<C64>, usize)> = None;
        for (idx, cand) in candidates.iter().enumerate() {
            let mut v = cand.clone();
            for _ in 0..2 {
                for b in &basis {
                    let proj = b.dotc(&v);
                    v -= b * proj;
                }
            }
            let nv = v.norm();
            if best.as_ref().is_none_or(|(bn, _, _)| nv > *bn) {
                best = Some((nv, v, idx));
            }
        }
        let (nv, v, idx) = best.expect("candidates remain while basis is incomplete");
        candidates.swap_remove(idx);
        let v = v / cr(nv);
        basis.push(v.clone());
        extra.push(v);
    }
    CMatrix::from_columns(&extra)
}

/// Orthonormalize the columns of `m` by a thin QR.
pub fn orthonormalize(m: &CMatrix) -> CMatrix {
    if m.ncols() == 0 {
        return m.clone();
    }
    QR::new(m.clone()).q()
}

/// Rank factorization `M = Z1 Z2⋆` from the SVD.
///
/// `tol` is absolute; pass `None` for the default `1e-10·σ_max`.
pub fn rank_factorize(m: &CMatrix, star: Star, tol: Option<f64>) -> (CMatrix, CMatrix, usize) {
    let d = svd(m);
    let hi = d.s.first().copied().unwrap_or(0.0);
    let cut = tol.unwrap_or(RANK_TOL * hi);
    let l = if hi == 0.0 {
        0
    } else {
        d.s.iter().filter(|&&x| x > cut).count()
    };
    let mut z1 = d.u.columns(0, l).into_owned();
    for (j, mut col) in z1.column_iter_mut().enumerate() {
        col *= cr(d.s[j]);
    }
    let vl = d.v.columns(0, l).into_owned();
    let z2 = match star {
        Star::Transpose => vl.map(|z| z.conj()),
        Star::Conjugate => vl,
    };
    (z1, z2, l)
}

/// Eigenvalues and unit right eigenvectors of a general square matrix.
///
/// Complex Schur form followed by triangular back substitution.
pub fn dense_eig(a: &CMatrix) -> Result<(Vec<C64>, CMatrix)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("dense_eig: matrix not square".into()));
    }
    ensure_finite(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok((vec![], CMatrix::zeros(0, 0)));
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or(Error::ConvergenceFailure("complex Schur iteration"))?;
    let (q, t) = schur.unpack();
    let tnorm = fro(&t).max(f64::MIN_POSITIVE);
    let smin = f64::EPSILON * tnorm;
    let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        let lam = values[k];
        y[(k, k)] = cr(1.0);
        for i in (0..k).rev() {
            let mut acc = t[(i, k)];
            for j in (i + 1)..k {
                acc += t[(i, j)] * y[(j, k)];
            }
            let mut piv = t[(i, i)] - lam;
            if piv.norm() < smin {
                piv = cr(smin);
            }
            y[(i, k)] = -acc / piv;
        }
        // Rescale to keep the back substitution from overflowing.
        let nk = y.column(k).norm();
        if nk > 1e100 {
            let mut col = y.column_mut(k);
            col /= cr(nk);
        }
    }
    let mut v = q * y;
    for mut col in v.column_iter_mut() {
        let nc = col.norm();
        if nc > 0.0 {
            col /= cr(nc);
        }
    }
    Ok((values, v))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    if n == 0 {
        return (vec![], CMatrix::zeros(0, 0));
    }
    let sym = (h + h.adjoint()) * cr(0.5);
    let e = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = order.iter().map(|&i| e.eigenvalues[i]).collect();
    (vals, e.eigenvectors.select_columns(&order))
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Stack real and imaginary parts of the entries into a real vector.
pub fn realify(m: &CMatrix) -> DVector<f64> {
    let mut v = DVector::zeros(2 * m.len());
    for (k, z) in m.iter().enumerate() {
        v[2 * k] = z.re;
        v[2 * k + 1] = z.im;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_cmatrix, rng};

    #[test]
    fn solve_identity_and_diagonal() {
        let b = from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]);
        assert_eq!(linear_solve(&eye(3), &b).unwrap(), b);
        let a = diag(&[cr(2.0), cr(4.0)]);
        let x = linear_solve(&a, &from_real_rows(&[&[2.0], &[8.0]])).unwrap();
        assert!((x[(0, 0)] - cr(1.0)).norm() < 1e-15);
        assert!((x[(1, 0)] - cr(2.0)).norm() < 1e-15);
    }

    #[test]
    fn solve_random_residual() {
        let mut r = rng(7);
        let a = random_cmatrix(&mut r, 8, 8);
        let b = random_cmatrix(&mut r, 8, 3);
        let x = linear_solve(&a, &b).unwrap();
        assert!(fro(&(&a * &x - &b)) <= 1e-12 * fro(&a) * fro(&x));
    }

    #[test]
    fn solve_rejects_singular() {
        let a = from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(linear_solve(&a, &eye(2)), Err(Error::SingularMatrix)));
    }

    #[test]
    fn rank_factorize_cases() {
        let (z1, z2, l) = rank_factorize(&zeros(3, 3), Star::Transpose, None);
        assert_eq!((l, z1.ncols(), z2.ncols()), (0, 0, 0));

        let mut r = rng(3);
        let u = random_cmatrix(&mut r, 4, 1);
        let v = random_cmatrix(&mut r, 4, 1);
        for star in [Star::Transpose, Star::Conjugate] {
            let m = &u * star.apply(&v);
            let (z1, z2, l) = rank_factorize(&m, star, None);
            assert_eq!(l, 1);
            assert!(fro(&(&z1 * star.apply(&z2) - &m)) <= 1e-12 * fro(&m));
        }
        let m = random_cmatrix(&mut r, 5, 2) * random_cmatrix(&mut r, 2, 5);
        assert_eq!(rank_factorize(&m, Star::Conjugate, None).2, 2);
    }

    #[test]
    fn eig_small_cases() {
        let (vals, vecs) = dense_eig(&diag(&[cr(1.0), cr(2.0), cr(3.0)])).unwrap();
        let mut re: Vec<f64> = vals.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert_eq!(re, vec![1.0, 2.0, 3.0]);
        for col in vecs.column_iter() {
            let big = col.iter().filter(|z| z.norm() > 1.0 - 1e-12).count();
            assert_eq!(big, 1);
        }
        let rot = from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let (vals, _) = dense_eig(&rot).unwrap();
        let mut im: Vec<f64> = vals.iter().map(|z| z.im).collect();
        im.sort_by(f64::total_cmp);
        assert!((im[0] + 1.0).abs() < 1e-14 && (im[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_random_residual() {
        let mut r = rng(11);
        let a = random_cmatrix(&mut r, 10, 10);
        let (vals, v) = dense_eig(&a).unwrap();
        for (k, lam) in vals.iter().enumerate() {
            let x = v.column(k).into_owned();
            let res = (&a * &x - &x * *lam).norm();
            assert!(res <= 1e-10 * fro(&a));
            assert!((x.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn complement_is_orthonormal() {
        let mut r = rng(5);
        let q = orthonormalize(&random_cmatrix(&mut r, 6, 2));
        let comp = orthonormal_complement(&q);
        let full = hstack(&[&q, &comp]);
        assert!(fro(&(full.adjoint() * &full - eye(6))) < 1e-12);
    }

    #[test]
    fn null_space_of_rank_two() {
        let mut r = rng(9);
        let m = random_cmatrix(&mut r, 3, 2) * random_cmatrix(&mut r, 2, 5);
        let ns = null_space(&m, RANK_TOL);
        assert_eq!(ns.ncols(), 3);
        assert!(fro(&(&m * &ns)) < 1e-12 * fro(&m));
    }
}
