//! Congruence canonical forms `B = YΔY⋆` for matrices with `B⋆ = −εB`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::numerics::{
    cr, fro, hermitian_eig, orthonormal_complement, singular_values, spectral_norm, svd,
    CMatrix, Star, C64, I,
};
use crate::system::{skew_defect, SymmetryClass};

/// Relative tolerance on the input symmetry and on zero eigenvalues.
pub const FACTOR_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaKind {
    /// `diag(iI_q, −iI_p, 0)` for ε=+1 or `diag(I_p, −I_q, 0)` for ε=−1.
    HermitianInertia { p: usize, q: usize },
    /// `[[0, I], [−I, 0]] ⊕ 0` with `t` the rank.
    SkewSymplectic { t: usize },
    /// `I_t ⊕ 0`.
    SymmetricIdentity { t: usize },
}

/// A canonical middle factor together with the class it belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeltaPattern {
    pub kind: DeltaKind,
    pub size: usize,
    pub class: SymmetryClass,
}

impl DeltaPattern {
    pub fn new(class: SymmetryClass, p: usize, q: usize, t: usize, size: usize) -> Result<Self> {
        let kind = match (class.star, class.epsilon) {
            (Star::Conjugate, _) => {
                if p + q > size {
                    return Err(Error::BadIndices(format!("p+q = {} exceeds size {size}", p + q)));
                }
                DeltaKind::HermitianInertia { p, q }
            }
            (Star::Transpose, 1) => {
                if t > size || !t.is_multiple_of(2) {
                    return Err(Error::BadIndices(format!("t = {t} must be even and at most {size}")));
                }
                DeltaKind::SkewSymplectic { t }
            }
            (Star::Transpose, _) => {
                if t > size {
                    return Err(Error::BadIndices(format!("t = {t} exceeds size {size}")));
                }
                DeltaKind::SymmetricIdentity { t }
            }
        };
        Ok(Self { kind, size, class })
    }

    pub fn rank(&self) -> usize {
        match self.kind {
            DeltaKind::HermitianInertia { p, q } => p + q,
            DeltaKind::SkewSymplectic { t } | DeltaKind::SymmetricIdentity { t } => t,
        }
    }

    /// The inertia `(p, q)` of `√(−ε)Δ`; only meaningful for ⋆=∗.
    pub fn inertia(&self) -> Option<(usize, usize)> {
        match self.kind {
            DeltaKind::HermitianInertia { p, q } => Some((p, q)),
            _ => None,
        }
    }

    pub fn matrix(&self) -> CMatrix {
        let mut d = CMatrix::zeros(self.size, self.size);
        match self.kind {
            DeltaKind::HermitianInertia { p, q } => {
                let (first, second, n_first) = if self.class.epsilon == 1 {
                    (I, -I, q)
                } else {
                    (cr(1.0), cr(-1.0), p)
                };
                for k in 0..(p + q) {
                    d[(k, k)] = if k < n_first { first } else { second };
                }
            }
            DeltaKind::SkewSymplectic { t } => {
                let h = t / 2;
                for k in 0..h {
                    d[(k, h + k)] = cr(1.0);
                    d[(h + k, k)] = cr(-1.0);
                }
            }
            DeltaKind::SymmetricIdentity { t } => {
                for k in 0..t {
                    d[(k, k)] = cr(1.0);
                }
            }
        }
        d
    }
}

/// The canonical Δ matrix for the given indices.
pub fn build_delta(class: SymmetryClass, p: usize, q: usize, t: usize, size: usize) -> Result<CMatrix> {
    Ok(DeltaPattern::new(class, p, q, t, size)?.matrix())
}

#[derive(Clone, Debug)]
pub struct StarFactorization {
    pub y: CMatrix,
    pub delta: DeltaPattern,
}

impl StarFactorization {
    pub fn class(&self) -> SymmetryClass {
        self.delta.class
    }

    pub fn delta_matrix(&self) -> CMatrix {
        self.delta.matrix()
    }

    pub fn rank(&self) -> usize {
        self.delta.rank()
    }

    pub fn reconstruct(&self) -> CMatrix {
        &self.y * self.delta_matrix() * self.class().adj(&self.y)
    }

    /// 2-norm condition number of `Y`, reported as a diagnostic.
    pub fn cond_y(&self) -> f64 {
        let s = singular_values(&self.y);
        match (s.first(), s.last()) {
            (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
            _ => f64::INFINITY,
        }
    }

    /// Leading `rank` columns of `Y` with the matching nonzero block of Δ.
    pub fn thin(&self) -> (CMatrix, CMatrix) {
        let r = self.rank();
        let d = self.delta_matrix();
        (self.y.columns(0, r).into_owned(), d.view((0, 0), (r, r)).into_owned())
    }
}

/// Inertia `(p, q, z)` of a Hermitian matrix.
pub fn inertia(h: &CMatrix) -> Result<(usize, usize, usize)> {
    let scale = fro(h);
    let defect = fro(&(h - h.adjoint()));
    if defect > FACTOR_TOL * scale {
        return Err(Error::NotHermitian(defect / scale.max(f64::MIN_POSITIVE)));
    }
    let tau = FACTOR_TOL * spectral_norm(h);
    let (vals, _) = hermitian_eig(h);
    let p = vals.iter().filter(|&&v| v > tau).count();
    let q = vals.iter().filter(|&&v| v < -tau).count();
    Ok((p, q, vals.len() - p - q))
}

/// `√(−ε)`: `i` for ε=+1 and `1` for ε=−1.
pub fn sqrt_neg_eps(class: SymmetryClass) -> C64 {
    if class.epsilon == 1 {
        I
    } else {
        cr(1.0)
    }
}

/// Factor `B = YΔY⋆` with `Y` square nonsingular and Δ canonical.
pub fn star_factorize(b: &CMatrix, class: SymmetryClass) -> Result<StarFactorization> {
    if !b.is_square() {
        return Err(Error::DimensionMismatch("star_factorize: B not square".into()));
    }
    let scale = fro(b);
    let defect = skew_defect(b, class);
    if defect > FACTOR_TOL * scale {
        return Err(Error::SymmetryViolation(defect / scale));
    }
    let n = b.nrows();
    if scale == 0.0 {
        return Ok(StarFactorization {
            y: CMatrix::identity(n, n),
            delta: DeltaPattern::new(class, 0, 0, 0, n)?,
        });
    }
    match (class.star, class.epsilon) {
        (Star::Conjugate, _) => hermitian_factor(b, class),
        (Star::Transpose, -1) => takagi_factor(b, class),
        _ => youla_factor(b, class),
    }
}

fn hermitian_factor(b: &CMatrix, class: SymmetryClass) -> Result<StarFactorization> {
    let n = b.nrows();
    let h = b * sqrt_neg_eps(class);
    let (vals, z) = hermitian_eig(&h);
    let hmax = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tau = FACTOR_TOL * hmax;
    let by_mag = |idx: &mut Vec<usize>| idx.sort_by(|&a, &c| vals[c].abs().total_cmp(&vals[a].abs()));
    let mut pos: Vec<usize> = (0..n).filter(|&k| vals[k] > tau).collect();
    let mut neg: Vec<usize> = (0..n).filter(|&k| vals[k] < -tau).collect();
    let zero: Vec<usize> = (0..n).filter(|&k| vals[k].abs() <= tau).collect();
    by_mag(&mut pos);
    by_mag(&mut neg);
    let (p, q) = (pos.len(), neg.len());
    let order: Vec<usize> = if class.epsilon == 1 {
        neg.iter().chain(&pos).chain(&zero).copied().collect()
    } else {
        pos.iter().chain(&neg).chain(&zero).copied().collect()
    };
    let mut y = CMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let s = if vals[k].abs() > tau { vals[k].abs().sqrt() } else { 1.0 };
        y.set_column(col, &(z.column(k) * cr(s)));
    }
    Ok(StarFactorization { y, delta: DeltaPattern::new(class, p, q, 0, n)? })
}

/// Takagi factorization through the real symmetric embedding `[[Re, Im], [Im, −Re]]`,
/// whose positive eigenpairs `σ, [x; y]` give `B·conj(x+iy) = σ(x+iy)`.
fn takagi_factor(b: &CMatrix, class: SymmetryClass) -> Result<StarFactorization> {
    let n = b.nrows();
    let sym = (b + b.transpose()) * cr(0.5);
    let emb = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i % n, j % n);
        let z = sym[(bi, bj)];
        match (i < n, j < n) {
            (true, true) => z.re,
            (true, false) | (false, true) => z.im,
            (false, false) => -z.re,
        }
    });
    let eig = SymmetricEigen::try_new(emb, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::FactorizationFailure("Takagi embedding eigensolver did not converge".into()))?;
    let smax = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tau = FACTOR_TOL * smax;
    let mut idx: Vec<usize> = (0..2 * n).filter(|&k| eig.eigenvalues[k] > tau).collect();
    idx.sort_by(|&a, &c| eig.eigenvalues[c].total_cmp(&eig.eigenvalues[a]));
    let t = idx.len();
    let mut u = CMatrix::zeros(n, t);
    for (col, &k) in idx.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let mut uc = nalgebra::DVector::from_fn(n, |i, _| C64::new(v[i], v[n + i]));
        let nrm = uc.norm();
        uc /= cr(nrm);
        u.set_column(col, &uc);
    }
    let mut y = CMatrix::zeros(n, n);
    for (col, &k) in idx.iter().enumerate().take(t) {
        let s = eig.eigenvalues[k].sqrt();
        y.set_column(col, &(u.column(col) * cr(s)));
    }
    let comp = orthonormal_complement(&u);
    y.view_mut((0, t), (n, n - t)).copy_from(&comp);
    Ok(StarFactorization { y, delta: DeltaPattern::new(class, 0, 0, t, n)? })
}

/// Youla canonical form by deflation: each step removes a 2×2 block
/// `γ(u₁u₂ᵀ − u₂u₁ᵀ)` built from the leading singular pair of the residual.
fn youla_factor(b: &CMatrix, class: SymmetryClass) -> Result<StarFactorization> {
    let n = b.nrows();
    // The rank is decided on the input as given, so a symmetric perturbation that passed the
    // symmetry gate still counts towards it.
    let sv = singular_values(b);
    let smax = sv[0];
    let rank = sv.iter().filter(|&&s| s > FACTOR_TOL * smax).count();
    let skew = (b - b.transpose()) * cr(0.5);
    let d = svd(&skew);
    if rank % 2 == 1 {
        return Err(Error::FactorizationFailure(format!(
            "skew-symmetric input has odd numerical rank {rank}"
        )));
    }
    // The range basis carries the whole matrix: B = U (U* B conj(U)) Uᵀ. Deflating the
    // nonsingular core keeps the null-space noise out of the pivots.
    let range = d.u.columns(0, rank).into_owned();
    let core = range.adjoint() * &skew * range.map(|z| z.conj());
    let core = (&core - core.transpose()) * cr(0.5);
    let core_y = youla_nonsingular(&core, smax)?;
    let mut y = CMatrix::zeros(n, n);
    y.view_mut((0, 0), (n, rank)).copy_from(&(&range * core_y));
    y.view_mut((0, rank), (n, n - rank)).copy_from(&orthonormal_complement(&range));
    Ok(StarFactorization { y, delta: DeltaPattern::new(class, 0, 0, rank, n)? })
}

/// Factor a nonsingular skew-symmetric `c` as `Y J Yᵀ`, `J` the standard symplectic pattern.
///
/// Each step removes rank two exactly: with `x = conj(u₁)`, `y = v₁` from the leading singular
/// triple, `R − (a bᵀ − b aᵀ)/α` for `a = Rx`, `b = Ry`, `α = xᵀRy = σ₁` annihilates `x` and `y`.
fn youla_nonsingular(c: &CMatrix, scale: f64) -> Result<CMatrix> {
    let r = c.nrows();
    let h = r / 2;
    let mut residual = c.clone();
    let mut y = CMatrix::zeros(r, r);
    for k in 0..h {
        let d = svd(&residual);
        let alpha = d.s[0];
        if alpha <= FACTOR_TOL * scale {
            return Err(Error::FactorizationFailure("Youla deflation lost rank".into()));
        }
        let x = d.u.column(0).map(|z| z.conj());
        let a = &residual * x;
        let b = &residual * d.v.column(0);
        let root = alpha.sqrt();
        let (a, b) = (a / cr(root), b / cr(root));
        residual -= &a * b.transpose() - &b * a.transpose();
        residual = (&residual - residual.transpose()) * cr(0.5);
        y.set_column(k, &a);
        y.set_column(h + k, &b);
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{diag, eye, from_real_rows};
    use crate::random::{random_cmatrix, random_unitary, rng};

    fn recon_err(b: &CMatrix, f: &StarFactorization) -> f64 {
        fro(&(b - f.reconstruct())) / fro(b).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn inertia_examples() {
        assert_eq!(inertia(&diag(&[cr(1.0), cr(-1.0), cr(0.0)])).unwrap(), (1, 1, 1));
        assert_eq!(inertia(&(-eye(2))).unwrap(), (0, 2, 0));
        let mut r = rng(4);
        let g = random_unitary(&mut r, 3);
        let h = g.adjoint() * diag(&[cr(3.0), cr(-2.0), cr(5.0)]) * &g;
        assert_eq!(inertia(&h).unwrap(), (2, 1, 0));
        let bad = from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(inertia(&bad), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn delta_patterns() {
        let d = build_delta(SymmetryClass::H_PAL, 1, 1, 0, 2).unwrap();
        assert_eq!(d, diag(&[I, -I]));
        let d = build_delta(SymmetryClass::T_PAL, 0, 0, 2, 2).unwrap();
        assert_eq!(d, from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]));
        let d = build_delta(SymmetryClass::T_ANTI, 0, 0, 1, 3).unwrap();
        assert_eq!(d, diag(&[cr(1.0), cr(0.0), cr(0.0)]));
        assert!(build_delta(SymmetryClass::T_PAL, 0, 0, 1, 2).is_err());
        assert!(build_delta(SymmetryClass::H_ANTI, 2, 1, 0, 2).is_err());
    }

    #[test]
    fn canonical_inputs_factor_trivially() {
        let j = from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let f = star_factorize(&j, SymmetryClass::T_PAL).unwrap();
        assert!(recon_err(&j, &f) < 1e-14);
        assert_eq!(f.delta_matrix(), j);

        let b = eye(2) * I;
        let f = star_factorize(&b, SymmetryClass::H_PAL).unwrap();
        assert_eq!(f.delta.inertia(), Some((0, 2)));
        assert_eq!(f.delta_matrix(), diag(&[I, I]));
        assert!(fro(&(f.y.clone() - eye(2))) < 1e-14 || recon_err(&b, &f) < 1e-14);
    }

    #[test]
    fn random_symmetric_reconstructs() {
        let mut r = rng(8);
        let g = random_cmatrix(&mut r, 6, 6);
        let b = &g + g.transpose();
        let f = star_factorize(&b, SymmetryClass::T_ANTI).unwrap();
        assert!(recon_err(&b, &f) < 1e-10);
        assert_eq!(f.rank(), 6);
    }

    #[test]
    fn rank_deficient_all_classes() {
        let mut r = rng(12);
        for class in SymmetryClass::ALL {
            let c = random_cmatrix(&mut r, 7, 4);
            let core = random_cmatrix(&mut r, 4, 4);
            let d0 = &core - class.adj(&core) * class.eps_c();
            let b = &c * d0 * class.adj(&c);
            let f = star_factorize(&b, class).unwrap();
            assert!(recon_err(&b, &f) < 1e-10, "{class}");
            assert_eq!(f.rank(), 4, "{class}");
            assert!(f.cond_y().is_finite());
        }
    }

    #[test]
    fn odd_rank_skew_rejected() {
        // Eight symplectic blocks plus a diagonal entry small enough to pass the
        // symmetry gate but large enough to count towards the rank.
        let m = 8;
        let mut b = CMatrix::zeros(2 * m + 1, 2 * m + 1);
        for k in 0..m {
            b[(2 * k, 2 * k + 1)] = cr(1.0);
            b[(2 * k + 1, 2 * k)] = cr(-1.0);
        }
        assert!(star_factorize(&b, SymmetryClass::T_PAL).is_ok());
        b[(2 * m, 2 * m)] = cr(1.5e-10);
        assert!(matches!(
            star_factorize(&b, SymmetryClass::T_PAL),
            Err(Error::FactorizationFailure(_))
        ));
    }

    #[test]
    fn rejects_wrong_symmetry() {
        let b = from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        for class in SymmetryClass::ALL {
            assert!(matches!(star_factorize(&b, class), Err(Error::SymmetryViolation(_))));
        }
    }
}
