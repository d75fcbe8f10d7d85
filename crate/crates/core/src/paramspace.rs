//! The real vector space of parameter matrices `S` with `S⋆ = −εS` and `S = TST⋆`.

use nalgebra::DVector;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{
    block_diag, cr, fro, lstsq_real, null_space_real, rcond, realify, CMatrix, RMatrix, Star, C64,
    I,
};
use crate::random::{normal, rng};
use crate::system::{skew_defect, SymmetryClass};

/// Relative cutoff for null-space extraction.
pub const NULL_TOL: f64 = 1e-10;
/// Accept a sampled `S` when `σ_min/σ_max` exceeds this.
pub const NONSINGULAR_TOL: f64 = 1e-8;
/// Constrained solves fail when the residual exceeds this fraction of `‖C‖_F`.
pub const CONSISTENCY_TOL: f64 = 1e-8;
/// Tolerance on eigenvalue distinctness and on partner matching.
pub const CLUSTER_TOL: f64 = 1e-8;

/// A real basis of a parameter space.
#[derive(Clone, Debug)]
pub struct SBasis {
    pub t: CMatrix,
    pub class: SymmetryClass,
    pub basis: Vec<CMatrix>,
    /// Unpaired eigenvalue groups whose diagonal block is forced to vanish.
    pub forced_zero: Vec<usize>,
}

impl SBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn size(&self) -> usize {
        self.t.nrows()
    }

    pub fn combine(&self, coeffs: &[f64]) -> CMatrix {
        let m = self.size();
        let mut s = CMatrix::zeros(m, m);
        for (b, &a) in self.basis.iter().zip(coeffs) {
            s += b * cr(a);
        }
        s
    }

    /// Columns are the realified basis elements.
    pub fn real_frame(&self) -> RMatrix {
        let m = self.size();
        let mut f = RMatrix::zeros(2 * m * m, self.dim());
        for (k, b) in self.basis.iter().enumerate() {
            f.set_column(k, &realify(b));
        }
        f
    }

    /// Worst relative violation of the two defining equations over the basis.
    pub fn max_defect(&self) -> (f64, f64) {
        let tn = fro(&self.t);
        self.basis.iter().fold((0.0_f64, 0.0_f64), |(a, b), s| {
            let ns = fro(s);
            let sym = skew_defect(s, self.class) / ns;
            let fix = fro(&(s - &self.t * s * self.class.adj(&self.t))) / (ns * tn * tn);
            (a.max(sym), b.max(fix))
        })
    }

    /// Largest distance from an element of `other`'s basis to this span.
    pub fn span_distance(&self, other: &SBasis) -> f64 {
        let frame = self.real_frame();
        other
            .basis
            .iter()
            .map(|b| {
                let v = realify(b);
                let a = lstsq_real(&frame, &v, 1e-12);
                (&frame * a - &v).norm() / v.norm()
            })
            .fold(0.0, f64::max)
    }

    /// Restrict to the subspace with `X S X⋆ = 0`.
    pub fn restrict_to_pair(&self, x: &CMatrix) -> SBasis {
        let xa = self.class.adj(x);
        let images: Vec<CMatrix> = self.basis.iter().map(|b| x * b * &xa).collect();
        let rows = images.first().map_or(0, |m| 2 * m.len());
        let mut a = RMatrix::zeros(rows, self.dim());
        for (k, im) in images.iter().enumerate() {
            a.set_column(k, &realify(im));
        }
        let basis = if self.dim() == 0 {
            vec![]
        } else if rows == 0 {
            self.basis.clone()
        } else {
            let scale = fro(x).powi(2) * self.basis.iter().map(fro).fold(0.0, f64::max);
            let ns = null_space_real(&a, NULL_TOL, scale);
            ns.column_iter()
                .map(|col| self.combine(col.as_slice()))
                .collect()
        };
        SBasis {
            t: self.t.clone(),
            class: self.class,
            basis,
            forced_zero: self.forced_zero.clone(),
        }
    }
}

/// Frobenius-orthonormal real basis of `{S : S⋆ = −εS}`.
pub fn skew_space_basis(m: usize, class: SymmetryClass) -> Vec<CMatrix> {
    let eps = class.eps_c();
    let mut out = Vec::new();
    for j in 0..m {
        for k in j..m {
            for coef in [cr(1.0), I] {
                let mut g = CMatrix::zeros(m, m);
                g[(j, k)] += coef;
                g[(k, j)] -= eps * class.adj_scalar(coef);
                let nrm = fro(&g);
                if nrm > 0.5 {
                    out.push(g / cr(nrm));
                }
            }
        }
    }
    out
}

/// Basis of 𝕊_T from the null space of `S ↦ S − TST⋆` on the skew space.
pub fn s_basis(t: &CMatrix, class: SymmetryClass) -> SBasis {
    let m = t.nrows();
    let frame = skew_space_basis(m, class);
    let ta = class.adj(t);
    let mut a = RMatrix::zeros(2 * m * m, frame.len());
    for (k, g) in frame.iter().enumerate() {
        a.set_column(k, &realify(&(g - t * g * &ta)));
    }
    let basis = if frame.is_empty() {
        vec![]
    } else {
        null_space_real(&a, NULL_TOL, 1.0 + fro(t).powi(2))
            .column_iter()
            .map(|col| {
                let mut s = CMatrix::zeros(m, m);
                for (g, &c) in frame.iter().zip(col.iter()) {
                    s += g * cr(c);
                }
                s
            })
            .collect()
    };
    SBasis { t: t.clone(), class, basis, forced_zero: vec![] }
}

/// Basis of 𝕊_(X,T): 𝕊_T restricted by `XSX⋆ = 0`.
pub fn s_basis_pair(x: &CMatrix, t: &CMatrix, class: SymmetryClass) -> SBasis {
    s_basis(t, class).restrict_to_pair(x)
}

/// Lower-triangular Pascal-like matrix with `l_ij = C(m−j, m−i)` (1-based).
pub fn pascal_matrix(m: usize) -> CMatrix {
    CMatrix::from_fn(m, m, |i, j| {
        if i >= j {
            cr(binomial(m - 1 - j, m - 1 - i) as f64)
        } else {
            cr(0.0)
        }
    })
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Scaled Pascal matrix `P` with `(λ⁻¹I + N)^{-⊤} = P⁻¹(λI + Nᵀ)P`.
pub fn pascal_scaling(m: usize, lambda: C64) -> CMatrix {
    let left = CMatrix::from_fn(m, m, |i, j| if i == j { lambda.powu((m - 1 - i) as u32) } else { cr(0.0) });
    let right = CMatrix::from_fn(m, m, |i, j| {
        if i == j {
            (cr(-1.0) / lambda).powu(i as u32)
        } else {
            cr(0.0)
        }
    });
    left * pascal_matrix(m) * right
}

/// `m×m` upper-left Hankel matrix with a single one on anti-diagonal `e`.
fn hankel_unit(rows: usize, cols: usize, e: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |r, c| if r + c == e { cr(1.0) } else { cr(0.0) })
}

/// Nilpotent shift with ones on the superdiagonal.
pub fn shift(m: usize) -> CMatrix {
    CMatrix::from_fn(m, m, |i, j| if j == i + 1 { cr(1.0) } else { cr(0.0) })
}

pub fn jordan_block(lambda: C64, m: usize) -> CMatrix {
    CMatrix::identity(m, m) * lambda + shift(m)
}

/// An eigenvalue with the sizes of its Jordan blocks, largest first.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanGroup {
    pub lambda: C64,
    pub sizes: Vec<usize>,
}

impl JordanGroup {
    pub fn new(lambda: C64, sizes: Vec<usize>) -> Self {
        Self { lambda, sizes }
    }

    pub fn simple(lambda: C64) -> Self {
        Self { lambda, sizes: vec![1] }
    }

    pub fn order(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn matrix(&self) -> CMatrix {
        let blocks: Vec<CMatrix> = self.sizes.iter().map(|&m| jordan_block(self.lambda, m)).collect();
        block_diag(&blocks.iter().collect::<Vec<_>>())
    }

    fn offsets(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .scan(0, |acc, &m| {
                let o = *acc;
                *acc += m;
                Some(o)
            })
            .collect()
    }
}

/// Palindromic Jordan form: pairs `(λ, 1/λ⋆)` first, then self-paired eigenvalues.
#[derive(Clone, Debug)]
pub struct Pjcf {
    pub class: SymmetryClass,
    /// Each entry is the `λ` of a pair; its partner carries the same block sizes.
    pub paired: Vec<JordanGroup>,
    pub unpaired: Vec<JordanGroup>,
}

impl Pjcf {
    pub fn new(class: SymmetryClass, paired: Vec<JordanGroup>, unpaired: Vec<JordanGroup>) -> Result<Self> {
        let all: Vec<&JordanGroup> = paired.iter().chain(&unpaired).collect();
        for g in &all {
            if g.sizes.is_empty() || g.sizes.contains(&0) || g.sizes.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidPjcf(format!(
                    "block sizes {:?} must be positive and nonincreasing",
                    g.sizes
                )));
            }
            if g.lambda.norm() == 0.0 || !g.lambda.re.is_finite() || !g.lambda.im.is_finite() {
                return Err(Error::InvalidPjcf("eigenvalues must be finite and nonzero".into()));
            }
        }
        for g in &paired {
            if self_paired(class, g.lambda) {
                return Err(Error::InvalidPjcf(format!("{} is its own partner", g.lambda)));
            }
        }
        for g in &unpaired {
            let ok = match class.star {
                Star::Conjugate => self_paired(class, g.lambda),
                Star::Transpose => {
                    (g.lambda - cr(1.0)).norm() <= CLUSTER_TOL || (g.lambda + cr(1.0)).norm() <= CLUSTER_TOL
                }
            };
            if !ok {
                return Err(Error::InvalidPjcf(format!("{} cannot be unpaired for class {class}", g.lambda)));
            }
        }
        let jcf = Self { class, paired, unpaired };
        let values = jcf.eigenvalues();
        for (i, a) in values.iter().enumerate() {
            for b in &values[i + 1..] {
                if (a - b).norm() <= CLUSTER_TOL * a.norm().max(1.0) {
                    return Err(Error::InvalidPjcf(format!("eigenvalue {a} is repeated across groups")));
                }
            }
        }
        Ok(jcf)
    }

    /// Distinct eigenvalues in layout order.
    pub fn eigenvalues(&self) -> Vec<C64> {
        let mut v = Vec::new();
        for g in &self.paired {
            v.push(g.lambda);
            v.push(self.class.partner(g.lambda));
        }
        v.extend(self.unpaired.iter().map(|g| g.lambda));
        v
    }

    /// Groups in layout order, with partners materialized.
    pub fn groups(&self) -> Vec<JordanGroup> {
        let mut v = Vec::new();
        for g in &self.paired {
            v.push(g.clone());
            v.push(JordanGroup::new(self.class.partner(g.lambda), g.sizes.clone()));
        }
        v.extend(self.unpaired.iter().cloned());
        v
    }

    pub fn size(&self) -> usize {
        2 * self.paired.iter().map(JordanGroup::order).sum::<usize>()
            + self.unpaired.iter().map(JordanGroup::order).sum::<usize>()
    }

    pub fn matrix(&self) -> CMatrix {
        let blocks: Vec<CMatrix> = self.groups().iter().map(JordanGroup::matrix).collect();
        block_diag(&blocks.iter().collect::<Vec<_>>())
    }

    /// Whether every Jordan block has size one.
    pub fn is_semisimple(&self) -> bool {
        self.paired.iter().chain(&self.unpaired).all(|g| g.sizes.iter().all(|&m| m == 1))
    }
}

pub fn self_paired(class: SymmetryClass, lambda: C64) -> bool {
    (lambda * class.adj_scalar(lambda) - cr(1.0)).norm() <= CLUSTER_TOL
}

/// Structured basis of 𝕊_J built from Pascal–Hankel blocks.
pub fn s_basis_pjcf(jcf: &Pjcf, class: SymmetryClass) -> SBasis {
    let size = jcf.size();
    let eps = class.eps_c();
    let mut basis = Vec::new();
    let mut forced_zero = Vec::new();
    let mut offset = 0;
    for g in &jcf.paired {
        let order = g.order();
        let (row0, col0) = (offset, offset + order);
        let offs = g.offsets();
        for (j, &nj) in g.sizes.iter().enumerate() {
            for (k, &nk) in g.sizes.iter().enumerate() {
                let p = pascal_scaling(nk, g.lambda);
                for e in 0..nj.min(nk) {
                    let block = hankel_unit(nj, nk, e) * &p;
                    for coef in [cr(1.0), I] {
                        let blk = &block * coef;
                        let mut s = CMatrix::zeros(size, size);
                        s.view_mut((row0 + offs[j], col0 + offs[k]), (nj, nk)).copy_from(&blk);
                        let mirrored = -class.adj(&blk) * eps;
                        s.view_mut((col0 + offs[k], row0 + offs[j]), (nk, nj)).copy_from(&mirrored);
                        basis.push(s);
                    }
                }
            }
        }
        offset += 2 * order;
    }
    for (gi, g) in jcf.unpaired.iter().enumerate() {
        let order = g.order();
        let offs = g.offsets();
        let mut candidates = Vec::new();
        for (j, &nj) in g.sizes.iter().enumerate() {
            for (k, &nk) in g.sizes.iter().enumerate() {
                let p = pascal_scaling(nk, g.lambda);
                for e in 0..nj.min(nk) {
                    let block = hankel_unit(nj, nk, e) * &p;
                    for coef in [cr(1.0), I] {
                        let mut s = CMatrix::zeros(order, order);
                        s.view_mut((offs[j], offs[k]), (nj, nk)).copy_from(&(&block * coef));
                        candidates.push(s);
                    }
                }
            }
        }
        let mut a = RMatrix::zeros(2 * order * order, candidates.len());
        for (k, cnd) in candidates.iter().enumerate() {
            a.set_column(k, &realify(&(cnd + class.adj(cnd) * eps)));
        }
        let scale = candidates.iter().map(fro).fold(0.0, f64::max);
        let ns = null_space_real(&a, NULL_TOL, scale);
        if ns.ncols() == 0 {
            forced_zero.push(gi);
        }
        for col in ns.column_iter() {
            let mut blk = CMatrix::zeros(order, order);
            for (cnd, &c) in candidates.iter().zip(col.iter()) {
                blk += cnd * cr(c);
            }
            let mut s = CMatrix::zeros(size, size);
            s.view_mut((offset, offset), (order, order)).copy_from(&blk);
            basis.push(s);
        }
        offset += order;
    }
    SBasis { t: jcf.matrix(), class, basis, forced_zero }
}

/// Draw `Σ cᵢBᵢ` with normal coefficients until it is well conditioned.
pub fn sample_nonsingular(basis: &SBasis, seed: u64, attempts: usize) -> Result<CMatrix> {
    sample_nonsingular_with(basis, &mut rng(seed), attempts)
}

pub fn sample_nonsingular_with<R: Rng>(basis: &SBasis, r: &mut R, attempts: usize) -> Result<CMatrix> {
    if basis.dim() == 0 || basis.size() == 0 {
        return Err(Error::NoNonsingularFound(0));
    }
    let mut best: Option<(f64, CMatrix)> = None;
    for _ in 0..attempts.max(1) {
        let coeffs: Vec<f64> = (0..basis.dim()).map(|_| normal(r)).collect();
        let s = basis.combine(&coeffs);
        let rc = rcond(&s);
        if best.as_ref().is_none_or(|(b, _)| rc > *b) {
            best = Some((rc, s));
        }
        if rc > NONSINGULAR_TOL {
            break;
        }
    }
    match best {
        Some((rc, s)) if rc > NONSINGULAR_TOL => Ok(s),
        _ => Err(Error::NoNonsingularFound(attempts.max(1))),
    }
}

/// Affine solution set of `X S X⋆ = C` within the span of a basis.
#[derive(Clone, Debug)]
pub struct ConstrainedSolution {
    pub particular: CMatrix,
    pub homogeneous: SBasis,
    pub residual: f64,
}

impl ConstrainedSolution {
    /// Add a seeded homogeneous component until the result is nonsingular.
    pub fn sample_nonsingular_with<R: Rng>(&self, r: &mut R, attempts: usize) -> Result<CMatrix> {
        if rcond(&self.particular) > NONSINGULAR_TOL || self.homogeneous.dim() == 0 {
            return if rcond(&self.particular) > NONSINGULAR_TOL {
                Ok(self.particular.clone())
            } else {
                Err(Error::NoNonsingularFound(0))
            };
        }
        let scale = fro(&self.particular).max(1.0);
        let mut best: Option<(f64, CMatrix)> = None;
        for _ in 0..attempts.max(1) {
            let coeffs: Vec<f64> = (0..self.homogeneous.dim()).map(|_| normal(r)).collect();
            let s = &self.particular + self.homogeneous.combine(&coeffs) * cr(scale);
            let rc = rcond(&s);
            if best.as_ref().is_none_or(|(b, _)| rc > *b) {
                best = Some((rc, s));
            }
            if rc > NONSINGULAR_TOL {
                break;
            }
        }
        match best {
            Some((rc, s)) if rc > NONSINGULAR_TOL => Ok(s),
            _ => Err(Error::NoNonsingularFound(attempts.max(1))),
        }
    }
}

/// Least-squares solution of `X S X⋆ = C` over real coefficients.
pub fn solve_constrained_s(basis: &SBasis, x: &CMatrix, c: &CMatrix) -> Result<ConstrainedSolution> {
    let class = basis.class;
    let m = basis.size();
    if x.ncols() != m || c.shape() != (x.nrows(), x.nrows()) {
        return Err(Error::DimensionMismatch(format!(
            "constrained solve: X is {}x{}, C is {}x{}, basis size {m}",
            x.nrows(),
            x.ncols(),
            c.nrows(),
            c.ncols()
        )));
    }
    let cn = fro(c);
    let defect = skew_defect(c, class);
    if defect > NULL_TOL * cn.max(f64::MIN_POSITIVE) && defect > 0.0 {
        return Err(Error::SymmetryViolation(defect / cn.max(f64::MIN_POSITIVE)));
    }
    let xa = class.adj(x);
    let mut a = RMatrix::zeros(2 * c.len(), basis.dim());
    for (k, b) in basis.basis.iter().enumerate() {
        a.set_column(k, &realify(&(x * b * &xa)));
    }
    let rhs = realify(c);
    let coeffs = if basis.dim() == 0 {
        DVector::zeros(0)
    } else {
        lstsq_real(&a, &rhs, NULL_TOL)
    };
    let particular = basis.combine(coeffs.as_slice());
    let residual = fro(&(x * &particular * &xa - c));
    if residual > CONSISTENCY_TOL * cn {
        return Err(Error::Inconsistent(residual / cn.max(f64::MIN_POSITIVE)));
    }
    Ok(ConstrainedSolution {
        particular,
        homogeneous: basis.restrict_to_pair(x),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, diag, inverse};

    #[test]
    fn pascal_small_orders() {
        assert_eq!(pascal_matrix(1), diag(&[cr(1.0)]));
        let l3 = pascal_matrix(3);
        let expect = [[1.0, 0.0, 0.0], [2.0, 1.0, 0.0], [1.0, 1.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l3[(i, j)], cr(expect[i][j]));
            }
        }
        let l4 = pascal_matrix(4);
        let rows: Vec<Vec<f64>> = (0..4).map(|i| (0..=i).map(|j| l4[(i, j)].re).collect()).collect();
        assert_eq!(rows, vec![vec![1.0], vec![3.0, 1.0], vec![3.0, 2.0, 1.0], vec![1.0, 1.0, 1.0, 1.0]]);
    }

    #[test]
    fn pascal_similarity_identity() {
        for lam in [c(0.3, 0.4), c(2.0, -1.0), cr(-1.0)] {
            for m in 1..=6 {
                let p = pascal_scaling(m, lam);
                let n = shift(m);
                let lhs = inverse(&(CMatrix::identity(m, m) / lam + n.transpose())).unwrap();
                let rhs = inverse(&p).unwrap() * (CMatrix::identity(m, m) * lam + n.transpose()) * &p;
                assert!(fro(&(&lhs - &rhs)) <= 1e-10 * fro(&lhs), "m={m} lambda={lam}");
            }
        }
    }

    #[test]
    fn simple_pair_star_palindromic() {
        let t = diag(&[c(1.0, 1.0), cr(1.0) / c(1.0, -1.0)]);
        let b = s_basis(&t, SymmetryClass::H_PAL);
        assert_eq!(b.dim(), 2);
        for s in &b.basis {
            assert!(s[(0, 0)].norm() < 1e-12 && s[(1, 1)].norm() < 1e-12);
            assert!((s[(1, 0)] + s[(0, 1)].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn unit_eigenvalues_anti_transpose() {
        let t = diag(&[cr(1.0), cr(-1.0)]);
        assert_eq!(s_basis(&t, SymmetryClass::T_ANTI).dim(), 4);
        let t = diag(&[cr(2.0), cr(0.5)]);
        assert_eq!(s_basis(&t, SymmetryClass::T_PAL).dim(), 2);
    }

    #[test]
    fn basis_elements_satisfy_constraints() {
        let t = diag(&[c(0.5, 0.2), SymmetryClass::H_ANTI.partner(c(0.5, 0.2)), c(0.6, 0.8)]);
        let b = s_basis(&t, SymmetryClass::H_ANTI);
        let (sym, fix) = b.max_defect();
        assert!(sym <= 1e-12 && fix <= 1e-10);
        assert_eq!(b.dim(), 3);
    }

    #[test]
    fn pjcf_spans_agree_with_generic_basis() {
        let lam = c(0.4, 0.3);
        for class in SymmetryClass::ALL {
            let unit = if class.star == Star::Transpose {
                vec![JordanGroup::new(cr(-1.0), vec![2])]
            } else {
                vec![JordanGroup::new(c(0.6, 0.8), vec![2, 1])]
            };
            let jcf = Pjcf::new(class, vec![JordanGroup::new(lam, vec![2, 1])], unit).unwrap();
            let structured = s_basis_pjcf(&jcf, class);
            let generic = s_basis(&jcf.matrix(), class);
            assert_eq!(structured.dim(), generic.dim(), "{class}");
            assert!(generic.span_distance(&structured) < 1e-8, "{class}");
            assert!(structured.span_distance(&generic) < 1e-8, "{class}");
        }
    }

    #[test]
    fn jordan_pair_block_is_pascal_hankel() {
        let lam = c(0.5, -0.2);
        let class = SymmetryClass::T_ANTI;
        let jcf = Pjcf::new(class, vec![JordanGroup::new(lam, vec![2])], vec![]).unwrap();
        let b = s_basis_pjcf(&jcf, class);
        assert_eq!(b.dim(), 4);
        let (sym, fix) = b.max_defect();
        assert!(sym < 1e-12 && fix < 1e-10);
    }

    #[test]
    fn simple_unit_eigenvalue_is_forced_zero_for_t_pal() {
        let jcf = Pjcf::new(
            SymmetryClass::T_PAL,
            vec![JordanGroup::simple(c(0.5, 0.1))],
            vec![JordanGroup::simple(cr(1.0))],
        )
        .unwrap();
        let b = s_basis_pjcf(&jcf, SymmetryClass::T_PAL);
        assert_eq!(b.forced_zero, vec![0]);
        assert_eq!(b.dim(), 2);
    }

    #[test]
    fn sampling() {
        let t = diag(&[cr(1.0), cr(-1.0)]);
        let single = SBasis {
            t: t.clone(),
            class: SymmetryClass::T_ANTI,
            basis: vec![diag(&[cr(1.0), cr(-1.0)])],
            forced_zero: vec![],
        };
        assert!(sample_nonsingular(&single, 1, 5).is_ok());
        let singular = SBasis { basis: vec![diag(&[cr(1.0), cr(0.0)])], ..single };
        assert!(matches!(sample_nonsingular(&singular, 1, 5), Err(Error::NoNonsingularFound(5))));
    }

    #[test]
    fn constrained_plant_and_recover() {
        let class = SymmetryClass::H_PAL;
        let t = diag(&[c(0.5, 0.5), class.partner(c(0.5, 0.5)), c(0.2, -0.3), class.partner(c(0.2, -0.3))]);
        let basis = s_basis(&t, class);
        let s0 = basis.combine(&[0.3, -1.2, 0.7, 0.4]);
        let x = crate::numerics::from_real_rows(&[&[1.0, 2.0, 0.5, -1.0], &[0.0, 1.0, 3.0, 1.0]]);
        let target = &x * &s0 * x.adjoint();
        let sol = solve_constrained_s(&basis, &x, &target).unwrap();
        assert!(fro(&(&x * &sol.particular * x.adjoint() - &target)) <= 1e-10 * fro(&target));
    }
}
