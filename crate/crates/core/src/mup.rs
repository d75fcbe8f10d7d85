//! No-spillover model updating.
//!
//! Selected eigenpairs `(X1, T1)` of a system are replaced by `(X̃1, T̃1)` through a
//! low-rank change of `A1⁻¹` while every other eigenpair stays exact.

use crate::error::{Error, Result};
use crate::forward::{eig_full, pair_spectrum, Selection};
use crate::iep::{solve_psi_with, DEFAULT_ATTEMPTS, SAMPLE_DRAWS};
use crate::numerics::{diag, eye, fro, inverse, rank_factorize, rcond, CMatrix, C64};
use crate::paramspace::{s_basis, sample_nonsingular_with, solve_constrained_s, CLUSTER_TOL};
use crate::random::rng;
use crate::spectral::PAIR_RESIDUAL_TOL;
use crate::structfact::star_factorize;
use crate::system::{skew_defect, PalindromicSystem, SymmetryClass};

/// `σ_min/σ_max` floor for the matrix inverted to obtain `S1`.
pub const S1_PRECURSOR_TOL: f64 = 1e-12;
/// `σ_min/σ_max` floor for `Ξ`.
pub const XI_TOL: f64 = 1e-12;
/// Post-hoc membership tolerance for `S1`.
pub const S1_MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct MupProblem {
    pub system: PalindromicSystem,
    pub x1: CMatrix,
    pub t1: CMatrix,
    pub t1_new: CMatrix,
    pub x1_new: Option<CMatrix>,
    pub seed: u64,
    pub attempts: usize,
}

fn diagonal_values(t: &CMatrix, name: &'static str) -> Result<Vec<C64>> {
    let scale = fro(t).max(f64::MIN_POSITIVE);
    let off: f64 = (0..t.nrows())
        .flat_map(|i| (0..t.ncols()).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| t[(i, j)].norm_sqr())
        .sum::<f64>()
        .sqrt();
    if !t.is_square() || off > 1e-14 * scale {
        return Err(Error::NotDiagonal(name));
    }
    Ok(t.diagonal().iter().copied().collect())
}

fn close(a: C64, b: C64) -> bool {
    (a - b).norm() <= CLUSTER_TOL * a.norm().max(b.norm()).max(1.0)
}

impl MupProblem {
    pub fn new(
        system: PalindromicSystem,
        x1: CMatrix,
        t1: CMatrix,
        t1_new: CMatrix,
        x1_new: Option<CMatrix>,
        seed: u64,
    ) -> Result<Self> {
        let n = system.n();
        let k = x1.ncols();
        let class = system.class();
        if x1.nrows() != n || k == 0 || t1.shape() != (k, k) || t1_new.shape() != (k, k) {
            return Err(Error::DimensionMismatch(format!(
                "X1 is {}x{}, T1 is {}x{}, replacement T1 is {}x{}",
                x1.nrows(),
                k,
                t1.nrows(),
                t1.ncols(),
                t1_new.nrows(),
                t1_new.ncols()
            )));
        }
        if let Some(xn) = &x1_new {
            if xn.shape() != (n, k) {
                return Err(Error::DimensionMismatch(format!("prescribed X1 is {}x{}", xn.nrows(), xn.ncols())));
            }
        }
        let old = diagonal_values(&t1, "T1")?;
        let new = diagonal_values(&t1_new, "replacement T1")?;
        if new.iter().any(|v| v.norm() == 0.0) {
            return Err(Error::ZeroLambda);
        }
        let res = system.pair_residual(&x1, &t1)?;
        if res > PAIR_RESIDUAL_TOL {
            return Err(Error::ResidualTooLarge(res));
        }
        for values in [&old, &new] {
            let (_, _, unmatched, _) = pair_spectrum(values, class, CLUSTER_TOL);
            if let Some(&i) = unmatched.first() {
                return Err(Error::PairingNotClosed(values[i]));
            }
        }
        let mut pool = eig_full(&system)?.values;
        for &v in &old {
            if let Some((idx, _)) = pool
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - v).norm().total_cmp(&(b.1 - v).norm()))
            {
                pool.swap_remove(idx);
            }
        }
        for &v in &old {
            if let Some(&p) = pool.iter().find(|&&p| close(p, v)) {
                return Err(Error::SpectraOverlap(p));
            }
        }
        for &v in &new {
            if old.iter().chain(&pool).any(|&p| close(p, v)) {
                return Err(Error::RemainingEigenvalueConflict(format!(
                    "{v} is already in the spectrum"
                )));
            }
        }
        Ok(Self { system, x1, t1, t1_new, x1_new, seed, attempts: DEFAULT_ATTEMPTS })
    }

    /// Replace the selected eigenvalues of a forward solve with `replacement`, in order.
    pub fn from_selection(system: PalindromicSystem, sel: &Selection, replacement: &[C64], seed: u64) -> Result<Self> {
        if replacement.len() != sel.selected.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} replacement values for {} selected eigenvalues",
                replacement.len(),
                sel.selected.len()
            )));
        }
        Self::new(system, sel.x1.clone(), sel.t1.clone(), diag(replacement), None, seed)
    }

    pub fn k(&self) -> usize {
        self.x1.ncols()
    }
}

/// `S1 = (εX1⋆A1X1T1⁻¹ − T1^{−⋆}X1⋆A1⋆X1)⁻¹`.
pub fn compute_s1(sys: &PalindromicSystem, x1: &CMatrix, t1: &CMatrix) -> Result<CMatrix> {
    let class = sys.class();
    let tinv = inverse(t1).map_err(|_| Error::SingularT)?;
    let xa = class.adj(x1);
    let pre = &xa * sys.a1() * x1 * &tinv * class.eps_c() - class.adj(&tinv) * &xa * class.adj(sys.a1()) * x1;
    if rcond(&pre) <= S1_PRECURSOR_TOL {
        return Err(Error::SingularS1Precursor);
    }
    let s1 = inverse(&pre).map_err(|_| Error::SingularS1Precursor)?;
    let sn = fro(&s1);
    let tn = fro(t1);
    let sym = skew_defect(&s1, class) / sn;
    let fix = fro(&(&s1 - t1 * &s1 * class.adj(t1))) / (sn * tn * tn);
    if sym.max(fix) > S1_MEMBERSHIP_TOL {
        log::warn!("S1 membership defect {:.3e} exceeds {S1_MEMBERSHIP_TOL:.0e}", sym.max(fix));
    }
    Ok(s1)
}

/// Steps 6–8: the updated coefficients and the rank factorization behind them.
#[derive(Clone, Debug)]
pub struct UpdateCore {
    pub system: PalindromicSystem,
    pub z1: CMatrix,
    pub z2: CMatrix,
    pub rank: usize,
    pub xi_rcond: f64,
}

/// Returns `Ok(None)` when `Ξ` is numerically singular.
#[allow(clippy::too_many_arguments)]
pub fn apply_update(
    sys: &PalindromicSystem,
    x1: &CMatrix,
    t1: &CMatrix,
    s1: &CMatrix,
    x1_new: &CMatrix,
    t1_new: &CMatrix,
    s1_new: &CMatrix,
) -> Result<Option<UpdateCore>> {
    let class = sys.class();
    let eps = class.eps_c();
    let n = sys.n();
    let a1 = sys.a1();
    let tinv = inverse(t1).map_err(|_| Error::SingularT)?;
    let tinv_new = inverse(t1_new).map_err(|_| Error::SingularT)?;
    let xa = class.adj(x1);
    let xa_new = class.adj(x1_new);
    let diff = x1_new * &tinv_new * s1_new * &xa_new - x1 * &tinv * s1 * &xa;
    let (z1, z2, rank) = rank_factorize(&diff, class.star, None);
    let z2a = class.adj(&z2);
    let xi = eye(rank) + &z2a * a1 * &z1 * eps;
    let xi_rcond = if rank == 0 { 1.0 } else { rcond(&xi) };
    if xi_rcond <= XI_TOL {
        return Ok(None);
    }
    let xi_inv = inverse(&xi)?;
    let upsilon = x1_new * &tinv_new * &tinv_new * s1_new * &xa_new - x1 * &tinv * &tinv * s1 * &xa;
    let a1_new = a1 - a1 * &z1 * &xi_inv * &z2a * a1 * eps;
    let left = eye(n) - a1 * &z1 * &xi_inv * &z2a * eps;
    let right = eye(n) - &z1 * &xi_inv * &z2a * a1 * eps;
    let a0_new = left * (sys.a0() - a1 * upsilon * a1) * right;
    let system = PalindromicSystem::computed(class, a1_new, a0_new)?;
    Ok(Some(UpdateCore { system, z1, z2, rank, xi_rcond }))
}

/// The updated system with everything needed to audit it.
#[derive(Clone, Debug)]
pub struct MupSolution {
    pub system: PalindromicSystem,
    pub x1_new: CMatrix,
    pub t1_new: CMatrix,
    pub s1: CMatrix,
    pub s1_new: CMatrix,
    pub z1: CMatrix,
    pub z2: CMatrix,
    /// `ℓ`, the rank of the change to `A1⁻¹`.
    pub rank: usize,
    pub attempts: usize,
    pub xi_rcond: f64,
}

impl MupSolution {
    /// `‖Ã1(A1⁻¹ + εZ1Z2⋆) − I‖_F`.
    pub fn smw_residual(&self, original: &PalindromicSystem) -> Result<f64> {
        let class = original.class();
        let inv = inverse(original.a1())? + &self.z1 * class.adj(&self.z2) * class.eps_c();
        Ok(fro(&(self.system.a1() * inv - eye(original.n()))))
    }

    /// `‖X̃1S̃1X̃1⋆ − X1S1X1⋆‖_F / ‖X1S1X1⋆‖_F`.
    pub fn gram_residual(&self, x1: &CMatrix, class: SymmetryClass) -> f64 {
        let old = x1 * &self.s1 * class.adj(x1);
        let new = &self.x1_new * &self.s1_new * class.adj(&self.x1_new);
        fro(&(new - &old)) / fro(&old).max(f64::MIN_POSITIVE)
    }

    pub fn new_pair_residual(&self) -> Result<f64> {
        self.system.pair_residual(&self.x1_new, &self.t1_new)
    }
}

/// Free-eigenvector mode: sample `S̃1`, then choose `X̃1` so that the Gram condition holds.
pub fn update_model(problem: &MupProblem) -> Result<MupSolution> {
    if problem.x1_new.is_some() {
        return update_model_prescribed(problem);
    }
    let sys = &problem.system;
    let class = sys.class();
    let s1 = compute_s1(sys, &problem.x1, &problem.t1)?;
    let gram = &problem.x1 * &s1 * class.adj(&problem.x1);
    let fac = star_factorize(&gram, class)?;
    let basis = s_basis(&problem.t1_new, class);
    if basis.dim() == 0 {
        return Err(Error::Infeasible("no nonzero parameter matrix for the replacement eigenvalues".into()));
    }
    let mut r = rng(problem.seed);
    let attempts = problem.attempts.max(1);
    let mut infeasible = None;
    let mut singular = 0usize;
    for attempt in 1..=attempts {
        let s1_new = sample_nonsingular_with(&basis, &mut r, SAMPLE_DRAWS)?;
        let fac_new = star_factorize(&s1_new, class)?;
        let psi = match solve_psi_with(&fac.delta, &fac_new.delta, 1.0, &mut r, attempt > 1, attempts) {
            Ok(p) => p,
            Err(e @ Error::Infeasible(_)) => {
                infeasible = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        let x1_new = &fac.y * psi * inverse(&fac_new.y)?;
        match apply_update(sys, &problem.x1, &problem.t1, &s1, &x1_new, &problem.t1_new, &s1_new)? {
            Some(core) => {
                return Ok(MupSolution {
                    system: core.system,
                    x1_new,
                    t1_new: problem.t1_new.clone(),
                    s1,
                    s1_new,
                    z1: core.z1,
                    z2: core.z2,
                    rank: core.rank,
                    attempts: attempt,
                    xi_rcond: core.xi_rcond,
                })
            }
            None => singular += 1,
        }
    }
    match infeasible {
        Some(e) if singular == 0 => Err(e),
        _ => Err(Error::XiSingularRetryExhausted(attempts)),
    }
}

/// Prescribed-eigenvector mode: `S̃1` solves `X̃1S̃1X̃1⋆ = X1S1X1⋆` within `𝕊_T̃1`.
pub fn update_model_prescribed(problem: &MupProblem) -> Result<MupSolution> {
    let Some(x1_new) = problem.x1_new.as_ref() else {
        return update_model(problem);
    };
    let sys = &problem.system;
    let class = sys.class();
    let s1 = compute_s1(sys, &problem.x1, &problem.t1)?;
    let gram = &problem.x1 * &s1 * class.adj(&problem.x1);
    let basis = s_basis(&problem.t1_new, class);
    let family = solve_constrained_s(&basis, x1_new, &gram)?;
    let mut r = rng(problem.seed);
    let attempts = problem.attempts.max(1);
    for attempt in 1..=attempts {
        let s1_new = family.sample_nonsingular_with(&mut r, SAMPLE_DRAWS)?;
        if let Some(core) = apply_update(sys, &problem.x1, &problem.t1, &s1, x1_new, &problem.t1_new, &s1_new)? {
            return Ok(MupSolution {
                system: core.system,
                x1_new: x1_new.clone(),
                t1_new: problem.t1_new.clone(),
                s1,
                s1_new,
                z1: core.z1,
                z2: core.z2,
                rank: core.rank,
                attempts: attempt,
                xi_rcond: core.xi_rcond,
            });
        }
        if family.homogeneous.dim() == 0 {
            break;
        }
    }
    Err(Error::XiSingularRetryExhausted(attempts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::reference_update;
    use crate::forward::{nearest_distance, select_pairs, DEFAULT_TARGET_TOL};
    use crate::numerics::{cr, from_real_rows};
    use crate::spectral::parameter_from_pair;
    use crate::system::StandardPair;

    #[test]
    fn scalar_s1() {
        let sys =
            PalindromicSystem::new(SymmetryClass::T_ANTI, from_real_rows(&[&[1.0]]), from_real_rows(&[&[0.0]])).unwrap();
        let x = from_real_rows(&[&[1.0, 1.0]]);
        let t = diag(&[cr(1.0), cr(-1.0)]);
        let s1 = compute_s1(&sys, &x, &t).unwrap();
        assert!(fro(&(&s1 - diag(&[cr(-0.5), cr(0.5)]))) < 1e-15);
        let full = parameter_from_pair(&sys, &StandardPair::full(x, t).unwrap()).unwrap();
        assert!(fro(&(s1 - full)) < 1e-14);
    }

    #[test]
    fn s1_matches_leading_block_of_full_parameter() {
        for class in SymmetryClass::ALL {
            let case = reference_update(class);
            let eigs = eig_full(&case.system).unwrap();
            let sel = select_pairs(&eigs, &case.replace, DEFAULT_TARGET_TOL).unwrap();
            let order: Vec<usize> = sel.selected.iter().chain(&sel.remaining).copied().collect();
            let x = eigs.vectors.select_columns(&order);
            let t = diag(&order.iter().map(|&k| eigs.values[k]).collect::<Vec<_>>());
            let full = parameter_from_pair(&case.system, &StandardPair::full(x, t).unwrap()).unwrap();
            let s1 = compute_s1(&case.system, &sel.x1, &sel.t1).unwrap();
            let lead = full.view((0, 0), (2, 2)).into_owned();
            assert!(fro(&(&s1 - lead)) <= 1e-9 * fro(&s1), "{class}");
            let fix = fro(&(&s1 - &sel.t1 * &s1 * class.adj(&sel.t1)));
            assert!(fix <= 1e-9 * fro(&s1), "{class}");
        }
    }

    #[test]
    fn no_op_update_is_exact() {
        let case = reference_update(SymmetryClass::T_PAL);
        let eigs = eig_full(&case.system).unwrap();
        let sel = select_pairs(&eigs, &case.replace, DEFAULT_TARGET_TOL).unwrap();
        let s1 = compute_s1(&case.system, &sel.x1, &sel.t1).unwrap();
        let core = apply_update(&case.system, &sel.x1, &sel.t1, &s1, &sel.x1, &sel.t1, &s1).unwrap().unwrap();
        assert_eq!(core.rank, 0);
        assert_eq!(core.system.a1(), case.system.a1());
        assert_eq!(core.system.a0(), case.system.a0());
    }

    #[test]
    fn reference_updates_all_classes() {
        for class in SymmetryClass::ALL {
            let case = reference_update(class);
            let eigs = eig_full(&case.system).unwrap();
            let sel = select_pairs(&eigs, &case.replace, DEFAULT_TARGET_TOL).unwrap();
            let problem = MupProblem::from_selection(case.system.clone(), &sel, &case.with, 5).unwrap();
            let sol = update_model(&problem).unwrap();
            assert!(sol.system.relative_symmetry_defect() <= 1e-10, "{class}");
            assert!(sol.new_pair_residual().unwrap() <= 1e-9, "{class}");
            assert!(sol.system.pair_residual(&sel.x2, &sel.t2).unwrap() <= 1e-9, "{class}");
            assert!(sol.gram_residual(&sel.x1, class) <= 1e-9, "{class}");
            assert!(sol.smw_residual(&case.system).unwrap() <= 1e-10, "{class}");
            let updated = eig_full(&sol.system).unwrap().values;
            for k in &sel.remaining {
                assert!(nearest_distance(eigs.values[*k], &updated) <= 1e-6, "{class}");
            }
            for v in case.with {
                assert!(nearest_distance(v, &updated) <= 1e-6, "{class}");
            }
        }
    }

    #[test]
    fn prescribed_reproduces_free_run() {
        let class = SymmetryClass::H_PAL;
        let case = reference_update(class);
        let eigs = eig_full(&case.system).unwrap();
        let sel = select_pairs(&eigs, &case.replace, DEFAULT_TARGET_TOL).unwrap();
        let free = update_model(&MupProblem::from_selection(case.system.clone(), &sel, &case.with, 1).unwrap()).unwrap();
        let problem = MupProblem::new(
            case.system.clone(),
            sel.x1.clone(),
            sel.t1.clone(),
            diag(&case.with),
            Some(free.x1_new.clone()),
            2,
        )
        .unwrap();
        let sol = update_model_prescribed(&problem).unwrap();
        assert!(sol.new_pair_residual().unwrap() <= 1e-9);
        assert!(sol.gram_residual(&sel.x1, class) <= 1e-9);
        let a = eig_full(&sol.system).unwrap().values;
        let b = eig_full(&free.system).unwrap().values;
        for v in &b {
            assert!(nearest_distance(*v, &a) <= 1e-6);
        }
    }

    #[test]
    fn prescribed_inconsistent() {
        let class = SymmetryClass::T_ANTI;
        let case = reference_update(class);
        let eigs = eig_full(&case.system).unwrap();
        let sel = select_pairs(&eigs, &case.replace, DEFAULT_TARGET_TOL).unwrap();
        // Collinear columns cannot carry a rank-2 Gram matrix.
        let col = sel.x1.columns(0, 1).into_owned();
        let bad = crate::numerics::hstack(&[&col, &col]);
        let problem =
            MupProblem::new(case.system.clone(), sel.x1.clone(), sel.t1.clone(), diag(&case.with), Some(bad), 0)
                .unwrap();
        assert!(matches!(update_model_prescribed(&problem), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn rejects_conflicting_replacement() {
        let case = reference_update(SymmetryClass::T_ANTI);
        let eigs = eig_full(&case.system).unwrap();
        let sel = select_pairs(&eigs, &case.replace, DEFAULT_TARGET_TOL).unwrap();
        let kept = sel.t2[(0, 0)];
        let err = MupProblem::from_selection(case.system.clone(), &sel, &[kept, SymmetryClass::T_ANTI.partner(kept)], 0);
        assert!(matches!(err, Err(Error::RemainingEigenvalueConflict(_))));
    }
}
