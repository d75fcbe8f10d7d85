//! Constructing systems with prescribed eigenpairs.
//!
//! For a full pair the parameter matrix is sampled directly from 𝕊_(X,T).
//! For a partial pair `(X1, T1)` the missing eigenpairs are completed as
//! `X = [X1, YΨ]`, `T = diag(T1, T̂2)`, `S = diag(S1, Ω)` where `X1S1X1⋆ = YΔY⋆`
//! and `ΨΩΨ⋆ = −Δ`, which makes `XSX⋆` vanish.

use rand::Rng;

use crate::error::{Error, Result};
use crate::forward::pair_spectrum;
use crate::numerics::{
    block_diag, cr, dense_eig, diag, hstack, inverse, numerical_rank, orthonormalize, vstack,
    CMatrix, Star, C64, I,
};
use crate::paramspace::{s_basis, s_basis_pair, sample_nonsingular_with, CLUSTER_TOL};
use crate::random::{random_cmatrix, random_modulus, random_real_cmatrix, rng};
use crate::spectral::coefficients_from_pair;
use crate::structfact::{inertia, sqrt_neg_eps, star_factorize, DeltaKind, DeltaPattern};
use crate::system::{PalindromicSystem, StandardPair, SymmetryClass};

pub const DEFAULT_ATTEMPTS: usize = 20;
/// Draws per attempt when searching for a nonsingular parameter matrix.
pub const SAMPLE_DRAWS: usize = 25;
/// Full column rank threshold for `[X1; −X1T1⁻¹]`.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct IepOptions {
    pub seed: u64,
    /// The `2n − k` eigenvalues to complete the spectrum with.
    pub remaining: Option<Vec<C64>>,
    pub attempts: usize,
    /// Use seeded random isometries in the Ψ construction from the first attempt on.
    pub random_isometry: bool,
}

impl Default for IepOptions {
    fn default() -> Self {
        Self { seed: 0, remaining: None, attempts: DEFAULT_ATTEMPTS, random_isometry: false }
    }
}

#[derive(Clone, Debug)]
pub struct IepProblem {
    pub class: SymmetryClass,
    pub n: usize,
    pub x1: CMatrix,
    pub t1: CMatrix,
    pub options: IepOptions,
}

impl IepProblem {
    pub fn new(class: SymmetryClass, x1: CMatrix, t1: CMatrix, options: IepOptions) -> Result<Self> {
        let n = x1.nrows();
        let k = x1.ncols();
        if n == 0 || k == 0 || t1.shape() != (k, k) {
            return Err(Error::DimensionMismatch(format!(
                "X1 is {}x{}, T1 is {}x{}",
                n,
                k,
                t1.nrows(),
                t1.ncols()
            )));
        }
        if k > 2 * n {
            return Err(Error::DimensionMismatch(format!("k = {k} exceeds 2n = {}", 2 * n)));
        }
        let pair = StandardPair::partial(x1.clone(), t1.clone())?;
        let w = pair.w()?;
        let rank = numerical_rank(&w, RANK_TOL);
        if rank < k {
            return Err(Error::RankDeficient(format!("[X1; -X1 T1^-1] has rank {rank} < k = {k}")));
        }
        let (values, _) = dense_eig(&t1)?;
        let (_, _, unmatched, _) = pair_spectrum(&values, class, CLUSTER_TOL);
        if let Some(&i) = unmatched.first() {
            return Err(Error::PairingNotClosed(values[i]));
        }
        Ok(Self { class, n, x1, t1, options })
    }

    pub fn k(&self) -> usize {
        self.x1.ncols()
    }
}

/// A constructed system with the spectral data it was built from.
#[derive(Clone, Debug)]
pub struct IepSolution {
    pub system: PalindromicSystem,
    pub x: CMatrix,
    pub t: CMatrix,
    pub s: CMatrix,
    pub attempts: usize,
}

/// Construction for a full pair: sample a nonsingular `S ∈ 𝕊_(X,T)`.
pub fn solve_iep_full(x: &CMatrix, t: &CMatrix, class: SymmetryClass, seed: u64) -> Result<PalindromicSystem> {
    solve_iep_full_detailed(x, t, class, seed, DEFAULT_ATTEMPTS).map(|s| s.system)
}

pub fn solve_iep_full_detailed(
    x: &CMatrix,
    t: &CMatrix,
    class: SymmetryClass,
    seed: u64,
    attempts: usize,
) -> Result<IepSolution> {
    let pair = StandardPair::full(x.clone(), t.clone())?;
    let basis = s_basis_pair(&pair.x, &pair.t, class);
    if basis.dim() == 0 {
        return Err(Error::NoSolution("the only admissible parameter matrix is S = 0".into()));
    }
    let mut r = rng(seed);
    for attempt in 1..=attempts.max(1) {
        let s = sample_nonsingular_with(&basis, &mut r, SAMPLE_DRAWS)
            .map_err(|_| Error::NoSolution(format!("no nonsingular S in a {}-dimensional space", basis.dim())))?;
        match coefficients_from_pair(&pair.x, &pair.t, &s, class) {
            Ok(system) => return Ok(IepSolution { system, x: pair.x, t: pair.t, s, attempts: attempt }),
            Err(Error::SingularLeadingBlock) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoSolution("leading block stayed singular".into()))
}

/// Partial construction for `k < 2n`; `k = 2n` falls back to [`solve_iep_full`].
pub fn solve_iep_partial(problem: &IepProblem) -> Result<PalindromicSystem> {
    solve_iep_partial_detailed(problem).map(|s| s.system)
}

pub fn solve_iep_partial_detailed(problem: &IepProblem) -> Result<IepSolution> {
    let class = problem.class;
    let n = problem.n;
    let k = problem.k();
    let opts = &problem.options;
    if k == 2 * n {
        return solve_iep_full_detailed(&problem.x1, &problem.t1, class, opts.seed, opts.attempts);
    }
    let m = 2 * n - k;
    if class == SymmetryClass::T_PAL && m % 2 == 1 {
        return Err(Error::Infeasible(format!("parity: 2n-k = {m} is odd for a T-palindromic system")));
    }
    let t1_values = dense_eig(&problem.t1)?.0;
    if let Some(rem) = &opts.remaining {
        validate_remaining(rem, m, &t1_values, class)?;
    }
    let basis1 = s_basis(&problem.t1, class);
    if basis1.dim() == 0 {
        return Err(Error::Infeasible("no nonzero S1 satisfies the constraints for T1".into()));
    }
    let mut r = rng(opts.seed);
    let mut last_err = None;
    for attempt in 1..=opts.attempts.max(1) {
        let s1 = sample_nonsingular_with(&basis1, &mut r, SAMPLE_DRAWS)
            .map_err(|_| Error::Infeasible("no nonsingular S1 found for T1".into()))?;
        let omega = omega_pattern(class, n, &s1, m)?;
        let fac = star_factorize(&(&problem.x1 * &s1 * class.adj(&problem.x1)), class)?;
        let t2 = match complete_spectrum(class, &omega, &t1_values, opts.remaining.as_deref(), &mut r)? {
            Some(t2) => t2,
            None => return Err(Error::Infeasible("could not realise the required inertia".into())),
        };
        let randomize = opts.random_isometry || attempt > 1;
        let psi = match solve_psi_with(&fac.delta, &omega, -1.0, &mut r, randomize, opts.attempts) {
            Ok(p) => p,
            Err(e @ Error::Infeasible(_)) => return Err(e),
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let x = hstack(&[&problem.x1, &(&fac.y * &psi)]);
        let t = block_diag(&[&problem.t1, &t2]);
        let s = block_diag(&[&s1, &omega.matrix()]);
        match coefficients_from_pair(&x, &t, &s, class) {
            Ok(system) => return Ok(IepSolution { system, x, t, s, attempts: attempt }),
            Err(e @ (Error::SingularLeadingBlock | Error::SingularA1(_) | Error::NotAdmissible(_))) => {
                log::debug!("attempt {attempt} failed: {e}");
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    log::debug!("last failure: {last_err:?}");
    Err(Error::NonsingularityRetryExhausted(opts.attempts.max(1)))
}

/// `Ω = Δ_{n−p,n−q}` for ⋆=∗ or `Δ_{2n−k}` for ⋆=⊤.
fn omega_pattern(class: SymmetryClass, n: usize, s1: &CMatrix, m: usize) -> Result<DeltaPattern> {
    match class.star {
        Star::Conjugate => {
            let (p, q, _) = inertia(&(s1 * sqrt_neg_eps(class)))?;
            if p > n || q > n {
                return Err(Error::Infeasible(format!(
                    "inertia: S1 has inertia ({p}, {q}) but the order is {n}"
                )));
            }
            DeltaPattern::new(class, n - p, n - q, 0, m)
        }
        Star::Transpose => DeltaPattern::new(class, 0, 0, m, m),
    }
}

fn coincides(a: C64, b: C64) -> bool {
    (a - b).norm() <= CLUSTER_TOL * a.norm().max(1.0)
}

fn validate_remaining(rem: &[C64], m: usize, t1_values: &[C64], class: SymmetryClass) -> Result<()> {
    if rem.len() != m {
        return Err(Error::DimensionMismatch(format!("expected {m} remaining eigenvalues, got {}", rem.len())));
    }
    for &v in rem {
        if v.norm() == 0.0 {
            return Err(Error::ZeroLambda);
        }
        if t1_values.iter().any(|&t| coincides(v, t)) {
            return Err(Error::RemainingEigenvalueConflict(format!("{v} is already an eigenvalue of T1")));
        }
    }
    let (_, _, unmatched, _) = pair_spectrum(rem, class, CLUSTER_TOL);
    if let Some(&i) = unmatched.first() {
        return Err(Error::PairingNotClosed(rem[i]));
    }
    Ok(())
}

/// Build `T̂2` with `T̂2ΩT̂2⋆ = Ω` and the requested (or random) spectrum.
///
/// A structured `S2 ∈ 𝕊_Λ2` is factored as `GΩG⋆`; then `T̂2 = G⁻¹Λ2G`.
fn complete_spectrum<R: Rng>(
    class: SymmetryClass,
    omega: &DeltaPattern,
    t1_values: &[C64],
    remaining: Option<&[C64]>,
    r: &mut R,
) -> Result<Option<CMatrix>> {
    let m = omega.size;
    if m == 0 {
        return Ok(Some(CMatrix::zeros(0, 0)));
    }
    let (pairs, singles) = match remaining {
        Some(rem) => {
            let (pairs, singles, _, _) = pair_spectrum(rem, class, CLUSTER_TOL);
            (
                pairs.iter().map(|&(a, _)| rem[a]).collect::<Vec<_>>(),
                singles.iter().map(|&a| rem[a]).collect::<Vec<_>>(),
            )
        }
        None => default_remaining(class, omega, t1_values, r)?,
    };
    let mut values = Vec::with_capacity(m);
    let mut blocks: Vec<CMatrix> = Vec::new();
    let eps = class.eps_c();
    for &lam in &pairs {
        values.push(lam);
        values.push(class.partner(lam));
        let mut b = CMatrix::zeros(2, 2);
        b[(0, 1)] = cr(1.0);
        b[(1, 0)] = -eps;
        blocks.push(b);
    }
    match (class.star, class.epsilon) {
        (Star::Conjugate, _) => {
            let (p_om, q_om) = omega.inertia().expect("hermitian pattern");
            let l2 = pairs.len();
            if p_om < l2 || q_om < l2 || p_om + q_om != 2 * l2 + singles.len() {
                return Err(Error::Infeasible(format!(
                    "inertia: the remaining spectrum cannot realise ({p_om}, {q_om})"
                )));
            }
            // √(−ε)s = +1 for the first p_om − l2 singles, −1 for the rest.
            let root = sqrt_neg_eps(class);
            for (idx, &lam) in singles.iter().enumerate() {
                let sign = if idx < p_om - l2 { 1.0 } else { -1.0 };
                values.push(lam);
                blocks.push(diag(&[cr(sign) / root]));
            }
        }
        (Star::Transpose, -1) => {
            for &lam in &singles {
                values.push(lam);
                blocks.push(diag(&[cr(1.0)]));
            }
        }
        _ => {
            // ±1 must come in even multiplicity, arranged as symplectic 2×2 blocks.
            for target in [cr(1.0), cr(-1.0)] {
                let count = singles.iter().filter(|&&v| coincides(v, target)).count();
                if count % 2 == 1 {
                    return Err(Error::Infeasible(format!(
                        "parity: {target} must have even multiplicity for a T-palindromic system"
                    )));
                }
                for _ in 0..count / 2 {
                    values.push(target);
                    values.push(target);
                    let mut b = CMatrix::zeros(2, 2);
                    b[(0, 1)] = cr(1.0);
                    b[(1, 0)] = cr(-1.0);
                    blocks.push(b);
                }
            }
        }
    }
    let s2 = block_diag(&blocks.iter().collect::<Vec<_>>());
    let lambda2 = diag(&values);
    let fac = star_factorize(&s2, class)?;
    if fac.delta != *omega {
        return Ok(None);
    }
    let g = &fac.y;
    Ok(Some(inverse(g)? * lambda2 * g))
}

type Remaining = (Vec<C64>, Vec<C64>);

fn default_remaining<R: Rng>(
    class: SymmetryClass,
    omega: &DeltaPattern,
    t1_values: &[C64],
    r: &mut R,
) -> Result<Remaining> {
    let m = omega.size;
    let (n_pairs, n_singles) = match class.star {
        Star::Conjugate => {
            let (p, q) = omega.inertia().expect("hermitian pattern");
            (p.min(q), p.abs_diff(q))
        }
        Star::Transpose => (m / 2, m % 2),
    };
    let clear = |v: C64, taken: &[C64]| !t1_values.iter().chain(taken).any(|&t| (v - t).norm() < 1e-3);
    let mut taken: Vec<C64> = Vec::new();
    let mut pairs = Vec::with_capacity(n_pairs);
    while pairs.len() < n_pairs {
        let v = random_modulus(r, 0.3, 0.7);
        if clear(v, &taken) && clear(class.partner(v), &taken) {
            taken.push(v);
            taken.push(class.partner(v));
            pairs.push(v);
        }
    }
    let mut singles = Vec::with_capacity(n_singles);
    match class.star {
        Star::Conjugate => {
            while singles.len() < n_singles {
                let v = random_modulus(r, 1.0, 1.0);
                if clear(v, &taken) {
                    taken.push(v);
                    singles.push(v);
                }
            }
        }
        Star::Transpose => {
            if n_singles == 1 {
                let v = [cr(1.0), cr(-1.0)]
                    .into_iter()
                    .find(|&v| clear(v, &taken))
                    .ok_or_else(|| Error::RemainingEigenvalueConflict("both 1 and -1 are taken by T1".into()))?;
                singles.push(v);
            }
        }
    }
    Ok((pairs, singles))
}

/// `Ψ` with `ΨΩΨ⋆ = −Δ` for the construction above.
pub fn solve_psi(delta: &DeltaPattern, omega: &DeltaPattern, seed: u64) -> Result<CMatrix> {
    solve_psi_with(delta, omega, -1.0, &mut rng(seed), false, DEFAULT_ATTEMPTS)
}

/// `Ψ` (rows = `delta.size`, cols = `omega.size`) with `ΨΩΨ⋆ = sign·Δ`.
///
/// A random `B` is normalised to `B̂ = Y_B⁻¹B` so that `B̂ΩB̂⋆ = Δ_B` is canonical,
/// then rows of `B̂` are picked (or mixed by an isometry) to hit `sign·Δ`.
pub fn solve_psi_with<R: Rng>(
    delta: &DeltaPattern,
    omega: &DeltaPattern,
    sign: f64,
    r: &mut R,
    random_isometry: bool,
    attempts: usize,
) -> Result<CMatrix> {
    let class = omega.class;
    let cols = omega.size;
    let om = omega.matrix();
    check_psi_feasible(delta, omega, sign)?;
    for _ in 0..attempts.max(1) {
        let b = random_cmatrix(r, cols, cols);
        let g = &b * &om * class.adj(&b);
        let Ok(fac) = star_factorize(&g, class) else { continue };
        if fac.rank() != omega.rank() {
            continue;
        }
        let Ok(yinv) = inverse(&fac.y) else { continue };
        let bhat = yinv * b;
        let sel = selection(delta, &fac.delta, sign, r, random_isometry)?;
        return Ok(sel * bhat);
    }
    Err(Error::RetryExhausted)
}

fn check_psi_feasible(delta: &DeltaPattern, omega: &DeltaPattern, sign: f64) -> Result<()> {
    match (delta.kind, omega.kind) {
        (DeltaKind::HermitianInertia { p, q }, DeltaKind::HermitianInertia { p: po, q: qo }) => {
            let (need_pos, need_neg) = if sign < 0.0 { (q, p) } else { (p, q) };
            if po < need_pos || qo < need_neg {
                return Err(Error::Infeasible(format!(
                    "inertia: cannot map ({po}, {qo}) onto {}({p}, {q})",
                    if sign < 0.0 { "-" } else { "+" }
                )));
            }
        }
        (DeltaKind::SkewSymplectic { t }, DeltaKind::SkewSymplectic { t: to })
        | (DeltaKind::SymmetricIdentity { t }, DeltaKind::SymmetricIdentity { t: to }) => {
            if to < t {
                return Err(Error::Infeasible(format!("rank: cannot map rank {to} onto rank {t}")));
            }
        }
        _ => return Err(Error::Infeasible("mismatched symmetry patterns".into())),
    }
    Ok(())
}

/// Row-orthonormal `rows × cols` matrix; real unless `complex`.
fn coisometry<R: Rng>(r: &mut R, rows: usize, cols: usize, random: bool, complex: bool) -> CMatrix {
    if rows == 0 || !random {
        return CMatrix::identity(rows, cols);
    }
    let g = if complex { random_cmatrix(r, cols, rows) } else { random_real_cmatrix(r, cols, rows) };
    orthonormalize(&g).transpose()
}

/// `M` with `M Δ_B M⋆ = sign·Δ`, both patterns canonical.
fn selection<R: Rng>(
    delta: &DeltaPattern,
    delta_b: &DeltaPattern,
    sign: f64,
    r: &mut R,
    random: bool,
) -> Result<CMatrix> {
    let n = delta.size;
    let cols = delta_b.size;
    let mut m = CMatrix::zeros(n, cols);
    match (delta.kind, delta_b.kind) {
        (DeltaKind::HermitianInertia { .. }, DeltaKind::HermitianInertia { .. }) => {
            let d = delta.matrix();
            let db = delta_b.matrix();
            let targets: Vec<C64> = (0..n).map(|i| d[(i, i)] * sign).collect();
            let sources: Vec<C64> = (0..cols).map(|j| db[(j, j)]).collect();
            let mut distinct: Vec<C64> = Vec::new();
            for &v in targets.iter().filter(|v| v.norm() > 0.5) {
                if !distinct.iter().any(|&u| (u - v).norm() < 1e-12) {
                    distinct.push(v);
                }
            }
            for v in distinct {
                let rows: Vec<usize> = (0..n).filter(|&i| (targets[i] - v).norm() < 1e-12).collect();
                let src: Vec<usize> = (0..cols).filter(|&j| (sources[j] - v).norm() < 1e-12).collect();
                if src.len() < rows.len() {
                    return Err(Error::Infeasible("inertia: not enough matching directions".into()));
                }
                let theta = coisometry(r, rows.len(), src.len(), random, true);
                for (a, &i) in rows.iter().enumerate() {
                    for (b, &j) in src.iter().enumerate() {
                        m[(i, j)] = theta[(a, b)];
                    }
                }
            }
        }
        (DeltaKind::SymmetricIdentity { t }, DeltaKind::SymmetricIdentity { t: tb }) => {
            let factor = if sign < 0.0 { I } else { cr(1.0) };
            let theta = coisometry(r, t, tb, random, false);
            m.view_mut((0, 0), (t, tb)).copy_from(&(theta * factor));
        }
        (DeltaKind::SkewSymplectic { t }, DeltaKind::SkewSymplectic { t: tb }) => {
            let (h, hb) = (t / 2, tb / 2);
            let theta = coisometry(r, h, hb, random, false);
            let (first, second) = if sign < 0.0 { (hb, 0) } else { (0, hb) };
            m.view_mut((0, first), (h, hb)).copy_from(&theta);
            m.view_mut((h, second), (h, hb)).copy_from(&theta);
        }
        _ => return Err(Error::Infeasible("mismatched symmetry patterns".into())),
    }
    Ok(m)
}

/// Convenience: a seeded `IepProblem` solved in one call.
pub fn solve(class: SymmetryClass, x1: &CMatrix, t1: &CMatrix, seed: u64) -> Result<IepSolution> {
    let problem = IepProblem::new(class, x1.clone(), t1.clone(), IepOptions { seed, ..IepOptions::default() })?;
    solve_iep_partial_detailed(&problem)
}

/// Stack `[X; −XT⁻¹]`, the matrix whose column rank the problem statement constrains.
pub fn stacked(x: &CMatrix, t: &CMatrix) -> Result<CMatrix> {
    Ok(vstack(&[x, &(-(x * inverse(t)?))]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::reference_pairs;
    use crate::forward::{eig_full, nearest_distance};
    use crate::numerics::{c, fro, from_real_rows};
    use crate::spectral::membership_defects;

    #[test]
    fn scalar_full_pair() {
        let x = from_real_rows(&[&[1.0, 1.0]]);
        let t = diag(&[cr(1.0), cr(-1.0)]);
        let sys = solve_iep_full(&x, &t, SymmetryClass::T_ANTI, 3).unwrap();
        // Proportional to λ² − 1: A0 = 0 and the pair is exact.
        assert!(sys.a0()[(0, 0)].norm() < 1e-12 * sys.a1()[(0, 0)].norm());
        assert!(sys.pair_residual(&x, &t).unwrap() < 1e-14);
    }

    #[test]
    fn simple_unit_eigenvalue_has_no_t_palindromic_solution() {
        let x = from_real_rows(&[&[1.0, 1.0]]);
        let t = diag(&[cr(1.0), cr(-1.0)]);
        assert!(matches!(solve_iep_full(&x, &t, SymmetryClass::T_PAL, 0), Err(Error::NoSolution(_))));
    }

    #[test]
    fn psi_examples() {
        let sk = DeltaPattern::new(SymmetryClass::T_PAL, 0, 0, 2, 2).unwrap();
        let psi = solve_psi(&sk, &sk, 1).unwrap();
        let res = &psi * sk.matrix() * psi.transpose() + sk.matrix();
        assert!(fro(&res) < 1e-10 * fro(&sk.matrix()));

        let h = DeltaPattern::new(SymmetryClass::H_PAL, 1, 1, 0, 2).unwrap();
        let psi = solve_psi(&h, &h, 2).unwrap();
        let res = &psi * h.matrix() * psi.adjoint() + h.matrix();
        assert!(fro(&res) < 1e-10 * fro(&h.matrix()));

        let d = DeltaPattern::new(SymmetryClass::T_ANTI, 0, 0, 1, 1).unwrap();
        let om = DeltaPattern::new(SymmetryClass::T_ANTI, 0, 0, 2, 2).unwrap();
        let psi = solve_psi(&d, &om, 4).unwrap();
        assert_eq!(psi.shape(), (1, 2));
        let res = &psi * om.matrix() * psi.transpose() + d.matrix();
        assert!(fro(&res) < 1e-10);
    }

    #[test]
    fn psi_inertia_infeasible() {
        let d = DeltaPattern::new(SymmetryClass::H_ANTI, 2, 0, 0, 2).unwrap();
        let om = DeltaPattern::new(SymmetryClass::H_ANTI, 2, 0, 0, 2).unwrap();
        assert!(matches!(solve_psi(&d, &om, 0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn reference_pairs_all_classes() {
        for class in SymmetryClass::ALL {
            let (x, t) = reference_pairs(class);
            let sol = solve(class, &x, &t, 7).unwrap();
            let sys = &sol.system;
            assert!(sys.pair_residual(&x, &t).unwrap() < 1e-10, "{class}");
            assert!(sys.relative_symmetry_defect() < 1e-11, "{class}");
            let d = membership_defects(&sol.x, &sol.t, &sol.s, class);
            assert!(d.max() < 1e-9, "{class} {d:?}");
            let e = eig_full(sys).unwrap();
            for k in 0..4 {
                assert!(nearest_distance(t[(k, k)], &e.values) < 1e-6, "{class}");
            }
        }
    }

    #[test]
    fn parity_is_reported() {
        let x = from_real_rows(&[&[1.0], &[0.5]]);
        let t = diag(&[cr(1.0)]);
        let err = solve(SymmetryClass::T_PAL, &x, &t, 0).unwrap_err();
        assert!(err.to_string().contains("parity"), "{err}");
    }

    #[test]
    fn remaining_conflict_detected() {
        let class = SymmetryClass::T_ANTI;
        let x = from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let a = c(0.5, 0.2);
        let t = diag(&[a, class.partner(a)]);
        let opts = IepOptions { remaining: Some(vec![a, class.partner(a)]), ..IepOptions::default() };
        let problem = IepProblem::new(class, x, t, opts).unwrap();
        assert!(matches!(solve_iep_partial(&problem), Err(Error::RemainingEigenvalueConflict(_))));
    }

    #[test]
    fn seeds_are_deterministic() {
        let (x, t) = reference_pairs(SymmetryClass::H_ANTI);
        let a = solve(SymmetryClass::H_ANTI, &x, &t, 99).unwrap();
        let b = solve(SymmetryClass::H_ANTI, &x, &t, 99).unwrap();
        assert_eq!(a.system, b.system);
    }
}
