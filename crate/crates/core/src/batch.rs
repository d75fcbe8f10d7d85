//! Seeded batch drivers for the randomized suites.
//!
//! Each case depends only on its own seed, so cases run independently. With the `parallel`
//! feature they are spread over the rayon pool; otherwise they run in order on one thread.
//! Results always come back in seed order.

use crate::error::{Error, Result};
use crate::forward::{eig_full, nearest_distance, select_pairs, DEFAULT_TARGET_TOL};
use crate::mup::{update_model, MupProblem};
use crate::numerics::{diag, fro, hermitian_eig, rcond, CMatrix, C64};
use crate::random::{derive_seed, random_cmatrix, random_modulus, rng, SeededRng};
use crate::spectral::{coefficients_from_pair, parameter_from_pair};
use crate::structfact::{sqrt_neg_eps, star_factorize, DeltaKind};
use crate::system::{PalindromicSystem, StandardPair, SymmetryClass};
use rand::Rng;

/// Cases whose linearized eigenvector matrix is worse conditioned than this are skipped.
pub const PENCIL_COND_LIMIT: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    /// Uses rayon when the `parallel` feature is on; sequential otherwise.
    Parallel,
}

impl Mode {
    pub fn default_for_build() -> Self {
        if cfg!(feature = "parallel") {
            Mode::Parallel
        } else {
            Mode::Sequential
        }
    }
}

pub fn map_seeds<T, F>(seeds: &[u64], mode: Mode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match mode {
        Mode::Sequential => seeds.iter().map(|&s| f(s)).collect(),
        Mode::Parallel => par_map(seeds, f),
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, F>(seeds: &[u64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    seeds.par_iter().map(|&s| f(s)).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, F>(seeds: &[u64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    seeds.iter().map(|&s| f(s)).collect()
}

/// Seeds `derive_seed(base, 0..count)`.
pub fn seeds(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|k| derive_seed(base, k)).collect()
}

/// Outcome of forward solve → parameter matrix → coefficients on one random system.
#[derive(Clone, Debug)]
pub struct RoundTripCase {
    pub class: SymmetryClass,
    pub n: usize,
    pub real: bool,
    pub pencil_cond: f64,
    /// `‖(Â1 − A1, Â0 − A0)‖_F / ‖(A1, A0)‖_F`.
    pub rel_error: f64,
    pub pairing_complete: bool,
    pub max_pair_error: f64,
    /// Worst distance from an eigenvalue's conjugate to the spectrum, for real coefficients.
    pub conjugate_closure: Option<f64>,
}

impl RoundTripCase {
    pub fn accepted(&self) -> bool {
        self.pencil_cond < PENCIL_COND_LIMIT
    }
}

/// Condition number of `W = [X; −XΛ⁻¹]` with unit columns.
pub fn pencil_condition(x: &CMatrix, t: &CMatrix) -> Result<f64> {
    let mut w = StandardPair::full(x.clone(), t.clone())?.w()?;
    for mut col in w.column_iter_mut() {
        let nc = col.norm();
        if nc > 0.0 {
            col /= C64::new(nc, 0.0);
        }
    }
    let rc = rcond(&w);
    Ok(if rc > 0.0 { 1.0 / rc } else { f64::INFINITY })
}

pub fn round_trip_case(class: SymmetryClass, n: usize, real: bool, seed: u64) -> Result<RoundTripCase> {
    let mut r = rng(seed);
    let sys = PalindromicSystem::random(class, n, real, &mut r);
    let eigs = eig_full(&sys)?;
    let t = diag(&eigs.values);
    let pencil_cond = pencil_condition(&eigs.vectors, &t)?;
    let conjugate_closure = real.then(|| {
        eigs.values
            .iter()
            .map(|v| nearest_distance(v.conj(), &eigs.values) / v.norm().max(1.0))
            .fold(0.0, f64::max)
    });
    let mut case = RoundTripCase {
        class,
        n,
        real,
        pencil_cond,
        rel_error: f64::INFINITY,
        pairing_complete: eigs.is_complete(),
        max_pair_error: eigs.pair_errors.iter().copied().fold(0.0, f64::max),
        conjugate_closure,
    };
    if !case.accepted() {
        return Ok(case);
    }
    let pair = StandardPair::full(eigs.vectors.clone(), t)?;
    let s = parameter_from_pair(&sys, &pair)?;
    let back = coefficients_from_pair(&pair.x, &pair.t, &s, class)?;
    let num = (fro(&(back.a1() - sys.a1())).powi(2) + fro(&(back.a0() - sys.a0())).powi(2)).sqrt();
    let den = (fro(sys.a1()).powi(2) + fro(sys.a0()).powi(2)).sqrt();
    case.rel_error = num / den;
    Ok(case)
}

/// Draw cases until `count` pass the conditioning filter; cases are generated in chunks.
///
/// Returns the accepted cases (in seed order) and the number of draws that were filtered out.
pub fn round_trip_suite(
    class: SymmetryClass,
    count: usize,
    base: u64,
    mode: Mode,
) -> (Vec<Result<RoundTripCase>>, usize) {
    let mut accepted = Vec::with_capacity(count);
    let mut rejected = 0;
    let mut next = 0u64;
    while accepted.len() < count && next < 20 * count as u64 {
        let chunk: Vec<u64> = (next..next + count as u64).collect();
        next += count as u64;
        let results = map_seeds(&chunk, mode, |k| {
            let seed = derive_seed(base, k);
            let n = 1 + (k % 8) as usize;
            let real = class.star == crate::numerics::Star::Transpose && k % 2 == 1;
            round_trip_case(class, n, real, seed)
        });
        for res in results {
            if accepted.len() == count {
                break;
            }
            match res {
                Ok(c) if !c.accepted() => rejected += 1,
                other => accepted.push(other),
            }
        }
    }
    (accepted, rejected)
}

/// One structured factorization with a planted rank and inertia.
#[derive(Clone, Debug)]
pub struct FactorCase {
    pub class: SymmetryClass,
    pub n: usize,
    pub rank: usize,
    pub reconstruction: f64,
    pub rank_found: usize,
    /// `(p, q)` planted through Sylvester's law and as found, for ⋆=∗.
    pub inertia_planted: Option<(usize, usize)>,
    pub inertia_found: Option<(usize, usize)>,
    /// Counts from the eigenvalues of `√(−ε)B`, for ⋆=∗.
    pub inertia_eigen: Option<(usize, usize)>,
}

impl FactorCase {
    pub fn ok(&self, tol: f64) -> bool {
        self.reconstruction <= tol
            && self.rank_found == self.rank
            && self.inertia_found == self.inertia_planted
            && self.inertia_eigen == self.inertia_planted
    }
}

fn planted_structured(class: SymmetryClass, n: usize, rank: usize, r: &mut SeededRng) -> (CMatrix, Option<(usize, usize)>) {
    let g = random_cmatrix(r, n, rank);
    match (class.star, class.epsilon) {
        (crate::numerics::Star::Conjugate, _) => {
            let p = r.random_range(0..=rank);
            let signs: Vec<C64> = (0..rank).map(|i| C64::new(if i < p { 1.0 } else { -1.0 }, 0.0)).collect();
            // √(−ε)B = G diag(signs) G∗  ⇒  B = G diag(signs) G∗ / √(−ε)
            let b = &g * diag(&signs) * g.adjoint() / sqrt_neg_eps(class);
            (b, Some((p, rank - p)))
        }
        (_, -1) => {
            let d = random_cmatrix(r, rank, rank);
            let d = &d + d.transpose();
            (&g * d * g.transpose(), None)
        }
        _ => {
            let d = random_cmatrix(r, rank, rank);
            let d = &d - d.transpose();
            (&g * d * g.transpose(), None)
        }
    }
}

fn eigen_inertia(h: &CMatrix) -> (usize, usize) {
    let (vals, _) = hermitian_eig(h);
    let hi = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let cut = 1e-10 * hi;
    (vals.iter().filter(|&&v| v > cut).count(), vals.iter().filter(|&&v| v < -cut).count())
}

pub fn factorization_case(class: SymmetryClass, seed: u64) -> Result<FactorCase> {
    let mut r = rng(seed);
    let n = r.random_range(1..=30);
    let full = r.random_bool(0.5);
    let mut rank = if full { n } else { r.random_range(0..=n) };
    if class == SymmetryClass::T_PAL {
        rank -= rank % 2;
    }
    let (b, planted) = planted_structured(class, n, rank, &mut r);
    let fac = star_factorize(&b, class)?;
    let scale = fro(&b).max(f64::MIN_POSITIVE);
    let reconstruction = if fro(&b) == 0.0 { fro(&fac.reconstruct()) } else { fro(&(fac.reconstruct() - &b)) / scale };
    let inertia_found = match fac.delta.kind {
        DeltaKind::HermitianInertia { p, q } => Some((p, q)),
        _ => None,
    };
    let inertia_eigen = planted.map(|_| if rank == 0 { (0, 0) } else { eigen_inertia(&(&b * sqrt_neg_eps(class))) });
    Ok(FactorCase {
        class,
        n,
        rank,
        reconstruction,
        rank_found: fac.rank(),
        inertia_planted: planted,
        inertia_found,
        inertia_eigen,
    })
}

pub fn factorization_suite(class: SymmetryClass, count: usize, base: u64, mode: Mode) -> Vec<Result<FactorCase>> {
    map_seeds(&seeds(base, count), mode, |s| factorization_case(class, s))
}

/// Algebraic checks on one random model update.
#[derive(Clone, Debug)]
pub struct MupCase {
    pub class: SymmetryClass,
    pub n: usize,
    pub smw: f64,
    pub gram: f64,
    pub new_pair: f64,
    pub kept_pair: f64,
    pub rank: usize,
}

/// Replace one random `(λ, partner)` pair of a random system by a random pair.
pub fn mup_case(class: SymmetryClass, seed: u64) -> Result<MupCase> {
    let mut r = rng(seed);
    let n = r.random_range(2..=6);
    // ∗-systems can have their whole spectrum on the unit circle; redraw until a pair exists.
    let mut draw = 0;
    let (sys, eigs) = loop {
        let sys = PalindromicSystem::random(class, n, false, &mut r);
        let eigs = eig_full(&sys)?;
        if eigs.is_complete() && !eigs.pairs.is_empty() {
            break (sys, eigs);
        }
        draw += 1;
        if draw == 50 {
            return Err(Error::PairingFailure(eigs.values[0]));
        }
    };
    let (a, b) = eigs.pairs[r.random_range(0..eigs.pairs.len())];
    let targets = [eigs.values[a], eigs.values[b]];
    let sel = select_pairs(&eigs, &targets, DEFAULT_TARGET_TOL)?;
    // Moduli below one keep the new pair off the unit circle.
    let lam = random_modulus(&mut r, 0.3, 0.8);
    let problem = MupProblem::from_selection(sys.clone(), &sel, &[lam, class.partner(lam)], seed)?;
    let sol = update_model(&problem)?;
    Ok(MupCase {
        class,
        n,
        smw: sol.smw_residual(&sys)?,
        gram: sol.gram_residual(&sel.x1, class),
        new_pair: sol.new_pair_residual()?,
        kept_pair: sol.system.pair_residual(&sel.x2, &sel.t2)?,
        rank: sol.rank,
    })
}

/// Collect `count` successful updates; failed draws are counted, not hidden.
pub fn mup_suite(class: SymmetryClass, count: usize, base: u64, mode: Mode) -> (Vec<MupCase>, usize) {
    let mut ok = Vec::with_capacity(count);
    let mut failed = 0;
    let mut next = 0u64;
    while ok.len() < count && next < 10 * count as u64 {
        let chunk: Vec<u64> = (next..next + count as u64).map(|k| derive_seed(base, k)).collect();
        next += count as u64;
        for res in map_seeds(&chunk, mode, |s| mup_case(class, s)) {
            if ok.len() == count {
                break;
            }
            match res {
                Ok(c) => ok.push(c),
                Err(e) => {
                    log::debug!("update draw failed: {e}");
                    failed += 1;
                }
            }
        }
    }
    (ok, failed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let s = seeds(7, 6);
        let a = map_seeds(&s, Mode::Sequential, |x| x.wrapping_mul(3));
        let b = map_seeds(&s, Mode::Parallel, |x| x.wrapping_mul(3));
        assert_eq!(a, b);
    }

    #[test]
    fn round_trip_small() {
        let c = round_trip_case(SymmetryClass::H_ANTI, 3, false, 1).unwrap();
        assert!(c.accepted());
        assert!(c.rel_error < 1e-10, "{c:?}");
        assert!(c.pairing_complete);
    }

    #[test]
    fn factor_case_runs() {
        for class in SymmetryClass::ALL {
            let c = factorization_case(class, 3).unwrap();
            assert!(c.ok(1e-10), "{c:?}");
        }
    }
}
