//! Forward eigensolver via a companion linearization, plus spectral pairing.

use crate::error::{Error, Result};
use crate::numerics::{cr, dense_eig, diag, eye, fro, linear_solve, zeros, CMatrix, C64};
use crate::system::{PalindromicSystem, SymmetryClass};

pub const DEFAULT_PAIRING_TOL: f64 = 1e-6;
/// Default relative tolerance when matching user targets to computed eigenvalues.
pub const DEFAULT_TARGET_TOL: f64 = 1e-3;
/// Eigenvalues closer than this (relative) are treated as coincident.
pub const COINCIDENCE_TOL: f64 = 1e-8;

/// Pencil `λM1 + M0` with `M1 = [[A1⋆, 0], [0, I]]` and `M0 = [[A0, εA1], [−I, 0]]`.
pub fn linearize(sys: &PalindromicSystem) -> (CMatrix, CMatrix) {
    let n = sys.n();
    let class = sys.class();
    let mut m1 = zeros(2 * n, 2 * n);
    m1.view_mut((0, 0), (n, n)).copy_from(&class.adj(sys.a1()));
    m1.view_mut((n, n), (n, n)).copy_from(&eye(n));
    let mut m0 = zeros(2 * n, 2 * n);
    m0.view_mut((0, 0), (n, n)).copy_from(sys.a0());
    m0.view_mut((0, n), (n, n)).copy_from(&(sys.a1() * class.eps_c()));
    m0.view_mut((n, 0), (n, n)).copy_from(&(-eye(n)));
    (m0, m1)
}

/// All `2n` eigenpairs with their `(λ, 1/λ⋆)` pairing.
#[derive(Clone, Debug)]
pub struct EigenPairSet {
    pub class: SymmetryClass,
    pub values: Vec<C64>,
    /// `n × 2n`, unit columns.
    pub vectors: CMatrix,
    /// Index pairs `(i, j)` with `λ_j ≈ 1/λ_i⋆`, `|λ_i| ≤ |λ_j|`.
    pub pairs: Vec<(usize, usize)>,
    /// Self-paired indices (`λ ≈ 1/λ⋆`).
    pub singles: Vec<usize>,
    /// Indices that could not be matched within tolerance.
    pub unmatched: Vec<usize>,
    /// Relative residuals `‖Q(λ)x‖ / (‖A1‖(1+|λ|²) + ‖A0‖|λ|)`.
    pub residuals: Vec<f64>,
    /// `|λ_iλ_j⋆ − 1|` for each entry of `pairs`.
    pub pair_errors: Vec<f64>,
    pub pairing_tol: f64,
}

impl EigenPairSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.unmatched.is_empty()
    }

    /// Fails with the first unmatched eigenvalue, if any.
    pub fn check_pairing(&self) -> Result<()> {
        match self.unmatched.first() {
            Some(&i) => Err(Error::PairingFailure(self.values[i])),
            None => Ok(()),
        }
    }

    /// Partner index of `i` (itself for singles), `None` if unmatched.
    pub fn partner_of(&self, i: usize) -> Option<usize> {
        if self.singles.contains(&i) {
            return Some(i);
        }
        self.pairs.iter().find_map(|&(a, b)| match (a == i, b == i) {
            (true, _) => Some(b),
            (_, true) => Some(a),
            _ => None,
        })
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn vector(&self, i: usize) -> CMatrix {
        self.vectors.columns(i, 1).into_owned()
    }
}

/// Solve `Q(λ)x = 0` for all eigenpairs and pair the spectrum.
pub fn eig_full(sys: &PalindromicSystem) -> Result<EigenPairSet> {
    eig_full_with(sys, DEFAULT_PAIRING_TOL)
}

pub fn eig_full_with(sys: &PalindromicSystem, pairing_tol: f64) -> Result<EigenPairSet> {
    let n = sys.n();
    let (m0, m1) = linearize(sys);
    let companion = -linear_solve(&m1, &m0)?;
    let (values, pencil_vecs) = dense_eig(&companion)?;
    let mut vectors = zeros(n, 2 * n);
    for k in 0..2 * n {
        let top = pencil_vecs.view((0, k), (n, 1));
        let bottom = pencil_vecs.view((n, k), (n, 1));
        let mut x = if top.norm() > bottom.norm() { top.into_owned() } else { bottom.into_owned() };
        let nx = x.norm();
        if nx > 0.0 {
            x /= cr(nx);
        }
        vectors.set_column(k, &x.column(0));
    }
    let (a1n, a0n) = (fro(sys.a1()), fro(sys.a0()));
    let residuals = (0..2 * n)
        .map(|k| {
            let lam = values[k];
            let r = (sys.eval(lam) * vectors.column(k)).norm();
            r / (a1n * (1.0 + lam.norm_sqr()) + a0n * lam.norm())
        })
        .collect();
    let (pairs, singles, unmatched, pair_errors) = pair_spectrum(&values, sys.class(), pairing_tol);
    Ok(EigenPairSet {
        class: sys.class(),
        values,
        vectors,
        pairs,
        singles,
        unmatched,
        residuals,
        pair_errors,
        pairing_tol,
    })
}

type Pairing = (Vec<(usize, usize)>, Vec<usize>, Vec<usize>, Vec<f64>);

/// Greedy matching by ascending modulus.
pub fn pair_spectrum(values: &[C64], class: SymmetryClass, tol: f64) -> Pairing {
    let mismatch = |a: C64, b: C64| (a * class.adj_scalar(b) - cr(1.0)).norm();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].norm().total_cmp(&values[b].norm()).then(a.cmp(&b)));
    let mut used = vec![false; values.len()];
    let (mut pairs, mut singles, mut unmatched, mut errors) = (vec![], vec![], vec![], vec![]);
    for &i in &order {
        if used[i] {
            continue;
        }
        used[i] = true;
        if mismatch(values[i], values[i]) <= tol {
            singles.push(i);
            continue;
        }
        let best = order
            .iter()
            .copied()
            .filter(|&j| !used[j])
            .map(|j| (mismatch(values[i], values[j]), j))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        match best {
            Some((err, j)) if err <= tol => {
                used[j] = true;
                pairs.push((i, j));
                errors.push(err);
            }
            _ => unmatched.push(i),
        }
    }
    (pairs, singles, unmatched, errors)
}

/// A partition of the eigenpairs into a selected and a remaining part.
#[derive(Clone, Debug)]
pub struct Selection {
    pub selected: Vec<usize>,
    pub remaining: Vec<usize>,
    pub x1: CMatrix,
    pub t1: CMatrix,
    pub x2: CMatrix,
    pub t2: CMatrix,
}

fn close(a: C64, b: C64, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm()).max(1.0)
}

/// Pick the eigenpairs matching `targets`; the selection must be closed under pairing.
pub fn select_pairs(eigs: &EigenPairSet, targets: &[C64], tol: f64) -> Result<Selection> {
    let mut selected: Vec<usize> = Vec::with_capacity(targets.len());
    for &t in targets {
        let hits: Vec<usize> = (0..eigs.len()).filter(|&k| close(eigs.values[k], t, tol)).collect();
        match hits.as_slice() {
            [] => return Err(Error::TargetNotFound(t)),
            [k] if !selected.contains(k) => selected.push(*k),
            _ => return Err(Error::AmbiguousTarget(t)),
        }
    }
    for &k in &selected {
        match eigs.partner_of(k) {
            None => return Err(Error::PairingFailure(eigs.values[k])),
            Some(p) if !selected.contains(&p) => return Err(Error::PairingNotClosed(eigs.values[k])),
            _ => {}
        }
    }
    let remaining: Vec<usize> = (0..eigs.len()).filter(|k| !selected.contains(k)).collect();
    for (a, &i) in selected.iter().enumerate() {
        for &j in &selected[a + 1..] {
            if close(eigs.values[i], eigs.values[j], COINCIDENCE_TOL) {
                return Err(Error::Defective(eigs.values[i]));
            }
        }
        for &j in &remaining {
            if close(eigs.values[i], eigs.values[j], COINCIDENCE_TOL) {
                return Err(Error::SpectraOverlap(eigs.values[i]));
            }
        }
    }
    let gather = |idx: &[usize]| {
        let x = eigs.vectors.select_columns(idx);
        let t = diag(&idx.iter().map(|&k| eigs.values[k]).collect::<Vec<_>>());
        (x, t)
    };
    let (x1, t1) = gather(&selected);
    let (x2, t2) = gather(&remaining);
    Ok(Selection { selected, remaining, x1, t1, x2, t2 })
}

/// Match two spectra as multisets; returns the worst relative distance of an optimal greedy matching.
pub fn spectrum_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0_f64;
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| a[i].norm().total_cmp(&a[j].norm()));
    for i in order {
        let best = (0..b.len())
            .filter(|&j| !used[j])
            .map(|j| ((a[i] - b[j]).norm() / a[i].norm().max(1.0), j))
            .min_by(|x, y| x.0.total_cmp(&y.0));
        if let Some((d, j)) = best {
            used[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}

/// Distance from `v` to the nearest element of `pool`, relative to `max(1, |v|)`.
pub fn nearest_distance(v: C64, pool: &[C64]) -> f64 {
    pool.iter()
        .map(|p| (v - p).norm() / v.norm().max(1.0))
        .fold(f64::INFINITY, f64::min)
}
