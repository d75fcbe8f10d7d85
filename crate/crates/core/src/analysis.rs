//! Structure of the solution family of a full eigenstructure problem.
//!
//! Two admissible parameter matrices `S`, `S̃` give systems whose coefficients can be jointly
//! block diagonalized; the block sizes are read off the eigenvalue multiplicities of `S̃S⁻¹`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::forward::eig_full;
use crate::numerics::{dense_eig, eye, fro, rcond, right_solve, svd, CMatrix, Star, C64};
use crate::paramspace::{s_basis_pair, sample_nonsingular_with, self_paired, JordanGroup, Pjcf};
use crate::random::{random_cmatrix, rng};
use crate::spectral::{coefficients_from_pair, membership_defects, parameter_from_pair, MEMBERSHIP_TOL};
use crate::system::{PalindromicSystem, StandardPair, SymmetryClass};

/// Default relative clustering tolerance for eigenvalues of `S̃S⁻¹`.
pub const ZETA_TOL: f64 = 1e-7;
/// Draws used to estimate the largest attainable partition.
pub const ZETA_OPT_DRAWS: usize = 50;
/// Relative off-block mass accepted as block diagonal.
pub const OFF_BLOCK_TOL: f64 = 1e-8;

/// Real dimension of 𝕊_(X,T).
pub fn s_space_dimension(x: &CMatrix, t: &CMatrix, class: SymmetryClass) -> Result<usize> {
    let pair = StandardPair::full(x.clone(), t.clone())?;
    Ok(s_basis_pair(&pair.x, &pair.t, class).dim())
}

/// Multiplicities of the eigenvalue pairs `(μ, μ⋆)` of `S̃S⁻¹`, halved to a partition of `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaPartition {
    pub parts: Vec<usize>,
    pub self_paired: Vec<bool>,
    /// One representative eigenvalue per part.
    pub mus: Vec<C64>,
}

impl ZetaPartition {
    pub fn cardinality(&self) -> usize {
        self.parts.len()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Index of the part whose `{μ, μ⋆}` lies closest to `v`.
    pub fn nearest_part(&self, v: C64, star: Star) -> usize {
        let dist = |mu: C64| (v - mu).norm().min((v - star.scalar(mu)).norm());
        (0..self.mus.len())
            .min_by(|&a, &b| dist(self.mus[a]).total_cmp(&dist(self.mus[b])))
            .unwrap_or(0)
    }
}

fn near(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm())
}

/// Single-linkage clusters of `values` under relative distance `tol`.
fn cluster(values: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if near(values[i], values[j], tol) {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = root(&mut label, i);
        match roots.iter().position(|&x| x == r) {
            Some(k) => groups[k].push(i),
            None => {
                roots.push(r);
                groups.push(vec![i]);
            }
        }
    }
    groups
}

pub fn zeta_partition(s: &CMatrix, s_tilde: &CMatrix, class: SymmetryClass, tol: f64) -> Result<ZetaPartition> {
    if !s.is_square() || s.shape() != s_tilde.shape() || s.nrows() % 2 == 1 {
        return Err(Error::DimensionMismatch("zeta partition needs two square matrices of even order".into()));
    }
    if rcond(s) <= 1e-12 || rcond(s_tilde) <= 1e-12 {
        return Err(Error::SingularInput);
    }
    let (values, _) = dense_eig(&right_solve(s_tilde, s)?)?;
    let groups = cluster(&values, tol);
    let mean = |g: &[usize]| g.iter().map(|&i| values[i]).sum::<C64>() / g.len() as f64;
    let centres: Vec<C64> = groups.iter().map(|g| mean(g)).collect();
    let mut used = vec![false; groups.len()];
    let mut out = ZetaPartition { parts: vec![], self_paired: vec![], mus: vec![] };
    for a in 0..groups.len() {
        if used[a] {
            continue;
        }
        used[a] = true;
        let mu = centres[a];
        let mult = groups[a].len();
        let mirror = class.adj_scalar(mu);
        if near(mu, mirror, tol) {
            if mult % 2 == 1 {
                return Err(Error::StructureViolation(format!("{mu} has odd multiplicity {mult}")));
            }
            out.parts.push(mult / 2);
            out.self_paired.push(true);
        } else {
            let partner = (0..groups.len()).find(|&b| !used[b] && near(centres[b], mirror, tol));
            match partner {
                Some(b) if groups[b].len() == mult => {
                    used[b] = true;
                    out.parts.push(mult);
                    out.self_paired.push(false);
                }
                Some(b) => {
                    return Err(Error::StructureViolation(format!(
                        "{mu} has multiplicity {mult} but its partner has {}",
                        groups[b].len()
                    )))
                }
                None => return Err(Error::StructureViolation(format!("{mu} has no partner {mirror}"))),
            }
        }
        out.mus.push(mu);
    }
    Ok(out)
}

/// Relative Frobenius mass outside the diagonal blocks of the given sizes.
pub fn off_block_mass(m: &CMatrix, blocks: &[usize]) -> f64 {
    let mut owner = Vec::with_capacity(m.nrows());
    for (b, &size) in blocks.iter().enumerate() {
        owner.extend(std::iter::repeat_n(b, size));
    }
    let mut off = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if owner.get(i) != owner.get(j) {
                off += m[(i, j)].norm_sqr();
            }
        }
    }
    off.sqrt() / fro(m).max(f64::MIN_POSITIVE)
}

/// Output of the joint block diagonalization.
#[derive(Clone, Debug)]
pub struct JointBlocks {
    /// Columns spanning the invariant subspaces, grouped by part.
    pub k: CMatrix,
    /// Column order of `X` that groups the eigenpairs by part.
    pub perm: Vec<usize>,
    pub blocks: Vec<usize>,
    pub zeta: ZetaPartition,
    /// Largest relative off-block mass of `K⋆Â1K` and `K⋆Â0K` for the supplied `Ŝ`.
    pub off_block: f64,
}

impl JointBlocks {
    pub fn congruence(&self, sys: &PalindromicSystem) -> (CMatrix, CMatrix) {
        let class = sys.class();
        let ka = class.adj(&self.k);
        (&ka * sys.a1() * &self.k, &ka * sys.a0() * &self.k)
    }

    pub fn off_block_of(&self, sys: &PalindromicSystem) -> f64 {
        let (b1, b0) = self.congruence(sys);
        off_block_mass(&b1, &self.blocks).max(off_block_mass(&b0, &self.blocks))
    }
}

/// Find `K` with `K⋆Â1K`, `K⋆Â0K` block diagonal for every `Ŝ ∈ 𝕊_(X,J)`.
pub fn joint_block_diagonalize(
    x: &CMatrix,
    jcf: &Pjcf,
    s: &CMatrix,
    s_tilde: &CMatrix,
    s_hat: &CMatrix,
) -> Result<JointBlocks> {
    let class = jcf.class;
    if let Some(g) = jcf.paired.iter().chain(&jcf.unpaired).find(|g| g.sizes.len() > 1) {
        return Err(Error::GeomMultViolation(format!(
            "{} has {} Jordan blocks",
            g.lambda,
            g.sizes.len()
        )));
    }
    let j = jcf.matrix();
    for (name, m) in [("S", s), ("S~", s_tilde), ("S^", s_hat)] {
        let d = membership_defects(x, &j, m, class);
        if d.max() > MEMBERSHIP_TOL {
            return Err(Error::NotAdmissible(format!("{name} is not in the parameter space: {:.3e}", d.max())));
        }
    }
    let zeta = zeta_partition(s, s_tilde, class, ZETA_TOL)?;
    let a1 = coefficients_from_pair(x, &j, s, class)?.a1().clone();
    let a1_tilde = coefficients_from_pair(x, &j, s_tilde, class)?.a1().clone();
    // Ã1^{−⋆}A1⋆ = (A1Ã1⁻¹)⋆
    let e = class.adj(&right_solve(&a1, &a1_tilde)?);
    let (values, _) = dense_eig(&e)?;
    let mut assigned: Vec<Vec<C64>> = vec![Vec::new(); zeta.cardinality()];
    for &v in &values {
        assigned[zeta.nearest_part(v, class.star)].push(v);
    }
    let n = x.nrows();
    let mut columns: Vec<CMatrix> = Vec::new();
    for (i, vals) in assigned.iter().enumerate() {
        if vals.len() != zeta.parts[i] {
            return Err(Error::NotJbDiagonalizable(format!(
                "part {i} expects {} eigenvalues of the coefficient ratio, found {}",
                zeta.parts[i],
                vals.len()
            )));
        }
        let mut p = eye(n);
        for &v in vals {
            p = (&e - eye(n) * v) * p;
        }
        let d = svd(&p);
        let m = vals.len();
        columns.push(d.v.columns(n - m, m).into_owned());
    }
    let k = crate::numerics::hstack(&columns.iter().collect::<Vec<_>>());
    if rcond(&k) <= 1e-10 {
        return Err(Error::NotJbDiagonalizable("invariant subspaces are not complementary".into()));
    }
    let ratio = right_solve(s_tilde, s)?;
    let mut by_part: Vec<Vec<usize>> = vec![Vec::new(); zeta.cardinality()];
    for c in 0..ratio.nrows() {
        by_part[zeta.nearest_part(ratio[(c, c)], class.star)].push(c);
    }
    for (i, cols) in by_part.iter().enumerate() {
        if cols.len() != 2 * zeta.parts[i] {
            return Err(Error::NotJbDiagonalizable(format!(
                "part {i} owns {} eigenpairs, expected {}",
                cols.len(),
                2 * zeta.parts[i]
            )));
        }
    }
    let perm: Vec<usize> = by_part.concat();
    let mut out = JointBlocks { k, perm, blocks: zeta.parts.clone(), zeta, off_block: 0.0 };
    let hat = coefficients_from_pair(x, &j, s_hat, class)?;
    out.off_block = out.off_block_of(&hat);
    Ok(out)
}

/// Largest `card(ζ)` seen over seeded draws of `S̃` against a fixed `S0`.
///
/// This only bounds `card(ζ^opt)` from below.
pub fn zeta_opt_observed(x: &CMatrix, t: &CMatrix, class: SymmetryClass, draws: usize, seed: u64) -> Result<usize> {
    let basis = s_basis_pair(x, t, class);
    if basis.dim() == 0 {
        return Err(Error::NoSolution("the parameter space is trivial".into()));
    }
    let mut r = rng(seed);
    let s0 = sample_nonsingular_with(&basis, &mut r, 25)?;
    let mut best = 1;
    for _ in 0..draws {
        let Ok(s) = sample_nonsingular_with(&basis, &mut r, 25) else { continue };
        if let Ok(z) = zeta_partition(&s0, &s, class, ZETA_TOL) {
            best = best.max(z.cardinality());
        }
    }
    Ok(best)
}

/// A direct sum of independent random systems hidden behind a random congruence.
#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub class: SymmetryClass,
    pub sizes: Vec<usize>,
    pub x: CMatrix,
    pub jcf: Pjcf,
    /// Parameter matrix of the planted system.
    pub s: CMatrix,
    /// The same blocks rescaled by distinct factors.
    pub s_tilde: CMatrix,
    pub system: PalindromicSystem,
    /// Real dimension of 𝕊_(X,J) for each summand.
    pub block_dims: Vec<usize>,
}

struct Summand {
    x: CMatrix,
    /// Values in PJCF order: pairs (λ, partner) first, then self-paired.
    paired: Vec<C64>,
    unpaired: Vec<C64>,
    s: CMatrix,
    dim: usize,
}

fn summand<R: Rng>(class: SymmetryClass, n: usize, r: &mut R) -> Option<Summand> {
    let sys = PalindromicSystem::random(class, n, false, r);
    let eigs = eig_full(&sys).ok()?;
    if !eigs.is_complete() {
        return None;
    }
    let mut order = Vec::new();
    let mut paired = Vec::new();
    for &(a, b) in &eigs.pairs {
        order.push(a);
        order.push(b);
        paired.push(eigs.values[a]);
    }
    let mut unpaired = Vec::new();
    for &a in &eigs.singles {
        if !self_paired(class, eigs.values[a]) {
            return None;
        }
        order.push(a);
        unpaired.push(eigs.values[a]);
    }
    let mut t_values: Vec<C64> = paired.iter().flat_map(|&v| [v, class.partner(v)]).collect();
    t_values.extend(&unpaired);
    let x = eigs.vectors.select_columns(&order);
    let t = crate::numerics::diag(&t_values);
    let pair = StandardPair::full(x.clone(), t.clone()).ok()?;
    if pair.w_rcond() < 1e-6 {
        return None;
    }
    let s = parameter_from_pair(&sys, &pair).ok()?;
    let dim = s_basis_pair(&x, &t, class).dim();
    Some(Summand { x, paired, unpaired, s, dim })
}

/// Plant `sizes.len()` summands with disjoint spectra and distinct scalings in `S̃`.
pub fn planted_direct_sum(class: SymmetryClass, sizes: &[usize], seed: u64) -> Result<PlantedInstance> {
    let mut r = rng(seed);
    let mut parts = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut found = None;
        for _ in 0..50 {
            if let Some(p) = summand(class, n, &mut r) {
                found = Some(p);
                break;
            }
        }
        parts.push(found.ok_or(Error::RetryExhausted)?);
    }
    let n: usize = sizes.iter().sum();
    let size = 2 * n;
    // Global column slots: all pairs first (summand by summand), then all self-paired values.
    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); parts.len()];
    let mut next = 0;
    for (i, p) in parts.iter().enumerate() {
        for _ in 0..2 * p.paired.len() {
            slots[i].push(next);
            next += 1;
        }
    }
    for (i, p) in parts.iter().enumerate() {
        for _ in 0..p.unpaired.len() {
            slots[i].push(next);
            next += 1;
        }
    }
    let mut x = CMatrix::zeros(n, size);
    let mut s = CMatrix::zeros(size, size);
    let mut s_tilde = CMatrix::zeros(size, size);
    let mut row = 0;
    for (i, p) in parts.iter().enumerate() {
        let scale = 1.0 + i as f64 + r.random_range(0.25..0.75);
        for (a, &ga) in slots[i].iter().enumerate() {
            for q in 0..sizes[i] {
                x[(row + q, ga)] = p.x[(q, a)];
            }
            for (b, &gb) in slots[i].iter().enumerate() {
                s[(ga, gb)] = p.s[(a, b)];
                s_tilde[(ga, gb)] = p.s[(a, b)] * scale;
            }
        }
        row += sizes[i];
    }
    let g = random_cmatrix(&mut r, n, n);
    let x = g * x;
    let jcf = Pjcf::new(
        class,
        parts.iter().flat_map(|p| p.paired.iter().map(|&v| JordanGroup::simple(v))).collect(),
        parts.iter().flat_map(|p| p.unpaired.iter().map(|&v| JordanGroup::simple(v))).collect(),
    )?;
    let system = coefficients_from_pair(&x, &jcf.matrix(), &s, class)?;
    Ok(PlantedInstance {
        class,
        sizes: sizes.to_vec(),
        x,
        jcf,
        s,
        s_tilde,
        system,
        block_dims: parts.iter().map(|p| p.dim).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{cr, diag, from_real_rows};
    use crate::paramspace::s_basis_pjcf;

    #[test]
    fn scalar_dimension() {
        let x = from_real_rows(&[&[1.0, 1.0]]);
        let t = diag(&[cr(1.0), cr(-1.0)]);
        assert_eq!(s_space_dimension(&x, &t, SymmetryClass::T_ANTI).unwrap(), 2);
    }

    #[test]
    fn generic_dimension_is_scaling_only() {
        for class in SymmetryClass::ALL {
            let inst = planted_direct_sum(class, &[3], 11).unwrap();
            let expected = if class.star == Star::Transpose { 2 } else { 1 };
            assert_eq!(inst.block_dims, vec![expected], "{class}");
        }
    }

    #[test]
    fn scalar_multiple_is_one_part() {
        let inst = planted_direct_sum(SymmetryClass::H_PAL, &[3], 2).unwrap();
        let z = zeta_partition(&inst.s, &(&inst.s * cr(2.0)), SymmetryClass::H_PAL, ZETA_TOL).unwrap();
        assert_eq!(z.parts, vec![3]);
        assert!(z.self_paired[0]);
    }

    #[test]
    fn singular_input_rejected() {
        let s = CMatrix::zeros(2, 2);
        assert!(matches!(
            zeta_partition(&s, &eye(2), SymmetryClass::T_PAL, ZETA_TOL),
            Err(Error::SingularInput)
        ));
    }

    #[test]
    fn planted_two_blocks_recovered() {
        for class in SymmetryClass::ALL {
            let inst = planted_direct_sum(class, &[2, 3], 5).unwrap();
            let j = inst.jcf.matrix();
            let dim = s_space_dimension(&inst.x, &j, class).unwrap();
            assert_eq!(dim, inst.block_dims.iter().sum::<usize>(), "{class}");
            let basis = s_basis_pair(&inst.x, &j, class);
            let mut r = rng(9);
            let hat = sample_nonsingular_with(&basis, &mut r, 25).unwrap();
            let hat2 = sample_nonsingular_with(&basis, &mut r, 25).unwrap();
            let out = joint_block_diagonalize(&inst.x, &inst.jcf, &inst.s, &inst.s_tilde, &hat).unwrap();
            let mut blocks = out.blocks.clone();
            blocks.sort();
            assert_eq!(blocks, vec![2, 3], "{class}");
            assert!(out.off_block <= OFF_BLOCK_TOL, "{class} {}", out.off_block);
            let second = coefficients_from_pair(&inst.x, &j, &hat2, class).unwrap();
            assert!(out.off_block_of(&second) <= OFF_BLOCK_TOL, "{class}");
            let card = zeta_opt_observed(&inst.x, &j, class, ZETA_OPT_DRAWS, 3).unwrap();
            assert!(card <= dim, "{class}");
            assert_eq!(card, 2, "{class}");
        }
    }

    #[test]
    fn quotient_block_is_lower_toeplitz() {
        let class = SymmetryClass::T_ANTI;
        let jcf = Pjcf::new(class, vec![JordanGroup::new(crate::numerics::c(0.4, 0.3), vec![3])], vec![]).unwrap();
        let basis = s_basis_pjcf(&jcf, class);
        let mut r = rng(4);
        let s = sample_nonsingular_with(&basis, &mut r, 25).unwrap();
        let st = sample_nonsingular_with(&basis, &mut r, 25).unwrap();
        let b = s.view((0, 3), (3, 3)).into_owned();
        let bt = st.view((0, 3), (3, 3)).into_owned();
        let m = crate::numerics::linear_solve(&bt, &b).unwrap();
        let scale = fro(&m);
        for i in 0..3 {
            for jj in 0..3 {
                if jj > i {
                    assert!(m[(i, jj)].norm() <= 1e-9 * scale);
                } else if i > 0 && jj > 0 {
                    assert!((m[(i, jj)] - m[(i - 1, jj - 1)]).norm() <= 1e-9 * scale);
                }
            }
        }
    }

    #[test]
    fn geometric_multiplicity_checked() {
        let class = SymmetryClass::T_ANTI;
        let jcf = Pjcf::new(class, vec![JordanGroup::new(cr(0.5), vec![1, 1])], vec![]).unwrap();
        let x = from_real_rows(&[&[1.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 0.0, 1.0]]);
        let s = eye(4);
        assert!(matches!(
            joint_block_diagonalize(&x, &jcf, &s, &s, &s),
            Err(Error::GeomMultViolation(_))
        ));
    }
}
