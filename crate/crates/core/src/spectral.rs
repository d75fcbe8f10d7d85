//! Passing between a system and its spectral data `(X, T, S)`.

use crate::error::{Error, Result};
use crate::numerics::{block_diag, eye, fro, hstack, inverse, rcond, vstack, CMatrix};
use crate::system::{skew_defect, PalindromicSystem, StandardPair, SymmetryClass};

/// Input pairs must satisfy the quadratic relation to this relative residual.
pub const PAIR_RESIDUAL_TOL: f64 = 1e-8;
/// Relative tolerance of the post-hoc membership checks.
pub const MEMBERSHIP_TOL: f64 = 1e-8;
/// `σ_min/σ_max` threshold for the leading block `XT⁻¹SX⋆`.
pub const LEADING_BLOCK_TOL: f64 = 1e-12;

/// `J_ε = [[0, I], [−εI, 0]]`.
pub fn j_eps(n: usize, class: SymmetryClass) -> CMatrix {
    let z = CMatrix::zeros(n, n);
    let top = hstack(&[&z, &eye(n)]);
    let bottom = hstack(&[&(eye(n) * -class.eps_c()), &z]);
    vstack(&[&top, &bottom])
}

/// `L = [[0, I], [A1⋆, 0]]`.
pub fn l_matrix(sys: &PalindromicSystem) -> CMatrix {
    let n = sys.n();
    let z = CMatrix::zeros(n, n);
    let top = hstack(&[&z, &eye(n)]);
    let bottom = hstack(&[&sys.class().adj(sys.a1()), &z]);
    vstack(&[&top, &bottom])
}

/// `M = [[εA1, 0], [−A0, −I]]`.
pub fn m_matrix(sys: &PalindromicSystem) -> CMatrix {
    let n = sys.n();
    let z = CMatrix::zeros(n, n);
    let top = hstack(&[&(sys.a1() * sys.class().eps_c()), &z]);
    let bottom = hstack(&[&(-sys.a0()), &(-eye(n))]);
    vstack(&[&top, &bottom])
}

/// Relative violations of `S⋆ = −εS`, `S = TST⋆` and `XSX⋆ = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MembershipDefects {
    pub symmetry: f64,
    pub fixed_point: f64,
    pub annihilation: f64,
}

impl MembershipDefects {
    pub fn max(&self) -> f64 {
        self.symmetry.max(self.fixed_point).max(self.annihilation)
    }
}

pub fn membership_defects(x: &CMatrix, t: &CMatrix, s: &CMatrix, class: SymmetryClass) -> MembershipDefects {
    let sn = fro(s).max(f64::MIN_POSITIVE);
    let tn = fro(t);
    let xn = fro(x);
    MembershipDefects {
        symmetry: skew_defect(s, class) / sn,
        fixed_point: fro(&(s - t * s * class.adj(t))) / (sn * tn * tn).max(f64::MIN_POSITIVE),
        annihilation: fro(&(x * s * class.adj(x))) / (sn * xn * xn).max(f64::MIN_POSITIVE),
    }
}

/// A full standard pair with an admissible parameter matrix.
#[derive(Clone, Debug)]
pub struct SpectralTriple {
    pub pair: StandardPair,
    pub s: CMatrix,
    pub class: SymmetryClass,
}

impl SpectralTriple {
    pub fn defects(&self) -> MembershipDefects {
        membership_defects(&self.pair.x, &self.pair.t, &self.s, self.class)
    }

    pub fn system(&self) -> Result<PalindromicSystem> {
        coefficients_from_pair(&self.pair.x, &self.pair.t, &self.s, self.class)
    }
}

/// `S = (W⋆ L J_ε L⋆ W)⁻¹` for a full standard pair of `sys`.
pub fn parameter_from_pair(sys: &PalindromicSystem, pair: &StandardPair) -> Result<CMatrix> {
    let class = sys.class();
    let res = sys.pair_residual(&pair.x, &pair.t)?;
    if res > PAIR_RESIDUAL_TOL {
        return Err(Error::ResidualTooLarge(res));
    }
    if pair.size() != 2 * sys.n() {
        return Err(Error::DimensionMismatch("parameter_from_pair needs a full pair".into()));
    }
    let w = pair.w()?;
    if rcond(&w) <= 1e-12 {
        return Err(Error::SingularW);
    }
    let l = l_matrix(sys);
    let core = l.clone() * j_eps(sys.n(), class) * class.adj(&l);
    let g = class.adj(&w) * core * &w;
    let s = inverse(&g).map_err(|_| Error::SingularW)?;
    let d = membership_defects(&pair.x, &pair.t, &s, class);
    if d.max() > MEMBERSHIP_TOL {
        return Err(Error::NotAdmissible(format!(
            "computed S violates membership: {:.3e}",
            d.max()
        )));
    }
    Ok(s)
}

/// `A1 = ε(XT⁻¹SX⋆)⁻¹`, `A0 = −A1 X T⁻² S X⋆ A1`.
pub fn coefficients_from_pair(
    x: &CMatrix,
    t: &CMatrix,
    s: &CMatrix,
    class: SymmetryClass,
) -> Result<PalindromicSystem> {
    let m = t.nrows();
    if !t.is_square() || x.ncols() != m || s.shape() != (m, m) {
        return Err(Error::DimensionMismatch(format!(
            "coefficients: X is {}x{}, T is {}x{}, S is {}x{}",
            x.nrows(),
            x.ncols(),
            t.nrows(),
            t.ncols(),
            s.nrows(),
            s.ncols()
        )));
    }
    if rcond(s) <= 1e-12 {
        return Err(Error::NotAdmissible("S is singular".into()));
    }
    let d = membership_defects(x, t, s, class);
    if d.max() > MEMBERSHIP_TOL {
        return Err(Error::NotAdmissible(format!("membership defect {:.3e}", d.max())));
    }
    let tinv = inverse(t).map_err(|_| Error::SingularT)?;
    let xa = class.adj(x);
    let lead = x * &tinv * s * &xa;
    if rcond(&lead) <= LEADING_BLOCK_TOL {
        return Err(Error::SingularLeadingBlock);
    }
    let a1 = inverse(&lead).map_err(|_| Error::SingularLeadingBlock)? * class.eps_c();
    let a0 = -(&a1 * x * &tinv * &tinv * s * &xa * &a1);
    PalindromicSystem::computed(class, a1, a0)
}

/// `diag(S1, S2)` with the matching stacked pair, a convenience for assembling full data.
pub fn assemble(parts: &[(&CMatrix, &CMatrix, &CMatrix)]) -> (CMatrix, CMatrix, CMatrix) {
    let xs: Vec<&CMatrix> = parts.iter().map(|p| p.0).collect();
    let ts: Vec<&CMatrix> = parts.iter().map(|p| p.1).collect();
    let ss: Vec<&CMatrix> = parts.iter().map(|p| p.2).collect();
    (hstack(&xs), block_diag(&ts), block_diag(&ss))
}

/// `W S W⋆`, which equals `[[0, A1^{-⋆}], [−εA1⁻¹, 0]]` for admissible data.
pub fn wsw(pair: &StandardPair, s: &CMatrix, class: SymmetryClass) -> Result<CMatrix> {
    let w = pair.w()?;
    Ok(&w * s * class.adj(&w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{cr, diag, from_real_rows};

    fn scalar_pair() -> (CMatrix, CMatrix) {
        (from_real_rows(&[&[1.0, 1.0]]), diag(&[cr(1.0), cr(-1.0)]))
    }

    #[test]
    fn scalar_parameter_matrix() {
        let class = SymmetryClass::T_ANTI;
        let sys = PalindromicSystem::new(class, from_real_rows(&[&[1.0]]), from_real_rows(&[&[0.0]])).unwrap();
        let (x, t) = scalar_pair();
        let s = parameter_from_pair(&sys, &StandardPair::full(x, t).unwrap()).unwrap();
        assert!(fro(&(s - diag(&[cr(-0.5), cr(0.5)]))) < 1e-15);
    }

    #[test]
    fn scalar_coefficients() {
        let (x, t) = scalar_pair();
        let s = diag(&[cr(-0.5), cr(0.5)]);
        let sys = coefficients_from_pair(&x, &t, &s, SymmetryClass::T_ANTI).unwrap();
        assert!((sys.a1()[(0, 0)] - cr(1.0)).norm() < 1e-15);
        assert!(sys.a0()[(0, 0)].norm() < 1e-15);
        let half = coefficients_from_pair(&x, &t, &(&s * cr(2.0)), SymmetryClass::T_ANTI).unwrap();
        assert!((half.a1()[(0, 0)] - cr(0.5)).norm() < 1e-15);
    }

    #[test]
    fn m_and_l_identity() {
        let class = SymmetryClass::H_ANTI;
        let a1 = from_real_rows(&[&[2.0, 1.0], &[0.5, -1.0]]);
        let a0 = from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let sys = PalindromicSystem::new(class, a1, a0).unwrap();
        let j = j_eps(2, class);
        let m = m_matrix(&sys);
        let l = l_matrix(&sys);
        let lhs = &m * &j * class.adj(&m);
        let rhs = &l * &j * class.adj(&l);
        assert!(fro(&(lhs - rhs)) <= 1e-12 * fro(&m).powi(2));
    }

    #[test]
    fn rejects_bad_parameter() {
        let (x, t) = scalar_pair();
        let s = diag(&[cr(1.0), cr(1.0)]);
        assert!(matches!(
            coefficients_from_pair(&x, &t, &s, SymmetryClass::T_ANTI),
            Err(Error::NotAdmissible(_))
        ));
    }
}
