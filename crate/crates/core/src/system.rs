//! Symmetry classes, palindromic systems and standard pairs.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::{
    cr, ensure_finite, fro, inverse, rcond, singular_values, vstack, CMatrix, Star, C64,
};

/// Tolerance for `A0⋆ = εA0` on user-supplied systems.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Looser tolerance applied to systems produced by the solvers.
pub const OUTPUT_SYMMETRY_TOL: f64 = 1e-8;
/// `σ_min(A1)/σ_max(A1)` below this is rejected.
pub const A1_SINGULAR_TOL: f64 = 1e-12;
/// Between the rejection threshold and this value a warning is logged.
pub const A1_WARN_TOL: f64 = 1e-8;

/// One of the four combinations of adjoint and sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymmetryClass {
    pub star: Star,
    pub epsilon: i8,
}

impl SymmetryClass {
    pub const T_PAL: Self = Self { star: Star::Transpose, epsilon: 1 };
    pub const T_ANTI: Self = Self { star: Star::Transpose, epsilon: -1 };
    pub const H_PAL: Self = Self { star: Star::Conjugate, epsilon: 1 };
    pub const H_ANTI: Self = Self { star: Star::Conjugate, epsilon: -1 };
    pub const ALL: [Self; 4] = [Self::T_PAL, Self::T_ANTI, Self::H_PAL, Self::H_ANTI];

    pub fn new(star: Star, epsilon: i8) -> Result<Self> {
        match epsilon {
            1 | -1 => Ok(Self { star, epsilon }),
            _ => Err(Error::Parse(format!("epsilon must be 1 or -1, got {epsilon}"))),
        }
    }

    pub fn eps(self) -> f64 {
        f64::from(self.epsilon)
    }

    pub fn eps_c(self) -> C64 {
        cr(self.eps())
    }

    pub fn adj(self, m: &CMatrix) -> CMatrix {
        self.star.apply(m)
    }

    pub fn adj_scalar(self, z: C64) -> C64 {
        self.star.scalar(z)
    }

    /// The partner `1/λ⋆` of an eigenvalue.
    pub fn partner(self, lambda: C64) -> C64 {
        cr(1.0) / self.adj_scalar(lambda)
    }

    /// Short tag: `tp`, `ta`, `hp` or `ha`.
    pub fn tag(self) -> &'static str {
        match (self.star, self.epsilon) {
            (Star::Transpose, 1) => "tp",
            (Star::Transpose, _) => "ta",
            (Star::Conjugate, 1) => "hp",
            (Star::Conjugate, _) => "ha",
        }
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match (self.star, self.epsilon) {
            (Star::Transpose, 1) => "T-palindromic",
            (Star::Transpose, _) => "T-anti-palindromic",
            (Star::Conjugate, 1) => "*-palindromic",
            (Star::Conjugate, _) => "*-anti-palindromic",
        };
        f.write_str(name)
    }
}

impl FromStr for SymmetryClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tp" => Ok(Self::T_PAL),
            "ta" => Ok(Self::T_ANTI),
            "hp" => Ok(Self::H_PAL),
            "ha" => Ok(Self::H_ANTI),
            _ => Err(Error::Parse(format!("unknown class {s:?}, expected tp|ta|hp|ha"))),
        }
    }
}

/// `‖A − εA⋆‖_F`, the departure of `A` from `A⋆ = εA`.
pub fn symmetry_defect(a: &CMatrix, class: SymmetryClass) -> f64 {
    fro(&(a - class.adj(a) * class.eps_c()))
}

/// `‖B + εB⋆‖_F`, the departure of `B` from `B⋆ = −εB`.
pub fn skew_defect(b: &CMatrix, class: SymmetryClass) -> f64 {
    fro(&(b + class.adj(b) * class.eps_c()))
}

/// `Q(λ) = λ²A1⋆ + λA0 + εA1` with validated coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PalindromicSystem {
    class: SymmetryClass,
    a1: CMatrix,
    a0: CMatrix,
}

impl PalindromicSystem {
    /// Validating constructor for caller-supplied coefficients.
    pub fn new(class: SymmetryClass, a1: CMatrix, a0: CMatrix) -> Result<Self> {
        Self::with_tolerance(class, a1, a0, SYMMETRY_TOL)
    }

    /// Constructor used for computed systems, which carry rounding noise in `A0`.
    pub fn computed(class: SymmetryClass, a1: CMatrix, a0: CMatrix) -> Result<Self> {
        Self::with_tolerance(class, a1, a0, OUTPUT_SYMMETRY_TOL)
    }

    pub fn with_tolerance(
        class: SymmetryClass,
        a1: CMatrix,
        a0: CMatrix,
        sym_tol: f64,
    ) -> Result<Self> {
        let n = a1.nrows();
        if !a1.is_square() || a0.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "A1 is {}x{}, A0 is {}x{}",
                a1.nrows(),
                a1.ncols(),
                a0.nrows(),
                a0.ncols()
            )));
        }
        if n == 0 {
            return Err(Error::DimensionMismatch("system order must be positive".into()));
        }
        ensure_finite(&a1)?;
        ensure_finite(&a0)?;
        // Measured against the larger coefficient so that A0 ≈ 0 is not judged by its own noise.
        let scale = fro(&a0).max(fro(&a1));
        let defect = symmetry_defect(&a0, class);
        if defect > sym_tol * scale {
            return Err(Error::A0SymmetryViolation(defect / scale));
        }
        let rc = rcond(&a1);
        if rc <= A1_SINGULAR_TOL {
            return Err(Error::SingularA1(rc));
        }
        if rc < A1_WARN_TOL {
            log::warn!("A1 is nearly singular: sigma_min/sigma_max = {rc:.3e}");
        }
        Ok(Self { class, a1, a0 })
    }

    /// Gaussian `A1` and `A0 = B + εB⋆`; `real` keeps both coefficients real.
    pub fn random<R: rand::Rng>(class: SymmetryClass, n: usize, real: bool, r: &mut R) -> Self {
        use crate::random::{random_cmatrix, random_real_cmatrix};
        let draw = |r: &mut R| if real { random_real_cmatrix(r, n, n) } else { random_cmatrix(r, n, n) };
        let a1 = draw(r);
        let b = draw(r);
        let a0 = &b + class.adj(&b) * class.eps_c();
        Self { class, a1, a0 }
    }

    pub fn class(&self) -> SymmetryClass {
        self.class
    }

    pub fn n(&self) -> usize {
        self.a1.nrows()
    }

    pub fn a1(&self) -> &CMatrix {
        &self.a1
    }

    pub fn a0(&self) -> &CMatrix {
        &self.a0
    }

    /// Absolute `‖A0 − εA0⋆‖_F`.
    pub fn symmetry_defect(&self) -> f64 {
        symmetry_defect(&self.a0, self.class)
    }

    /// Symmetry defect relative to `‖A0‖_F` (or `‖A1‖_F` when `A0 = 0`).
    pub fn relative_symmetry_defect(&self) -> f64 {
        let scale = fro(&self.a0).max(fro(&self.a1) * f64::EPSILON);
        if scale == 0.0 {
            0.0
        } else {
            self.symmetry_defect() / scale
        }
    }

    pub fn eval(&self, lambda: C64) -> CMatrix {
        eval_q(self, lambda)
    }

    /// `A1⋆ X T² + A0 X T + εA1 X`.
    pub fn pair_residual_matrix(&self, x: &CMatrix, t: &CMatrix) -> Result<CMatrix> {
        check_pair_dims(self.n(), x, t)?;
        let xt = x * t;
        Ok(self.class.adj(&self.a1) * (&xt * t) + &self.a0 * &xt + &self.a1 * x * self.class.eps_c())
    }

    /// `‖A1⋆ X T² + A0 X T + εA1 X‖_F`.
    pub fn pair_residual_abs(&self, x: &CMatrix, t: &CMatrix) -> Result<f64> {
        Ok(fro(&self.pair_residual_matrix(x, t)?))
    }

    pub fn pair_residual(&self, x: &CMatrix, t: &CMatrix) -> Result<f64> {
        let abs = self.pair_residual_abs(x, t)?;
        let (a1, a0, xn, tn) = (fro(&self.a1), fro(&self.a0), fro(x), fro(t));
        let scale = a1 * xn * tn * tn + a0 * xn * tn + a1 * xn;
        Ok(if scale == 0.0 { abs } else { abs / scale })
    }
}

fn check_pair_dims(n: usize, x: &CMatrix, t: &CMatrix) -> Result<()> {
    if x.nrows() != n || !t.is_square() || t.nrows() != x.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "pair: X is {}x{}, T is {}x{}, system order {n}",
            x.nrows(),
            x.ncols(),
            t.nrows(),
            t.ncols()
        )));
    }
    Ok(())
}

pub fn eval_q(sys: &PalindromicSystem, lambda: C64) -> CMatrix {
    let class = sys.class;
    class.adj(&sys.a1) * (lambda * lambda) + &sys.a0 * lambda + &sys.a1 * class.eps_c()
}

/// `‖Q(λ) − ελ²Q(1/λ)⋆‖_F`.
pub fn palindromic_identity_check(sys: &PalindromicSystem, lambda: C64) -> Result<f64> {
    if lambda == cr(0.0) {
        return Err(Error::ZeroLambda);
    }
    let class = sys.class;
    let q = eval_q(sys, lambda);
    // For ⋆=∗ the reflected argument is 1/λ̄ so that both sides are analytic in λ.
    let mirror_arg = cr(1.0) / class.adj_scalar(lambda);
    let mirrored = class.adj(&eval_q(sys, mirror_arg)) * (class.eps_c() * lambda * lambda);
    Ok(fro(&(q - mirrored)))
}

pub fn pair_residual(sys: &PalindromicSystem, pair: &StandardPair) -> Result<f64> {
    sys.pair_residual(&pair.x, &pair.t)
}

/// `(X, T)` with `T` nonsingular; `W = [X; −XT⁻¹]` is formed on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardPair {
    pub x: CMatrix,
    pub t: CMatrix,
}

impl StandardPair {
    /// A partial (invariant) pair, `X` is n×m and `T` m×m.
    pub fn partial(x: CMatrix, t: CMatrix) -> Result<Self> {
        check_pair_dims(x.nrows(), &x, &t)?;
        ensure_finite(&x)?;
        ensure_finite(&t)?;
        if t.nrows() > 0 && rcond(&t) <= 1e-12 {
            return Err(Error::SingularT);
        }
        Ok(Self { x, t })
    }

    /// A full pair, additionally requiring `W` square and nonsingular.
    pub fn full(x: CMatrix, t: CMatrix) -> Result<Self> {
        let pair = Self::partial(x, t)?;
        if pair.t.nrows() != 2 * pair.x.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "full pair needs T of size 2n = {}, got {}",
                2 * pair.x.nrows(),
                pair.t.nrows()
            )));
        }
        if rcond(&pair.w()?) <= 1e-12 {
            return Err(Error::SingularW);
        }
        Ok(pair)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn size(&self) -> usize {
        self.t.nrows()
    }

    pub fn w(&self) -> Result<CMatrix> {
        let tinv = inverse(&self.t).map_err(|_| Error::SingularT)?;
        Ok(vstack(&[&self.x, &(-(&self.x * tinv))]))
    }

    /// `(XY, Y⁻¹TY)`.
    pub fn transform(&self, y: &CMatrix) -> Result<Self> {
        let yinv = inverse(y)?;
        Ok(Self { x: &self.x * y, t: yinv * &self.t * y })
    }

    /// `σ_min(W)/σ_max(W)` as a conditioning diagnostic.
    pub fn w_rcond(&self) -> f64 {
        self.w().map(|w| {
            let s = singular_values(&w);
            match (s.first(), s.last()) {
                (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
                _ => 0.0,
            }
        })
        .unwrap_or(0.0)
    }
}
