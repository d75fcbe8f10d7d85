//! Reference inputs used by tests, benches and the CLI documentation.

use crate::numerics::{c, cr, diag, from_rows, CMatrix, C64, I};
use crate::system::{PalindromicSystem, SymmetryClass};

/// A 4×4 eigenvector matrix with two `(λ, 1/λ⋆)` pairs for the given class.
pub fn reference_pairs(class: SymmetryClass) -> (CMatrix, CMatrix) {
    let o = cr(1.0);
    let z = cr(0.0);
    let x = from_rows(&[
        vec![o, I, z, z],
        vec![cr(2.0), c(0.0, 2.0), o, z],
        vec![o, o, I, I],
        vec![o, -o, o, -o],
    ]);
    let a = c(1.0, 1.0);
    let b = c(2.0, 3.0);
    let t = diag(&[a, class.partner(a), b, class.partner(b)]);
    (x, t)
}

/// An order-3 system together with the eigenvalue pair to replace and its substitute.
pub struct UpdateCase {
    pub system: PalindromicSystem,
    pub replace: [C64; 2],
    pub with: [C64; 2],
}

fn m3(rows: [[C64; 3]; 3]) -> CMatrix {
    from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

fn r(x: f64) -> C64 {
    cr(x)
}

pub fn reference_update(class: SymmetryClass) -> UpdateCase {
    let hermitian_a1 = m3([
        [c(2.0, -5.0), c(1.0, 2.0), c(1.0, -2.0)],
        [c(1.0, 2.0), c(-1.0, 1.0), c(1.0, 1.0)],
        [c(1.0, -2.0), c(1.0, 1.0), c(1.0, 3.0)],
    ]);
    let (a1, a0, replace, with) = match (class.star, class.epsilon) {
        (crate::numerics::Star::Transpose, 1) => (
            m3([
                [r(2.0), c(1.0, 2.0), c(1.0, -2.0)],
                [r(1.0), c(-1.0, 1.0), c(1.0, 1.0)],
                [c(1.0, -2.0), c(1.0, 1.0), r(1.0)],
            ]),
            m3([
                [r(4.0), c(-3.0, 1.0), r(5.0)],
                [c(-3.0, 1.0), r(1.0), r(-1.0)],
                [r(5.0), r(-1.0), r(-1.0)],
            ]),
            [c(-4.0685, 10.3032), c(-0.0332, -0.0840)],
            c(-6.0, 9.0),
        ),
        (crate::numerics::Star::Transpose, _) => (
            m3([[r(2.0), r(1.0), r(1.0)], [r(1.0), r(-1.0), r(1.0)], [r(1.0), r(1.0), r(1.0)]]),
            m3([[r(0.0), r(-3.0), r(5.0)], [r(3.0), r(0.0), r(-1.0)], [r(-5.0), r(1.0), r(0.0)]]),
            [r(4.2361), r(0.2361)],
            r(4.0),
        ),
        (_, 1) => (
            hermitian_a1,
            m3([[r(4.0), r(-3.0), r(5.0)], [r(-3.0), r(1.0), r(-1.0)], [r(5.0), r(-1.0), r(-1.0)]]),
            [c(0.8745, 0.6115), c(0.7680, 0.5371)],
            c(1.0, 1.0),
        ),
        (_, _) => (
            hermitian_a1,
            m3([[r(0.0), r(-3.0), r(5.0)], [r(3.0), r(0.0), r(-1.0)], [r(-5.0), r(1.0), r(0.0)]]),
            [c(0.8195, -2.4199), c(0.1255, -0.3707)],
            c(1.0, -2.5),
        ),
    };
    UpdateCase {
        system: PalindromicSystem::new(class, a1, a0).expect("reference system is valid"),
        replace,
        with: [with, class.partner(with)],
    }
}
