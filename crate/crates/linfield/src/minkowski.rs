//! Minkowski four-vectors and the Dirac matrix algebra.
//!
//! Metric signature `(+,-,-,-)`, so `u . v = u^0 v^0 - u_vec . v_vec`. The
//! gamma matrices are fixed in the Dirac representation,
//!
//! ```text
//! gamma^0 = diag(1, 1, -1, -1),   gamma^i = [[0, sigma_i], [-sigma_i, 0]],
//! ```
//!
//! which satisfies `{gamma^j, gamma^k} = 2 g^{jk}` and `Tr(gamma^j gamma^k)
//! = 4 g^{jk}`. Slash contraction uses covariant components, `slash(v) =
//! v^0 gamma^0 - sum_i v^i gamma^i = v_j gamma^j`, so that `slash(v)^2 =
//! v^2 * 1`. The spin adjoint of a matrix is `A^* = gamma^0 A^dagger
//! gamma^0`; it reverses products and fixes every `slash(v)` with real `v`.
//!
//! [`vector_component`] inverts the slash map on its image: for any matrix
//! `A` the contravariant components `(1/4) Tr(gamma^j A)` recover `v` from
//! `A = slash(v) + (terms without a vector part)`.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex;
use thiserror::Error;

/// Complex scalar.
pub type C64 = Complex<f64>;
/// Complex 4x4 matrix acting on spinors.
pub type SpinMatrix = Matrix4<C64>;

/// A spinor: element of the four-dimensional complex spin space.
pub type SpinVector = Vector4<C64>;

/// Errors from constructing kinematic data.
#[derive(Debug, Error)]
pub enum MinkowskiError {
    /// A component was NaN or infinite.
    #[error("four-vector components must be finite, got ({0}, {1}, {2}, {3})")]
    NonFinite(f64, f64, f64, f64),
}

/// A real four-vector `(t, x, y, z)` with `t` the frequency component.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl FourVector {
    /// Validated constructor; rejects non-finite components.
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Result<Self, MinkowskiError> {
        if t.is_finite() && x.is_finite() && y.is_finite() && z.is_finite() {
            Ok(FourVector { t, x, y, z })
        } else {
            Err(MinkowskiError::NonFinite(t, x, y, z))
        }
    }

    /// Unchecked constructor for internally generated (finite) data.
    pub const fn from_components(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector { t, x, y, z }
    }

    pub const fn zero() -> Self {
        FourVector {
            t: 0.0,
            x: 0.0,
            y: 0.0,
            z: 0.0,
        }
    }

    /// Minkowski inner product `u . v = u^0 v^0 - u_vec . v_vec`.
    pub fn dot(&self, other: &FourVector) -> f64 {
        self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z
    }

    /// Minkowski square `v . v`.
    pub fn square(&self) -> f64 {
        self.dot(self)
    }

    /// Euclidean norm of the spatial part.
    pub fn spatial_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Unit vector along the spatial part; `None` when it vanishes.
    pub fn spatial_unit(&self) -> Option<[f64; 3]> {
        let n = self.spatial_norm();
        if n == 0.0 {
            None
        } else {
            Some([self.x / n, self.y / n, self.z / n])
        }
    }

    pub fn scale(&self, s: f64) -> FourVector {
        FourVector {
            t: s * self.t,
            x: s * self.x,
            y: s * self.y,
            z: s * self.z,
        }
    }

    pub fn add(&self, other: &FourVector) -> FourVector {
        FourVector {
            t: self.t + other.t,
            x: self.x + other.x,
            y: self.y + other.y,
            z: self.z + other.z,
        }
    }

    pub fn sub(&self, other: &FourVector) -> FourVector {
        FourVector {
            t: self.t - other.t,
            x: self.x - other.x,
            y: self.y - other.y,
            z: self.z - other.z,
        }
    }

    pub fn neg(&self) -> FourVector {
        self.scale(-1.0)
    }
}

impl std::ops::Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        FourVector::add(&self, &rhs)
    }
}

impl std::ops::Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector::sub(&self, &rhs)
    }
}

impl std::ops::Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector::neg(&self)
    }
}

impl std::ops::Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, rhs: f64) -> FourVector {
        self.scale(rhs)
    }
}

/// A four-vector with complex components (Fourier modes of real potentials).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexFourVector {
    pub t: C64,
    pub x: C64,
    pub y: C64,
    pub z: C64,
}

impl ComplexFourVector {
    pub fn new(t: C64, x: C64, y: C64, z: C64) -> Self {
        ComplexFourVector { t, x, y, z }
    }

    pub fn zero() -> Self {
        let z = C64::new(0.0, 0.0);
        ComplexFourVector {
            t: z,
            x: z,
            y: z,
            z,
        }
    }

    pub fn from_real(v: &FourVector) -> Self {
        ComplexFourVector {
            t: C64::new(v.t, 0.0),
            x: C64::new(v.x, 0.0),
            y: C64::new(v.y, 0.0),
            z: C64::new(v.z, 0.0),
        }
    }

    /// Componentwise complex conjugate (the Fourier mode of a real field at
    /// `-q` is the conjugate of the mode at `q`).
    pub fn conj(&self) -> Self {
        ComplexFourVector {
            t: self.t.conj(),
            x: self.x.conj(),
            y: self.y.conj(),
            z: self.z.conj(),
        }
    }

    /// Bilinear (not sesquilinear) Minkowski pairing with a real vector.
    pub fn dot_real(&self, v: &FourVector) -> C64 {
        self.t * v.t - self.x * v.x - self.y * v.y - self.z * v.z
    }

    /// Bilinear Minkowski pairing with another complex vector.
    pub fn dot(&self, v: &ComplexFourVector) -> C64 {
        self.t * v.t - self.x * v.x - self.y * v.y - self.z * v.z
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexFourVector {
            t: self.t * s,
            x: self.x * s,
            y: self.y * s,
            z: self.z * s,
        }
    }

    pub fn add(&self, other: &ComplexFourVector) -> Self {
        ComplexFourVector {
            t: self.t + other.t,
            x: self.x + other.x,
            y: self.y + other.y,
            z: self.z + other.z,
        }
    }
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

fn m(rows: [[C64; 4]; 4]) -> SpinMatrix {
    SpinMatrix::from_fn(|r, c| rows[r][c])
}

/// Contravariant gamma matrix `gamma^j`, `j = 0..=3`, Dirac representation.
pub fn gamma(j: usize) -> SpinMatrix {
    let n1 = -ONE;
    let ni = -I;
    match j {
        0 => m([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, n1, ZERO],
            [ZERO, ZERO, ZERO, n1],
        ]),
        1 => m([
            [ZERO, ZERO, ZERO, ONE],
            [ZERO, ZERO, ONE, ZERO],
            [ZERO, n1, ZERO, ZERO],
            [n1, ZERO, ZERO, ZERO],
        ]),
        2 => m([
            [ZERO, ZERO, ZERO, ni],
            [ZERO, ZERO, I, ZERO],
            [ZERO, I, ZERO, ZERO],
            [ni, ZERO, ZERO, ZERO],
        ]),
        3 => m([
            [ZERO, ZERO, ONE, ZERO],
            [ZERO, ZERO, ZERO, n1],
            [n1, ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO],
        ]),
        _ => panic!("gamma index out of range: {j}"),
    }
}

/// The chirality matrix `gamma^5 = i gamma^0 gamma^1 gamma^2 gamma^3`.
///
/// Provided for completeness of the Clifford basis; the shell kernels and
/// perturbations in this crate are built without it.
pub fn gamma5() -> SpinMatrix {
    gamma(0) * gamma(1) * gamma(2) * gamma(3) * I
}

/// Identity on spinor space.
pub fn identity() -> SpinMatrix {
    SpinMatrix::identity()
}

/// Slash contraction `v_j gamma^j = v^0 gamma^0 - sum_i v^i gamma^i`.
pub fn slash(v: &FourVector) -> SpinMatrix {
    gamma(0) * C64::new(v.t, 0.0)
        - gamma(1) * C64::new(v.x, 0.0)
        - gamma(2) * C64::new(v.y, 0.0)
        - gamma(3) * C64::new(v.z, 0.0)
}

/// Slash contraction for a complex four-vector.
pub fn slash_c(v: &ComplexFourVector) -> SpinMatrix {
    gamma(0) * v.t - gamma(1) * v.x - gamma(2) * v.y - gamma(3) * v.z
}

/// Spin adjoint `A^* = gamma^0 A^dagger gamma^0`.
pub fn spin_adjoint(a: &SpinMatrix) -> SpinMatrix {
    gamma(0) * a.adjoint() * gamma(0)
}

/// Indefinite spin inner product of two spinors, `<u|v> = u^dagger gamma^0 v`
/// (antilinear in the first argument).
pub fn spin_inner(u: &SpinVector, v: &SpinVector) -> C64 {
    u.dotc(&(gamma(0) * v))
}

/// Minkowski inner product `u.v = u^0 v^0 - u_vec . v_vec` (free-function
/// form of [`FourVector::dot`]).
pub fn minkowski_dot(u: &FourVector, v: &FourVector) -> f64 {
    u.dot(v)
}

/// Contravariant vector component of a spin matrix: `v^j = (1/4) Tr(gamma^j A)`.
///
/// Recovers `v` from `A = slash(v)` and annihilates the scalar, tensor, and
/// pseudo parts of the Clifford decomposition.
pub fn vector_component(a: &SpinMatrix) -> ComplexFourVector {
    let quarter = C64::new(0.25, 0.0);
    ComplexFourVector {
        t: (gamma(0) * a).trace() * quarter,
        x: (gamma(1) * a).trace() * quarter,
        y: (gamma(2) * a).trace() * quarter,
        z: (gamma(3) * a).trace() * quarter,
    }
}

/// Frobenius norm of a spin matrix, used for scale-relative comparisons.
pub fn matrix_norm(a: &SpinMatrix) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn metric(j: usize, k: usize) -> f64 {
        if j != k {
            0.0
        } else if j == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn random_vec(rng: &mut ChaCha8Rng) -> FourVector {
        FourVector::from_components(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        )
    }

    fn random_matrix(rng: &mut ChaCha8Rng) -> SpinMatrix {
        SpinMatrix::from_fn(|_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn clifford_anticommutators() {
        for j in 0..4 {
            for k in 0..4 {
                let anti = gamma(j) * gamma(k) + gamma(k) * gamma(j);
                let expected = identity() * C64::new(2.0 * metric(j, k), 0.0);
                assert!(matrix_norm(&(anti - expected)) < 1e-14, "j={j} k={k}");
            }
        }
    }

    #[test]
    fn gamma_trace_orthogonality() {
        for j in 0..4 {
            for k in 0..4 {
                let tr = (gamma(j) * gamma(k)).trace();
                assert_relative_eq!(tr.re, 4.0 * metric(j, k), epsilon = 1e-14);
                assert!(tr.im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn slash_squares_to_minkowski_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..8 {
            let v = random_vec(&mut rng);
            let sq = slash(&v) * slash(&v);
            let expected = identity() * C64::new(v.square(), 0.0);
            assert!(matrix_norm(&(sq - expected)) < 1e-13);
        }
    }

    #[test]
    fn chirality_matrix_anticommutes() {
        let g5 = gamma5();
        assert!(matrix_norm(&(g5 * g5 - identity())) < 1e-14);
        for j in 0..4 {
            let anti = g5 * gamma(j) + gamma(j) * g5;
            assert!(matrix_norm(&anti) < 1e-14);
        }
    }

    #[test]
    fn spin_adjoint_is_an_involution_reversing_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_matrix(&mut rng);
        let b = random_matrix(&mut rng);
        let twice = spin_adjoint(&spin_adjoint(&a));
        assert!(matrix_norm(&(twice - a)) < 1e-14);
        let prod = spin_adjoint(&(a * b));
        let reversed = spin_adjoint(&b) * spin_adjoint(&a);
        assert!(matrix_norm(&(prod - reversed)) < 1e-13);
    }

    #[test]
    fn spin_adjoint_fixes_real_slashes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..4 {
            let v = random_vec(&mut rng);
            let s = slash(&v);
            assert!(matrix_norm(&(spin_adjoint(&s) - s)) < 1e-14);
        }
    }

    #[test]
    fn vector_component_inverts_slash() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..6 {
            let v = random_vec(&mut rng);
            // add a scalar part that the projection must ignore
            let a = slash(&v) + identity() * C64::new(rng.gen_range(-1.0..1.0), 0.3);
            let w = vector_component(&a);
            assert_relative_eq!(w.t.re, v.t, epsilon = 1e-13);
            assert_relative_eq!(w.x.re, v.x, epsilon = 1e-13);
            assert_relative_eq!(w.y.re, v.y, epsilon = 1e-13);
            assert_relative_eq!(w.z.re, v.z, epsilon = 1e-13);
            assert!(w.t.im.abs() + w.x.im.abs() + w.y.im.abs() + w.z.im.abs() < 1e-13);
        }
    }

    #[test]
    fn three_slash_vector_component_identity() {
        // (1/4) Tr(gamma^j u-slash v-slash w-slash)
        //   = u^j (v.w) - v^j (u.w) + w^j (u.v)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_vec(&mut rng);
        let v = random_vec(&mut rng);
        let w = random_vec(&mut rng);
        let triple = slash(&u) * slash(&v) * slash(&w);
        let got = vector_component(&triple);
        let expect = |uj: f64, vj: f64, wj: f64| {
            uj * v.dot(&w) - vj * u.dot(&w) + wj * u.dot(&v)
        };
        assert_relative_eq!(got.t.re, expect(u.t, v.t, w.t), max_relative = 1e-12);
        assert_relative_eq!(got.x.re, expect(u.x, v.x, w.x), max_relative = 1e-12);
        assert_relative_eq!(got.z.re, expect(u.z, v.z, w.z), max_relative = 1e-12);
    }

    #[test]
    fn rejects_non_finite_components() {
        assert!(FourVector::new(f64::NAN, 0.0, 0.0, 0.0).is_err());
        assert!(FourVector::new(0.0, f64::INFINITY, 0.0, 0.0).is_err());
        assert!(FourVector::new(1.0, 2.0, 3.0, 4.0).is_ok());
    }
}
