//! Momentum-space distribution families on mass shells and their pairings.
//!
//! The family `T^[n]_{nu}` lives on or inside the past mass shell
//! `{p^2 >= nu, p^0 < 0}`:
//!
//! ```text
//! T^[0]_nu(p)  = delta(p^2 - nu) Theta(-p^0)
//! T^[n]_nu(p)  = ((-1)^n / (n-1)!) 4^{-n} (p^2 - nu)^{n-1} Theta(p^2 - nu) Theta(-p^0),  n >= 1
//! T^[-1]_nu    = -4 delta'(p^2 - nu) Theta(-p^0)
//! T^[-2]_nu    = 16 delta''(p^2 - nu) Theta(-p^0)
//! ```
//!
//! `Tbar^[n]_nu(p) = T^[n]_nu(-p)` is the reflected (future-shell) family and
//! `K^[n]_nu = (i/4 pi^2)(Tbar^[n]_nu - T^[n]_nu)` the odd combination whose
//! massless order-zero member is the causal fundamental kernel
//! `K0 = (i/4 pi^2) delta(p^2) eps(p^0)`.
//!
//! Pairings with smooth decaying test functions are computed by exact shell
//! reduction (`omega = -sqrt(|k|^2 + nu)`, Jacobian `1/(2|omega|)`); the
//! derivative orders `-1`, `-2` differentiate the pulled-back integrand in
//! the shell variable analytically, never through a numerical delta
//! approximation. Convolutions with the bare cone kernel
//! `delta(p^2) eps(p^0)` reduce to a one-dimensional integral in the shell
//! energy `W` whose mass dependence sits entirely in the integration
//! boundaries, so `delta'`/`delta''` convolutions become exact boundary
//! terms. A closed form for the exponentially regularized case and an
//! independent cylindrical-coordinate quadrature are provided as oracles.

use crate::minkowski::{C64, FourVector};
use crate::quad::{
    gauss_legendre, integrate_adaptive, integrate_adaptive_split, AdaptiveConfig, QuadError,
};
use std::sync::Arc;
use thiserror::Error;

/// Errors from kernel construction, pairing, and convolution.
#[derive(Debug, Error)]
pub enum KernelError {
    /// Pointwise evaluation requested for a distributional order.
    #[error("singular symbol: use integrate_against")]
    SingularSymbol,
    /// The pairing has no finite value (missing decay or a non-integrable
    /// shell singularity).
    #[error("divergent integral")]
    DivergentIntegral,
    /// Convolution evaluation on the axis |p_vec| = 0 where the reduced
    /// integral has a 1/|p_vec| prefactor.
    #[error("on-axis evaluation undefined; evaluate a limit sequence")]
    OnAxis,
    /// Massless shell meeting the cone tangentially (lightlike evaluation
    /// point with vanishing shell mass).
    #[error("ill-defined product of distributions")]
    IllDefinedProduct,
    /// Symbol parameters outside the admitted family.
    #[error("invalid kernel symbol: {0}")]
    InvalidSymbol(String),
    /// Operation not defined for the given combination of arguments.
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    /// Underlying quadrature failure.
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Which of the three related distribution families a symbol belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    /// Past shell family `T^[n]_nu`.
    T,
    /// Reflected (future shell) family `Tbar^[n]_nu(p) = T^[n]_nu(-p)`.
    Tbar,
    /// Odd causal combination `(i/4 pi^2)(Tbar - T)`.
    K,
}

/// One member of the shell distribution families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSymbol {
    pub family: KernelFamily,
    /// Order `n >= -2`; `n >= 1` is a regular function, `n <= 0` a
    /// (derivative of a) shell measure.
    pub order: i32,
    /// Shell mass square `nu >= 0`.
    pub mass_sq: f64,
    /// Overall sign carried through reflections of the odd `K` family.
    pub sign: f64,
}

impl KernelSymbol {
    /// Validated constructor with positive sign.
    pub fn new(family: KernelFamily, order: i32, mass_sq: f64) -> Result<Self, KernelError> {
        if order < -2 {
            return Err(KernelError::InvalidSymbol(format!(
                "order {order} below -2"
            )));
        }
        if !(mass_sq >= 0.0) || !mass_sq.is_finite() {
            return Err(KernelError::InvalidSymbol(format!(
                "mass square {mass_sq} must be finite and >= 0"
            )));
        }
        Ok(KernelSymbol {
            family,
            order,
            mass_sq,
            sign: 1.0,
        })
    }

    /// Massless symbol of the given family and order.
    pub fn massless(family: KernelFamily, order: i32) -> Self {
        KernelSymbol::new(family, order, 0.0).expect("massless symbol is always valid")
    }
}

/// Reflection `p -> -p`: swaps `T` and `Tbar`; the odd `K` family flips sign.
pub fn reflect(sym: &KernelSymbol) -> KernelSymbol {
    let mut out = *sym;
    match sym.family {
        KernelFamily::T => out.family = KernelFamily::Tbar,
        KernelFamily::Tbar => out.family = KernelFamily::T,
        KernelFamily::K => out.sign = -sym.sign,
    }
    out
}

/// Exponential decay class of a test function in the frequency variable,
/// used to pick truncation radii and to reject divergent pairings.
#[derive(Debug, Clone, Copy)]
pub enum DecayClass {
    /// No known decay; pairings on unbounded domains are rejected.
    NoDecay,
    /// Bounded by `C e^{rate * p^0}` as `p^0 -> -inf` (past decay).
    PastExponential(f64),
    /// Bounded by `C e^{-rate * p^0}` as `p^0 -> +inf` (future decay).
    FutureExponential(f64),
    /// Vanishes identically for `|p^0| > radius`.
    CompactFrequency(f64),
}

impl DecayClass {
    fn reflected(self) -> DecayClass {
        match self {
            DecayClass::PastExponential(r) => DecayClass::FutureExponential(r),
            DecayClass::FutureExponential(r) => DecayClass::PastExponential(r),
            other => other,
        }
    }
}

/// Whether a test function depends on the spatial direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularProfile {
    /// Depends on `p^0` (and possibly `|p_vec|`) only through the frequency;
    /// angular averages are trivial.
    FrequencyOnly,
    /// Full dependence; angular averages use a product quadrature.
    General,
}

/// A smooth complex-valued function on momentum space with optional
/// registered analytic structure (exact frequency derivatives and wave
/// operator powers). The finite-difference defaults exist as oracle paths
/// for the registered families.
pub trait MomentumFunction {
    fn eval(&self, p: &FourVector) -> C64;

    /// First frequency derivative; default 4th-order centered differences.
    fn d_omega(&self, p: &FourVector) -> C64 {
        fd_first(&|q| self.eval(q), p, 0)
    }

    /// Second frequency derivative; default 4th-order centered differences.
    fn d2_omega(&self, p: &FourVector) -> C64 {
        fd_second(&|q| self.eval(q), p, 0)
    }

    /// `n`-th power of the wave operator `box = d^2/d omega^2 - Laplacian`;
    /// default iterated 4th-order finite differences.
    fn box_power(&self, n: u32, p: &FourVector) -> C64 {
        fd_box_power(&|q| self.eval(q), n, p)
    }

    /// Frequency decay class.
    fn decay(&self) -> DecayClass {
        DecayClass::NoDecay
    }

    /// Angular structure.
    fn angular(&self) -> AngularProfile {
        AngularProfile::General
    }

    /// Polynomial growth degree in `|p_vec|` riding on the exponential
    /// decay, used when choosing truncation radii.
    fn poly_degree(&self) -> f64 {
        0.0
    }

    /// Radius `r` such that the function vanishes identically for
    /// `|p^0| <= r`; zero when no such neighborhood is registered.
    fn vanishes_for_small_frequency(&self) -> f64 {
        0.0
    }
}

fn fd_step(p: &FourVector) -> f64 {
    let norm = (p.t * p.t + p.x * p.x + p.y * p.y + p.z * p.z).sqrt();
    1e-3 * (norm + 1.0)
}

fn shift(p: &FourVector, axis: usize, h: f64) -> FourVector {
    let mut q = *p;
    match axis {
        0 => q.t += h,
        1 => q.x += h,
        2 => q.y += h,
        _ => q.z += h,
    }
    q
}

fn fd_first(f: &dyn Fn(&FourVector) -> C64, p: &FourVector, axis: usize) -> C64 {
    let h = fd_step(p);
    (f(&shift(p, axis, -2.0 * h)) - f(&shift(p, axis, -h)) * 8.0
        + f(&shift(p, axis, h)) * 8.0
        - f(&shift(p, axis, 2.0 * h)))
        / (12.0 * h)
}

fn fd_second(f: &dyn Fn(&FourVector) -> C64, p: &FourVector, axis: usize) -> C64 {
    let h = fd_step(p);
    (-f(&shift(p, axis, -2.0 * h)) + f(&shift(p, axis, -h)) * 16.0 - f(p) * 30.0
        + f(&shift(p, axis, h)) * 16.0
        - f(&shift(p, axis, 2.0 * h)))
        / (12.0 * h * h)
}

fn fd_box(f: &dyn Fn(&FourVector) -> C64, p: &FourVector) -> C64 {
    fd_second(f, p, 0) - fd_second(f, p, 1) - fd_second(f, p, 2) - fd_second(f, p, 3)
}

fn fd_box_power(f: &dyn Fn(&FourVector) -> C64, n: u32, p: &FourVector) -> C64 {
    match n {
        0 => f(p),
        1 => fd_box(f, p),
        _ => fd_box(&|q: &FourVector| fd_box_power(f, n - 1, q), p),
    }
}

/// The exponentially regularized plane factor `e^{eps p^0}`.
#[derive(Debug, Clone, Copy)]
pub struct ExponentialWave {
    pub eps: f64,
}

impl MomentumFunction for ExponentialWave {
    fn eval(&self, p: &FourVector) -> C64 {
        C64::new((self.eps * p.t).exp(), 0.0)
    }
    fn d_omega(&self, p: &FourVector) -> C64 {
        self.eval(p) * self.eps
    }
    fn d2_omega(&self, p: &FourVector) -> C64 {
        self.eval(p) * self.eps * self.eps
    }
    fn box_power(&self, n: u32, p: &FourVector) -> C64 {
        self.eval(p) * self.eps.powi(2 * n as i32)
    }
    fn decay(&self) -> DecayClass {
        DecayClass::PastExponential(self.eps)
    }
    fn angular(&self) -> AngularProfile {
        AngularProfile::FrequencyOnly
    }
}

/// A function of the frequency alone, `V(p) = f(p^0)`, with registered
/// analytic derivatives `f^{(j)}`. For such functions the wave operator
/// reduces to `box^n V = f^{(2n)}(p^0)`.
#[derive(Clone)]
pub struct OmegaProfile {
    derivs: Arc<dyn Fn(f64, u32) -> C64 + Send + Sync>,
    decay: DecayClass,
    zero_radius: f64,
}

impl OmegaProfile {
    pub fn new(derivs: Arc<dyn Fn(f64, u32) -> C64 + Send + Sync>, decay: DecayClass) -> Self {
        OmegaProfile {
            derivs,
            decay,
            zero_radius: 0.0,
        }
    }

    /// Declares that the profile vanishes identically on `|omega| <= radius`.
    pub fn with_zero_radius(mut self, radius: f64) -> Self {
        self.zero_radius = radius;
        self
    }

    /// `j`-th derivative of the profile at frequency `omega`.
    pub fn deriv(&self, omega: f64, j: u32) -> C64 {
        (self.derivs)(omega, j)
    }
}

impl MomentumFunction for OmegaProfile {
    fn eval(&self, p: &FourVector) -> C64 {
        (self.derivs)(p.t, 0)
    }
    fn d_omega(&self, p: &FourVector) -> C64 {
        (self.derivs)(p.t, 1)
    }
    fn d2_omega(&self, p: &FourVector) -> C64 {
        (self.derivs)(p.t, 2)
    }
    fn box_power(&self, n: u32, p: &FourVector) -> C64 {
        (self.derivs)(p.t, 2 * n)
    }
    fn decay(&self) -> DecayClass {
        self.decay
    }
    fn angular(&self) -> AngularProfile {
        AngularProfile::FrequencyOnly
    }
    fn vanishes_for_small_frequency(&self) -> f64 {
        self.zero_radius
    }
}

/// Harmonic-polynomial ansatz `V(p) = f(p^0) |p_vec|^l Y_lm(direction)`.
/// Since `|p_vec|^l Y_lm` is a harmonic polynomial of the spatial variables,
/// `box^n V = f^{(2n)}(p^0) |p_vec|^l Y_lm`.
#[derive(Clone)]
pub struct RadialHarmonic {
    pub profile: OmegaProfile,
    pub l: usize,
    pub m: i64,
}

impl RadialHarmonic {
    fn spatial_factor(&self, p: &FourVector) -> C64 {
        let r = p.spatial_norm();
        if r == 0.0 {
            return if self.l == 0 {
                C64::new(1.0 / (4.0 * std::f64::consts::PI).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
        }
        let dir = [p.x / r, p.y / r, p.z / r];
        crate::ylm::ylm_dir(self.l, self.m, dir) * r.powi(self.l as i32)
    }
}

impl MomentumFunction for RadialHarmonic {
    fn eval(&self, p: &FourVector) -> C64 {
        self.profile.deriv(p.t, 0) * self.spatial_factor(p)
    }
    fn d_omega(&self, p: &FourVector) -> C64 {
        self.profile.deriv(p.t, 1) * self.spatial_factor(p)
    }
    fn d2_omega(&self, p: &FourVector) -> C64 {
        self.profile.deriv(p.t, 2) * self.spatial_factor(p)
    }
    fn box_power(&self, n: u32, p: &FourVector) -> C64 {
        self.profile.deriv(p.t, 2 * n) * self.spatial_factor(p)
    }
    fn decay(&self) -> DecayClass {
        self.profile.decay
    }
    fn angular(&self) -> AngularProfile {
        AngularProfile::General
    }
    fn poly_degree(&self) -> f64 {
        self.l as f64
    }
    fn vanishes_for_small_frequency(&self) -> f64 {
        self.profile.zero_radius
    }
}

/// Wrapper for ad-hoc test functions built from closures.
#[derive(Clone)]
pub struct GenericFn {
    eval: Arc<dyn Fn(&FourVector) -> C64 + Send + Sync>,
    decay: DecayClass,
    angular: AngularProfile,
    poly_degree: f64,
}

impl GenericFn {
    pub fn new(
        eval: Arc<dyn Fn(&FourVector) -> C64 + Send + Sync>,
        decay: DecayClass,
        angular: AngularProfile,
    ) -> Self {
        GenericFn {
            eval,
            decay,
            angular,
            poly_degree: 0.0,
        }
    }

    pub fn with_poly_degree(mut self, d: f64) -> Self {
        self.poly_degree = d;
        self
    }
}

impl MomentumFunction for GenericFn {
    fn eval(&self, p: &FourVector) -> C64 {
        (self.eval)(p)
    }
    fn decay(&self) -> DecayClass {
        self.decay
    }
    fn angular(&self) -> AngularProfile {
        self.angular
    }
    fn poly_degree(&self) -> f64 {
        self.poly_degree
    }
}

/// View of a test function composed with `p -> -p`.
struct ReflectedFn<'a>(&'a dyn MomentumFunction);

impl MomentumFunction for ReflectedFn<'_> {
    fn eval(&self, p: &FourVector) -> C64 {
        self.0.eval(&p.neg())
    }
    fn d_omega(&self, p: &FourVector) -> C64 {
        -self.0.d_omega(&p.neg())
    }
    fn d2_omega(&self, p: &FourVector) -> C64 {
        self.0.d2_omega(&p.neg())
    }
    fn box_power(&self, n: u32, p: &FourVector) -> C64 {
        self.0.box_power(n, &p.neg())
    }
    fn decay(&self) -> DecayClass {
        self.0.decay().reflected()
    }
    fn angular(&self) -> AngularProfile {
        self.0.angular()
    }
    fn poly_degree(&self) -> f64 {
        self.0.poly_degree()
    }
    fn vanishes_for_small_frequency(&self) -> f64 {
        self.0.vanishes_for_small_frequency()
    }
}

/// Pointwise value of the past-shell regular density for order `n >= 1`
/// (zero off the support), without the family sign bookkeeping.
fn regular_t_value(order: i32, nu: f64, p: &FourVector) -> f64 {
    debug_assert!(order >= 1);
    if p.t >= 0.0 {
        return 0.0;
    }
    let u = p.square() - nu;
    if u < 0.0 {
        return 0.0;
    }
    let n = order as u32;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let fact: f64 = (1..n).map(|k| k as f64).product::<f64>().max(1.0);
    sign / fact * 0.25f64.powi(order) * u.powi(order - 1)
}

/// Pointwise evaluation of a regular-order symbol (`order >= 1`).
///
/// The `T`/`Tbar` values are real; the `K` family returns the imaginary
/// combination `(i/4 pi^2)(Tbar - T)`.
pub fn eval_regular(sym: &KernelSymbol, p: &FourVector) -> Result<C64, KernelError> {
    if sym.order < 1 {
        return Err(KernelError::SingularSymbol);
    }
    let value = match sym.family {
        KernelFamily::T => C64::new(regular_t_value(sym.order, sym.mass_sq, p), 0.0),
        KernelFamily::Tbar => C64::new(regular_t_value(sym.order, sym.mass_sq, &p.neg()), 0.0),
        KernelFamily::K => {
            let diff = regular_t_value(sym.order, sym.mass_sq, &p.neg())
                - regular_t_value(sym.order, sym.mass_sq, p);
            C64::new(0.0, diff / (4.0 * std::f64::consts::PI * std::f64::consts::PI))
        }
    };
    Ok(value * sym.sign)
}

/// Truncation radius for a past-shell radial integral of a function with the
/// given decay class (`|f| <= C e^{rate * omega} R^deg` on the shell).
pub(crate) fn shell_truncation_radius(
    decay: &DecayClass,
    nu: f64,
    deg: f64,
) -> Result<Option<f64>, KernelError> {
    const LOG_CUT: f64 = 45.0;
    match decay {
        DecayClass::PastExponential(rate) => {
            let mut r = LOG_CUT / rate;
            for _ in 0..4 {
                r = (LOG_CUT + deg * (1.0 + r).ln()) / rate;
            }
            Ok(Some(r + nu.sqrt() + 1.0))
        }
        DecayClass::CompactFrequency(rc) => {
            let r2 = rc * rc - nu;
            Ok(Some(if r2 > 0.0 { r2.sqrt() } else { 0.0 }))
        }
        _ => Err(KernelError::DivergentIntegral),
    }
}

/// Angular average `integral over directions of g(p0, R * n) dOmega`.
fn angular_average<G: Fn(&FourVector) -> C64>(
    g: &G,
    angular: AngularProfile,
    p0: f64,
    r: f64,
) -> C64 {
    match angular {
        AngularProfile::FrequencyOnly => {
            g(&FourVector::from_components(p0, 0.0, 0.0, r)) * (4.0 * std::f64::consts::PI)
        }
        AngularProfile::General => {
            let rule = gauss_legendre(50);
            let nphi = 64usize;
            let dphi = 2.0 * std::f64::consts::PI / nphi as f64;
            let mut acc = C64::new(0.0, 0.0);
            for (&c, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
                let s = (1.0 - c * c).max(0.0).sqrt();
                let mut ring = C64::new(0.0, 0.0);
                for k in 0..nphi {
                    let phi = dphi * k as f64;
                    let q = FourVector::from_components(
                        p0,
                        r * s * phi.cos(),
                        r * s * phi.sin(),
                        r * c,
                    );
                    ring += g(&q);
                }
                acc += ring * (w * dphi);
            }
            acc
        }
    }
}

/// Pairing of the past-shell family `T^[order]_nu` with a test function,
/// `integral T^[order]_nu(k) f(k) d^4k`.
fn pair_t(
    order: i32,
    nu: f64,
    f: &dyn MomentumFunction,
    radial_bound: Option<f64>,
) -> Result<C64, KernelError> {
    let r_hi = match radial_bound {
        Some(r) => r,
        None => match shell_truncation_radius(&f.decay(), nu, f.poly_degree() + 2.0)? {
            Some(r) => r,
            None => return Err(KernelError::DivergentIntegral),
        },
    };
    if r_hi <= 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let cfg = AdaptiveConfig::default();
    let angular = f.angular();
    if order >= 1 {
        // regular density: 2-D (omega, R) quadrature over the shell interior
        let rate = match f.decay() {
            DecayClass::PastExponential(r) => r,
            DecayClass::CompactFrequency(_) => 1.0,
            _ => return Err(KernelError::DivergentIntegral),
        };
        let omega_depth = (45.0 + 2.0 * order as f64 * (1.0 + r_hi).ln()) / rate;
        let n = order as u32;
        let weight_sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let weight_fact: f64 = (1..n).map(|k| k as f64).product::<f64>().max(1.0);
        let weight_pref = weight_sign / weight_fact * 0.25f64.powi(order);
        let inner_failure = std::cell::Cell::new(false);
        let outer = |r: f64| -> C64 {
            if r == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let w_shell = (r * r + nu).sqrt();
            let w_lo = -(w_shell + omega_depth);
            let inner = |om: f64| -> C64 {
                if let DecayClass::CompactFrequency(rc) = f.decay() {
                    if om.abs() > rc {
                        return C64::new(0.0, 0.0);
                    }
                }
                let u = om * om - r * r - nu;
                let weight = weight_pref * u.powi(order - 1);
                angular_average(&|q| f.eval(q), angular, om, r) * weight
            };
            match integrate_adaptive(inner, w_lo, -w_shell, &cfg) {
                Ok(v) => v * (r * r),
                Err(_) => {
                    inner_failure.set(true);
                    C64::new(0.0, 0.0)
                }
            }
        };
        let breaks = radial_breaks(r_hi, nu);
        let val = integrate_adaptive_split(outer, 0.0, r_hi, &breaks, &cfg)?;
        if inner_failure.get() {
            return Err(KernelError::Quadrature(QuadError::NoConvergence {
                estimate: val.re,
                error: f64::NAN,
            }));
        }
        return Ok(val);
    }
    if order <= -1 && nu == 0.0 && f.vanishes_for_small_frequency() <= 0.0 {
        // the pulled-back integrand carries 1/omega^3 (or worse) at R -> 0
        return Err(KernelError::DivergentIntegral);
    }
    let r_lo = if nu == 0.0 {
        0.999 * f.vanishes_for_small_frequency()
    } else {
        0.0
    };
    let integrand = |r: f64| -> C64 {
        if r <= 0.0 {
            return C64::new(0.0, 0.0);
        }
        let om = (r * r + nu).sqrt();
        if om == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let p0 = -om;
        let r2 = r * r;
        match order {
            0 => angular_average(&|q| f.eval(q), angular, p0, r) * (r2 / (2.0 * om)),
            -1 => {
                let a0 = angular_average(&|q| f.eval(q), angular, p0, r);
                let a1 = angular_average(&|q| f.d_omega(q), angular, p0, r);
                (-a1 / (om * om) - a0 / (om * om * om)) * r2
            }
            -2 => {
                let a0 = angular_average(&|q| f.eval(q), angular, p0, r);
                let a1 = angular_average(&|q| f.d_omega(q), angular, p0, r);
                let a2 = angular_average(&|q| f.d2_omega(q), angular, p0, r);
                (a2 * 2.0 / om.powi(3) + a1 * 6.0 / om.powi(4) + a0 * 6.0 / om.powi(5)) * r2
            }
            _ => unreachable!(),
        }
    };
    let breaks = radial_breaks(r_hi, nu);
    Ok(integrate_adaptive_split(integrand, r_lo, r_hi, &breaks, &cfg)?)
}

fn radial_breaks(r_hi: f64, nu: f64) -> Vec<f64> {
    let mut v = vec![
        r_hi / 64.0,
        r_hi / 16.0,
        r_hi / 4.0,
        r_hi / 2.0,
    ];
    if nu > 0.0 {
        v.push(nu.sqrt());
    }
    v
}

/// Distributional pairing `integral sym(k) f(k) d^4k`.
///
/// Orders `<= 0` are reduced exactly to the shell; `delta'` and `delta''`
/// act by differentiating the pulled-back integrand in the shell mass.
/// Orders `>= 1` integrate the regular density over the shell interior.
/// `radial_bound` truncates `|k_vec|`; with `None` the bound is derived
/// from the registered decay class (no decay is an error).
pub fn integrate_against(
    sym: &KernelSymbol,
    f: &dyn MomentumFunction,
    radial_bound: Option<f64>,
) -> Result<C64, KernelError> {
    let value = match sym.family {
        KernelFamily::T => pair_t(sym.order, sym.mass_sq, f, radial_bound)?,
        KernelFamily::Tbar => pair_t(sym.order, sym.mass_sq, &ReflectedFn(f), radial_bound)?,
        KernelFamily::K => {
            let future = pair_t(sym.order, sym.mass_sq, &ReflectedFn(f), radial_bound)?;
            let past = pair_t(sym.order, sym.mass_sq, f, radial_bound)?;
            (future - past) * C64::new(0.0, 1.0 / (4.0 * std::f64::consts::PI.powi(2)))
        }
    };
    Ok(value * sym.sign)
}

/// Closed form of the exponentially regularized shell-cone convolution
///
/// ```text
/// I(p; b) = integral delta(k^2 - b) Theta(-k^0) e^{eps k^0}
///           delta((p-k)^2) eps(p^0 - k^0) d^4k
/// ```
///
/// (bare cone kernel, no `i/4 pi^2` factor):
/// with `P = |p_vec|` and `branch(s) = exp((eps/2)(z + b/z))`, `z = p^0 + sP`,
///
/// * `p^2 < 0`:              `(pi / 2 eps P) branch(-1)`
/// * `p^2 > 0`, `p^0 < 0`:   `(pi / 2 eps P) (branch(-1) - branch(+1))`
/// * `p^2 >= 0`, `p^0 > 0`:  `0`
pub fn convolve_k0_oracle(b: f64, eps: f64, p: &FourVector) -> Result<f64, KernelError> {
    if b < 0.0 {
        return Err(KernelError::InvalidSymbol(format!(
            "shell mass square {b} must be >= 0"
        )));
    }
    let pn = p.spatial_norm();
    let scale = (p.t * p.t + pn * pn).sqrt().max(1e-300);
    if pn < 1e-12 * scale {
        return Err(KernelError::OnAxis);
    }
    let psq = p.square();
    let pref = std::f64::consts::PI / (2.0 * eps * pn);
    let branch = |s: f64| -> f64 {
        let z = p.t + s * pn;
        let arg = if b == 0.0 { z } else { z + b / z };
        (0.5 * eps * arg).exp()
    };
    if psq < 0.0 {
        Ok(pref * branch(-1.0))
    } else if p.t < 0.0 {
        Ok(pref * (branch(-1.0) - branch(1.0)))
    } else {
        Ok(0.0)
    }
}

/// Independent brute-force oracle for [`convolve_k0_oracle`]: reduces both
/// delta factors in cylindrical coordinates aligned with `p_vec` (shell
/// delta in `k^0`, cone delta in the parallel component) and integrates the
/// remaining transverse radius and azimuth numerically.
pub fn convolve_k0_cylindrical(b: f64, eps: f64, p: &FourVector) -> Result<f64, KernelError> {
    let pn = p.spatial_norm();
    let scale = (p.t * p.t + pn * pn).sqrt().max(1e-300);
    if pn < 1e-12 * scale {
        return Err(KernelError::OnAxis);
    }
    let psq = p.square();
    let p0 = p.t;
    let kperp_max = 45.0 / eps + pn + p0.abs() + b.sqrt() + 1.0;

    // contribution of all cone-shell intersection points above transverse
    // radius kperp, per unit azimuth
    let radial_part = |kperp: f64| -> f64 {
        if kperp <= 0.0 {
            return 0.0;
        }
        let mut total = 0.0;
        // roots in the component parallel to p_vec
        let mut roots: Vec<f64> = Vec::new();
        if p0.abs() < 1e-12 * scale {
            roots.push((pn * pn - b) / (2.0 * pn));
        } else {
            // squared combined constraint: -4 p^2 x^2 + 4 P (p^2+b) x
            //   + (p^2+b)^2 - 4 (p^0)^2 (kperp^2 + b) = 0
            let a2 = -4.0 * psq;
            let a1 = 4.0 * pn * (psq + b);
            let a0 = (psq + b).powi(2) - 4.0 * p0 * p0 * (kperp * kperp + b);
            if a2.abs() < 1e-14 * scale * scale {
                if a1.abs() > 0.0 {
                    roots.push(-a0 / a1);
                }
            } else {
                let disc = a1 * a1 - 4.0 * a2 * a0;
                if disc >= 0.0 {
                    let sq = disc.sqrt();
                    let q = -0.5 * (a1 + a1.signum() * sq);
                    if q != 0.0 {
                        roots.push(q / a2);
                        roots.push(a0 / q);
                    } else {
                        roots.push(0.0);
                    }
                }
            }
        }
        for kpar in roots {
            let w2 = kpar * kpar + kperp * kperp + b;
            if w2 <= 0.0 {
                continue;
            }
            let w = w2.sqrt();
            // discard spurious roots introduced by squaring
            let g = (p0 + w).powi(2) - (pn - kpar).powi(2) - kperp * kperp;
            if g.abs() > 1e-7 * (scale * scale + w2) {
                continue;
            }
            let jac = (2.0 * (p0 + w) * kpar / w + 2.0 * (pn - kpar)).abs();
            if jac < 1e-12 {
                continue;
            }
            total += kperp * (-eps * w).exp() / (2.0 * w) * (p0 + w).signum() / jac;
        }
        total
    };

    // merge radius where the two parallel roots coalesce (timelike p only)
    let mut inner_edges: Vec<f64> = Vec::new();
    if psq > 0.0 {
        let kc = ((psq - b).abs() / (2.0 * psq.sqrt())).min(kperp_max);
        inner_edges.push(kc);
    }

    let cfg = AdaptiveConfig {
        abs_tol: 1e-11,
        rel_tol: 1e-9,
        max_depth: 40,
    };
    let nphi = 16usize;
    let dphi = 2.0 * std::f64::consts::PI / nphi as f64;
    let mut total = 0.0;
    for _ in 0..nphi {
        let val = if let [kc] = inner_edges.as_slice() {
            // substitute t = sqrt(kc - kperp) on [0, kc] to absorb the
            // inverse-square-root behavior at the merge radius
            let inside = integrate_adaptive(
                |t: f64| C64::new(radial_part(kc - t * t) * 2.0 * t, 0.0),
                0.0,
                kc.sqrt(),
                &cfg,
            )?;
            let outside = integrate_adaptive(
                |k: f64| C64::new(radial_part(k), 0.0),
                *kc,
                kperp_max,
                &cfg,
            )?;
            inside.re + outside.re
        } else {
            integrate_adaptive_split(
                |k: f64| C64::new(radial_part(k), 0.0),
                0.0,
                kperp_max,
                &[kperp_max / 16.0, kperp_max / 4.0],
                &cfg,
            )?
            .re
        };
        total += val * dphi;
    }
    Ok(total)
}

/// One `W`-interval of the reduced cone-shell intersection, with the mass
/// derivative of each moving endpoint.
#[derive(Debug, Clone, Copy)]
struct WSegment {
    lo: f64,
    lo_dnu: f64,
    hi: f64,
    hi_dnu: f64,
}

/// Intersection of the past shell `{k^2 = nu, k^0 = -W}` with the cone
/// `{(p-k)^2 = 0}`, expressed as intervals of `W`, truncated at `w_max`.
fn cone_shell_segments(
    p0: f64,
    pn: f64,
    nu: f64,
    w_max: f64,
) -> Result<Vec<WSegment>, KernelError> {
    let psq = p0 * p0 - pn * pn;
    let scale = p0 * p0 + pn * pn;
    let w_min = nu.sqrt();
    if psq.abs() < 1e-12 * scale {
        if nu < 1e-12 * scale {
            return Err(KernelError::IllDefinedProduct);
        }
        if p0 >= 0.0 {
            return Ok(vec![]);
        }
        // linear support condition for lightlike p
        let b1 = 4.0 * p0 * (psq + nu);
        let c1 = (psq + nu).powi(2) + 4.0 * pn * pn * nu;
        let w_star = -c1 / b1;
        // d/dnu of (-c1/b1): c1' = 2(psq+nu) + 4 pn^2, b1' = 4 p0
        let c1p = 2.0 * (psq + nu) + 4.0 * pn * pn;
        let b1p = 4.0 * p0;
        let dw_dnu = -(c1p * b1 - c1 * b1p) / (b1 * b1);
        if w_star >= w_max {
            return Ok(vec![]);
        }
        return Ok(vec![WSegment {
            lo: w_star.max(w_min),
            lo_dnu: dw_dnu,
            hi: w_max,
            hi_dnu: 0.0,
        }]);
    }
    // roots of (p^2 + nu + 2 p^0 W)^2 - 4 P^2 (W^2 - nu) = 0
    let w_a = (-p0 * (psq + nu) - pn * (psq - nu)) / (2.0 * psq);
    let w_a_dnu = (-p0 + pn) / (2.0 * psq);
    let w_b = (-p0 * (psq + nu) + pn * (psq - nu)) / (2.0 * psq);
    let w_b_dnu = (-p0 - pn) / (2.0 * psq);
    let ((lo, lo_dnu), (hi, hi_dnu)) = if w_a <= w_b {
        ((w_a, w_a_dnu), (w_b, w_b_dnu))
    } else {
        ((w_b, w_b_dnu), (w_a, w_a_dnu))
    };
    if psq > 0.0 {
        // support between the roots
        let lo_c = lo.max(w_min);
        if hi <= lo_c || hi <= 0.0 {
            return Ok(vec![]);
        }
        Ok(vec![WSegment {
            lo: lo_c,
            lo_dnu,
            hi: hi.min(w_max),
            hi_dnu: if hi <= w_max { hi_dnu } else { 0.0 },
        }])
    } else {
        // support above the larger root
        let lo_c = hi.max(w_min);
        if lo_c >= w_max {
            return Ok(vec![]);
        }
        Ok(vec![WSegment {
            lo: lo_c,
            lo_dnu: if hi >= w_min { hi_dnu } else { 0.0 },
            hi: w_max,
            hi_dnu: 0.0,
        }])
    }
}

/// Bare convolution of the past-shell family with the cone kernel,
///
/// ```text
/// J(p) = integral T^[order]_nu(k) V(k) delta((p-k)^2) eps(p^0-k^0) d^4k ,
/// ```
///
/// reduced to `W`-integrals (order 0) or exact boundary terms (orders -1,
/// -2, where the mass dependence sits entirely in the moving interval
/// endpoints).
fn bare_cone_convolve_t(
    order: i32,
    nu: f64,
    v: &dyn MomentumFunction,
    p: &FourVector,
) -> Result<C64, KernelError> {
    let pn = p.spatial_norm();
    let p0 = p.t;
    let scale = (p0 * p0 + pn * pn).sqrt().max(1e-300);
    if pn < 1e-12 * scale {
        return Err(KernelError::OnAxis);
    }
    let rate = match v.decay() {
        DecayClass::PastExponential(r) => r,
        DecayClass::CompactFrequency(rc) => {
            // the W variable is the shell energy |k^0|
            let w_max = rc;
            return bare_cone_convolve_bounded(order, nu, v, p0, pn, w_max);
        }
        _ => return Err(KernelError::DivergentIntegral),
    };
    let w_max = (45.0 + v.poly_degree() * (1.0 + 45.0 / rate).ln()) / rate
        + nu.sqrt()
        + p0.abs()
        + pn
        + 1.0;
    bare_cone_convolve_bounded(order, nu, v, p0, pn, w_max)
}

fn bare_cone_convolve_bounded(
    order: i32,
    nu: f64,
    v: &dyn MomentumFunction,
    p0: f64,
    pn: f64,
    w_max: f64,
) -> Result<C64, KernelError> {
    let segments = cone_shell_segments(p0, pn, nu, w_max)?;
    if segments.is_empty() {
        return Ok(C64::new(0.0, 0.0));
    }
    if order <= -1 {
        if v.angular() != AngularProfile::FrequencyOnly {
            return Err(KernelError::Unsupported(
                "derivative-order cone convolution requires a frequency-only potential".into(),
            ));
        }
        let psq = p0 * p0 - pn * pn;
        let scale = p0 * p0 + pn * pn;
        if psq.abs() < 1e-12 * scale {
            return Err(KernelError::Unsupported(
                "derivative-order cone convolution at a lightlike point".into(),
            ));
        }
    }
    let pref = 1.0 / (4.0 * pn);
    // sgn(p^0 + W) times the azimuthal V-average at shell energy W
    let eval_avg = |w: f64| -> C64 {
        let sgn = if p0 + w >= 0.0 { 1.0 } else { -1.0 };
        match v.angular() {
            AngularProfile::FrequencyOnly => {
                v.eval(&FourVector::from_components(-w, 0.0, 0.0, (w * w - nu).max(0.0).sqrt()))
                    * (2.0 * std::f64::consts::PI * sgn)
            }
            AngularProfile::General => {
                let r = (w * w - nu).max(0.0).sqrt();
                if r == 0.0 {
                    return C64::new(0.0, 0.0);
                }
                let psq = p0 * p0 - pn * pn;
                let cstar = (-(psq + nu + 2.0 * p0 * w) / (2.0 * pn * r)).clamp(-1.0, 1.0);
                let sstar = (1.0 - cstar * cstar).max(0.0).sqrt();
                // orthonormal frame adapted to p_vec is irrelevant for the
                // azimuthal average; fix p_vec along z
                let nphi = 64usize;
                let dphi = 2.0 * std::f64::consts::PI / nphi as f64;
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..nphi {
                    let phi = dphi * k as f64;
                    let q = FourVector::from_components(
                        -w,
                        r * sstar * phi.cos(),
                        r * sstar * phi.sin(),
                        r * cstar,
                    );
                    acc += v.eval(&q);
                }
                acc * (dphi * sgn)
            }
        }
    };
    let eval_avg_d = |w: f64| -> C64 {
        // d/dW of the averaged integrand (frequency-only V):
        // d/dW [sgn * V(-W)] = -sgn * V'(-W)
        let sgn = if p0 + w >= 0.0 { 1.0 } else { -1.0 };
        -v.d_omega(&FourVector::from_components(-w, 0.0, 0.0, (w * w - nu).max(0.0).sqrt()))
            * (2.0 * std::f64::consts::PI * sgn)
    };
    let cfg = AdaptiveConfig::default();
    let mut total = C64::new(0.0, 0.0);
    for seg in &segments {
        match order {
            0 => {
                // split at the sign change of p^0 + W if it lies inside
                let mut breaks = Vec::new();
                if p0 < 0.0 && -p0 > seg.lo && -p0 < seg.hi {
                    breaks.push(-p0);
                }
                total +=
                    integrate_adaptive_split(eval_avg, seg.lo, seg.hi, &breaks, &cfg)? * pref;
            }
            -1 => {
                // 4 d/dnu of the order-0 value: boundary terms only
                let mut b = C64::new(0.0, 0.0);
                if seg.hi_dnu != 0.0 {
                    b += eval_avg(seg.hi) * seg.hi_dnu;
                }
                if seg.lo_dnu != 0.0 {
                    b -= eval_avg(seg.lo) * seg.lo_dnu;
                }
                total += b * (4.0 * pref);
            }
            -2 => {
                // 16 d^2/dnu^2: endpoint speeds are constant in nu
                let mut b = C64::new(0.0, 0.0);
                if seg.hi_dnu != 0.0 {
                    b += eval_avg_d(seg.hi) * (seg.hi_dnu * seg.hi_dnu);
                }
                if seg.lo_dnu != 0.0 {
                    b -= eval_avg_d(seg.lo) * (seg.lo_dnu * seg.lo_dnu);
                }
                total += b * (16.0 * pref);
            }
            _ => {
                return Err(KernelError::Unsupported(
                    "cone convolution defined for orders 0, -1, -2".into(),
                ))
            }
        }
    }
    Ok(total)
}

/// Convolution with the full causal kernel
/// `K0(p-k) = (i/4 pi^2) delta((p-k)^2) eps(p^0-k^0)`:
///
/// ```text
/// convolve_numeric(sym, V, p) = integral sym(k) V(k) K0(p-k) d^4k .
/// ```
///
/// `sym.order` must be in `{0, -1, -2}`. This is the quadrature oracle all
/// expansion engines are validated against.
pub fn convolve_numeric(
    sym: &KernelSymbol,
    v: &dyn MomentumFunction,
    p: &FourVector,
) -> Result<C64, KernelError> {
    if sym.order > 0 || sym.order < -2 {
        return Err(KernelError::Unsupported(
            "convolution implemented for shell orders 0, -1, -2".into(),
        ));
    }
    let i_over = C64::new(0.0, 1.0 / (4.0 * std::f64::consts::PI.powi(2)));
    let bare = |family: KernelFamily| -> Result<C64, KernelError> {
        match family {
            KernelFamily::T => bare_cone_convolve_t(sym.order, sym.mass_sq, v, p),
            KernelFamily::Tbar => {
                // Tbar-shell convolution via k -> -k: equals minus the
                // T-shell convolution of the reflected potential at -p
                let refl = ReflectedFn(v);
                Ok(-bare_cone_convolve_t(sym.order, sym.mass_sq, &refl, &p.neg())?)
            }
            KernelFamily::K => unreachable!(),
        }
    };
    let value = match sym.family {
        KernelFamily::T => bare(KernelFamily::T)? * i_over,
        KernelFamily::Tbar => bare(KernelFamily::Tbar)? * i_over,
        KernelFamily::K => {
            (bare(KernelFamily::Tbar)? - bare(KernelFamily::T)?) * i_over * i_over
        }
    };
    Ok(value * sym.sign)
}
