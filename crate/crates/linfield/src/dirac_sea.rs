//! The regularized vacuum Dirac sea and its momentum-space products.
//!
//! The vacuum is a sum of three generations of negative-energy mass shells,
//!
//! ```text
//! P_hat(k) = sum_alpha (kslash + m_alpha) delta(k^2 - m_alpha^2)
//!            Theta(-k^0) e^{eps k^0} ,
//! ```
//!
//! where `eps > 0` is the ultraviolet regularization length. The scalar
//! product of two spinor-valued test functions is
//!
//! ```text
//! <f|g> = -integral (2 pi)^{-4} pair(f(k), P_hat(k) g(k)) d^4k ,
//! ```
//!
//! with `pair` the indefinite spin inner product; on each shell the
//! integrand is negative semidefinite, so the product is positive. The
//! Cauchy-surface L2 product of the corresponding physical wave functions
//! has the same shell integrand up to the exact pointwise factor
//! `e^{eps omega} / (2 pi)`, which this module exposes for verification.

use crate::kernels::{shell_truncation_radius, AngularProfile, DecayClass, KernelError};
use crate::minkowski::{
    gamma, identity, slash, spin_inner, C64, FourVector, SpinMatrix, SpinVector,
};
use crate::quad::{gauss_legendre, integrate_adaptive_split, AdaptiveConfig};
use std::sync::Arc;
use thiserror::Error;

/// Errors from sea construction and products.
#[derive(Debug, Error)]
pub enum SeaError {
    #[error("invalid vacuum configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Masses and regularization scales of the three-generation vacuum.
#[derive(Debug, Clone, Copy)]
pub struct VacuumConfig {
    pub masses: [f64; 3],
    /// Ultraviolet regularization length.
    pub eps: f64,
    /// Macroscopic length scale; all constructions assume `eps << ell_min`.
    pub ell_min: f64,
}

impl VacuumConfig {
    pub fn new(masses: [f64; 3], eps: f64, ell_min: f64) -> Result<Self, SeaError> {
        for m in masses {
            if !(m > 0.0) || !m.is_finite() {
                return Err(SeaError::InvalidConfig(format!(
                    "mass {m} must be finite and > 0"
                )));
            }
        }
        if masses[0] == masses[1] || masses[0] == masses[2] || masses[1] == masses[2] {
            return Err(SeaError::InvalidConfig(
                "masses must be pairwise distinct".into(),
            ));
        }
        if !(eps > 0.0 && eps < ell_min) {
            return Err(SeaError::InvalidConfig(format!(
                "need 0 < eps < ell_min, got eps = {eps}, ell_min = {ell_min}"
            )));
        }
        Ok(VacuumConfig {
            masses,
            eps,
            ell_min,
        })
    }

    /// Internal default units: masses `(1.0, 1.5, 2.2)`, `eps = 1e-3`,
    /// `ell_min = 0.1`.
    pub fn default_units() -> Self {
        VacuumConfig {
            masses: [1.0, 1.5, 2.2],
            eps: 1e-3,
            ell_min: 0.1,
        }
    }
}

/// Spinor-valued test function `f(k) = amplitude * envelope(k)` with a
/// constant spinor amplitude and a scalar envelope.
#[derive(Clone)]
pub struct SpinorPacket {
    pub amplitude: SpinVector,
    envelope: Arc<dyn Fn(&FourVector) -> C64 + Send + Sync>,
    decay: DecayClass,
    angular: AngularProfile,
}

impl SpinorPacket {
    /// `angular = FrequencyOnly` declares that the envelope depends on the
    /// momentum only through `(k^0, |k_vec|)`, enabling the exact angular
    /// average in the products.
    pub fn new(
        amplitude: SpinVector,
        envelope: Arc<dyn Fn(&FourVector) -> C64 + Send + Sync>,
        decay: DecayClass,
        angular: AngularProfile,
    ) -> Self {
        SpinorPacket {
            amplitude,
            envelope,
            decay,
            angular,
        }
    }

    pub fn envelope_at(&self, k: &FourVector) -> C64 {
        (self.envelope)(k)
    }

    pub fn eval(&self, k: &FourVector) -> SpinVector {
        self.amplitude * self.envelope_at(k)
    }

    pub fn decay(&self) -> DecayClass {
        self.decay
    }
}

/// Shell weight of one sea generation: `(kslash + m_alpha) e^{eps omega}`
/// at the negative-energy point `omega = -sqrt(|k_vec|^2 + m_alpha^2)`.
///
/// The full sea is the sum over generations of `T^[0]_{m_alpha^2}` carrying
/// this matrix weight.
pub fn p_hat_shell(
    cfg: &VacuumConfig,
    generation: usize,
    k_spatial: [f64; 3],
) -> Result<SpinMatrix, SeaError> {
    if !(1..=3).contains(&generation) {
        return Err(SeaError::InvalidConfig(format!(
            "generation {generation} outside 1..=3"
        )));
    }
    let m = cfg.masses[generation - 1];
    let r2 = k_spatial.iter().map(|c| c * c).sum::<f64>();
    let omega = -(r2 + m * m).sqrt();
    let k = FourVector::from_components(omega, k_spatial[0], k_spatial[1], k_spatial[2]);
    Ok((slash(&k) + identity() * C64::new(m, 0.0)) * C64::new((cfg.eps * omega).exp(), 0.0))
}

/// The combined decay of a product of two packets on a past shell: both
/// envelopes are multiplied with the sea factor `e^{eps omega}`.
fn product_decay(cfg: &VacuumConfig, f: &SpinorPacket, g: &SpinorPacket) -> DecayClass {
    let mut class = DecayClass::PastExponential(cfg.eps);
    for d in [f.decay(), g.decay()] {
        class = match (class, d) {
            (DecayClass::CompactFrequency(a), DecayClass::CompactFrequency(b)) => {
                DecayClass::CompactFrequency(a.min(b))
            }
            (_, DecayClass::CompactFrequency(b)) => DecayClass::CompactFrequency(b),
            (DecayClass::CompactFrequency(a), _) => DecayClass::CompactFrequency(a),
            (DecayClass::PastExponential(a), DecayClass::PastExponential(b)) => {
                DecayClass::PastExponential(a + b)
            }
            (acc, _) => acc,
        };
    }
    class
}

/// Shell integrand of the sandwiched weight at one spatial momentum:
/// `pair(f, (kslash + m) g)` averaged over nothing (point evaluation).
fn sandwich_at(f: &SpinorPacket, g: &SpinorPacket, m: f64, k: &FourVector) -> C64 {
    let w = slash(k) + identity() * C64::new(m, 0.0);
    let fk = f.eval(k);
    let gk = g.eval(k);
    spin_inner(&fk, &(w * gk))
}

/// Angular integral of the sandwich at fixed `(omega, R)`.
///
/// For frequency-only envelopes the direction average of `kslash` is exactly
/// `k^0 gamma^0` (the spatial part integrates to zero), giving a closed
/// angular integral; general envelopes use a product quadrature.
fn sandwich_angular(
    f: &SpinorPacket,
    g: &SpinorPacket,
    m: f64,
    omega: f64,
    r: f64,
) -> C64 {
    let frequency_only = f.angular == AngularProfile::FrequencyOnly
        && g.angular == AngularProfile::FrequencyOnly;
    if frequency_only {
        let k = FourVector::from_components(omega, 0.0, 0.0, r);
        let w_avg = gamma(0) * C64::new(omega, 0.0) + identity() * C64::new(m, 0.0);
        let pair = spin_inner(&f.amplitude, &(w_avg * g.amplitude));
        return pair
            * f.envelope_at(&k).conj()
            * g.envelope_at(&k)
            * (4.0 * std::f64::consts::PI);
    }
    let rule = gauss_legendre(50);
    let nphi = 64usize;
    let dphi = 2.0 * std::f64::consts::PI / nphi as f64;
    let mut acc = C64::new(0.0, 0.0);
    for (&c, &wc) in rule.nodes.iter().zip(rule.weights.iter()) {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for j in 0..nphi {
            let phi = dphi * j as f64;
            let k = FourVector::from_components(
                omega,
                r * s * phi.cos(),
                r * s * phi.sin(),
                r * c,
            );
            acc += sandwich_at(f, g, m, &k) * (wc * dphi);
        }
    }
    acc
}

/// One-generation contribution to a shell product with the given extra
/// exponential weight `e^{weight_eps * omega}` and overall prefactor.
fn generation_product(
    cfg: &VacuumConfig,
    generation: usize,
    f: &SpinorPacket,
    g: &SpinorPacket,
    weight_eps: f64,
    prefactor: f64,
) -> Result<C64, SeaError> {
    let m = cfg.masses[generation - 1];
    let nu = m * m;
    // conj(envelope) decays like the envelope in the past direction
    let decay = product_decay(cfg, f, g);
    let r_hi = match shell_truncation_radius(&decay, nu, 2.0)? {
        Some(r) => r,
        None => return Err(SeaError::Kernel(KernelError::DivergentIntegral)),
    };
    if r_hi <= 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let cfg_quad = AdaptiveConfig::default();
    let integrand = |r: f64| -> C64 {
        let omega_abs = (r * r + nu).sqrt();
        let omega = -omega_abs;
        sandwich_angular(f, g, m, omega, r)
            * (r * r / (2.0 * omega_abs))
            * (weight_eps * omega).exp()
    };
    let breaks = [r_hi / 16.0, r_hi / 4.0, r_hi / 2.0];
    let val = integrate_adaptive_split(integrand, 0.0, r_hi, &breaks, &cfg_quad)
        .map_err(KernelError::from)?;
    Ok(val * prefactor)
}

/// Momentum-space scalar product of the sea,
/// `<f|g> = -integral (2 pi)^{-4} pair(f, P_hat g) d^4k`,
/// reduced exactly to the three negative-energy shells.
pub fn scalar_product(
    cfg: &VacuumConfig,
    f: &SpinorPacket,
    g: &SpinorPacket,
) -> Result<C64, SeaError> {
    let pref = -1.0 / (2.0 * std::f64::consts::PI).powi(4);
    let mut total = C64::new(0.0, 0.0);
    for generation in 1..=3 {
        total += generation_product(cfg, generation, f, g, cfg.eps, pref)?;
    }
    Ok(total)
}

/// Single-generation restriction of [`scalar_product`].
pub fn scalar_product_generation(
    cfg: &VacuumConfig,
    generation: usize,
    f: &SpinorPacket,
    g: &SpinorPacket,
) -> Result<C64, SeaError> {
    if !(1..=3).contains(&generation) {
        return Err(SeaError::InvalidConfig(format!(
            "generation {generation} outside 1..=3"
        )));
    }
    let pref = -1.0 / (2.0 * std::f64::consts::PI).powi(4);
    generation_product(cfg, generation, f, g, cfg.eps, pref)
}

/// Cauchy-surface L2 product of the physical wave functions belonging to
/// one generation,
///
/// ```text
/// (f|g) = -(1/2 pi) integral (2 pi)^{-4} pair(f, (kslash + m_alpha) g)
///         delta(k^2 - m_alpha^2) Theta(-k^0) e^{2 eps k^0} d^4k .
/// ```
pub fn l2_product_slice(
    cfg: &VacuumConfig,
    f: &SpinorPacket,
    g: &SpinorPacket,
    generation: usize,
) -> Result<C64, SeaError> {
    if !(1..=3).contains(&generation) {
        return Err(SeaError::InvalidConfig(format!(
            "generation {generation} outside 1..=3"
        )));
    }
    let pref = -1.0 / ((2.0 * std::f64::consts::PI) * (2.0 * std::f64::consts::PI).powi(4));
    generation_product(cfg, generation, f, g, 2.0 * cfg.eps, pref)
}

/// The two product integrands (momentum-space scalar product and L2 slice
/// product) at one spatial momentum of one generation, before the `d^3k`
/// integration. Their ratio is exactly `e^{eps omega} / (2 pi)`.
pub fn product_integrands_at(
    cfg: &VacuumConfig,
    generation: usize,
    f: &SpinorPacket,
    g: &SpinorPacket,
    k_spatial: [f64; 3],
) -> Result<(C64, C64), SeaError> {
    if !(1..=3).contains(&generation) {
        return Err(SeaError::InvalidConfig(format!(
            "generation {generation} outside 1..=3"
        )));
    }
    let m = cfg.masses[generation - 1];
    let r2 = k_spatial.iter().map(|c| c * c).sum::<f64>();
    let omega_abs = (r2 + m * m).sqrt();
    let omega = -omega_abs;
    let k = FourVector::from_components(omega, k_spatial[0], k_spatial[1], k_spatial[2]);
    let sandwich = sandwich_at(f, g, m, &k) / (2.0 * omega_abs);
    let two_pi = 2.0 * std::f64::consts::PI;
    let scalar = -sandwich * (cfg.eps * omega).exp() / two_pi.powi(4);
    let l2 = -sandwich * (2.0 * cfg.eps * omega).exp() / (two_pi * two_pi.powi(4));
    Ok((scalar, l2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::{matrix_norm, spin_adjoint};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bump(x: f64) -> f64 {
        if x.abs() < 1.0 {
            (-1.0 / (1.0 - x * x)).exp()
        } else {
            0.0
        }
    }

    /// Smooth radial band envelope supported on `|k_vec| in [c-w, c+w]`.
    fn band_packet(amplitude: SpinVector, center: f64, width: f64, m_max: f64) -> SpinorPacket {
        let freq_bound = ((center + width).powi(2) + m_max * m_max).sqrt() + 1.0;
        SpinorPacket::new(
            amplitude,
            Arc::new(move |k: &FourVector| {
                C64::new(bump((k.spatial_norm() - center) / width), 0.0)
            }),
            DecayClass::CompactFrequency(freq_bound),
            AngularProfile::FrequencyOnly,
        )
    }

    fn random_spinor(rng: &mut ChaCha8Rng) -> SpinVector {
        SpinVector::from_fn(|_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn rest_frame_weight_is_rank_two_projector_shape() {
        let cfg = VacuumConfig::default_units();
        let w = p_hat_shell(&cfg, 1, [0.0, 0.0, 0.0]).unwrap();
        let m = cfg.masses[0];
        let expected = (gamma(0) * C64::new(-m, 0.0) + identity() * m)
            * C64::new((-cfg.eps * m).exp(), 0.0);
        assert!(matrix_norm(&(w - expected)) < 1e-14);
        let sv = w.svd(false, false).singular_values;
        let rank = sv.iter().filter(|s| **s > 1e-10).count();
        assert_eq!(rank, 2);
    }

    #[test]
    fn shell_weight_is_spin_symmetric_and_solves_dirac_equation() {
        let cfg = VacuumConfig::default_units();
        for generation in 1..=3usize {
            let kv = [0.6, -0.4, 1.1];
            let w = p_hat_shell(&cfg, generation, kv).unwrap();
            assert!(matrix_norm(&(spin_adjoint(&w) - w)) < 1e-12 * matrix_norm(&w));
            let m = cfg.masses[generation - 1];
            let omega = -(kv.iter().map(|c| c * c).sum::<f64>() + m * m).sqrt();
            let k = FourVector::from_components(omega, kv[0], kv[1], kv[2]);
            let dirac = (slash(&k) - identity() * m) * w;
            assert!(matrix_norm(&dirac) < 1e-12 * matrix_norm(&w));
        }
    }

    #[test]
    fn gamma0_sandwich_reproduces_energy_factor() {
        // on shell: (kslash + m) gamma^0 (kslash + m) = 2 k^0 (kslash + m)
        let cfg = VacuumConfig::default_units();
        for (generation, kv) in [(1usize, [0.3, 0.0, -0.8]), (3, [2.0, 1.0, 0.5])] {
            let m = cfg.masses[generation - 1];
            let omega = -(kv.iter().map(|c| c * c).sum::<f64>() + m * m).sqrt();
            let k = FourVector::from_components(omega, kv[0], kv[1], kv[2]);
            let w = slash(&k) + identity() * m;
            let lhs = w * gamma(0) * w;
            let rhs = w * C64::new(2.0 * omega, 0.0);
            assert!(matrix_norm(&(lhs - rhs)) <= 1e-12 * matrix_norm(&rhs));
        }
    }

    #[test]
    fn quadratic_form_on_the_sea_is_negative() {
        let cfg = VacuumConfig::default_units();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..40 {
            let u = random_spinor(&mut rng);
            let generation = rng.gen_range(1..=3usize);
            let kv = [
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            ];
            let w = p_hat_shell(&cfg, generation, kv).unwrap();
            let q = spin_inner(&u, &(w * u));
            assert!(q.im.abs() < 1e-12 * (1.0 + q.re.abs()));
            assert!(q.re <= 1e-12, "sea form must be negative, got {}", q.re);
        }
    }

    #[test]
    fn scalar_product_is_positive_and_sesquilinear() {
        let cfg = VacuumConfig::default_units();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_spinor(&mut rng);
        let v = random_spinor(&mut rng);
        let f = band_packet(u, 2.0, 0.8, 2.2);
        let g = band_packet(v, 2.0, 0.8, 2.2);
        let ff = scalar_product(&cfg, &f, &f).unwrap();
        assert!(ff.im.abs() < 1e-12 * ff.re.abs());
        assert!(ff.re > 0.0);
        let c = C64::new(0.7, -1.3);
        let mut gc = g.clone();
        gc.amplitude *= c;
        let fg = scalar_product(&cfg, &f, &g).unwrap();
        let fgc = scalar_product(&cfg, &f, &gc).unwrap();
        assert_relative_eq!(fgc.re, (fg * c).re, max_relative = 1e-10);
        assert_relative_eq!(fgc.im, (fg * c).im, max_relative = 1e-10);
        // hermitian symmetry
        let gf = scalar_product(&cfg, &g, &f).unwrap();
        assert_relative_eq!(gf.re, fg.conj().re, max_relative = 1e-10);
        assert_relative_eq!(gf.im, fg.conj().im, max_relative = 1e-10);
    }

    #[test]
    fn positive_frequency_support_pairs_to_zero() {
        // envelope vanishing on the lower half space never meets the sea
        let cfg = VacuumConfig::default_units();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_spinor(&mut rng);
        let future = SpinorPacket::new(
            u,
            Arc::new(|k: &FourVector| {
                if k.t > 0.0 {
                    C64::new(bump((k.t - 3.0) / 1.0), 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
            DecayClass::CompactFrequency(5.0),
            AngularProfile::FrequencyOnly,
        );
        let g = band_packet(u, 1.5, 0.5, 2.2);
        let val = scalar_product(&cfg, &future, &g).unwrap();
        assert_eq!(val, C64::new(0.0, 0.0));
    }

    #[test]
    fn angular_shortcut_matches_direction_quadrature() {
        // the same packet declared general must give the same products
        let cfg = VacuumConfig::default_units();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_spinor(&mut rng);
        let v = random_spinor(&mut rng);
        let fast_f = band_packet(u, 1.2, 0.4, 2.2);
        let fast_g = band_packet(v, 1.2, 0.4, 2.2);
        let make_general = |p: &SpinorPacket| {
            let mut q = p.clone();
            q.angular = AngularProfile::General;
            q
        };
        let slow_f = make_general(&fast_f);
        let slow_g = make_general(&fast_g);
        let a = scalar_product_generation(&cfg, 2, &fast_f, &fast_g).unwrap();
        let b = scalar_product_generation(&cfg, 2, &slow_f, &slow_g).unwrap();
        assert_relative_eq!(a.re, b.re, max_relative = 1e-9);
        assert!((a.im - b.im).norm() < 1e-9 * a.re.abs().max(1e-30));
    }

    #[test]
    fn product_integrand_ratio_is_the_regularized_weight() {
        // l2 integrand / scalar integrand = e^{eps omega} / (2 pi) pointwise
        let cfg = VacuumConfig::default_units();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let u = random_spinor(&mut rng);
        let v = random_spinor(&mut rng);
        let f = band_packet(u, 2.0, 1.5, 2.2);
        let g = band_packet(v, 2.0, 1.5, 2.2);
        for generation in 1..=3usize {
            let kv = [0.9, -1.2, 0.7];
            let (scalar, l2) = product_integrands_at(&cfg, generation, &f, &g, kv).unwrap();
            let m = cfg.masses[generation - 1];
            let omega = -(kv.iter().map(|c| c * c).sum::<f64>() + m * m).sqrt();
            let expect = (cfg.eps * omega).exp() / (2.0 * std::f64::consts::PI);
            let ratio = l2 / scalar;
            assert_relative_eq!(ratio.re, expect, max_relative = 1e-12);
            assert!(ratio.im.abs() < 1e-14);
        }
    }

    #[test]
    fn product_ratio_extrapolates_to_inverse_two_pi() {
        // Richardson in eps of l2/scalar tends to 1/(2 pi)
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let u = random_spinor(&mut rng);
        let f = band_packet(u, 1.0, 0.4, 2.2);
        let mut ratios = Vec::new();
        let eps_list = [1e-2, 1e-3, 1e-4];
        for &eps in &eps_list {
            let cfg = VacuumConfig::new([1.0, 1.5, 2.2], eps, 0.1).unwrap();
            let s = scalar_product_generation(&cfg, 1, &f, &f).unwrap().re;
            let l2 = l2_product_slice(&cfg, &f, &f, 1).unwrap().re;
            ratios.push(l2 / s);
        }
        // two-level linear extrapolation in eps
        let lvl1 = |ea: f64, ra: f64, eb: f64, rb: f64| (ea * rb - eb * ra) / (ea - eb);
        let r01 = lvl1(eps_list[0], ratios[0], eps_list[1], ratios[1]);
        let r12 = lvl1(eps_list[1], ratios[1], eps_list[2], ratios[2]);
        let extrap = lvl1(eps_list[1], r01, eps_list[2], r12);
        let target = 1.0 / (2.0 * std::f64::consts::PI);
        assert!(
            ((extrap - target) / target).abs() < 1e-4,
            "extrapolated ratio {extrap} vs {target}"
        );
    }

    #[test]
    fn narrow_band_ratio_matches_shell_weight() {
        // f = g concentrated at |k_vec| ~ K: ratio ~ e^{-eps sqrt(K^2+m^2)}/(2 pi)
        let cfg = VacuumConfig::new([1.0, 1.5, 2.2], 1e-2, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let u = random_spinor(&mut rng);
        let k_center = 3.0;
        let f = band_packet(u, k_center, 0.05, 2.2);
        let s = scalar_product_generation(&cfg, 1, &f, &f).unwrap().re;
        let l2 = l2_product_slice(&cfg, &f, &f, 1).unwrap().re;
        let m = cfg.masses[0];
        let expect = (-cfg.eps * (k_center * k_center + m * m).sqrt()).exp()
            / (2.0 * std::f64::consts::PI);
        assert_relative_eq!(l2 / s, expect, max_relative = 1e-4);
    }

    #[test]
    fn invalid_configurations_are_rejected() {
        assert!(VacuumConfig::new([1.0, 1.0, 2.2], 1e-3, 0.1).is_err());
        assert!(VacuumConfig::new([1.0, 1.5, 2.2], 0.2, 0.1).is_err());
        assert!(VacuumConfig::new([1.0, -1.5, 2.2], 1e-3, 0.1).is_err());
        let cfg = VacuumConfig::default_units();
        assert!(p_hat_shell(&cfg, 0, [0.0; 3]).is_err());
        assert!(p_hat_shell(&cfg, 4, [0.0; 3]).is_err());
    }
}
