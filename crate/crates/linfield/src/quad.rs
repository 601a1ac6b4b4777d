//! One-dimensional quadrature rules and adaptive panel integration.
//!
//! Three building blocks used throughout the crate:
//!
//! * Gauss-Legendre rules of arbitrary order, computed by Newton iteration on
//!   the Legendre recurrence and cached per order,
//! * Gauss-Laguerre rules (weight `e^{-x}` on `[0, inf)`) from the symmetric
//!   eigenvalue form of the Jacobi matrix, used for exponentially weighted
//!   tail integrals,
//! * an adaptive bisection integrator whose panel estimate compares an
//!   embedded 20-point against a 41-point Gauss rule.
//!
//! The adaptive defaults (absolute tolerance `1e-9`, relative `1e-8`) match
//! the accuracy the expansion oracles are validated at; callers needing
//! tighter control pass their own [`AdaptiveConfig`].

use nalgebra::DMatrix;
use num_complex::Complex;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

/// Complex scalar used by all integrands.
pub type C64 = Complex<f64>;

/// Errors reported by the adaptive integrator.
#[derive(Debug, Error)]
pub enum QuadError {
    /// The recursion bottomed out with panel errors still above tolerance.
    #[error("quadrature did not converge: estimate {estimate:.6e}, panel error {error:.3e}")]
    NoConvergence { estimate: f64, error: f64 },
    /// The integrand produced a non-finite value inside the domain.
    #[error("divergent integral")]
    Divergent,
}

/// Nodes and weights of a quadrature rule on its reference interval.
#[derive(Debug, Clone)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn legendre_value_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn build_gauss_legendre(n: usize) -> QuadRule {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_value_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_value_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    QuadRule { nodes, weights }
}

fn build_gauss_laguerre(n: usize) -> QuadRule {
    assert!(n >= 1, "Gauss-Laguerre order must be positive");
    // Jacobi matrix of the Laguerre recurrence: diagonal 2k+1, off-diagonal k.
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        j[(k, k)] = 2.0 * k as f64 + 1.0;
        if k + 1 < n {
            let b = (k + 1) as f64;
            j[(k, k + 1)] = b;
            j[(k + 1, k)] = b;
        }
    }
    let eig = j.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    QuadRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

type RuleCache = Mutex<HashMap<usize, Arc<QuadRule>>>;

fn legendre_cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn laguerre_cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Arc<QuadRule> {
    let mut cache = legendre_cache().lock().unwrap();
    cache
        .entry(n)
        .or_insert_with(|| Arc::new(build_gauss_legendre(n)))
        .clone()
}

/// Cached Gauss-Laguerre rule for `int_0^inf e^{-x} f(x) dx`.
pub fn gauss_laguerre(n: usize) -> Arc<QuadRule> {
    let mut cache = laguerre_cache().lock().unwrap();
    cache
        .entry(n)
        .or_insert_with(|| Arc::new(build_gauss_laguerre(n)))
        .clone()
}

/// Fixed-order Gauss-Legendre integral of a real integrand over `[a, b]`.
pub fn integrate_gl<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.nodes
        .iter()
        .zip(rule.weights.iter())
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Fixed-order Gauss-Legendre integral of a complex integrand over `[a, b]`.
pub fn integrate_gl_c<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, n: usize) -> C64 {
    let rule = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.nodes
        .iter()
        .zip(rule.weights.iter())
        .map(|(&x, &w)| f(mid + half * x) * w)
        .sum::<C64>()
        * half
}

/// Gauss-Laguerre approximation of `int_0^inf e^{-u} f(u) du`.
pub fn integrate_laguerre<F: FnMut(f64) -> f64>(mut f: F, n: usize) -> f64 {
    let rule = gauss_laguerre(n);
    rule.nodes
        .iter()
        .zip(rule.weights.iter())
        .map(|(&x, &w)| w * f(x))
        .sum()
}

/// Uniform trapezoid rule for a `2 pi`-periodic integrand (spectrally exact
/// for trigonometric polynomials of degree below `n/2`).
pub fn periodic_trapezoid<F: FnMut(f64) -> C64>(mut f: F, n: usize) -> C64 {
    let step = 2.0 * std::f64::consts::PI / n as f64;
    (0..n).map(|k| f(step * k as f64) * step).sum()
}

/// Tolerances and recursion bound for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        AdaptiveConfig {
            abs_tol: 1e-9,
            rel_tol: 1e-8,
            max_depth: 48,
        }
    }
}

fn panel_estimates<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> (C64, C64) {
    let coarse = {
        let rule = gauss_legendre(20);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        rule.nodes
            .iter()
            .zip(rule.weights.iter())
            .map(|(&x, &w)| f(mid + half * x) * w)
            .sum::<C64>()
            * half
    };
    let fine = {
        let rule = gauss_legendre(41);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        rule.nodes
            .iter()
            .zip(rule.weights.iter())
            .map(|(&x, &w)| f(mid + half * x) * w)
            .sum::<C64>()
            * half
    };
    (coarse, fine)
}

fn adaptive_rec<F: FnMut(f64) -> C64>(
    f: &mut F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    cfg: &AdaptiveConfig,
    worst: &mut f64,
) -> Result<C64, QuadError> {
    let (coarse, fine) = panel_estimates(f, a, b);
    if !fine.re.is_finite() || !fine.im.is_finite() {
        return Err(QuadError::Divergent);
    }
    let err = (fine - coarse).norm();
    if err <= tol || depth >= cfg.max_depth {
        if err > tol {
            *worst = worst.max(err);
        }
        return Ok(fine);
    }
    let mid = 0.5 * (a + b);
    let left = adaptive_rec(f, a, mid, 0.5 * tol, depth + 1, cfg, worst)?;
    let right = adaptive_rec(f, mid, b, 0.5 * tol, depth + 1, cfg, worst)?;
    Ok(left + right)
}

/// Adaptive bisection integral of a complex integrand over a finite interval.
///
/// Interior breakpoints known to the caller (kinks, support edges) should be
/// passed via [`integrate_adaptive_split`] so each smooth piece converges at
/// the Gauss rate.
pub fn integrate_adaptive<F: FnMut(f64) -> C64>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &AdaptiveConfig,
) -> Result<C64, QuadError> {
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    let (_, first) = panel_estimates(&mut f, a, b);
    let scale = first.norm().max(cfg.abs_tol);
    let tol = cfg.abs_tol.max(cfg.rel_tol * scale);
    let mut worst = 0.0;
    let value = adaptive_rec(&mut f, a, b, tol, 0, cfg, &mut worst)?;
    if worst > 50.0 * tol.max(cfg.rel_tol * value.norm()) {
        return Err(QuadError::NoConvergence {
            estimate: value.norm(),
            error: worst,
        });
    }
    Ok(value)
}

/// Adaptive integral over `[a, b]` split at the sorted interior `breaks`.
pub fn integrate_adaptive_split<F: FnMut(f64) -> C64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &AdaptiveConfig,
) -> Result<C64, QuadError> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    pts.dedup();
    let mut edges = vec![a];
    edges.extend(pts);
    edges.push(b);
    let mut total = C64::new(0.0, 0.0);
    for pair in edges.windows(2) {
        total += integrate_adaptive(&mut f, pair[0], pair[1], cfg)?;
    }
    Ok(total)
}
