//! One-dimensional divergence expansions and endpoint-derivative rules.
//!
//! Every rule here comes from integrating the shifted expansion
//! `f = Σ_k (-1)^k/(k+1)! ((x - x0)^{k+1} f^(k))' + remainder` over `[a, b]`,
//! which leaves only endpoint values of `f` and its derivatives. Writing the
//! expansion center as `x0 = a + τ (b - a)` makes the weights independent of
//! the interval: with `h = b - a`,
//!
//! ```text
//! ∫_a^b f ≈ Σ_k h^{k+1} ( τ^{k+1}/(k+1)! f^(k)(a) + (-1)^k (1-τ)^{k+1}/(k+1)! f^(k)(b) )
//! ```
//!
//! Real `τ` gives the Taylor (τ = 0, 1) and midpoint (τ = 1/2) families.
//! Complex `τ = 1/(1 - ω)` with ω a nontrivial root of unity gives the
//! complex-shift rules; only their real part is kept.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensorpoly::MultiPolynomial;

/// Source of exact derivatives `f^(k)(x)` for a univariate function.
pub trait Derivatives1D {
    /// Highest available order, `None` if unbounded.
    fn max_order(&self) -> Option<usize>;
    fn derivative(&self, k: usize, x: f64) -> f64;

    fn check(&self, k: usize) -> Result<()> {
        match self.max_order() {
            Some(m) if k > m => Err(Error::MissingDerivative(k)),
            _ => Ok(()),
        }
    }
}

impl<F: Fn(f64) -> f64> Derivatives1D for [F] {
    fn max_order(&self) -> Option<usize> {
        Some(self.len().saturating_sub(1))
    }

    fn derivative(&self, k: usize, x: f64) -> f64 {
        self[k](x)
    }
}

/// Derivatives of a univariate [`MultiPolynomial`], precomputed up to its degree.
#[derive(Debug, Clone)]
pub struct PolyDerivatives {
    derivs: Vec<MultiPolynomial>,
}

impl PolyDerivatives {
    pub fn new(f: &MultiPolynomial) -> Result<Self> {
        if f.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: f.dim(),
            });
        }
        let mut derivs = vec![f.clone()];
        for _ in 0..f.degree() {
            let next = derivs.last().unwrap().derivative(0);
            derivs.push(next);
        }
        Ok(Self { derivs })
    }
}

impl Derivatives1D for PolyDerivatives {
    fn max_order(&self) -> Option<usize> {
        None
    }

    fn derivative(&self, k: usize, x: f64) -> f64 {
        self.derivs.get(k).map_or(0.0, |p| p.eval(&[x]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Derivatives at `a` only (expansion center at `b`).
    Left,
    /// Derivatives at `b` only (expansion center at `a`).
    Right,
}

/// An endpoint-derivative rule stored on the unit interval.
///
/// Applied to `[a, b]` with `h = b - a` it evaluates
/// `Σ_k h^{k+1} (coeff_a[k] f^(k)(a) + coeff_b[k] f^(k)(b))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1D {
    order: usize,
    coeff_a: Vec<f64>,
    coeff_b: Vec<f64>,
    label: String,
}

impl Rule1D {
    /// Real part of the truncated expansion about `x0 = a + τ (b - a)`.
    pub fn from_shift(order: usize, tau: Complex64, label: impl Into<String>) -> Self {
        let mut coeff_a = Vec::with_capacity(order + 1);
        let mut coeff_b = Vec::with_capacity(order + 1);
        let mut fact = 1.0;
        for k in 0..=order {
            fact *= (k + 1) as f64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            coeff_a.push(tau.powu(k as u32 + 1).re / fact);
            coeff_b.push(sign * (Complex64::new(1.0, 0.0) - tau).powu(k as u32 + 1).re / fact);
        }
        Self {
            order,
            coeff_a,
            coeff_b,
            label: label.into(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff_a(&self) -> &[f64] {
        &self.coeff_a
    }

    pub fn coeff_b(&self) -> &[f64] {
        &self.coeff_b
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, a: f64, b: f64, f: &(impl Derivatives1D + ?Sized)) -> Result<f64> {
        apply_rule(self, a, b, f)
    }
}

pub fn rule_taylor_endpoint(m: usize, side: Side) -> Rule1D {
    match side {
        Side::Left => Rule1D::from_shift(m, Complex64::new(1.0, 0.0), format!("taylor-left-{m}")),
        Side::Right => Rule1D::from_shift(m, Complex64::new(0.0, 0.0), format!("taylor-right-{m}")),
    }
}

/// Expansion about the midpoint; `m = 0` is the trapezoidal rule.
pub fn rule_midpoint_sym(m: usize) -> Rule1D {
    Rule1D::from_shift(m, Complex64::new(0.5, 0.0), format!("midpoint-{m}"))
}

pub fn rule_trapezoid() -> Rule1D {
    let mut r = rule_midpoint_sym(0);
    r.label = "trapezoid".into();
    r
}

/// Two-term rule from the cubic-root-of-unity shift:
/// `h/2 (f(a) + f(b)) - h²/12 (f'(b) - f'(a))`.
pub fn rule_corrected_trapezoid() -> Rule1D {
    let mut r = rule_complex_shift(3, 1).expect("cubic shift is valid");
    r.label = "corrected-trapezoid".into();
    r
}

/// Four-term rule from a fifth-root-of-unity shift, exact through degree 4.
/// `branch` picks `ω5 = e^{2πi·branch/5}`, `branch ∈ 1..=4`.
pub fn rule_four_term(branch: usize) -> Result<Rule1D> {
    let mut r = rule_complex_shift(5, branch)?;
    r.label = format!("four-term-{branch}");
    Ok(r)
}

/// The `(n-1)`-term real rule from the shift by `ω = e^{2πi·branch/n}`;
/// it integrates polynomials of degree `n - 1` exactly.
pub fn rule_complex_shift(n_roots: usize, branch: usize) -> Result<Rule1D> {
    let shift = complex_shift(n_roots, branch)?;
    let tau = Complex64::new(1.0, 0.0) - shift.gamma;
    Ok(Rule1D::from_shift(
        n_roots - 2,
        tau,
        format!("complex-shift-{n_roots}-{branch}"),
    ))
}

/// Expansion center chosen so that `(b - x0)^n = (a - x0)^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexShift {
    pub n_roots: usize,
    pub branch: usize,
    /// `e^{2πi·branch/n}`
    pub omega: Complex64,
    /// `ω / (ω - 1)`; its real part is 1/2.
    pub gamma: Complex64,
    /// `x0 = (b - ω a)/(1 - ω)` for `[a, b] = [0, 1]`.
    pub shift_x0: Complex64,
}

pub fn complex_shift(n_roots: usize, branch: usize) -> Result<ComplexShift> {
    if n_roots < 3 || n_roots.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "number of roots must be odd and at least 3, got {n_roots}"
        )));
    }
    if branch == 0 || branch >= n_roots {
        return Err(Error::InvalidArgument(format!(
            "branch must be in 1..{n_roots}, got {branch}"
        )));
    }
    let omega = Complex64::from_polar(1.0, 2.0 * PI * branch as f64 / n_roots as f64);
    let one = Complex64::new(1.0, 0.0);
    let gamma = omega / (omega - one);
    Ok(ComplexShift {
        n_roots,
        branch,
        omega,
        gamma,
        shift_x0: one / (one - omega),
    })
}

impl ComplexShift {
    pub fn center_on(&self, a: f64, b: f64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        (Complex64::new(b, 0.0) - self.omega * a) / (one - self.omega)
    }

    /// `Re(γ^k)` for `k = 1..=k_max`.
    pub fn gamma_power_real_parts(&self, k_max: u32) -> Vec<f64> {
        (1..=k_max).map(|k| self.gamma.powu(k).re).collect()
    }
}

pub fn apply_rule(rule: &Rule1D, a: f64, b: f64, f: &(impl Derivatives1D + ?Sized)) -> Result<f64> {
    if !(b > a) {
        return Err(Error::InvalidArgument(format!(
            "interval must satisfy b > a, got [{a}, {b}]"
        )));
    }
    f.check(rule.order)?;
    let h = b - a;
    let mut hp = 1.0;
    let mut total = 0.0;
    for k in 0..=rule.order {
        hp *= h;
        let mut term = 0.0;
        if rule.coeff_a[k] != 0.0 {
            term += rule.coeff_a[k] * f.derivative(k, a);
        }
        if rule.coeff_b[k] != 0.0 {
            term += rule.coeff_b[k] * f.derivative(k, b);
        }
        total += hp * term;
    }
    Ok(total)
}

/// Both sides of the shifted expansion of `f` at `x`:
/// `Σ_{k≤m} (-1)^k/(k+1)! ((x-x0)^{k+1} f^(k))'(x)` and
/// `(-1)^{m+1}/(m+1)! (x-x0)^{m+1} f^(m+1)(x)`.
///
/// Derivatives of the products are expanded with the product rule, so `f`
/// must supply orders up to `m + 1`.
pub fn expand_1d(
    f: &(impl Derivatives1D + ?Sized),
    x: f64,
    x0: Complex64,
    m: usize,
) -> Result<(Complex64, Complex64)> {
    f.check(m + 1)?;
    let d = Complex64::new(x, 0.0) - x0;
    let mut divergence = Complex64::new(0.0, 0.0);
    let mut fact = 1.0;
    for k in 0..=m {
        fact *= (k + 1) as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let product_derivative = d.powu(k as u32) * ((k + 1) as f64) * f.derivative(k, x)
            + d.powu(k as u32 + 1) * f.derivative(k + 1, x);
        divergence += product_derivative * (sign / fact);
    }
    // fact is now (m+1)!
    let sign = if (m + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let remainder = d.powu(m as u32 + 1) * f.derivative(m + 1, x) * (sign / fact);
    Ok((divergence, remainder))
}

/// `Re[ (-1)^{m+1}/(m+1)! ∫_a^b (x - x0)^{m+1} f^(m+1)(x) dx ]`, by adaptive
/// Gauss–Legendre with absolute tolerance 1e-13.
///
/// For a real rule built from a complex center this is exactly the gap
/// between the true integral and the rule.
pub fn remainder_1d(
    m: usize,
    x0: Complex64,
    a: f64,
    b: f64,
    f_deriv_m1: impl Fn(f64) -> f64,
) -> f64 {
    let p = m as u32 + 1;
    let fact: f64 = (1..=p).map(f64::from).product();
    let sign = if p.is_multiple_of(2) { 1.0 } else { -1.0 };
    let integrand = |x: f64| (Complex64::new(x, 0.0) - x0).powu(p).re * f_deriv_m1(x);
    sign / fact * adaptive_gauss(&integrand, a, b, 1e-13)
}

fn gauss_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(12).unwrap()))
}

pub(crate) fn adaptive_gauss(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let mid = 0.5 * (a + b);
        let rule = gauss_rule();
        let left = rule.integrate(a, mid, f);
        let right = rule.integrate(mid, b, f);
        if depth >= 40 || (left + right - whole).abs() <= tol {
            return left + right;
        }
        rec(f, a, mid, left, 0.5 * tol, depth + 1) + rec(f, mid, b, right, 0.5 * tol, depth + 1)
    }
    let whole = gauss_rule().integrate(a, b, f);
    rec(f, a, b, whole, tol, 0)
}
