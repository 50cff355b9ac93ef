//! Fully contracted derivative tensors `∇^k f : v^k` and the identities
//! they satisfy.
//!
//! The k-th derivative tensor is never stored. A point value is obtained by
//! differentiating k times along the fixed direction `v = x - z0`; the field
//! `x ↦ ∇^k f(x) : (x - z0)^k` is obtained from the homogeneous layers of `f`
//! about `z0`, since on a layer of degree q the contraction is the falling
//! factorial `q (q-1) ... (q-k+1)` times the layer.

use super::{MultiIndex, MultiPolynomial};
use crate::error::{Error, Result};

/// Anything that can report `∇^k f(x) : v^k`.
pub trait DerivativeOracle {
    fn dim(&self) -> usize;

    /// Highest order available; `None` means unbounded.
    fn max_order(&self) -> Option<usize> {
        None
    }

    /// `∇^k f(x) : v^k`, i.e. the k-th directional derivative along `v` at `x`.
    fn directional(&self, x: &[f64], v: &[f64], k: usize) -> Result<f64>;

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.directional(x, &vec![0.0; self.dim()], 0)
    }

    fn check_order(&self, k: usize) -> Result<()> {
        match self.max_order() {
            Some(m) if k > m => Err(Error::MissingDerivative(k)),
            _ => Ok(()),
        }
    }
}

/// `Σ_j v_j ∂_j f`.
pub fn directional_derivative(f: &MultiPolynomial, v: &[f64]) -> MultiPolynomial {
    let mut out = MultiPolynomial::zero(f.dim()).recenter(f.center());
    for (j, &vj) in v.iter().enumerate() {
        if vj != 0.0 {
            out = &out + &f.derivative(j).scale(vj);
        }
    }
    out
}

/// `∇^k f(x) : (x - z0)^k`, by k-fold symbolic differentiation along `x - z0`.
pub fn contract(f: &MultiPolynomial, k: usize, x: &[f64], z0: &[f64]) -> Result<f64> {
    f.check_point(x)?;
    f.check_point(z0)?;
    let v: Vec<f64> = x.iter().zip(z0).map(|(a, b)| a - b).collect();
    f.directional(x, &v, k)
}

/// The polynomial field `x ↦ ∇^k f(x) : (x - z0)^k`, centered at `z0`.
pub fn contraction_field(f: &MultiPolynomial, k: usize, z0: &[f64]) -> Result<MultiPolynomial> {
    f.check_point(z0)?;
    let centered = f.recenter(z0);
    Ok(centered.map_layers(|q| falling_factorial(q, k as u32)))
}

fn falling_factorial(q: u32, k: u32) -> f64 {
    if k > q {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (q - i) as f64)
}

/// `∇ · ((x - z0) g)`, computed symbolically.
pub fn divergence_of_scaled_field(g: &MultiPolynomial, z0: &[f64]) -> Result<MultiPolynomial> {
    g.check_point(z0)?;
    let g = g.recenter(z0);
    let n = g.dim();
    let mut out = MultiPolynomial::zero(n).recenter(z0);
    for j in 0..n {
        let xj = MultiPolynomial::from_terms(z0.to_vec(), [(MultiIndex::unit(n, j), 1.0)])?;
        out = &out + &(&xj * &g).derivative(j);
    }
    Ok(out)
}

/// Both sides of `(x - z0)·∇(∇^k f : (x-z0)^k) = k ∇^k f : (x-z0)^k + ∇^{k+1} f : (x-z0)^{k+1}`.
///
/// The left side differentiates the contraction field symbolically; the
/// right side uses point contractions.
pub fn gradient_identity_check(
    f: &MultiPolynomial,
    k: usize,
    x: &[f64],
    z0: &[f64],
) -> Result<(f64, f64)> {
    f.check_point(x)?;
    let field = contraction_field(f, k, z0)?;
    let lhs: f64 = field
        .gradient()
        .iter()
        .enumerate()
        .map(|(j, g)| (x[j] - z0[j]) * g.eval(x))
        .sum();
    let rhs = k as f64 * contract(f, k, x, z0)? + contract(f, k + 1, x, z0)?;
    Ok((lhs, rhs))
}

/// For `f` homogeneous of degree d about `z0`, returns `∇f(x)·(x - z0)`,
/// which equals `d f(x)`.
pub fn euler_check(f: &MultiPolynomial, x: &[f64], z0: &[f64]) -> Result<f64> {
    f.check_point(x)?;
    f.check_point(z0)?;
    let centered = f.recenter(z0);
    let mut degrees = centered.terms().map(|(idx, _)| idx.degree());
    let d = match degrees.next() {
        Some(d) => d,
        None => return Ok(0.0),
    };
    if let Some(other) = degrees.find(|&e| e != d) {
        return Err(Error::NotHomogeneous(d, other));
    }
    let value = contract(f, 1, x, z0)?;
    let expected = d as f64 * f.eval(x);
    let scale = value.abs().max(expected.abs()).max(1.0);
    if (value - expected).abs() > 1e-10 * scale {
        return Err(Error::Numerical(format!(
            "Euler identity violated: {value} vs {expected}"
        )));
    }
    Ok(value)
}

impl DerivativeOracle for MultiPolynomial {
    fn dim(&self) -> usize {
        MultiPolynomial::dim(self)
    }

    fn directional(&self, x: &[f64], v: &[f64], k: usize) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(v)?;
        if k as u32 > self.degree() {
            return Ok(0.0);
        }
        let mut d = self.clone();
        for _ in 0..k {
            d = directional_derivative(&d, v);
        }
        Ok(d.eval(x))
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.try_eval(x)
    }
}

/// `f(x) = exp(x_0 + ... + x_{n-1})`.
#[derive(Debug, Clone, Copy)]
pub struct ExpSum {
    pub dim: usize,
}

impl DerivativeOracle for ExpSum {
    fn dim(&self) -> usize {
        self.dim
    }

    fn directional(&self, x: &[f64], v: &[f64], k: usize) -> Result<f64> {
        check_len(self.dim, x)?;
        check_len(self.dim, v)?;
        let s: f64 = v.iter().sum();
        Ok(s.powi(k as i32) * x.iter().sum::<f64>().exp())
    }
}

/// `f(x) = sin(x_0) sin(x_1) ... sin(x_{n-1})`.
#[derive(Debug, Clone, Copy)]
pub struct SinProduct {
    pub dim: usize,
}

impl DerivativeOracle for SinProduct {
    fn dim(&self) -> usize {
        self.dim
    }

    fn directional(&self, x: &[f64], v: &[f64], k: usize) -> Result<f64> {
        check_len(self.dim, x)?;
        check_len(self.dim, v)?;
        // D_v^k Π sin(x_i) = Σ_{|β|=k} k!/β! Π v_i^{β_i} sin^{(β_i)}(x_i)
        let kf = super::factorial(k as u32);
        let total = MultiIndex::all_of_degree(self.dim, k as u32)
            .into_iter()
            .map(|beta| {
                beta.exponents()
                    .iter()
                    .enumerate()
                    .fold(kf, |acc, (i, &b)| {
                        acc * v[i].powi(b as i32) * sin_derivative(x[i], b)
                            / super::factorial(b)
                    })
            })
            .sum();
        Ok(total)
    }
}

fn sin_derivative(x: f64, order: u32) -> f64 {
    match order % 4 {
        0 => x.sin(),
        1 => x.cos(),
        2 => -x.sin(),
        _ => -x.cos(),
    }
}

fn check_len(dim: usize, x: &[f64]) -> Result<()> {
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn poly(s: &str, n: usize) -> MultiPolynomial {
        MultiPolynomial::parse(s, n).unwrap()
    }

    #[test]
    fn zeroth_contraction_is_the_value() {
        let f = poly("2 x0^2 x1 - x1 + 3", 2);
        let x = [0.3, -1.2];
        assert_relative_eq!(contract(&f, 0, &x, &[5.0, 5.0]).unwrap(), f.eval(&x));
    }

    #[test]
    fn gradient_contraction_of_square() {
        // symbolic gradient: 2 x0, contracted with (x - 0) = 3 → 2·3·3
        let f = poly("1 x0^2", 1);
        assert_relative_eq!(contract(&f, 1, &[3.0], &[0.0]).unwrap(), 18.0);
    }

    #[test]
    fn hessian_contraction_of_mixed_product() {
        // Hessian of x0 x1 has two unit off-diagonal entries
        let f = poly("1 x0 x1", 2);
        assert_relative_eq!(contract(&f, 2, &[1.0, 1.0], &[0.0, 0.0]).unwrap(), 2.0);
    }

    #[test]
    fn contraction_rejects_dimension_mismatch() {
        let f = poly("1 x0 x1", 2);
        assert!(contract(&f, 1, &[1.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn gradient_identity_examples() {
        let c = MultiPolynomial::constant(2, 4.0);
        let (l, r) = gradient_identity_check(&c, 3, &[0.2, 0.7], &[0.0, 1.0]).unwrap();
        assert_eq!((l, r), (0.0, 0.0));

        let f = poly("1 x0^2", 1);
        let (l, r) = gradient_identity_check(&f, 1, &[2.0], &[0.0]).unwrap();
        assert_relative_eq!(l, 16.0, max_relative = 1e-14);
        assert_relative_eq!(r, 16.0, max_relative = 1e-14);
    }

    #[test]
    fn euler_examples() {
        let f = MultiPolynomial::from_terms(vec![1.0], [(MultiIndex::new(vec![3]), 1.0)]).unwrap();
        assert_relative_eq!(euler_check(&f, &[2.0], &[1.0]).unwrap(), 3.0);

        let c = MultiPolynomial::constant(2, 7.0);
        assert_eq!(euler_check(&c, &[1.0, 2.0], &[0.0, 0.0]).unwrap(), 0.0);

        let g = poly("1 x0 x1^2", 2);
        assert_relative_eq!(euler_check(&g, &[1.0, 2.0], &[0.0, 0.0]).unwrap(), 12.0);
    }

    #[test]
    fn euler_rejects_mixed_degrees() {
        let f = poly("1 x0^2 + 1 x0", 1);
        assert!(matches!(
            euler_check(&f, &[1.0], &[0.0]),
            Err(Error::NotHomogeneous(_, _))
        ));
    }

    #[test]
    fn builtin_oracles_match_finite_differences() {
        let x = [0.3, 0.4];
        let v = [0.7, -0.2];
        let h = 1e-4;
        for oracle in [&ExpSum { dim: 2 } as &dyn DerivativeOracle, &SinProduct { dim: 2 }] {
            let at = |t: f64| {
                let p: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + t * b).collect();
                oracle.value(&p).unwrap()
            };
            let d1 = (at(h) - at(-h)) / (2.0 * h);
            let d2 = (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h);
            assert_relative_eq!(oracle.directional(&x, &v, 1).unwrap(), d1, max_relative = 1e-6);
            assert_relative_eq!(oracle.directional(&x, &v, 2).unwrap(), d2, max_relative = 1e-5);
        }
    }
}
