//! Sparse multivariate polynomials with an explicit expansion center.
//!
//! A [`MultiPolynomial`] stores coefficients of powers of `(x - center)`.
//! Most of the integration machinery works in coordinates centered on the
//! barycenter of the face being integrated, so the center is part of the
//! value rather than an afterthought.

mod contract;
mod text;

pub use contract::{
    contract, contraction_field, directional_derivative, divergence_of_scaled_field, euler_check,
    gradient_identity_check, DerivativeOracle, ExpSum, SinProduct,
};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Exponent vector of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn unit(dim: usize, j: usize) -> Self {
        let mut e = vec![0; dim];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn plus(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// All multi-indices of the given dimension with total degree exactly `degree`.
    pub fn all_of_degree(dim: usize, degree: u32) -> Vec<MultiIndex> {
        fn rec(dim: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == dim {
                prefix.push(left);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in (0..=left).rev() {
                prefix.push(e);
                rec(dim, left - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if dim == 0 {
            if degree == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        rec(dim, degree, &mut Vec::with_capacity(dim), &mut out);
        out
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

/// A real polynomial in `dim` variables, stored as a sparse map from
/// exponent vectors to coefficients of `(x - center)^alpha`.
///
/// No zero coefficients are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPolynomial {
    dim: usize,
    center: Vec<f64>,
    terms: BTreeMap<MultiIndex, f64>,
}

impl MultiPolynomial {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            center: vec![0.0; dim],
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::zero(dim), c);
        p
    }

    /// The coordinate function `x_j`.
    pub fn variable(dim: usize, j: usize) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::unit(dim, j), 1.0);
        p
    }

    pub fn monomial(coefficient: f64, exponents: Vec<u32>) -> Self {
        let dim = exponents.len();
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex(exponents), coefficient);
        p
    }

    /// Builds `sum c * (x - center)^alpha` from the given terms.
    pub fn from_terms<I>(center: Vec<f64>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, f64)>,
    {
        let dim = center.len();
        let mut p = Self {
            dim,
            center,
            terms: BTreeMap::new(),
        };
        for (idx, c) in terms {
            if idx.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: idx.dim(),
                });
            }
            p.add_term(idx, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
        self.terms.iter().map(|(k, v)| (k, *v))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, idx: &MultiIndex) -> f64 {
        self.terms.get(idx).copied().unwrap_or(0.0)
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn add_term(&mut self, idx: MultiIndex, c: f64) {
        debug_assert_eq!(idx.dim(), self.dim);
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(idx);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "point dimension does not match polynomial");
        let shifted: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        self.eval_shifted(&shifted)
    }

    pub fn try_eval(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.eval(x))
    }

    fn eval_shifted(&self, y: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(idx, c)| {
                idx.0
                    .iter()
                    .zip(y)
                    .fold(*c, |acc, (&e, &v)| acc * v.powi(e as i32))
            })
            .sum()
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self {
            dim: self.dim,
            center: self.center.clone(),
            terms: BTreeMap::new(),
        };
        for (idx, c) in &self.terms {
            out.add_term(idx.clone(), c * s);
        }
        out
    }

    /// Partial derivative with respect to variable `j`.
    pub fn derivative(&self, j: usize) -> Self {
        let mut out = Self {
            dim: self.dim,
            center: self.center.clone(),
            terms: BTreeMap::new(),
        };
        for (idx, c) in &self.terms {
            let e = idx.0[j];
            if e == 0 {
                continue;
            }
            let mut d = idx.0.clone();
            d[j] -= 1;
            out.add_term(MultiIndex(d), c * e as f64);
        }
        out
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.dim).map(|j| self.derivative(j)).collect()
    }

    /// Re-expresses the polynomial in powers of `(x - new_center)`.
    ///
    /// Evaluation is unchanged; the coefficient map is rewritten by binomial
    /// expansion of `(x - old) = (x - new) + (new - old)`.
    pub fn recenter(&self, new_center: &[f64]) -> Self {
        assert_eq!(new_center.len(), self.dim, "center dimension mismatch");
        if new_center == self.center.as_slice() {
            return self.clone();
        }
        let shift: Vec<f64> = new_center
            .iter()
            .zip(&self.center)
            .map(|(n, o)| n - o)
            .collect();
        let mut out = Self {
            dim: self.dim,
            center: new_center.to_vec(),
            terms: BTreeMap::new(),
        };
        for (idx, c) in &self.terms {
            // (y + d)^e = sum_r C(e, r) d^(e-r) y^r, taken per coordinate.
            let factors: Vec<Vec<(u32, f64)>> = idx
                .0
                .iter()
                .zip(&shift)
                .map(|(&e, &d)| {
                    (0..=e)
                        .filter_map(|r| {
                            let w = binomial(e, r) * d.powi((e - r) as i32);
                            (w != 0.0).then_some((r, w))
                        })
                        .collect()
                })
                .collect();
            expand_product(&factors, *c, &mut |exps, w| out.add_term(MultiIndex(exps), w));
        }
        out
    }

    /// Same polynomial expressed about the origin.
    pub fn to_origin(&self) -> Self {
        self.recenter(&vec![0.0; self.dim])
    }

    /// Splits the polynomial into homogeneous parts about its own center.
    /// Entry `q` holds the degree-`q` layer.
    pub fn homogeneous_layers(&self) -> Vec<Self> {
        let deg = self.degree() as usize;
        let mut layers: Vec<Self> = (0..=deg)
            .map(|_| Self {
                dim: self.dim,
                center: self.center.clone(),
                terms: BTreeMap::new(),
            })
            .collect();
        for (idx, c) in &self.terms {
            layers[idx.degree() as usize].add_term(idx.clone(), *c);
        }
        layers
    }

    /// Reweights each homogeneous layer (about the center) by `weight(q)`.
    pub fn map_layers(&self, weight: impl Fn(u32) -> f64) -> Self {
        let mut out = Self {
            dim: self.dim,
            center: self.center.clone(),
            terms: BTreeMap::new(),
        };
        for (idx, c) in &self.terms {
            out.add_term(idx.clone(), c * weight(idx.degree()));
        }
        out
    }

    /// The composition `s -> f(x0 + A s)` as a polynomial in `m = A.ncols()`
    /// variables, centered at the origin of `s`.
    pub fn pullback(&self, a: &DMatrix<f64>, x0: &[f64]) -> Result<Self> {
        if a.nrows() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: a.nrows(),
            });
        }
        if x0.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x0.len(),
            });
        }
        let m = a.ncols();
        let max_exp: Vec<u32> = (0..self.dim)
            .map(|j| self.terms.keys().map(|k| k.0[j]).max().unwrap_or(0))
            .collect();
        // powers[j][p] = (x0_j - c_j + (A s)_j)^p
        let powers: Vec<Vec<Self>> = (0..self.dim)
            .map(|j| {
                let mut lin = Self::constant(m, x0[j] - self.center[j]);
                for i in 0..m {
                    lin.add_term(MultiIndex::unit(m, i), a[(j, i)]);
                }
                let mut pw = vec![Self::constant(m, 1.0)];
                for p in 1..=max_exp[j] as usize {
                    let next = &pw[p - 1] * &lin;
                    pw.push(next);
                }
                pw
            })
            .collect();
        let mut out = Self::zero(m);
        for (idx, c) in &self.terms {
            let mut prod = Self::constant(m, *c);
            for (j, &e) in idx.0.iter().enumerate() {
                if e > 0 {
                    prod = &prod * &powers[j][e as usize];
                }
            }
            out.accumulate(&prod, 1.0);
        }
        Ok(out)
    }

    /// `self += w * other`, with `other` already sharing this center.
    fn accumulate(&mut self, other: &Self, w: f64) {
        debug_assert_eq!(self.center, other.center);
        for (idx, c) in &other.terms {
            self.add_term(idx.clone(), c * w);
        }
    }

    fn aligned<'a>(&self, other: &'a Self) -> std::borrow::Cow<'a, Self> {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
        if self.center == other.center {
            std::borrow::Cow::Borrowed(other)
        } else {
            std::borrow::Cow::Owned(other.recenter(&self.center))
        }
    }
}

fn expand_product(factors: &[Vec<(u32, f64)>], coef: f64, emit: &mut dyn FnMut(Vec<u32>, f64)) {
    fn rec(
        factors: &[Vec<(u32, f64)>],
        pos: usize,
        acc: f64,
        exps: &mut Vec<u32>,
        emit: &mut dyn FnMut(Vec<u32>, f64),
    ) {
        if pos == factors.len() {
            emit(exps.clone(), acc);
            return;
        }
        for &(r, w) in &factors[pos] {
            exps.push(r);
            rec(factors, pos + 1, acc * w, exps, emit);
            exps.pop();
        }
    }
    rec(factors, 0, coef, &mut Vec::with_capacity(factors.len()), emit);
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

impl Add<&MultiPolynomial> for &MultiPolynomial {
    type Output = MultiPolynomial;
    fn add(self, rhs: &MultiPolynomial) -> MultiPolynomial {
        let rhs = self.aligned(rhs);
        let mut out = self.clone();
        out.accumulate(&rhs, 1.0);
        out
    }
}

impl Sub<&MultiPolynomial> for &MultiPolynomial {
    type Output = MultiPolynomial;
    fn sub(self, rhs: &MultiPolynomial) -> MultiPolynomial {
        let rhs = self.aligned(rhs);
        let mut out = self.clone();
        out.accumulate(&rhs, -1.0);
        out
    }
}

impl Mul<&MultiPolynomial> for &MultiPolynomial {
    type Output = MultiPolynomial;
    fn mul(self, rhs: &MultiPolynomial) -> MultiPolynomial {
        let rhs = self.aligned(rhs);
        let mut out = MultiPolynomial {
            dim: self.dim,
            center: self.center.clone(),
            terms: BTreeMap::new(),
        };
        for (i, a) in &self.terms {
            for (j, b) in &rhs.terms {
                out.add_term(i.plus(j), a * b);
            }
        }
        out
    }
}

impl Mul<f64> for &MultiPolynomial {
    type Output = MultiPolynomial;
    fn mul(self, rhs: f64) -> MultiPolynomial {
        self.scale(rhs)
    }
}

impl Neg for &MultiPolynomial {
    type Output = MultiPolynomial;
    fn neg(self) -> MultiPolynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<MultiPolynomial> for MultiPolynomial {
            type Output = MultiPolynomial;
            fn $m(self, rhs: MultiPolynomial) -> MultiPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for MultiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::format_polynomial(self, f)
    }
}

impl std::str::FromStr for MultiPolynomial {
    type Err = Error;

    /// Parses with the dimension inferred from the largest variable index.
    fn from_str(s: &str) -> Result<Self> {
        text::parse_polynomial(s, None)
    }
}

impl MultiPolynomial {
    /// Parses the text format (`3.5 x0^2 x1 - 1 x2`) in exactly `dim` variables.
    pub fn parse(s: &str, dim: usize) -> Result<Self> {
        text::parse_polynomial(s, Some(dim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn recenter_expands_binomially() {
        // (x - 1)^2 about 1, rewritten about 0
        let p = MultiPolynomial::from_terms(vec![1.0], [(MultiIndex::new(vec![2]), 1.0)]).unwrap();
        let q = p.recenter(&[0.0]);
        assert_eq!(q.coefficient(&MultiIndex::new(vec![2])), 1.0);
        assert_eq!(q.coefficient(&MultiIndex::new(vec![1])), -2.0);
        assert_eq!(q.coefficient(&MultiIndex::new(vec![0])), 1.0);
        assert_eq!(q.num_terms(), 3);
    }

    #[test]
    fn recenter_at_same_center_is_identity() {
        let p = MultiPolynomial::parse("2 x0^3 x1 - 1 x1 + 4", 2).unwrap();
        assert_eq!(p.recenter(&[0.0, 0.0]), p);
    }

    #[test]
    fn recentered_product_evaluates_the_same() {
        let p = MultiPolynomial::parse("1 x0 x1", 2).unwrap();
        let q = p.recenter(&[1.0, 1.0]);
        assert_relative_eq!(q.eval(&[2.0, 3.0]), 6.0, max_relative = 1e-15);
        assert_relative_eq!(p.eval(&[2.0, 3.0]), 6.0, max_relative = 1e-15);
    }

    #[test]
    fn pullback_on_diagonal_segment() {
        let a = DMatrix::from_column_slice(2, 1, &[1.0, 1.0]);
        let f = MultiPolynomial::parse("1 x0^2", 2).unwrap();
        let g = MultiPolynomial::parse("1 x0^2 + 1 x1^2", 2).unwrap();
        let pf = f.pullback(&a, &[0.0, 0.0]).unwrap();
        let pg = g.pullback(&a, &[0.0, 0.0]).unwrap();
        assert_eq!(pf, MultiPolynomial::monomial(1.0, vec![2]));
        assert_eq!(pg, MultiPolynomial::monomial(2.0, vec![2]));
    }

    #[test]
    fn pullback_of_constant_and_identity() {
        let c = MultiPolynomial::constant(3, 2.5);
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 3.0, -1.0]);
        assert_eq!(c.pullback(&a, &[1.0, 2.0, 3.0]).unwrap(), MultiPolynomial::constant(2, 2.5));

        let lin = MultiPolynomial::parse("2 x0 - 3 x1 + 1", 2).unwrap();
        let id = DMatrix::identity(2, 2);
        assert_eq!(lin.pullback(&id, &[0.0, 0.0]).unwrap(), lin);
    }

    #[test]
    fn pullback_rejects_mismatched_chart() {
        let f = MultiPolynomial::variable(3, 0);
        let a = DMatrix::identity(2, 2);
        assert!(matches!(
            f.pullback(&a, &[0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn derivative_and_layers() {
        let p = MultiPolynomial::parse("3 x0^2 x1 + 2 x1 + 5", 2).unwrap();
        let d0 = p.derivative(0);
        assert_eq!(d0, MultiPolynomial::parse("6 x0 x1", 2).unwrap());
        let layers = p.homogeneous_layers();
        assert_eq!(layers.len(), 4);
        assert_eq!(layers[0], MultiPolynomial::constant(2, 5.0));
        assert!(layers[2].is_zero());
        assert_eq!(layers[3].num_terms(), 1);
    }

    #[test]
    fn all_of_degree_counts() {
        assert_eq!(MultiIndex::all_of_degree(3, 2).len(), 6);
        assert_eq!(MultiIndex::all_of_degree(4, 6).len(), 84);
        assert_eq!(MultiIndex::all_of_degree(0, 0).len(), 1);
    }
}
