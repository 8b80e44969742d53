//! Truncated multivariate Taylor polynomials.
//!
//! A [`Taylor`] holds the coefficients `c_α = ∂^α f(x0) / α!` of a function of
//! `n` variables around a base point, for every multi-index with `|α| ≤ D`.
//! Arithmetic on these objects is forward-mode differentiation of all orders
//! at once, so any map written against the [`Scalar`] trait yields exact jets.
//!
//! Monomials are stored in graded order (all degree-0, then degree-1, ...)
//! and the ordering inside a degree does not depend on `D`. The degree-`d`
//! layout is therefore a prefix of every higher-degree layout, and truncation
//! is slicing.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

/// Monomial bookkeeping for a given number of variables and truncation degree.
#[derive(Debug)]
pub struct Layout {
    nvars: usize,
    degree: usize,
    exps: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    /// Products `(i, j, k)` with `deg(i) + deg(j) <= degree`, meaning `c_i * c_j -> c_k`.
    mul: Vec<(u32, u32, u32)>,
    /// For each variable: `(src, dst, factor)` mapping this layout onto the
    /// derivative's layout of degree `degree - 1`.
    deriv: Vec<Vec<(u32, u32, f64)>>,
}

impl Layout {
    fn build(nvars: usize, degree: usize) -> Self {
        let mut exps = Vec::new();
        for d in 0..=degree {
            let mut cur = vec![0u8; nvars];
            push_degree(nvars, d, 0, &mut cur, &mut exps);
        }
        let index: HashMap<Vec<u8>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let deg = |e: &Vec<u8>| e.iter().map(|&x| x as usize).sum::<usize>();

        let mut mul = Vec::new();
        for (i, a) in exps.iter().enumerate() {
            for (j, b) in exps.iter().enumerate() {
                if deg(a) + deg(b) > degree {
                    continue;
                }
                let s: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                mul.push((i as u32, j as u32, index[&s] as u32));
            }
        }

        let mut deriv = Vec::with_capacity(nvars);
        for v in 0..nvars {
            let mut table = Vec::new();
            if degree > 0 {
                for (dst, beta) in exps.iter().enumerate() {
                    if deg(beta) >= degree {
                        break;
                    }
                    let mut src = beta.clone();
                    src[v] += 1;
                    table.push((index[&src] as u32, dst as u32, src[v] as f64));
                }
            }
            deriv.push(table);
        }

        Layout {
            nvars,
            degree,
            exps,
            index,
            mul,
            deriv,
        }
    }

    /// Shared layout for `(nvars, degree)`.
    pub fn get(nvars: usize, degree: usize) -> Arc<Layout> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Layout>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("layout cache poisoned");
        guard
            .entry((nvars, degree))
            .or_insert_with(|| Arc::new(Layout::build(nvars, degree)))
            .clone()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self, k: usize) -> &[u8] {
        &self.exps[k]
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }
}

fn push_degree(nvars: usize, remaining: usize, pos: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if pos + 1 == nvars || nvars == 0 {
        if nvars > 0 {
            cur[pos] = remaining as u8;
        } else if remaining > 0 {
            return;
        }
        out.push(cur.clone());
        if nvars > 0 {
            cur[pos] = 0;
        }
        return;
    }
    for k in (0..=remaining).rev() {
        cur[pos] = k as u8;
        push_degree(nvars, remaining - k, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// Truncated Taylor polynomial around a base point.
#[derive(Clone)]
pub struct Taylor {
    layout: Arc<Layout>,
    c: Vec<f64>,
}

impl fmt::Debug for Taylor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Taylor")
            .field("nvars", &self.layout.nvars)
            .field("degree", &self.layout.degree)
            .field("coeffs", &self.c)
            .finish()
    }
}

impl Taylor {
    pub fn constant(layout: &Arc<Layout>, v: f64) -> Self {
        let mut c = vec![0.0; layout.len()];
        c[0] = v;
        Taylor {
            layout: layout.clone(),
            c,
        }
    }

    /// The coordinate function `x_i` expanded around `x0_i`.
    pub fn variable(layout: &Arc<Layout>, i: usize, x0: f64) -> Self {
        let mut t = Self::constant(layout, x0);
        if layout.degree > 0 {
            let mut e = vec![0u8; layout.nvars];
            e[i] = 1;
            t.c[layout.index[&e]] = 1.0;
        }
        t
    }

    /// All coordinate variables for a base point.
    pub fn variables(x0: &[f64], degree: usize) -> Vec<Taylor> {
        let layout = Layout::get(x0.len(), degree);
        x0.iter()
            .enumerate()
            .map(|(i, &v)| Taylor::variable(&layout, i, v))
            .collect()
    }

    pub fn from_coeffs(layout: &Arc<Layout>, c: Vec<f64>) -> Self {
        assert_eq!(c.len(), layout.len());
        Taylor {
            layout: layout.clone(),
            c,
        }
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn degree(&self) -> usize {
        self.layout.degree
    }

    pub fn nvars(&self) -> usize {
        self.layout.nvars
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Partial derivative `∂^α f(x0)` for the multiset of variable indices `idx`.
    pub fn partial(&self, idx: &[usize]) -> f64 {
        if idx.len() > self.layout.degree {
            return 0.0;
        }
        let mut e = vec![0u8; self.layout.nvars];
        for &i in idx {
            e[i] += 1;
        }
        let k = self.layout.index[&e];
        let mult: f64 = e.iter().map(|&x| factorial(x as usize)).product();
        self.c[k] * mult
    }

    pub fn gradient(&self) -> Vec<f64> {
        (0..self.layout.nvars).map(|i| self.partial(&[i])).collect()
    }

    pub fn hessian(&self) -> Vec<Vec<f64>> {
        let n = self.layout.nvars;
        (0..n)
            .map(|i| (0..n).map(|j| self.partial(&[i, j])).collect())
            .collect()
    }

    /// Drop every term of degree above `d`.
    pub fn truncate(&self, d: usize) -> Taylor {
        if d >= self.layout.degree {
            return self.clone();
        }
        let layout = Layout::get(self.layout.nvars, d);
        let c = self.c[..layout.len()].to_vec();
        Taylor { layout, c }
    }

    /// `∂f/∂x_i` as a polynomial of one degree less.
    pub fn derivative(&self, i: usize) -> Taylor {
        assert!(self.layout.degree > 0, "derivative of a degree-0 Taylor polynomial");
        let layout = Layout::get(self.layout.nvars, self.layout.degree - 1);
        let mut c = vec![0.0; layout.len()];
        for &(src, dst, fac) in &self.layout.deriv[i] {
            c[dst as usize] = fac * self.c[src as usize];
        }
        Taylor { layout, c }
    }

    fn common(&self, other: &Taylor) -> Arc<Layout> {
        assert_eq!(self.layout.nvars, other.layout.nvars, "Taylor variable count mismatch");
        if self.layout.degree <= other.layout.degree {
            self.layout.clone()
        } else {
            other.layout.clone()
        }
    }

    pub fn add_ref(&self, o: &Taylor) -> Taylor {
        let layout = self.common(o);
        let c = (0..layout.len()).map(|k| self.c[k] + o.c[k]).collect();
        Taylor { layout, c }
    }

    pub fn sub_ref(&self, o: &Taylor) -> Taylor {
        let layout = self.common(o);
        let c = (0..layout.len()).map(|k| self.c[k] - o.c[k]).collect();
        Taylor { layout, c }
    }

    pub fn mul_ref(&self, o: &Taylor) -> Taylor {
        let layout = self.common(o);
        let mut c = vec![0.0; layout.len()];
        for &(i, j, k) in &layout.mul {
            c[k as usize] += self.c[i as usize] * o.c[j as usize];
        }
        Taylor { layout, c }
    }

    pub fn scale(&self, s: f64) -> Taylor {
        Taylor {
            layout: self.layout.clone(),
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Taylor {
        let mut t = self.clone();
        t.c[0] += s;
        t
    }

    /// `φ ∘ self` given `derivs[k] = φ^(k)(self.value())`.
    pub fn compose_with(&self, derivs: &[f64]) -> Taylor {
        let d = self.layout.degree;
        assert!(
            derivs.len() > d,
            "composition needs {} derivatives, got {}",
            d + 1,
            derivs.len()
        );
        let mut delta = self.clone();
        delta.c[0] = 0.0;
        let mut acc = Taylor::constant(&self.layout, derivs[d] / factorial(d));
        for k in (0..d).rev() {
            acc = acc.mul_ref(&delta).add_scalar(derivs[k] / factorial(k));
        }
        acc
    }

    pub fn max_abs_diff(&self, o: &Taylor) -> f64 {
        let layout = self.common(o);
        (0..layout.len())
            .map(|k| (self.c[k] - o.c[k]).abs())
            .fold(0.0, f64::max)
    }
}

macro_rules! taylor_binop {
    ($tr:ident, $m:ident, $r:ident) => {
        impl $tr for Taylor {
            type Output = Taylor;
            fn $m(self, o: Taylor) -> Taylor {
                self.$r(&o)
            }
        }
        impl<'a> $tr<&'a Taylor> for &'a Taylor {
            type Output = Taylor;
            fn $m(self, o: &'a Taylor) -> Taylor {
                self.$r(o)
            }
        }
    };
}

taylor_binop!(Add, add, add_ref);
taylor_binop!(Sub, sub, sub_ref);
taylor_binop!(Mul, mul, mul_ref);

impl Div for Taylor {
    type Output = Taylor;
    fn div(self, o: Taylor) -> Taylor {
        self.mul_ref(&o.recip())
    }
}

impl<'a> Div<&'a Taylor> for &'a Taylor {
    type Output = Taylor;
    fn div(self, o: &'a Taylor) -> Taylor {
        self.mul_ref(&o.recip())
    }
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        self.scale(-1.0)
    }
}

impl Add<f64> for Taylor {
    type Output = Taylor;
    fn add(self, s: f64) -> Taylor {
        self.add_scalar(s)
    }
}

impl Sub<f64> for Taylor {
    type Output = Taylor;
    fn sub(self, s: f64) -> Taylor {
        self.add_scalar(-s)
    }
}

impl Mul<f64> for Taylor {
    type Output = Taylor;
    fn mul(self, s: f64) -> Taylor {
        self.scale(s)
    }
}

impl Div<f64> for Taylor {
    type Output = Taylor;
    fn div(self, s: f64) -> Taylor {
        self.scale(1.0 / s)
    }
}

/// Number type the analytic chart maps are written against.
///
/// Implemented for `f64` (plain evaluation) and [`Taylor`] (exact jets).
/// Elementary functions route through [`Scalar::compose`], which only needs
/// the derivative sequence of the outer function at the current value.
pub trait Scalar:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// A constant with the same shape as `self`.
    fn lift(&self, v: f64) -> Self;
    fn value(&self) -> f64;
    /// Highest derivative order carried (0 for plain numbers).
    fn order(&self) -> usize;
    /// `φ ∘ self` where `derivs[k] = φ^(k)(self.value())`, `k = 0..=order`.
    fn compose(&self, derivs: &[f64]) -> Self;

    fn sin(&self) -> Self {
        let v = self.value();
        let (s, c) = v.sin_cos();
        let d: Vec<f64> = (0..=self.order())
            .map(|k| match k % 4 {
                0 => s,
                1 => c,
                2 => -s,
                _ => -c,
            })
            .collect();
        self.compose(&d)
    }

    fn cos(&self) -> Self {
        let v = self.value();
        let (s, c) = v.sin_cos();
        let d: Vec<f64> = (0..=self.order())
            .map(|k| match k % 4 {
                0 => c,
                1 => -s,
                2 => -c,
                _ => s,
            })
            .collect();
        self.compose(&d)
    }

    fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose(&vec![e; self.order() + 1])
    }

    fn sinh(&self) -> Self {
        let v = self.value();
        let (s, c) = (v.sinh(), v.cosh());
        let d: Vec<f64> = (0..=self.order()).map(|k| if k % 2 == 0 { s } else { c }).collect();
        self.compose(&d)
    }

    fn cosh(&self) -> Self {
        let v = self.value();
        let (s, c) = (v.sinh(), v.cosh());
        let d: Vec<f64> = (0..=self.order()).map(|k| if k % 2 == 0 { c } else { s }).collect();
        self.compose(&d)
    }

    fn ln(&self) -> Self {
        let v = self.value();
        let d: Vec<f64> = (0..=self.order())
            .map(|k| {
                if k == 0 {
                    v.ln()
                } else {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    sign * factorial(k - 1) / v.powi(k as i32)
                }
            })
            .collect();
        self.compose(&d)
    }

    /// `self^p` for real `p`; the value must be positive unless `p` is an integer.
    fn powf(&self, p: f64) -> Self {
        let v = self.value();
        let mut d = Vec::with_capacity(self.order() + 1);
        let mut coef = 1.0;
        for k in 0..=self.order() {
            d.push(coef * v.powf(p - k as f64));
            coef *= p - k as f64;
        }
        self.compose(&d)
    }

    fn powi(&self, p: i32) -> Self {
        let v = self.value();
        let mut d = Vec::with_capacity(self.order() + 1);
        let mut coef = 1.0;
        for k in 0..=self.order() {
            let e = p - k as i32;
            d.push(if coef == 0.0 { 0.0 } else { coef * v.powi(e) });
            coef *= e as f64;
        }
        self.compose(&d)
    }

    fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    fn recip(&self) -> Self {
        self.powi(-1)
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Scalar for f64 {
    fn lift(&self, v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn order(&self) -> usize {
        0
    }
    fn compose(&self, derivs: &[f64]) -> Self {
        derivs[0]
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sinh(&self) -> Self {
        f64::sinh(*self)
    }
    fn cosh(&self) -> Self {
        f64::cosh(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn powf(&self, p: f64) -> Self {
        f64::powf(*self, p)
    }
    fn powi(&self, p: i32) -> Self {
        f64::powi(*self, p)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn recip(&self) -> Self {
        1.0 / *self
    }
}

impl Scalar for Taylor {
    fn lift(&self, v: f64) -> Self {
        Taylor::constant(&self.layout, v)
    }
    fn value(&self) -> f64 {
        self.c[0]
    }
    fn order(&self) -> usize {
        self.layout.degree
    }
    fn compose(&self, derivs: &[f64]) -> Self {
        self.compose_with(derivs)
    }
}

/// Sum of a non-empty iterator of scalars.
pub fn sum<S: Scalar>(items: impl IntoIterator<Item = S>) -> S {
    let mut it = items.into_iter();
    let first = it.next().expect("sum of an empty sequence");
    it.fold(first, |a, b| a + b)
}

/// Euclidean dot product of two equal-length slices.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    sum(a.iter().zip(b).map(|(x, y)| x.clone() * y.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layouts_are_prefix_compatible() {
        let small = Layout::get(3, 2);
        let big = Layout::get(3, 4);
        for k in 0..small.len() {
            assert_eq!(small.exponents(k), big.exponents(k));
        }
        // C(3+4, 4) = 35 monomials
        assert_eq!(big.len(), 35);
    }

    #[test]
    fn polynomial_partials_are_exact() {
        // f(x, y) = x^3 y + 2 y^2 at (1, 2)
        let v = Taylor::variables(&[1.0, 2.0], 4);
        let (x, y) = (v[0].clone(), v[1].clone());
        let f = x.clone() * x.clone() * x.clone() * y.clone() + y.clone() * y * 2.0;
        assert_eq!(f.value(), 2.0 + 8.0);
        assert_eq!(f.partial(&[0]), 6.0);
        assert_eq!(f.partial(&[1]), 1.0 + 8.0);
        assert_eq!(f.partial(&[0, 0]), 12.0);
        assert_eq!(f.partial(&[0, 1]), 3.0);
        assert_eq!(f.partial(&[1, 1]), 4.0);
        assert_eq!(f.partial(&[0, 0, 0]), 12.0);
        assert_eq!(f.partial(&[0, 0, 1]), 6.0);
        assert_eq!(f.partial(&[0, 0, 0, 1]), 6.0);
        assert_eq!(f.partial(&[0, 0, 0, 0]), 0.0);
    }

    #[test]
    fn derivative_lowers_degree_and_matches_partials() {
        let v = Taylor::variables(&[0.3, -0.7], 4);
        let f = (v[0].clone() * v[1].clone()).sin() + v[0].exp();
        let fx = f.derivative(0);
        assert_eq!(fx.degree(), 3);
        assert!((fx.partial(&[1, 1]) - f.partial(&[0, 1, 1])).abs() < 1e-14);
        assert!((fx.value() - f.partial(&[0])).abs() < 1e-15);
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let t = Taylor::variables(&[0.4], 4)[0].clone();
        let s = t.sin();
        let x: f64 = 0.4;
        assert!((s.partial(&[0, 0, 0]) + x.cos()).abs() < 1e-15);
        let l = t.ln();
        assert!((l.partial(&[0, 0, 0, 0]) + 6.0 / x.powi(4)).abs() < 1e-10);
        let r = t.recip();
        assert!((r.partial(&[0, 0]) - 2.0 / x.powi(3)).abs() < 1e-12);
        let q = t.sqrt();
        assert!((q.partial(&[0, 0]) + 0.25 * x.powf(-1.5)).abs() < 1e-13);
        let h = t.cosh();
        assert!((h.partial(&[0, 0, 0]) - x.sinh()).abs() < 1e-15);
    }

    #[test]
    fn division_inverts_multiplication() {
        let v = Taylor::variables(&[1.2, 0.5, -0.3], 3);
        let a = v[0].clone() * v[1].clone() + 2.0;
        let b = v[2].clone().cos() + v[0].clone();
        let q = a.clone() / b.clone();
        assert!((q * b).max_abs_diff(&a) < 1e-13);
    }

    #[test]
    fn mixed_degree_arithmetic_truncates() {
        let hi = Taylor::variables(&[1.0], 4)[0].clone();
        let lo = hi.truncate(2);
        let p = hi.clone() * lo;
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn negative_integer_powers_work_for_negative_values() {
        let t = Taylor::variables(&[-2.0], 3)[0].clone();
        let r = t.powi(-2);
        assert!((r.value() - 0.25).abs() < 1e-15);
        // d/dx x^-2 = -2 x^-3 = 0.25 at -2
        assert!((r.partial(&[0]) - 0.25).abs() < 1e-15);
    }
}
