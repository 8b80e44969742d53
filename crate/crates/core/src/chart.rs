//! Parametrized immersions and their jets.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::taylor::{Layout, Scalar, Taylor};

/// Highest derivative order any evaluator produces.
pub const MAX_ORDER: usize = 4;

/// A map written once against [`Scalar`] and usable both for plain
/// evaluation and for exact jets.
pub trait GenericMap: Send + Sync {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S>;
}

/// Object-safe view of a chart map.
pub trait ChartMap: Send + Sync {
    fn eval_f64(&self, x: &[f64]) -> Vec<f64>;
    fn eval_taylor(&self, x: &[Taylor]) -> Vec<Taylor>;
}

impl<T: GenericMap> ChartMap for T {
    fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.eval(x)
    }
    fn eval_taylor(&self, x: &[Taylor]) -> Vec<Taylor> {
        self.eval(x)
    }
}

/// Plain point map for charts without analytic jets.
pub type PointMap = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl DomainBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(GeomError::SpecInvalid(format!(
                "domain bounds have lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i])) {
            return Err(GeomError::SpecInvalid(format!(
                "domain axis {i}: lower {} is not below upper {}",
                lower[i], upper[i]
            )));
        }
        Ok(DomainBox { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Distance from `x` to the boundary (negative outside).
    pub fn clearance(&self, x: &[f64]) -> f64 {
        (0..self.dim())
            .map(|i| (x[i] - self.lower[i]).min(self.upper[i] - x[i]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn check(&self, x: &[f64], margin: f64) -> Result<()> {
        if x.len() != self.dim() {
            return Err(GeomError::DomainViolation {
                coords: x.to_vec(),
                reason: format!("expected {} coordinates", self.dim()),
            });
        }
        let c = self.clearance(x);
        if !(c > margin) {
            return Err(GeomError::DomainViolation {
                coords: x.to_vec(),
                reason: format!("clearance {c:.3e} does not exceed margin {margin:.1e}"),
            });
        }
        Ok(())
    }

    /// Uniform sample keeping `margin` away from every face.
    pub fn sample<R: Rng>(&self, rng: &mut R, margin: f64) -> Vec<f64> {
        (0..self.dim())
            .map(|i| rng.gen_range(self.lower[i] + margin..self.upper[i] - margin))
            .collect()
    }

    /// Tensor grid with `counts[i]` samples per axis, inset by `margin`.
    pub fn grid(&self, counts: &[usize], margin: f64) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = (0..self.dim())
            .map(|i| {
                let (a, b) = (self.lower[i] + margin, self.upper[i] - margin);
                let k = counts[i].max(1);
                if k == 1 {
                    vec![0.5 * (a + b)]
                } else {
                    (0..k).map(|j| a + (b - a) * j as f64 / (k - 1) as f64).collect()
                }
            })
            .collect();
        let mut out = vec![Vec::new()];
        for axis in &axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

/// Jets of a map `R^n -> R^m` at a point, up to a fixed order.
///
/// Stored as one truncated Taylor polynomial per output component, so every
/// derivative slot is symmetric by construction. Slots above `order` read as
/// zero.
#[derive(Debug, Clone)]
pub struct Jet {
    order: usize,
    comps: Vec<Taylor>,
}

impl Jet {
    pub fn from_components(comps: Vec<Taylor>) -> Self {
        let order = comps.first().map_or(0, |c| c.degree());
        Jet { order, comps }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn ambient_dim(&self) -> usize {
        self.comps.len()
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.comps.first().map_or(0, |c| c.nvars())
    }

    pub fn components(&self) -> &[Taylor] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Taylor> {
        self.comps
    }

    pub fn value(&self) -> Vec<f64> {
        self.comps.iter().map(|c| c.value()).collect()
    }

    /// `∂^idx f_a`; zero when `idx` exceeds the available order.
    pub fn partial(&self, a: usize, idx: &[usize]) -> f64 {
        self.comps[a].partial(idx)
    }

    pub fn d1(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.ambient_dim(), self.intrinsic_dim(), |a, i| self.partial(a, &[i]))
    }

    pub fn has_order(&self, k: usize) -> bool {
        k <= self.order
    }

    /// Largest absolute difference between derivatives of exactly order `k`.
    pub fn max_diff_at_order(&self, other: &Jet, k: usize) -> f64 {
        let n = self.intrinsic_dim();
        let layout = Layout::get(n, k);
        let mut worst: f64 = 0.0;
        for idx in 0..layout.len() {
            let e = layout.exponents(idx);
            if e.iter().map(|&x| x as usize).sum::<usize>() != k {
                continue;
            }
            let multi: Vec<usize> = e
                .iter()
                .enumerate()
                .flat_map(|(v, &c)| std::iter::repeat(v).take(c as usize))
                .collect();
            for a in 0..self.ambient_dim() {
                worst = worst.max((self.partial(a, &multi) - other.partial(a, &multi)).abs());
            }
        }
        worst
    }
}

/// Finite-difference step sizes per derivative order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdSteps {
    pub low: f64,
    pub third: f64,
    pub fourth: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        FdSteps {
            low: 1e-3,
            third: 5e-3,
            fourth: 1e-2,
        }
    }
}

impl FdSteps {
    /// Steps derived from a base step with the default ratios.
    pub fn scaled(base: f64) -> Self {
        FdSteps {
            low: base,
            third: 5.0 * base,
            fourth: 10.0 * base,
        }
    }

    pub fn for_order(&self, k: usize) -> f64 {
        match k {
            0..=2 => self.low,
            3 => self.third,
            _ => self.fourth,
        }
    }

    /// Largest step used for jets up to `order`.
    pub fn max_up_to(&self, order: usize) -> f64 {
        (1..=order.max(1)).map(|k| self.for_order(k)).fold(0.0, f64::max)
    }
}

#[derive(Clone)]
pub enum Evaluator {
    Exact(Arc<dyn ChartMap>),
    FiniteDifference { map: Arc<PointMap>, steps: FdSteps },
}

impl fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evaluator::Exact(_) => f.write_str("Exact"),
            Evaluator::FiniteDifference { steps, .. } => {
                f.debug_struct("FiniteDifference").field("steps", steps).finish()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ImmersionChart {
    pub intrinsic_dim: usize,
    pub ambient_dim: usize,
    pub domain: DomainBox,
    pub evaluator: Evaluator,
    pub label: String,
}

impl ImmersionChart {
    pub fn exact(
        domain: DomainBox,
        ambient_dim: usize,
        map: Arc<dyn ChartMap>,
        label: impl Into<String>,
    ) -> Self {
        ImmersionChart {
            intrinsic_dim: domain.dim(),
            ambient_dim,
            domain,
            evaluator: Evaluator::Exact(map),
            label: label.into(),
        }
    }

    pub fn finite_difference(
        domain: DomainBox,
        ambient_dim: usize,
        map: Arc<PointMap>,
        label: impl Into<String>,
    ) -> Self {
        ImmersionChart {
            intrinsic_dim: domain.dim(),
            ambient_dim,
            domain,
            evaluator: Evaluator::FiniteDifference {
                map,
                steps: FdSteps::default(),
            },
            label: label.into(),
        }
    }

    /// Same map, jets taken by finite differences instead.
    pub fn to_finite_difference(&self) -> ImmersionChart {
        let map: Arc<PointMap> = match &self.evaluator {
            Evaluator::Exact(m) => {
                let m = m.clone();
                Arc::new(move |x: &[f64]| m.eval_f64(x))
            }
            Evaluator::FiniteDifference { map, .. } => map.clone(),
        };
        ImmersionChart::finite_difference(
            self.domain.clone(),
            self.ambient_dim,
            map,
            format!("{} [fd]", self.label),
        )
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.evaluator, Evaluator::Exact(_))
    }

    /// Required clearance from the boundary for jets up to `order`.
    pub fn margin(&self, order: usize) -> f64 {
        match &self.evaluator {
            Evaluator::Exact(_) => 0.0,
            Evaluator::FiniteDifference { steps, .. } => 4.0 * steps.max_up_to(order),
        }
    }

    pub fn point(&self, x: &[f64]) -> Vec<f64> {
        match &self.evaluator {
            Evaluator::Exact(m) => m.eval_f64(x),
            Evaluator::FiniteDifference { map, .. } => map(x),
        }
    }
}

/// Jets of the chart map at `x` up to `order` (1..=4), with the immersion
/// rank condition enforced.
pub fn evaluate_jet(chart: &ImmersionChart, x: &[f64], order: usize) -> Result<Jet> {
    let order = order.clamp(1, MAX_ORDER);
    chart.domain.check(x, chart.margin(order))?;
    let jet = match &chart.evaluator {
        Evaluator::Exact(map) => {
            let vars = Taylor::variables(x, order);
            Jet::from_components(map.eval_taylor(&vars))
        }
        Evaluator::FiniteDifference { map, steps } => fd_jet_with_steps(map.as_ref(), x, order, *steps),
    };
    check_rank(&jet)?;
    Ok(jet)
}

fn check_rank(jet: &Jet) -> Result<()> {
    let n = jet.intrinsic_dim();
    let d1 = jet.d1();
    let sv = d1.singular_values();
    let smax = sv.max();
    let smin = if sv.len() < n { 0.0 } else { sv.min() };
    if !(smin > 1e-10 * smax.max(1e-300)) {
        return Err(GeomError::RankDeficient { n, sigma_min: smin });
    }
    Ok(())
}

/// Central-difference jets with one Richardson level.
///
/// Derivatives of order `k` use the step `step` for `k <= 2`, `5 step` for
/// `k = 3` and `10 step` for `k = 4`. Each mixed partial is a tensor product
/// of one-dimensional central stencils, so its truncation error expands in
/// even powers of the step; one extrapolation (`(4 D(h/2) - D(h)) / 3`)
/// removes the `h^2` term and leaves `O(h^4)`. Roundoff grows like
/// `eps / h^k`, which is what sets the per-order steps.
pub fn fd_jet_oracle(map: &PointMap, x: &[f64], order: usize, step: f64) -> Result<Jet> {
    if !(step > 0.0) || x.is_empty() {
        return Err(GeomError::DomainViolation {
            coords: x.to_vec(),
            reason: format!("finite-difference step {step} must be positive"),
        });
    }
    Ok(fd_jet_with_steps(map, x, order.clamp(1, MAX_ORDER), FdSteps::scaled(step)))
}

fn stencil(k: usize) -> &'static [(i64, f64)] {
    match k {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        _ => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
    }
}

struct Sampler<'a> {
    map: &'a PointMap,
    x: &'a [f64],
    /// Grid unit; offsets are integer multiples of it.
    unit: f64,
    cache: HashMap<Vec<i64>, Vec<f64>>,
}

impl Sampler<'_> {
    fn at(&mut self, offs: &[i64]) -> &Vec<f64> {
        if !self.cache.contains_key(offs) {
            let p: Vec<f64> = self
                .x
                .iter()
                .zip(offs)
                .map(|(xi, &o)| xi + o as f64 * self.unit)
                .collect();
            let v = (self.map)(&p);
            self.cache.insert(offs.to_vec(), v);
        }
        &self.cache[offs]
    }

    /// Difference quotient for exponent vector `e` with step `scale * unit`.
    fn quotient(&mut self, e: &[u8], scale: i64) -> Vec<f64> {
        let n = e.len();
        let h = scale as f64 * self.unit;
        let total: usize = e.iter().map(|&k| k as usize).sum();
        let mut acc: Option<Vec<f64>> = None;
        let mut offs = vec![0i64; n];
        let mut idx = vec![0usize; n];
        loop {
            let mut w = 1.0;
            for v in 0..n {
                let (o, c) = stencil(e[v] as usize)[idx[v]];
                offs[v] = o * scale;
                w *= c;
            }
            let val = self.at(&offs).clone();
            match &mut acc {
                None => acc = Some(val.iter().map(|t| w * t).collect()),
                Some(a) => a.iter_mut().zip(&val).for_each(|(s, t)| *s += w * t),
            }
            // odometer over the per-variable stencils
            let mut v = 0;
            loop {
                if v == n {
                    let denom = h.powi(total as i32);
                    return acc.unwrap().into_iter().map(|s| s / denom).collect();
                }
                idx[v] += 1;
                if idx[v] < stencil(e[v] as usize).len() {
                    break;
                }
                idx[v] = 0;
                v += 1;
            }
        }
    }
}

fn fd_jet_with_steps(map: &PointMap, x: &[f64], order: usize, steps: FdSteps) -> Jet {
    let n = x.len();
    let layout = Layout::get(n, order);
    let value = map(x);
    let m = value.len();
    let mut coeffs = vec![vec![0.0; layout.len()]; m];
    for a in 0..m {
        coeffs[a][0] = value[a];
    }
    let mut samplers: HashMap<u64, Sampler> = HashMap::new();
    for k in 1..layout.len() {
        let e = layout.exponents(k).to_vec();
        let deg: usize = e.iter().map(|&c| c as usize).sum();
        let h = steps.for_order(deg);
        // unit h/2 so both Richardson levels share one cache
        let sampler = samplers.entry(h.to_bits()).or_insert_with(|| Sampler {
            map,
            x,
            unit: 0.5 * h,
            cache: HashMap::new(),
        });
        let coarse = sampler.quotient(&e, 2);
        let fine = sampler.quotient(&e, 1);
        let fact: f64 = e
            .iter()
            .map(|&c| (1..=c as usize).map(|t| t as f64).product::<f64>())
            .product();
        for a in 0..m {
            coeffs[a][k] = (4.0 * fine[a] - coarse[a]) / 3.0 / fact;
        }
    }
    Jet::from_components(
        coeffs
            .into_iter()
            .map(|c| Taylor::from_coeffs(&layout, c))
            .collect(),
    )
}

/// Taylor components of the chart map at `x` with the given degree, the
/// common input of every downstream pipeline.
pub fn taylor_components(chart: &ImmersionChart, x: &[f64], degree: usize) -> Result<Vec<Taylor>> {
    Ok(evaluate_jet(chart, x, degree)?.into_components())
}

/// Scalar-generic helper: `x * x` summed over components.
pub fn norm_sq<S: Scalar>(x: &[S]) -> S {
    crate::taylor::dot(x, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Cylinder;
    impl GenericMap for Cylinder {
        fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
            vec![x[0].cos(), x[0].sin(), x[1].clone()]
        }
    }

    fn unit_box(n: usize) -> DomainBox {
        DomainBox::new(vec![-1.0; n], vec![1.0; n]).unwrap()
    }

    #[test]
    fn identity_chart_jets() {
        struct Id;
        impl GenericMap for Id {
            fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
                x.to_vec()
            }
        }
        let chart = ImmersionChart::exact(unit_box(2), 2, Arc::new(Id), "id");
        let jet = evaluate_jet(&chart, &[0.3, 0.4], 1).unwrap();
        assert_eq!(jet.value(), vec![0.3, 0.4]);
        assert_eq!(jet.d1(), DMatrix::identity(2, 2));
        assert_eq!(jet.partial(0, &[0, 0]), 0.0);
    }

    #[test]
    fn cylinder_second_derivative() {
        let chart = ImmersionChart::exact(unit_box(2), 3, Arc::new(Cylinder), "cyl");
        let jet = evaluate_jet(&chart, &[0.0, 0.0], 2).unwrap();
        assert_eq!(jet.partial(0, &[0, 0]), -1.0);
    }

    #[test]
    fn fd_oracle_on_monomial_exp_and_constant() {
        let cube: Arc<PointMap> = Arc::new(|x: &[f64]| vec![x[0].powi(3)]);
        let j = fd_jet_oracle(cube.as_ref(), &[1.0], 2, 1e-3).unwrap();
        assert!((j.partial(0, &[0, 0]) - 6.0).abs() < 1e-8);

        let exp: Arc<PointMap> = Arc::new(|x: &[f64]| vec![x[0].exp()]);
        let j = fd_jet_oracle(exp.as_ref(), &[0.0], 3, 1e-3).unwrap();
        assert!((j.partial(0, &[0, 0, 0]) - 1.0).abs() < 1e-5);

        let constant: Arc<PointMap> = Arc::new(|_: &[f64]| vec![2.5, -1.0]);
        let j = fd_jet_oracle(constant.as_ref(), &[0.1, 0.2], 3, 1e-3).unwrap();
        for a in 0..2 {
            for idx in [vec![0], vec![1, 1], vec![0, 1, 1]] {
                assert_eq!(j.partial(a, &idx), 0.0);
            }
        }
    }

    #[test]
    fn boundary_margin_is_enforced_for_fd() {
        let chart = ImmersionChart::exact(unit_box(2), 3, Arc::new(Cylinder), "cyl").to_finite_difference();
        assert!(matches!(
            evaluate_jet(&chart, &[0.998, 0.0], 2),
            Err(GeomError::DomainViolation { .. })
        ));
        assert!(evaluate_jet(&chart, &[0.5, 0.0], 2).is_ok());
    }

    #[test]
    fn rank_deficiency_is_reported() {
        struct Fold;
        impl GenericMap for Fold {
            fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
                vec![x[0].clone() + x[1].clone(), (x[0].clone() + x[1].clone()).square()]
            }
        }
        let chart = ImmersionChart::exact(unit_box(2), 2, Arc::new(Fold), "fold");
        assert!(matches!(
            evaluate_jet(&chart, &[0.1, 0.2], 2),
            Err(GeomError::RankDeficient { .. })
        ));
    }

    #[test]
    fn grid_counts() {
        let b = DomainBox::new(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        let g = b.grid(&[3, 2], 0.1);
        assert_eq!(g.len(), 6);
        assert!((g[0][0] - 0.1).abs() < 1e-15 && (g[5][1] - 1.9).abs() < 1e-15);
    }
}
