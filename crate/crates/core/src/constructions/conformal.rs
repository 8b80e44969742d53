//! Conformal transformations of Euclidean space applied to charts.

use std::sync::Arc;

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chart::{ChartMap, Evaluator, ImmersionChart};
use crate::error::{GeomError, Result};
use crate::moebius::{MoebiusState, StarCurvature};
use crate::taylor::{dot, Scalar, Taylor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConformalMap {
    Dilation { factor: f64 },
    Translation { offset: Vec<f64> },
    /// `x -> center + radius^2 (x - center) / |x - center|^2`.
    Inversion { center: Vec<f64>, radius: f64 },
}

impl ConformalMap {
    pub fn apply<S: Scalar>(&self, y: &[S]) -> Vec<S> {
        match self {
            ConformalMap::Dilation { factor } => y.iter().map(|c| c.clone() * *factor).collect(),
            ConformalMap::Translation { offset } => y.iter().zip(offset).map(|(c, o)| c.clone() + *o).collect(),
            ConformalMap::Inversion { center, radius } => {
                let d: Vec<S> = y.iter().zip(center).map(|(c, o)| c.clone() - *o).collect();
                let scale = dot(&d, &d).recip() * (radius * radius);
                d.iter().zip(center).map(|(c, o)| c.clone() * scale.clone() + *o).collect()
            }
        }
    }

    fn validate(&self, ambient_dim: usize) -> Result<()> {
        let ok = match self {
            ConformalMap::Dilation { factor } => factor.is_finite() && *factor != 0.0,
            ConformalMap::Translation { offset } => offset.len() == ambient_dim,
            ConformalMap::Inversion { center, radius } => center.len() == ambient_dim && *radius > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(GeomError::SpecInvalid(format!("{self:?} does not act on R^{ambient_dim}")))
        }
    }
}

struct Transformed {
    inner: Arc<dyn ChartMap>,
    map: ConformalMap,
}

impl ChartMap for Transformed {
    fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.map.apply(&self.inner.eval_f64(x))
    }

    fn eval_taylor(&self, x: &[Taylor]) -> Vec<Taylor> {
        self.map.apply(&self.inner.eval_taylor(x))
    }
}

/// `map ∘ f` as a chart with exact jets. Inversions must be centred off the
/// image; this is checked on a coarse grid of the domain.
pub fn transform_chart(chart: &ImmersionChart, map: &ConformalMap) -> Result<ImmersionChart> {
    map.validate(chart.ambient_dim)?;
    let Evaluator::Exact(inner) = &chart.evaluator else {
        return Err(GeomError::SpecInvalid("conformal transforms need an exact chart".into()));
    };
    if let ConformalMap::Inversion { center, radius } = map {
        let counts = vec![5; chart.intrinsic_dim];
        let closest = chart
            .domain
            .grid(&counts, 0.0)
            .iter()
            .map(|x| {
                let y = chart.point(x);
                y.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        if closest < 1e-3 * radius {
            return Err(GeomError::DomainViolation {
                coords: center.clone(),
                reason: "inversion centre lies on the image".into(),
            });
        }
    }
    Ok(ImmersionChart::exact(
        chart.domain.clone(),
        chart.ambient_dim,
        Arc::new(Transformed {
            inner: inner.clone(),
            map: map.clone(),
        }),
        format!("{} after {map:?}", chart.label),
    ))
}

/// Largest discrepancies of Moebius invariants between `f` and `map ∘ f` at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub metric: f64,
    pub blaschke_eigenvalues: f64,
    pub curvature: f64,
}

impl InvarianceReport {
    pub fn max(&self) -> f64 {
        self.metric.max(self.blaschke_eigenvalues).max(self.curvature)
    }
}

/// Compares `g*`, the eigenvalues of the Blaschke tensor and `K*` on
/// coordinate planes plus `extra_planes` random planes. Differences are
/// relative to `max(1, |value|)`.
pub fn invariance_report<R: Rng>(
    before: &ImmersionChart,
    after: &ImmersionChart,
    x: &[f64],
    extra_planes: usize,
    rng: &mut R,
) -> Result<InvarianceReport> {
    let a = MoebiusState::at(before, x)?;
    let b = MoebiusState::at(after, x)?;
    let rel = |u: f64, v: f64| (u - v).abs() / u.abs().max(1.0);
    let metric = a
        .gstar
        .iter()
        .zip(b.gstar.iter())
        .map(|(u, v)| rel(*u, *v))
        .fold(0.0, f64::max);
    let ea = a.star_eigenvalues(&a.blaschke_direct());
    let eb = b.star_eigenvalues(&b.blaschke_direct());
    let blaschke_eigenvalues = ea.iter().zip(&eb).map(|(u, v)| rel(*u, *v)).fold(0.0, f64::max);
    let sa = StarCurvature {
        riemann: a.riemann_star(),
        gstar: a.gstar.clone(),
    };
    let sb = StarCurvature {
        riemann: b.riemann_star(),
        gstar: b.gstar.clone(),
    };
    let n = a.n;
    let mut curvature: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let (u, v) = (unit(n, i), unit(n, j));
            curvature = curvature.max(rel(sa.sectional(&u, &v), sb.sectional(&u, &v)));
        }
    }
    for _ in 0..extra_planes {
        let u = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let v = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        curvature = curvature.max(rel(sa.sectional(&u, &v), sb.sectional(&u, &v)));
    }
    Ok(InvarianceReport {
        metric,
        blaschke_eigenvalues,
        curvature,
    })
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_family, FamilySpec, SpiralCase};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inversion_is_an_involution() {
        let map = ConformalMap::Inversion { center: vec![1.0, 2.0], radius: 1.5 };
        let y = map.apply(&map.apply(&[0.3, -0.4]));
        assert!((y[0] - 0.3).abs() < 1e-14 && (y[1] + 0.4).abs() < 1e-14);
    }

    #[test]
    fn invariants_survive_inversion() {
        let fam = build_family(&FamilySpec::spiral(SpiralCase::FlatCneg, -1.0, 1.0, 3, 1)).unwrap();
        let map = ConformalMap::Inversion { center: vec![0.0, -3.0, 0.5, 4.0], radius: 2.0 };
        let after = transform_chart(&fam.chart, &map).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = invariance_report(&fam.chart, &after, &[1.1, 0.2, -0.3], 5, &mut rng).unwrap();
        assert!(r.max() < 1e-6, "{r:?}");
    }

    #[test]
    fn centre_on_image_is_rejected() {
        let fam = build_family(&FamilySpec::spiral(SpiralCase::FlatC0, 0.0, 2.0, 2, 1)).unwrap();
        let x = fam.chart.domain.grid(&[5, 5], 0.0)[7].clone();
        let center = fam.chart.point(&x);
        assert!(transform_chart(&fam.chart, &ConformalMap::Inversion { center, radius: 1.0 }).is_err());
    }
}
