//! Cylinders, generalized cones and rotational submanifolds over a core
//! submanifold of a space form.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::criteria::{curve_mean_curvature_condition, spiral_warped_check, MeanCurvatureResiduals, WarpedResiduals};
use super::frenet::{CurveSpec, FrenetCurve};
use super::kappa::{product_factor_kappa, spiral_kappa, Kappa, SpiralCase};
use super::space_form::{hyperboloid_to_half_space, sphere_chart};
use crate::chart::{ChartMap, DomainBox, GenericMap, ImmersionChart};
use crate::error::{GeomError, Result};
use crate::taylor::{Scalar, Taylor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `(g, u)` with `g` in `R^{2p-ℓ}`.
    Cylinder,
    /// `(z_1 g, z_2, ...)` with `g` in the unit sphere and `z_1 > 0`.
    GeneralizedCone,
    /// `(g_1, ..., g_{k-1}, g_k y)` with `g` in the half-space and `y` on a sphere.
    Rotational,
}

impl FamilyKind {
    /// Curvature of the space form the core lives in.
    pub fn core_curvature(self) -> i8 {
        match self {
            FamilyKind::Cylinder => 0,
            FamilyKind::GeneralizedCone => 1,
            FamilyKind::Rotational => -1,
        }
    }

    pub fn for_spiral(case: SpiralCase) -> Self {
        match case.ambient_curvature() {
            0 => FamilyKind::Cylinder,
            1 => FamilyKind::GeneralizedCone,
            _ => FamilyKind::Rotational,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Cylinder => "cylinder",
            FamilyKind::GeneralizedCone => "generalized_cone",
            FamilyKind::Rotational => "rotational",
        }
    }
}

/// Serializable description of the core submanifold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CoreSpec {
    /// One of the six curvature spirals; `domain` defaults per case.
    Spiral {
        case: SpiralCase,
        #[serde(default)]
        c: f64,
        #[serde(default = "one")]
        r: f64,
        #[serde(default)]
        domain: Option<(f64, f64)>,
    },
    /// Arbitrary curve of prescribed curvature.
    Curve(CurveSpec),
    /// `γ_1 × γ_2` in `R^4`: `γ_1` with the product-factor curvature for
    /// `(c, r)`, `γ_2` a circle of curvature `r`.
    ProductOfCurves { c: f64, r: f64, x1: (f64, f64), x2: (f64, f64) },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub core: CoreSpec,
    pub n: usize,
    pub p: usize,
    pub ell: usize,
    /// Box for the non-core coordinates; defaults per family kind.
    #[serde(default)]
    pub fiber: Option<(Vec<f64>, Vec<f64>)>,
}

impl FamilySpec {
    /// Family over a spiral with `p - ℓ = 1`.
    pub fn spiral(case: SpiralCase, c: f64, r: f64, n: usize, p: usize) -> Self {
        FamilySpec {
            kind: FamilyKind::for_spiral(case),
            core: CoreSpec::Spiral { case, c, r, domain: None },
            n,
            p,
            ell: p.saturating_sub(1),
            fiber: None,
        }
    }
}

impl SpiralCase {
    /// Arclength interval used when a spec leaves it open.
    pub fn default_domain(self) -> (f64, f64) {
        match self {
            SpiralCase::FlatC0 | SpiralCase::HypCpos | SpiralCase::HypC0 => (-1.0, 1.0),
            SpiralCase::FlatCneg | SpiralCase::HypCneg => (0.5, 2.0),
            SpiralCase::SphereCneg => (0.5, 2.5),
        }
    }
}

/// Curve in the model coordinates of `Q^{dim}`: plane curves occupy the first
/// two coordinates, sphere curves the first three, hyperbolic curves the
/// first and last coordinates of the half-space.
#[derive(Debug, Clone)]
pub struct CurveCore {
    curve: Arc<FrenetCurve>,
    coords_len: usize,
}

impl CurveCore {
    pub fn new(curve: Arc<FrenetCurve>, coords_len: usize) -> Self {
        CurveCore { curve, coords_len }
    }

    pub fn curve(&self) -> &FrenetCurve {
        &self.curve
    }

    fn frame_components<S: Scalar>(&self, s: &S) -> Option<Vec<S>> {
        let jets = self.curve.jets(s.value()).ok()?;
        let order = s.order();
        Some(
            (0..3)
                .map(|a| {
                    let d: Vec<f64> = jets.iter().take(order + 1).map(|j| j[a]).collect();
                    s.compose(&d)
                })
                .collect(),
        )
    }
}

impl GenericMap for CurveCore {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let s = &x[0];
        let Some(g) = self.frame_components(s) else {
            return vec![s.lift(f64::NAN); self.coords_len];
        };
        let mut out = vec![s.lift(0.0); self.coords_len];
        match self.curve.spec().ambient_curvature {
            0 => out[..2].clone_from_slice(&g[..2]),
            1 => out[..3].clone_from_slice(&g),
            _ => {
                let uv = hyperboloid_to_half_space(&g);
                out[0] = uv[0].clone();
                out[self.coords_len - 1] = uv[1].clone();
            }
        }
        out
    }
}

/// `(γ_1(x_1), γ_2(x_2))` for two plane curves.
#[derive(Debug, Clone)]
pub struct ProductCore {
    first: CurveCore,
    second: CurveCore,
}

impl GenericMap for ProductCore {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let mut out = self.first.eval(&x[..1]);
        out.extend(self.second.eval(&x[1..2]));
        out
    }
}

/// `Θ(y, z) = (z_1 y, z_2, ..., z_k)`.
pub fn theta_cone<S: Scalar>(y: &[S], z: &[S]) -> Result<Vec<S>> {
    if !(z[0].value() > 0.0) {
        return Err(GeomError::DomainViolation {
            coords: z.iter().map(|c| c.value()).collect(),
            reason: "cone parameter z_1 must be positive".into(),
        });
    }
    Ok(theta_cone_unchecked(y, z))
}

fn theta_cone_unchecked<S: Scalar>(y: &[S], z: &[S]) -> Vec<S> {
    let mut out: Vec<S> = y.iter().map(|c| c.clone() * z[0].clone()).collect();
    out.extend(z[1..].iter().cloned());
    out
}

/// `Θ(z, y) = (z_1, ..., z_{k-1}, z_k y)`.
pub fn theta_rotational<S: Scalar>(z: &[S], y: &[S]) -> Result<Vec<S>> {
    if !(z[z.len() - 1].value() > 0.0) {
        return Err(GeomError::DomainViolation {
            coords: z.iter().map(|c| c.value()).collect(),
            reason: "half-space coordinate must be positive".into(),
        });
    }
    Ok(theta_rotational_unchecked(z, y))
}

fn theta_rotational_unchecked<S: Scalar>(z: &[S], y: &[S]) -> Vec<S> {
    let k = z.len();
    let mut out: Vec<S> = z[..k - 1].to_vec();
    out.extend(y.iter().map(|c| c.clone() * z[k - 1].clone()));
    out
}

/// Family map `x = (core coordinates, fiber coordinates) -> R^{n+p}`.
pub struct FamilyMap {
    kind: FamilyKind,
    core: Arc<dyn ChartMap>,
    core_dim: usize,
}

impl FamilyMap {
    fn assemble<S: Scalar>(&self, core: Vec<S>, fiber: &[S]) -> Vec<S> {
        match self.kind {
            FamilyKind::Cylinder => {
                let mut out = core;
                out.extend(fiber.iter().cloned());
                out
            }
            FamilyKind::GeneralizedCone => theta_cone_unchecked(&core, fiber),
            FamilyKind::Rotational => theta_rotational_unchecked(&core, &sphere_chart(fiber)),
        }
    }
}

impl ChartMap for FamilyMap {
    fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        let core = self.core.eval_f64(&x[..self.core_dim]);
        self.assemble(core, &x[self.core_dim..])
    }

    fn eval_taylor(&self, x: &[Taylor]) -> Vec<Taylor> {
        let core = self.core.eval_taylor(&x[..self.core_dim]);
        self.assemble(core, &x[self.core_dim..])
    }
}

/// Curvature data of a curve-based core, used for closed-form predictions.
#[derive(Debug, Clone)]
enum CoreGeometry {
    Curve(CurveCore),
    Product { first: Kappa, second: Kappa },
    Opaque,
}

/// A built family: its chart plus what is known in closed form about it.
#[derive(Clone)]
pub struct Family {
    pub chart: ImmersionChart,
    pub kind: FamilyKind,
    pub n: usize,
    pub p: usize,
    pub ell: usize,
    /// Moebius curvature the construction is designed to have.
    pub expected_kstar: Option<f64>,
    core: Arc<dyn ChartMap>,
    geometry: CoreGeometry,
}

impl std::fmt::Debug for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Family")
            .field("label", &self.chart.label)
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("p", &self.p)
            .field("ell", &self.ell)
            .finish()
    }
}

impl Family {
    pub fn core_dim(&self) -> usize {
        self.p - self.ell
    }

    /// `‖H^g‖` of the core at the core coordinates of `x`, measured in the
    /// space form the core lives in.
    pub fn core_mean_curvature(&self, x: &[f64]) -> Option<f64> {
        match &self.geometry {
            CoreGeometry::Curve(c) => Some(c.curve().spec().kappa.value(x[0]).abs()),
            CoreGeometry::Product { first, second } => {
                let (k1, k2) = (first.value(x[0]), second.value(x[1]));
                Some(0.5 * (k1 * k1 + k2 * k2).sqrt())
            }
            CoreGeometry::Opaque => None,
        }
    }

    /// `rho` predicted by the family formulas:
    /// `(p-ℓ)‖H^g‖`, divided by `z_1` for cones and by `g_{2p-ℓ}` for
    /// rotational submanifolds.
    pub fn expected_rho(&self, x: &[f64]) -> Option<f64> {
        let k = self.core_dim();
        let base = k as f64 * self.core_mean_curvature(x)?;
        Some(match self.kind {
            FamilyKind::Cylinder => base,
            FamilyKind::GeneralizedCone => base / x[k],
            FamilyKind::Rotational => {
                let g = self.core.eval_f64(&x[..k]);
                base / g[g.len() - 1]
            }
        })
    }
}

impl Family {
    /// Warped-product criterion at the core point of `x`, for curve cores
    /// with a target curvature.
    pub fn warped_residuals(&self, x: &[f64]) -> Option<WarpedResiduals> {
        let c = self.expected_kstar?;
        match &self.geometry {
            CoreGeometry::Curve(core) => {
                let spec = core.curve().spec();
                Some(spiral_warped_check(&spec.kappa, spec.ambient_curvature, c, &x[..1]))
            }
            _ => None,
        }
    }

    /// Mean-curvature condition for `1/‖H^g‖` at the core point of `x`.
    pub fn mean_curvature_residuals(&self, x: &[f64]) -> Option<MeanCurvatureResiduals> {
        let c = self.expected_kstar?;
        match &self.geometry {
            CoreGeometry::Curve(core) => {
                let spec = core.curve().spec();
                Some(curve_mean_curvature_condition(&spec.kappa, spec.ambient_curvature, c, &x[..1]))
            }
            CoreGeometry::Product { first, second } => {
                // arclength coordinates are orthonormal on a product of plane curves
                let vars = Taylor::variables(&x[..2], 2);
                let (k1, k2) = (first.eval(&vars[0]), second.eval(&vars[1]));
                let h = (k1.square() + k2.square()).sqrt().recip() * 2.0;
                let hessian = [[0, 0], [0, 1], [1, 1]]
                    .iter()
                    .map(|idx| h.partial(idx).abs())
                    .fold(0.0, f64::max);
                let grad = h.gradient();
                let gradient = (grad[0] * grad[0] + grad[1] * grad[1] + 4.0 * c).abs();
                Some(MeanCurvatureResiduals { hessian, gradient })
            }
            CoreGeometry::Opaque => None,
        }
    }

    /// Arclength of the core curve, when the core is a curve.
    pub fn arclength(&self, x: &[f64]) -> Option<f64> {
        matches!(self.geometry, CoreGeometry::Curve(_)).then(|| x[0])
    }
}

fn default_fiber(kind: FamilyKind, dim: usize) -> (Vec<f64>, Vec<f64>) {
    match kind {
        FamilyKind::Cylinder => (vec![-1.0; dim], vec![1.0; dim]),
        FamilyKind::GeneralizedCone => {
            let mut lo = vec![-1.0; dim];
            let mut hi = vec![1.0; dim];
            lo[0] = 0.5;
            hi[0] = 1.5;
            (lo, hi)
        }
        FamilyKind::Rotational => (vec![-0.5; dim], vec![0.5; dim]),
    }
}

fn check_dims(kind: FamilyKind, n: usize, p: usize, ell: usize) -> Result<usize> {
    if p == 0 || ell >= p {
        return Err(GeomError::SpecInvalid(format!("need 0 <= ell <= p - 1, got p = {p}, ell = {ell}")));
    }
    let k = p - ell;
    if n <= k {
        return Err(GeomError::SpecInvalid(format!(
            "need n > p - ell for a non-trivial fiber, got n = {n}, p - ell = {k}"
        )));
    }
    if kind == FamilyKind::Rotational && 2 * p - ell < 2 {
        return Err(GeomError::SpecInvalid("rotational family needs 2p - ell >= 2".into()));
    }
    Ok(k)
}

/// Number of model coordinates of the core's space form `Q^{2p-ℓ}`.
fn core_coords_len(kind: FamilyKind, p: usize, ell: usize) -> usize {
    let dim = 2 * p - ell;
    match kind {
        FamilyKind::GeneralizedCone => dim + 1,
        _ => dim,
    }
}

fn assemble_family(
    kind: FamilyKind,
    core: Arc<dyn ChartMap>,
    core_domain: (Vec<f64>, Vec<f64>),
    n: usize,
    p: usize,
    ell: usize,
    fiber: Option<(Vec<f64>, Vec<f64>)>,
    geometry: CoreGeometry,
    expected_kstar: Option<f64>,
    label: String,
) -> Result<Family> {
    let k = check_dims(kind, n, p, ell)?;
    let (flo, fhi) = fiber.unwrap_or_else(|| default_fiber(kind, n - k));
    if flo.len() != n - k || fhi.len() != n - k {
        return Err(GeomError::SpecInvalid(format!("fiber box must have {} coordinates", n - k)));
    }
    if kind == FamilyKind::GeneralizedCone && !(flo[0] > 0.0) {
        return Err(GeomError::SpecInvalid("cone parameter z_1 must stay positive".into()));
    }
    let mut lower = core_domain.0;
    let mut upper = core_domain.1;
    lower.extend(flo);
    upper.extend(fhi);
    let domain = DomainBox::new(lower, upper)?;
    let map = FamilyMap {
        kind,
        core: core.clone(),
        core_dim: k,
    };
    let chart = ImmersionChart::exact(domain, n + p, Arc::new(map), label);
    Ok(Family {
        chart,
        kind,
        n,
        p,
        ell,
        expected_kstar,
        core,
        geometry,
    })
}

/// Builds the family described by `spec`.
pub fn build_family(spec: &FamilySpec) -> Result<Family> {
    let (n, p, ell, kind) = (spec.n, spec.p, spec.ell, spec.kind);
    let k = check_dims(kind, n, p, ell)?;
    match &spec.core {
        CoreSpec::Spiral { case, c, r, domain } => {
            let kappa = spiral_kappa(*case, *c, *r)?;
            if FamilyKind::for_spiral(*case) != kind {
                return Err(GeomError::SpecInvalid(format!(
                    "spiral {} lives in curvature {} but a {} needs a core in curvature {}",
                    case.name(),
                    case.ambient_curvature(),
                    kind.name(),
                    kind.core_curvature()
                )));
            }
            let curve = CurveSpec::new(case.ambient_curvature(), kappa, domain.unwrap_or_else(|| case.default_domain()));
            let label = format!("{} over {} (c={}, r={}) n={n} p={p} l={ell}", kind.name(), case.name(), c, r);
            build_curve_family(kind, curve, n, p, ell, spec.fiber.clone(), Some(*c), label)
        }
        CoreSpec::Curve(curve) => {
            let label = format!("{} over curve n={n} p={p} l={ell}", kind.name());
            build_curve_family(kind, *curve, n, p, ell, spec.fiber.clone(), None, label)
        }
        CoreSpec::ProductOfCurves { c, r, x1, x2 } => {
            if kind != FamilyKind::Cylinder || k != 2 || 2 * p - ell != 4 {
                return Err(GeomError::SpecInvalid(
                    "a product of two plane curves is the core of a cylinder with p = 2, ell = 0".into(),
                ));
            }
            let (core, first, second) = product_core(*c, *r, *x1, *x2)?;
            let domain = (vec![x1.0, x2.0], vec![x1.1, x2.1]);
            let label = format!("cylinder over product of curves (c={c}, r={r}) n={n}");
            assemble_family(
                kind,
                Arc::new(core),
                domain,
                n,
                p,
                ell,
                spec.fiber.clone(),
                CoreGeometry::Product { first, second },
                Some(*c),
                label,
            )
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn build_curve_family(
    kind: FamilyKind,
    curve: CurveSpec,
    n: usize,
    p: usize,
    ell: usize,
    fiber: Option<(Vec<f64>, Vec<f64>)>,
    expected_kstar: Option<f64>,
    label: String,
) -> Result<Family> {
    if p - ell != 1 {
        return Err(GeomError::SpecInvalid(format!("a curve core needs p - ell = 1, got {}", p - ell)));
    }
    if curve.ambient_curvature != kind.core_curvature() {
        return Err(GeomError::SpecInvalid(format!(
            "a {} needs a core curve in curvature {}",
            kind.name(),
            kind.core_curvature()
        )));
    }
    let coords = core_coords_len(kind, p, ell);
    let core = CurveCore::new(Arc::new(FrenetCurve::new(curve)?), coords);
    let domain = (vec![curve.domain.0], vec![curve.domain.1]);
    assemble_family(
        kind,
        Arc::new(core.clone()),
        domain,
        n,
        p,
        ell,
        fiber,
        CoreGeometry::Curve(core),
        expected_kstar,
        label,
    )
}

/// Family over a user-supplied core map `M^{p-ℓ} -> Q^{2p-ℓ}` given in model
/// coordinates (Euclidean, unit sphere, or half-space with the last
/// coordinate positive).
pub fn build_family_over_chart(
    kind: FamilyKind,
    core: Arc<dyn ChartMap>,
    core_domain: DomainBox,
    n: usize,
    p: usize,
    ell: usize,
    fiber: Option<(Vec<f64>, Vec<f64>)>,
) -> Result<Family> {
    let k = check_dims(kind, n, p, ell)?;
    if core_domain.dim() != k {
        return Err(GeomError::SpecInvalid(format!("core domain must have dimension {k}")));
    }
    let probe: Vec<f64> = core_domain
        .lower()
        .iter()
        .zip(core_domain.upper())
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    let len = core.eval_f64(&probe).len();
    if len != core_coords_len(kind, p, ell) {
        return Err(GeomError::SpecInvalid(format!(
            "core map returns {len} coordinates, expected {}",
            core_coords_len(kind, p, ell)
        )));
    }
    let domain = (core_domain.lower().to_vec(), core_domain.upper().to_vec());
    let label = format!("{} over chart n={n} p={p} l={ell}", kind.name());
    assemble_family(kind, core, domain, n, p, ell, fiber, CoreGeometry::Opaque, None, label)
}

fn product_core(c: f64, r: f64, x1: (f64, f64), x2: (f64, f64)) -> Result<(ProductCore, Kappa, Kappa)> {
    let first = product_factor_kappa(c, r)?;
    let (lo, hi) = first.admissible();
    if !(x1.0 > lo && x1.1 < hi && x1.0 < x1.1) {
        return Err(GeomError::DomainViolation {
            coords: vec![x1.0, x1.1],
            reason: format!("first factor needs 0 < x_1 < {hi}"),
        });
    }
    let second = Kappa::Constant { value: r };
    let c1 = FrenetCurve::new(CurveSpec::new(0, first, x1))?;
    let c2 = FrenetCurve::new(CurveSpec::new(0, second, x2))?;
    Ok((
        ProductCore {
            first: CurveCore::new(Arc::new(c1), 2),
            second: CurveCore::new(Arc::new(c2), 2),
        },
        first,
        second,
    ))
}

/// Surface `γ_1 × γ_2` in `R^4` with `κ_1` the product-factor curvature for
/// `(c, r)` and `γ_2` a circle of curvature `r`.
pub fn product_curve_surface(c: f64, r: f64, x1: (f64, f64), x2: (f64, f64)) -> Result<ImmersionChart> {
    let (core, _, _) = product_core(c, r, x1, x2)?;
    let domain = DomainBox::new(vec![x1.0, x2.0], vec![x1.1, x2.1])?;
    Ok(ImmersionChart::exact(domain, 4, Arc::new(core), format!("product of curves (c={c}, r={r})")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::{MoebiusState, StarCurvature};

    fn midpoint(chart: &ImmersionChart) -> Vec<f64> {
        let d = &chart.domain;
        d.lower().iter().zip(d.upper()).map(|(a, b)| 0.5 * (a + b) + 0.07 * (b - a)).collect()
    }

    #[test]
    fn spiral_families_have_expected_rho_and_curvature() {
        let params = [
            (SpiralCase::FlatC0, 0.0, 2.0),
            (SpiralCase::FlatCneg, -1.0, 1.0),
            (SpiralCase::SphereCneg, -1.0, 1.0),
            (SpiralCase::HypCpos, 1.0, 1.0),
            (SpiralCase::HypCneg, -1.0, 1.0),
            (SpiralCase::HypC0, 0.0, 1.0),
        ];
        for (case, c, r) in params {
            let fam = build_family(&FamilySpec::spiral(case, c, r, 3, 1)).unwrap();
            let x = midpoint(&fam.chart);
            let st = MoebiusState::at(&fam.chart, &x).unwrap();
            let rho = fam.expected_rho(&x).unwrap();
            assert!((st.rho - rho).abs() < 1e-7 * rho, "{}: rho {} vs {}", case.name(), st.rho, rho);
            let sc = StarCurvature { riemann: st.riemann_star(), gstar: st.gstar.clone() };
            let res = sc.constant_curvature_residual(c);
            assert!(res < 1e-6, "{}: K* residual {res}", case.name());
        }
    }

    #[test]
    fn product_cylinder_has_constant_curvature() {
        let spec = FamilySpec {
            kind: FamilyKind::Cylinder,
            core: CoreSpec::ProductOfCurves { c: -1.0, r: 1.0, x1: (0.3, 0.7), x2: (-1.0, 1.0) },
            n: 3,
            p: 2,
            ell: 0,
            fiber: None,
        };
        let fam = build_family(&spec).unwrap();
        let x = midpoint(&fam.chart);
        let st = MoebiusState::at(&fam.chart, &x).unwrap();
        assert!((st.rho - fam.expected_rho(&x).unwrap()).abs() < 1e-8);
        let sc = StarCurvature { riemann: st.riemann_star(), gstar: st.gstar.clone() };
        let res = sc.constant_curvature_residual(-1.0);
        assert!(res < 1e-6, "{res}");
    }

    #[test]
    fn mismatched_cores_are_rejected() {
        let mut spec = FamilySpec::spiral(SpiralCase::FlatCneg, -1.0, 1.0, 3, 1);
        spec.kind = FamilyKind::Rotational;
        assert!(build_family(&spec).is_err());
        assert!(build_family(&FamilySpec::spiral(SpiralCase::FlatCneg, -1.0, 1.0, 1, 1)).is_err());
    }

    #[test]
    fn theta_maps_validate_positivity() {
        assert!(theta_cone(&[1.0, 0.0], &[-0.1, 2.0]).is_err());
        assert_eq!(theta_cone(&[1.0, 0.0], &[2.0, 3.0]).unwrap(), vec![2.0, 0.0, 3.0]);
        assert_eq!(theta_rotational(&[1.0, 2.0], &[0.0, 1.0]).unwrap(), vec![1.0, 0.0, 2.0]);
    }
}
