//! The registered residual checks and their default tolerances.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    JetAgreement,
    MoebiusLift,
    BetaTrace,
    BetaNorm,
    BlaschkeTrace,
    BlaschkeAgreement,
    MoebiusCurvature,
    StarCurvatureAgreement,
    ConformalGauss,
    MoebiusFormClosed,
    RicciIdentity,
    RicciEquation,
    Kulkarni,
    NormalFlatness,
    SectionalPrincipalNormals,
    MoebiusNormalDecomposition,
    MultiplicityCensus,
    WarpedCriterion,
    MeanCurvatureCondition,
    Dupin,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CheckInfo {
    pub check: Check,
    pub name: &'static str,
    /// Where the identity comes from.
    pub anchor: &'static str,
    pub default_tolerance: f64,
    /// Backed by one of the library's named residual operations rather than
    /// an identity assembled from several.
    pub residual_op: Option<&'static str>,
    /// Left out of scenarios that do not list checks explicitly.
    pub optional: bool,
}

const fn info(
    check: Check,
    name: &'static str,
    anchor: &'static str,
    default_tolerance: f64,
    residual_op: Option<&'static str>,
) -> CheckInfo {
    CheckInfo {
        check,
        name,
        anchor,
        default_tolerance,
        residual_op,
        optional: false,
    }
}

pub const REGISTRY: [CheckInfo; 20] = [
    info(
        Check::JetAgreement,
        "jet_agreement",
        "exact jets against Richardson finite differences, as a ratio to the per-order tolerances 1e-7, 1e-5, 1e-4",
        1.0,
        None,
    ),
    info(
        Check::MoebiusLift,
        "moebius_lift",
        "light-cone lift Y = rho Psi induces g* and stays null",
        1e-7,
        Some("moebius_lift_metric_check"),
    ),
    info(Check::BetaTrace, "beta_trace", "beta is trace-free", 1e-10, None),
    info(Check::BetaNorm, "beta_norm", "|beta|^2 in g* equals (n-1)/n", 1e-9, None),
    info(
        Check::BlaschkeTrace,
        "blaschke_trace",
        "tr psi = (n^2 s* + 1)/(2n)",
        1e-6,
        None,
    ),
    info(
        Check::BlaschkeAgreement,
        "blaschke_agreement",
        "The Blaschke tensor is given in terms",
        1e-5,
        None,
    ),
    info(
        Check::MoebiusCurvature,
        "moebius_curvature",
        "K* equals the curvature the construction targets",
        1e-5,
        None,
    ),
    info(
        Check::StarCurvatureAgreement,
        "star_curvature_agreement",
        "K* by conformal change against K* from a finite-difference metric",
        1e-4,
        None,
    ),
    info(
        Check::ConformalGauss,
        "conformal_gauss",
        "The conformal Gauss equation",
        1e-5,
        Some("conformal_gauss_residual"),
    ),
    info(
        Check::MoebiusFormClosed,
        "moebius_form_closed",
        "d omega = 0 for constant Moebius curvature",
        1e-5,
        None,
    ),
    info(
        Check::RicciIdentity,
        "ricci_identity",
        "d omega against beta and psi (conformal Ricci identity)",
        1e-4,
        None,
    ),
    info(
        Check::RicciEquation,
        "ricci_equation",
        "normal curvature against commutators of the Moebius shape operators",
        1e-9,
        Some("ricci_equation_residual"),
    ),
    info(
        Check::Kulkarni,
        "kulkarni",
        "Kulkarni's formula",
        1e-5,
        Some("kulkarni_flatness_residual"),
    ),
    info(
        Check::NormalFlatness,
        "normal_flatness",
        "shape operators commute",
        1e-9,
        Some("normal_bundle_flatness"),
    ),
    info(
        Check::SectionalPrincipalNormals,
        "sectional_principal_normals",
        "K(e_i, e_j) = <eta_i, eta_j> in an adapted frame",
        1e-8,
        Some("sectional_vs_principal_normals"),
    ),
    info(
        Check::MoebiusNormalDecomposition,
        "moebius_normal_decomposition",
        "sum f_i^2 = 1, |eta bar| = 1/n, orthonormal xi and the beta table",
        1e-8,
        None,
    ),
    info(
        Check::MultiplicityCensus,
        "multiplicity_census",
        "Moore bound and a single multiple principal normal (0 pass, 1 fail)",
        0.5,
        None,
    ),
    info(
        Check::WarpedCriterion,
        "warped_criterion",
        "warped-product criterion for constant curvature",
        1e-9,
        Some("warped_constant_curvature_check"),
    ),
    info(
        Check::MeanCurvatureCondition,
        "mean_curvature_condition",
        "Hessian and gradient equations for 1/|H^g|",
        1e-9,
        Some("mean_curvature_condition_check"),
    ),
    CheckInfo {
        check: Check::Dupin,
        name: "dupin",
        anchor: "normal derivative of the multiple principal normal along its eigenspace",
        default_tolerance: 1e-5,
        residual_op: None,
        optional: true,
    },
];

impl Check {
    pub fn info(self) -> &'static CheckInfo {
        REGISTRY
            .iter()
            .find(|i| i.check == self)
            .expect("every check is registered")
    }

    pub fn name(self) -> &'static str {
        self.info().name
    }

    pub fn from_name(name: &str) -> Option<Check> {
        REGISTRY.iter().find(|i| i.name == name).map(|i| i.check)
    }

    /// Checks run when a scenario does not list any.
    pub fn defaults() -> Vec<Check> {
        REGISTRY.iter().filter(|i| !i.optional).map(|i| i.check).collect()
    }
}

/// One line per check: name, default tolerance, anchor.
pub fn list_checks() -> String {
    let width = REGISTRY.iter().map(|i| i.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for i in &REGISTRY {
        let flag = if i.optional { " (optional)" } else { "" };
        out.push_str(&format!(
            "{:<width$}  {:<8.0e}  {}{}\n",
            i.name, i.default_tolerance, i.anchor, flag
        ));
    }
    out
}
