//! Explicit submanifolds with known Moebius geometry.

mod conformal;
mod controls;
mod criteria;
mod family;
mod frenet;
mod kappa;
mod space_form;

pub use family::{
    build_family, build_family_over_chart, product_curve_surface, theta_cone, theta_rotational, CoreSpec, CurveCore,
    Family, FamilyKind, FamilyMap, FamilySpec, ProductCore,
};
pub use frenet::{frenet_curve, CurveJets, CurveSpec, FrenetCurve, InitialFrame};
pub use kappa::{product_factor_kappa, spiral_kappa, Kappa, SpiralCase};
pub use space_form::{half_space_to_hyperboloid, hyperboloid_to_half_space, minkowski, sphere_chart, Model, SpaceForm};
pub use conformal::{invariance_report, transform_chart, ConformalMap, InvarianceReport};
pub use controls::Control;
pub use criteria::{
    curve_mean_curvature_condition, linear_height, mean_curvature_condition_check, spiral_warped_check,
    warped_constant_curvature_check, Const, Formula, HeightFn, MeanCurvatureResiduals, Profile, WarpedResiduals,
};
