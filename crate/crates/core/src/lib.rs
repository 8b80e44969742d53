//! Numerical laboratory for Moebius geometry of Euclidean submanifolds.
pub mod chart;
pub mod constructions;
pub mod fundamental;
pub mod moebius;
pub mod normal;
pub mod riemann;
pub mod scenario;
pub mod error;
pub mod linalg;
pub mod sampling;
pub mod taylor;

pub use chart::{evaluate_jet, fd_jet_oracle, ChartMap, DomainBox, Evaluator, FdSteps, GenericMap, ImmersionChart, PointMap};
pub use chart::Jet;
pub use constructions::{build_family, Family, FamilyKind, FamilySpec, SpaceForm, SpiralCase};
pub use error::{GeomError, Result};
pub use fundamental::{fundamental_data, FundamentalData};
pub use moebius::{MoebiusData, MoebiusState};
pub use normal::{principal_normals, PrincipalNormalDecomposition};
pub use riemann::Tensor4;
pub use scenario::{Plan, Report, Scenario, ScenarioError};
pub use taylor::{Scalar, Taylor};
