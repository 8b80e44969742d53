//! Flat normal bundles, principal normals and the Moebius normal frame.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chart::{evaluate_jet, ImmersionChart};
use crate::error::{GeomError, Result};
use crate::fundamental::{fundamental_data, gauss_curvature_tensor, rho_squared, FundamentalData, EPS_UMBILIC};
use crate::linalg::symmetric_eigen;
use crate::moebius::MoebiusState;
use crate::sampling::point_rng;

/// Default grouping tolerance, relative to the curvature scale of the point.
pub const GROUPING_TOL: f64 = 1e-6;
/// Cut-off below which `f_i` is treated as vanishing.
pub const FI_FLOOR: f64 = 1e-10;

/// Curvature scale used to normalize tolerances: `rho` away from umbilics,
/// `|α|` at umbilic points, 1 for totally geodesic points.
pub fn curvature_scale(fd: &FundamentalData) -> f64 {
    let r2 = rho_squared(fd);
    if r2 > EPS_UMBILIC {
        return r2.sqrt();
    }
    let a = fd.alpha_norm_sq().sqrt();
    if a > 0.0 {
        a
    } else {
        1.0
    }
}

/// Largest Frobenius norm of `[A_ξ, A_η]` over normal-frame pairs.
pub fn normal_bundle_flatness(fd: &FundamentalData) -> f64 {
    let ops = &fd.shape_ops;
    let mut worst: f64 = 0.0;
    for a in 0..ops.len() {
        for b in a + 1..ops.len() {
            worst = worst.max((&ops[a] * &ops[b] - &ops[b] * &ops[a]).norm());
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalGroup {
    /// Principal normal in normal-frame components.
    pub eta: DVector<f64>,
    pub multiplicity: usize,
    /// `g`-orthonormal coordinate vectors spanning `E_η` (columns).
    pub tangent_basis: DMatrix<f64>,
}

/// Two principal normals whose separation falls in the ambiguous band
/// `[tol, 10 tol)` (normalized units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupingAmbiguity {
    pub gap: f64,
    pub tol: f64,
}

impl GroupingAmbiguity {
    pub fn to_error(self) -> GeomError {
        GeomError::GroupingAmbiguous {
            gap: self.gap,
            tol: self.tol,
            upper: 10.0 * self.tol,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PrincipalNormalDecomposition {
    /// Sorted by multiplicity (descending), ties by first appearance.
    pub groups: Vec<PrincipalGroup>,
    pub grouping_tol: f64,
    /// Concatenated group bases: `g`-orthonormal coordinate vectors.
    pub adapted_frame: DMatrix<f64>,
    /// Curvature scale the tolerance was normalized by.
    pub scale: f64,
    /// Largest off-diagonal `|<α(X_i, X_j), ξ>|` in the adapted frame.
    pub off_diagonal: f64,
    pub ambiguity: Option<GroupingAmbiguity>,
}

impl PrincipalNormalDecomposition {
    pub fn pattern(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.multiplicity).collect()
    }

    /// Group index of each adapted-frame column.
    pub fn column_groups(&self) -> Vec<usize> {
        self.groups
            .iter()
            .enumerate()
            .flat_map(|(k, g)| std::iter::repeat(k).take(g.multiplicity))
            .collect()
    }
}

fn random_combination<R: Rng>(ops: &[DMatrix<f64>], rng: &mut R, n: usize) -> DMatrix<f64> {
    ops.iter().fold(DMatrix::zeros(n, n), |acc, a| {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        acc + a * (sign * rng.gen_range(0.5..1.5))
    })
}

/// Simultaneous eigenbasis of the shape operators grouped into principal
/// normals.
pub fn principal_normals<R: Rng>(fd: &FundamentalData, tol: f64, rng: &mut R) -> Result<PrincipalNormalDecomposition> {
    let n = fd.n;
    let scale = curvature_scale(fd);
    let comm = normal_bundle_flatness(fd) / (scale * scale);
    if comm > tol {
        return Err(GeomError::NotFlat { commutator: comm, tol });
    }
    let abs_tol = tol * scale;
    let ops = &fd.shape_ops;

    let combo = random_combination(ops, rng, n);
    let eig = symmetric_eigen(&combo);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut basis = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();

    // Rayleigh-Ritz refinement within each cluster of the first combination
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] < abs_tol {
            end += 1;
        }
        if end - start > 1 {
            for _ in 0..2 {
                let v = basis.columns(start, end - start).into_owned();
                let second = random_combination(ops, rng, n);
                let small = v.transpose() * second * &v;
                let small = (&small + small.transpose()) * 0.5;
                let se = symmetric_eigen(&small);
                let rotated = v * se.eigenvectors;
                basis.columns_mut(start, end - start).copy_from(&rotated);
            }
        }
        start = end;
    }

    let eta_of = |col: usize| -> DVector<f64> {
        let e = basis.column(col);
        DVector::from_iterator(ops.len(), ops.iter().map(|a| (e.transpose() * a * e)[(0, 0)]))
    };
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut reps: Vec<DVector<f64>> = Vec::new();
    for col in 0..n {
        let eta = eta_of(col);
        match reps.iter().position(|r| (r - &eta).norm() < abs_tol) {
            Some(k) => members[k].push(col),
            None => {
                members.push(vec![col]);
                reps.push(eta);
            }
        }
    }
    let mut groups: Vec<(Vec<usize>, DVector<f64>)> = members
        .into_iter()
        .map(|cols| {
            let mean = cols.iter().fold(DVector::zeros(ops.len()), |acc, &c| acc + eta_of(c)) / cols.len() as f64;
            (cols, mean)
        })
        .collect();
    groups.sort_by(|a, b| b.0.len().cmp(&a.0.len()));

    let mut ambiguity: Option<GroupingAmbiguity> = None;
    for a in 0..groups.len() {
        for b in a + 1..groups.len() {
            let gap = (&groups[a].1 - &groups[b].1).norm() / scale;
            if gap < 10.0 * tol && ambiguity.map_or(true, |amb| gap < amb.gap) {
                ambiguity = Some(GroupingAmbiguity { gap, tol });
            }
        }
    }

    let cols: Vec<usize> = groups.iter().flat_map(|g| g.0.iter().copied()).collect();
    let frame_on = DMatrix::from_fn(n, n, |i, j| basis[(i, cols[j])]);
    let mut off_diagonal: f64 = 0.0;
    for a in ops {
        let d = frame_on.transpose() * a * &frame_on;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off_diagonal = off_diagonal.max(d[(i, j)].abs());
                }
            }
        }
    }
    let adapted_frame = &fd.frame_coords * &frame_on;
    let mut offset = 0;
    let groups = groups
        .into_iter()
        .map(|(cols, eta)| {
            let k = cols.len();
            let g = PrincipalGroup {
                eta,
                multiplicity: k,
                tangent_basis: adapted_frame.columns(offset, k).into_owned(),
            };
            offset += k;
            g
        })
        .collect();
    Ok(PrincipalNormalDecomposition {
        groups,
        grouping_tol: tol,
        adapted_frame,
        scale,
        off_diagonal,
        ambiguity,
    })
}

/// `max |K(X_i, X_j) - <η_i, η_j>|` over pairs of adapted-frame vectors.
pub fn sectional_vs_principal_normals(fd: &FundamentalData, pnd: &PrincipalNormalDecomposition) -> Result<f64> {
    let scale = curvature_scale(fd);
    let comm = normal_bundle_flatness(fd) / (scale * scale);
    if comm > pnd.grouping_tol {
        return Err(GeomError::NotFlat {
            commutator: comm,
            tol: pnd.grouping_tol,
        });
    }
    let r = gauss_curvature_tensor(fd);
    let owner = pnd.column_groups();
    let n = fd.n;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let x = pnd.adapted_frame.column(i).into_owned();
            let y = pnd.adapted_frame.column(j).into_owned();
            let k = r.sectional(&fd.g, &x, &y);
            let predicted = pnd.groups[owner[i]].eta.dot(&pnd.groups[owner[j]].eta);
            worst = worst.max((k - predicted).abs());
        }
    }
    Ok(worst)
}

/// Residuals of the Moebius normal decomposition identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionChecks {
    /// `|Σ f_i^2 - 1|`.
    pub sum_f_squared: f64,
    /// `|‖η̄‖ - 1/n|` for the big group.
    pub eta_bar_norm: f64,
    /// `max |<ξ_i, ξ_j> - δ_ij|`.
    pub xi_orthonormality: f64,
    /// Largest deviation of `β` in the `g*`-orthonormal adapted frame from the
    /// table predicted by `f_i, ξ_i`.
    pub beta_table: f64,
    /// `|β(X, X) - ρ^{-1}(η - H)|` for the big group.
    pub eta_bar_consistency: f64,
}

impl DecompositionChecks {
    pub fn max(&self) -> f64 {
        self.sum_f_squared
            .max(self.eta_bar_norm)
            .max(self.xi_orthonormality)
            .max(self.beta_table)
            .max(self.eta_bar_consistency)
    }
}

#[derive(Debug, Clone)]
pub struct MoebiusNormalDecomposition {
    /// `η̄_i = ρ^{-1}(η_i - H)` per principal group (normal-frame components),
    /// in the group order of the decomposition.
    pub eta_bars: Vec<DVector<f64>>,
    /// `f_i` for the simple groups.
    pub f_values: Vec<f64>,
    /// `ξ_i` (ambient unit normals) for the simple groups.
    pub xi_frame: Vec<DVector<f64>>,
    /// Mean curvature of the big distribution with respect to `g*`; not computed.
    pub delta_star: Option<DVector<f64>>,
    pub checks: DecompositionChecks,
}

/// Normal-frame decomposition of `β` for a point whose principal normals
/// form one group of multiplicity at least two plus simple groups.
pub fn moebius_normal_decomposition(
    st: &MoebiusState,
    pnd: &PrincipalNormalDecomposition,
) -> Result<MoebiusNormalDecomposition> {
    let n = st.n;
    let pattern = pnd.pattern();
    let big: Vec<usize> = (0..pattern.len()).filter(|&k| pattern[k] >= 2).collect();
    if big.len() != 1 || pnd.groups.len() < 2 {
        return Err(GeomError::StructureMismatch {
            pattern: pattern.clone(),
            reason: "expected exactly one principal normal of multiplicity >= 2 and at least one simple one".into(),
        });
    }
    let big = big[0];
    let nf = n as f64;
    let rho = st.rho;
    let frame = pnd.star_frame(rho);
    let owner = pnd.column_groups();
    let beta_frame = |i: usize, j: usize| {
        st.beta_on(&frame.column(i).into_owned(), &frame.column(j).into_owned())
    };

    // η̄ from the big group (averaged over its basis)
    let big_cols: Vec<usize> = (0..n).filter(|&c| owner[c] == big).collect();
    let eta_bar = big_cols.iter().fold(DVector::zeros(st.m), |acc, &c| acc + beta_frame(c, c)) / big_cols.len() as f64;

    let normals = &st.fundamental.normal_frame;
    let to_ambient = |v: &DVector<f64>| {
        normals
            .iter()
            .zip(v.iter())
            .fold(DVector::zeros(st.m), |acc, (xi, c)| acc + xi * *c)
    };
    let h = &st.fundamental.mean_curvature;
    let eta_bars: Vec<DVector<f64>> = pnd.groups.iter().map(|g| (&g.eta - h) / rho).collect();
    let eta_bar_consistency = (to_ambient(&eta_bars[big]) - &eta_bar).norm();

    let simple_cols: Vec<usize> = (0..n).filter(|&c| pnd.groups[owner[c]].multiplicity == 1).collect();
    let mut f_values = Vec::new();
    let mut xi_frame = Vec::new();
    for (k, &c) in simple_cols.iter().enumerate() {
        let v = beta_frame(c, c) - &eta_bar;
        let f = v.norm();
        if f < FI_FLOOR {
            return Err(GeomError::DegenerateFi { index: k, value: f });
        }
        f_values.push(f);
        xi_frame.push(v / f);
    }

    let sum_f_squared = (f_values.iter().map(|f| f * f).sum::<f64>() - 1.0).abs();
    let eta_bar_norm = (eta_bar.norm() - 1.0 / nf).abs();
    let mut xi_orthonormality: f64 = 0.0;
    for (i, a) in xi_frame.iter().enumerate() {
        for (j, b) in xi_frame.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            xi_orthonormality = xi_orthonormality.max((a.dot(b) - target).abs());
        }
    }

    // predicted table: β(X_a, X_b) = 0 for a ≠ b, η̄ = -(1/n) Σ f_j ξ_j on the
    // big group, ((n-1)/n) f_i ξ_i - (1/n) Σ_{j≠i} f_j ξ_j on simple ones
    let weighted: Vec<DVector<f64>> = f_values.iter().zip(&xi_frame).map(|(f, xi)| xi * *f).collect();
    let total = weighted.iter().fold(DVector::zeros(st.m), |acc, v| acc + v);
    let mut beta_table: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let predicted = if a != b {
                DVector::zeros(st.m)
            } else if owner[a] == big {
                &total * (-1.0 / nf)
            } else {
                let k = simple_cols.iter().position(|&c| c == a).expect("simple column");
                &weighted[k] - &total / nf
            };
            beta_table = beta_table.max((beta_frame(a, b) - predicted).norm());
        }
    }

    Ok(MoebiusNormalDecomposition {
        eta_bars,
        f_values,
        xi_frame,
        delta_star: None,
        checks: DecompositionChecks {
            sum_f_squared,
            eta_bar_norm,
            xi_orthonormality,
            beta_table,
            eta_bar_consistency,
        },
    })
}

impl PrincipalNormalDecomposition {
    /// Adapted frame rescaled to be `g*`-orthonormal (`X_i = e_i / ρ`).
    pub fn star_frame(&self, rho: f64) -> DMatrix<f64> {
        &self.adapted_frame / rho
    }
}

/// Per-point multiplicity pattern with the two structural bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub index: usize,
    pub point: Vec<f64>,
    pub pattern: Vec<usize>,
    /// Some principal normal has multiplicity at least `n - p`.
    pub moore_bound: bool,
    /// At most one principal normal has multiplicity greater than one.
    pub single_multiple: bool,
    pub ambiguous: bool,
    pub error: Option<String>,
}

/// Multiplicity patterns over a list of points, computed in parallel with
/// one random stream per point index.
pub fn multiplicity_census(chart: &ImmersionChart, points: &[Vec<f64>], tol: f64, seed: u64) -> Vec<CensusRow> {
    let n = chart.intrinsic_dim;
    let p = chart.ambient_dim - n;
    points
        .par_iter()
        .enumerate()
        .map(|(index, x)| {
            let mut rng = point_rng(seed, index);
            let outcome = evaluate_jet(chart, x, 2)
                .and_then(|jet| fundamental_data(&jet, n))
                .and_then(|fd| principal_normals(&fd, tol, &mut rng));
            match outcome {
                Ok(pnd) => {
                    let pattern = pnd.pattern();
                    CensusRow {
                        index,
                        point: x.clone(),
                        moore_bound: pattern.iter().any(|&k| k + p >= n),
                        single_multiple: pattern.iter().filter(|&&k| k > 1).count() <= 1,
                        ambiguous: pnd.ambiguity.is_some(),
                        pattern,
                        error: None,
                    }
                }
                Err(e) => CensusRow {
                    index,
                    point: x.clone(),
                    pattern: Vec::new(),
                    moore_bound: false,
                    single_multiple: false,
                    ambiguous: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Normal derivative of the principal normal of largest multiplicity along
/// its own distribution, `max |∇^⊥_T η|` over the group basis, by central
/// differences with one Richardson level. Zero for Dupin principal normals.
pub fn dupin_residual(chart: &ImmersionChart, x: &[f64], tol: f64, seed: u64, step: f64) -> Result<f64> {
    let n = chart.intrinsic_dim;
    chart.domain.check(x, chart.margin(2) + step)?;
    let big_eta = |y: &[f64]| -> Result<(DVector<f64>, FundamentalData, PrincipalNormalDecomposition)> {
        let fd = fundamental_data(&evaluate_jet(chart, y, 2)?, n)?;
        let pnd = principal_normals(&fd, tol, &mut point_rng(seed, 0))?;
        let eta = &pnd.groups[0].eta;
        let amb = fd
            .normal_frame
            .iter()
            .zip(eta.iter())
            .fold(DVector::zeros(fd.m), |acc, (xi, c)| acc + xi * *c);
        Ok((amb, fd, pnd))
    };
    let (_, fd, pnd) = big_eta(x)?;
    let big = &pnd.groups[0];
    let projector = fd
        .normal_frame
        .iter()
        .fold(DMatrix::zeros(fd.m, fd.m), |acc, xi| acc + xi * xi.transpose());
    let mut worst: f64 = 0.0;
    for t in big.tangent_basis.column_iter() {
        let mut diffs = Vec::new();
        for h in [step, 0.5 * step] {
            let plus: Vec<f64> = x.iter().zip(t.iter()).map(|(a, b)| a + h * b).collect();
            let minus: Vec<f64> = x.iter().zip(t.iter()).map(|(a, b)| a - h * b).collect();
            diffs.push((big_eta(&plus)?.0 - big_eta(&minus)?.0) / (2.0 * h));
        }
        let d = (&diffs[1] * 4.0 - &diffs[0]) / 3.0;
        worst = worst.max((&projector * d).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{DomainBox, GenericMap};
    use crate::taylor::Scalar;
    use std::sync::Arc;

    struct Cyl(f64);
    impl GenericMap for Cyl {
        fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
            let t = x[0].clone() / self.0;
            vec![t.cos() * self.0, t.sin() * self.0, x[1].clone()]
        }
    }

    struct Sphere;
    impl GenericMap for Sphere {
        fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
            vec![x[0].cos() * x[1].cos(), x[0].cos() * x[1].sin(), x[0].sin()]
        }
    }

    struct Twisted;
    impl GenericMap for Twisted {
        fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
            let (s, u) = (x[0].clone(), x[1].clone());
            vec![s.clone(), u.clone(), s.square() + u.square() * 0.5, s * u]
        }
    }

    fn fd_of<M: GenericMap + 'static>(map: M, m: usize, x: &[f64]) -> FundamentalData {
        let dom = DomainBox::new(vec![-1.0; 2], vec![1.0; 2]).unwrap();
        let chart = ImmersionChart::exact(dom, m, Arc::new(map), "t");
        fundamental_data(&evaluate_jet(&chart, x, 2).unwrap(), 2).unwrap()
    }

    #[test]
    fn cylinder_principal_normals() {
        let fd = fd_of(Cyl(2.0), 3, &[0.3, 0.1]);
        let pnd = principal_normals(&fd, GROUPING_TOL, &mut point_rng(1, 0)).unwrap();
        assert_eq!(pnd.pattern(), vec![1, 1]);
        let mut norms: Vec<f64> = pnd.groups.iter().map(|g| g.eta.norm()).collect();
        norms.sort_by(f64::total_cmp);
        assert!(norms[0] < 1e-14 && (norms[1] - 0.5).abs() < 1e-14);
        assert!(sectional_vs_principal_normals(&fd, &pnd).unwrap() < 1e-12);
        assert!(pnd.ambiguity.is_none());
    }

    #[test]
    fn sphere_is_one_group() {
        let fd = fd_of(Sphere, 3, &[0.3, 0.1]);
        let pnd = principal_normals(&fd, GROUPING_TOL, &mut point_rng(1, 0)).unwrap();
        assert_eq!(pnd.pattern(), vec![2]);
        assert!((pnd.groups[0].eta.norm() - 1.0).abs() < 1e-12);
        assert!(sectional_vs_principal_normals(&fd, &pnd).unwrap() < 1e-12);
    }

    #[test]
    fn twisted_surface_is_not_flat() {
        let fd = fd_of(Twisted, 4, &[0.2, 0.3]);
        assert!(normal_bundle_flatness(&fd) > 1e-3);
        assert!(matches!(
            principal_normals(&fd, GROUPING_TOL, &mut point_rng(1, 0)),
            Err(GeomError::NotFlat { .. })
        ));
    }

    #[test]
    fn hypersurfaces_have_flat_normal_bundle() {
        let fd = fd_of(Sphere, 3, &[0.5, 0.4]);
        assert_eq!(normal_bundle_flatness(&fd), 0.0);
    }

    #[test]
    fn adapted_frame_is_orthonormal() {
        let fd = fd_of(Cyl(0.7), 3, &[0.3, 0.1]);
        let pnd = principal_normals(&fd, GROUPING_TOL, &mut point_rng(3, 2)).unwrap();
        let check = pnd.adapted_frame.transpose() * &fd.g * &pnd.adapted_frame;
        assert!((check - DMatrix::identity(2, 2)).amax() < 1e-13);
        assert!(pnd.off_diagonal < 1e-13);
    }
}
