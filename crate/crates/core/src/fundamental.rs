//! Induced metric, second fundamental form and mean curvature at a point.

use nalgebra::{DMatrix, DVector};

use crate::chart::Jet;
use crate::error::{GeomError, Result};
use crate::linalg::{complete_basis, gram_schmidt, spd_inverse};
use crate::riemann::Tensor4;

/// Default umbilic threshold on `rho^2`.
pub const EPS_UMBILIC: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct FundamentalData {
    pub n: usize,
    pub m: usize,
    /// Induced metric in chart coordinates.
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// Coordinate tangent vectors `∂_i f`.
    pub coordinate_tangents: Vec<DVector<f64>>,
    /// Orthonormal tangent vectors (modified Gram-Schmidt of the coordinate
    /// tangents in index order).
    pub tangent_frame: Vec<DVector<f64>>,
    /// Coordinates of the tangent frame: column `a` expresses `tangent_frame[a]`
    /// in the basis `∂_i`.
    pub frame_coords: DMatrix<f64>,
    pub normal_frame: Vec<DVector<f64>>,
    /// `alpha[ξ][(i,j)] = <α(∂_i, ∂_j), ξ>` for the normal frame.
    pub alpha: Vec<DMatrix<f64>>,
    /// Mean curvature vector components in the normal frame.
    pub mean_curvature: DVector<f64>,
    /// Shape operators `A_ξ` in the orthonormal tangent frame.
    pub shape_ops: Vec<DMatrix<f64>>,
}

impl FundamentalData {
    pub fn p(&self) -> usize {
        self.m - self.n
    }

    /// Mean curvature vector in ambient coordinates.
    pub fn mean_curvature_ambient(&self) -> DVector<f64> {
        self.normal_frame
            .iter()
            .zip(self.mean_curvature.iter())
            .fold(DVector::zeros(self.m), |acc, (xi, h)| acc + xi * *h)
    }

    /// `|α|^2` summed over an orthonormal tangent frame.
    pub fn alpha_norm_sq(&self) -> f64 {
        self.shape_ops.iter().map(|a| a.norm_squared()).sum()
    }

    /// Ambient second fundamental form on two tangent-frame vectors.
    pub fn alpha_frame(&self, a: usize, b: usize) -> DVector<f64> {
        self.normal_frame
            .iter()
            .zip(&self.shape_ops)
            .fold(DVector::zeros(self.m), |acc, (xi, s)| acc + xi * s[(a, b)])
    }
}

/// Classical pointwise package from a jet of order >= 2.
pub fn fundamental_data(jet: &Jet, n: usize) -> Result<FundamentalData> {
    if !jet.has_order(2) {
        return Err(GeomError::SpecInvalid(
            "fundamental data needs second-order jets".into(),
        ));
    }
    let m = jet.ambient_dim();
    let d1 = jet.d1();
    let coordinate_tangents: Vec<DVector<f64>> = (0..n).map(|i| d1.column(i).into_owned()).collect();
    let g = d1.transpose() * &d1;
    let g_inv = spd_inverse(&g)?;
    let tangent_frame = gram_schmidt(&coordinate_tangents, |a, b| a.dot(b), 1e-10)?;
    // frame_coords = D1^+ T, exact since the frame lies in the column space
    let t_mat = DMatrix::from_columns(&tangent_frame);
    let frame_coords = &g_inv * d1.transpose() * &t_mat;
    let normal_frame = complete_basis(&tangent_frame, m);

    let d2 = |i: usize, j: usize| -> DVector<f64> {
        DVector::from_iterator(m, (0..m).map(|a| jet.partial(a, &[i, j])))
    };
    let hess: Vec<Vec<DVector<f64>>> = (0..n).map(|i| (0..n).map(|j| d2(i, j)).collect()).collect();
    let alpha: Vec<DMatrix<f64>> = normal_frame
        .iter()
        .map(|xi| DMatrix::from_fn(n, n, |i, j| hess[i][j].dot(xi)))
        .collect();
    let shape_ops: Vec<DMatrix<f64>> = alpha
        .iter()
        .map(|a| frame_coords.transpose() * a * &frame_coords)
        .map(|s| (&s + s.transpose()) * 0.5)
        .collect();
    let mean_curvature = DVector::from_iterator(
        normal_frame.len(),
        shape_ops.iter().map(|s| s.trace() / n as f64),
    );
    Ok(FundamentalData {
        n,
        m,
        g,
        g_inv,
        coordinate_tangents,
        tangent_frame,
        frame_coords,
        normal_frame,
        alpha,
        mean_curvature,
        shape_ops,
    })
}

/// `rho^2 = n/(n-1) (|α|^2 - n |H|^2)`, clamped at zero against roundoff.
pub fn rho_squared(fd: &FundamentalData) -> f64 {
    let n = fd.n as f64;
    let v = n / (n - 1.0) * (fd.alpha_norm_sq() - n * fd.mean_curvature.norm_squared());
    v.max(0.0)
}

/// `rho^2`, failing at umbilic points.
pub fn require_non_umbilic(fd: &FundamentalData, eps: f64) -> Result<f64> {
    let r2 = rho_squared(fd);
    if r2 <= eps {
        return Err(GeomError::UmbilicPoint { rho_sq: r2, eps });
    }
    Ok(r2)
}

/// Riemann tensor of the induced metric via the Gauss equation (flat ambient),
/// in chart coordinates.
pub fn gauss_curvature_tensor(fd: &FundamentalData) -> Tensor4 {
    let n = fd.n;
    Tensor4::from_fn(n, |i, j, k, l| {
        fd.alpha
            .iter()
            .map(|a| a[(i, l)] * a[(j, k)] - a[(i, k)] * a[(j, l)])
            .sum()
    })
}
