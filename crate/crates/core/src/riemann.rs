//! Four-index curvature tensors.
//!
//! Convention: `R(i,j,k,l) = <R(∂_i, ∂_j) ∂_k, ∂_l>` with
//! `R(X,Y) = ∇_X ∇_Y - ∇_Y ∇_X - ∇_[X,Y]`, so the sectional curvature of the
//! plane spanned by `X, Y` is `R(X,Y,Y,X) / (|X|^2 |Y|^2 - <X,Y>^2)`.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::linalg::{form, spd_inverse};
use crate::taylor::Taylor;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Tensor4 {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Tensor4::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        t.data[((i * n + j) * n + k) * n + l] = f(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n;
        self.data[((i * n + j) * n + k) * n + l]
    }

    /// Evaluate on four vectors given in the same basis.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0.0 {
                    continue;
                }
                for k in 0..n {
                    if z[k] == 0.0 {
                        continue;
                    }
                    for l in 0..n {
                        acc += self.get(i, j, k, l) * x[i] * y[j] * z[k] * w[l];
                    }
                }
            }
        }
        acc
    }

    /// Components in a new basis whose vectors are the columns of `frame`.
    pub fn in_frame(&self, frame: &DMatrix<f64>) -> Tensor4 {
        let n = self.n;
        let mut t = self.clone();
        // contract one slot at a time
        for slot in 0..4 {
            let mut next = Tensor4::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let idx = [i, j, k, l];
                            let mut acc = 0.0;
                            for q in 0..n {
                                let mut src = idx;
                                src[slot] = q;
                                acc += frame[(q, idx[slot])] * t.get(src[0], src[1], src[2], src[3]);
                            }
                            next.data[((i * n + j) * n + k) * n + l] = acc;
                        }
                    }
                }
            }
            t = next;
        }
        t
    }

    pub fn sectional(&self, g: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let area = form(g, x, x) * form(g, y, y) - form(g, x, y).powi(2);
        self.apply(x, y, y, x) / area
    }

    /// `Ric(j,k) = g^{il} R(i,j,k,l)`.
    pub fn ricci(&self, ginv: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |j, k| {
            let mut acc = 0.0;
            for i in 0..n {
                for l in 0..n {
                    acc += ginv[(i, l)] * self.get(i, j, k, l);
                }
            }
            acc
        })
    }

    pub fn max_abs_diff(&self, other: &Tensor4) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn scale(&self, s: f64) -> Tensor4 {
        Tensor4 {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn sub(&self, o: &Tensor4) -> Tensor4 {
        Tensor4 {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Largest violation of the algebraic curvature symmetries: skew in each
    /// pair, pair interchange and the first Bianchi identity.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        worst = worst
                            .max((r + self.get(j, i, k, l)).abs())
                            .max((r + self.get(i, j, l, k)).abs())
                            .max((r - self.get(k, l, i, j)).abs())
                            .max((r + self.get(j, k, i, l) + self.get(k, i, j, l)).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Kulkarni-Nomizu style product used by the conformal change and the
/// conformal Gauss equation:
/// `(h ⊙ g)(X,Y,Z,W) = h(X,W) g(Y,Z) + h(Y,Z) g(X,W) - h(X,Z) g(Y,W) - h(Y,W) g(X,Z)`.
pub fn kulkarni_nomizu(h: &DMatrix<f64>, g: &DMatrix<f64>) -> Tensor4 {
    Tensor4::from_fn(h.nrows(), |x, y, z, w| {
        h[(x, w)] * g[(y, z)] + h[(y, z)] * g[(x, w)] - h[(x, z)] * g[(y, w)] - h[(y, w)] * g[(x, z)]
    })
}

/// Christoffel symbols `Γ^k_ij` (indexed `[k][i][j]`) from the metric and
/// its first derivatives `dg[k][(i,j)] = ∂_k g_ij`.
pub fn christoffel(ginv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    let n = ginv.nrows();
    (0..n)
        .map(|k| {
            DMatrix::from_fn(n, n, |i, j| {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                0.5 * acc
            })
        })
        .collect()
}

/// Riemann tensor of a metric given as Taylor polynomials of degree >= 2.
pub fn riemann_from_metric(g: &[Vec<Taylor>]) -> Result<Tensor4> {
    let n = g.len();
    let g0 = DMatrix::from_fn(n, n, |i, j| g[i][j].value());
    let ginv = spd_inverse(&g0)?;
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|k| DMatrix::from_fn(n, n, |i, j| g[i][j].partial(&[k])))
        .collect();
    // d2g[a][b][(i,j)] = ∂_a ∂_b g_ij
    let d2g: Vec<Vec<DMatrix<f64>>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| DMatrix::from_fn(n, n, |i, j| g[i][j].partial(&[a, b])))
                .collect()
        })
        .collect();
    let gamma = christoffel(&ginv, &dg);
    // ∂_a Γ^k_ij with ∂ g^{-1} = -g^{-1} (∂g) g^{-1}
    let dgamma: Vec<Vec<DMatrix<f64>>> = (0..n)
        .map(|a| {
            let dginv = -&ginv * &dg[a] * &ginv;
            (0..n)
                .map(|k| {
                    DMatrix::from_fn(n, n, |i, j| {
                        let mut acc = 0.0;
                        for l in 0..n {
                            let lower = dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)];
                            let dlower = d2g[a][i][(j, l)] + d2g[a][j][(i, l)] - d2g[a][l][(i, j)];
                            acc += dginv[(k, l)] * lower + ginv[(k, l)] * dlower;
                        }
                        0.5 * acc
                    })
                })
                .collect()
        })
        .collect();
    // R(∂_i,∂_j)∂_k = R^q_ijk ∂_q
    let up = |i: usize, j: usize, k: usize, q: usize| {
        let mut r = dgamma[i][q][(j, k)] - dgamma[j][q][(i, k)];
        for s in 0..n {
            r += gamma[q][(i, s)] * gamma[s][(j, k)] - gamma[q][(j, s)] * gamma[s][(i, k)];
        }
        r
    };
    let mut up_t = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for q in 0..n {
                    up_t[((i * n + j) * n + k) * n + q] = up(i, j, k, q);
                }
            }
        }
    }
    Ok(Tensor4::from_fn(n, |i, j, k, l| {
        (0..n)
            .map(|q| g0[(l, q)] * up_t[((i * n + j) * n + k) * n + q])
            .sum()
    }))
}
