//! Eight-node hexahedron with one-point integration and stiffness-type
//! hourglass stabilization.
//!
//! Local node order: bottom face `(-,-), (+,-), (+,+), (-,+)` then the top
//! face in the same order. Dof `3 * a + i` is component `i` of node `a`.

use crate::error::{Error, Result};
use crate::materials::Voigt;

const XI: [f64; 8] = [-1.0, 1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0];
const ETA: [f64; 8] = [-1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0, 1.0];
const ZETA: [f64; 8] = [-1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0];

/// Element matrix, row-major 24 x 24.
pub type ElementMatrix = Box<[[f64; 24]; 24]>;

/// Geometry-dependent part of the element operator.
#[derive(Debug, Clone, PartialEq)]
pub struct HexOperator {
    pub volume: f64,
    /// Shape function gradients at the centroid.
    pub b: [[f64; 3]; 8],
    /// Hourglass shape vectors orthogonal to linear fields.
    pub gamma: [[f64; 8]; 4],
    /// `V * sum(b_a . b_a) / 8`, multiplied by `κ (λ0 + 2μ0)` to give the
    /// hourglass stiffness.
    pub hourglass_scale: f64,
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

impl HexOperator {
    pub fn new(coords: &[[f64; 3]; 8]) -> Result<Self> {
        // J[i][j] = d x_i / d natural_j at the centroid.
        let mut jac = [[0.0; 3]; 3];
        for a in 0..8 {
            let g = [XI[a] / 8.0, ETA[a] / 8.0, ZETA[a] / 8.0];
            for i in 0..3 {
                for j in 0..3 {
                    jac[i][j] += coords[a][i] * g[j];
                }
            }
        }
        let det = det3(&jac);
        if !(det > 0.0 && det.is_finite()) {
            return Err(Error::Solver(format!(
                "element has non-positive Jacobian determinant {det}"
            )));
        }
        // inv = J^{-1}; b_a = J^{-T} g_a.
        let mut inv = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                inv[i][j] = (jac[r0][c0] * jac[r1][c1] - jac[r0][c1] * jac[r1][c0]) / det;
            }
        }
        let mut b = [[0.0; 3]; 8];
        for a in 0..8 {
            let g = [XI[a] / 8.0, ETA[a] / 8.0, ZETA[a] / 8.0];
            for i in 0..3 {
                b[a][i] = (0..3).map(|k| inv[k][i] * g[k]).sum();
            }
        }
        let volume = 8.0 * det;

        let base: [[f64; 8]; 4] = std::array::from_fn(|alpha| {
            std::array::from_fn(|a| match alpha {
                0 => ETA[a] * ZETA[a],
                1 => XI[a] * ZETA[a],
                2 => XI[a] * ETA[a],
                _ => XI[a] * ETA[a] * ZETA[a],
            })
        });
        let mut gamma = [[0.0; 8]; 4];
        for alpha in 0..4 {
            let mut proj = [0.0; 3];
            for (a, x) in coords.iter().enumerate() {
                for i in 0..3 {
                    proj[i] += base[alpha][a] * x[i];
                }
            }
            for a in 0..8 {
                let dot: f64 = (0..3).map(|i| proj[i] * b[a][i]).sum();
                gamma[alpha][a] = base[alpha][a] - dot;
            }
        }
        let bb: f64 = b.iter().flat_map(|v| v.iter()).map(|x| x * x).sum();
        Ok(HexOperator {
            volume,
            b,
            gamma,
            hourglass_scale: volume * bb / 8.0,
        })
    }

    /// Centroid strain (engineering shear).
    pub fn strain(&self, u: &[f64; 24]) -> Voigt {
        let mut e = [0.0; 6];
        for a in 0..8 {
            let [bx, by, bz] = self.b[a];
            let (ux, uy, uz) = (u[3 * a], u[3 * a + 1], u[3 * a + 2]);
            e[0] += bx * ux;
            e[1] += by * uy;
            e[2] += bz * uz;
            e[3] += by * ux + bx * uy;
            e[4] += bz * ux + bx * uz;
            e[5] += bz * uy + by * uz;
        }
        e
    }

    /// `V Bᵀ σ`.
    pub fn stress_force(&self, s: &Voigt) -> [f64; 24] {
        let mut f = [0.0; 24];
        for a in 0..8 {
            let [bx, by, bz] = self.b[a];
            f[3 * a] = self.volume * (bx * s[0] + by * s[3] + bz * s[4]);
            f[3 * a + 1] = self.volume * (by * s[1] + bx * s[3] + bz * s[5]);
            f[3 * a + 2] = self.volume * (bz * s[2] + bx * s[4] + by * s[5]);
        }
        f
    }

    /// Hourglass resisting force for stiffness coefficient `c` (N/mm).
    pub fn hourglass_force(&self, c: f64, u: &[f64; 24]) -> [f64; 24] {
        let mut f = [0.0; 24];
        for g in &self.gamma {
            for i in 0..3 {
                let q: f64 = (0..8).map(|a| g[a] * u[3 * a + i]).sum();
                for a in 0..8 {
                    f[3 * a + i] += c * g[a] * q;
                }
            }
        }
        f
    }

    /// Hourglass coefficient `κ (λ0 + 2μ0) V Σ b²/8` for instantaneous moduli.
    pub fn hourglass_coefficient(&self, kappa: f64, lambda0: f64, mu0: f64) -> f64 {
        kappa * (lambda0 + 2.0 * mu0) * self.hourglass_scale
    }

    /// Isotropic stiffness for Lamé constants `(λ, μ)` plus hourglass
    /// stiffness with coefficient `c`.
    pub fn stiffness(&self, lambda: f64, mu: f64, c: f64) -> ElementMatrix {
        let mut k: ElementMatrix = Box::new([[0.0; 24]; 24]);
        let v = self.volume;
        for a in 0..8 {
            for b in 0..8 {
                let ba = self.b[a];
                let bb = self.b[b];
                let dot = ba[0] * bb[0] + ba[1] * bb[1] + ba[2] * bb[2];
                let hg: f64 = self.gamma.iter().map(|g| g[a] * g[b]).sum::<f64>() * c;
                for i in 0..3 {
                    for j in 0..3 {
                        let mut val = v * (lambda * ba[i] * bb[j] + mu * ba[j] * bb[i]);
                        if i == j {
                            val += v * mu * dot + hg;
                        }
                        k[3 * a + i][3 * b + j] = val;
                    }
                }
            }
        }
        k
    }
}

/// Lamé constants from shear and bulk moduli.
pub fn lame(shear: f64, bulk: f64) -> (f64, f64) {
    (bulk - 2.0 * shear / 3.0, shear)
}
