//! Jordan algebras of Hermitian 3x3 matrices over composition algebras.

use crate::composition::{select_independent, CompositionAlgebra};
use crate::linalg;
use crate::{Error, Result};
use ndarray::prelude::*;

/// The Jordan algebra `H_3(C')` (or the trivial `J = R`), with the
/// symmetrized product `x . y = (xy + yx) / 2`.
///
/// Elements are coordinate vectors over the basis:
/// the three diagonal idempotents `E_11, E_22, E_33`, then for each pair
/// `(p, q)`, `p < q`, and each unit `u` of `C'` the Hermitian matrix with
/// `u` at `(p, q)` and `conj(u)` at `(q, p)`.
#[derive(Debug, Clone)]
pub struct JordanAlgebra {
    pub dim: usize,
    /// coefficient dim of the underlying composition algebra (0 for J = R)
    pub coeff_dim: usize,
    /// symmetrized product table `e_i . e_j = sum_k table[i][j][k] e_k`
    pub table: Array3<f64>,
    /// traces of the basis elements
    pub trace: Array1<f64>,
    /// coordinates of the unit element
    pub unit: Array1<f64>,
}

impl JordanAlgebra {
    /// The one-dimensional Jordan algebra `R` (used by the smallest
    /// exceptional case; its traceless part is zero).
    pub fn reals() -> Self {
        let mut table = Array3::zeros((1, 1, 1));
        table[[0, 0, 0]] = 1.0;
        JordanAlgebra {
            dim: 1,
            coeff_dim: 0,
            table,
            trace: array![1.0],
            unit: array![1.0],
        }
    }

    /// `H_3(C')` for `C'` one of R, C, H, O.
    pub fn hermitian3(coeffs: &CompositionAlgebra) -> Result<Self> {
        let cd = coeffs.dim;
        let dim = 3 + 3 * cd;
        // basis as explicit 3x3 matrices over C' (entry = coefficient vector)
        let basis = herm_basis(coeffs);
        let mut table = Array3::zeros((dim, dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                let prod = herm_mat_mul(coeffs, &basis[i], &basis[j]);
                let sym = add_mats(&prod, &herm_mat_mul(coeffs, &basis[j], &basis[i]), 0.5);
                let coords = herm_coords(coeffs, &sym)?;
                table.slice_mut(s![i, j, ..]).assign(&coords);
            }
        }
        let mut trace = Array1::zeros(dim);
        for (i, b) in basis.iter().enumerate() {
            trace[i] = b[0][0][0] + b[1][1][0] + b[2][2][0];
        }
        let mut unit = Array1::zeros(dim);
        unit[0] = 1.0;
        unit[1] = 1.0;
        unit[2] = 1.0;
        Ok(JordanAlgebra {
            dim,
            coeff_dim: cd,
            table,
            trace,
            unit,
        })
    }

    pub fn mul(&self, x: &ArrayView1<f64>, y: &ArrayView1<f64>) -> Array1<f64> {
        let d = self.dim;
        let mut out = Array1::zeros(d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let f = x[i] * y[j];
                if f == 0.0 {
                    continue;
                }
                out.scaled_add(f, &self.table.slice(s![i, j, ..]));
            }
        }
        out
    }

    pub fn tr(&self, x: &ArrayView1<f64>) -> f64 {
        self.trace.dot(x)
    }

    /// `x * y = x . y - tr(x . y)/3 unit`, the traceless product on `J_0`.
    pub fn star(&self, x: &ArrayView1<f64>, y: &ArrayView1<f64>) -> Array1<f64> {
        let p = self.mul(x, y);
        let t = self.tr(&p.view());
        p - &(&self.unit * (t / 3.0))
    }

    /// Right multiplication operator `R_x : y -> y . x`.
    pub fn right_mul(&self, x: &ArrayView1<f64>) -> Array2<f64> {
        let d = self.dim;
        let mut m = Array2::zeros((d, d));
        for j in 0..d {
            let mut e = Array1::zeros(d);
            e[j] = 1.0;
            m.column_mut(j).assign(&self.mul(&e.view(), x));
        }
        m
    }

    /// A basis of the traceless part `J_0` in coordinates.
    pub fn traceless_basis(&self) -> Array2<f64> {
        let d = self.dim;
        if d == 1 {
            return Array2::zeros((1, 0));
        }
        let k = d - 1;
        let mut b = Array2::zeros((d, k));
        // E_11 - E_22, E_22 - E_33, then all off-diagonal elements
        b[[0, 0]] = 1.0;
        b[[1, 0]] = -1.0;
        b[[1, 1]] = 1.0;
        b[[2, 1]] = -1.0;
        for c in 3..d {
            b[[c, c - 1]] = 1.0;
        }
        b
    }

    /// Maximal independent set of `[R_x, R_y]` over basis pairs; spans the
    /// derivation algebra `Der(J)`.
    pub fn derivation_basis(&self) -> Vec<Array2<f64>> {
        let d = self.dim;
        let mut cands = Vec::new();
        for i in 0..d {
            for j in (i + 1)..d {
                let mut ei = Array1::zeros(d);
                ei[i] = 1.0;
                let mut ej = Array1::zeros(d);
                ej[j] = 1.0;
                let ri = self.right_mul(&ei.view());
                let rj = self.right_mul(&ej.view());
                cands.push(ri.dot(&rj) - rj.dot(&ri));
            }
        }
        select_independent(&cands, d)
    }

    /// Max residual of the linearized Jordan identity
    /// `sum_cyc ((u.v).y).w - (u.v).(y.w) = 0` over basis 4-tuples.
    pub fn jordan_identity_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        let e = |i: usize| {
            let mut v = Array1::zeros(d);
            v[i] = 1.0;
            v
        };
        for u in 0..d {
            for v in u..d {
                for w in v..d {
                    for y in 0..d {
                        let mut resid = Array1::zeros(d);
                        for (a, b, c) in [(u, v, w), (v, w, u), (w, u, v)] {
                            let ab = self.mul(&e(a).view(), &e(b).view());
                            let ab_y = self.mul(&ab.view(), &e(y).view());
                            let lhs = self.mul(&ab_y.view(), &e(c).view());
                            let yc = self.mul(&e(y).view(), &e(c).view());
                            let rhs = self.mul(&ab.view(), &yc.view());
                            resid += &(lhs - rhs);
                        }
                        worst = worst.max(linalg::max_abs(resid.iter()));
                    }
                }
            }
        }
        worst
    }
}

// ---- helpers: 3x3 matrices with entries in a composition algebra ----

type HermMat = [[Vec<f64>; 3]; 3];

fn zero_mat(cd: usize) -> HermMat {
    std::array::from_fn(|_| std::array::from_fn(|_| vec![0.0; cd]))
}

fn herm_basis(coeffs: &CompositionAlgebra) -> Vec<HermMat> {
    let cd = coeffs.dim;
    let mut out = Vec::new();
    for p in 0..3 {
        let mut m = zero_mat(cd);
        m[p][p][0] = 1.0;
        out.push(m);
    }
    for p in 0..3 {
        for q in (p + 1)..3 {
            for u in 0..cd {
                let mut m = zero_mat(cd);
                m[p][q][u] = 1.0;
                m[q][p][u] = if u == 0 { 1.0 } else { -1.0 };
                out.push(m);
            }
        }
    }
    out
}

fn herm_mat_mul(coeffs: &CompositionAlgebra, a: &HermMat, b: &HermMat) -> HermMat {
    let cd = coeffs.dim;
    let mut out = zero_mat(cd);
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = Array1::zeros(cd);
            for k in 0..3 {
                let x = Array1::from(a[i][k].clone());
                let y = Array1::from(b[k][j].clone());
                acc += &coeffs.mul(&x.view(), &y.view());
            }
            out[i][j] = acc.to_vec();
        }
    }
    out
}

fn add_mats(a: &HermMat, b: &HermMat, scale: f64) -> HermMat {
    let cd = a[0][0].len();
    let mut out = zero_mat(cd);
    for i in 0..3 {
        for j in 0..3 {
            for u in 0..cd {
                out[i][j][u] = (a[i][j][u] + b[i][j][u]) * scale;
            }
        }
    }
    out
}

/// Coordinates of a Hermitian matrix in the `herm_basis` ordering.
fn herm_coords(coeffs: &CompositionAlgebra, m: &HermMat) -> Result<Array1<f64>> {
    let cd = coeffs.dim;
    let dim = 3 + 3 * cd;
    let mut out = Array1::zeros(dim);
    for p in 0..3 {
        for u in 1..cd {
            if m[p][p][u].abs() > 1e-10 {
                return Err(Error::Internal(
                    "product of Hermitian matrices left the Hermitian space".into(),
                ));
            }
        }
        out[p] = m[p][p][0];
    }
    let mut idx = 3;
    for p in 0..3 {
        for q in (p + 1)..3 {
            for u in 0..cd {
                out[idx] = m[p][q][u];
                let mirror = if u == 0 { m[q][p][u] } else { -m[q][p][u] };
                if (m[p][q][u] - mirror).abs() > 1e-10 {
                    return Err(Error::Internal(
                        "product of Hermitian matrices is not Hermitian".into(),
                    ));
                }
                idx += 1;
            }
        }
    }
    Ok(out)
}
