//! The unified construction of the compact exceptional Lie algebras from a
//! composition algebra `C` and a Jordan algebra `J`:
//! `T(C, J) = Der(C) + C_0 (x) J_0 + Der(J)`.

use crate::composition::CompositionAlgebra;
use crate::jordan::JordanAlgebra;
use crate::lie::LieAlgebra;
use crate::linalg;
use crate::{Error, Result};
use ndarray::prelude::*;

/// The Lie algebra `T(C, J)` together with the bookkeeping needed to locate
/// distinguished subspaces (derivation blocks, pure tensors) inside it.
///
/// Basis order: `Der(C)` block, then pure tensors `e_u (x) x_t` (`u` over
/// imaginary units of `C`, `t` over the traceless basis of `J`, `u` outer),
/// then the `Der(J)` block.
pub struct TitsAlgebra {
    pub algebra: LieAlgebra,
    pub comp: CompositionAlgebra,
    pub jordan: JordanAlgebra,
    pub derc_basis: Vec<Array2<f64>>,
    pub derj_basis: Vec<Array2<f64>>,
    /// columns span the traceless part `J_0` in `J`-coordinates
    pub j0_basis: Array2<f64>,
    pub n_derc: usize,
    pub n_tensor: usize,
    pub n_derj: usize,
    derc_pinv: Array2<f64>,
    derj_pinv: Array2<f64>,
    j0_pinv: Array2<f64>,
}

impl TitsAlgebra {
    pub fn dim(&self) -> usize {
        self.n_derc + self.n_tensor + self.n_derj
    }

    /// Coordinates of a `Der(C)` matrix in the chosen derivation basis.
    pub fn derc_coords(&self, m: &Array2<f64>) -> Result<Array1<f64>> {
        let v = flatten(m);
        let coords = self.derc_pinv.dot(&v);
        let resid = reconstruct(&self.derc_basis, &coords) - m;
        if linalg::max_abs(resid.iter()) > 1e-9 {
            return Err(Error::Internal(
                "matrix does not lie in Der(C)".into(),
            ));
        }
        Ok(coords)
    }

    fn derj_coords(&self, m: &Array2<f64>) -> Result<Array1<f64>> {
        let v = flatten(m);
        let coords = self.derj_pinv.dot(&v);
        let resid = reconstruct(&self.derj_basis, &coords) - m;
        if linalg::max_abs(resid.iter()) > 1e-9 {
            return Err(Error::Internal(
                "operator does not lie in Der(J)".into(),
            ));
        }
        Ok(coords)
    }

    fn j0_coords(&self, x: &Array1<f64>) -> Result<Array1<f64>> {
        let coords = self.j0_pinv.dot(x);
        let resid = self.j0_basis.dot(&coords) - x;
        if linalg::max_abs(resid.iter()) > 1e-9 {
            return Err(Error::Internal("element is not traceless".into()));
        }
        Ok(coords)
    }

    /// Index of the pure tensor `e_u (x) x_t` in the algebra basis.
    pub fn tensor_index(&self, unit: usize, t: usize) -> usize {
        let nj0 = self.jordan.dim - 1;
        self.n_derc + (unit - 1) * nj0 + t
    }

    /// Embeds a `Der(C)` matrix into algebra coordinates.
    pub fn embed_derc(&self, m: &Array2<f64>) -> Result<Array1<f64>> {
        let coords = self.derc_coords(m)?;
        let mut out = Array1::zeros(self.dim());
        out.slice_mut(s![..self.n_derc]).assign(&coords);
        Ok(out)
    }
}

/// Builds `T(C, J)`. `C` must be the quaternions or the octonions.
pub fn build_tits(comp: &CompositionAlgebra, jordan: &JordanAlgebra) -> Result<TitsAlgebra> {
    if comp.dim != 4 && comp.dim != 8 {
        return Err(Error::Usage(format!(
            "the construction expects C of dimension 4 or 8, got {}",
            comp.dim
        )));
    }
    let derc_basis = comp.derivation_basis();
    let derj_basis = jordan.derivation_basis();
    let j0_basis = jordan.traceless_basis();
    let n_derc = derc_basis.len();
    let nj0 = j0_basis.ncols();
    let n_units = comp.dim - 1;
    let n_tensor = n_units * nj0;
    let n_derj = derj_basis.len();
    let dim = n_derc + n_tensor + n_derj;

    let derc_pinv = pinv_of_matrix_basis(&derc_basis);
    let derj_pinv = pinv_of_matrix_basis(&derj_basis);
    let j0_pinv = {
        let g = j0_basis.t().dot(&j0_basis);
        let (vals, vecs) = linalg::eigh(&g);
        let mut inv = Array2::zeros(g.dim());
        for (i, &l) in vals.iter().enumerate() {
            assert!(l > 1e-12, "traceless basis is degenerate");
            let u = vecs.column(i).insert_axis(Axis(1));
            inv = inv + &u.dot(&u.t()).mapv(|x| x / l);
        }
        inv.dot(&j0_basis.t())
    };

    let tits = TitsAlgebra {
        algebra: LieAlgebra::from_triplets(dim, &[])?, // replaced below
        comp: comp.clone(),
        jordan: jordan.clone(),
        derc_basis,
        derj_basis,
        j0_basis,
        n_derc,
        n_tensor,
        n_derj,
        derc_pinv,
        derj_pinv,
        j0_pinv,
    };

    let mut triplets: Vec<(usize, usize, usize, f64)> = Vec::new();
    let push_vec = |trips: &mut Vec<(usize, usize, usize, f64)>,
                        i: usize,
                        j: usize,
                        v: &Array1<f64>| {
        for (k, &c) in v.iter().enumerate() {
            if c.abs() > 1e-12 {
                trips.push((i, j, k, c));
                trips.push((j, i, k, -c));
            }
        }
    };

    let unit_vec = |alg_dim: usize, u: usize| -> Array1<f64> {
        let mut e = Array1::zeros(alg_dim);
        e[u] = 1.0;
        e
    };

    // [Der(C), Der(C)]
    for i in 0..n_derc {
        for j in (i + 1)..n_derc {
            let comm = tits.derc_basis[i].dot(&tits.derc_basis[j])
                - tits.derc_basis[j].dot(&tits.derc_basis[i]);
            let coords = tits.derc_coords(&comm)?;
            let mut v = Array1::zeros(dim);
            v.slice_mut(s![..n_derc]).assign(&coords);
            push_vec(&mut triplets, i, j, &v);
        }
    }
    // [Der(J), Der(J)]
    for i in 0..n_derj {
        for j in (i + 1)..n_derj {
            let comm = tits.derj_basis[i].dot(&tits.derj_basis[j])
                - tits.derj_basis[j].dot(&tits.derj_basis[i]);
            let coords = tits.derj_coords(&comm)?;
            let mut v = Array1::zeros(dim);
            v.slice_mut(s![n_derc + n_tensor..]).assign(&coords);
            push_vec(&mut triplets, n_derc + n_tensor + i, n_derc + n_tensor + j, &v);
        }
    }
    // [Der(C), e_u (x) x_t] = d(e_u) (x) x_t
    for i in 0..n_derc {
        let d = &tits.derc_basis[i];
        for u in 1..comp.dim {
            let da = d.column(u).to_owned(); // d(e_u) in C coordinates
            if da[0].abs() > 1e-10 {
                return Err(Error::Internal(
                    "derivation does not preserve the imaginary part".into(),
                ));
            }
            for t in 0..nj0 {
                let mut v = Array1::zeros(dim);
                for w in 1..comp.dim {
                    let c = da[w];
                    if c.abs() > 1e-12 {
                        v[tits.tensor_index(w, t)] += c;
                    }
                }
                push_vec(&mut triplets, i, tits.tensor_index(u, t), &v);
            }
        }
    }
    // [Der(J), e_u (x) x_t] = e_u (x) D(x_t)
    for i in 0..n_derj {
        let dmat = &tits.derj_basis[i];
        for t in 0..nj0 {
            let xt = tits.j0_basis.column(t).to_owned();
            let dx = dmat.dot(&xt);
            let dx0 = tits.j0_coords(&dx)?;
            for u in 1..comp.dim {
                let mut v = Array1::zeros(dim);
                for (t2, &c) in dx0.iter().enumerate() {
                    if c.abs() > 1e-12 {
                        v[tits.tensor_index(u, t2)] += c;
                    }
                }
                // note order: [D, a (x) x] = a (x) D(x)
                push_vec(
                    &mut triplets,
                    n_derc + n_tensor + i,
                    tits.tensor_index(u, t),
                    &v,
                );
            }
        }
    }
    // [e_u (x) x_s, e_w (x) x_t] =
    //   tr(x_s . x_t)/3 D_{e_u, e_w} + [e_u, e_w] (x) (x_s * x_t)
    //   + 2 t_C(e_u e_w) [R_{x_s}, R_{x_t}]
    for u in 1..comp.dim {
        for w in u..comp.dim {
            let eu = unit_vec(comp.dim, u);
            let ew = unit_vec(comp.dim, w);
            let d_uw = comp.derivation(&eu.view(), &ew.view());
            let d_uw_coords = tits.derc_coords(&d_uw)?;
            let comm_c = comp.mul(&eu.view(), &ew.view()) - comp.mul(&ew.view(), &eu.view());
            let t_c = comp.trace(&comp.mul(&eu.view(), &ew.view()).view());
            for si in 0..nj0 {
                let xs = tits.j0_basis.column(si).to_owned();
                let t_lo = if u == w { si + 1 } else { 0 };
                for ti in t_lo..nj0 {
                    let a_idx = tits.tensor_index(u, si);
                    let b_idx = tits.tensor_index(w, ti);
                    if a_idx >= b_idx {
                        continue;
                    }
                    let xt = tits.j0_basis.column(ti).to_owned();
                    let mut v = Array1::zeros(dim);
                    // Der(C) part
                    let trace_st = tits.jordan.tr(&tits.jordan.mul(&xs.view(), &xt.view()).view());
                    if trace_st.abs() > 1e-12 {
                        for (k, &c) in d_uw_coords.iter().enumerate() {
                            v[k] += trace_st / 3.0 * c;
                        }
                    }
                    // tensor part
                    let star = tits.jordan.star(&xs.view(), &xt.view());
                    let star0 = tits.j0_coords(&star)?;
                    for w2 in 1..comp.dim {
                        let c_c = comm_c[w2];
                        if c_c.abs() < 1e-12 {
                            continue;
                        }
                        for (t2, &cj) in star0.iter().enumerate() {
                            if cj.abs() > 1e-12 {
                                v[tits.tensor_index(w2, t2)] += c_c * cj;
                            }
                        }
                    }
                    // Der(J) part
                    if t_c.abs() > 1e-12 {
                        let rs = tits.jordan.right_mul(&xs.view());
                        let rt = tits.jordan.right_mul(&xt.view());
                        let comm_r = rs.dot(&rt) - rt.dot(&rs);
                        let coords = tits.derj_coords(&comm_r)?;
                        for (k, &c) in coords.iter().enumerate() {
                            if c.abs() > 1e-12 {
                                v[n_derc + n_tensor + k] += 2.0 * t_c * c;
                            }
                        }
                    }
                    push_vec(&mut triplets, a_idx, b_idx, &v);
                }
            }
        }
    }

    let algebra = LieAlgebra::from_triplets(dim, &triplets)?;
    // Jacobi is part of the construction contract; a failure signals a
    // table bug.
    let report = algebra.check_jacobi(1e-9);
    if !report.pass {
        return Err(Error::Construction(format!(
            "Jacobi identity fails in T(C,J) dim {dim}: max violation {:.3e}",
            report.max_violation
        )));
    }
    Ok(TitsAlgebra { algebra, ..tits })
}

fn flatten(m: &Array2<f64>) -> Array1<f64> {
    Array1::from_iter(m.iter().cloned())
}

fn reconstruct(basis: &[Array2<f64>], coords: &Array1<f64>) -> Array2<f64> {
    let mut out = Array2::zeros(basis[0].dim());
    for (b, &c) in basis.iter().zip(coords.iter()) {
        out.scaled_add(c, b);
    }
    out
}

fn pinv_of_matrix_basis(basis: &[Array2<f64>]) -> Array2<f64> {
    if basis.is_empty() {
        return Array2::zeros((0, 0));
    }
    let nn = basis[0].len();
    let k = basis.len();
    let mut bmat = Array2::zeros((nn, k));
    for (j, b) in basis.iter().enumerate() {
        bmat.column_mut(j).assign(&flatten(b));
    }
    let g = bmat.t().dot(&bmat);
    let (vals, vecs) = linalg::eigh(&g);
    let mut inv = Array2::zeros((k, k));
    for (i, &l) in vals.iter().enumerate() {
        assert!(l > 1e-10, "derivation basis is degenerate");
        let u = vecs.column(i).insert_axis(Axis(1));
        inv = inv + &u.dot(&u.t()).mapv(|x| x / l);
    }
    inv.dot(&bmat.t())
}
