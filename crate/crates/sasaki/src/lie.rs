//! Finite-dimensional real Lie algebras given by structure constants.

use crate::linalg;
use crate::{Error, Result};
use ndarray::prelude::*;
use rayon::prelude::*;

/// Structure constants `[e_i, e_j] = sum_k c[i][j][k] e_k`.
///
/// Dense storage below `DENSE_LIMIT`; above it, a per-pair adjacency list
/// (the rank-3 array for e8 would hold 15M entries, almost all zero).
#[derive(Debug, Clone)]
enum Structure {
    Dense(Array3<f64>),
    Sparse { dim: usize, table: Vec<Vec<(u32, f64)>> },
}

const DENSE_LIMIT: usize = 64;
const STRUCT_EPS: f64 = 1e-12;

impl Structure {
    fn from_triplets(dim: usize, triplets: &[(usize, usize, usize, f64)]) -> Self {
        if dim < DENSE_LIMIT {
            let mut c = Array3::zeros((dim, dim, dim));
            for &(i, j, k, v) in triplets {
                c[[i, j, k]] += v;
            }
            Structure::Dense(c)
        } else {
            let mut table = vec![Vec::new(); dim * dim];
            for &(i, j, k, v) in triplets {
                if v.abs() > STRUCT_EPS {
                    table[i * dim + j].push((k as u32, v));
                }
            }
            for row in table.iter_mut() {
                row.sort_by_key(|e| e.0);
                // merge duplicates
                let mut merged: Vec<(u32, f64)> = Vec::with_capacity(row.len());
                for &(k, v) in row.iter() {
                    if let Some(last) = merged.last_mut() {
                        if last.0 == k {
                            last.1 += v;
                            continue;
                        }
                    }
                    merged.push((k, v));
                }
                merged.retain(|e| e.1.abs() > STRUCT_EPS);
                *row = merged;
            }
            Structure::Sparse { dim, table }
        }
    }

    fn dim(&self) -> usize {
        match self {
            Structure::Dense(c) => c.dim().0,
            Structure::Sparse { dim, .. } => *dim,
        }
    }

    /// Entries of `[e_i, e_j]` as `(k, coefficient)`.
    fn pair(&self, i: usize, j: usize) -> Vec<(usize, f64)> {
        match self {
            Structure::Dense(c) => c
                .slice(s![i, j, ..])
                .indexed_iter()
                .filter(|(_, &v)| v.abs() > STRUCT_EPS)
                .map(|(k, &v)| (k, v))
                .collect(),
            Structure::Sparse { dim, table } => table[i * dim + j]
                .iter()
                .map(|&(k, v)| (k as usize, v))
                .collect(),
        }
    }

    fn entry(&self, i: usize, j: usize, k: usize) -> f64 {
        match self {
            Structure::Dense(c) => c[[i, j, k]],
            Structure::Sparse { dim, table } => table[i * dim + j]
                .iter()
                .find(|e| e.0 as usize == k)
                .map(|e| e.1)
                .unwrap_or(0.0),
        }
    }
}

/// A real Lie algebra presented by structure constants over a fixed basis.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    structure: Structure,
    pub labels: Option<Vec<String>>,
}

/// Result of a Jacobi-identity scan over basis triples.
#[derive(Debug, Clone, Copy)]
pub struct JacobiReport {
    pub max_violation: f64,
    pub pass: bool,
    /// number of triples inspected (full scan: dim^3)
    pub triples_checked: usize,
}

impl LieAlgebra {
    /// Build from structure-constant triplets `(i, j, k, c_ijk)`.
    ///
    /// Antisymmetry `c_ijk = -c_jik` is enforced exactly: entries are
    /// validated and the `i > j` half is mirrored from `i < j`.
    pub fn from_triplets(
        dim: usize,
        triplets: &[(usize, usize, usize, f64)],
    ) -> Result<Self> {
        for &(i, j, k, _) in triplets {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::DimensionMismatch(format!(
                    "triplet index out of range for dim {dim}: ({i},{j},{k})"
                )));
            }
        }
        let structure = Structure::from_triplets(dim, triplets);
        // antisymmetry check
        let mut max_asym = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                for (k, v) in structure.pair(i, j) {
                    let w = structure.entry(j, i, k);
                    max_asym = max_asym.max((v + w).abs());
                }
            }
        }
        if max_asym > 1e-12 {
            return Err(Error::Construction(format!(
                "structure constants not antisymmetric (max violation {max_asym:.3e})"
            )));
        }
        Ok(LieAlgebra {
            structure,
            labels: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    /// `[x, y]` for coordinate vectors `x`, `y`.
    pub fn bracket(&self, x: &ArrayView1<f64>, y: &ArrayView1<f64>) -> Result<Array1<f64>> {
        let d = self.dim();
        if x.len() != d || y.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "bracket expects vectors of length {d}, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        let mut out = Array1::zeros(d);
        match &self.structure {
            Structure::Dense(c) => {
                // out_k = sum_{i,j} x_i y_j c_ijk, evaluated as x^T (c · y)
                for i in 0..d {
                    let xi = x[i];
                    if xi == 0.0 {
                        continue;
                    }
                    for j in 0..d {
                        let f = xi * y[j];
                        if f == 0.0 {
                            continue;
                        }
                        out.scaled_add(f, &c.slice(s![i, j, ..]));
                    }
                }
            }
            Structure::Sparse { dim, table } => {
                for i in 0..*dim {
                    let xi = x[i];
                    if xi.abs() < STRUCT_EPS {
                        continue;
                    }
                    for j in 0..*dim {
                        let f = xi * y[j];
                        if f.abs() < STRUCT_EPS {
                            continue;
                        }
                        for &(k, v) in &table[i * dim + j] {
                            out[k as usize] += f * v;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `[e_i, e_j]` for basis indices.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<(usize, f64)> {
        self.structure.pair(i, j)
    }

    /// The matrix of `ad x` (columns: `ad x (e_j)`).
    pub fn ad(&self, x: &ArrayView1<f64>) -> Array2<f64> {
        let d = self.dim();
        let mut m = Array2::zeros((d, d));
        match &self.structure {
            Structure::Dense(c) => {
                for i in 0..d {
                    let xi = x[i];
                    if xi == 0.0 {
                        continue;
                    }
                    for j in 0..d {
                        for k in 0..d {
                            m[[k, j]] += xi * c[[i, j, k]];
                        }
                    }
                }
            }
            Structure::Sparse { dim, table } => {
                for i in 0..*dim {
                    let xi = x[i];
                    if xi.abs() < STRUCT_EPS {
                        continue;
                    }
                    for j in 0..*dim {
                        for &(k, v) in &table[i * dim + j] {
                            m[[k as usize, j]] += xi * v;
                        }
                    }
                }
            }
        }
        m
    }

    fn ad_basis(&self, i: usize) -> Array2<f64> {
        let d = self.dim();
        let mut m = Array2::zeros((d, d));
        for j in 0..d {
            for (k, v) in self.structure.pair(i, j) {
                m[[k, j]] += v;
            }
        }
        m
    }

    /// Killing form `kappa(x, y) = tr(ad x ad y)` on the basis.
    pub fn killing_form(&self) -> BilinearForm {
        let d = self.dim();
        // kappa_ab = vec(ad_a) . vec(ad_b^T); computed blockwise with GEMM
        let block = 64usize;
        let mut kappa = Array2::zeros((d, d));
        let ads: Vec<Array2<f64>> = (0..d).map(|i| self.ad_basis(i)).collect();
        let mut flat = Array2::zeros((d, d * d));
        let mut flat_t = Array2::zeros((d, d * d));
        for (i, adm) in ads.iter().enumerate() {
            for r in 0..d {
                for c in 0..d {
                    flat[[i, r * d + c]] = adm[[r, c]];
                    flat_t[[i, r * d + c]] = adm[[c, r]];
                }
            }
        }
        let mut row = 0usize;
        while row < d {
            let hi = (row + block).min(d);
            let prod = flat.slice(s![row..hi, ..]).dot(&flat_t.t());
            kappa.slice_mut(s![row..hi, ..]).assign(&prod);
            row = hi;
        }
        // symmetrize away roundoff
        let kt = kappa.t().to_owned();
        BilinearForm {
            matrix: (kappa + kt) * 0.5,
        }
    }

    /// Full Jacobi scan: max over basis triples `(i, j, k)` of
    /// `|[[e_i, e_j], e_k] + [[e_j, e_k], e_i] + [[e_k, e_i], e_j]|`
    /// (Euclidean norm of the coordinate residual).
    pub fn check_jacobi(&self, tol: f64) -> JacobiReport {
        let d = self.dim();
        let max_violation = (0..d)
            .into_par_iter()
            .map(|i| {
                let mut worst = 0.0f64;
                let mut resid = vec![0.0f64; d];
                for j in (i + 1)..d {
                    let cij = self.structure.pair(i, j);
                    for k in (j + 1)..d {
                        for r in resid.iter_mut() {
                            *r = 0.0;
                        }
                        for &(l, v) in &cij {
                            for (m, w) in self.structure.pair(l, k) {
                                resid[m] += v * w;
                            }
                        }
                        for (l, v) in self.structure.pair(j, k) {
                            for (m, w) in self.structure.pair(l, i) {
                                resid[m] += v * w;
                            }
                        }
                        for (l, v) in self.structure.pair(k, i) {
                            for (m, w) in self.structure.pair(l, j) {
                                resid[m] += v * w;
                            }
                        }
                        let norm2: f64 = resid.iter().map(|x| x * x).sum();
                        worst = worst.max(norm2);
                    }
                }
                worst
            })
            .reduce(|| 0.0f64, f64::max)
            .sqrt();
        JacobiReport {
            max_violation,
            pass: max_violation <= tol,
            triples_checked: d * (d - 1) * (d - 2) / 6,
        }
    }

    /// Max violation of `kappa([z,x],y) + kappa(x,[z,y]) = 0` over basis triples.
    pub fn killing_ad_invariance(&self, kappa: &BilinearForm) -> f64 {
        let d = self.dim();
        (0..d)
            .into_par_iter()
            .map(|z| {
                let mut worst = 0.0f64;
                for x in 0..d {
                    let zx = self.structure.pair(z, x);
                    for y in 0..d {
                        let mut s = 0.0;
                        for &(k, v) in &zx {
                            s += v * kappa.matrix[[k, y]];
                        }
                        for (k, v) in self.structure.pair(z, y) {
                            s += v * kappa.matrix[[x, k]];
                        }
                        worst = worst.max(s.abs());
                    }
                }
                worst
            })
            .reduce(|| 0.0f64, f64::max)
    }
}

/// Builds a Lie algebra from a list of real matrices that span it.
///
/// The span must be closed under commutators; each `[g_i, g_j]` is expanded
/// in the given basis by least squares and the expansion residual must stay
/// below `1e-9`, otherwise construction fails naming the offending pair.
pub fn matrix_algebra_from_generators(matrices: &[Array2<f64>]) -> Result<LieAlgebra> {
    let n = matrices
        .first()
        .ok_or_else(|| Error::Usage("empty generator list".into()))?
        .nrows();
    for m in matrices {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch(
                "generators must be square matrices of equal size".into(),
            ));
        }
    }
    let dim = matrices.len();
    // basis matrix: columns are vectorized generators
    let mut basis = Array2::zeros((n * n, dim));
    for (j, m) in matrices.iter().enumerate() {
        for r in 0..n {
            for c in 0..n {
                basis[[r * n + c, j]] = m[[r, c]];
            }
        }
    }
    let (rank, _) = linalg::rank_of_columns(&basis, 1e-10);
    if rank < dim {
        return Err(Error::Construction(format!(
            "generators are linearly dependent (rank {rank} < {dim})"
        )));
    }
    let mut triplets = Vec::new();
    for i in 0..dim {
        for j in (i + 1)..dim {
            let comm = matrices[i].dot(&matrices[j]) - matrices[j].dot(&matrices[i]);
            let mut rhs = Array1::zeros(n * n);
            for r in 0..n {
                for c in 0..n {
                    rhs[r * n + c] = comm[[r, c]];
                }
            }
            let (coeff, resid) = linalg::lstsq(&basis, &rhs);
            let scale = 1.0f64.max(linalg::max_abs(rhs.iter()));
            if resid > 1e-9 * scale {
                return Err(Error::Construction(format!(
                    "commutator of generators {i} and {j} leaves the span (residual {resid:.3e})"
                )));
            }
            for (k, &v) in coeff.iter().enumerate() {
                if v.abs() > 1e-11 {
                    triplets.push((i, j, k, v));
                    triplets.push((j, i, k, -v));
                }
            }
        }
    }
    LieAlgebra::from_triplets(dim, &triplets)
}

/// A symmetric bilinear form on a fixed basis.
#[derive(Debug, Clone)]
pub struct BilinearForm {
    pub matrix: Array2<f64>,
}

impl BilinearForm {
    pub fn eval(&self, x: &ArrayView1<f64>, y: &ArrayView1<f64>) -> f64 {
        x.dot(&self.matrix.dot(y))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let d = self.matrix.nrows();
        for i in 0..d {
            for j in (i + 1)..d {
                if (self.matrix[[i, j]] - self.matrix[[j, i]]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Largest eigenvalue; a compact simple Killing form must be negative
    /// definite, i.e. this is `< 0`.
    pub fn max_eigenvalue(&self) -> f64 {
        let (vals, _) = linalg::eigh(&self.matrix);
        vals[vals.len() - 1]
    }
}

/// A subspace of a Lie algebra, stored as coordinate vectors in the parent
/// basis (columns of `basis`).
#[derive(Debug, Clone)]
pub struct Subspace {
    pub basis: Array2<f64>,
}

impl Subspace {
    pub fn new(parent_dim: usize, basis: Array2<f64>) -> Result<Self> {
        if basis.nrows() != parent_dim {
            return Err(Error::DimensionMismatch(format!(
                "subspace vectors have length {}, parent dim {parent_dim}",
                basis.nrows()
            )));
        }
        let (rank, _) = linalg::rank_of_columns(&basis, 1e-10);
        if rank != basis.ncols() {
            return Err(Error::Construction(format!(
                "subspace basis is dependent (rank {rank} of {})",
                basis.ncols()
            )));
        }
        Ok(Subspace { basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// so(k) in the elementary antisymmetric basis e_{ab} = E_ab - E_ba, a < b.
    pub fn so_k_matrices(k: usize) -> Vec<Array2<f64>> {
        let mut out = Vec::new();
        for a in 0..k {
            for b in (a + 1)..k {
                let mut m = Array2::zeros((k, k));
                m[[a, b]] = 1.0;
                m[[b, a]] = -1.0;
                out.push(m);
            }
        }
        out
    }

    #[test]
    fn su2_from_realified_matrices() {
        // xi_1 = diag(i, -i), xi_2 = [[0,-1],[1,0]], xi_3 = [[0,-i],[-i,0]]
        // realified: complex entry a+bi -> [[a,-b],[b,a]] blocks
        let realify = |m: &[[(f64, f64); 2]; 2]| {
            let mut r = Array2::zeros((4, 4));
            for i in 0..2 {
                for j in 0..2 {
                    let (a, b) = m[i][j];
                    r[[2 * i, 2 * j]] = a;
                    r[[2 * i, 2 * j + 1]] = -b;
                    r[[2 * i + 1, 2 * j]] = b;
                    r[[2 * i + 1, 2 * j + 1]] = a;
                }
            }
            r
        };
        let xi1 = realify(&[[(0.0, 1.0), (0.0, 0.0)], [(0.0, 0.0), (0.0, -1.0)]]);
        let xi2 = realify(&[[(0.0, 0.0), (-1.0, 0.0)], [(1.0, 0.0), (0.0, 0.0)]]);
        let xi3 = realify(&[[(0.0, 0.0), (0.0, -1.0)], [(0.0, -1.0), (0.0, 0.0)]]);
        let alg = matrix_algebra_from_generators(&[xi1, xi2, xi3]).unwrap();
        assert_eq!(alg.dim(), 3);
        // [xi_1, xi_2] = 2 xi_3 and cyclic
        let b12 = alg
            .bracket(&array![1.0, 0.0, 0.0].view(), &array![0.0, 1.0, 0.0].view())
            .unwrap();
        assert!(linalg::max_abs((&b12 - &array![0.0, 0.0, 2.0]).iter()) < 1e-12);
        let b23 = alg
            .bracket(&array![0.0, 1.0, 0.0].view(), &array![0.0, 0.0, 1.0].view())
            .unwrap();
        assert!(linalg::max_abs((&b23 - &array![2.0, 0.0, 0.0]).iter()) < 1e-12);
        assert!(alg.check_jacobi(1e-9).pass);
    }

    #[test]
    fn bracket_of_vector_with_itself_vanishes() {
        let alg = matrix_algebra_from_generators(&so_k_matrices(4)).unwrap();
        let x = Array1::from_shape_fn(alg.dim(), |i| (i as f64 * 0.37).sin());
        let b = alg.bracket(&x.view(), &x.view()).unwrap();
        assert!(linalg::max_abs(b.iter()) < 1e-12);
    }

    #[test]
    fn so7_bracket_matches_matrix_commutator_oracle() {
        // oracle: the explicit matrix commutator of e_12 and e_23 in so(7),
        // elementary antisymmetric basis e_{ab} = E_ab - E_ba (1-based labels)
        let k = 7;
        let mats = so_k_matrices(k);
        let alg = matrix_algebra_from_generators(&mats).unwrap();
        // index of e_{ab} (a<b, 0-based) in the flat listing
        let idx = |a: usize, b: usize| -> usize {
            let mut t = 0;
            for r in 0..a {
                t += k - r - 1;
            }
            t + (b - a - 1)
        };
        let e12 = idx(0, 1);
        let e23 = idx(1, 2);
        // oracle computed with the raw matrices
        let oracle = mats[e12].dot(&mats[e23]) - mats[e23].dot(&mats[e12]);
        let expected = &mats[idx(0, 2)]; // + e_13
        assert!(linalg::max_abs((&oracle - expected).iter()) < 1e-15);
        // library bracket agrees with the oracle
        let mut x = Array1::zeros(alg.dim());
        let mut y = Array1::zeros(alg.dim());
        x[e12] = 1.0;
        y[e23] = 1.0;
        let b = alg.bracket(&x.view(), &y.view()).unwrap();
        let mut want = Array1::zeros(alg.dim());
        want[idx(0, 2)] = 1.0;
        assert!(linalg::max_abs((&b - &want).iter()) < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_a_usage_error() {
        let alg = matrix_algebra_from_generators(&so_k_matrices(4)).unwrap();
        let bad = alg.bracket(&array![1.0, 0.0].view(), &Array1::zeros(alg.dim()).view());
        assert!(bad.is_err());
    }

    #[test]
    fn killing_form_of_abelian_algebra_vanishes() {
        // 1-dimensional abelian algebra from a single nonzero matrix
        let m = array![[0.0, 1.0], [0.0, 0.0]];
        let alg = matrix_algebra_from_generators(&[m]).unwrap();
        assert_eq!(alg.dim(), 1);
        let kappa = alg.killing_form();
        assert!(linalg::max_abs(kappa.matrix.iter()) < 1e-15);
    }

    #[test]
    fn so_dimensions_match() {
        for k in [5usize, 7, 8] {
            let alg = matrix_algebra_from_generators(&so_k_matrices(k)).unwrap();
            assert_eq!(alg.dim(), k * (k - 1) / 2);
            let kappa = alg.killing_form();
            assert!(kappa.is_symmetric(1e-12));
            assert!(kappa.max_eigenvalue() < 0.0, "so({k}) Killing form definite");
            assert!(alg.killing_ad_invariance(&kappa) < 1e-9);
        }
    }

    #[test]
    fn corrupted_structure_constants_fail_jacobi() {
        let alg = matrix_algebra_from_generators(&so_k_matrices(4)).unwrap();
        let d = alg.dim();
        let mut triplets = Vec::new();
        for i in 0..d {
            for j in 0..d {
                for (k, v) in alg.bracket_basis(i, j) {
                    triplets.push((i, j, k, v));
                }
            }
        }
        // perturb one entry (and its antisymmetric partner) by 0.1
        triplets.push((0, 1, 2, 0.1));
        triplets.push((1, 0, 2, -0.1));
        let bad = LieAlgebra::from_triplets(d, &triplets).unwrap();
        let report = bad.check_jacobi(1e-9);
        assert!(!report.pass);
        assert!(report.max_violation > 1e-3);
    }

    #[test]
    fn generators_leaving_span_are_rejected() {
        // two elementary antisymmetric generators of so(3) without the third:
        // their commutator leaves the span
        let mats = so_k_matrices(3);
        let err = matrix_algebra_from_generators(&[mats[0].clone(), mats[1].clone()]);
        assert!(err.is_err());
    }
}
