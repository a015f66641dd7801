//! Real composition algebras: R, C, H (quaternions) and O (octonions).

use crate::linalg;
use ndarray::prelude::*;

/// A composition algebra with an orthonormal basis `{1, e_1, ..}` for its
/// norm form. The multiplication table holds exact small integers.
#[derive(Debug, Clone)]
pub struct CompositionAlgebra {
    pub dim: usize,
    /// `e_i e_j = sum_k table[i][j][k] e_k`
    pub table: Array3<f64>,
}

impl CompositionAlgebra {
    pub fn reals() -> Self {
        let mut table = Array3::zeros((1, 1, 1));
        table[[0, 0, 0]] = 1.0;
        CompositionAlgebra { dim: 1, table }
    }

    pub fn complexes() -> Self {
        let mut t = Array3::zeros((2, 2, 2));
        t[[0, 0, 0]] = 1.0;
        t[[0, 1, 1]] = 1.0;
        t[[1, 0, 1]] = 1.0;
        t[[1, 1, 0]] = -1.0;
        CompositionAlgebra { dim: 2, table: t }
    }

    /// Quaternions in the basis `{1, j1, j2, j3}` with `j_i j_j = eps_ijk j_k`.
    pub fn quaternions() -> Self {
        let mut t = Array3::zeros((4, 4, 4));
        t[[0, 0, 0]] = 1.0;
        for i in 1..4 {
            t[[0, i, i]] = 1.0;
            t[[i, 0, i]] = 1.0;
            t[[i, i, 0]] = -1.0;
        }
        let eps = [(1usize, 2usize, 3usize, 1.0f64), (2, 3, 1, 1.0), (3, 1, 2, 1.0)];
        for &(i, j, k, s) in &eps {
            t[[i, j, k]] = s;
            t[[j, i, k]] = -s;
        }
        CompositionAlgebra { dim: 4, table: t }
    }

    /// Octonions via Cayley-Dickson doubling of the quaternions:
    /// basis `{1, i, j, k, l, il, jl, kl}` and
    /// `(a + b l)(c + d l) = (ac - conj(d) b) + (d a + b conj(c)) l`.
    pub fn octonions() -> Self {
        let q = Self::quaternions();
        let mut t = Array3::zeros((8, 8, 8));
        // octonion basis index: low 0..4 = quaternion part, high 4..8 = (.)l
        for i in 0..8 {
            for j in 0..8 {
                let (a, bl) = (i % 4, i / 4); // e_i = a-part or (a)l
                let (c, dl) = (j % 4, j / 4);
                // components: x = (a? , b?), y = (c?, d?) with at most one
                // nonzero quaternion coordinate each
                let mut first = Array1::<f64>::zeros(4); // quaternion part of product
                let mut second = Array1::<f64>::zeros(4); // l part
                let qmul = |u: usize, v: usize| -> Array1<f64> {
                    q.table.slice(s![u, v, ..]).to_owned()
                };
                let conj_idx = |u: usize, vec: &mut Array1<f64>| {
                    if u != 0 {
                        vec.mapv_inplace(|x| -x);
                    }
                };
                match (bl, dl) {
                    (0, 0) => {
                        first = qmul(a, c);
                    }
                    (0, 1) => {
                        // a * (d l) = (d a) l
                        second = qmul(c, a);
                    }
                    (1, 0) => {
                        // (b l) * c = (b conj(c)) l
                        let mut prod = qmul(a, c);
                        conj_idx(c, &mut prod);
                        second = prod;
                    }
                    (1, 1) => {
                        // (b l)(d l) = -conj(d) b
                        let mut prod = qmul(c, a);
                        conj_idx(c, &mut prod);
                        first = -prod;
                    }
                    _ => unreachable!(),
                }
                for k in 0..4 {
                    t[[i, j, k]] = first[k];
                    t[[i, j, k + 4]] = second[k];
                }
            }
        }
        CompositionAlgebra { dim: 8, table: t }
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

    /// Conjugation `a -> t(a) 1 - a`.
    pub fn conj(&self, x: &ArrayView1<f64>) -> Array1<f64> {
        let mut out = x.mapv(|v| -v);
        out[0] = x[0];
        out
    }

    /// Trace `t(a) = a + conj(a) = 2 a_0`.
    pub fn trace(&self, x: &ArrayView1<f64>) -> f64 {
        2.0 * x[0]
    }

    /// Norm `n(a)`; the basis is orthonormal for it.
    pub fn norm(&self, x: &ArrayView1<f64>) -> f64 {
        x.dot(x)
    }

    /// Left multiplication operator `l_a`.
    pub fn left_mul(&self, a: &ArrayView1<f64>) -> Array2<f64> {
        let d = self.dim;
        let mut m = Array2::zeros((d, d));
        for j in 0..d {
            let mut e = Array1::zeros(d);
            e[j] = 1.0;
            m.column_mut(j).assign(&self.mul(a, &e.view()));
        }
        m
    }

    /// Right multiplication operator `r_a`.
    pub fn right_mul(&self, a: &ArrayView1<f64>) -> Array2<f64> {
        let d = self.dim;
        let mut m = Array2::zeros((d, d));
        for j in 0..d {
            let mut e = Array1::zeros(d);
            e[j] = 1.0;
            m.column_mut(j).assign(&self.mul(&e.view(), a));
        }
        m
    }

    /// The standard derivation `D_{a,b} = [l_a,l_b] + [l_a,r_b] + [r_a,r_b]`.
    pub fn derivation(&self, a: &ArrayView1<f64>, b: &ArrayView1<f64>) -> Array2<f64> {
        let la = self.left_mul(a);
        let lb = self.left_mul(b);
        let ra = self.right_mul(a);
        let rb = self.right_mul(b);
        let comm = |x: &Array2<f64>, y: &Array2<f64>| x.dot(y) - y.dot(x);
        comm(&la, &lb) + comm(&la, &rb) + comm(&ra, &rb)
    }

    /// Leibniz residual `max |D(xy) - D(x)y - x D(y)|` over basis pairs.
    pub fn leibniz_residual(&self, dmat: &Array2<f64>) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut ei = Array1::zeros(d);
                ei[i] = 1.0;
                let mut ej = Array1::zeros(d);
                ej[j] = 1.0;
                let lhs = dmat.dot(&self.mul(&ei.view(), &ej.view()));
                let rhs = self.mul(&dmat.dot(&ei).view(), &ej.view())
                    + self.mul(&ei.view(), &dmat.dot(&ej).view());
                worst = worst.max(linalg::max_abs((&lhs - &rhs).iter()));
            }
        }
        worst
    }

    /// A maximal independent set of `D_{e_a, e_b}` (a < b over imaginary
    /// units), returned as matrices. For the octonions this spans the
    /// 14-dimensional derivation algebra.
    pub fn derivation_basis(&self) -> Vec<Array2<f64>> {
        let d = self.dim;
        let mut cands = Vec::new();
        for a in 1..d {
            for b in (a + 1)..d {
                let mut ea = Array1::zeros(d);
                ea[a] = 1.0;
                let mut eb = Array1::zeros(d);
                eb[b] = 1.0;
                cands.push(self.derivation(&ea.view(), &eb.view()));
            }
        }
        select_independent(&cands, d)
    }
}

/// Greedy selection of a maximal linearly independent subset of matrices,
/// keeping the original (exact) entries of the selected ones.
pub fn select_independent(cands: &[Array2<f64>], n: usize) -> Vec<Array2<f64>> {
    let mut picked: Vec<Array2<f64>> = Vec::new();
    let mut ortho: Vec<Array1<f64>> = Vec::new(); // orthonormalized copies
    for c in cands {
        let mut v = Array1::zeros(n * n);
        for r in 0..n {
            for cc in 0..n {
                v[r * n + cc] = c[[r, cc]];
            }
        }
        let orig = v.dot(&v).sqrt();
        if orig < 1e-12 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &ortho {
                let coef = q.dot(&w);
                w.scaled_add(-coef, q);
            }
        }
        let norm = w.dot(&w).sqrt();
        if norm > 1e-9 * orig {
            picked.push(c.clone());
            ortho.push(w.mapv(|x| x / norm));
        }
    }
    picked
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn basis_vec(d: usize, i: usize) -> Array1<f64> {
        let mut e = Array1::zeros(d);
        e[i] = 1.0;
        e
    }

    #[test]
    fn quaternion_units_multiply_cyclically() {
        let h = CompositionAlgebra::quaternions();
        // j1 j2 = j3
        let p = h.mul(&basis_vec(4, 1).view(), &basis_vec(4, 2).view());
        assert!(linalg::max_abs((&p - &basis_vec(4, 3)).iter()) < 1e-15);
        // j_i^2 = -1
        for i in 1..4 {
            let sq = h.mul(&basis_vec(4, i).view(), &basis_vec(4, i).view());
            assert!((sq[0] + 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn octonion_doubling_rules() {
        let o = CompositionAlgebra::octonions();
        // l * l = -1  (from (q1 l)(q2 l) = -conj(q2) q1 with q1 = q2 = 1)
        let l = basis_vec(8, 4);
        let sq = o.mul(&l.view(), &l.view());
        assert!((sq[0] + 1.0).abs() < 1e-15);
        assert!(linalg::max_abs(sq.slice(s![1..]).iter()) < 1e-15);
        // q1 (q2 l) = (q2 q1) l with q1 = i (index 1), q2 = j (index 2):
        // i (j l) = (j i) l = -(k) l = -e7
        let jl = basis_vec(8, 6);
        let p = o.mul(&basis_vec(8, 1).view(), &jl.view());
        let mut want = Array1::zeros(8);
        want[7] = -1.0;
        assert!(linalg::max_abs((&p - &want).iter()) < 1e-15);
    }

    #[test]
    fn norm_is_multiplicative_on_random_integer_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for alg in [
            CompositionAlgebra::quaternions(),
            CompositionAlgebra::octonions(),
        ] {
            for _ in 0..50 {
                let x = Array1::from_shape_fn(alg.dim, |_| rng.gen_range(-3i32..=3) as f64);
                let y = Array1::from_shape_fn(alg.dim, |_| rng.gen_range(-3i32..=3) as f64);
                let n_prod = alg.norm(&alg.mul(&x.view(), &y.view()).view());
                let prod_n = alg.norm(&x.view()) * alg.norm(&y.view());
                assert!(
                    (n_prod - prod_n).abs() < 1e-9,
                    "norm not multiplicative: {n_prod} vs {prod_n}"
                );
            }
        }
    }

    #[test]
    fn quadratic_equation_holds_on_basis() {
        for alg in [
            CompositionAlgebra::complexes(),
            CompositionAlgebra::quaternions(),
            CompositionAlgebra::octonions(),
        ] {
            for i in 0..alg.dim {
                let a = basis_vec(alg.dim, i);
                let sq = alg.mul(&a.view(), &a.view());
                let mut resid = sq - &a * alg.trace(&a.view());
                resid[0] += alg.norm(&a.view());
                assert!(linalg::max_abs(resid.iter()) < 1e-15);
            }
        }
    }

    #[test]
    fn derivations_satisfy_standard_identities() {
        let o = CompositionAlgebra::octonions();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let a = Array1::from_shape_fn(8, |_| rng.gen_range(-2i32..=2) as f64);
            let b = Array1::from_shape_fn(8, |_| rng.gen_range(-2i32..=2) as f64);
            let c = Array1::from_shape_fn(8, |_| rng.gen_range(-2i32..=2) as f64);
            // antisymmetry (so D_{a,a} = 0)
            let dab = o.derivation(&a.view(), &b.view());
            let dba = o.derivation(&b.view(), &a.view());
            assert!(linalg::max_abs((&dab + &dba).iter()) < 1e-12);
            // Leibniz
            assert!(o.leibniz_residual(&dab) < 1e-12);
            // cyclic identity D_{ab,c} + D_{bc,a} + D_{ca,b} = 0
            let ab = o.mul(&a.view(), &b.view());
            let bc = o.mul(&b.view(), &c.view());
            let ca = o.mul(&c.view(), &a.view());
            let cyc = o.derivation(&ab.view(), &c.view())
                + o.derivation(&bc.view(), &a.view())
                + o.derivation(&ca.view(), &b.view());
            assert!(linalg::max_abs(cyc.iter()) < 1e-12);
        }
        let daa = o.derivation(&a_fixed().view(), &a_fixed().view());
        assert!(linalg::max_abs(daa.iter()) < 1e-15);
    }

    fn a_fixed() -> Array1<f64> {
        array![0.0, 1.0, -2.0, 0.0, 3.0, 0.0, 1.0, 1.0]
    }

    #[test]
    fn derivation_spans_have_expected_ranks() {
        let o = CompositionAlgebra::octonions();
        assert_eq!(o.derivation_basis().len(), 14, "Der(O) = g2 has dim 14");
        let h = CompositionAlgebra::quaternions();
        assert_eq!(h.derivation_basis().len(), 3, "Der(H) = sp(1) has dim 3");
    }
}
