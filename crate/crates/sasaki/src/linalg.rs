//! Dense linear algebra helpers on top of BLAS/LAPACK.

use ndarray::prelude::*;
use rand::Rng;
use std::os::raw::c_char;

unsafe extern "C" {
    fn dsyevd_(
        jobz: *const c_char,
        uplo: *const c_char,
        n: *const i32,
        a: *mut f64,
        lda: *const i32,
        w: *mut f64,
        work: *mut f64,
        lwork: *const i32,
        iwork: *mut i32,
        liwork: *const i32,
        info: *mut i32,
    );
}

/// Symmetric eigendecomposition (ascending eigenvalues) via LAPACK `dsyevd`.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as columns.
pub fn eigh(a: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigh expects a square matrix");
    if n == 0 {
        return (Array1::zeros(0), Array2::zeros((0, 0)));
    }
    // column-major buffer
    let mut amat: Vec<f64> = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            amat.push(a[[i, j]]);
        }
    }
    let mut w = vec![0.0f64; n];
    let mut info = 0i32;
    let jobz = b'V' as c_char;
    let uplo = b'L' as c_char;
    let nn = n as i32;
    let mut lwork = -1i32;
    let mut liwork = -1i32;
    let mut wq = [0.0f64];
    let mut iwq = [0i32];
    unsafe {
        dsyevd_(
            &jobz,
            &uplo,
            &nn,
            amat.as_mut_ptr(),
            &nn,
            w.as_mut_ptr(),
            wq.as_mut_ptr(),
            &lwork,
            iwq.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    assert_eq!(info, 0, "dsyevd workspace query failed: info={info}");
    lwork = wq[0] as i32;
    liwork = iwq[0];
    let mut work = vec![0.0f64; lwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        dsyevd_(
            &jobz,
            &uplo,
            &nn,
            amat.as_mut_ptr(),
            &nn,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    assert_eq!(info, 0, "dsyevd failed: info={info}");
    let vecs = Array2::from_shape_fn((n, n), |(i, j)| amat[j * n + i]);
    (Array1::from(w), vecs)
}

/// Frobenius norm.
pub fn fro_norm(a: &ArrayView2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Max-abs entry of any array view.
pub fn max_abs<'a, I: IntoIterator<Item = &'a f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

/// Modified Gram-Schmidt with one reorthogonalization pass.
///
/// Columns of `v` are orthonormalized in place; returns the number of
/// independent columns kept (columns with residual norm below `drop_tol`
/// relative to their original norm are dropped).
pub fn orthonormalize_columns(v: &mut Array2<f64>, drop_tol: f64) -> usize {
    let (_n, k) = v.dim();
    let mut kept = 0usize;
    for j in 0..k {
        let col = v.column(j).to_owned();
        let orig = col.dot(&col).sqrt();
        let mut w = col;
        for _pass in 0..2 {
            for i in 0..kept {
                let q = v.column(i);
                let c = q.dot(&w);
                w.scaled_add(-c, &q);
            }
        }
        let norm = w.dot(&w).sqrt();
        if norm > drop_tol * orig.max(1e-300) && norm > 0.0 {
            w.mapv_inplace(|x| x / norm);
            v.column_mut(kept).assign(&w);
            kept += 1;
        }
    }
    if kept < k {
        // zero out the dropped tail so callers can slice
        for j in kept..k {
            v.column_mut(j).fill(0.0);
        }
    }
    kept
}

/// Orthonormalize `vectors` (columns) with respect to the inner product
/// given by the symmetric positive definite `gram` callback
/// `ip(x, y) -> <x, y>`.
pub fn orthonormalize_with<F>(vectors: &mut Array2<f64>, ip: F)
where
    F: Fn(&ArrayView1<f64>, &ArrayView1<f64>) -> f64,
{
    let k = vectors.ncols();
    for j in 0..k {
        for _pass in 0..2 {
            for i in 0..j {
                let c = ip(&vectors.column(i), &vectors.column(j));
                let qi = vectors.column(i).to_owned();
                vectors.column_mut(j).scaled_add(-c, &qi);
            }
        }
        let norm = ip(&vectors.column(j), &vectors.column(j)).sqrt();
        assert!(
            norm > 1e-12,
            "orthonormalize_with: degenerate vector (norm {norm:.3e}) at column {j}"
        );
        vectors.column_mut(j).mapv_inplace(|x| x / norm);
    }
}

/// Least-squares solution of `a x = b` via normal equations and `eigh`.
///
/// Suitable for the well-conditioned small systems that arise when
/// expressing vectors in explicitly constructed bases. Returns
/// `(solution, residual_norm)`.
pub fn lstsq(a: &Array2<f64>, b: &Array1<f64>) -> (Array1<f64>, f64) {
    let ata = a.t().dot(a);
    let atb = a.t().dot(b);
    let (vals, vecs) = eigh(&ata);
    let vmax = vals.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = vmax * 1e-13;
    let mut x = Array1::zeros(a.ncols());
    for (idx, &lam) in vals.iter().enumerate() {
        if lam > cutoff {
            let u = vecs.column(idx);
            let c = u.dot(&atb) / lam;
            x.scaled_add(c, &u);
        }
    }
    let r = a.dot(&x) - b;
    (x, r.dot(&r).sqrt())
}

/// Least squares for many right-hand sides (columns of `b`).
pub fn lstsq_multi(a: &Array2<f64>, b: &Array2<f64>) -> (Array2<f64>, f64) {
    let ata = a.t().dot(a);
    let atb = a.t().dot(b);
    let (vals, vecs) = eigh(&ata);
    let vmax = vals.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = vmax * 1e-13;
    let mut inv = Array2::zeros(ata.dim());
    for (idx, &lam) in vals.iter().enumerate() {
        if lam > cutoff {
            let u = vecs.column(idx).insert_axis(Axis(1));
            inv = inv + &u.dot(&u.t()).mapv(|x| x / lam);
        }
    }
    let x = inv.dot(&atb);
    let r = a.dot(&x) - b;
    let rn = fro_norm(&r.view());
    (x, rn)
}

/// Numerical rank of a set of vectors (columns), with the relative singular
/// value threshold `rel_tol * sigma_max`. Returns `(rank, gap)` where `gap`
/// is `smallest kept singular value / largest dropped` (`None` if nothing
/// was dropped).
pub fn rank_of_columns(v: &Array2<f64>, rel_tol: f64) -> (usize, Option<f64>) {
    let gram = v.t().dot(v);
    let (vals, _) = eigh(&gram);
    let sig: Vec<f64> = vals.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let smax = sig.iter().cloned().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return (0, None);
    }
    let thresh = rel_tol * smax;
    let rank = sig.iter().filter(|&&s| s > thresh).count();
    let kept_min = sig
        .iter()
        .filter(|&&s| s > thresh)
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let dropped_max = sig
        .iter()
        .filter(|&&s| s <= thresh)
        .cloned()
        .fold(0.0f64, f64::max);
    let gap = if rank < sig.len() && dropped_max > 0.0 {
        Some(kept_min / dropped_max)
    } else if rank < sig.len() {
        None // dropped values are exactly zero
    } else {
        None
    };
    (rank, gap)
}

/// Haar-like random orthogonal matrix from QR of a Gaussian sample.
pub fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> Array2<f64> {
    use rand::distributions::Distribution;
    let normal = rand_distr_standard_normal();
    let mut m = Array2::from_shape_fn((n, n), |_| normal.sample(rng));
    let kept = orthonormalize_columns(&mut m, 1e-10);
    assert_eq!(kept, n, "random matrix was singular");
    m
}

/// Haar-random rotation in SO(3).
pub fn random_so3<R: Rng>(rng: &mut R) -> Array2<f64> {
    let mut q = random_orthogonal(3, rng);
    if det3(&q) < 0.0 {
        // flip one column to land in SO(3)
        for i in 0..3 {
            q[[i, 2]] = -q[[i, 2]];
        }
    }
    q
}

pub fn det3(m: &Array2<f64>) -> f64 {
    m[[0, 0]] * (m[[1, 1]] * m[[2, 2]] - m[[1, 2]] * m[[2, 1]])
        - m[[0, 1]] * (m[[1, 0]] * m[[2, 2]] - m[[1, 2]] * m[[2, 0]])
        + m[[0, 2]] * (m[[1, 0]] * m[[2, 1]] - m[[1, 1]] * m[[2, 0]])
}

// Small standard-normal sampler (Box-Muller free: use rand's StandardNormal
// equivalent built from two uniforms to avoid the rand_distr dependency).
struct StdNormal;

impl rand::distributions::Distribution<f64> for StdNormal {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let u: f64 = rng.gen_range(-1.0..1.0);
            let v: f64 = rng.gen_range(-1.0..1.0);
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                return u * (-2.0 * s.ln() / s).sqrt();
            }
        }
    }
}

fn rand_distr_standard_normal() -> impl rand::distributions::Distribution<f64> {
    StdNormal
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigh_recovers_spectrum() {
        let a = array![[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]];
        let (vals, vecs) = eigh(&a);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        assert!((vals[2] - 5.0).abs() < 1e-12);
        // residual of each eigenpair
        for k in 0..3 {
            let v = vecs.column(k).to_owned();
            let r = a.dot(&v) - &(v.clone() * vals[k]);
            assert!(max_abs(r.iter()) < 1e-12);
        }
    }

    #[test]
    fn orthonormalization_drops_dependent_columns() {
        let mut v = array![[1.0, 2.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]];
        let kept = orthonormalize_columns(&mut v, 1e-10);
        assert_eq!(kept, 2);
    }

    #[test]
    fn lstsq_exact_system() {
        let a = array![[1.0, 0.0], [1.0, 1.0], [0.0, 2.0]];
        let b = array![1.0, 3.0, 4.0];
        let (x, r) = lstsq(&a, &b);
        assert!((x[0] - 1.0).abs() < 1e-10);
        assert!((x[1] - 2.0).abs() < 1e-10);
        assert!(r < 1e-10);
    }

    #[test]
    fn random_so3_is_special_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let q = random_so3(&mut rng);
            let qtq = q.t().dot(&q);
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((qtq[[i, j]] - want).abs() < 1e-12);
                }
            }
            assert!((det3(&q) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_reports_clean_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = random_orthogonal(6, &mut rng);
        // 4 independent columns + 2 dependent combinations
        let mut v = Array2::zeros((6, 6));
        for j in 0..4 {
            v.column_mut(j).assign(&q.column(j));
        }
        let dep = q.column(0).to_owned() + q.column(1).to_owned();
        v.column_mut(4).assign(&dep);
        v.column_mut(5).assign(&q.column(3).to_owned());
        let (rank, _gap) = rank_of_columns(&v, 1e-7);
        assert_eq!(rank, 4);
    }
}
