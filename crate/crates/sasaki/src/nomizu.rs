//! Invariant-connection calculus at the origin: a bilinear map `alpha` on
//! `m` determines torsion, curvature, Ricci and covariant derivatives of
//! every invariant tensor through algebraic contractions.

use crate::linalg;
use crate::zoo::PairCore;
use crate::{Error, Result};
use ndarray::prelude::*;

/// A bilinear map `alpha(e_i, e_j) = sum_k a[[i,j,k]] e_k` that commutes
/// with the isotropy action (the condition that makes it correspond to an
/// invariant connection).
#[derive(Debug, Clone)]
pub struct AlphaMap {
    pub a: Array3<f64>,
}

impl AlphaMap {
    /// Validates equivariance; non-equivariant input is rejected rather than
    /// silently projected.
    pub fn new(core: &PairCore, a: Array3<f64>) -> Result<AlphaMap> {
        let resid = equivariance_residual(core, &a);
        if resid > 1e-9 {
            return Err(Error::Construction(format!(
                "bilinear map is not equivariant (residual {resid:.3e})"
            )));
        }
        Ok(AlphaMap { a })
    }

    pub fn dim(&self) -> usize {
        self.a.dim().0
    }
}

/// Max residual of `[A, alpha(X,Y)] - alpha([A,X],Y) - alpha(X,[A,Y])`
/// over isotropy generators and basis pairs.
pub fn equivariance_residual(core: &PairCore, a: &Array3<f64>) -> f64 {
    let d = core.dim_m;
    let a_flat_ij = a.to_shape((d * d, d)).unwrap();
    let a_flat_i = a.to_shape((d, d * d)).unwrap();
    let mut worst = 0.0f64;
    for g in &core.had {
        // [A, alpha(X,Y)]: contract output slot with G
        let term3 = a_flat_ij.dot(&g.t()); // (ij, k)
        // alpha([A,X],Y): contract first slot
        let term1 = g.t().dot(&a_flat_i); // (p -> i), (jk)
        // alpha(X,[A,Y]): contract middle slot
        let mut resid = term3.into_owned().into_shape_with_order((d, d, d)).unwrap();
        let term1 = term1.into_shape_with_order((d, d, d)).unwrap();
        resid -= &term1;
        let gt = g.t();
        for i in 0..d {
            let ai = a.slice(s![i, .., ..]);
            let t2 = gt.dot(&ai);
            let mut ri = resid.slice_mut(s![i, .., ..]);
            ri -= &t2;
        }
        worst = worst.max(linalg::max_abs(resid.iter()));
    }
    worst
}

/// The Levi-Civita multiplication: zero on vertical x horizontal, half the
/// projected bracket on equal types, full bracket on horizontal x vertical.
pub fn levi_civita(core: &PairCore) -> Result<AlphaMap> {
    let d = core.dim_m;
    let mut a = Array3::zeros((d, d, d));
    let nv = 3.min(d); // toy cores may have no Reeb structure
    for i in 0..d {
        for j in 0..d {
            let factor = match (i < nv, j < nv) {
                (true, false) => 0.0,
                (false, true) => 1.0,
                _ => 0.5,
            };
            if factor != 0.0 {
                for k in 0..d {
                    a[[i, j, k]] = factor * core.mbra[[i, j, k]];
                }
            }
        }
    }
    AlphaMap::new(core, a)
}

/// Torsion `T(X,Y) = alpha(X,Y) - alpha(Y,X) - [X,Y]_m`, stored `[x,y,out]`.
pub fn torsion(core: &PairCore, alpha: &AlphaMap) -> Array3<f64> {
    let d = core.dim_m;
    let mut t = alpha.a.clone();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                t[[i, j, k]] -= alpha.a[[j, i, k]] + core.mbra[[i, j, k]];
            }
        }
    }
    t
}

/// Curvature `R(X,Y)Z`, stored `[x, y, z, out]`.
pub fn curvature(core: &PairCore, alpha: &AlphaMap) -> Array4<f64> {
    let d = core.dim_m;
    let a = &alpha.a;
    let a_jk_p = a.to_shape((d * d, d)).unwrap();
    // a_perm[p, i, l] = a[i, p, l]
    let a_perm = a
        .view()
        .permuted_axes([1, 0, 2])
        .as_standard_layout()
        .into_owned();
    let a_perm_flat = a_perm.to_shape((d, d * d)).unwrap();
    // R1'[(j,k),(i,l)] = sum_p a[j,k,p] a[i,p,l]
    let r1 = a_jk_p.dot(&a_perm_flat);
    let r1 = r1.into_shape_with_order((d, d, d, d)).unwrap(); // (j,k,i,l)
    let r1 = r1.permuted_axes([2, 0, 1, 3]); // (i,j,k,l)

    // R3[(i,j),(k,l)] = sum_p mbra[i,j,p] a[p,k,l]
    let mbra_flat = core.mbra.to_shape((d * d, d)).unwrap();
    let a_flat = a.to_shape((d, d * d)).unwrap();
    let r3 = mbra_flat.dot(&a_flat);
    let r3 = r3.into_shape_with_order((d, d, d, d)).unwrap();

    // R4[(i,j),(k,l)] = sum_A hcoef[i,j,A] had_A[l,k]
    let nh = core.had.len();
    let mut r4 = Array4::zeros((d, d, d, d));
    if nh > 0 {
        let mut hmat = Array2::zeros((nh, d * d));
        for (aa, g) in core.had.iter().enumerate() {
            for k in 0..d {
                for l in 0..d {
                    hmat[[aa, k * d + l]] = g[[l, k]];
                }
            }
        }
        let hcoef_flat = core.hcoef.to_shape((d * d, nh)).unwrap();
        let r4m = hcoef_flat.dot(&hmat);
        r4 = r4m.into_shape_with_order((d, d, d, d)).unwrap();
    }

    let mut r = Array4::zeros((d, d, d, d));
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    r[[i, j, k, l]] =
                        r1[[i, j, k, l]] - r1[[j, i, k, l] ] - r3[[i, j, k, l]] - r4[[i, j, k, l]];
                }
            }
        }
    }
    r
}

/// Ricci tensor `Ric(X,Y) = sum_i g(R(e_i, X) Y, e_i)` (orthonormal basis).
/// The sign convention is pinned by `ricci(levi_civita) = 2(2n+1) g` on the
/// 3-Sasakian pairs.
pub fn ricci(core: &PairCore, alpha: &AlphaMap) -> Array2<f64> {
    let r = curvature(core, alpha);
    let d = core.dim_m;
    let mut ric = Array2::zeros((d, d));
    for j in 0..d {
        for k in 0..d {
            let mut s = 0.0;
            for i in 0..d {
                s += r[[i, j, k, i]];
            }
            ric[[j, k]] = s;
        }
    }
    ric
}

pub fn scalar_curvature(core: &PairCore, alpha: &AlphaMap) -> f64 {
    ricci(core, alpha).diag().sum()
}

/// Metric compatibility: `alpha(X,-)` antisymmetric for the orthonormal g.
pub fn is_metric(alpha: &AlphaMap) -> (bool, f64) {
    let d = alpha.dim();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                worst = worst.max((alpha.a[[i, j, k]] + alpha.a[[i, k, j]]).abs());
            }
        }
    }
    (worst <= 1e-9, worst)
}

/// Skew torsion: metric and the lowered torsion is a 3-form.
pub fn is_skew(core: &PairCore, alpha: &AlphaMap) -> (bool, f64) {
    let (metric_ok, m_resid) = is_metric(alpha);
    let t = torsion(core, alpha);
    let d = alpha.dim();
    let mut worst = m_resid;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                worst = worst.max((t[[i, j, k]] + t[[i, k, j]]).abs());
            }
        }
    }
    (metric_ok && worst <= 1e-9, worst)
}

/// `S(X,Y) = sum_j g(T(e_j, X), T(e_j, Y))`; symmetric and PSD for skew
/// torsion.
pub fn s_tensor(core: &PairCore, alpha: &AlphaMap) -> Array2<f64> {
    let t = torsion(core, alpha);
    let d = core.dim_m;
    // S[x,y] = sum_{i,l} T[i,x,l] T[i,y,l]
    let mut s = Array2::zeros((d, d));
    for i in 0..d {
        let ti = t.slice(s![i, .., ..]);
        s = s + ti.dot(&ti.t());
    }
    s
}

/// Divergence of the torsion 3-form:
/// `div(T)(X,Y) = sum_i (nabla^g_{e_i} omega)(X, Y, e_i)`.
pub fn divergence(core: &PairCore, omega: &Array3<f64>) -> Result<Array2<f64>> {
    let lc = levi_civita(core)?;
    let grad = cov_deriv_cov3(&lc, omega);
    let d = core.dim_m;
    let mut div = Array2::zeros((d, d));
    for x in 0..d {
        for y in 0..d {
            let mut s = 0.0;
            for i in 0..d {
                s += grad[[i, x, y, i]];
            }
            div[[x, y]] = s;
        }
    }
    Ok(div)
}

/// Symmetric and skew parts of the Ricci tensor of a skew-torsion
/// connection, cross-checked against `Ric^g - S/4` and `div(T)/2`.
pub fn sym_skew_ricci(
    core: &PairCore,
    alpha: &AlphaMap,
) -> Result<(Array2<f64>, Array2<f64>)> {
    let ric = ricci(core, alpha);
    let sym = (&ric + &ric.t()) * 0.5;
    let skew = (&ric - &ric.t()) * 0.5;
    // identities: Sym = Ric^g - S/4, Skew = div(T)/2
    let lc = levi_civita(core)?;
    let ric_g = ricci(core, &lc);
    let s = s_tensor(core, alpha);
    let want_sym = &ric_g - &(&s * 0.25);
    let t = torsion(core, alpha);
    let omega = lower_torsion(&t);
    let div = divergence(core, &omega)?;
    let want_skew = &div * 0.5;
    let r1 = linalg::max_abs((&sym - &want_sym).iter());
    let r2 = linalg::max_abs((&skew - &want_skew).iter());
    if r1 > 1e-8 || r2 > 1e-8 {
        return Err(Error::Internal(format!(
            "Riemann-Cartan Ricci identities fail: sym residual {r1:.3e}, skew residual {r2:.3e}"
        )));
    }
    Ok((sym, skew))
}

/// Lowered torsion `omega(X,Y,Z) = g(T(X,Y), Z)`; identity coordinates in the
/// orthonormal basis.
pub fn lower_torsion(t: &Array3<f64>) -> Array3<f64> {
    t.clone()
}

/// `nabla T` computed two ways: through the connection itself, and through
/// the Levi-Civita derivative plus the cyclic torsion-of-torsion sum. The
/// two must agree; disagreement signals an internal inconsistency.
pub fn nabla_torsion(core: &PairCore, alpha: &AlphaMap) -> Result<Array4<f64>> {
    let t = torsion(core, alpha);
    let direct = cov_deriv_one_two(alpha, &t);
    let lc = levi_civita(core)?;
    let base = cov_deriv_one_two(&lc, &t);
    let d = core.dim_m;
    // cyclic term: T(X, T(Y,Z)) + T(Y, T(Z,X)) + T(Z, T(X,Y)), output slot last
    let mut cyc = Array4::zeros((d, d, d, d));
    // C1[x,y,z,l] = sum_p T[y,z,p] T[x,p,l]
    let t_yz_p = t.to_shape((d * d, d)).unwrap();
    let t_perm = t
        .view()
        .permuted_axes([1, 0, 2])
        .as_standard_layout()
        .into_owned(); // [p, x, l]
    let t_perm_flat = t_perm.to_shape((d, d * d)).unwrap();
    let c1 = t_yz_p.dot(&t_perm_flat); // ((y,z),(x,l))
    let c1 = c1.into_shape_with_order((d, d, d, d)).unwrap();
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                for l in 0..d {
                    cyc[[x, y, z, l]] = c1[[y, z, x, l]] + c1[[z, x, y, l]] + c1[[x, y, z, l]];
                }
            }
        }
    }
    let alt = &base + &(&cyc * 0.5);
    let resid = linalg::max_abs((&direct - &alt).iter());
    if resid > 1e-9 {
        return Err(Error::Internal(format!(
            "the two covariant-derivative routes for the torsion disagree ({resid:.3e})"
        )));
    }
    Ok(direct)
}

// ---------------------------------------------------------------------------
// covariant derivatives (Z is always the first index of the result)
// ---------------------------------------------------------------------------

/// `(nabla_Z v)` for a vector: `[z, out]`.
pub fn cov_deriv_vector(alpha: &AlphaMap, v: &Array1<f64>) -> Array2<f64> {
    let d = alpha.dim();
    let mut out = Array2::zeros((d, d));
    for p in 0..d {
        if v[p] == 0.0 {
            continue;
        }
        out.scaled_add(v[p], &alpha.a.slice(s![.., p, ..]));
    }
    out
}

/// `(nabla_Z M)(X)` for an endomorphism `M[out, in]`: result `[z, x, out]`.
pub fn cov_deriv_endo(alpha: &AlphaMap, m: &Array2<f64>) -> Array3<f64> {
    let d = alpha.dim();
    let mut out = Array3::zeros((d, d, d));
    for z in 0..d {
        let az = alpha.a.slice(s![z, .., ..]); // [in, out]
        // alpha(Z, M X): A_z[l,p] = a[z,p,l] -> term1[x,l] = sum_p M[p,x] az[p,l]
        let term1 = m.t().dot(&az); // (x, l)
        // M(alpha(Z,X)): term2[x,l] = sum_q a[z,x,q] M[l,q]
        let term2 = az.dot(&m.t()); // (x, l)
        let mut oz = out.slice_mut(s![z, .., ..]);
        oz.assign(&(&term1 - &term2));
    }
    out
}

/// `(nabla_Z T)(X,Y)` for a (1,2) tensor `T[x,y,out]`: result `[z,x,y,out]`.
pub fn cov_deriv_one_two(alpha: &AlphaMap, t: &Array3<f64>) -> Array4<f64> {
    let d = alpha.dim();
    let mut out = Array4::zeros((d, d, d, d));
    let t_xy_p = t.to_shape((d * d, d)).unwrap();
    let t_q_yl = t.to_shape((d, d * d)).unwrap();
    for z in 0..d {
        let az = alpha.a.slice(s![z, .., ..]); // [in, out]
        // term1[(x,y),l] = sum_p T[x,y,p] a[z,p,l]
        let term1 = t_xy_p.dot(&az); // (xy, l)
        // term2[x,(y,l)] = sum_q a[z,x,q] T[q,y,l]
        let term2 = az.dot(&t_q_yl); // (x, yl)
        let t1 = term1.into_shape_with_order((d, d, d)).unwrap();
        let t2 = term2.into_shape_with_order((d, d, d)).unwrap();
        let mut oz = out.slice_mut(s![z, .., .., ..]);
        oz.assign(&(&t1 - &t2));
        // term3: sum_q a[z,y,q] T[x,q,l]
        for x in 0..d {
            let tx = t.slice(s![x, .., ..]); // [q, l]
            let t3 = az.dot(&tx); // (y, l)
            let mut oxz = out.slice_mut(s![z, x, .., ..]);
            oxz -= &t3;
        }
    }
    out
}

/// `(nabla_Z B)(X,Y)` for a (0,2) tensor: result `[z,x,y]`.
pub fn cov_deriv_cov2(alpha: &AlphaMap, b: &Array2<f64>) -> Array3<f64> {
    let d = alpha.dim();
    let mut out = Array3::zeros((d, d, d));
    for z in 0..d {
        let az = alpha.a.slice(s![z, .., ..]);
        let term1 = az.dot(b); // B(alpha(Z,X), Y) over (x, y)
        let term2 = b.dot(&az.t()); // B(X, alpha(Z,Y))
        let mut oz = out.slice_mut(s![z, .., ..]);
        oz.assign(&(-&term1 - &term2));
    }
    out
}

/// `(nabla_Z w)(X,Y,W)` for a (0,3) tensor: result `[z,x,y,w]`.
pub fn cov_deriv_cov3(alpha: &AlphaMap, w: &Array3<f64>) -> Array4<f64> {
    let d = alpha.dim();
    let mut out = Array4::zeros((d, d, d, d));
    let w_x_yw = w.to_shape((d, d * d)).unwrap();
    let w_xy_w = w.to_shape((d * d, d)).unwrap();
    for z in 0..d {
        let az = alpha.a.slice(s![z, .., ..]);
        // slot 1
        let t1 = az.dot(&w_x_yw).into_shape_with_order((d, d, d)).unwrap();
        // slot 3
        let t3 = w_xy_w.dot(&az.t()).into_shape_with_order((d, d, d)).unwrap();
        let mut oz = out.slice_mut(s![z, .., .., ..]);
        oz.assign(&(-&t1 - &t3));
        // slot 2
        for x in 0..d {
            let wx = w.slice(s![x, .., ..]); // [q, w]
            let t2 = az.dot(&wx); // (y, w)
            let mut oxz = out.slice_mut(s![z, x, .., ..]);
            oxz -= &t2;
        }
    }
    out
}

/// Tensor-at-origin wrapper used by callers that dispatch on rank.
#[derive(Debug, Clone)]
pub enum TensorAtOrigin {
    Vector(Array1<f64>),
    Endo(Array2<f64>),
    Cov2(Array2<f64>),
    OneTwo(Array3<f64>),
    Cov3(Array3<f64>),
    OneThree(Array4<f64>),
    Cov4(Array4<f64>),
}

/// Covariant derivative of an invariant tensor, rank-dispatched; the result
/// has the direction slot first.
pub fn covariant_derivative(alpha: &AlphaMap, t: &TensorAtOrigin) -> TensorAtOrigin {
    match t {
        TensorAtOrigin::Vector(v) => TensorAtOrigin::Endo(cov_deriv_vector(alpha, v)),
        TensorAtOrigin::Endo(m) => TensorAtOrigin::OneTwo(cov_deriv_endo(alpha, m)),
        TensorAtOrigin::Cov2(b) => TensorAtOrigin::Cov3(cov_deriv_cov2(alpha, b)),
        TensorAtOrigin::OneTwo(t3) => TensorAtOrigin::OneThree(cov_deriv_one_two(alpha, t3)),
        TensorAtOrigin::Cov3(w) => TensorAtOrigin::Cov4(cov_deriv_cov3(alpha, w)),
        TensorAtOrigin::OneThree(_) | TensorAtOrigin::Cov4(_) => {
            unimplemented!("no caller differentiates rank-4 tensors")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{ReductivePair, SpaceId};

    fn pair(id: &str) -> ReductivePair {
        ReductivePair::build(SpaceId::parse(id).unwrap()).unwrap()
    }

    #[test]
    fn ricci_of_flat_abelian_toy_vanishes() {
        let core = PairCore::flat_abelian(5);
        let lc = levi_civita(&core).unwrap();
        let ric = ricci(&core, &lc);
        assert!(linalg::max_abs(ric.iter()) < 1e-15);
    }

    #[test]
    fn levi_civita_is_torsion_free_and_metric() {
        for id in ["sp:1", "su:3"] {
            let p = pair(id);
            let lc = levi_civita(&p.core).unwrap();
            let t = torsion(&p.core, &lc);
            assert!(linalg::max_abs(t.iter()) < 1e-10, "{id}: LC torsion");
            let (ok, resid) = is_metric(&lc);
            assert!(ok, "{id}: LC not metric ({resid:.2e})");
            let (ok, _) = is_skew(&p.core, &lc);
            assert!(ok, "{id}: LC trivially skew");
        }
    }

    #[test]
    fn kashiwada_einstein_constant_on_small_families() {
        for id in ["sp:1", "sp:2", "su:3", "g2"] {
            let p = pair(id);
            let lc = levi_civita(&p.core).unwrap();
            let ric = ricci(&p.core, &lc);
            let want = 2.0 * (2.0 * p.n as f64 + 1.0);
            let d = p.dim_m();
            let mut worst = 0.0f64;
            for i in 0..d {
                for j in 0..d {
                    let target = if i == j { want } else { 0.0 };
                    worst = worst.max((ric[[i, j]] - target).abs());
                }
            }
            assert!(worst < 1e-8, "{id}: Ric != 2(2n+1) g (worst {worst:.3e})");
        }
    }

    #[test]
    fn scalar_curvature_of_su3_levi_civita_is_42() {
        let p = pair("su:3");
        let lc = levi_civita(&p.core).unwrap();
        let s = scalar_curvature(&p.core, &lc);
        assert!((s - 42.0).abs() < 1e-8, "s = {s}");
    }

    #[test]
    fn metric_is_parallel_for_levi_civita() {
        let p = pair("sp:1");
        let lc = levi_civita(&p.core).unwrap();
        let g = Array2::eye(p.dim_m());
        let nabla_g = cov_deriv_cov2(&lc, &g);
        assert!(linalg::max_abs(nabla_g.iter()) < 1e-12);
    }

    #[test]
    fn curvature_is_tensorial_under_orthogonal_basis_change() {
        use rand::SeedableRng;
        let p = pair("g2");
        let d = p.dim_m();
        let lc = levi_civita(&p.core).unwrap();
        let r = curvature(&p.core, &lc);
        // oracle: recompute with all inputs rotated by a random orthogonal Q,
        // then pull the curvature back; the result must agree entrywise.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let q = linalg::random_orthogonal(d, &mut rng);
        let qt = q.t().to_owned();
        // transform alpha: a'[i,j,k] = sum q^T... a'(X,Y) = Q^-1 a(QX, QY)
        let transform3 = |a: &Array3<f64>| -> Array3<f64> {
            let mut out = Array3::zeros((d, d, d));
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        let mut s = 0.0;
                        for p1 in 0..d {
                            for p2 in 0..d {
                                for p3 in 0..d {
                                    s += q[[p1, i]] * q[[p2, j]] * qt[[k, p3]]
                                        * a[[p1, p2, p3]];
                                }
                            }
                        }
                        out[[i, j, k]] = s;
                    }
                }
            }
            out
        };
        let a_t = transform3(&lc.a);
        let mbra_t = transform3(&p.core.mbra);
        let nh = p.core.had.len();
        let mut hcoef_t = Array3::zeros((d, d, nh));
        for aa in 0..nh {
            for i in 0..d {
                for j in 0..d {
                    let mut s = 0.0;
                    for p1 in 0..d {
                        for p2 in 0..d {
                            s += q[[p1, i]] * q[[p2, j]] * p.core.hcoef[[p1, p2, aa]];
                        }
                    }
                    hcoef_t[[i, j, aa]] = s;
                }
            }
        }
        let had_t: Vec<Array2<f64>> = p.core.had.iter().map(|g| qt.dot(g).dot(&q)).collect();
        let core_t = PairCore {
            dim_m: d,
            mbra: mbra_t,
            hcoef: hcoef_t,
            had: had_t,
        };
        let r_t = curvature(&core_t, &AlphaMap { a: a_t });
        // comparing R entrywise needs a rank-4 pull-back; spot check a
        // sample of entries plus the full contracted Ricci
        let mut worst = 0.0f64;
        for (i, j, k, l) in [(0, 4, 4, 0), (1, 5, 6, 2), (3, 7, 8, 3), (0, 1, 1, 0)] {
            let mut s = 0.0;
            for p1 in 0..d {
                for p2 in 0..d {
                    for p3 in 0..d {
                        for p4 in 0..d {
                            s += q[[p1, i]]
                                * q[[p2, j]]
                                * q[[p3, k]]
                                * q[[p4, l]]
                                * r[[p1, p2, p3, p4]];
                        }
                    }
                }
            }
            worst = worst.max((s - r_t[[i, j, k, l]]).abs());
        }
        // Ricci transforms as a (0,2) tensor
        let ric = ricci(&p.core, &lc);
        let mut ric_t = Array2::zeros((d, d));
        for j in 0..d {
            for k in 0..d {
                let mut s = 0.0;
                for i in 0..d {
                    s += r_t[[i, j, k, i]];
                }
                ric_t[[j, k]] = s;
            }
        }
        let ric_pull = q.dot(&ric_t).dot(&q.t());
        worst = worst.max(linalg::max_abs((&ric - &ric_pull).iter()));
        assert!(worst < 1e-8, "curvature not tensorial: {worst:.3e}");
    }

    #[test]
    fn non_equivariant_maps_are_rejected() {
        let p = pair("sp:1");
        let lc = levi_civita(&p.core).unwrap();
        let mut bad = lc.a.clone();
        bad[[4, 5, 6]] += 0.25;
        assert!(AlphaMap::new(&p.core, bad).is_err());
    }
}
