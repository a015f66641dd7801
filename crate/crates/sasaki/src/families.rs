//! The named torsion tensors on a 3-Sasakian frame and the classification
//! checks for the families of metric connections with skew torsion they
//! span: Einstein, S-Einstein, symmetric Ricci, phi-compatibility, parallel
//! torsion and Reeb parallelism.

use crate::frame::SasakiFrame;
use crate::linalg;
use crate::nomizu::{self, AlphaMap};
use crate::zoo::Family;
use crate::{Error, Result};
use ndarray::prelude::*;
use rand::Rng;

/// Coefficients of a skew torsion `a T^o + sum b_rs T^{rs} + sum c_l T^{l0}`;
/// `c` must vanish outside the SU family (there is no `T^{l0}` there).
#[derive(Debug, Clone)]
pub struct ConnectionSpec {
    pub a: f64,
    pub b: Array2<f64>,
    pub c: Array1<f64>,
}

impl ConnectionSpec {
    pub fn new(a: f64, b: Array2<f64>, c: Array1<f64>, family: Family) -> Result<Self> {
        if b.dim() != (3, 3) || c.len() != 3 {
            return Err(Error::Usage("spec needs a 3x3 matrix and a 3-vector".into()));
        }
        if family != Family::Su && linalg::max_abs(c.iter()) > 0.0 {
            return Err(Error::Usage(
                "the c coefficients exist only on the SU family".into(),
            ));
        }
        Ok(ConnectionSpec { a, b, c })
    }

    pub fn zero() -> Self {
        ConnectionSpec {
            a: 0.0,
            b: Array2::zeros((3, 3)),
            c: Array1::zeros(3),
        }
    }

    pub fn from_b(a: f64, b: Array2<f64>) -> Self {
        ConnectionSpec {
            a,
            b,
            c: Array1::zeros(3),
        }
    }

    /// Euclidean norm of the 13 coefficients.
    pub fn norm(&self) -> f64 {
        (self.a * self.a + self.b.iter().map(|x| x * x).sum::<f64>()
            + self.c.dot(&self.c))
            .sqrt()
    }

    pub fn scaled(&self, f: f64) -> Self {
        ConnectionSpec {
            a: self.a * f,
            b: &self.b * f,
            c: &self.c * f,
        }
    }

    /// The change of Sasakian triple by `P` in SO(3):
    /// `a -> a`, `B -> P B P^t`, `c -> P c`.
    pub fn so3_action(&self, p: &Array2<f64>) -> Result<ConnectionSpec> {
        let ptp = p.t().dot(p);
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ptp[[i, j]] - want).abs());
            }
        }
        if worst > 1e-12 || (linalg::det3(p) - 1.0).abs() > 1e-12 {
            return Err(Error::Usage(
                "the triple change must be special orthogonal".into(),
            ));
        }
        Ok(ConnectionSpec {
            a: self.a,
            b: p.dot(&self.b).dot(&p.t()),
            c: p.dot(&self.c),
        })
    }
}

/// The torsion tensors metrically dual to the invariant 3-forms, stored as
/// `[x, y, out]` coefficient arrays.
pub struct TorsionBasis {
    /// dual to `eta_1 ^ eta_2 ^ eta_3`
    pub t_o: Array3<f64>,
    /// `t_rs[r][s]` dual to `eta_{r+1} ^ Phi_{s+1}`
    pub t_rs: [[Array3<f64>; 3]; 3],
    /// SU only: dual to `eta_{r+1} ^ Phi_0`
    pub t_r0: Option<[Array3<f64>; 3]>,
}

/// Builds the torsion basis and verifies (at 1e-12) that each lowered
/// tensor equals the corresponding wedge form.
pub fn torsion_basis(frame: &SasakiFrame) -> Result<TorsionBasis> {
    let d = frame.dim();
    let mut t_o = Array3::zeros((d, d, d));
    for x in 0..3 {
        for y in 0..3 {
            for out in 0..3 {
                t_o[[x, y, out]] = 0.5 * frame.core.mbra[[x, y, out]];
            }
        }
    }
    let build_trs = |r: usize, phi_s: &Array2<f64>| -> Array3<f64> {
        let mut t = Array3::zeros((d, d, d));
        for x in 0..d {
            for y in 0..d {
                for out in 0..d {
                    let mut v = 0.0;
                    if x == r {
                        v -= phi_s[[out, y]];
                    }
                    if y == r {
                        v += phi_s[[out, x]];
                    }
                    if out == r {
                        v += phi_s[[x, y]];
                    }
                    t[[x, y, out]] = v;
                }
            }
        }
        t
    };
    let t_rs: [[Array3<f64>; 3]; 3] =
        std::array::from_fn(|r| std::array::from_fn(|s| build_trs(r, &frame.phi[s])));
    let t_r0 = frame
        .phi0
        .as_ref()
        .map(|phi0| std::array::from_fn(|r| build_trs(r, phi0)));

    // wedge-form oracle: eta_1 ^ eta_2 ^ eta_3 and eta_r ^ Phi_s evaluated
    // from the definition of the exterior product
    let eps3 = |x: usize, y: usize, z: usize| -> f64 {
        if x > 2 || y > 2 || z > 2 || x == y || y == z || x == z {
            0.0
        } else if (x + 1) % 3 == y {
            1.0
        } else {
            -1.0
        }
    };
    let mut worst = 0.0f64;
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                let vol = eps3(x, y, z);
                worst = worst.max((t_o[[x, y, z]] - vol).abs());
            }
        }
    }
    if worst > 1e-12 {
        return Err(Error::Internal(format!(
            "T^o does not lower to the volume form of the vertical space ({worst:.2e})"
        )));
    }
    let check_wedge = |t: &Array3<f64>, r: usize, phi_s: &Array2<f64>| -> f64 {
        let mut worst = 0.0f64;
        let eta = |x: usize| -> [f64; 3] {
            let mut v = [0.0; 3];
            if x < 3 {
                v[x] = 1.0;
            }
            v
        };
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    let w = eta(x)[r] * phi_s[[y, z]]
                        + eta(y)[r] * phi_s[[z, x]]
                        + eta(z)[r] * phi_s[[x, y]];
                    worst = worst.max((t[[x, y, z]] - w).abs());
                }
            }
        }
        worst
    };
    for r in 0..3 {
        for s in 0..3 {
            let w = check_wedge(&t_rs[r][s], r, &frame.phi[s]);
            if w > 1e-12 {
                return Err(Error::Internal(format!(
                    "T^{{{},{}}} does not lower to its wedge form ({w:.2e})",
                    r + 1,
                    s + 1
                )));
            }
        }
    }
    if let (Some(t_r0s), Some(phi0)) = (&t_r0, &frame.phi0) {
        for r in 0..3 {
            let w = check_wedge(&t_r0s[r], r, phi0);
            if w > 1e-12 {
                return Err(Error::Internal(format!(
                    "T^{{{},0}} does not lower to its wedge form ({w:.2e})",
                    r + 1
                )));
            }
        }
    }
    Ok(TorsionBasis { t_o, t_rs, t_r0 })
}

/// The torsion tensor of a coefficient spec.
pub fn torsion_from_spec(
    basis: &TorsionBasis,
    spec: &ConnectionSpec,
) -> Result<Array3<f64>> {
    let mut t = &basis.t_o * spec.a;
    for r in 0..3 {
        for s in 0..3 {
            if spec.b[[r, s]] != 0.0 {
                t.scaled_add(spec.b[[r, s]], &basis.t_rs[r][s]);
            }
        }
    }
    if linalg::max_abs(spec.c.iter()) > 0.0 {
        let t_r0 = basis.t_r0.as_ref().ok_or_else(|| {
            Error::Usage("c coefficients require the SU family".into())
        })?;
        for r in 0..3 {
            if spec.c[r] != 0.0 {
                t.scaled_add(spec.c[r], &t_r0[r]);
            }
        }
    }
    Ok(t)
}

/// `alpha = alpha^g + T/2`: the invariant metric connection with skew
/// torsion `T(spec)`.
pub fn connection_from_spec(
    frame: &SasakiFrame,
    basis: &TorsionBasis,
    spec: &ConnectionSpec,
) -> Result<AlphaMap> {
    let t = torsion_from_spec(basis, spec)?;
    let a = &frame.alpha_g.a + &(&t * 0.5);
    AlphaMap::new(&frame.core, a)
}

// ---------------------------------------------------------------------------
// closed curvature formulas for the coefficient families
// ---------------------------------------------------------------------------

/// Closed form of the `S` tensor.
pub fn s_tensor_closed(frame: &SasakiFrame, spec: &ConnectionSpec) -> Array2<f64> {
    let d = frame.dim();
    let n = frame.n as f64;
    let b = &spec.b;
    let c = &spec.c;
    let a_tr = spec.a - b.diag().sum();
    let b2 = b.iter().map(|x| x * x).sum::<f64>();
    let c2 = c.dot(c);
    let mut s = Array2::zeros((d, d));
    for i in 0..3 {
        for k in 0..3 {
            let mut v = if i == k { 2.0 * a_tr * a_tr } else { 0.0 };
            let mut dot = 0.0;
            for ss in 0..3 {
                dot += b[[i, ss]] * b[[k, ss]];
            }
            v += 4.0 * n * dot + 4.0 * n * c[i] * c[k];
            s[[i, k]] = v;
        }
    }
    // horizontal block
    let mut horiz = Array2::eye(d);
    for i in 0..3 {
        horiz[[i, i]] = 0.0;
    }
    let mut hblock = &horiz * (2.0 * (b2 + c2));
    if let Some(phi0) = &frame.phi0 {
        // 4 sum_{s,j} b_js c_j g(phi0 X, phi_s Y) = 4 sum b_js c_j (phi0^T phi_s)
        for sidx in 0..3 {
            let coef: f64 = (0..3).map(|j| spec.b[[j, sidx]] * c[j]).sum();
            if coef.abs() > 0.0 {
                let m = phi0.t().dot(&frame.phi[sidx]);
                hblock.scaled_add(4.0 * coef, &m);
            }
        }
    }
    for p in 3..d {
        for q in 3..d {
            s[[p, q]] = hblock[[p, q]];
        }
    }
    s
}

/// Closed form of the symmetric Ricci part.
pub fn sym_ricci_closed(frame: &SasakiFrame, spec: &ConnectionSpec) -> Array2<f64> {
    let d = frame.dim();
    let n = frame.n as f64;
    let b = &spec.b;
    let c = &spec.c;
    let a_tr = spec.a - b.diag().sum();
    let b2 = b.iter().map(|x| x * x).sum::<f64>();
    let c2 = c.dot(c);
    let mut out = Array2::zeros((d, d));
    for i in 0..3 {
        for k in 0..3 {
            let mut v = if i == k {
                4.0 * n + 2.0 - 0.5 * a_tr * a_tr
            } else {
                0.0
            };
            let mut dot = 0.0;
            for ss in 0..3 {
                dot += b[[i, ss]] * b[[k, ss]];
            }
            v -= n * dot + n * c[i] * c[k];
            out[[i, k]] = v;
        }
    }
    let mut horiz = Array2::eye(d);
    for i in 0..3 {
        horiz[[i, i]] = 0.0;
    }
    let mut hblock = &horiz * (4.0 * n + 2.0 - 0.5 * (b2 + c2));
    if let Some(phi0) = &frame.phi0 {
        for sidx in 0..3 {
            let coef: f64 = (0..3).map(|j| spec.b[[j, sidx]] * c[j]).sum();
            if coef.abs() > 0.0 {
                let m = phi0.t().dot(&frame.phi[sidx]);
                hblock.scaled_add(-coef, &m);
            }
        }
    }
    for p in 3..d {
        for q in 3..d {
            out[[p, q]] = hblock[[p, q]];
        }
    }
    out
}

/// Closed form of the scalar curvature.
pub fn scalar_closed(frame: &SasakiFrame, spec: &ConnectionSpec) -> f64 {
    let n = frame.n as f64;
    let a_tr = spec.a - spec.b.diag().sum();
    let b2 = spec.b.iter().map(|x| x * x).sum::<f64>();
    let c2 = spec.c.dot(&spec.c);
    (4.0 * n + 2.0) * (4.0 * n + 3.0) - 1.5 * a_tr * a_tr - 3.0 * n * (b2 + c2)
}

// ---------------------------------------------------------------------------
// classification verdicts
// ---------------------------------------------------------------------------

/// Outcome of the full classification of one connection.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ClassificationVerdict {
    pub metric: bool,
    pub skew: bool,
    pub einstein: bool,
    pub s_einstein: bool,
    pub ricci_symmetric: bool,
    pub phi_compatible: bool,
    pub parallel_torsion: bool,
    pub parallelizes_reeb: bool,
    /// residual witnesses, one per flag
    pub residuals: std::collections::BTreeMap<String, f64>,
    pub scalar_curvature: f64,
    pub gamma: Option<f64>,
    /// least-squares fit `Ric ~ alpha g + beta sum eta_k (x) eta_k`
    pub s_einstein_fit: (f64, f64),
    /// algebraic membership in the Einstein family (dimension 7: the
    /// two-signs conformal family; above: only the trivial connection)
    pub einstein_member: bool,
    /// algebraic membership in the S-Einstein family
    pub s_einstein_member: bool,
}

pub fn classify(
    frame: &SasakiFrame,
    basis: &TorsionBasis,
    spec: &ConnectionSpec,
) -> Result<ClassificationVerdict> {
    classify_with_tol(frame, basis, spec, 1e-8)
}

pub fn classify_with_tol(
    frame: &SasakiFrame,
    basis: &TorsionBasis,
    spec: &ConnectionSpec,
    tol: f64,
) -> Result<ClassificationVerdict> {
    let alpha = connection_from_spec(frame, basis, spec)?;
    let core = &frame.core;
    let d = frame.dim();
    let dim_m = d as f64;

    let (metric, metric_resid) = nomizu::is_metric(&alpha);
    let (skew, skew_resid) = nomizu::is_skew(core, &alpha);

    let ric = nomizu::ricci(core, &alpha);
    let sym = (&ric + &ric.t()) * 0.5;
    let skew_ric = (&ric - &ric.t()) * 0.5;
    let s_nabla = ric.diag().sum();

    // Einstein with skew torsion: Sym(Ric) = s/dim g
    let mut einstein_resid = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let want = if i == j { s_nabla / dim_m } else { 0.0 };
            einstein_resid = einstein_resid.max((sym[[i, j]] - want).abs());
        }
    }
    let einstein = einstein_resid <= tol;

    // S-Einstein: Ric = alpha g + beta sum eta_k (x) eta_k (least squares)
    let (al, be) = fit_s_einstein(&ric);
    let mut se_resid = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let mut want = if i == j { al } else { 0.0 };
            if i == j && i < 3 {
                want += be;
            }
            se_resid = se_resid.max((ric[[i, j]] - want).abs());
        }
    }
    let s_einstein = se_resid <= tol;

    let ric_skew_norm = linalg::max_abs(skew_ric.iter());
    let ricci_symmetric = ric_skew_norm <= tol;

    // phi-compatibility: the vertical projector is parallel and
    // (nabla_X phi_i)(Y) = 0 for horizontal X, Y
    let mut proj = Array2::zeros((d, d));
    for r in 0..3 {
        proj[[r, r]] = 1.0;
    }
    let nabla_proj = nomizu::cov_deriv_endo(&alpha, &proj);
    let mut phi_resid = linalg::max_abs(nabla_proj.iter());
    for ph in &frame.phi {
        let np = nomizu::cov_deriv_endo(&alpha, ph);
        for z in 3..d {
            for x in 3..d {
                for out in 0..d {
                    phi_resid = phi_resid.max(np[[z, x, out]].abs());
                }
            }
        }
    }
    let phi_compatible = phi_resid <= tol;

    // parallel torsion
    let nabla_t = nomizu::nabla_torsion(core, &alpha)?;
    let nabla_t_norm = linalg::max_abs(nabla_t.iter());
    let parallel_torsion = nabla_t_norm <= tol;

    // Reeb parallelism: nabla xi_i = alpha(-, xi_i) = 0
    let mut reeb_resid = 0.0f64;
    for i in 0..3 {
        for z in 0..d {
            for out in 0..d {
                reeb_resid = reeb_resid.max(alpha.a[[z, i, out]].abs());
            }
        }
    }
    let parallelizes_reeb = reeb_resid <= tol;

    // gamma = omega(xi_1, xi_2, xi_3) (defined whenever the torsion is skew)
    let t = nomizu::torsion(core, &alpha);
    let gamma = if skew { Some(t[[0, 1, 2]]) } else { None };

    let mut residuals = std::collections::BTreeMap::new();
    residuals.insert("metric".into(), metric_resid);
    residuals.insert("skew".into(), skew_resid);
    residuals.insert("einstein".into(), einstein_resid);
    residuals.insert("s_einstein".into(), se_resid);
    residuals.insert("ricci_symmetric".into(), ric_skew_norm);
    residuals.insert("phi_compatible".into(), phi_resid);
    residuals.insert("parallel_torsion".into(), nabla_t_norm);
    residuals.insert("parallelizes_reeb".into(), reeb_resid);

    let einstein_member = if d == 7 {
        criteria::einstein_member(spec, 1e-9)
    } else {
        spec.norm() <= 1e-9
    };
    let s_einstein_member = criteria::s_einstein_member(spec, 1e-9);

    Ok(ClassificationVerdict {
        metric,
        skew,
        einstein,
        s_einstein,
        ricci_symmetric,
        phi_compatible,
        parallel_torsion,
        parallelizes_reeb,
        residuals,
        scalar_curvature: s_nabla,
        gamma,
        s_einstein_fit: (al, be),
        einstein_member,
        s_einstein_member,
    })
}

/// Least-squares fit `Ric ~ alpha g + beta sum eta_k (x) eta_k`.
fn fit_s_einstein(ric: &Array2<f64>) -> (f64, f64) {
    let d = ric.nrows();
    let vert_mean: f64 = (0..3).map(|i| ric[[i, i]]).sum::<f64>() / 3.0;
    let horiz_mean: f64 = (3..d).map(|i| ric[[i, i]]).sum::<f64>() / (d - 3) as f64;
    (horiz_mean, vert_mean - horiz_mean)
}

/// Algebraic membership tests from the classification theorems.
pub mod criteria {
    use super::*;

    /// `B B^t + c c^t` is a multiple of the identity, `c^t B = 0`, and the
    /// Einstein balance `3 (a - tr B)^2 = |B|^2 + |c|^2`.
    pub fn einstein_member(spec: &ConnectionSpec, tol: f64) -> bool {
        let b2 = spec.b.iter().map(|x| x * x).sum::<f64>();
        let c2 = spec.c.dot(&spec.c);
        let a_tr = spec.a - spec.b.diag().sum();
        if (3.0 * a_tr * a_tr - (b2 + c2)).abs() > tol {
            return false;
        }
        conformal_with_c(spec, tol) && ctb_zero(spec, tol)
    }

    /// `B = B^t`, `B B^t + c c^t` in `R I_3`, `c^t B = 0` (S-Einstein).
    pub fn s_einstein_member(spec: &ConnectionSpec, tol: f64) -> bool {
        let sym = linalg::max_abs((&spec.b - &spec.b.t()).iter());
        sym <= tol && conformal_with_c(spec, tol) && ctb_zero(spec, tol)
    }

    fn conformal_with_c(spec: &ConnectionSpec, tol: f64) -> bool {
        let b2 = spec.b.iter().map(|x| x * x).sum::<f64>();
        let c2 = spec.c.dot(&spec.c);
        let lam = (b2 + c2) / 3.0;
        let bbt = spec.b.dot(&spec.b.t());
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let mut v = bbt[[i, j]] + spec.c[i] * spec.c[j];
                if i == j {
                    v -= lam;
                }
                worst = worst.max(v.abs());
            }
        }
        worst <= tol
    }

    fn ctb_zero(spec: &ConnectionSpec, tol: f64) -> bool {
        let ctb = spec.c.dot(&spec.b);
        linalg::max_abs(ctb.iter()) <= tol
    }

    /// CO(3) membership: `B B^t = (|B|^2/3) I_3` and `det B != 0`.
    pub fn in_co3(b: &Array2<f64>, tol: f64) -> bool {
        let b2 = b.iter().map(|x| x * x).sum::<f64>();
        let lam = b2 / 3.0;
        let bbt = b.dot(&b.t());
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { lam } else { 0.0 };
                worst = worst.max((bbt[[i, j]] - want).abs());
            }
        }
        worst <= tol && linalg::det3(b).abs() > 1e-10
    }
}

/// Linear system for Reeb-parallel connections: unknowns `(a, B, c, t)` in
/// homogeneous coordinates (`t` scales the Levi-Civita part). Returns the
/// kernel dimension and, when it is one, the solution normalized to `t = 1`
/// as a spec.
pub fn reeb_parallel_system(
    frame: &SasakiFrame,
    basis: &TorsionBasis,
) -> Result<(usize, Option<ConnectionSpec>)> {
    let d = frame.dim();
    let has_c = basis.t_r0.is_some();
    // unknowns: a, the nine b's, (SU only) three c's, and t scaling the
    // Levi-Civita part
    let ncols = if has_c { 14 } else { 11 };
    let tcol = ncols - 1;
    let rows = d * 3 * d;
    let mut m = Array2::zeros((rows, ncols));
    let mut row = 0;
    for z in 0..d {
        for i in 0..3 {
            for out in 0..d {
                // coefficient of each unknown in alpha(e_z, xi_i)_out
                m[[row, 0]] = 0.5 * basis.t_o[[z, i, out]];
                for r in 0..3 {
                    for s in 0..3 {
                        m[[row, 1 + 3 * r + s]] = 0.5 * basis.t_rs[r][s][[z, i, out]];
                    }
                }
                if let Some(t_r0) = &basis.t_r0 {
                    for l in 0..3 {
                        m[[row, 10 + l]] = 0.5 * t_r0[l][[z, i, out]];
                    }
                }
                m[[row, tcol]] = frame.alpha_g.a[[z, i, out]];
                row += 1;
            }
        }
    }
    let gram = m.t().dot(&m);
    let (vals, vecs) = linalg::eigh(&gram);
    let vmax = vals[vals.len() - 1];
    let mut kernel_dim = 0usize;
    let mut kernel_vec = None;
    for (idx, &l) in vals.iter().enumerate() {
        if l <= vmax * 1e-12 {
            kernel_dim += 1;
            kernel_vec = Some(vecs.column(idx).to_owned());
        }
    }
    let spec = if kernel_dim == 1 {
        let v = kernel_vec.unwrap();
        if v[tcol].abs() < 1e-10 {
            None
        } else {
            let v = &v / v[tcol];
            let b = Array2::from_shape_fn((3, 3), |(r, s)| v[1 + 3 * r + s]);
            let c = if has_c {
                Array1::from_shape_fn(3, |l| v[10 + l])
            } else {
                Array1::zeros(3)
            };
            Some(ConnectionSpec { a: v[0], b, c })
        }
    } else {
        None
    };
    Ok((kernel_dim, spec))
}

/// Deterministic random spec for sweeps (uniform coefficients in [-1, 1],
/// `c = 0` outside SU).
pub fn random_spec<R: Rng>(rng: &mut R, family: Family) -> ConnectionSpec {
    let a = rng.gen_range(-1.0..1.0);
    let b = Array2::from_shape_fn((3, 3), |_| rng.gen_range(-1.0..1.0));
    let c = if family == Family::Su {
        Array1::from_shape_fn(3, |_| rng.gen_range(-1.0..1.0))
    } else {
        Array1::zeros(3)
    };
    ConnectionSpec { a, b, c }
}

/// Random member of the Einstein family in dimension 7 (sign, conformal
/// factor and rotation sampled; for SU half the samples carry `c != 0`).
pub fn random_einstein_member<R: Rng>(rng: &mut R, family: Family) -> ConnectionSpec {
    let p = linalg::random_so3(rng);
    let lam = rng.gen_range(0.3..1.5);
    let use_c = family == Family::Su && rng.gen_bool(0.5);
    let (b, c) = if use_c {
        // c = r P e_1; B has zero first row and two orthogonal rows of
        // length r, then the pair is rotated by P
        let r = lam;
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let mut b = Array2::zeros((3, 3));
        b[[1, 0]] = r * theta.cos();
        b[[1, 1]] = -r * theta.sin();
        b[[2, 0]] = -r * theta.sin();
        b[[2, 1]] = -r * theta.cos();
        let c = array![r, 0.0, 0.0];
        (p.dot(&b).dot(&p.t()), p.dot(&c))
    } else {
        let mut q = linalg::random_so3(rng);
        if rng.gen_bool(0.5) {
            // include the orientation-reversing half of CO(3)
            for i in 0..3 {
                q[[i, 2]] = -q[[i, 2]];
            }
        }
        (q * lam, Array1::zeros(3))
    };
    let b2 = b.iter().map(|x| x * x).sum::<f64>();
    let c2 = c.dot(&c);
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let a = b.diag().sum() + sign * ((b2 + c2) / 3.0).sqrt();
    ConnectionSpec { a, b, c }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::make_frame;
    use crate::zoo::{ReductivePair, SpaceId};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(id: &str) -> (SasakiFrame, TorsionBasis) {
        let pair = ReductivePair::build(SpaceId::parse(id).unwrap()).unwrap();
        let frame = make_frame(&pair).unwrap();
        let basis = torsion_basis(&frame).unwrap();
        (frame, basis)
    }

    #[test]
    fn torsion_basis_evaluation_table() {
        let (frame, basis) = setup("sp:1");
        let d = frame.dim();
        // T^o(xi_1, xi_2) = xi_3
        assert!((basis.t_o[[0, 1, 2]] - 1.0).abs() < 1e-14);
        // T^o(X, -) = 0 for horizontal X
        for x in 3..d {
            for y in 0..d {
                for out in 0..d {
                    assert_eq!(basis.t_o[[x, y, out]], 0.0);
                }
            }
        }
        // T^{rs}(X, xi_j) = delta_rj phi_s X for horizontal X
        for r in 0..3 {
            for s in 0..3 {
                for j in 0..3 {
                    for x in 3..d {
                        for out in 0..d {
                            let want = if r == j { frame.phi[s][[out, x]] } else { 0.0 };
                            assert!(
                                (basis.t_rs[r][s][[x, j, out]] - want).abs() < 1e-12,
                                "table entry T^{{{r}{s}}}(X, xi_{j})"
                            );
                        }
                    }
                }
            }
        }
        // T^{rs}(xi_i, xi_{i+1}) = -delta_rs xi_{i+2}
        for r in 0..3 {
            for s in 0..3 {
                for i in 0..3 {
                    let j = (i + 1) % 3;
                    let k = (i + 2) % 3;
                    for out in 0..d {
                        let want = if r == s && out == k { -1.0 } else { 0.0 };
                        assert!(
                            (basis.t_rs[r][s][[i, j, out]] - want).abs() < 1e-12,
                            "T^{{{r}{s}}}(xi_{i}, xi_{j}) out {out}"
                        );
                    }
                }
            }
        }
        // vertical output for horizontal arguments
        for r in 0..3 {
            for s in 0..3 {
                for x in 3..d {
                    for y in 3..d {
                        for out in 3..d {
                            assert!(basis.t_rs[r][s][[x, y, out]].abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn nomizu_round_trip_recovers_each_torsion() {
        let (frame, basis) = setup("su:3");
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let spec = random_spec(&mut rng, Family::Su);
            let t = torsion_from_spec(&basis, &spec).unwrap();
            let alpha = connection_from_spec(&frame, &basis, &spec).unwrap();
            let t_back = nomizu::torsion(&frame.core, &alpha);
            assert!(linalg::max_abs((&t - &t_back).iter()) < 1e-10);
            let (skew, resid) = nomizu::is_skew(&frame.core, &alpha);
            assert!(skew, "spec connection must be skew ({resid:.2e})");
        }
    }

    #[test]
    fn distinguished_connection_parallelizes_the_reeb_fields() {
        for id in ["sp:1", "sp:2", "su:3"] {
            let (frame, basis) = setup(id);
            let spec = ConnectionSpec::from_b(4.0, Array2::eye(3) * 2.0);
            let v = classify(&frame, &basis, &spec).unwrap();
            assert!(v.parallelizes_reeb, "{id}: nabla xi != 0");
            assert!(v.metric && v.skew);
            assert!(v.phi_compatible, "{id}: not phi-compatible");
            assert_eq!(v.gamma, Some(v.gamma.unwrap()));
            assert!((v.gamma.unwrap() - (-2.0)).abs() < 1e-10, "gamma = a - 6");
            assert!(v.ricci_symmetric);
            assert!(v.s_einstein, "{id}: distinguished connection is S-Einstein");
        }
    }

    #[test]
    fn canonical_connection_has_parallel_torsion_but_is_not_einstein() {
        let (frame, basis) = setup("sp:1");
        let spec = ConnectionSpec::from_b(0.0, Array2::eye(3) * 2.0);
        let v = classify(&frame, &basis, &spec).unwrap();
        assert!(v.parallel_torsion);
        assert!(!v.einstein);
        assert!((v.gamma.unwrap() - (-6.0)).abs() < 1e-10);
        assert!(v.phi_compatible);
    }

    #[test]
    fn einstein_family_on_the_seven_sphere() {
        let (frame, basis) = setup("sp:1");
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let spec = random_einstein_member(&mut rng, Family::Sp);
            let v = classify(&frame, &basis, &spec).unwrap();
            assert!(v.einstein, "member not Einstein: {:?}", spec);
            let b2 = spec.b.iter().map(|x| x * x).sum::<f64>();
            let want = 42.0 - 3.5 * b2;
            assert!(
                (v.scalar_curvature - want).abs() < 1e-8,
                "scalar {} want {want}",
                v.scalar_curvature
            );
            assert!(criteria::einstein_member(&spec, 1e-9));
        }
    }

    #[test]
    fn g2_structure_torsion_is_einstein_but_not_parallel() {
        let (frame, basis) = setup("sp:1");
        // (a, B) = (4, I_3): the canonical G2-structure torsion; its lowered
        // form is (1/2) sum eta_i ^ d eta_i + 4 eta_1 ^ eta_2 ^ eta_3
        let spec = ConnectionSpec::from_b(4.0, Array2::eye(3));
        let t = torsion_from_spec(&basis, &spec).unwrap();
        // check the 3-form against (1/2) sum eta d eta + 4 vol identity:
        // on Reeb triples the d eta part contributes -2 per structure
        let gamma = t[[0, 1, 2]];
        assert!((gamma - (4.0 - 3.0)).abs() < 1e-12, "omega(xi,xi,xi) = a - 3");
        let v = classify(&frame, &basis, &spec).unwrap();
        assert!(v.einstein);
        assert!(!v.parallel_torsion, "G2 torsion is not parallel");
        assert!(!v.phi_compatible);
    }

    #[test]
    fn so3_action_preserves_verdicts() {
        let (frame, basis) = setup("sp:1");
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..5 {
            let spec = random_einstein_member(&mut rng, Family::Sp);
            let p = linalg::random_so3(&mut rng);
            let spec2 = spec.so3_action(&p).unwrap();
            let v1 = classify(&frame, &basis, &spec).unwrap();
            let v2 = classify(&frame, &basis, &spec2).unwrap();
            assert_eq!(v1.einstein, v2.einstein);
            assert_eq!(v1.s_einstein, v2.s_einstein);
            assert_eq!(v1.ricci_symmetric, v2.ricci_symmetric);
            assert_eq!(v1.parallel_torsion, v2.parallel_torsion);
        }
        // identity acts trivially
        let spec = random_spec(&mut rng, Family::Sp);
        let id3: Array2<f64> = Array2::eye(3);
        let spec2 = spec.so3_action(&id3).unwrap();
        assert!(linalg::max_abs((&spec.b - &spec2.b).iter()) < 1e-15);
        // non-special-orthogonal input is refused
        let bad = Array2::eye(3) * 2.0;
        assert!(spec.so3_action(&bad).is_err());
    }

    #[test]
    fn distinguished_torsion_evaluation_table() {
        // T = 4 T^o + 2 sum_r T^{rr} gives T(xi_i, xi_{i+1}) = -2 xi_{i+2}
        // and T(X, xi_i) = 2 phi_i X (the latter follows from nabla xi = 0
        // together with nabla^g xi_i = -phi_i; a coefficient 4 would
        // contradict Reeb parallelism and skewness of the lowered form)
        let (frame, basis) = setup("sp:2");
        let spec = ConnectionSpec::from_b(4.0, Array2::eye(3) * 2.0);
        let t = torsion_from_spec(&basis, &spec).unwrap();
        let d = frame.dim();
        for i in 0..3 {
            let j = (i + 1) % 3;
            let k = (i + 2) % 3;
            for out in 0..d {
                let want = if out == k { -2.0 } else { 0.0 };
                assert!((t[[i, j, out]] - want).abs() < 1e-12);
            }
            for x in 3..d {
                for out in 0..d {
                    let want = 2.0 * frame.phi[i][[out, x]];
                    assert!(
                        (t[[x, i, out]] - want).abs() < 1e-12,
                        "T(X, xi) = 2 phi X"
                    );
                }
            }
        }
        // and on horizontal pairs T(X,Y) = 2 sum_r Phi_r(X,Y) xi_r
        for x in 3..d {
            for y in 3..d {
                for r in 0..3 {
                    let want = 2.0 * frame.phi[r][[x, y]];
                    assert!((t[[x, y, r]] - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn spinor_compatible_matrix_lies_in_co3_with_the_stated_norm() {
        // the reported family of torsion matrices admitting parallel spinors
        // in dimension 7: B = rho M(a,b,c,d), rho = 1/(6(a^2+b^2+c^2+d^2));
        // one static check that B is conformal with |B|^2 = 1/12
        let (a, b, c, d) = (1.0f64, 2.0, -3.0, 4.0);
        let m = array![
            [
                a * a - b * b - c * c + d * d,
                2.0 * (a * b + c * d),
                2.0 * (a * c - b * d)
            ],
            [
                2.0 * (a * b - c * d),
                -a * a + b * b - c * c + d * d,
                2.0 * (b * c + a * d)
            ],
            [
                2.0 * (a * c + b * d),
                2.0 * (b * c - a * d),
                -a * a - b * b + c * c + d * d
            ]
        ];
        let rho = 1.0 / (6.0 * (a * a + b * b + c * c + d * d));
        let bm = m * rho;
        assert!(criteria::in_co3(&bm, 1e-10));
        let norm2 = bm.iter().map(|x| x * x).sum::<f64>();
        assert!((norm2 - 1.0 / 12.0).abs() < 1e-12, "|B|^2 = {norm2}");
    }

    #[test]
    fn aloff_wallach_einstein_member_with_nonzero_c() {
        // c = (1,0,0), B the rotation-block matrix at theta = pi/4, a = a_+
        let (frame, basis) = setup("su:3");
        let th = std::f64::consts::FRAC_PI_4;
        let b = array![
            [0.0, 0.0, 0.0],
            [th.cos(), -th.sin(), 0.0],
            [-th.sin(), -th.cos(), 0.0]
        ];
        let c = array![1.0, 0.0, 0.0];
        let b2 = b.iter().map(|x| x * x).sum::<f64>();
        let a = b.diag().sum() + ((b2 + 1.0) / 3.0).sqrt();
        let spec = ConnectionSpec::new(a, b, c, Family::Su).unwrap();
        assert!(criteria::einstein_member(&spec, 1e-9));
        let v = classify(&frame, &basis, &spec).unwrap();
        assert!(v.einstein, "residuals: {:?}", v.residuals);
        // scalar curvature 42 - 7/2 (|B|^2 + |c|^2) = 42 - 10.5
        assert!((v.scalar_curvature - (42.0 - 3.5 * 3.0)).abs() < 1e-8);
    }

    #[test]
    fn formulicas_identity_cross_checked_on_random_specs() {
        // sym_skew_ricci internally verifies Sym = Ric^g - S/4 and
        // Skew = div(T)/2; run it across a sample of specs
        let (frame, basis) = setup("su:3");
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        for _ in 0..100 {
            let spec = random_spec(&mut rng, Family::Su);
            let alpha = connection_from_spec(&frame, &basis, &spec).unwrap();
            nomizu::sym_skew_ricci(&frame.core, &alpha).unwrap();
        }
    }

    #[test]
    fn c_coefficients_rejected_outside_su() {
        let err = ConnectionSpec::new(
            0.0,
            Array2::zeros((3, 3)),
            array![1.0, 0.0, 0.0],
            Family::Sp,
        );
        assert!(err.is_err());
        let (_, basis) = setup("sp:1");
        let spec = ConnectionSpec {
            a: 0.0,
            b: Array2::zeros((3, 3)),
            c: array![1.0, 0.0, 0.0],
        };
        assert!(torsion_from_spec(&basis, &spec).is_err());
    }
}
