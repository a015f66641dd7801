//! The seven families of reductive pairs carrying homogeneous 3-Sasakian
//! structures: quotients of Sp(n+1), SO(k), SU(m) and the five exceptional
//! groups, each presented as `g = h + m` with a distinguished sp(1) inside
//! `m` and the normalized invariant metric on `m`.

use crate::composition::{select_independent, CompositionAlgebra};
use crate::jordan::JordanAlgebra;
use crate::lie::{matrix_algebra_from_generators, BilinearForm, LieAlgebra, Subspace};
use crate::linalg;
use crate::tits::build_tits;
use crate::{Error, Result};
use ndarray::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Sp,
    So,
    Su,
    G2,
    F4,
    E6,
    E7,
    E8,
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::Sp => "sp",
            Family::So => "so",
            Family::Su => "su",
            Family::G2 => "g2",
            Family::F4 => "f4",
            Family::E6 => "e6",
            Family::E7 => "e7",
            Family::E8 => "e8",
        }
    }
}

/// Space identifier: `sp:<n>`, `so:<k>`, `su:<m>`, `g2`, `f4`, `e6`, `e7`, `e8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceId {
    pub family: Family,
    /// n for sp, k for so, m for su; 0 for the exceptional cases
    pub size: usize,
}

impl SpaceId {
    pub fn parse(s: &str) -> Result<SpaceId> {
        let lower = s.trim().to_ascii_lowercase();
        let (fam, size) = match lower.as_str() {
            "g2" => (Family::G2, 0),
            "f4" => (Family::F4, 0),
            "e6" => (Family::E6, 0),
            "e7" => (Family::E7, 0),
            "e8" => (Family::E8, 0),
            other => {
                let (name, num) = other.split_once(':').ok_or_else(|| {
                    Error::Usage(format!(
                        "unknown space id {s:?}; expected sp:<n>, so:<k>, su:<m>, g2, f4, e6, e7 or e8"
                    ))
                })?;
                let v: usize = num
                    .parse()
                    .map_err(|_| Error::Usage(format!("bad size in space id {s:?}")))?;
                match name {
                    "sp" => {
                        if v < 1 {
                            return Err(Error::Usage(
                                "sp:<n> requires n >= 1 (the 3-dimensional n = 0 case is out of scope)"
                                    .into(),
                            ));
                        }
                        (Family::Sp, v)
                    }
                    "so" => {
                        if v < 7 {
                            return Err(Error::Usage("so:<k> requires k >= 7".into()));
                        }
                        (Family::So, v)
                    }
                    "su" => {
                        if v < 3 {
                            return Err(Error::Usage("su:<m> requires m >= 3".into()));
                        }
                        (Family::Su, v)
                    }
                    _ => {
                        return Err(Error::Usage(format!("unknown family in space id {s:?}")))
                    }
                }
            }
        };
        Ok(SpaceId { family: fam, size })
    }
}

impl std::fmt::Display for SpaceId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.family {
            Family::Sp | Family::So | Family::Su => {
                write!(f, "{}:{}", self.family.label(), self.size)
            }
            _ => write!(f, "{}", self.family.label()),
        }
    }
}

/// The numeric data every tensor computation runs on: brackets split along
/// `g = h + m` in the orthonormal `m`-basis (Reeb directions first), and the
/// isotropy action on `m`.
#[derive(Debug, Clone)]
pub struct PairCore {
    pub dim_m: usize,
    /// `[e_i, e_j]_m` coordinates: `mbra[[i, j, k]]`
    pub mbra: Array3<f64>,
    /// `[e_i, e_j]_h` coordinates in the h-basis: `hcoef[[i, j, a]]`
    pub hcoef: Array3<f64>,
    /// `ad(h_a)` restricted to `m` (matrices `[out, in]`)
    pub had: Vec<Array2<f64>>,
}

impl PairCore {
    /// Abelian toy: no isotropy, all brackets zero (flat space model).
    pub fn flat_abelian(dim_m: usize) -> PairCore {
        PairCore {
            dim_m,
            mbra: Array3::zeros((dim_m, dim_m, dim_m)),
            hcoef: Array3::zeros((dim_m, dim_m, 0)),
            had: Vec::new(),
        }
    }
}

/// A reductive pair `g = h + m` with the 3-Sasakian normalization.
pub struct ReductivePair {
    pub id: SpaceId,
    pub g: LieAlgebra,
    pub h: Subspace,
    /// orthonormal basis of `m` in `g`-coordinates; columns 0..3 are the
    /// Reeb directions
    pub m: Subspace,
    pub n: usize,
    /// e7/e8 carry this flag: their degree-3 equivariant systems are refused
    /// by default
    pub large: bool,
    /// metric on the `m`-basis (identity by construction; kept for checks)
    pub metric: BilinearForm,
    /// Killing form restricted to the `m`-basis
    pub kappa_m: Array2<f64>,
    pub core: PairCore,
    /// SU only: the h-element whose adjoint action is the extra complex
    /// structure on the horizontal space
    pub phi0_matrix: Option<Array2<f64>>,
    /// Sp only: Ad of the isotropy component `diag(I_n, -1)` on `m`
    pub ad_sigma_m: Option<Array2<f64>>,
}

impl ReductivePair {
    pub fn dim_m(&self) -> usize {
        self.core.dim_m
    }

    pub fn dim_h(&self) -> usize {
        self.h.dim()
    }

    pub fn build(id: SpaceId) -> Result<ReductivePair> {
        match id.family {
            Family::Sp => build_sp(id.size),
            Family::So => build_so(id.size),
            Family::Su => build_su(id.size),
            Family::G2 => build_exceptional(id, 1),
            Family::F4 => build_exceptional(id, 2),
            Family::E6 => build_exceptional(id, 3),
            Family::E7 => build_exceptional(id, 4),
            Family::E8 => build_exceptional(id, 5),
        }
    }

    /// Residual report for the structural invariants of the pair.
    pub fn invariant_residuals(&self) -> Vec<(&'static str, f64)> {
        let d = self.dim_m();
        let mut out = Vec::new();
        // metric Gram is the identity
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.metric.matrix[[i, j]] - want).abs());
            }
        }
        out.push(("metric_orthonormal", worst));
        // [xi_i, xi_j] = 2 eps_ijk xi_k with no h-component
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let mut want = Array1::zeros(d);
                if i != j {
                    let k = 3 - i - j;
                    let sign = if (i + 1) % 3 == j { 2.0 } else { -2.0 };
                    want[k] = sign;
                }
                let got = self.core.mbra.slice(s![i, j, ..]).to_owned();
                worst = worst.max(linalg::max_abs((&got - &want).iter()));
                worst = worst.max(linalg::max_abs(self.core.hcoef.slice(s![i, j, ..]).iter()));
            }
        }
        out.push(("sp1_bracket", worst));
        // kappa(xi_i, xi_i) = -(8 + 4n), off-diagonal 0
        let mut worst = 0.0f64;
        let want = -(8.0 + 4.0 * self.n as f64);
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { want } else { 0.0 };
                worst = worst.max((self.kappa_m[[i, j]] - target).abs());
            }
        }
        out.push(("kappa_reeb", worst));
        // [h, sp(1)] = 0
        let mut worst = 0.0f64;
        for ha in &self.core.had {
            for j in 0..3 {
                worst = worst.max(linalg::max_abs(ha.column(j).iter()));
            }
        }
        out.push(("h_commutes_with_sp1", worst));
        // ad^2(xi_i) = -id on the horizontal part
        let mut worst = 0.0f64;
        for i in 0..3 {
            let adxi = Array2::from_shape_fn((d, d), |(k, j)| self.core.mbra[[i, j, k]]);
            let sq = adxi.dot(&adxi);
            for p in 3..d {
                for q in 3..d {
                    let want = if p == q { -1.0 } else { 0.0 };
                    worst = worst.max((sq[[p, q]] - want).abs());
                }
            }
        }
        out.push(("ad_xi_squared_horizontal", worst));
        // kappa(h, m) = 0 and reductivity were enforced during assembly; they
        // are re-derivable from the stored data, so re-check cheaply here via
        // equivariance of the metric: had matrices are antisymmetric
        let mut worst = 0.0f64;
        for ha in &self.core.had {
            for i in 0..d {
                for j in 0..d {
                    worst = worst.max((ha[[i, j]] + ha[[j, i]]).abs());
                }
            }
        }
        out.push(("isotropy_antisymmetric", worst));
        out
    }
}

// ---------------------------------------------------------------------------
// shared assembly
// ---------------------------------------------------------------------------

/// Finishes a pair: checks the 3-Sasakian data axioms, orthonormalizes the
/// horizontal part, splits all brackets and restricts the isotropy action.
fn assemble_pair(
    id: SpaceId,
    g: LieAlgebra,
    h_vecs: Array2<f64>,
    xi_vecs: Array2<f64>,
    horiz_vecs: Array2<f64>,
    large: bool,
) -> Result<ReductivePair> {
    let dg = g.dim();
    let nh = h_vecs.ncols();
    let nhoriz = horiz_vecs.ncols();
    if nhoriz % 4 != 0 {
        return Err(Error::Construction("horizontal part must have dim 4n".into()));
    }
    let n = nhoriz / 4;
    let d = 3 + nhoriz;
    let kappa = g.killing_form();
    let scale_v = 4.0 * (n as f64 + 2.0);
    let scale_h = 8.0 * (n as f64 + 2.0);

    // Reeb vectors: unit for g = -kappa / (4(n+2)); the construction should
    // deliver kappa(xi_i, xi_i) = -(8+4n) exactly, making them unit already.
    for i in 0..3 {
        let xi = xi_vecs.column(i);
        let k = kappa.eval(&xi, &xi);
        let gnorm = -k / scale_v;
        if (gnorm - 1.0).abs() > 1e-9 {
            return Err(Error::Construction(format!(
                "{id}: Reeb vector {i} has metric norm^2 {gnorm}, expected 1"
            )));
        }
    }
    // orthonormalize the horizontal candidates under -kappa / (8(n+2))
    let mut horiz = horiz_vecs;
    linalg::orthonormalize_with(&mut horiz, |x, y| -kappa.eval(x, y) / scale_h);

    // m basis: Reeb first
    let mut m_basis = Array2::zeros((dg, d));
    for i in 0..3 {
        m_basis.column_mut(i).assign(&xi_vecs.column(i));
    }
    for j in 0..nhoriz {
        m_basis.column_mut(3 + j).assign(&horiz.column(j));
    }

    // kappa(h, m) = 0
    let mut worst = 0.0f64;
    for a in 0..nh {
        for j in 0..d {
            worst = worst
                .max(kappa.eval(&h_vecs.column(a), &m_basis.column(j)).abs());
        }
    }
    if worst > 1e-8 {
        return Err(Error::Construction(format!(
            "{id}: kappa(h, m) != 0 (max {worst:.3e})"
        )));
    }

    // full coordinate solver on [h | m]
    let mut full = Array2::zeros((dg, nh + d));
    for a in 0..nh {
        full.column_mut(a).assign(&h_vecs.column(a));
    }
    for j in 0..d {
        full.column_mut(nh + j).assign(&m_basis.column(j));
    }
    if nh + d != dg {
        return Err(Error::Construction(format!(
            "{id}: h + m does not fill g ({nh} + {d} != {dg})"
        )));
    }
    let solver = pinv_square(&full)?;

    // metric Gram on the m basis (cross blocks use kappa-orthogonality of
    // the vertical and horizontal parts)
    let mut gram = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            let k = kappa.eval(&m_basis.column(i), &m_basis.column(j));
            let scale = match (i < 3, j < 3) {
                (true, true) => -k / scale_v,
                (false, false) => -k / scale_h,
                _ => 0.0,
            };
            gram[[i, j]] = scale;
        }
    }
    for i in 0..3 {
        for j in 3..d {
            let k = kappa.eval(&m_basis.column(i), &m_basis.column(j));
            if k.abs() > 1e-8 {
                return Err(Error::Construction(format!(
                    "{id}: kappa cross block sp(1) x g1 is not zero ({k:.3e})"
                )));
            }
        }
    }

    // brackets of m-basis pairs, split into h and m parts
    let mut mbra = Array3::zeros((d, d, d));
    let mut hcoef = Array3::zeros((d, d, nh));
    for i in 0..d {
        let ad_i = g.ad(&m_basis.column(i));
        let brackets = ad_i.dot(&m_basis); // columns: [m_i, m_j]
        let coords = solver.dot(&brackets); // rows: h coords then m coords
        for j in 0..d {
            for a in 0..nh {
                hcoef[[i, j, a]] = coords[[a, j]];
            }
            for k in 0..d {
                mbra[[i, j, k]] = coords[[nh + k, j]];
            }
        }
    }
    // isotropy action on m, with reductivity check
    let mut had = Vec::with_capacity(nh);
    for a in 0..nh {
        let ad_a = g.ad(&h_vecs.column(a));
        let im = ad_a.dot(&m_basis);
        let coords = solver.dot(&im);
        let hpart = coords.slice(s![..nh, ..]);
        let leak = linalg::max_abs(hpart.iter());
        if leak > 1e-9 {
            return Err(Error::Construction(format!(
                "{id}: [h, m] leaks into h (max {leak:.3e}); decomposition is not reductive"
            )));
        }
        had.push(coords.slice(s![nh.., ..]).to_owned());
    }

    // Killing form on the m basis
    let mut kappa_m = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            kappa_m[[i, j]] = kappa.eval(&m_basis.column(i), &m_basis.column(j));
        }
    }

    let h = Subspace::new(dg, h_vecs)?;
    let m = Subspace::new(dg, m_basis)?;
    Ok(ReductivePair {
        id,
        g,
        h,
        m,
        n,
        large,
        metric: BilinearForm { matrix: gram },
        kappa_m,
        core: PairCore {
            dim_m: d,
            mbra,
            hcoef,
            had,
        },
        phi0_matrix: None,
        ad_sigma_m: None,
    })
}

fn pinv_square(full: &Array2<f64>) -> Result<Array2<f64>> {
    let g = full.t().dot(full);
    let (vals, vecs) = linalg::eigh(&g);
    let vmax = vals[vals.len() - 1];
    if vals[0] <= vmax * 1e-12 {
        return Err(Error::Construction(
            "h + m basis of g is numerically singular".into(),
        ));
    }
    let mut inv = Array2::zeros(g.dim());
    for (i, &l) in vals.iter().enumerate() {
        let u = vecs.column(i).insert_axis(Axis(1));
        inv = inv + &u.dot(&u.t()).mapv(|x| x / l);
    }
    Ok(inv.dot(&full.t()))
}

// ---------------------------------------------------------------------------
// Sp(n+1) / Sp(n): quaternionic matrices, realified
// ---------------------------------------------------------------------------

/// Real 4x4 matrix of left multiplication by the quaternion unit `u`.
fn quat_left(u: usize) -> Array2<f64> {
    let q = CompositionAlgebra::quaternions();
    let mut e = Array1::zeros(4);
    e[u] = 1.0;
    q.left_mul(&e.view())
}

/// Realification of a quaternionic matrix given as coefficient matrices
/// `coef[u]` for the units `1, j1, j2, j3`.
fn realify_quat(coef: &[Array2<f64>; 4]) -> Array2<f64> {
    let k = coef[0].nrows();
    let mut out = Array2::zeros((4 * k, 4 * k));
    for u in 0..4 {
        let lu = quat_left(u);
        for r in 0..k {
            for c in 0..k {
                let v = coef[u][[r, c]];
                if v != 0.0 {
                    for a in 0..4 {
                        for b in 0..4 {
                            out[[4 * r + a, 4 * c + b]] += v * lu[[a, b]];
                        }
                    }
                }
            }
        }
    }
    out
}

fn quat_basis_elem(k: usize, r: usize, c: usize, u: usize) -> [Array2<f64>; 4] {
    // E_rc(e_u) - E_cr(conj e_u)  (anti-Hermitian)
    let mut coef: [Array2<f64>; 4] = std::array::from_fn(|_| Array2::zeros((k, k)));
    coef[u][[r, c]] += 1.0;
    if u == 0 {
        coef[0][[c, r]] -= 1.0;
    } else {
        coef[u][[c, r]] += 1.0;
    }
    coef
}

fn quat_diag_elem(k: usize, r: usize, u: usize) -> [Array2<f64>; 4] {
    let mut coef: [Array2<f64>; 4] = std::array::from_fn(|_| Array2::zeros((k, k)));
    coef[u][[r, r]] = 1.0;
    coef
}

fn build_sp(n: usize) -> Result<ReductivePair> {
    let id = SpaceId {
        family: Family::Sp,
        size: n,
    };
    let k = n + 1;
    // basis: h = sp(n) block first, then m = (xi_1..3, z-columns)
    let mut gens: Vec<Array2<f64>> = Vec::new();
    // sp(n): diagonal imaginary units and off-diagonal pairs in the top block
    for a in 0..n {
        for u in 1..4 {
            gens.push(realify_quat(&quat_diag_elem(k, a, u)));
        }
    }
    for a in 0..n {
        for b in (a + 1)..n {
            for u in 0..4 {
                gens.push(realify_quat(&quat_basis_elem(k, a, b, u)));
            }
        }
    }
    let dim_h = gens.len();
    // Reeb: imaginary units at the corner (n, n)
    for u in 1..4 {
        gens.push(realify_quat(&quat_diag_elem(k, n, u)));
    }
    // horizontal: z-columns E_{a,n}(e_u) - E_{n,a}(conj e_u)
    for a in 0..n {
        for u in 0..4 {
            gens.push(realify_quat(&quat_basis_elem(k, a, n, u)));
        }
    }
    let g = matrix_algebra_from_generators(&gens)?;
    let dg = g.dim();
    let unit = |i: usize| -> Array1<f64> {
        let mut v = Array1::zeros(dg);
        v[i] = 1.0;
        v
    };
    let h_vecs = Array2::from_shape_fn((dg, dim_h), |(r, c)| if r == c { 1.0 } else { 0.0 });
    let mut xi = Array2::zeros((dg, 3));
    for i in 0..3 {
        xi.column_mut(i).assign(&unit(dim_h + i));
    }
    let mut horiz = Array2::zeros((dg, 4 * n));
    for j in 0..4 * n {
        horiz.column_mut(j).assign(&unit(dim_h + 3 + j));
    }
    let mut pair = assemble_pair(id, g, h_vecs, xi, horiz, false)?;

    // Ad(sigma) for sigma = diag(I_n, -1), computed by honest conjugation of
    // the realified matrices and restriction to the m-basis.
    let mut sigma = Array2::zeros((4 * k, 4 * k));
    for r in 0..n {
        for a in 0..4 {
            sigma[[4 * r + a, 4 * r + a]] = 1.0;
        }
    }
    for a in 0..4 {
        sigma[[4 * n + a, 4 * n + a]] = -1.0;
    }
    // vectorized generator basis for coordinates
    let nn = 4 * k * 4 * k;
    let mut basis_mat = Array2::zeros((nn, gens.len()));
    for (j, m) in gens.iter().enumerate() {
        for (idx, &v) in m.iter().enumerate() {
            basis_mat[[idx, j]] = v;
        }
    }
    let d = pair.dim_m();
    let mut ad_sigma = Array2::zeros((d, d));
    for j in 0..d {
        // m-basis column j as a matrix
        let coords = pair.m.basis.column(j);
        let mut mat = Array2::zeros((4 * k, 4 * k));
        for (gi, &c) in coords.iter().enumerate() {
            if c.abs() > 1e-14 {
                mat.scaled_add(c, &gens[gi]);
            }
        }
        let conj = sigma.dot(&mat).dot(&sigma);
        let mut rhs = Array1::zeros(nn);
        for (idx, &v) in conj.iter().enumerate() {
            rhs[idx] = v;
        }
        let (coeff, resid) = linalg::lstsq(&basis_mat, &rhs);
        if resid > 1e-8 {
            return Err(Error::Construction(format!(
                "Ad(sigma) leaves the algebra (residual {resid:.2e})"
            )));
        }
        // g-coordinates -> m-coordinates (h part must vanish)
        let gvec = coeff;
        let mcoords = project_to_m(&pair, &gvec)?;
        ad_sigma.column_mut(j).assign(&mcoords);
    }
    pair.ad_sigma_m = Some(ad_sigma);
    Ok(pair)
}

/// Coordinates of a g-vector in the m-basis; errors if it leaks into h.
fn project_to_m(pair: &ReductivePair, gvec: &Array1<f64>) -> Result<Array1<f64>> {
    let nh = pair.dim_h();
    let d = pair.dim_m();
    let dg = pair.g.dim();
    let mut full = Array2::zeros((dg, nh + d));
    for a in 0..nh {
        full.column_mut(a).assign(&pair.h.basis.column(a));
    }
    for j in 0..d {
        full.column_mut(nh + j).assign(&pair.m.basis.column(j));
    }
    let solver = pinv_square(&full)?;
    let coords = solver.dot(gvec);
    let leak = linalg::max_abs(coords.slice(s![..nh]).iter());
    if leak > 1e-8 {
        return Err(Error::Internal(format!(
            "vector leaks into h ({leak:.2e})"
        )));
    }
    Ok(coords.slice(s![nh..]).to_owned())
}

// ---------------------------------------------------------------------------
// SO(k) / (SO(k-4) x Sp(1))
// ---------------------------------------------------------------------------

/// The two sp(1) blocks inside so(4): `i_minus(alpha)` is the matrix of
/// right multiplication by the conjugate quaternion, `i_plus(alpha)` of left
/// multiplication, on R^4 = H with basis (1, j1, j2, j3).
fn i_minus(alpha: [f64; 3]) -> Array2<f64> {
    let (a1, a2, a3) = (alpha[0], alpha[1], alpha[2]);
    array![
        [0.0, a1, a2, a3],
        [-a1, 0.0, -a3, a2],
        [-a2, a3, 0.0, -a1],
        [-a3, -a2, a1, 0.0]
    ]
}

fn i_plus(alpha: [f64; 3]) -> Array2<f64> {
    let (a1, a2, a3) = (alpha[0], alpha[1], alpha[2]);
    array![
        [0.0, -a1, -a2, -a3],
        [a1, 0.0, -a3, a2],
        [a2, a3, 0.0, -a1],
        [a3, -a2, a1, 0.0]
    ]
}

fn embed_block(k: usize, at: usize, block: &Array2<f64>) -> Array2<f64> {
    let mut m = Array2::zeros((k, k));
    for r in 0..block.nrows() {
        for c in 0..block.ncols() {
            m[[at + r, at + c]] = block[[r, c]];
        }
    }
    m
}

fn build_so(k: usize) -> Result<ReductivePair> {
    let id = SpaceId {
        family: Family::So,
        size: k,
    };
    let n = k - 4;
    let mut gens: Vec<Array2<f64>> = Vec::new();
    // h: so(n) block
    for a in 0..n {
        for b in (a + 1)..n {
            let mut m = Array2::zeros((k, k));
            m[[a, b]] = 1.0;
            m[[b, a]] = -1.0;
            gens.push(m);
        }
    }
    // h: I^- in the trailing 4x4 block
    for i in 0..3 {
        let mut alpha = [0.0; 3];
        alpha[i] = 1.0;
        gens.push(embed_block(k, n, &i_minus(alpha)));
    }
    let dim_h = gens.len();
    // m: Reeb = I^+
    for i in 0..3 {
        let mut alpha = [0.0; 3];
        alpha[i] = 1.0;
        gens.push(embed_block(k, n, &i_plus(alpha)));
    }
    // m: horizontal D-block
    for a in 0..n {
        for c in 0..4 {
            let mut m = Array2::zeros((k, k));
            m[[a, n + c]] = 1.0;
            m[[n + c, a]] = -1.0;
            gens.push(m);
        }
    }
    let g = matrix_algebra_from_generators(&gens)?;
    let dg = g.dim();
    let h_vecs = Array2::from_shape_fn((dg, dim_h), |(r, c)| if r == c { 1.0 } else { 0.0 });
    let mut xi = Array2::zeros((dg, 3));
    for i in 0..3 {
        xi[[dim_h + i, i]] = 1.0;
    }
    let mut horiz = Array2::zeros((dg, 4 * n));
    for j in 0..4 * n {
        horiz[[dim_h + 3 + j, j]] = 1.0;
    }
    assemble_pair(id, g, h_vecs, xi, horiz, false)
}

// ---------------------------------------------------------------------------
// SU(m) / S(U(m-2) x U(1))
// ---------------------------------------------------------------------------

/// Realification of a complex matrix (a + b i -> 2x2 blocks [[a, -b], [b, a]]).
fn realify_complex(re: &Array2<f64>, im: &Array2<f64>) -> Array2<f64> {
    let m = re.nrows();
    let mut out = Array2::zeros((2 * m, 2 * m));
    for r in 0..m {
        for c in 0..m {
            out[[2 * r, 2 * c]] = re[[r, c]];
            out[[2 * r, 2 * c + 1]] = -im[[r, c]];
            out[[2 * r + 1, 2 * c]] = im[[r, c]];
            out[[2 * r + 1, 2 * c + 1]] = re[[r, c]];
        }
    }
    out
}

fn build_su(m: usize) -> Result<ReductivePair> {
    let id = SpaceId {
        family: Family::Su,
        size: m,
    };
    let n = m - 2;
    let zero = || Array2::<f64>::zeros((m, m));
    let mut gens: Vec<Array2<f64>> = Vec::new();

    // h-basis. Middle block indices are 1..=n; corners 0 and m-1.
    // su(n) part: A_ab = E_ab - E_ba, B_ab = i(E_ab + E_ba), diagonal
    // i(E_aa - E_{a+1,a+1}).
    for a in 1..=n {
        for b in (a + 1)..=n {
            let mut re = zero();
            re[[a, b]] = 1.0;
            re[[b, a]] = -1.0;
            gens.push(realify_complex(&re, &zero()));
            let mut im = zero();
            im[[a, b]] = 1.0;
            im[[b, a]] = 1.0;
            gens.push(realify_complex(&zero(), &im));
        }
    }
    for a in 1..n {
        let mut im = zero();
        im[[a, a]] = 1.0;
        im[[a + 1, a + 1]] = -1.0;
        gens.push(realify_complex(&zero(), &im));
    }
    // center of h: diag(-n i / 2, i I_n, -n i / 2), doubled to clear halves
    let mut center = zero();
    center[[0, 0]] = -(n as f64);
    center[[m - 1, m - 1]] = -(n as f64);
    for a in 1..=n {
        center[[a, a]] = 2.0;
    }
    gens.push(realify_complex(&zero(), &center));
    let dim_h = gens.len();

    // Reeb vectors per the su(2) corner identification:
    // xi_1 = diag(i, 0, .., -i); xi_2: w = -1; xi_3: w = -i.
    {
        let mut im = zero();
        im[[0, 0]] = 1.0;
        im[[m - 1, m - 1]] = -1.0;
        gens.push(realify_complex(&zero(), &im));
        let mut re = zero();
        re[[0, m - 1]] = -1.0;
        re[[m - 1, 0]] = 1.0;
        gens.push(realify_complex(&re, &zero()));
        let mut im = zero();
        im[[0, m - 1]] = -1.0;
        im[[m - 1, 0]] = -1.0;
        gens.push(realify_complex(&zero(), &im));
    }
    // horizontal: z1 block (entries at (j, m-1)), then z2 block (at (0, j))
    for j in 1..=n {
        let mut re = zero();
        re[[j, m - 1]] = 1.0;
        re[[m - 1, j]] = -1.0;
        gens.push(realify_complex(&re, &zero()));
        let mut im = zero();
        im[[j, m - 1]] = 1.0;
        im[[m - 1, j]] = 1.0;
        gens.push(realify_complex(&zero(), &im));
    }
    for j in 1..=n {
        let mut re = zero();
        re[[0, j]] = 1.0;
        re[[j, 0]] = -1.0;
        gens.push(realify_complex(&re, &zero()));
        let mut im = zero();
        im[[0, j]] = 1.0;
        im[[j, 0]] = 1.0;
        gens.push(realify_complex(&zero(), &im));
    }

    let g = matrix_algebra_from_generators(&gens)?;
    let dg = g.dim();
    let h_vecs = Array2::from_shape_fn((dg, dim_h), |(r, c)| if r == c { 1.0 } else { 0.0 });
    let mut xi = Array2::zeros((dg, 3));
    for i in 0..3 {
        xi[[dim_h + i, i]] = 1.0;
    }
    let mut horiz = Array2::zeros((dg, 4 * n));
    for j in 0..4 * n {
        horiz[[dim_h + 3 + j, j]] = 1.0;
    }
    let mut pair = assemble_pair(id, g, h_vecs, xi, horiz, false)?;

    // phi_0 = ad(h0)|_m for h0 = (1 + n/2)^{-1} diag(-n i/2, i I_n, -n i/2);
    // the center generator above is 2 h0 (1 + n/2), i.e. (2 + n) h0.
    let mut h0 = Array1::zeros(dg);
    h0[dim_h - 1] = 1.0 / (2.0 + n as f64);
    let ad_h0 = pair.g.ad(&h0.view());
    let im = ad_h0.dot(&pair.m.basis);
    let d = pair.dim_m();
    let mut phi0 = Array2::zeros((d, d));
    for j in 0..d {
        let col = project_to_m(&pair, &im.column(j).to_owned())?;
        phi0.column_mut(j).assign(&col);
    }
    pair.phi0_matrix = Some(phi0);
    Ok(pair)
}

// ---------------------------------------------------------------------------
// exceptional cases via the unified construction
// ---------------------------------------------------------------------------

fn build_exceptional(id: SpaceId, level: usize) -> Result<ReductivePair> {
    let octonions = CompositionAlgebra::octonions();
    let jordan = match level {
        1 => JordanAlgebra::reals(),
        2 => JordanAlgebra::hermitian3(&CompositionAlgebra::reals())?,
        3 => JordanAlgebra::hermitian3(&CompositionAlgebra::complexes())?,
        4 => JordanAlgebra::hermitian3(&CompositionAlgebra::quaternions())?,
        5 => JordanAlgebra::hermitian3(&octonions)?,
        _ => return Err(Error::Usage("exceptional level must be 1..=5".into())),
    };
    let tits = build_tits(&octonions, &jordan)?;
    let dg = tits.dim();
    let nj0 = tits.jordan.dim - 1;
    let large = matches!(id.family, Family::E7 | Family::E8);

    // the graded pieces of Der(O): d_minus/d_plus from the quaternion units,
    // and the odd part spanned by standard derivations D_{H_0, H l}
    let dminus: Vec<Array2<f64>> = (1..4).map(|u| d_sigma_matrix(u, false)).collect();
    let dplus: Vec<Array2<f64>> = (1..4).map(|u| d_sigma_matrix(u, true)).collect();
    for d in dminus.iter().chain(dplus.iter()) {
        let resid = tits.comp.leibniz_residual(d);
        if resid > 1e-12 {
            return Err(Error::Construction(format!(
                "graded sp(1) block is not a derivation (residual {resid:.2e})"
            )));
        }
    }
    let mut odd_cands = Vec::new();
    for u in 1..3 {
        for w in 4..8 {
            let mut a = Array1::zeros(8);
            a[u] = 1.0;
            let mut b = Array1::zeros(8);
            b[w] = 1.0;
            odd_cands.push(tits.comp.derivation(&a.view(), &b.view()));
        }
    }
    let odd = select_independent(&odd_cands, 8);
    if odd.len() != 8 {
        return Err(Error::Construction(format!(
            "odd derivation block has rank {} instead of 8",
            odd.len()
        )));
    }

    // h: I^-, H_0 (x) J_0, Der(J)
    let dim_h = 3 + 3 * nj0 + tits.n_derj;
    let mut h_vecs = Array2::zeros((dg, dim_h));
    let mut col = 0;
    for dm in &dminus {
        h_vecs.column_mut(col).assign(&tits.embed_derc(dm)?);
        col += 1;
    }
    for u in 1..4 {
        for t in 0..nj0 {
            h_vecs[[tits.tensor_index(u, t), col]] = 1.0;
            col += 1;
        }
    }
    for a in 0..tits.n_derj {
        h_vecs[[tits.n_derc + tits.n_tensor + a, col]] = 1.0;
        col += 1;
    }

    // m: Reeb = d_plus, then the odd derivations, then H l (x) J_0
    let mut xi = Array2::zeros((dg, 3));
    for (i, dp) in dplus.iter().enumerate() {
        xi.column_mut(i).assign(&tits.embed_derc(dp)?);
    }
    let nhoriz = 8 + 4 * nj0;
    let mut horiz = Array2::zeros((dg, nhoriz));
    let mut col = 0;
    for o in &odd {
        horiz.column_mut(col).assign(&tits.embed_derc(o)?);
        col += 1;
    }
    for u in 4..8 {
        for t in 0..nj0 {
            horiz[[tits.tensor_index(u, t), col]] = 1.0;
            col += 1;
        }
    }
    assemble_pair(id, tits.algebra, h_vecs, xi, horiz, large)
}

/// Matrix of `d^-_a` (sigma = false) or `d^+_a` (sigma = true) on the
/// octonions for the quaternion unit `a = e_u`:
/// `d^-_a(q) = [a, q]`, `d^-_a(q l) = -(q a) l`;
/// `d^+_a(q) = 0`,      `d^+_a(q l) = (a q) l`.
/// The `d^-` action on the doubled part is `R_{conj(a)} = -R_a`, matching
/// the explicit so(4) block matrices of the orthogonal family; the opposite
/// sign fails the Leibniz rule.
fn d_sigma_matrix(u: usize, plus: bool) -> Array2<f64> {
    let q = CompositionAlgebra::quaternions();
    let mut a = Array1::zeros(4);
    a[u] = 1.0;
    let mut m = Array2::zeros((8, 8));
    for w in 0..4 {
        let mut e = Array1::zeros(4);
        e[w] = 1.0;
        if !plus {
            // action on the quaternion part: [a, q]
            let comm = q.mul(&a.view(), &e.view()) - q.mul(&e.view(), &a.view());
            for r in 0..4 {
                m[[r, w]] = comm[r];
            }
            // action on q l: -(q a) l
            let qa = q.mul(&e.view(), &a.view());
            for r in 0..4 {
                m[[4 + r, 4 + w]] = -qa[r];
            }
        } else {
            let aq = q.mul(&a.view(), &e.view());
            for r in 0..4 {
                m[[4 + r, 4 + w]] = aq[r];
            }
        }
    }
    m
}

// ---------------------------------------------------------------------------
// projective quotient check
// ---------------------------------------------------------------------------

/// Verifies that `Ad(sigma)` (for the disconnected isotropy component of the
/// projective quotient of the sphere) fixes an invariant bilinear map given
/// by its coefficient tensor `alpha[[i, j, k]]`.
pub fn ad_sigma_fixes_bilinear(pair: &ReductivePair, alpha: &Array3<f64>) -> Result<f64> {
    let s = pair
        .ad_sigma_m
        .as_ref()
        .ok_or_else(|| Error::Usage("Ad(sigma) is only defined for the Sp family".into()))?;
    let d = pair.dim_m();
    // residual of S alpha(S^-1 X, S^-1 Y) = alpha(X, Y); S is an involution
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                // sum over preimages
                let mut v = 0.0;
                for p in 0..d {
                    for qq in 0..d {
                        if s[[p, i]].abs() < 1e-14 || s[[qq, j]].abs() < 1e-14 {
                            continue;
                        }
                        for r in 0..d {
                            v += s[[k, r]] * alpha[[p, qq, r]] * s[[p, i]] * s[[qq, j]];
                        }
                    }
                }
                worst = worst.max((v - alpha[[i, j, k]]).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_id_grammar() {
        assert_eq!(SpaceId::parse("sp:2").unwrap().family, Family::Sp);
        assert_eq!(SpaceId::parse("so:7").unwrap().size, 7);
        assert_eq!(SpaceId::parse("g2").unwrap().family, Family::G2);
        assert!(SpaceId::parse("sp:0").is_err());
        assert!(SpaceId::parse("so:6").is_err());
        assert!(SpaceId::parse("su:2").is_err());
        assert!(SpaceId::parse("sl:3").is_err());
        assert_eq!(SpaceId::parse("e8").unwrap().to_string(), "e8");
    }

    fn check_pair(pair: &ReductivePair, dim_g: usize, dim_h: usize, dim_m: usize) {
        assert_eq!(pair.g.dim(), dim_g, "dim g for {}", pair.id);
        assert_eq!(pair.dim_h(), dim_h, "dim h for {}", pair.id);
        assert_eq!(pair.dim_m(), dim_m, "dim m for {}", pair.id);
        for (name, resid) in pair.invariant_residuals() {
            assert!(
                resid <= 1e-9,
                "{}: invariant {name} fails with residual {resid:.3e}",
                pair.id
            );
        }
    }

    #[test]
    fn sp1_pair_has_the_seven_sphere_dimensions() {
        let pair = ReductivePair::build(SpaceId::parse("sp:1").unwrap()).unwrap();
        check_pair(&pair, 10, 3, 7);
        assert_eq!(pair.n, 1);
        assert!(pair.g.check_jacobi(1e-9).pass);
    }

    #[test]
    fn sp2_pair() {
        let pair = ReductivePair::build(SpaceId::parse("sp:2").unwrap()).unwrap();
        check_pair(&pair, 21, 10, 11);
        assert_eq!(pair.n, 2);
    }

    #[test]
    fn so7_pair() {
        let pair = ReductivePair::build(SpaceId::parse("so:7").unwrap()).unwrap();
        check_pair(&pair, 21, 6, 15);
        assert_eq!(pair.n, 3);
        assert!(pair.g.check_jacobi(1e-9).pass);
    }

    #[test]
    fn su3_pair_is_the_seven_dimensional_aloff_wallach_space() {
        let pair = ReductivePair::build(SpaceId::parse("su:3").unwrap()).unwrap();
        check_pair(&pair, 8, 1, 7);
        assert_eq!(pair.n, 1);
        assert!(pair.phi0_matrix.is_some());
    }

    #[test]
    fn su4_pair() {
        let pair = ReductivePair::build(SpaceId::parse("su:4").unwrap()).unwrap();
        check_pair(&pair, 15, 4, 11);
    }

    #[test]
    fn g2_pair() {
        let pair = ReductivePair::build(SpaceId::parse("g2").unwrap()).unwrap();
        check_pair(&pair, 14, 3, 11);
        assert_eq!(pair.n, 2);
    }

    #[test]
    fn phi0_commutes_with_reeb_actions_and_kills_the_vertical_part() {
        let pair = ReductivePair::build(SpaceId::parse("su:3").unwrap()).unwrap();
        let phi0 = pair.phi0_matrix.as_ref().unwrap();
        let d = pair.dim_m();
        // vertical part killed
        for j in 0..3 {
            assert!(linalg::max_abs(phi0.column(j).iter()) < 1e-10);
        }
        // commutes with ad(xi_i) on m (hence with the phi_i)
        for i in 0..3 {
            let adxi =
                Array2::from_shape_fn((d, d), |(k, j)| pair.core.mbra[[i, j, k]]);
            let comm = phi0.dot(&adxi) - adxi.dot(phi0);
            assert!(linalg::max_abs(comm.iter()) < 1e-9);
        }
        // phi0^2 = -id on the horizontal part
        let sq = phi0.dot(phi0);
        for p in 3..d {
            for q in 3..d {
                let want = if p == q { -1.0 } else { 0.0 };
                assert!((sq[[p, q]] - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ad_sigma_is_an_involution_negating_the_horizontal_part() {
        let pair = ReductivePair::build(SpaceId::parse("sp:1").unwrap()).unwrap();
        let s = pair.ad_sigma_m.as_ref().unwrap();
        let d = pair.dim_m();
        let sq = s.dot(s);
        for i in 0..d {
            for j in 0..d {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((sq[[i, j]] - want).abs() < 1e-10, "Ad(sigma)^2 = id");
            }
        }
        // fixes the Reeb part, negates the horizontal part (matrix
        // computation; the sign convention is pinned by conjugation itself)
        for i in 0..d {
            for j in 0..d {
                let want = if i != j {
                    0.0
                } else if i < 3 {
                    1.0
                } else {
                    -1.0
                };
                assert!(
                    (s[[i, j]] - want).abs() < 1e-10,
                    "Ad(sigma) diag structure at ({i},{j}): {}",
                    s[[i, j]]
                );
            }
        }
    }
}
