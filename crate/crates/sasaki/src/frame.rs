//! The 3-Sasakian frame on a reductive pair: Reeb vectors, dual 1-forms,
//! the endomorphism fields and the Levi-Civita multiplication.

use crate::linalg;
use crate::nomizu::{self, AlphaMap};
use crate::zoo::{Family, PairCore, ReductivePair};
use crate::{Error, Result};
use ndarray::prelude::*;

/// Everything downstream computations need, with the pair data folded in.
/// The `m`-basis is orthonormal with the Reeb vectors first, so `xi_i` is
/// the `i`-th unit vector and `eta_i` its dual coordinate.
pub struct SasakiFrame {
    pub core: PairCore,
    pub family: Family,
    pub n: usize,
    pub phi: [Array2<f64>; 3],
    /// extra invariant complex structure (SU family only)
    pub phi0: Option<Array2<f64>>,
    pub alpha_g: AlphaMap,
    /// Killing form on the m-basis
    pub kappa_m: Array2<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityReport {
    pub max_residual: f64,
    pub pass: bool,
}

impl SasakiFrame {
    pub fn dim(&self) -> usize {
        self.core.dim_m
    }

    pub fn xi(&self, i: usize) -> Array1<f64> {
        let mut v = Array1::zeros(self.dim());
        v[i] = 1.0;
        v
    }

    /// `Phi_s(X, Y) = g(X, phi_s Y)`; in the orthonormal basis these are the
    /// matrices of `phi_s` themselves. `s = 0` only for the SU family.
    pub fn fundamental_two_form(&self, s: usize) -> Result<Array2<f64>> {
        match s {
            0 => self
                .phi0
                .clone()
                .ok_or_else(|| Error::Usage("Phi_0 exists only for the SU family".into())),
            1..=3 => Ok(self.phi[s - 1].clone()),
            _ => Err(Error::Usage(format!("two-form index {s} out of range"))),
        }
    }

    /// Exterior derivative of the invariant 1-form `eta_r` at the origin:
    /// `d eta_r (X, Y) = -eta_r([X, Y]_m)`.
    pub fn d_eta(&self, r: usize) -> Array2<f64> {
        let d = self.dim();
        let mut out = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                out[[i, j]] = -self.core.mbra[[i, j, r]];
            }
        }
        out
    }

    /// Residual of `alpha^g(X, phi_i Y) - phi_i(alpha^g(X, Y))
    ///  - g(X,Y) xi_i + eta_i(Y) X = 0` over all basis pairs.
    pub fn check_sasaki_identity(&self) -> IdentityReport {
        let max_residual = sasaki_identity_residual(&self.core, &self.alpha_g.a, &self.phi);
        IdentityReport {
            max_residual,
            pass: max_residual <= 1e-9,
        }
    }
}

fn sasaki_identity_residual(core: &PairCore, a: &Array3<f64>, phi: &[Array2<f64>; 3]) -> f64 {
    let d = core.dim_m;
    let a_flat_ij = a.to_shape((d * d, d)).unwrap();
    let mut worst = 0.0f64;
    for (i, ph) in phi.iter().enumerate() {
        // alpha(X, phi Y): contract middle slot of a with phi
        let mut lhs = Array3::zeros((d, d, d));
        for x in 0..d {
            let ax = a.slice(s![x, .., ..]); // [y, out]
            let t = ph.t().dot(&ax); // [y', out] with y' = phi-image slot
            lhs.slice_mut(s![x, .., ..]).assign(&t);
        }
        // phi(alpha(X,Y))
        let rhs = a_flat_ij.dot(&ph.t());
        let rhs = rhs.into_shape_with_order((d, d, d)).unwrap();
        let mut resid = lhs - rhs;
        // - g(X,Y) xi_i + eta_i(Y) X
        for x in 0..d {
            for y in 0..d {
                if x == y {
                    resid[[x, y, i]] -= 1.0;
                }
                resid[[x, y, x]] += if y == i { 1.0 } else { 0.0 };
            }
        }
        worst = worst.max(linalg::max_abs(resid.iter()));
    }
    worst
}

/// Assembles the frame and verifies every structural identity at 1e-9,
/// naming the first one that fails.
pub fn make_frame(pair: &ReductivePair) -> Result<SasakiFrame> {
    let core = pair.core.clone();
    let d = core.dim_m;
    // phi_i: half of ad(xi_i) on the vertical part, ad(xi_i) horizontally
    let phi: [Array2<f64>; 3] = std::array::from_fn(|i| {
        let mut m = Array2::zeros((d, d));
        for j in 0..d {
            let scale = if j < 3 { 0.5 } else { 1.0 };
            for k in 0..d {
                m[[k, j]] = scale * core.mbra[[i, j, k]];
            }
        }
        m
    });
    let alpha_g = nomizu::levi_civita(&core)?;

    let fail = |name: &str, resid: f64| -> Error {
        Error::Construction(format!(
            "frame identity {name} fails for {} (residual {resid:.3e})",
            pair.id
        ))
    };

    // phi_i^2 = -id + eta_i (x) xi_i
    for (i, ph) in phi.iter().enumerate() {
        let sq = ph.dot(ph);
        let mut worst = 0.0f64;
        for p in 0..d {
            for q in 0..d {
                let mut want = if p == q { -1.0 } else { 0.0 };
                if p == i && q == i {
                    want += 1.0;
                }
                worst = worst.max((sq[[p, q]] - want).abs());
            }
        }
        if worst > 1e-9 {
            return Err(fail("phi^2 = -id + eta (x) xi", worst));
        }
    }
    // phi_i phi_j = eps_ijk phi_k + eta_j (x) xi_i for i != j
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let k = 3 - i - j;
            let sign = if (i + 1) % 3 == j { 1.0 } else { -1.0 };
            let prod = phi[i].dot(&phi[j]);
            let mut worst = 0.0f64;
            for p in 0..d {
                for q in 0..d {
                    let mut want = sign * phi[k][[p, q]];
                    if p == i && q == j {
                        want += 1.0;
                    }
                    worst = worst.max((prod[[p, q]] - want).abs());
                }
            }
            if worst > 1e-9 {
                return Err(fail("phi_i phi_j = eps phi_k + eta_j (x) xi_i", worst));
            }
        }
    }
    // phi antisymmetric (the xi_i are Killing)
    for ph in &phi {
        let mut worst = 0.0f64;
        for p in 0..d {
            for q in 0..d {
                worst = worst.max((ph[[p, q]] + ph[[q, p]]).abs());
            }
        }
        if worst > 1e-9 {
            return Err(fail("g(phi X, Y) antisymmetric", worst));
        }
    }
    // alpha^g is torsion-free and metric
    {
        let t = nomizu::torsion(&core, &alpha_g);
        let worst = linalg::max_abs(t.iter());
        if worst > 1e-9 {
            return Err(fail("alpha^g torsion-free", worst));
        }
        let (_, worst) = nomizu::is_metric(&alpha_g);
        if worst > 1e-9 {
            return Err(fail("alpha^g metric", worst));
        }
    }
    // the defining Sasakian identity for each of the three structures
    {
        let worst = sasaki_identity_residual(&core, &alpha_g.a, &phi);
        if worst > 1e-9 {
            return Err(fail("covariant derivative of phi", worst));
        }
    }
    // d eta_r = 2 Phi_r
    for r in 0..3 {
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let de = -core.mbra[[i, j, r]];
                worst = worst.max((de - 2.0 * phi[r][[i, j]]).abs());
            }
        }
        if worst > 1e-9 {
            return Err(fail("d eta = 2 Phi", worst));
        }
    }

    let phi0 = pair.phi0_matrix.clone();
    Ok(SasakiFrame {
        core,
        family: pair.id.family,
        n: pair.n,
        phi,
        phi0,
        alpha_g,
        kappa_m: pair.kappa_m.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::SpaceId;

    fn frame(id: &str) -> SasakiFrame {
        let pair = ReductivePair::build(SpaceId::parse(id).unwrap()).unwrap();
        make_frame(&pair).unwrap()
    }

    #[test]
    fn frames_build_and_pass_the_sasaki_identity() {
        for id in ["sp:1", "sp:2", "so:7", "su:3", "g2"] {
            let f = frame(id);
            let rep = f.check_sasaki_identity();
            assert!(rep.pass, "{id}: residual {:.3e}", rep.max_residual);
        }
    }

    #[test]
    fn scaled_phi_breaks_the_identity() {
        let f = frame("sp:1");
        let phi_bad: [Array2<f64>; 3] = std::array::from_fn(|i| &f.phi[i] * 1.01);
        let resid = sasaki_identity_residual(&f.core, &f.alpha_g.a, &phi_bad);
        assert!(resid > 1e-3, "scaled phi should violate the identity");
    }

    #[test]
    fn alpha_g_vanishes_on_vertical_horizontal_pairs() {
        let f = frame("sp:1");
        let d = f.dim();
        for i in 0..3 {
            for j in 3..d {
                let slice = f.alpha_g.a.slice(s![i, j, ..]);
                assert!(linalg::max_abs(slice.iter()) < 1e-12);
            }
        }
    }

    #[test]
    fn alpha_g_on_reeb_pairs_is_half_the_bracket() {
        let f = frame("sp:1");
        // alpha^g(xi_1, xi_2) = xi_3
        let a12 = f.alpha_g.a.slice(s![0, 1, ..]).to_owned();
        let mut want = Array1::zeros(f.dim());
        want[2] = 1.0;
        assert!(linalg::max_abs((&a12 - &want).iter()) < 1e-12);
    }

    #[test]
    fn phi_kills_its_own_reeb_vector() {
        let f = frame("su:3");
        for i in 0..3 {
            let xi = f.xi(i);
            let image = f.phi[i].dot(&xi);
            assert!(linalg::max_abs(image.iter()) < 1e-12);
        }
    }

    #[test]
    fn two_forms_are_antisymmetric_and_match_phi_on_reeb_triples() {
        let f = frame("sp:2");
        for s in 1..=3 {
            let form = f.fundamental_two_form(s).unwrap();
            assert!(linalg::max_abs((&form + &form.t()).iter()) < 1e-10);
        }
        // frozen oracle: Phi_1(xi_2, xi_3) = g(xi_2, phi_1 xi_3)
        //   = g(xi_2, (1/2)[xi_1, xi_3]) = g(xi_2, -xi_2) = -1
        let phi1 = f.fundamental_two_form(1).unwrap();
        assert!((phi1[[1, 2]] - (-1.0)).abs() < 1e-12);
        // general pattern Phi_i(xi_j, xi_k) = eps_{ikj}
        let eps = |i: usize, j: usize, k: usize| -> f64 {
            if i == j || j == k || i == k {
                0.0
            } else if (i + 1) % 3 == j {
                1.0
            } else {
                -1.0
            }
        };
        for i in 0..3 {
            let phi_form = f.fundamental_two_form(i + 1).unwrap();
            for j in 0..3 {
                for k in 0..3 {
                    assert!(
                        (phi_form[[j, k]] - eps(i, k, j)).abs() < 1e-12,
                        "Phi_{} (xi_{}, xi_{})",
                        i + 1,
                        j + 1,
                        k + 1
                    );
                }
            }
        }
    }

    #[test]
    fn phi0_two_form_requested_outside_su_is_an_error() {
        let f = frame("sp:1");
        assert!(f.fundamental_two_form(0).is_err());
        let g = frame("su:3");
        assert!(g.fundamental_two_form(0).is_ok());
    }

    #[test]
    fn d_eta_oracle_brute_force() {
        // d eta computed directly from the invariant-form rule matches
        // 2 Phi_r entrywise, fixing the factor 2 once and for all
        let f = frame("su:3");
        for r in 0..3 {
            let de = f.d_eta(r);
            let phi_form = f.fundamental_two_form(r + 1).unwrap();
            let resid = linalg::max_abs((&de - &(&phi_form * 2.0)).iter());
            assert!(resid < 1e-10, "d eta_{} != 2 Phi (resid {resid:.2e})", r + 1);
        }
    }
}
