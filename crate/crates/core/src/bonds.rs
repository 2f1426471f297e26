//! Bonds: points of the configuration curve on the boundary `x0 = 0`, and
//! the two necessary conditions for self-motions built on them.

use nalgebra::{DMatrix, DVector};
use num::traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kinmap::{
    gamma_residuals, parametrize, Hyperplane, MotionParams, Parametrization, Pentapod,
};
use crate::polyalg::scalar::{gauss, rat_to_f64, rationalize};
use crate::polyalg::{
    complex_roots_of, numeric_rank, resultant, MPoly, Matrix, RealScalar, Scalar, UPoly,
};
use crate::rearrange::exact;
use crate::{GaussRat, Rat, C64};

/// Preferred pivots `(n0, y0, y1, y2, y3)`.
pub const BOND_PIVOTS: [usize; 5] = [0, 5, 6, 7, 8];

#[derive(Clone, Debug)]
pub struct Bond {
    /// Scaled so that the coordinate of largest modulus is 1.
    pub params: MotionParams<C64>,
    /// Exact coordinates when the bond is Gaussian rational.
    pub exact: Option<MotionParams<GaussRat>>,
    /// 2 when the tangency matrix is rank deficient, else 1 (an estimate).
    pub multiplicity: usize,
    /// Index of the complex-conjugate bond in the same list.
    pub conjugate: Option<usize>,
}

impl Bond {
    /// Same point of projective space as `other`.
    pub fn same_as(&self, other: &Bond, tol: f64) -> bool {
        crate::geom::proportional(&self.params.to_array(), &other.params.to_array(), tol)
    }
}

#[derive(Clone, Debug)]
pub struct NecessityVerdict {
    pub has_bond: bool,
    pub tangency_rank_deficient: bool,
    pub bonds: Vec<Bond>,
    /// Smallest tangency rank over all bonds.
    pub jacobian_rank: Option<usize>,
}

/// Lift real constraints to Gaussian rationals.
pub fn complexify_hyperplanes(hs: &[Hyperplane<Rat>]) -> Vec<Hyperplane<GaussRat>> {
    hs.iter()
        .map(|h| h.map(|c| gauss(c.clone(), Rat::zero())))
        .collect()
}

#[derive(Clone, Debug)]
struct Root {
    z: C64,
    exact: Option<GaussRat>,
}

fn gauss_f64(z: &GaussRat) -> C64 {
    C64::new(rat_to_f64(&z.re), rat_to_f64(&z.im))
}

/// Try to recognize a Gaussian rational with small denominators.
fn recognize(z: C64, f: &UPoly<GaussRat>) -> Option<GaussRat> {
    for den in [1_000, 1_000_000] {
        let re = rationalize(z.re, den)?;
        let im = rationalize(z.im, den)?;
        let c = gauss(re, im);
        if f.eval(&c).is_zero() {
            return Some(c);
        }
    }
    None
}

fn roots_of(f: &UPoly<GaussRat>) -> Vec<Root> {
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sf = f.squarefree_part();
    complex_roots_of(&sf)
        .into_iter()
        .map(|z| Root {
            exact: recognize(z, &sf),
            z,
        })
        .collect()
}

fn univariate(p: &MPoly<GaussRat>, var: usize) -> UPoly<GaussRat> {
    p.to_upoly(var).expect("single variable left")
}

fn eval_c(p: &MPoly<GaussRat>, v: &[C64]) -> C64 {
    p.eval_with(v, gauss_f64)
}

/// Gauss–Newton polish of a common zero of `forms` in the chart where the
/// variable `fixed` equals 1.
fn polish(forms: &[MPoly<GaussRat>], mut v: [C64; 3], fixed: usize) -> [C64; 3] {
    let vars: Vec<usize> = (0..3).filter(|&k| k != fixed).collect();
    let grads: Vec<Vec<MPoly<GaussRat>>> = forms
        .iter()
        .map(|f| vars.iter().map(|&k| f.derivative(k)).collect())
        .collect();
    for _ in 0..20 {
        let r = DVector::from_iterator(forms.len(), forms.iter().map(|f| eval_c(f, &v)));
        let j = DMatrix::from_fn(forms.len(), vars.len(), |i, k| eval_c(&grads[i][k], &v));
        let Ok(step) = j.svd(true, true).solve(&r, 1e-14) else {
            break;
        };
        for (k, &var) in vars.iter().enumerate() {
            v[var] -= step[k];
        }
        if step.norm() < 1e-15 {
            break;
        }
    }
    v
}

/// Common projective zeros of ternary forms, exact where the coordinates
/// turn out to be Gaussian rational.
fn common_zeros(forms: &[MPoly<GaussRat>]) -> Result<Vec<(Vec<C64>, Option<Vec<GaussRat>>)>> {
    let mut out = Vec::new();
    // Chart u2 = 1.
    let chart: Vec<MPoly<GaussRat>> = forms.iter().map(|f| f.subs(2, &GaussRat::one())).collect();
    let mut r: Option<UPoly<GaussRat>> = None;
    for i in 0..chart.len() {
        for j in i + 1..chart.len() {
            let res = resultant(&chart[i], &chart[j], 0)?;
            if res.is_zero() {
                continue;
            }
            let u = univariate(&res, 1);
            r = Some(match r {
                None => u,
                Some(prev) => prev.gcd(&u),
            });
        }
    }
    let single = chart.iter().filter(|f| !f.is_zero()).count() <= 1;
    let Some(r) = r else {
        if single {
            return Err(Error::Degenerate(
                "a single boundary quadric: the bond set is a curve".into(),
            ));
        }
        return Err(Error::Degenerate(
            "the boundary quadrics share a curve: infinitely many bonds".into(),
        ));
    };
    let tol = 1e-8;
    for root in roots_of(&r) {
        let fixed: Vec<MPoly<GaussRat>> = match &root.exact {
            Some(e) => chart.iter().map(|f| f.subs(1, e)).collect(),
            None => Vec::new(),
        };
        if let Some(e1) = &root.exact {
            if fixed.iter().all(|f| f.is_zero()) {
                return Err(Error::Degenerate(
                    "the boundary quadrics contain a whole line".into(),
                ));
            }
            let g = fixed
                .iter()
                .map(|f| univariate(f, 0))
                .filter(|u| !u.is_zero())
                .fold(None::<UPoly<GaussRat>>, |acc, u| {
                    Some(match acc {
                        None => u,
                        Some(prev) => prev.gcd(&u),
                    })
                });
            if let Some(g) = g {
                for r0 in roots_of(&g) {
                    let v = [r0.z, gauss_f64(e1), C64::one()];
                    let ex = r0.exact.map(|e0| vec![e0, e1.clone(), GaussRat::one()]);
                    let v = if ex.is_some() { v } else { polish(forms, v, 2) };
                    out.push((v.to_vec(), ex));
                }
            }
            continue;
        }
        // Numeric u1: candidates from the first form that still involves u0.
        let cands: Vec<C64> = chart
            .iter()
            .find_map(|f| {
                let coeffs: Vec<C64> = f
                    .coeffs_in(0)
                    .iter()
                    .map(|c| eval_c(c, &[C64::zero(), root.z]))
                    .collect();
                let up = UPoly::new(coeffs);
                (up.degree().unwrap_or(0) > 0).then(|| complex_roots_of(&up))
            })
            .unwrap_or_default();
        for c in cands {
            let v = polish(forms, [c, root.z, C64::one()], 2);
            let scale = 1.0 + v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if forms
                .iter()
                .all(|f| eval_c(f, &v).norm() <= tol * scale * scale)
            {
                out.push((v.to_vec(), None));
            }
        }
    }
    // Line u2 = 0, chart u1 = 1.
    let line: Vec<MPoly<GaussRat>> = forms
        .iter()
        .map(|f| f.subs(2, &GaussRat::zero()).subs(1, &GaussRat::one()))
        .collect();
    let g = line
        .iter()
        .map(|f| univariate(f, 0))
        .fold(None::<UPoly<GaussRat>>, |acc, u| {
            Some(match acc {
                None => u,
                Some(prev) => prev.gcd(&u),
            })
        });
    if let Some(g) = g {
        if g.is_zero() {
            return Err(Error::Degenerate(
                "the boundary quadrics contain a whole line".into(),
            ));
        }
        for r0 in roots_of(&g) {
            let ex = r0
                .exact
                .map(|e0| vec![e0, GaussRat::one(), GaussRat::zero()]);
            out.push((vec![r0.z, C64::one(), C64::zero()], ex));
        }
    }
    // The point (1 : 0 : 0).
    let corner = [GaussRat::one(), GaussRat::zero(), GaussRat::zero()];
    if forms.iter().all(|f| f.eval(&corner).is_zero()) {
        out.push((
            vec![C64::one(), C64::zero(), C64::zero()],
            Some(corner.to_vec()),
        ));
    }
    Ok(out)
}

fn normalize(m: &MotionParams<C64>) -> MotionParams<C64> {
    let arr = m.to_array();
    let big = arr.iter().cloned().fold(
        C64::zero(),
        |acc, z| if z.norm() > acc.norm() { z } else { acc },
    );
    m.map(|z| z / big)
}

fn boundary_param(hs: &[Hyperplane<GaussRat>]) -> Result<Parametrization<GaussRat>> {
    if hs.len() != 5 {
        return Err(Error::InvalidArgument(
            "bonds need exactly five constraints".into(),
        ));
    }
    parametrize(hs, &[(1, GaussRat::zero())], &BOND_PIVOTS)
}

/// All bonds of five constraint hyperplanes, up to scalar multiples.
pub fn find_bonds(hs: &[Hyperplane<GaussRat>]) -> Result<Vec<Bond>> {
    let param = boundary_param(hs)?;
    let forms: Vec<MPoly<GaussRat>> = param.gamma().into_iter().filter(|f| !f.is_zero()).collect();
    if forms.is_empty() {
        return Err(Error::Degenerate(
            "boundary quadrics vanish identically".into(),
        ));
    }
    let mut bonds: Vec<Bond> = Vec::new();
    for (v, ex) in common_zeros(&forms)? {
        let exact_params = ex.map(|e| param.point(&e, |c| c.clone()));
        let params = match &exact_params {
            Some(e) => e.map(gauss_f64),
            None => param.point(&v, gauss_f64),
        };
        if params.to_array().iter().all(|z| z.norm() < 1e-300) {
            continue;
        }
        let bond = Bond {
            params: normalize(&params),
            exact: exact_params,
            multiplicity: 1,
            conjugate: None,
        };
        if bonds.iter().any(|b| b.same_as(&bond, 1e-8)) {
            continue;
        }
        bonds.push(bond);
    }
    for k in 0..bonds.len() {
        let rank = match &bonds[k].exact {
            Some(e) => tangency_rank(hs, e)?,
            None => tangency_rank(
                &hs.iter().map(|h| h.map(gauss_f64)).collect::<Vec<_>>(),
                &bonds[k].params,
            )?,
        };
        bonds[k].multiplicity = if rank < 8 { 2 } else { 1 };
        let conj = bonds[k].params.map(|z| z.conj());
        bonds[k].conjugate = bonds
            .iter()
            .position(|b| crate::geom::proportional(&b.params.to_array(), &conj.to_array(), 1e-8));
    }
    Ok(bonds)
}

/// Rank of the 8×9 matrix of gradients of Φ1, Φ2, Φ3 and the five
/// constraints at the bond `b`.
pub fn tangency_rank<T: Scalar>(hs: &[Hyperplane<T>], b: &MotionParams<T>) -> Result<usize> {
    let c = b.to_array();
    let scale = 1.0 + c.iter().map(|v| v.magnitude()).fold(0.0, f64::max);
    let tol = 1e-9 * scale * scale;
    let mut bad = Vec::new();
    if !c[1].is_negligible(1e-9 * scale) {
        bad.push("x0 ≠ 0".to_string());
    }
    for (k, r) in gamma_residuals(b).iter().enumerate() {
        if !r.is_negligible(tol) {
            bad.push(format!("Γ{} residual {:.3e}", k + 1, r.magnitude()));
        }
    }
    for (k, h) in hs.iter().enumerate() {
        let cs = 1.0 + h.coeffs.iter().map(|v| v.magnitude()).fold(0.0, f64::max);
        let r = h.eval(b);
        if !r.is_negligible(1e-9 * cs * scale) {
            bad.push(format!(
                "constraint {} residual {:.3e}",
                k + 1,
                r.magnitude()
            ));
        }
    }
    if !bad.is_empty() {
        return Err(Error::NotABond(bad.join(", ")));
    }
    let two = T::from_i64(2);
    let eight = T::from_i64(8);
    let z = T::zero;
    let [n0, x0, x1, x2, x3, y0, y1, y2, y3] = c;
    let mut rows: Vec<Vec<T>> = vec![
        vec![
            z(),
            -two.clone() * x0.clone(),
            two.clone() * x1.clone(),
            two.clone() * x2.clone(),
            two.clone() * x3.clone(),
            z(),
            z(),
            z(),
            z(),
        ],
        vec![
            -eight.clone() * x0.clone(),
            -eight * n0,
            z(),
            z(),
            z(),
            z(),
            two.clone() * y1.clone(),
            two.clone() * y2.clone(),
            two * y3.clone(),
        ],
        vec![z(), -y0, y1, y2, y3, -x0, x1, x2, x3],
    ];
    rows.extend(hs.iter().map(|h| h.coeffs.to_vec()));
    let j = Matrix::from_rows(rows);
    if T::EXACT {
        Ok(j.rank(0.0))
    } else {
        numeric_rank(&j, 1e-8)
    }
}

/// Both necessary conditions for the sphere constraints of `p`. Bonds do not
/// depend on the leg lengths, so unit lengths are used where none are set.
pub fn necessity_verdict<T: RealScalar>(p: &Pentapod<T>) -> Result<NecessityVerdict> {
    let p = exact(p)?;
    crate::archsing::validate_assumptions(&p)?;
    let hs: Vec<Hyperplane<Rat>> = p
        .legs
        .iter()
        .map(|l| Hyperplane::sphere_r2(&l.a, &l.base, l.r2.as_ref().unwrap_or(&Rat::one())))
        .collect();
    necessity_verdict_for(&complexify_hyperplanes(&hs))
}

pub fn necessity_verdict_for(hs: &[Hyperplane<GaussRat>]) -> Result<NecessityVerdict> {
    let bonds = find_bonds(hs)?;
    let mut min_rank: Option<usize> = None;
    for b in &bonds {
        let r = match &b.exact {
            Some(e) => tangency_rank(hs, e)?,
            None => tangency_rank(
                &hs.iter().map(|h| h.map(gauss_f64)).collect::<Vec<_>>(),
                &b.params,
            )?,
        };
        min_rank = Some(min_rank.map_or(r, |m| m.min(r)));
    }
    Ok(NecessityVerdict {
        has_bond: !bonds.is_empty(),
        tangency_rank_deficient: min_rank.is_some_and(|r| r < 8),
        bonds,
        jacobian_rank: min_rank,
    })
}
