//! Direct kinematics by elimination on the image variety.
//!
//! The five sphere conditions are solved for five motion parameters
//! (`x0 = 1`), the three quadrics are rewritten in the remaining three
//! parameters, and two variables are removed by resultants. The gcd of the
//! three final resultants is the elimination polynomial.

use log::debug;
use nalgebra::{Matrix3, Vector3};
use num::traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kinmap::{parametrize, phi_residuals, MotionParams, Parametrization, Pentapod};
use crate::polyalg::scalar::{rat_int, rat_to_f64};
use crate::polyalg::{
    bareiss_det, complex_roots, interpolate, real_roots_exact, resultant, resultant_formal,
    sylvester, MPoly, RealScalar, UPoly,
};
use crate::rearrange::{classify_type, PentapodType};
use crate::selfmotion::{duporcq_for_class, parallel_pair_design, planar_affine, Duporcq};
use crate::{Rat, C64};

/// Preferred pivot set `(n0, y0, y1, y2, y3)`.
pub const DK_PIVOTS: [usize; 5] = [0, 5, 6, 7, 8];

#[derive(Clone, Debug)]
pub struct DkSolution {
    /// Normalized motion parameters (`x0 = 1`).
    pub params: MotionParams<f64>,
    /// Five sphere residuals followed by the three quadric residuals.
    pub residuals: Vec<f64>,
}

impl DkSolution {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct DkResult {
    /// Elimination polynomial in `variable`.
    pub poly: UPoly<Rat>,
    /// Motion-parameter index of the polynomial's variable.
    pub variable: usize,
    /// Motion-parameter indices solved linearly.
    pub pivots: Vec<usize>,
    /// Elimination order actually used (motion-parameter indices, the last
    /// one is `variable`); differs from the default when it was rotated.
    pub order: [usize; 3],
    pub rotated: bool,
    pub solutions: Vec<DkSolution>,
}

impl DkResult {
    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    /// Polynomial scaled to coprime integer coefficients.
    pub fn integer_coeffs(&self) -> Vec<num::BigInt> {
        self.poly.primitive_integer()
    }
}

/// Elimination polynomial of three polynomials in variables `0, 1, 2`,
/// eliminating `0` then `1`; `None` if every final resultant vanishes.
pub fn eliminate(q: &[MPoly<Rat>; 3]) -> Result<Option<UPoly<Rat>>> {
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut xi = Vec::new();
    for (i, j) in pairs {
        if q[i].is_zero() || q[j].is_zero() {
            continue;
        }
        if q[i].degree_in(0).unwrap_or(0) == 0 && q[j].degree_in(0).unwrap_or(0) == 0 {
            // Neither involves u0: both already lie in the elimination ideal.
            xi.push(clear_denominators(&q[i]));
            xi.push(clear_denominators(&q[j]));
            continue;
        }
        let r = resultant(&q[i], &q[j], 0)?;
        if !r.is_zero() {
            xi.push(clear_denominators(&r));
        }
    }
    let mut g: Option<UPoly<Rat>> = None;
    for a in 0..xi.len() {
        for b in a + 1..xi.len() {
            let ups = resultant_in_1(&xi[a], &xi[b]);
            if ups.is_zero() {
                continue;
            }
            g = Some(match g {
                None => ups.monic(),
                Some(prev) => prev.gcd_primitive(&ups),
            });
        }
    }
    Ok(g)
}

/// Rescale to integer coefficients so later evaluations stay integral.
fn clear_denominators(p: &MPoly<Rat>) -> MPoly<Rat> {
    let lcm = p.terms().fold(num::BigInt::one(), |acc, (_, c)| {
        num::Integer::lcm(&acc, c.denom())
    });
    p.scale(&Rat::from_integer(lcm))
}

/// `res_{u1}(p, q)` as a polynomial in `u2` by evaluation and interpolation.
fn resultant_in_1(p: &MPoly<Rat>, q: &MPoly<Rat>) -> UPoly<Rat> {
    let dp = p.degree_in(1).unwrap_or(0);
    let dq = q.degree_in(1).unwrap_or(0);
    if dp == 0 && dq == 0 {
        let up = |m: &MPoly<Rat>| m.to_upoly(2).expect("only u2 remains");
        return up(p).gcd_primitive(&up(q));
    }
    let bound = p.total_degree().unwrap_or(0) * q.total_degree().unwrap_or(0);
    let npts = bound + 2;
    let mut xs = Vec::with_capacity(npts);
    let mut ys = Vec::with_capacity(npts);
    for k in 0..npts {
        let s = rat_int(k as i64 - (npts as i64) / 2);
        let ps = p.subs(2, &s).to_upoly(1).expect("only u1 remains");
        let qs = q.subs(2, &s).to_upoly(1).expect("only u1 remains");
        let pc: Vec<Rat> = (0..=dp).map(|i| ps.coeff(i)).collect();
        let qc: Vec<Rat> = (0..=dq).map(|i| qs.coeff(i)).collect();
        xs.push(s);
        let integral = pc.iter().chain(qc.iter()).all(|c| c.is_integer());
        ys.push(if integral && dp + dq > 0 {
            let ints = |v: &[Rat]| v.iter().map(|c| c.to_integer()).collect::<Vec<_>>();
            Rat::from_integer(bareiss_det(sylvester(&ints(&pc), &ints(&qc))))
        } else {
            resultant_formal(&pc, dp, &qc, dq)
        });
    }
    interpolate(&xs, &ys)
}

fn rat_of<T: RealScalar>(v: &T) -> Result<Rat> {
    v.to_rat()
        .ok_or_else(|| Error::InvalidArgument("non-finite input".into()))
}

/// Direct kinematics for a pentapod with squared leg lengths set on its
/// legs. Inputs are converted exactly to rationals.
pub fn solve_dk<T: RealScalar>(p: &Pentapod<T>) -> Result<DkResult> {
    let mut legs = Vec::new();
    for leg in &p.legs {
        let r2 = leg
            .r2
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("leg lengths missing".into()))?;
        if r2.to_f64() <= 0.0 {
            return Err(Error::InvalidArgument(
                "leg lengths must be positive".into(),
            ));
        }
        legs.push(crate::kinmap::Leg::with_r2(
            rat_of(&leg.a)?,
            [
                rat_of(&leg.base[0])?,
                rat_of(&leg.base[1])?,
                rat_of(&leg.base[2])?,
            ],
            rat_of(r2)?,
        ));
    }
    let exact = Pentapod {
        legs: std::array::from_fn(|k| legs[k].clone()),
    };
    solve_dk_exact(&exact)
}

/// Direct kinematics with leg lengths `r` (not squared).
pub fn solve_dk_lengths<T: RealScalar>(p: &Pentapod<T>, r: &[T; 5]) -> Result<DkResult> {
    solve_dk(&p.with_lengths(r)?)
}

pub fn solve_dk_exact(p: &Pentapod<Rat>) -> Result<DkResult> {
    let hs = p.spheres()?;
    let param = parametrize(&hs, &[(1, Rat::one())], &DK_PIVOTS).map_err(|e| match e {
        Error::DependentConstraints(m) => Error::ArchitecturallySingular(m),
        other => other,
    })?;
    let quadrics = param.phi();
    let nfree = param.free.len();
    if nfree != 3 {
        return Err(Error::Internal(format!(
            "expected three free parameters, got {nfree}"
        )));
    }
    // Final variable: x3 if free, else the last free one.
    let last = param.free.iter().position(|&f| f == 4).unwrap_or(2);
    let others: Vec<usize> = (0..3).filter(|&k| k != last).collect();
    let orders = [
        [others[0], others[1], last],
        [others[1], others[0], last],
        [others[0], last, others[1]],
        [last, others[0], others[1]],
        [others[1], last, others[0]],
        [last, others[1], others[0]],
    ];
    for (idx, ord) in orders.iter().enumerate() {
        // Rename so that ord[k] becomes variable k.
        let mut perm = [0usize; 3];
        for (k, &v) in ord.iter().enumerate() {
            perm[v] = k;
        }
        let q: [MPoly<Rat>; 3] = std::array::from_fn(|k| quadrics[k].permute_vars(&perm));
        let en = eliminate(&q)?;
        let Some(n) = en else {
            debug!("elimination order {ord:?} degenerate, rotating");
            continue;
        };
        let poly = n.primitive_integer();
        let poly = UPoly::new(poly.into_iter().map(Rat::from_integer).collect());
        let variable = param.free[ord[2]];
        let solutions = back_substitute(&param, &q, ord, &poly, p)?;
        return Ok(DkResult {
            poly,
            variable,
            pivots: param.pivots.clone(),
            order: ord.map(|k| param.free[k]),
            rotated: idx > 0,
            solutions,
        });
    }
    Err(Error::Degenerate(
        "elimination vanishes identically in every variable order; the configuration set is not finite"
            .into(),
    ))
}

fn mpoly_f64(p: &MPoly<Rat>) -> MPoly<f64> {
    p.map_coeffs(rat_to_f64)
}

fn eval_c(p: &MPoly<f64>, v: &[C64]) -> C64 {
    p.eval_with(v, |c| C64::new(*c, 0.0))
}

/// Roots in `u1` of `res_{u0}(a, b)` after fixing `u2`.
pub(crate) fn pair_candidates(a: &MPoly<f64>, b: &MPoly<f64>) -> Vec<C64> {
    let da = a.degree_in(0).unwrap_or(0);
    let db = b.degree_in(0).unwrap_or(0);
    if da == 0 && db == 0 {
        return Vec::new();
    }
    let Ok(r) = resultant(a, b, 0) else {
        return Vec::new();
    };
    match r.to_upoly(1) {
        Some(u) if u.degree().unwrap_or(0) > 0 => {
            // Drop numerically vanishing leading terms.
            let scale = u.max_abs_coeff();
            let mut cs = u.coeffs().to_vec();
            while cs.len() > 1 && cs.last().unwrap().abs() <= 1e-12 * scale {
                cs.pop();
            }
            complex_roots(&UPoly::new(cs).map(|c| C64::new(*c, 0.0)))
        }
        _ => Vec::new(),
    }
}

pub(crate) fn quad_roots(c: &[C64]) -> Vec<C64> {
    // c0 + c1 u + c2 u²
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let c2 = c.get(2).copied().unwrap_or_default();
    let c1 = c.get(1).copied().unwrap_or_default();
    let c0 = c[0];
    if c2.norm() <= 1e-12 * scale {
        if c1.norm() <= 1e-12 * scale {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let disc = (c1 * c1 - c2 * c0 * 4.0).sqrt();
    vec![(-c1 + disc) / (c2 * 2.0), (-c1 - disc) / (c2 * 2.0)]
}

fn newton3(q: &[MPoly<f64>; 3], mut u: [f64; 3]) -> [f64; 3] {
    let grads: Vec<[MPoly<f64>; 3]> = q
        .iter()
        .map(|p| [p.derivative(0), p.derivative(1), p.derivative(2)])
        .collect();
    for _ in 0..30 {
        let f = Vector3::from_fn(|i, _| q[i].eval(&u));
        let j = Matrix3::from_fn(|i, k| grads[i][k].eval(&u));
        let Some(step) = j.lu().solve(&f) else { break };
        if !step.iter().all(|s| s.is_finite()) {
            break;
        }
        for k in 0..3 {
            u[k] -= step[k];
        }
        if step.norm() <= 1e-16 * (1.0 + u.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            break;
        }
    }
    u
}

pub(crate) fn dk_residuals(p: &Pentapod<Rat>, m: &MotionParams<f64>) -> Vec<f64> {
    let scale = 1.0 + m.norm2_f64().sqrt();
    let mut res: Vec<f64> = p
        .spheres()
        .unwrap_or_default()
        .iter()
        .map(|h| {
            let hf = h.map(rat_to_f64);
            let cs = hf.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
            hf.eval(m).abs() / (cs * scale)
        })
        .collect();
    res.extend(phi_residuals(m).iter().map(|r| r.abs() / (scale * scale)));
    res
}

fn back_substitute(
    param: &Parametrization<Rat>,
    q: &[MPoly<Rat>; 3],
    ord: &[usize; 3],
    poly: &UPoly<Rat>,
    p: &Pentapod<Rat>,
) -> Result<Vec<DkSolution>> {
    let roots = real_roots_exact(poly, 1e-10)?;
    let qf: [MPoly<f64>; 3] = std::array::from_fn(|k| mpoly_f64(&q[k]));
    let mut out: Vec<DkSolution> = Vec::new();
    for root in roots {
        let r = root.value;
        let fixed: [MPoly<f64>; 3] = std::array::from_fn(|k| qf[k].subs(2, &r));
        let mut cands = Vec::new();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            cands.extend(pair_candidates(&fixed[a], &fixed[b]));
        }
        if cands.is_empty() {
            // u1 does not occur; scan it from whichever quadric involves u0 only.
            cands.push(C64::zero());
        }
        let mut tried: Vec<[f64; 3]> = Vec::new();
        for v in cands {
            if v.im.abs() > 1e-6 * (1.0 + v.norm()) {
                continue;
            }
            for fq in &fixed {
                let coeffs: Vec<C64> = fq
                    .subs(1, &v.re)
                    .to_upoly(0)
                    .map(|u| u.coeffs().iter().map(|c| C64::new(*c, 0.0)).collect())
                    .unwrap_or_default();
                if coeffs.is_empty() {
                    continue;
                }
                for w in quad_roots(&coeffs) {
                    if w.im.abs() > 1e-6 * (1.0 + w.norm()) {
                        continue;
                    }
                    let start = [w.re, v.re, r];
                    let zc = [C64::new(w.re, 0.0), C64::new(v.re, 0.0), C64::new(r, 0.0)];
                    let scale = 1.0 + zc.iter().map(|z| z.norm()).fold(0.0, f64::max);
                    let worst = qf.iter().map(|p| eval_c(p, &zc).norm()).fold(0.0, f64::max);
                    if worst > 1e-3 * scale * scale {
                        continue;
                    }
                    tried.push(start);
                }
            }
        }
        for start in tried {
            let u = newton3(&qf, start);
            // Map back to free-variable order.
            let mut vals = [0.0; 3];
            for (k, &o) in ord.iter().enumerate() {
                vals[o] = u[k];
            }
            let m = param.point(&vals, rat_to_f64);
            let residuals = dk_residuals(p, &m);
            let ok = residuals.iter().all(|r| *r <= 1e-8);
            if !ok {
                continue;
            }
            let dup = out.iter().any(|s| {
                s.params
                    .to_array()
                    .iter()
                    .zip(m.to_array())
                    .all(|(a, b)| (a - b).abs() <= 1e-7 * (1.0 + a.abs()))
            });
            if !dup {
                out.push(DkSolution {
                    params: m,
                    residuals,
                });
            }
        }
    }
    Ok(out)
}

/// Upper bound on the number of real configurations for the design class of
/// `p`: 4 with a self-motion over ℂ, 6 for the designs whose elimination
/// polynomial drops to degree 6, 8 otherwise.
pub fn max_real_solutions<T: RealScalar>(p: &Pentapod<T>) -> Result<u8> {
    let pe = crate::rearrange::exact(p)?;
    let arch = crate::archsing::classify_arch(&pe)?;
    if arch.singular {
        return Err(Error::ArchitecturallySingular(format!(
            "design case {}",
            arch.case.unwrap_or(0)
        )));
    }
    let class = classify_type(&pe)?;
    let bound = match class.kind {
        PentapodType::PlanarPencil => {
            if planar_affine(&pe)? {
                4
            } else if class.vertex.as_ref().is_some_and(|v| v.0[0].is_zero()) {
                6
            } else {
                8
            }
        }
        PentapodType::Type1 | PentapodType::Type2 | PentapodType::Type5 => {
            match duporcq_for_class(&class)? {
                Duporcq::Full => 4,
                Duporcq::FirstOnly => 6,
                Duporcq::None
                    if class.kind == PentapodType::Type5 && parallel_pair_design(&pe)? =>
                {
                    6
                }
                Duporcq::None => 8,
            }
        }
        PentapodType::Type3 | PentapodType::Type4 => 8,
    };
    debug!(
        "{} pentapod: at most {bound} real configurations",
        class.kind.name()
    );
    Ok(bound)
}

/// Number of complex roots of the elimination polynomial with multiplicity.
pub fn complex_root_count(poly: &UPoly<Rat>) -> usize {
    complex_roots(&poly.map(|c| C64::new(rat_to_f64(c), 0.0))).len()
}
