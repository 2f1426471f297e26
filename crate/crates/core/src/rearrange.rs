//! Leg replacements that keep the singularity set: the planar pencil, the
//! cubic correspondence σ between platform line and base space, and the
//! resulting Type 1–5 classification.

use num::traits::{One, Signed, Zero};

use crate::archsing::{classify_arch, nonplanar_d, plane_coords, validate_assumptions};
use crate::error::{Error, Result};
use crate::geom::ProjPoint;
use crate::kinmap::Pentapod;
use crate::polyalg::scalar::rat_to_f64;
use crate::polyalg::{complex_roots_of, rational_root_near, Matrix, RealScalar, Scalar, UPoly};
use crate::{Rat, C64};

type P = UPoly<Rat>;

/// `σ(a) = (d0(a) : d1(a) : d2(a) : d3(a))`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicCorrespondence {
    /// Cramer polynomials, scaled to coprime integer coefficients.
    pub d: [P; 4],
    /// Monic gcd of `d0..d3`; its roots are the exceptional platform points.
    pub g: P,
    /// `d_k / g`.
    pub reduced: [P; 4],
    /// The 3×3 system `M(a)·(A, B, C) = r(a)` whose Cramer solution is σ:
    /// rows `(m0, m1, m2, r)` with linear polynomial entries.
    pub system: [[P; 4]; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sigma<T: Scalar> {
    Point(ProjPoint<T>),
    /// All four polynomials vanish: the platform point maps to a line.
    Exceptional,
}

/// Convert a pentapod exactly to rationals.
pub fn exact<T: RealScalar>(p: &Pentapod<T>) -> Result<Pentapod<Rat>> {
    let conv = |v: &T| {
        v.to_rat()
            .ok_or_else(|| Error::InvalidArgument("non-finite coordinate".into()))
    };
    let mut legs = Vec::new();
    for l in &p.legs {
        let mut leg = crate::kinmap::Leg::new(
            conv(&l.a)?,
            [conv(&l.base[0])?, conv(&l.base[1])?, conv(&l.base[2])?],
        );
        if let Some(r2) = &l.r2 {
            leg.r2 = Some(conv(r2)?);
        }
        legs.push(leg);
    }
    Pentapod::new(std::array::from_fn(|k| legs[k].clone()))
}

fn lin(c0: &Rat, c1: &Rat) -> P {
    UPoly::new(vec![c0.clone(), c1.clone()])
}

fn det3(m: &[[P; 3]; 3]) -> P {
    let t = |a: &P, b: &P, c: &P| &(a * b) * c;
    let plus = &(&t(&m[0][0], &m[1][1], &m[2][2]) + &t(&m[0][1], &m[1][2], &m[2][0]))
        + &t(&m[0][2], &m[1][0], &m[2][1]);
    let minus = &(&t(&m[0][2], &m[1][1], &m[2][0]) + &t(&m[0][0], &m[1][2], &m[2][1]))
        + &t(&m[0][1], &m[1][0], &m[2][2]);
    &plus - &minus
}

/// Scale a family of polynomials jointly to coprime integers with the
/// first nonzero coefficient of the first nonzero polynomial positive.
fn normalize_family(ps: &mut [P]) {
    let mut lcm = num::BigInt::one();
    let mut gcd = num::BigInt::zero();
    for p in ps.iter() {
        for c in p.coeffs() {
            lcm = num::Integer::lcm(&lcm, c.denom());
        }
    }
    for p in ps.iter() {
        for c in p.coeffs() {
            gcd = num::Integer::gcd(&gcd, &(c * Rat::from_integer(lcm.clone())).to_integer());
        }
    }
    if gcd.is_zero() {
        return;
    }
    let mut s = Rat::new(lcm, gcd);
    if let Some(first) = ps.iter().find(|p| !p.is_zero()) {
        if first.lead().is_negative() {
            s = -s;
        }
    }
    for p in ps.iter_mut() {
        *p = p.scale(&s);
    }
}

/// The cubic correspondence of a non-planar pentapod. Computed from the
/// three-dimensional null space of the rows `(1, a, A, B, C, aA, aB, aC)`:
/// a sixth leg keeps the singularity set iff its row is orthogonal to every
/// null vector, which is a 3×3 linear system in `(A, B, C)` for each `a`.
pub fn replacement_cubic<T: RealScalar>(p: &Pentapod<T>) -> Result<CubicCorrespondence> {
    let p = exact(p)?;
    if p.base_is_planar() {
        return Err(Error::WrongBranch(
            "replacement cubic needs a non-planar base".into(),
        ));
    }
    let rows: Vec<Vec<Rat>> = p
        .legs
        .iter()
        .map(|l| {
            let [x, y, z] = l.base.clone();
            let a = l.a.clone();
            vec![
                Rat::one(),
                a.clone(),
                x.clone(),
                y.clone(),
                z.clone(),
                &a * &x,
                &a * &y,
                &a * &z,
            ]
        })
        .collect();
    let null = Matrix::from_rows(rows).nullspace(0.0);
    if null.len() != 3 {
        return Err(Error::ArchitecturallySingular(
            "leg rows are linearly dependent".into(),
        ));
    }
    let system: [[P; 4]; 3] = std::array::from_fn(|k| {
        let n = &null[k];
        [
            lin(&n[2], &n[5]),
            lin(&n[3], &n[6]),
            lin(&n[4], &n[7]),
            lin(&(-&n[0]), &(-&n[1])),
        ]
    });
    let col = |replace: Option<usize>| -> [[P; 3]; 3] {
        std::array::from_fn(|r| {
            std::array::from_fn(|c| {
                if Some(c) == replace {
                    system[r][3].clone()
                } else {
                    system[r][c].clone()
                }
            })
        })
    };
    let mut d = [
        det3(&col(None)),
        det3(&col(Some(0))),
        det3(&col(Some(1))),
        det3(&col(Some(2))),
    ];
    if d.iter().all(|q| q.is_zero()) {
        return Err(Error::Internal(
            "all Cramer polynomials vanish, which the anchor-point assumptions exclude".into(),
        ));
    }
    normalize_family(&mut d);
    let g = d
        .iter()
        .skip(1)
        .fold(d[0].clone(), |acc, q| acc.gcd_primitive(q))
        .monic();
    let mut reduced = d
        .clone()
        .map(|q| if q.is_zero() { q } else { q.div_rem(&g).0 });
    normalize_family(&mut reduced);
    Ok(CubicCorrespondence {
        d,
        g,
        reduced,
        system,
    })
}

/// `σ(a)` from the unreduced polynomials; the exceptional marker when all
/// four vanish at `a`.
pub fn sigma<T: Scalar>(c: &CubicCorrespondence, a: &T) -> Sigma<T> {
    let v: [T; 4] = std::array::from_fn(|k| c.d[k].map(T::from_rat).eval(a));
    match ProjPoint::new(v) {
        Ok(pt) if !pt.0.iter().all(|x| x.is_negligible(1e-12)) => Sigma::Point(pt),
        _ => Sigma::Exceptional,
    }
}

/// `σ` with the common factor removed, defined everywhere.
pub fn sigma_reduced<T: Scalar>(c: &CubicCorrespondence, a: &T) -> ProjPoint<T> {
    ProjPoint(std::array::from_fn(|k| {
        c.reduced[k].map(T::from_rat).eval(a)
    }))
}

/// Vertex of the planar pencil: each platform point `a` corresponds to the
/// base-plane line `[L0 + a·L1]·(X, Y, 1) = 0`, where `(L0, L1)` comes from
/// the null vector of the rows `(1, a, X, Y, aX, aY)`.
pub fn planar_vertex<T: RealScalar>(p: &Pentapod<T>) -> Result<ProjPoint<Rat>> {
    let p = exact(p)?;
    validate_assumptions(&p)?;
    if !p.base_is_planar() {
        return Err(Error::WrongBranch(
            "planar vertex needs a planar base".into(),
        ));
    }
    let pc = plane_coords(&p.bases())
        .ok_or_else(|| Error::Degenerate("base points are collinear".into()))?;
    let rows: Vec<Vec<Rat>> = p
        .legs
        .iter()
        .zip(&pc.coords)
        .map(|(l, [x, y])| {
            let a = l.a.clone();
            vec![Rat::one(), a.clone(), x.clone(), y.clone(), &a * x, &a * y]
        })
        .collect();
    let null = Matrix::from_rows(rows).nullspace(0.0);
    if null.len() != 1 {
        return Err(Error::ArchitecturallySingular(
            "leg rows are linearly dependent".into(),
        ));
    }
    let n = &null[0];
    let l0 = [n[2].clone(), n[3].clone(), n[0].clone()];
    let l1 = [n[4].clone(), n[5].clone(), n[1].clone()];
    let v = crate::geom::cross3(&l0, &l1);
    if v.iter().all(|c| c.is_zero()) {
        return Err(Error::Degenerate(
            "the pencil lines do not depend on a".into(),
        ));
    }
    let [x, y, w] = v;
    // Lift plane coordinates (kept axes) back to space via the plane equation.
    let nrm = &pc.normal;
    let o = &pc.origin;
    let [k1, k2] = pc.keep;
    let dr = pc.drop;
    let mut out = [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()];
    out[0] = w.clone();
    out[1 + k1] = x.clone();
    out[1 + k2] = y.clone();
    out[1 + dr] =
        &o[dr] * &w - (&nrm[k1] * (&x - &o[k1] * &w) + &nrm[k2] * (&y - &o[k2] * &w)) / &nrm[dr];
    ProjPoint::new(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PentapodType {
    PlanarPencil,
    Type1,
    Type2,
    Type3,
    Type4,
    Type5,
}

impl PentapodType {
    pub fn name(self) -> &'static str {
        match self {
            PentapodType::PlanarPencil => "PlanarPencil",
            PentapodType::Type1 => "Type1",
            PentapodType::Type2 => "Type2",
            PentapodType::Type3 => "Type3",
            PentapodType::Type4 => "Type4",
            PentapodType::Type5 => "Type5",
        }
    }
}

/// Ideal element of the base associated with the ideal point of the
/// platform line when the affine relation holds.
#[derive(Clone, Debug, PartialEq)]
pub enum IdealElement {
    Point([Rat; 3]),
    Line,
    Plane,
}

/// A root of the gcd `g`: a platform point mapped onto a whole line.
#[derive(Clone, Debug)]
pub struct ExceptionalPoint {
    pub a: C64,
    pub exact_a: Option<Rat>,
    /// Point and direction of the image line (real roots only).
    pub line: Option<([f64; 3], [f64; 3])>,
    /// Reduced σ at the root: Q for Type 2, L1/L2 for Type 3, V for Type 4.
    pub image: ProjPoint<C64>,
}

#[derive(Clone, Debug)]
pub struct PentapodClass {
    pub kind: PentapodType,
    /// Pencil vertex (planar) or the common point V (Type 4).
    pub vertex: Option<ProjPoint<Rat>>,
    pub cubic: Option<CubicCorrespondence>,
    /// Reduced `d0`; its roots are the Darboux points W_kσ⁻¹.
    pub darboux_poly: Option<P>,
    pub darboux: Vec<C64>,
    /// Image of the ideal point of the platform line.
    pub mannheim_image: Option<ProjPoint<Rat>>,
    pub exceptional: Vec<ExceptionalPoint>,
    /// Some exceptional point is non-real (conjugate line pair).
    pub complex_lines: bool,
    pub ideal_element: Option<IdealElement>,
}

fn lead_point(c: &CubicCorrespondence) -> Option<ProjPoint<Rat>> {
    let m = c.reduced.iter().filter_map(|q| q.degree()).max()?;
    ProjPoint::new(std::array::from_fn(|k| c.reduced[k].coeff(m))).ok()
}

/// Point and direction of the line that an exceptional platform point `a`
/// is mapped onto; `None` if `a` is not exceptional.
pub fn exceptional_line_exact(c: &CubicCorrespondence, a: &Rat) -> Option<([Rat; 3], [Rat; 3])> {
    let m = Matrix::from_fn(3, 4, |r, col| {
        let v = c.system[r][col].eval(a);
        if col == 3 {
            -v
        } else {
            v
        }
    });
    let null = m.nullspace(0.0);
    if null.len() != 2 {
        return None;
    }
    let (u, v) = (&null[0], &null[1]);
    let dir: [Rat; 3] = std::array::from_fn(|k| &u[k] * &v[3] - &v[k] * &u[3]);
    let base = if !u[3].is_zero() { u } else { v };
    Some((std::array::from_fn(|k| &base[k] / &base[3]), dir))
}

fn exceptional_line(c: &CubicCorrespondence, a: &Rat) -> Option<([f64; 3], [f64; 3])> {
    let (pt, dir) = exceptional_line_exact(c, a)?;
    Some((
        pt.each_ref().map(rat_to_f64),
        dir.each_ref().map(rat_to_f64),
    ))
}

/// Type of a non-architecturally-singular pentapod together with the
/// special points of its replacement locus.
pub fn classify_type<T: RealScalar>(p: &Pentapod<T>) -> Result<PentapodClass> {
    let p = exact(p)?;
    validate_assumptions(&p)?;
    let arch = classify_arch(&p)?;
    if arch.singular {
        return Err(Error::ArchitecturallySingular(format!(
            "design case {} (see classify_arch)",
            arch.case.unwrap_or(0)
        )));
    }
    let mut class = PentapodClass {
        kind: PentapodType::PlanarPencil,
        vertex: None,
        cubic: None,
        darboux_poly: None,
        darboux: Vec::new(),
        mannheim_image: None,
        exceptional: Vec::new(),
        complex_lines: false,
        ideal_element: None,
    };
    if p.base_is_planar() {
        class.vertex = Some(planar_vertex(&p)?);
        return Ok(class);
    }
    let c = replacement_cubic(&p)?;
    let d567 = nonplanar_d(&p, 5, 6, 7)?;
    let gdeg = c.g.degree().unwrap_or(0);
    class.kind = if d567.is_zero() {
        PentapodType::Type5
    } else {
        match gdeg {
            0 => PentapodType::Type1,
            1 => PentapodType::Type2,
            2 => PentapodType::Type3,
            _ => PentapodType::Type4,
        }
    };
    if class.kind == PentapodType::Type5 {
        // Homogenized leading part of the system: ideal solutions at a = ∞.
        let n7 = Matrix::from_fn(3, 3, |r, col| c.system[r][col].coeff(1));
        let kernel = n7.nullspace(0.0);
        class.ideal_element = Some(match kernel.len() {
            1 => IdealElement::Point([
                kernel[0][0].clone(),
                kernel[0][1].clone(),
                kernel[0][2].clone(),
            ]),
            2 => IdealElement::Line,
            _ => IdealElement::Plane,
        });
    }
    let d0 = c.reduced[0].clone();
    class.darboux = if d0.degree().unwrap_or(0) > 0 {
        complex_roots_of(&d0)
    } else {
        Vec::new()
    };
    class.darboux_poly = Some(d0);
    class.mannheim_image = lead_point(&c);
    if gdeg > 0 {
        for z in complex_roots_of(&c.g) {
            let exact_a = if z.im.abs() < 1e-9 {
                rational_root_near(&c.g, z.re)
            } else {
                None
            };
            if z.im.abs() > 1e-9 {
                class.complex_lines = true;
            }
            let line = exact_a.as_ref().and_then(|r| exceptional_line(&c, r));
            let image = match &exact_a {
                Some(r) => sigma_reduced(&c, r)
                    .0
                    .map(|v| C64::new(rat_to_f64(&v), 0.0)),
                None => sigma_reduced(&c, &z).0,
            };
            class.exceptional.push(ExceptionalPoint {
                a: z,
                exact_a,
                line,
                image: ProjPoint(image),
            });
        }
        if class.kind == PentapodType::Type4 {
            class.vertex = lead_point(&c);
        }
    }
    class.cubic = Some(c);
    Ok(class)
}
