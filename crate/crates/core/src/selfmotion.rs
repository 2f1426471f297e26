//! Self-motions of Types 1, 2 and 5 and of planar pentapods.
//!
//! Designs live in the canonical frame of the corresponding type: the first
//! leg sits at the origin with platform coordinate 0, the two Darboux
//! conditions use the isotropic directions `(1, ∓i, 0)` and the real ideal
//! direction is the z-axis. A [`RigidTransform`] maps back to the user frame.

use log::debug;
use nalgebra::{Matrix3x2, Vector3};
use num::traits::{One, Signed, Zero};

use crate::archsing::{classify_arch, plane_coords, validate_assumptions};
use crate::dirkin::{eliminate, pair_candidates, quad_roots, DK_PIVOTS};
use crate::error::{Error, Result};
use crate::geom::{cross3, dot3, sub3};
use crate::kinmap::{
    displacement, parametrize, realify, Hyperplane, Leg, MotionParams, Parametrization, Pentapod,
};
use crate::polyalg::scalar::{rat_from_f64, rat_to_f64, rationalize};
use crate::polyalg::{
    complex_roots_of, rational_root_near, real_roots_exact, MPoly, Matrix, RealScalar, Scalar,
    UPoly,
};
use crate::rearrange::{
    classify_type, exact, exceptional_line_exact, sigma_reduced, PentapodClass, PentapodType,
};
use crate::{GaussRat, Rat, C64};

const TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Duporcq {
    None,
    /// The replacement curve lies on a cylinder of revolution.
    FirstOnly,
    /// Straight cubic circle (or circle with orthogonal line for Type 2).
    Full,
}

enum Axis {
    Exact([Rat; 3]),
    Approx([f64; 3]),
}

impl Axis {
    fn unit(&self) -> [f64; 3] {
        let v = match self {
            Axis::Exact(u) => u.each_ref().map(rat_to_f64),
            Axis::Approx(u) => *u,
        };
        let n = dot3(&v, &v).sqrt();
        v.map(|c| c / n)
    }
}

/// Where the real ideal point of the replacement curve comes from.
enum AxisSource {
    /// Image of the ideal point of the platform line.
    Infinity,
    /// A real root of `d0`.
    Root(f64),
    /// Direction of the Type-2 line `g1`.
    Line,
}

struct IdealPoints {
    axis: Axis,
    source: AxisSource,
    /// Both roots of the complex-conjugate pair.
    complex: [C64; 2],
    /// Rational quadratic with the pair as roots, when available.
    quad: Option<UPoly<Rat>>,
}

fn ideal_points(class: &PentapodClass) -> Result<Option<IdealPoints>> {
    let c = class
        .cubic
        .as_ref()
        .ok_or_else(|| Error::WrongBranch("no replacement curve".into()))?;
    let r = &c.reduced;
    let n = r.iter().filter_map(|q| q.degree()).max().unwrap_or(0);
    let d0 = &r[0];
    if d0.is_zero() {
        return Ok(None);
    }
    let mut axes: Vec<(Axis, AxisSource)> = Vec::new();
    if d0.degree().unwrap_or(0) < n {
        axes.push((
            Axis::Exact(std::array::from_fn(|k| r[k + 1].coeff(n))),
            AxisSource::Infinity,
        ));
    }
    let mut quad = Some(d0.clone());
    if d0.degree().unwrap_or(0) > 0 {
        for root in real_roots_exact(d0, 1e-14)? {
            match rational_root_near(d0, root.value) {
                Some(a) => {
                    let lin = UPoly::linear_root(a.clone());
                    quad = quad.map(|q| q.div_rem(&lin).0);
                    axes.push((
                        Axis::Exact(std::array::from_fn(|k| r[k + 1].eval(&a))),
                        AxisSource::Root(root.value),
                    ));
                }
                None => {
                    quad = None;
                    let f: [f64; 3] = std::array::from_fn(|k| r[k + 1].to_f64().eval(&root.value));
                    axes.push((Axis::Approx(f), AxisSource::Root(root.value)));
                }
            }
        }
    }
    let complex: Vec<C64> = if d0.degree().unwrap_or(0) > 0 {
        complex_roots_of(d0)
            .into_iter()
            .filter(|z| z.im.abs() > TOL * (1.0 + z.norm()))
            .collect()
    } else {
        Vec::new()
    };
    if complex.len() != 2 {
        return Ok(None);
    }
    let quad = quad.filter(|q| q.degree() == Some(2));
    if class.kind == PentapodType::Type2 {
        // The conic must be an ellipse; the axis is the direction of g1.
        if !axes.is_empty() {
            return Ok(None);
        }
        let Some(ex) = class.exceptional.first() else {
            return Ok(None);
        };
        let Some(a) = &ex.exact_a else {
            return Ok(None);
        };
        let (_, dir) = exceptional_line_exact(c, a)
            .ok_or_else(|| Error::Internal("exceptional point without an image line".into()))?;
        return Ok(Some(IdealPoints {
            axis: Axis::Exact(dir),
            source: AxisSource::Line,
            complex: [complex[0], complex[1]],
            quad,
        }));
    }
    if axes.len() != 1 {
        return Ok(None);
    }
    let (axis, source) = axes.pop().expect("one axis");
    Ok(Some(IdealPoints {
        axis,
        source,
        complex: [complex[0], complex[1]],
        quad,
    }))
}

fn duporcq_of(class: &PentapodClass, ip: &IdealPoints) -> Duporcq {
    let r = &class
        .cubic
        .as_ref()
        .expect("checked by ideal_points")
        .reduced;
    if let (Axis::Exact(u), Some(q)) = (&ip.axis, &ip.quad) {
        // Conditions must vanish at both roots of the rational quadratic q.
        let uu = dot3(u, u);
        let s = &(&(&r[1] * &r[1]) + &(&r[2] * &r[2])) + &(&r[3] * &r[3]);
        let vu = &(&r[1].scale(&u[0]) + &r[2].scale(&u[1])) + &r[3].scale(&u[2]);
        let first = &s.scale(&uu) - &(&vu * &vu);
        let divides = |p: &UPoly<Rat>| p.is_zero() || p.rem(q).is_zero();
        return if divides(&s) && divides(&vu) {
            Duporcq::Full
        } else if divides(&first) {
            Duporcq::FirstOnly
        } else {
            Duporcq::None
        };
    }
    let u = ip.axis.unit();
    let z = ip.complex[0];
    let v: [C64; 3] =
        std::array::from_fn(|k| r[k + 1].map(|c| C64::new(rat_to_f64(c), 0.0)).eval(&z));
    let norm = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let v = v.map(|c| c / norm);
    let s: C64 = v.iter().map(|c| c * c).sum();
    let vu: C64 = (0..3).map(|k| v[k] * u[k]).sum();
    if s.norm() <= TOL && vu.norm() <= TOL {
        Duporcq::Full
    } else if (s - vu * vu).norm() <= TOL {
        Duporcq::FirstOnly
    } else {
        Duporcq::None
    }
}

/// Duporcq test for an already classified pentapod.
pub fn duporcq_for_class(class: &PentapodClass) -> Result<Duporcq> {
    match class.kind {
        PentapodType::Type1 | PentapodType::Type2 | PentapodType::Type5 => {}
        other => {
            return Err(Error::WrongBranch(format!(
                "the Duporcq condition is defined for Types 1, 2 and 5, not {}",
                other.name()
            )))
        }
    }
    Ok(match ideal_points(class)? {
        Some(ip) => duporcq_of(class, &ip),
        None => Duporcq::None,
    })
}

/// Whether the replacement curve lies on a cylinder of revolution (first
/// condition) and whether it is a straight cubic circle (both conditions).
pub fn duporcq_check<T: RealScalar>(p: &Pentapod<T>) -> Result<Duporcq> {
    duporcq_for_class(&classify_type(p)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DesignType {
    Type1,
    Type2,
    Type5,
}

impl DesignType {
    pub fn name(self) -> &'static str {
        match self {
            DesignType::Type1 => "Type1",
            DesignType::Type2 => "Type2",
            DesignType::Type5 => "Type5",
        }
    }
}

/// Map from canonical to user coordinates: `M ↦ R·M + t`, `a ↦ a + shift`.
#[derive(Clone, Debug, PartialEq)]
pub struct RigidTransform {
    /// Columns are the canonical axes expressed in the user frame.
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
    pub platform_shift: f64,
}

impl RigidTransform {
    pub fn identity() -> Self {
        RigidTransform {
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: [0.0; 3],
            platform_shift: 0.0,
        }
    }

    pub fn apply_point(&self, m: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|i| {
            (0..3).map(|j| self.rotation[i][j] * m[j]).sum::<f64>() + self.translation[i]
        })
    }

    pub fn inverse_point(&self, m: &[f64; 3]) -> [f64; 3] {
        let d = sub3(m, &self.translation);
        std::array::from_fn(|j| (0..3).map(|i| self.rotation[i][j] * d[i]).sum())
    }

    pub fn apply_platform(&self, a: f64) -> f64 {
        a + self.platform_shift
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

/// Canonical-frame geometry of a self-motion design.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalGeometry {
    pub kind: DesignType,
    /// First Darboux platform point; the second one is its conjugate.
    pub a2: GaussRat,
    /// `a4` for Types 1 and 2, `a5` for Type 5.
    pub a_last: Rat,
    /// Mannheim point (Types 1, 2) or base point of the fifth leg (Type 5).
    pub m5: [Rat; 3],
    pub r1_sq: Rat,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LegParams {
    /// Types 1 and 2: Darboux offsets `p2, p3, p4` and Mannheim offset `p5`.
    Darboux {
        p2: GaussRat,
        p3: GaussRat,
        p4: Rat,
        p5: Rat,
    },
    /// Type 5: Darboux offsets, angle constant `w` and squared fifth length.
    Angle {
        p2: GaussRat,
        p3: GaussRat,
        w: Rat,
        r5_sq: Rat,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelfMotionDesign {
    pub geometry: CanonicalGeometry,
    pub params: LegParams,
    pub frame: RigidTransform,
}

fn g(r: &Rat) -> GaussRat {
    GaussRat::new(r.clone(), Rat::zero())
}

fn i_unit() -> GaussRat {
    GaussRat::new(Rat::zero(), Rat::one())
}

fn real_part(z: GaussRat, what: &str) -> Result<Rat> {
    if z.im.is_zero() {
        Ok(z.re)
    } else {
        Err(Error::Internal(format!("{what} came out non-real: {z}")))
    }
}

/// Leg parameters that give the canonical design a self-motion. For Type 1
/// with `a2·a3 = a4²` the Mannheim offset is free and set to zero; the
/// design then needs `R1² = a4²`.
pub fn synth_leg_params(geom: &CanonicalGeometry) -> Result<SelfMotionDesign> {
    let a2 = geom.a2.clone();
    if a2.im.is_zero() {
        return Err(Error::Degenerate("a2 must be non-real (a_c ≠ 0)".into()));
    }
    let a3 = a2.conj();
    let i = i_unit();
    let [a5x, b5, c5] = geom.m5.each_ref().map(g);
    let s5 = &(&a5x * &a5x + &b5 * &b5) + &(&c5 * &c5);
    let r1 = g(&geom.r1_sq);
    let minus = &a5x - &(&i * &b5);
    let plus = &a5x + &(&i * &b5);
    let params = match geom.kind {
        DesignType::Type1 => {
            let a4 = g(&geom.a_last);
            let k = &(&a2 * &a3) - &(&a4 * &a4);
            let d2 = &(&a3 - &a4) * &(&a3 - &a4);
            let d3 = &(&a2 - &a4) * &(&a2 - &a4);
            let p2 = -(&(&minus * &k) / &d2);
            let p3 = -(&(&plus * &k) / &d3);
            let p4 = &(&c5 * &k) / &(&(&a2 - &a4) * &(&a3 - &a4));
            let s = &(&a2 + &a3) - &(&a4 + &a4);
            let p5 = if k.is_zero() {
                if geom.r1_sq != &geom.a_last * &geom.a_last {
                    return Err(Error::NotASelfMotion(
                        "a2·a3 = a4² admits a self-motion only for R1² = a4²".into(),
                    ));
                }
                GaussRat::zero()
            } else {
                let mixed = &(&(&a2 * &a3) + &(&a2 * &a3)) - &(&(&a2 * &a4) + &(&a3 * &a4));
                let num = &(&(&s * &r1) + &(&mixed * &a4))
                    - &(&(&(&k * &k) * &(&s * &s5)) / &(&d2 * &d3));
                &num / &(&k + &k)
            };
            LegParams::Darboux {
                p2,
                p3,
                p4: real_part(p4, "p4")?,
                p5: real_part(p5, "p5")?,
            }
        }
        DesignType::Type2 => {
            if !geom.a_last.is_zero() || !geom.m5[2].is_zero() {
                return Err(Error::Degenerate(
                    "the Type-2 canonical frame needs a4 = 0 and C5 = 0".into(),
                ));
            }
            let p2 = -(&(&a2 * &minus) / &a3);
            let p3 = -(&(&a3 * &plus) / &a2);
            let ab = &(&a5x * &a5x) + &(&b5 * &b5);
            let p5 = &(&(&a2 + &a3) * &(&r1 - &ab)) / &(&(&a2 * &a3) + &(&a2 * &a3));
            LegParams::Darboux {
                p2,
                p3,
                p4: Rat::zero(),
                p5: real_part(p5, "p5")?,
            }
        }
        DesignType::Type5 => {
            let a5 = g(&geom.a_last);
            if a5.is_zero() {
                return Err(Error::Degenerate(
                    "a5 = 0 puts the fifth leg on the first platform point".into(),
                ));
            }
            let w = &c5 / &a5;
            let p2 = -(&(&(&a3 - &a5) * &minus) / &a5);
            let p3 = -(&(&(&a2 - &a5) * &plus) / &a5);
            let r5 = &(&(&r1 - &(&a2 * &a5)) - &(&a3 * &a5)) + &(&a5 * &a5);
            let r5 = &r5 + &(&(&s5 * &(&(&a2 + &a3) - &a5)) / &a5);
            LegParams::Angle {
                p2,
                p3,
                w: real_part(w, "w")?,
                r5_sq: real_part(r5, "R5²")?,
            }
        }
    };
    Ok(SelfMotionDesign {
        geometry: geom.clone(),
        params,
        frame: RigidTransform::identity(),
    })
}

impl SelfMotionDesign {
    /// The five canonical constraints (complex Darboux pair included).
    pub fn hyperplanes(&self) -> Vec<Hyperplane<GaussRat>> {
        let geo = &self.geometry;
        let z = GaussRat::zero;
        let o = GaussRat::one;
        let i = i_unit();
        let lam1 = Hyperplane::sphere_r2(&z(), &[z(), z(), z()], &g(&geo.r1_sq));
        let a2 = geo.a2.clone();
        let a3 = a2.conj();
        let (p2, p3) = match &self.params {
            LegParams::Darboux { p2, p3, .. } | LegParams::Angle { p2, p3, .. } => {
                (p2.clone(), p3.clone())
            }
        };
        let om2 = Hyperplane::darboux_raw(&a2, &[o(), -i.clone(), z()], &p2);
        let om3 = Hyperplane::darboux_raw(&a3, &[o(), i, z()], &p3);
        let ez = [z(), z(), o()];
        let m5 = geo.m5.each_ref().map(g);
        let al = g(&geo.a_last);
        match &self.params {
            LegParams::Darboux { p4, p5, .. } => vec![
                lam1,
                om2,
                om3,
                Hyperplane::darboux_raw(&al, &ez, &g(p4)),
                Hyperplane::mannheim(&m5, &g(p5)),
            ],
            LegParams::Angle { w, r5_sq, .. } => vec![
                lam1,
                om2,
                om3,
                Hyperplane::angle_raw(&ez, &g(w)),
                Hyperplane::sphere_r2(&al, &m5, &g(r5_sq)),
            ],
        }
    }

    /// Real form of [`Self::hyperplanes`]: the Darboux pair is replaced by
    /// its real and imaginary parts.
    pub fn real_hyperplanes(&self) -> Result<Vec<Hyperplane<Rat>>> {
        let hs = self.hyperplanes();
        let (re, im) = realify(&hs[1], &hs[2])?;
        let real = |h: &Hyperplane<GaussRat>| -> Result<Hyperplane<Rat>> {
            if h.coeffs.iter().any(|c| !c.im.is_zero()) {
                return Err(Error::Internal(
                    "real constraint with complex coefficients".into(),
                ));
            }
            Ok(h.map(|c| c.re.clone()))
        };
        Ok(vec![real(&hs[0])?, re, im, real(&hs[3])?, real(&hs[4])?])
    }

    /// Conditions that must all vanish: the linear leg-parameter equations
    /// followed by the remaining scalar relation.
    pub fn relation_residuals(&self) -> Vec<GaussRat> {
        let geo = &self.geometry;
        let a2 = geo.a2.clone();
        let a3 = a2.conj();
        let i = i_unit();
        let [ax, bx, cx] = geo.m5.each_ref().map(g);
        let s5 = &(&ax * &ax + &bx * &bx) + &(&cx * &cx);
        let r1 = g(&geo.r1_sq);
        let ib = &i * &bx;
        match (&self.params, geo.kind) {
            (LegParams::Darboux { p2, p3, p4, p5 }, DesignType::Type1) => {
                let a4 = g(&geo.a_last);
                let k = &(&a2 * &a3) - &(&a4 * &a4);
                let (d2, d3) = (&a3 - &a4, &a2 - &a4);
                let e3 = &(&(&ax * &k) + &(p2 * &(&d2 * &d2))) - &(&k * &ib);
                let e4 = &(&(&ax * &k) + &(p3 * &(&d3 * &d3))) + &(&k * &ib);
                let e5 = &(&cx * &k) - &(&g(p4) * &(&d3 * &d2));
                let s = &(&a2 + &a3) - &(&a4 + &a4);
                let mixed = &(&(&a2 * &a3) + &(&a2 * &a3)) - &(&(&a2 * &a4) + &(&a3 * &a4));
                let bracket = &(&(&(&k + &k) * &g(p5)) - &(&s * &r1)) - &(&mixed * &a4);
                let sq = &(&d3 * &d3) * &(&d2 * &d2);
                let last = &(&sq * &bracket) + &(&(&k * &k) * &(&s * &s5));
                vec![e3, e4, e5, last]
            }
            (LegParams::Darboux { p2, p3, p4, p5 }, _) => {
                let e6 = &(&a2 * &(&ax - &ib)) + &(&a3 * p2);
                let e7 = &(&a3 * &(&ax + &ib)) + &(&a2 * p3);
                let ab = &(&ax * &ax) + &(&bx * &bx);
                let sum = &a2 + &a3;
                let last = &(&(&ab * &sum) + &(&(&a2 * &a3) * &g(&(p5 + p5)))) - &(&r1 * &sum);
                vec![e6, e7, g(p4), last]
            }
            (LegParams::Angle { p2, p3, w, r5_sq }, _) => {
                let a5 = g(&geo.a_last);
                let e1 = &(&(&a3 - &a5) * &(&ax - &ib)) + &(&a5 * p2);
                let e2 = &(&(&a2 - &a5) * &(&ax + &ib)) + &(&a5 * p3);
                let ew = &(&a5 * &g(w)) - &cx;
                let inner = &(&(&(&r1 - &g(r5_sq)) - &(&a2 * &a5)) - &(&a3 * &a5)) + &(&a5 * &a5);
                let last = &(&s5 * &(&(&a2 + &a3) - &a5)) + &(&inner * &a5);
                vec![e1, e2, ew, last]
            }
        }
    }

    /// The remaining scalar relation alone.
    pub fn remaining_relation(&self) -> GaussRat {
        self.relation_residuals().pop().expect("non-empty")
    }

    pub fn satisfies_relations(&self) -> bool {
        self.relation_residuals().iter().all(|r| r.is_zero())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reality {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RealityVerdict {
    pub reality: Reality,
    /// Decided by tracing rather than by a closed criterion.
    pub empirical: bool,
}

/// Type 5 with `|C5| >= |a5|` is complex since the platform direction would
/// satisfy `x1² + x2² <= 0`. Otherwise reality also depends on the leg data
/// and is decided by tracing.
pub fn reality(design: &SelfMotionDesign) -> Result<RealityVerdict> {
    if design.geometry.kind == DesignType::Type5
        && design.geometry.m5[2].abs() >= design.geometry.a_last.abs()
    {
        return Ok(RealityVerdict {
            reality: Reality::Complex,
            empirical: false,
        });
    }
    Ok(RealityVerdict {
        reality: trace(design, 16)?.reality,
        empirical: true,
    })
}

/// Legs compatible with the design's self-motion, one entry per platform
/// coordinate `a` (canonical frame). Each sphere condition is an exact
/// linear combination `Σ μ_k·H_k` of the five canonical constraints.
pub fn real_legs_from_design(design: &SelfMotionDesign, a_values: &[Rat]) -> Vec<Result<Leg<Rat>>> {
    let hs = design.hyperplanes();
    a_values
        .iter()
        .map(|a| {
            // Unknowns: μ1..μ5, A, B, C, K with K = (a² + |M|² − R²)/2.
            let ga = g(a);
            let mut m = Matrix::<GaussRat>::zeros(9, 9);
            let mut rhs = vec![GaussRat::zero(); 9];
            for j in 0..9 {
                for (k, h) in hs.iter().enumerate() {
                    m[(j, k)] = h.coeffs[j].clone();
                }
            }
            for c in 0..3 {
                m[(2 + c, 5 + c)] = -ga.clone();
                m[(6 + c, 5 + c)] = -GaussRat::one();
            }
            m[(1, 8)] = -GaussRat::one();
            rhs[0] = g(&Rat::from_integer(4.into()));
            rhs[5] = ga.clone();
            let sol = m.solve(&rhs).ok_or_else(|| {
                Error::Degenerate(format!("a = {a} is an exceptional platform point"))
            })?;
            let base = [
                real_part(sol[5].clone(), "A")?,
                real_part(sol[6].clone(), "B")?,
                real_part(sol[7].clone(), "C")?,
            ];
            let kk = real_part(sol[8].clone(), "K")?;
            let r2 = &(a * a)
                + &(&(&base[0] * &base[0]) + &(&(&base[1] * &base[1]) + &(&base[2] * &base[2])))
                - &(&kk + &kk);
            Ok(Leg::with_r2(a.clone(), base, r2))
        })
        .collect()
}

impl SelfMotionDesign {
    /// A canonical leg expressed in the user frame.
    pub fn to_user(&self, leg: &Leg<Rat>) -> Leg<f64> {
        let base = self.frame.apply_point(&leg.base.each_ref().map(rat_to_f64));
        let mut out = Leg::new(self.frame.apply_platform(rat_to_f64(&leg.a)), base);
        out.r2 = leg.r2.as_ref().map(rat_to_f64);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Upper,
    Lower,
}

#[derive(Clone, Debug)]
pub struct MotionCurveSample {
    pub t: f64,
    /// Normalized (`x0 = 1`).
    pub params: MotionParams<f64>,
    pub branch: Branch,
}

#[derive(Clone, Debug)]
pub struct Trace {
    /// Motion-parameter index used as curve parameter.
    pub parameter: usize,
    /// Maximal parameter intervals carrying real points.
    pub intervals: Vec<(f64, f64)>,
    /// Ordered by `t`, upper branch before lower branch. Over a parameter
    /// value with more than two real points the upper half (by `x2`) is
    /// labeled upper.
    pub samples: Vec<MotionCurveSample>,
    pub reality: Reality,
}

/// Cells of the initial scan over the admissible parameter range.
const SCAN_CELLS: usize = 400;

struct Curve {
    param: Parametrization<Rat>,
    /// Free-variable positions of `(u0, u1, t)`.
    order: [usize; 3],
    q: [MPoly<f64>; 3],
    grads: [[MPoly<f64>; 2]; 3],
    /// Real points have `|t| <= bound`.
    bound: f64,
}

impl Curve {
    fn new(hs: &[Hyperplane<Rat>]) -> Result<Curve> {
        // Keep a platform-direction coordinate free; an angle constraint
        // pins x3, so fall back to pivot sets that include it.
        let mut alternatives = vec![DK_PIVOTS.to_vec()];
        alternatives.extend((0..6).map(|skip| {
            [0usize, 4, 5, 6, 7, 8]
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, v)| *v)
                .collect()
        }));
        let mut param = None;
        for prefer in &alternatives {
            let cand = parametrize(hs, &[(1, Rat::one())], prefer).map_err(|e| match e {
                Error::DependentConstraints(m) => Error::ArchitecturallySingular(m),
                other => other,
            })?;
            let ok = cand.free.iter().any(|f| (2..5).contains(f));
            if ok || param.is_none() {
                param = Some(cand);
            }
            if ok {
                break;
            }
        }
        let param = param.expect("at least one pivot set");
        if param.free.len() != 3 {
            return Err(Error::Internal(format!(
                "expected three free parameters, got {}",
                param.free.len()
            )));
        }
        // |x1|, |x2|, |x3| <= 1 on real points, so one of them is the parameter.
        let tpos = [4usize, 2, 3]
            .iter()
            .find_map(|v| param.free.iter().position(|f| f == v))
            .ok_or_else(|| Error::Degenerate("no platform-direction coordinate is free".into()))?;
        let others: Vec<usize> = (0..3).filter(|&k| k != tpos).collect();
        let order = [others[0], others[1], tpos];
        let mut perm = [0usize; 3];
        for (k, &v) in order.iter().enumerate() {
            perm[v] = k;
        }
        let exact: [MPoly<Rat>; 3] = param.phi().map(|p| p.permute_vars(&perm));
        if let Some(poly) = eliminate(&exact)? {
            return Err(Error::NotASelfMotion(format!(
                "the constraints meet the image variety in finitely many points (elimination degree {})",
                poly.degree().unwrap_or(0)
            )));
        }
        let q: [MPoly<f64>; 3] = exact.map(|p| {
            let f = p.map_coeffs(rat_to_f64);
            let s = f.max_abs_coeff();
            if s > 0.0 {
                f.scale(&(1.0 / s))
            } else {
                f
            }
        });
        let grads = std::array::from_fn(|k| [q[k].derivative(0), q[k].derivative(1)]);
        // x1² + x2² + x3² = 1 with x0 = 1; pinned coordinates shrink the range.
        let pinned: f64 = (2..5)
            .filter(|&v| param.coords[v].total_degree().unwrap_or(0) == 0)
            .map(|v| param.coords[v].eval(&[Rat::zero(), Rat::zero(), Rat::zero()]))
            .map(|c| rat_to_f64(&c).powi(2))
            .sum();
        let bound = (1.0 - pinned).max(0.0).sqrt();
        Ok(Curve {
            param,
            order,
            q,
            grads,
            bound,
        })
    }

    fn residual(&self, u: &[f64; 3]) -> f64 {
        self.q.iter().map(|p| p.eval(u).abs()).fold(0.0, f64::max)
    }

    fn polish(&self, t: f64, mut u: [f64; 2]) -> [f64; 2] {
        for _ in 0..50 {
            let pt = [u[0], u[1], t];
            let f = Vector3::from_fn(|i, _| self.q[i].eval(&pt));
            let j = Matrix3x2::from_fn(|i, k| self.grads[i][k].eval(&pt));
            let Ok(step) = j.svd(true, true).solve(&f, 1e-13 * j.norm()) else {
                break;
            };
            if !step.iter().all(|s| s.is_finite()) {
                break;
            }
            u[0] -= step[0];
            u[1] -= step[1];
            if step.norm() <= 1e-16 * (1.0 + u[0].abs() + u[1].abs()) {
                break;
            }
        }
        u
    }

    /// Real points of the curve over parameter value `t`.
    fn points_at(&self, t: f64) -> Vec<[f64; 2]> {
        let fixed: [MPoly<f64>; 3] = std::array::from_fn(|k| self.q[k].subs(2, &t));
        let mut starts: Vec<[f64; 2]> = Vec::new();
        for swap in [false, true] {
            let polys: [MPoly<f64>; 3] = if swap {
                std::array::from_fn(|k| fixed[k].permute_vars(&[1, 0, 2]))
            } else {
                fixed.clone()
            };
            let mut cands = Vec::new();
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                cands.extend(pair_candidates(&polys[a], &polys[b]));
            }
            for v in cands {
                if v.im.abs() > 1e-6 * (1.0 + v.norm()) {
                    continue;
                }
                for fq in &polys {
                    let Some(up) = fq.subs(1, &v.re).to_upoly(0) else {
                        continue;
                    };
                    let coeffs: Vec<C64> = up.coeffs().iter().map(|c| C64::new(*c, 0.0)).collect();
                    if coeffs.is_empty() {
                        continue;
                    }
                    for w in quad_roots(&coeffs) {
                        if w.im.abs() > 1e-6 * (1.0 + w.norm()) {
                            continue;
                        }
                        let s = if swap { [v.re, w.re] } else { [w.re, v.re] };
                        let scale = 1.0 + s[0] * s[0] + s[1] * s[1];
                        if self.residual(&[s[0], s[1], t]) > 1e-3 * scale {
                            continue;
                        }
                        if starts
                            .iter()
                            .all(|p| (p[0] - s[0]).abs() + (p[1] - s[1]).abs() > 1e-9 * scale)
                        {
                            starts.push(s);
                        }
                    }
                }
            }
        }
        let mut out: Vec<[f64; 2]> = Vec::new();
        for s in starts {
            let u = self.polish(t, s);
            let scale = 1.0 + u[0] * u[0] + u[1] * u[1] + t * t;
            if self.residual(&[u[0], u[1], t]) > 1e-10 * scale {
                continue;
            }
            if out
                .iter()
                .all(|p| (p[0] - u[0]).abs() + (p[1] - u[1]).abs() > 1e-7 * scale)
            {
                out.push(u);
            }
        }
        out
    }

    fn params(&self, t: f64, u: [f64; 2]) -> MotionParams<f64> {
        let mut vals = [0.0; 3];
        vals[self.order[0]] = u[0];
        vals[self.order[1]] = u[1];
        vals[self.order[2]] = t;
        self.param.point(&vals, rat_to_f64)
    }

    fn has_real(&self, t: f64) -> bool {
        !self.points_at(t).is_empty()
    }

    /// Boundary between `inside` (real points) and `outside`.
    fn bisect(&self, mut inside: f64, mut outside: f64) -> f64 {
        for _ in 0..64 {
            if (inside - outside).abs() <= 1e-14 {
                break;
            }
            let mid = 0.5 * (inside + outside);
            if self.has_real(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    }

    fn intervals(&self) -> Vec<(f64, f64)> {
        let b = self.bound;
        if b <= TOL {
            return Vec::new();
        }
        let nodes: Vec<f64> = (0..=SCAN_CELLS)
            .map(|j| b * (-1.0 + 2.0 * j as f64 / SCAN_CELLS as f64))
            .collect();
        let real: Vec<bool> = nodes.iter().map(|&t| self.has_real(t)).collect();
        let mut out = Vec::new();
        let mut j = 0;
        while j < nodes.len() {
            if !real[j] {
                j += 1;
                continue;
            }
            let j0 = j;
            while j + 1 < nodes.len() && real[j + 1] {
                j += 1;
            }
            let lo = if j0 == 0 {
                -b
            } else {
                self.bisect(nodes[j0], nodes[j0 - 1])
            };
            let hi = if j + 1 == nodes.len() {
                b
            } else {
                self.bisect(nodes[j], nodes[j + 1])
            };
            if hi - lo > TOL {
                out.push((lo, hi));
            } else {
                debug!("isolated real point near t = {lo}");
            }
            j += 1;
        }
        out
    }
}

/// Trace the configuration curve cut out by five real constraints.
/// `samples` cell-centred parameter values are taken in each real interval.
pub fn trace_constraints(hs: &[Hyperplane<Rat>], samples: usize) -> Result<Trace> {
    if hs.len() != 5 {
        return Err(Error::InvalidArgument(format!(
            "expected 5 constraints, got {}",
            hs.len()
        )));
    }
    let curve = Curve::new(hs)?;
    let intervals = curve.intervals();
    let mut out = Vec::new();
    for &(lo, hi) in &intervals {
        for k in 0..samples {
            let t = lo + (k as f64 + 0.5) * (hi - lo) / samples as f64;
            let mut pts: Vec<MotionParams<f64>> = curve
                .points_at(t)
                .into_iter()
                .map(|u| curve.params(t, u))
                .collect();
            // Larger x2 first; ties broken by the remaining coordinates.
            let key =
                |m: &MotionParams<f64>| [m.x[2], m.x[1], m.x[3], m.y[0], m.y[1], m.y[2], m.y[3]];
            pts.sort_by(|a, b| {
                key(b)
                    .partial_cmp(&key(a))
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            let upper = pts.len().div_ceil(2);
            for (idx, m) in pts.into_iter().enumerate() {
                let branch = if idx < upper {
                    Branch::Upper
                } else {
                    Branch::Lower
                };
                out.push(MotionCurveSample {
                    t,
                    params: m,
                    branch,
                });
            }
        }
    }
    let reality = if intervals.is_empty() {
        Reality::Complex
    } else {
        Reality::Real
    };
    Ok(Trace {
        parameter: curve.param.free[curve.order[2]],
        intervals,
        samples: out,
        reality,
    })
}

/// Trace a synthesized design. Fails if the leg parameters do not satisfy
/// the design's relations.
pub fn trace(design: &SelfMotionDesign, samples: usize) -> Result<Trace> {
    if !design.satisfies_relations() {
        let worst = design
            .relation_residuals()
            .iter()
            .map(|r| r.magnitude())
            .fold(0.0, f64::max);
        return Err(Error::NotASelfMotion(format!(
            "leg-parameter relations violated (largest residual {worst:e})"
        )));
    }
    trace_constraints(&design.real_hyperplanes()?, samples)
}

/// Trace a pentapod whose legs carry lengths.
pub fn trace_pentapod<T: RealScalar>(p: &Pentapod<T>, samples: usize) -> Result<Trace> {
    trace_constraints(&exact(p)?.spheres()?, samples)
}

/// Platform point `a` along a trace sample.
pub fn track_point(sample: &MotionCurveSample, a: f64) -> Result<[f64; 3]> {
    displacement(&sample.params, &a)
}

fn snap(x: f64) -> Result<Rat> {
    if let Some(r) = rationalize(x, 1_000_000) {
        if (rat_to_f64(&r) - x).abs() <= 1e-12 * (1.0 + x.abs()) {
            return Ok(r);
        }
    }
    rat_from_f64(x).ok_or_else(|| Error::InvalidArgument("non-finite value".into()))
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = dot3(&v, &v).sqrt();
    v.map(|c| c / n)
}

/// Bring a pentapod that satisfies the Duporcq condition into the canonical
/// frame of its type and synthesize the leg parameters there. `r1_sq`
/// overrides the squared length of the origin leg.
pub fn synth_from_pentapod<T: RealScalar>(
    p: &Pentapod<T>,
    r1_sq: Option<f64>,
) -> Result<SelfMotionDesign> {
    let pe = exact(p)?;
    let class = classify_type(&pe)?;
    let kind = match class.kind {
        PentapodType::Type1 => DesignType::Type1,
        PentapodType::Type2 => DesignType::Type2,
        PentapodType::Type5 => DesignType::Type5,
        other => {
            return Err(Error::WrongBranch(format!(
                "{} pentapods have no self-motion designs",
                other.name()
            )))
        }
    };
    let ip = ideal_points(&class)?.ok_or_else(|| {
        Error::NotASelfMotion("the replacement curve lies on no cylinder of revolution".into())
    })?;
    let verdict = duporcq_of(&class, &ip);
    if verdict != Duporcq::Full {
        return Err(Error::NotASelfMotion(format!(
            "the Duporcq condition fails ({verdict:?})"
        )));
    }
    let c = class.cubic.as_ref().expect("non-planar type");
    let legs: Vec<Leg<f64>> = pe.legs.iter().map(|l| l.map(rat_to_f64)).collect();
    let leg_r2 = |l: &Leg<f64>| l.r2;
    let (origin_a, origin, r1) = match kind {
        DesignType::Type1 | DesignType::Type5 => {
            (legs[0].a, legs[0].base, r1_sq.or(leg_r2(&legs[0])))
        }
        DesignType::Type2 => {
            let ex = &class.exceptional[0];
            let a = ex.exact_a.as_ref().map(rat_to_f64).ok_or_else(|| {
                Error::Degenerate("the exceptional platform point is not rational".into())
            })?;
            let q = ProjAffine::of(&ex.image.0)?;
            let from_leg = legs.iter().find(|l| (l.a - a).abs() <= TOL).and_then(|l| {
                let d = sub3(&l.base, &q);
                l.r2.map(|r2| r2 - dot3(&d, &d))
            });
            (a, q, r1_sq.or(from_leg))
        }
    };
    let r1 = r1.ok_or_else(|| {
        Error::InvalidArgument("the squared length of the origin leg is required".into())
    })?;
    let e3 = ip.axis.unit();
    let k = (0..3)
        .min_by(|&i, &j| e3[i].abs().partial_cmp(&e3[j].abs()).unwrap())
        .unwrap();
    let mut ek = [0.0; 3];
    ek[k] = 1.0;
    let e1 = normalize(std::array::from_fn(|i| ek[i] - e3[k] * e3[i]));
    let e2 = cross3(&e3, &e1);
    let frame = RigidTransform {
        rotation: std::array::from_fn(|i| [e1[i], e2[i], e3[i]]),
        translation: origin,
        platform_shift: origin_a,
    };
    // a2 is the Darboux root whose ideal point is (1, -i, 0).
    let reduced_at = |z: C64| -> [C64; 3] {
        let v = sigma_reduced(c, &z).0;
        std::array::from_fn(|k| v[k + 1])
    };
    let isotropy = |z: C64| -> f64 {
        let v = reduced_at(z);
        let rot = |e: &[f64; 3]| -> C64 { (0..3).map(|k| v[k] * e[k]).sum() };
        let (vx, vy) = (rot(&e1), rot(&e2));
        (vy + C64::i() * vx).norm() / (vx.norm() + vy.norm())
    };
    let a2c = if isotropy(ip.complex[0]) <= isotropy(ip.complex[1]) {
        ip.complex[0]
    } else {
        ip.complex[1]
    };
    let to_canon = |m: &[f64; 3]| frame.inverse_point(m);
    let (a_last, m5) = match kind {
        DesignType::Type1 | DesignType::Type2 => {
            let n = c
                .reduced
                .iter()
                .filter_map(|q| q.degree())
                .max()
                .unwrap_or(0);
            let w = rat_to_f64(&c.reduced[0].coeff(n));
            if w == 0.0 {
                return Err(Error::Degenerate(
                    "the ideal platform point maps to an ideal base point".into(),
                ));
            }
            let mm: [f64; 3] = std::array::from_fn(|k| rat_to_f64(&c.reduced[k + 1].coeff(n)) / w);
            let a4 = match (kind, &ip.source) {
                (DesignType::Type1, AxisSource::Root(r)) => r - origin_a,
                (DesignType::Type1, _) => {
                    return Err(Error::Degenerate(
                        "the real ideal point of the cubic is the Mannheim point".into(),
                    ))
                }
                _ => 0.0,
            };
            (a4, to_canon(&mm))
        }
        DesignType::Type5 => {
            let leg = legs[1..]
                .iter()
                .find(|l| (l.a - origin_a).abs() > TOL)
                .ok_or_else(|| Error::Degenerate("no leg apart from the origin leg".into()))?;
            (leg.a - origin_a, to_canon(&leg.base))
        }
    };
    let mut m5r = [snap(m5[0])?, snap(m5[1])?, snap(m5[2])?];
    if kind == DesignType::Type2 {
        if m5[2].abs() > 1e-7 * (1.0 + m5.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            return Err(Error::Internal(format!(
                "Type-2 Mannheim point off the conic plane (C5 = {})",
                m5[2]
            )));
        }
        m5r[2] = Rat::zero();
    }
    let geom = CanonicalGeometry {
        kind,
        a2: GaussRat::new(snap(a2c.re - origin_a)?, snap(a2c.im)?),
        a_last: if kind == DesignType::Type2 {
            Rat::zero()
        } else {
            snap(a_last)?
        },
        m5: m5r,
        r1_sq: snap(r1)?,
    };
    let mut design = synth_leg_params(&geom)?;
    design.frame = frame;
    Ok(design)
}

struct ProjAffine;

impl ProjAffine {
    fn of(v: &[C64; 4]) -> Result<[f64; 3]> {
        if v[0].norm() <= TOL * v.iter().map(|c| c.norm()).fold(0.0, f64::max) {
            return Err(Error::Degenerate(
                "the exceptional line meets the conic at infinity".into(),
            ));
        }
        Ok(std::array::from_fn(|k| (v[k + 1] / v[0]).re))
    }
}

/// Circular translation of a planar pentapod: at the reference pose every
/// leg is parallel to the fibre direction, `m_i = M_i + z_i·fiber`; the
/// motion adds `r·(cos t·across + sin t·normal)` to every platform point.
#[derive(Clone, Debug)]
pub struct CircularTranslation {
    /// Unit direction of the fibres (the ideal vertex).
    pub fiber: [f64; 3],
    /// Unit vector in the base plane across the fibres, towards increasing
    /// platform coordinate.
    pub across: [f64; 3],
    pub normal: [f64; 3],
    /// Unit platform direction.
    pub direction: [f64; 3],
    pub offsets: [f64; 5],
    pub radius: f64,
    /// Squared gradient `|g|²` of the affine relation `a = g·M + β`.
    pub stretch: Rat,
}

impl CircularTranslation {
    pub fn platform_points(&self, bases: &[[f64; 3]; 5], t: f64) -> [[f64; 3]; 5] {
        std::array::from_fn(|i| {
            std::array::from_fn(|k| {
                bases[i][k]
                    + self.offsets[i] * self.fiber[k]
                    + self.radius * (t.cos() * self.across[k] + t.sin() * self.normal[k])
            })
        })
    }
}

/// Affine relation `a_i = α·c_i + β` in plane coordinates `c_i`, if any.
fn planar_affine_relation(
    p: &Pentapod<Rat>,
) -> Result<Option<([Rat; 2], crate::archsing::PlaneCoords<Rat>)>> {
    let pc =
        plane_coords(&p.bases()).ok_or_else(|| Error::WrongBranch("base is not planar".into()))?;
    let rows: Vec<Vec<Rat>> = (0..5)
        .map(|i| {
            vec![
                pc.coords[i][0].clone(),
                pc.coords[i][1].clone(),
                Rat::one(),
                -p.legs[i].a.clone(),
            ]
        })
        .collect();
    let null = Matrix::from_rows(rows).nullspace(0.0);
    let Some(v) = null.iter().find(|v| !v[3].is_zero()) else {
        return Ok(None);
    };
    Ok(Some(([&v[0] / &v[3], &v[1] / &v[3]], pc)))
}

/// Planar pentapods satisfying the affine relation.
pub fn planar_affine<T: RealScalar>(p: &Pentapod<T>) -> Result<bool> {
    let pe = exact(p)?;
    if !pe.base_is_planar() {
        return Err(Error::WrongBranch(
            "the affine-relation test needs a planar base".into(),
        ));
    }
    Ok(planar_affine_relation(&pe)?.is_some())
}

/// Real circular translation of a planar pentapod, if its platform can be
/// placed so that the projections along the fibres are congruent.
pub fn circular_translation_check<T: RealScalar>(
    p: &Pentapod<T>,
) -> Result<Option<CircularTranslation>> {
    let pe = exact(p)?;
    if !pe.base_is_planar() {
        return Err(Error::WrongBranch(
            "circular translations need a planar base".into(),
        ));
    }
    validate_assumptions(&pe)?;
    let arch = classify_arch(&pe)?;
    if arch.singular {
        return Err(Error::ArchitecturallySingular(format!(
            "design case {}",
            arch.case.unwrap_or(0)
        )));
    }
    let Some((alpha, pc)) = planar_affine_relation(&pe)? else {
        return Ok(None);
    };
    // Tangent vectors of the plane chart and their Gram matrix.
    let basis: [[Rat; 3]; 2] = std::array::from_fn(|j| {
        std::array::from_fn(|k| {
            if k == pc.keep[j] {
                Rat::one()
            } else if k == pc.drop {
                -(&pc.normal[pc.keep[j]] / &pc.normal[pc.drop])
            } else {
                Rat::zero()
            }
        })
    });
    let gram = [
        [dot3(&basis[0], &basis[0]), dot3(&basis[0], &basis[1])],
        [dot3(&basis[1], &basis[0]), dot3(&basis[1], &basis[1])],
    ];
    let det = &(&gram[0][0] * &gram[1][1]) - &(&gram[0][1] * &gram[1][0]);
    let lam = [
        &(&(&gram[1][1] * &alpha[0]) - &(&gram[0][1] * &alpha[1])) / &det,
        &(&(&gram[0][0] * &alpha[1]) - &(&gram[1][0] * &alpha[0])) / &det,
    ];
    let stretch = &(&alpha[0] * &lam[0]) + &(&alpha[1] * &lam[1]);
    if stretch < Rat::one() {
        return Ok(None);
    }
    let gv: [f64; 3] = std::array::from_fn(|k| {
        rat_to_f64(&(&(&lam[0] * &basis[0][k]) + &(&lam[1] * &basis[1][k])))
    });
    let gnorm = rat_to_f64(&stretch).sqrt();
    let across = normalize(gv);
    let normal = normalize(pc.normal.each_ref().map(rat_to_f64));
    let fiber = cross3(&normal, &across);
    let s = (1.0 - 1.0 / (gnorm * gnorm)).max(0.0).sqrt();
    let direction: [f64; 3] = std::array::from_fn(|k| across[k] / gnorm + s * fiber[k]);
    let bases: Vec<[f64; 3]> = pe
        .legs
        .iter()
        .map(|l| l.base.each_ref().map(rat_to_f64))
        .collect();
    let a: Vec<f64> = pe.legs.iter().map(|l| rat_to_f64(&l.a)).collect();
    let offsets: [f64; 5] = std::array::from_fn(|i| {
        a[i] * s - dot3(&bases[i], &fiber) + dot3(&bases[0], &fiber) - a[0] * s
    });
    Ok(Some(CircularTranslation {
        fiber,
        across,
        normal,
        direction,
        offsets,
        radius: 1.0,
        stretch,
    }))
}

/// `m2 = m3`, `m4 = m5` and `[M2, M3] ∥ [M4, M5]` up to relabeling.
pub fn parallel_pair_design<T: RealScalar>(p: &Pentapod<T>) -> Result<bool> {
    let pe = exact(p)?;
    let pairs: Vec<(usize, usize)> = (0..5)
        .flat_map(|i| (i + 1..5).map(move |j| (i, j)))
        .filter(|&(i, j)| pe.legs[i].a == pe.legs[j].a)
        .collect();
    for (x, &(i, j)) in pairs.iter().enumerate() {
        for &(k, l) in &pairs[x + 1..] {
            if [i, j].iter().any(|v| *v == k || *v == l) {
                continue;
            }
            let d1 = sub3(&pe.legs[j].base, &pe.legs[i].base);
            let d2 = sub3(&pe.legs[l].base, &pe.legs[k].base);
            let nonzero = |d: &[Rat; 3]| d.iter().any(|c| !c.is_zero());
            if nonzero(&d1) && nonzero(&d2) && cross3(&d1, &d2).iter().all(|c| c.is_zero()) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::scalar::{gauss, rat, rat_int};

    fn r(n: i64, d: i64) -> Rat {
        rat(n, d)
    }

    fn type1_example() -> CanonicalGeometry {
        CanonicalGeometry {
            kind: DesignType::Type1,
            a2: gauss(rat_int(0), rat_int(1)),
            a_last: rat_int(2),
            m5: [rat_int(1), rat_int(1), rat_int(1)],
            r1_sq: rat_int(3),
        }
    }

    fn type2_example() -> CanonicalGeometry {
        CanonicalGeometry {
            kind: DesignType::Type2,
            a2: gauss(rat_int(1), rat_int(1)),
            a_last: rat_int(0),
            m5: [rat_int(1), rat_int(1), rat_int(0)],
            r1_sq: rat_int(4),
        }
    }

    fn type5(c5: Rat, r1_sq: i64) -> CanonicalGeometry {
        CanonicalGeometry {
            kind: DesignType::Type5,
            a2: gauss(rat_int(1), rat_int(1)),
            a_last: rat_int(1),
            m5: [rat_int(1), rat_int(1), c5],
            r1_sq: rat_int(r1_sq),
        }
    }

    fn example_one() -> Pentapod<Rat> {
        Pentapod::from_points(
            [r(0, 1), r(1, 1), r(3, 1), r(-1, 1), r(-2, 1)],
            [
                [r(0, 1), r(0, 1), r(0, 1)],
                [r(0, 1), r(1, 1), r(-1, 1)],
                [r(3, 5), r(6, 5), r(3, 1)],
                [r(1, 1), r(0, 1), r(1, 3)],
                [r(6, 5), r(2, 5), r(1, 2)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn type1_leg_parameters() {
        let d = synth_leg_params(&type1_example()).unwrap();
        let LegParams::Darboux { p2, p3, p4, p5 } = &d.params else {
            panic!()
        };
        assert_eq!(*p2, gauss(r(-3, 25), r(-21, 25)));
        assert_eq!(*p3, p2.conj());
        assert_eq!(*p4, r(-3, 5));
        assert_eq!(*p5, r(46, 75));
        assert!(d.satisfies_relations());
        assert!(d.remaining_relation().is_zero());
    }

    #[test]
    fn type1_special_branch() {
        let mut geo = type1_example();
        geo.a_last = rat_int(1);
        assert!(matches!(
            synth_leg_params(&geo),
            Err(Error::NotASelfMotion(_))
        ));
        geo.r1_sq = rat_int(1);
        let d = synth_leg_params(&geo).unwrap();
        assert!(d.satisfies_relations());
    }

    #[test]
    fn type2_leg_parameters() {
        let d = synth_leg_params(&type2_example()).unwrap();
        let LegParams::Darboux { p2, p3, p4, p5 } = &d.params else {
            panic!()
        };
        assert_eq!(*p2, gauss(rat_int(-1), rat_int(-1)));
        assert_eq!(*p3, gauss(rat_int(-1), rat_int(1)));
        assert!(p4.is_zero());
        assert_eq!(*p5, rat_int(1));
        assert!(d.satisfies_relations());
    }

    #[test]
    fn type5_leg_parameters() {
        let d = synth_leg_params(&type5(rat_int(0), 1)).unwrap();
        let LegParams::Angle { p2, p3, w, r5_sq } = &d.params else {
            panic!()
        };
        assert!(w.is_zero());
        assert_eq!(*p2, gauss(rat_int(1), rat_int(1)));
        assert_eq!(*p3, gauss(rat_int(1), rat_int(-1)));
        assert_eq!(*r5_sq, rat_int(2));
        assert!(d.satisfies_relations());
    }

    #[test]
    fn degenerate_geometry() {
        let mut geo = type1_example();
        geo.a2 = gauss(rat_int(1), rat_int(0));
        assert!(matches!(synth_leg_params(&geo), Err(Error::Degenerate(_))));
        let mut geo = type5(rat_int(0), 1);
        geo.a_last = rat_int(0);
        assert!(matches!(synth_leg_params(&geo), Err(Error::Degenerate(_))));
    }

    #[test]
    fn type5_reality() {
        let real = synth_leg_params(&type5(rat_int(0), 1)).unwrap();
        assert_eq!(
            reality(&real).unwrap(),
            RealityVerdict {
                reality: Reality::Real,
                empirical: true
            }
        );
        let complex = synth_leg_params(&type5(rat_int(2), 1)).unwrap();
        assert_eq!(
            reality(&complex).unwrap(),
            RealityVerdict {
                reality: Reality::Complex,
                empirical: false
            }
        );
        // |C5| < |a5| alone does not make the motion real.
        let mut geo = type5(rat_int(0), 1);
        geo.m5 = [rat_int(0), rat_int(0), rat_int(0)];
        assert_eq!(
            reality(&synth_leg_params(&geo).unwrap()).unwrap().reality,
            Reality::Complex
        );
    }

    #[test]
    fn legs_from_type1_design() {
        let d = synth_leg_params(&type1_example()).unwrap();
        let legs = real_legs_from_design(&d, &[rat_int(0), rat_int(1), rat_int(3)]);
        let l0 = legs[0].as_ref().unwrap();
        assert_eq!(l0.base, [rat_int(0), rat_int(0), rat_int(0)]);
        assert_eq!(l0.r2, Some(rat_int(3)));
        let l1 = legs[1].as_ref().unwrap();
        assert_eq!(l1.base, [rat_int(0), rat_int(1), rat_int(-1)]);
        assert_eq!(l1.r2, Some(r(142, 75)));
        assert_eq!(
            legs[2].as_ref().unwrap().base,
            [r(3, 5), r(6, 5), rat_int(3)]
        );
        // a = 2 maps to the real ideal point.
        assert!(real_legs_from_design(&d, &[rat_int(2)])[0].is_err());
    }

    #[test]
    fn duporcq_examples() {
        assert_eq!(duporcq_check(&example_one()).unwrap(), Duporcq::Full);
        // Stretch the base across the cylinder axis.
        let p = example_one();
        let stretched = Pentapod::from_points(
            std::array::from_fn(|i| p.legs[i].a.clone()),
            std::array::from_fn(|i| {
                let b = &p.legs[i].base;
                [&b[0] * &rat_int(2), b[1].clone(), b[2].clone()]
            }),
        )
        .unwrap();
        assert_eq!(duporcq_check(&stretched).unwrap(), Duporcq::None);
    }

    fn ex1_closed(t: f64, upper: bool) -> [f64; 6] {
        let tt = (-(75.0 * t * t - 30.0 * t - 41.0) * (75.0 * t * t - 90.0 * t + 31.0)).sqrt();
        let s = if upper { 1.0 } else { -1.0 };
        let q = 7.0 / 4.0 * t * t - 7.0 / 5.0 * t;
        let h = 1.0 / 4.0 * t * t - 1.0 / 5.0 * t;
        [
            q - 161.0 / 300.0 - s * tt / 300.0,
            h - 23.0 / 300.0 + s * 7.0 * tt / 300.0,
            t,
            -h + 59.0 / 300.0 - s * 7.0 * tt / 300.0,
            q - 413.0 / 300.0 - s * tt / 300.0,
            -2.0 * t + 3.0 / 5.0,
        ]
    }

    fn coords(m: &MotionParams<f64>) -> [f64; 6] {
        [m.x[1], m.x[2], m.x[3], m.y[1], m.y[2], m.y[3]]
    }

    #[test]
    fn example_one_trace() {
        let d = synth_leg_params(&type1_example()).unwrap();
        let tr = trace(&d, 20).unwrap();
        assert_eq!(tr.parameter, 4);
        assert_eq!(tr.intervals.len(), 1);
        let w = 2.0 / 15.0 * 33f64.sqrt();
        assert!((tr.intervals[0].0 - (0.2 - w)).abs() < 1e-9);
        assert!((tr.intervals[0].1 - (0.2 + w)).abs() < 1e-9);
        assert_eq!(tr.samples.len(), 40);
        for s in &tr.samples {
            let want = ex1_closed(s.t, s.branch == Branch::Upper);
            let got = coords(&s.params);
            for k in 0..6 {
                assert!(
                    (got[k] - want[k]).abs() < 1e-10,
                    "t = {} {:?}: {got:?} vs {want:?}",
                    s.t,
                    s.branch
                );
            }
        }
    }

    #[test]
    fn type5_complex_trace() {
        let d = synth_leg_params(&type5(rat(3, 2), 1)).unwrap();
        let tr = trace(&d, 5).unwrap();
        assert!(tr.samples.is_empty());
        assert_eq!(tr.reality, Reality::Complex);
    }

    #[test]
    fn violated_relation_is_rejected() {
        let mut d = synth_leg_params(&type1_example()).unwrap();
        if let LegParams::Darboux { p5, .. } = &mut d.params {
            *p5 = rat_int(1);
        }
        assert!(matches!(trace(&d, 5), Err(Error::NotASelfMotion(_))));
    }

    #[test]
    fn synth_from_example_one() {
        let p =
            example_one().with_r2(&[rat_int(3), rat_int(1), rat_int(1), rat_int(1), rat_int(1)]);
        let d = synth_from_pentapod(&p, None).unwrap();
        assert_eq!(d.geometry, type1_example());
        assert!(d.frame.is_identity());
    }

    fn planar(a: [i64; 5], x_scale: i64) -> Pentapod<Rat> {
        let y = [0, 3, -2, 5, 1];
        Pentapod::from_points(
            a.map(rat_int),
            std::array::from_fn(|i| [rat_int(x_scale * a[i]), rat_int(y[i]), rat_int(0)]),
        )
        .unwrap()
    }

    #[test]
    fn circular_translation() {
        let p = planar([0, 1, 2, 3, 4], 1);
        let ct = circular_translation_check(&p)
            .unwrap()
            .expect("real circular translation");
        let bases: [[f64; 3]; 5] =
            std::array::from_fn(|i| p.legs[i].base.each_ref().map(rat_to_f64));
        let l0: Vec<f64> = (0..5)
            .map(|i| {
                let d = sub3(&ct.platform_points(&bases, 0.0)[i], &bases[i]);
                dot3(&d, &d)
            })
            .collect();
        for t in [0.3, 1.0, 2.5, 4.0] {
            let pts = ct.platform_points(&bases, t);
            for i in 0..5 {
                let d = sub3(&pts[i], &bases[i]);
                assert!((dot3(&d, &d) - l0[i]).abs() < 1e-12);
                // The platform stays a line with the given spacing.
                let e = sub3(&pts[i], &pts[0]);
                let a = rat_to_f64(&p.legs[i].a);
                assert!((dot3(&e, &e).sqrt() - a).abs() < 1e-12);
            }
        }
        assert!(circular_translation_check(&planar([0, 1, 2, 3, 4], 2))
            .unwrap()
            .is_none());
    }

    #[test]
    fn circular_translation_needs_planar_base() {
        assert!(matches!(
            circular_translation_check(&example_one()),
            Err(Error::WrongBranch(_))
        ));
    }
    #[test]
    fn example_two_trace() {
        let d = synth_leg_params(&type2_example()).unwrap();
        let tr = trace(&d, 20).unwrap();
        assert_eq!(tr.intervals.len(), 1);
        let edge = (2.0 * 2f64.sqrt() - 2.0).sqrt();
        assert!((tr.intervals[0].0 + edge).abs() < 1e-9 && (tr.intervals[0].1 - edge).abs() < 1e-9);
        for s in &tr.samples {
            let t = s.t;
            let tt = (-t.powi(4) - 4.0 * t * t + 4.0).sqrt();
            let sg = if s.branch == Branch::Upper { 1.0 } else { -1.0 };
            let want = [
                -t * t / 2.0,
                sg * tt / 2.0,
                t,
                t * t / 2.0 + 1.0 - sg * tt / 2.0,
                -t * t / 2.0 - 1.0 - sg * tt / 2.0,
            ];
            let got = coords(&s.params);
            for k in 0..5 {
                assert!(
                    (got[k] - want[k]).abs() < 1e-10,
                    "t = {t}: {got:?} vs {want:?}"
                );
            }
            assert_eq!(got[5], 0.0);
        }
    }

    #[test]
    fn type5_reality_boundary() {
        for (c5, real) in [
            (r(0, 1), true),
            (r(1, 2), true),
            (r(99, 100), true),
            (r(1, 1), false),
            (r(3, 2), false),
        ] {
            let d = synth_leg_params(&type5(c5.clone(), 9)).unwrap();
            let tr = trace(&d, 10).unwrap();
            assert_eq!(!tr.samples.is_empty(), real, "C5 = {c5}");
            assert_eq!(tr.reality == Reality::Real, real);
            assert_eq!(reality(&d).unwrap().reality == Reality::Real, real);
            // Constant angle with the z-axis.
            for s in &tr.samples {
                assert!((s.params.x[3] + rat_to_f64(&c5)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn traced_leg_lengths_are_constant() {
        for geo in [type1_example(), type2_example(), type5(r(1, 2), 9)] {
            let d = synth_leg_params(&geo).unwrap();
            let tr = trace(&d, 15).unwrap();
            let avals = [r(-2, 1), r(1, 2), r(5, 3), r(7, 1)];
            for leg in real_legs_from_design(&d, &avals)
                .into_iter()
                .filter_map(|l| l.ok())
            {
                let base = leg.base.each_ref().map(rat_to_f64);
                let r2 = rat_to_f64(leg.r2.as_ref().unwrap());
                for s in &tr.samples {
                    let m = track_point(s, rat_to_f64(&leg.a)).unwrap();
                    let dd = sub3(&m, &base);
                    assert!(
                        (dot3(&dd, &dd) - r2).abs() <= 1e-8 * r2.max(1.0),
                        "{:?} a = {}",
                        geo.kind,
                        leg.a
                    );
                }
            }
        }
    }
}
