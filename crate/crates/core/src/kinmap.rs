//! Kinematic mapping for pentapods whose platform anchor points lie on one
//! line `p` (the x-axis of the moving frame).
//!
//! A displacement of `p` is encoded by nine homogeneous motion parameters
//! `(n0 : x0 : x1 : x2 : x3 : y0 : y1 : y2 : y3)`. Every leg constraint is a
//! hyperplane in this space, and the image of all displacements is cut out
//! by three quadrics.

use num::traits::Zero;

use crate::error::{Error, Result};
use crate::polyalg::{ComplexScalar, MPoly, Matrix, Scalar};

/// Study parameters `(e0..e3, f0..f3)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyParams<T: Scalar> {
    pub e: [T; 4],
    pub f: [T; 4],
}

impl<T: Scalar> StudyParams<T> {
    pub fn new(e: [T; 4], f: [T; 4]) -> Self {
        StudyParams { e, f }
    }

    pub fn study_quadric(&self) -> T {
        dot4(&self.e, &self.f)
    }

    pub fn e_norm2(&self) -> T {
        dot4(&self.e, &self.e)
    }
}

fn dot4<T: Scalar>(a: &[T; 4], b: &[T; 4]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Homogeneous motion parameters. Stored unnormalized.
#[derive(Clone, Debug, PartialEq)]
pub struct MotionParams<T: Scalar> {
    pub n0: T,
    /// `x0..x3`
    pub x: [T; 4],
    /// `y0..y3`
    pub y: [T; 4],
}

impl<T: Scalar> MotionParams<T> {
    pub fn new(n0: T, x: [T; 4], y: [T; 4]) -> Self {
        MotionParams { n0, x, y }
    }

    /// From `[n0, x0, x1, x2, x3, y0, y1, y2, y3]`.
    pub fn from_array(c: [T; 9]) -> Self {
        let [n0, x0, x1, x2, x3, y0, y1, y2, y3] = c;
        MotionParams {
            n0,
            x: [x0, x1, x2, x3],
            y: [y0, y1, y2, y3],
        }
    }

    pub fn from_slice(c: &[T]) -> Self {
        assert_eq!(c.len(), 9, "motion parameters have nine entries");
        Self::from_array(std::array::from_fn(|k| c[k].clone()))
    }

    pub fn to_array(&self) -> [T; 9] {
        [
            self.n0.clone(),
            self.x[0].clone(),
            self.x[1].clone(),
            self.x[2].clone(),
            self.x[3].clone(),
            self.y[0].clone(),
            self.y[1].clone(),
            self.y[2].clone(),
            self.y[3].clone(),
        ]
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> MotionParams<U> {
        MotionParams::from_array(self.to_array().each_ref().map(f))
    }

    pub fn scale(&self, s: &T) -> Self {
        MotionParams::from_array(self.to_array().map(|c| c * s.clone()))
    }

    /// Rescale so that `x0 = 1`.
    pub fn normalized(&self) -> Result<Self> {
        if self.x[0].is_negligible(0.0) {
            return Err(Error::BoundaryPoint);
        }
        let inv = T::one() / self.x[0].clone();
        Ok(self.scale(&inv))
    }

    pub fn is_boundary(&self, tol: f64) -> bool {
        self.x[0].is_negligible(tol)
    }

    pub fn norm2_f64(&self) -> f64 {
        self.to_array().iter().map(|c| c.magnitude().powi(2)).sum()
    }
}

pub fn lift_study<T: Scalar>(s: &StudyParams<T>) -> Result<MotionParams<T>> {
    if s.e_norm2().is_negligible(0.0) && s.e.iter().all(|c| c.is_negligible(0.0)) {
        return Err(Error::InvalidArgument(
            "zero e-part: not a displacement".into(),
        ));
    }
    let [e0, e1, e2, e3] = s.e.clone();
    let [f0, f1, f2, f3] = s.f.clone();
    let k = |v: i64| T::from_i64(v);
    let sq = |v: &T| v.clone() * v.clone();
    let m = |a: &T, b: &T| a.clone() * b.clone();
    let n0 = sq(&f0) + sq(&f1) + sq(&f2) + sq(&f3);
    let x0 = k(2) * (sq(&e0) + sq(&e1) + sq(&e2) + sq(&e3));
    let x1 = k(2) * (-sq(&e0) - sq(&e1) + sq(&e2) + sq(&e3));
    let x2 = k(-4) * (m(&e0, &e3) + m(&e1, &e2));
    let x3 = k(4) * (m(&e0, &e2) - m(&e1, &e3));
    let y0 = k(4) * (-m(&e0, &f1) + m(&e1, &f0) + m(&e2, &f3) - m(&e3, &f2));
    let y1 = k(4) * (m(&e0, &f1) - m(&e1, &f0) + m(&e2, &f3) - m(&e3, &f2));
    let y2 = k(4) * (m(&e0, &f2) - m(&e1, &f3) - m(&e2, &f0) + m(&e3, &f1));
    let y3 = k(4) * (m(&e0, &f3) + m(&e1, &f2) - m(&e2, &f1) - m(&e3, &f0));
    Ok(MotionParams {
        n0,
        x: [x0, x1, x2, x3],
        y: [y0, y1, y2, y3],
    })
}

/// Image of the platform point `(a, 0, 0)`.
pub fn displacement<T: Scalar>(m: &MotionParams<T>, a: &T) -> Result<[T; 3]> {
    let n = m.normalized()?;
    Ok(std::array::from_fn(|k| {
        -(a.clone() * n.x[k + 1].clone()) - n.y[k + 1].clone()
    }))
}

/// `(Φ1, Φ2, Φ3)`; all vanish exactly on the image of [`lift_study`].
pub fn phi_residuals<T: Scalar>(m: &MotionParams<T>) -> [T; 3] {
    let [x0, x1, x2, x3] = m.x.clone();
    let [y0, y1, y2, y3] = m.y.clone();
    let phi1 = x1.clone() * x1.clone() + x2.clone() * x2.clone() + x3.clone() * x3.clone()
        - x0.clone() * x0.clone();
    let phi2 = y1.clone() * y1.clone() + y2.clone() * y2.clone() + y3.clone() * y3.clone()
        - T::from_i64(8) * x0.clone() * m.n0.clone();
    let phi3 = x1 * y1 + x2 * y2 + x3 * y3 - x0 * y0;
    [phi1, phi2, phi3]
}

/// `(Γ1..Γ6)`, the boundary equations for points with `x0 = 0`.
pub fn gamma_residuals<T: Scalar>(m: &MotionParams<T>) -> [T; 6] {
    let [_, x1, x2, x3] = m.x.clone();
    let [_, y1, y2, y3] = m.y.clone();
    let d = |a: &T, b: &T, c: &T, e: &T| a.clone() * b.clone() - c.clone() * e.clone();
    [
        x1.clone() * x1.clone() + x2.clone() * x2.clone() + x3.clone() * x3.clone(),
        y1.clone() * y1.clone() + y2.clone() * y2.clone() + y3.clone() * y3.clone(),
        x1.clone() * y1.clone() + x2.clone() * y2.clone() + x3.clone() * y3.clone(),
        d(&x1, &y2, &x2, &y1),
        d(&x1, &y3, &x3, &y1),
        d(&x2, &y3, &x3, &y2),
    ]
}

/// True if all Φ residuals are within `1e-9 · (1 + ‖m‖²)` (exact zero for
/// exact scalars).
pub fn on_image_variety<T: Scalar>(m: &MotionParams<T>, tol: f64) -> bool {
    let scale = 1.0 + m.norm2_f64();
    phi_residuals(m).iter().all(|r| {
        if T::EXACT {
            r.is_zero()
        } else {
            r.magnitude() <= tol * scale
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HyperplaneKind {
    Sphere,
    Darboux,
    Mannheim,
    Angle,
}

/// A linear constraint on the motion parameters; coefficients ordered as
/// `(n0, x0, x1, x2, x3, y0, y1, y2, y3)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperplane<T: Scalar> {
    pub kind: HyperplaneKind,
    pub coeffs: [T; 9],
}

fn check_unit<T: Scalar>(u: &[T; 3], tol: f64) -> Result<()> {
    let n2 = u
        .iter()
        .fold(T::zero(), |acc, c| acc + c.clone() * c.clone());
    let dev = n2 - T::one();
    if dev.is_negligible(tol) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "direction {u:?} is not a unit vector"
        )))
    }
}

impl<T: Scalar> Hyperplane<T> {
    /// Sphere condition with squared radius `r2`.
    pub fn sphere_r2(a: &T, base: &[T; 3], r2: &T) -> Self {
        let [ba, bb, bc] = base.clone();
        let half = T::one() / T::from_i64(2);
        let c1 = half
            * (a.clone() * a.clone()
                + ba.clone() * ba.clone()
                + bb.clone() * bb.clone()
                + bc.clone() * bc.clone()
                - r2.clone());
        Hyperplane {
            kind: HyperplaneKind::Sphere,
            coeffs: [
                T::from_i64(4),
                c1,
                a.clone() * ba.clone(),
                a.clone() * bb.clone(),
                a.clone() * bc.clone(),
                a.clone(),
                ba,
                bb,
                bc,
            ],
        }
    }

    /// Sphere condition with radius `r > 0`.
    pub fn sphere(a: &T, base: &[T; 3], r: &T) -> Result<Self> {
        if r.is_negligible(0.0) || r.to_c64().re < 0.0 {
            return Err(Error::InvalidArgument("leg length must be positive".into()));
        }
        Ok(Self::sphere_r2(a, base, &(r.clone() * r.clone())))
    }

    /// Darboux condition for platform point `a` and unit ideal direction `u`.
    pub fn darboux(a: &T, u: &[T; 3], p: &T, tol: f64) -> Result<Self> {
        check_unit(u, tol)?;
        Ok(Self::darboux_raw(a, u, p))
    }

    /// Darboux condition without normalizing `u`; used in canonical frames
    /// and for isotropic directions.
    pub fn darboux_raw(a: &T, u: &[T; 3], p: &T) -> Self {
        let z = T::zero;
        Hyperplane {
            kind: HyperplaneKind::Darboux,
            coeffs: [
                z(),
                p.clone(),
                a.clone() * u[0].clone(),
                a.clone() * u[1].clone(),
                a.clone() * u[2].clone(),
                z(),
                u[0].clone(),
                u[1].clone(),
                u[2].clone(),
            ],
        }
    }

    pub fn mannheim(base: &[T; 3], p: &T) -> Self {
        let z = T::zero;
        Hyperplane {
            kind: HyperplaneKind::Mannheim,
            coeffs: [
                z(),
                p.clone(),
                base[0].clone(),
                base[1].clone(),
                base[2].clone(),
                T::one(),
                z(),
                z(),
                z(),
            ],
        }
    }

    pub fn angle(u: &[T; 3], w: &T, tol: f64) -> Result<Self> {
        check_unit(u, tol)?;
        Ok(Self::angle_raw(u, w))
    }

    pub fn angle_raw(u: &[T; 3], w: &T) -> Self {
        let z = T::zero;
        Hyperplane {
            kind: HyperplaneKind::Angle,
            coeffs: [
                z(),
                w.clone(),
                u[0].clone(),
                u[1].clone(),
                u[2].clone(),
                z(),
                z(),
                z(),
                z(),
            ],
        }
    }

    pub fn eval(&self, m: &MotionParams<T>) -> T {
        self.coeffs
            .iter()
            .zip(m.to_array())
            .fold(T::zero(), |acc, (c, v)| acc + c.clone() * v)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Hyperplane<U> {
        Hyperplane {
            kind: self.kind,
            coeffs: self.coeffs.each_ref().map(f),
        }
    }
}

/// Replace a complex-conjugate pair of constraints by the real pair
/// `((h + h̄)/2, (h − h̄)/(2i))`. Fails if the two are not conjugate.
pub fn realify<C: ComplexScalar>(
    h: &Hyperplane<C>,
    h_conj: &Hyperplane<C>,
) -> Result<(Hyperplane<C::Real>, Hyperplane<C::Real>)> {
    let conj_ok = h
        .coeffs
        .iter()
        .zip(&h_conj.coeffs)
        .all(|(a, b)| (a.conj() - b.clone()).is_negligible(1e-12));
    if !conj_ok {
        return Err(Error::InvalidArgument(
            "hyperplanes are not complex conjugates".into(),
        ));
    }
    let re = h.coeffs.each_ref().map(|c| c.re_part());
    let im = h.coeffs.each_ref().map(|c| c.im_part());
    Ok((
        Hyperplane {
            kind: h.kind,
            coeffs: re,
        },
        Hyperplane {
            kind: h.kind,
            coeffs: im,
        },
    ))
}

/// A leg: platform coordinate `a`, base point `M = (A, B, C)` and optional
/// squared length.
#[derive(Clone, Debug, PartialEq)]
pub struct Leg<T: Scalar> {
    pub a: T,
    pub base: [T; 3],
    pub r2: Option<T>,
}

impl<T: Scalar> Leg<T> {
    pub fn new(a: T, base: [T; 3]) -> Self {
        Leg { a, base, r2: None }
    }

    pub fn with_length(a: T, base: [T; 3], r: T) -> Result<Self> {
        if r.is_negligible(0.0) || r.to_c64().re <= 0.0 {
            return Err(Error::InvalidArgument("leg length must be positive".into()));
        }
        Ok(Leg {
            a,
            base,
            r2: Some(r.clone() * r),
        })
    }

    pub fn with_r2(a: T, base: [T; 3], r2: T) -> Self {
        Leg {
            a,
            base,
            r2: Some(r2),
        }
    }

    pub fn sphere(&self) -> Result<Hyperplane<T>> {
        let r2 = self
            .r2
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("leg has no length".into()))?;
        Ok(Hyperplane::sphere_r2(&self.a, &self.base, r2))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Leg<U> {
        Leg {
            a: f(&self.a),
            base: self.base.each_ref().map(&f),
            r2: self.r2.as_ref().map(&f),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pentapod<T: Scalar> {
    pub legs: [Leg<T>; 5],
}

impl<T: Scalar> Pentapod<T> {
    /// Fails if two legs coincide completely.
    pub fn new(legs: [Leg<T>; 5]) -> Result<Self> {
        for i in 0..5 {
            for j in i + 1..5 {
                if legs[i].a == legs[j].a && legs[i].base == legs[j].base {
                    return Err(Error::InvalidPentapod(format!(
                        "legs {} and {} coincide",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Pentapod { legs })
    }

    pub fn from_points(a: [T; 5], base: [[T; 3]; 5]) -> Result<Self> {
        let mut it = a.into_iter().zip(base).map(|(a, b)| Leg::new(a, b));
        Self::new(std::array::from_fn(|_| it.next().unwrap()))
    }

    pub fn with_lengths(&self, r: &[T; 5]) -> Result<Self> {
        let mut legs = self.legs.clone();
        for (leg, ri) in legs.iter_mut().zip(r) {
            *leg = Leg::with_length(leg.a.clone(), leg.base.clone(), ri.clone())?;
        }
        Ok(Pentapod { legs })
    }

    pub fn with_r2(&self, r2: &[T; 5]) -> Self {
        let mut legs = self.legs.clone();
        for (leg, ri) in legs.iter_mut().zip(r2) {
            leg.r2 = Some(ri.clone());
        }
        Pentapod { legs }
    }

    pub fn platform(&self) -> [T; 5] {
        std::array::from_fn(|k| self.legs[k].a.clone())
    }

    pub fn bases(&self) -> [[T; 3]; 5] {
        std::array::from_fn(|k| self.legs[k].base.clone())
    }

    pub fn spheres(&self) -> Result<Vec<Hyperplane<T>>> {
        self.legs.iter().map(|l| l.sphere()).collect()
    }

    pub fn permuted(&self, perm: &[usize; 5]) -> Self {
        Pentapod {
            legs: std::array::from_fn(|k| self.legs[perm[k]].clone()),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Pentapod<U> {
        Pentapod {
            legs: self.legs.each_ref().map(|l| l.map(&f)),
        }
    }

    /// All base points have zero third coordinate after an affine change of
    /// frame, i.e. the five base points are coplanar.
    pub fn base_is_planar(&self) -> bool {
        crate::geom::coplanar(&self.bases())
    }
}

/// The solution set of a few hyperplanes (plus fixed coordinates), written
/// as affine functions of the remaining free motion parameters.
#[derive(Clone, Debug)]
pub struct Parametrization<T: Scalar> {
    /// Motion-parameter indices solved for, one per hyperplane.
    pub pivots: Vec<usize>,
    /// Motion-parameter indices used as variables `u0, u1, ..` (in order).
    pub free: Vec<usize>,
    /// All nine coordinates as polynomials in the free variables.
    pub coords: Vec<MPoly<T>>,
}

impl<T: Scalar> Parametrization<T> {
    pub fn phi(&self) -> [MPoly<T>; 3] {
        let c = &self.coords;
        let sq = |k: usize| &c[k] * &c[k];
        let phi1 = &(&(&sq(2) + &sq(3)) + &sq(4)) - &sq(1);
        let phi2 = &(&(&sq(6) + &sq(7)) + &sq(8)) - &(&c[1] * &c[0]).scale(&T::from_i64(8));
        let phi3 = &(&(&(&c[2] * &c[6]) + &(&c[3] * &c[7])) + &(&c[4] * &c[8])) - &(&c[1] * &c[5]);
        [phi1, phi2, phi3]
    }

    pub fn gamma(&self) -> [MPoly<T>; 6] {
        let c = &self.coords;
        let m = |i: usize, j: usize| &c[i] * &c[j];
        [
            &(&m(2, 2) + &m(3, 3)) + &m(4, 4),
            &(&m(6, 6) + &m(7, 7)) + &m(8, 8),
            &(&m(2, 6) + &m(3, 7)) + &m(4, 8),
            &m(2, 7) - &m(3, 6),
            &m(2, 8) - &m(4, 6),
            &m(3, 8) - &m(4, 7),
        ]
    }

    /// Evaluate all nine coordinates at values of the free variables.
    pub fn point<U: Scalar>(&self, vals: &[U], lift: impl Fn(&T) -> U + Copy) -> MotionParams<U> {
        MotionParams::from_slice(
            &self
                .coords
                .iter()
                .map(|p| p.eval_with(vals, lift))
                .collect::<Vec<_>>(),
        )
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Solve the hyperplanes for as many motion parameters as there are
/// hyperplanes. Coordinates in `fixed` are set to constants. The pivot set
/// `prefer` is used when its minor is regular; otherwise the regular minor
/// of largest magnitude is taken.
pub fn parametrize<T: Scalar>(
    hs: &[Hyperplane<T>],
    fixed: &[(usize, T)],
    prefer: &[usize],
) -> Result<Parametrization<T>> {
    let unknowns: Vec<usize> = (0..9)
        .filter(|k| fixed.iter().all(|(f, _)| f != k))
        .collect();
    let k = hs.len();
    let full = Matrix::from_fn(k, 9, |i, j| hs[i].coeffs[j].clone());
    let minor = |cols: &[usize]| full.select_cols(cols).det();
    let mut pivots: Option<Vec<usize>> = None;
    if prefer.len() == k
        && prefer.iter().all(|p| unknowns.contains(p))
        && !minor(prefer).is_negligible(1e-12)
    {
        pivots = Some(prefer.to_vec());
    }
    if pivots.is_none() {
        let mut best: Option<(f64, Vec<usize>)> = None;
        for comb in combinations(unknowns.len(), k) {
            let cols: Vec<usize> = comb.iter().map(|&i| unknowns[i]).collect();
            let d = minor(&cols);
            if d.is_negligible(1e-12) {
                continue;
            }
            let mag = d.magnitude();
            if best.as_ref().is_none_or(|(b, _)| mag > *b) {
                best = Some((mag, cols));
            }
        }
        pivots = best.map(|b| b.1);
    }
    let pivots = pivots.ok_or_else(|| {
        Error::DependentConstraints(format!(
            "the {k} constraint hyperplanes are linearly dependent on the unknowns (rank {})",
            full.select_cols(&unknowns).rank(1e-12)
        ))
    })?;
    let free: Vec<usize> = unknowns
        .iter()
        .copied()
        .filter(|u| !pivots.contains(u))
        .collect();
    let mp = full.select_cols(&pivots);
    // Right-hand sides: constant part, then one column per free variable.
    let mut coords: Vec<MPoly<T>> = vec![MPoly::zero(); 9];
    for (f, v) in fixed {
        coords[*f] = MPoly::constant(v.clone());
    }
    for (vi, &f) in free.iter().enumerate() {
        coords[f] = MPoly::var(vi);
    }
    let const_rhs: Vec<T> = (0..k)
        .map(|i| {
            -fixed.iter().fold(T::zero(), |acc, (f, v)| {
                acc + hs[i].coeffs[*f].clone() * v.clone()
            })
        })
        .collect();
    let sol0 = mp
        .solve(&const_rhs)
        .ok_or_else(|| Error::Internal("pivot minor became singular".into()))?;
    let mut sols = Vec::new();
    for &f in &free {
        let rhs: Vec<T> = (0..k).map(|i| -hs[i].coeffs[f].clone()).collect();
        sols.push(
            mp.solve(&rhs)
                .ok_or_else(|| Error::Internal("pivot minor became singular".into()))?,
        );
    }
    for (pi, &p) in pivots.iter().enumerate() {
        let mut c = vec![sol0[pi].clone()];
        c.extend(sols.iter().map(|s| s[pi].clone()));
        coords[p] = MPoly::linear(&c);
    }
    Ok(Parametrization {
        pivots,
        free,
        coords,
    })
}

/// Names of the nine motion parameters, by index.
pub const PARAM_NAMES: [&str; 9] = ["n0", "x0", "x1", "x2", "x3", "y0", "y1", "y2", "y3"];
