//! Projective and Euclidean predicates.

use crate::error::{Error, Result};
use crate::polyalg::{numeric_rank, ComplexScalar, Matrix, Scalar};

/// Homogeneous point `(w : x : y : z)`; ideal iff `w = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint<T: Scalar>(pub [T; 4]);

impl<T: Scalar> ProjPoint<T> {
    pub fn new(c: [T; 4]) -> Result<Self> {
        if c.iter().all(|v| v.is_zero()) {
            return Err(Error::InvalidArgument(
                "all homogeneous coordinates vanish".into(),
            ));
        }
        Ok(ProjPoint(c))
    }

    pub fn finite(p: &[T; 3]) -> Self {
        ProjPoint([T::one(), p[0].clone(), p[1].clone(), p[2].clone()])
    }

    pub fn ideal(d: &[T; 3]) -> Self {
        ProjPoint([T::zero(), d[0].clone(), d[1].clone(), d[2].clone()])
    }

    pub fn is_ideal(&self, tol: f64) -> bool {
        self.0[0].is_negligible(tol)
    }

    /// Euclidean coordinates of a finite point.
    pub fn affine(&self) -> Option<[T; 3]> {
        if self.0[0].is_zero() {
            return None;
        }
        let w = self.0[0].clone();
        Some(std::array::from_fn(|k| self.0[k + 1].clone() / w.clone()))
    }

    /// Equality up to a nonzero scalar factor.
    pub fn same_as(&self, other: &Self, tol: f64) -> bool {
        proportional(&self.0, &other.0, tol)
    }
}

/// `a` and `b` are proportional (all 2×2 minors vanish).
pub fn proportional<T: Scalar>(a: &[T], b: &[T], tol: f64) -> bool {
    let scale = a
        .iter()
        .chain(b)
        .map(|v| v.magnitude())
        .fold(0.0, f64::max)
        .max(1.0);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let m = a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone();
            if !m.is_negligible(tol * scale * scale) {
                return false;
            }
        }
    }
    true
}

/// A value of the projectively extended line.
#[derive(Clone, Debug, PartialEq)]
pub enum Ext<T: Scalar> {
    Finite(T),
    Infinity,
}

impl<T: Scalar> Ext<T> {
    pub fn finite_value(&self) -> Option<&T> {
        match self {
            Ext::Finite(v) => Some(v),
            Ext::Infinity => None,
        }
    }

    fn homogeneous(&self) -> (T, T) {
        match self {
            Ext::Finite(v) => (v.clone(), T::one()),
            Ext::Infinity => (T::one(), T::zero()),
        }
    }

    fn from_homogeneous(num: T, den: T, tol: f64) -> Self {
        if den.is_negligible(tol) {
            Ext::Infinity
        } else {
            Ext::Finite(num / den)
        }
    }
}

/// Cross-ratio `((t1−t3)(t2−t4)) / ((t2−t3)(t1−t4))`.
pub fn cross_ratio<T: Scalar>(t1: &T, t2: &T, t3: &T, t4: &T) -> Result<Ext<T>> {
    cross_ratio_ext(
        &Ext::Finite(t1.clone()),
        &Ext::Finite(t2.clone()),
        &Ext::Finite(t3.clone()),
        &Ext::Finite(t4.clone()),
    )
}

/// Cross-ratio of four values of the extended line, computed from
/// homogeneous brackets `[ij] = s_i t_j − s_j t_i`.
pub fn cross_ratio_ext<T: Scalar>(
    p1: &Ext<T>,
    p2: &Ext<T>,
    p3: &Ext<T>,
    p4: &Ext<T>,
) -> Result<Ext<T>> {
    let h = [p1, p2, p3, p4].map(|p| p.homogeneous());
    let br = |i: usize, j: usize| h[i].0.clone() * h[j].1.clone() - h[j].0.clone() * h[i].1.clone();
    let num = br(0, 2) * br(1, 3);
    let den = br(1, 2) * br(0, 3);
    if den.is_zero() {
        if num.is_zero() {
            if br(2, 3).is_zero() && !br(0, 2).is_zero() && !br(1, 2).is_zero() {
                return Ok(Ext::Finite(T::one()));
            }
            return Err(Error::InvalidArgument(
                "cross-ratio of degenerate point quadruple".into(),
            ));
        }
        return Ok(Ext::Infinity);
    }
    Ok(Ext::Finite(num / den))
}

/// Möbius transformation `w ↦ (z1·w + z2)/(z3·w + z4)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mobius<C: Scalar> {
    pub z: [C; 4],
}

impl<C: Scalar> Mobius<C> {
    pub fn new(z: [C; 4]) -> Result<Self> {
        let d = z[0].clone() * z[3].clone() - z[1].clone() * z[2].clone();
        if d.is_zero() {
            return Err(Error::InvalidArgument(
                "singular Möbius coefficients".into(),
            ));
        }
        Ok(Mobius { z })
    }

    pub fn identity() -> Self {
        Mobius {
            z: [C::one(), C::zero(), C::zero(), C::one()],
        }
    }

    pub fn apply(&self, w: &Ext<C>, tol: f64) -> Ext<C> {
        let (s, t) = w.homogeneous();
        let [a, b, c, d] = self.z.clone();
        Ext::from_homogeneous(a * s.clone() + b * t.clone(), c * s + d * t, tol)
    }

    fn compose(&self, other: &Self) -> Self {
        let [a, b, c, d] = self.z.clone();
        let [e, f, g, h] = other.z.clone();
        Mobius {
            z: [
                a.clone() * e.clone() + b.clone() * g.clone(),
                a * f.clone() + b * h.clone(),
                c.clone() * e + d.clone() * g,
                c * f + d * h,
            ],
        }
    }

    fn inverse(&self) -> Self {
        let [a, b, c, d] = self.z.clone();
        Mobius { z: [d, -b, -c, a] }
    }

    /// Equality up to a common scalar factor.
    pub fn same_as(&self, other: &Self, tol: f64) -> bool {
        proportional(&self.z, &other.z, tol)
    }

    /// Scale so that the first nonzero coefficient among `z4, z1` is one.
    pub fn normalized(&self) -> Self {
        let s = if !self.z[3].is_zero() {
            self.z[3].clone()
        } else {
            self.z[0].clone()
        };
        Mobius {
            z: self.z.clone().map(|v| v / s.clone()),
        }
    }
}

/// The map sending `(q1, q2, q3)` to `(0, 1, ∞)`.
fn to_standard<C: Scalar>(q: &[Ext<C>; 3]) -> Mobius<C> {
    use Ext::*;
    let o = C::one;
    let z = C::zero;
    match q {
        [Infinity, Finite(b), Finite(c)] => Mobius {
            z: [z(), b.clone() - c.clone(), o(), -c.clone()],
        },
        [Finite(a), Infinity, Finite(c)] => Mobius {
            z: [o(), -a.clone(), o(), -c.clone()],
        },
        [Finite(a), Finite(b), Infinity] => Mobius {
            z: [o(), -a.clone(), z(), b.clone() - a.clone()],
        },
        [Finite(a), Finite(b), Finite(c)] => {
            let bc = b.clone() - c.clone();
            let ba = b.clone() - a.clone();
            Mobius {
                z: [bc.clone(), -(a.clone() * bc), ba.clone(), -(c.clone() * ba)],
            }
        }
        _ => unreachable!("distinctness checked by the caller"),
    }
}

fn distinct3<C: Scalar>(q: &[Ext<C>; 3]) -> bool {
    let h = q.clone().map(|p| p.homogeneous());
    (0..3).all(|i| {
        (i + 1..3)
            .all(|j| !(h[i].0.clone() * h[j].1.clone() - h[j].0.clone() * h[i].1.clone()).is_zero())
    })
}

/// The unique Möbius map with `sources[k] ↦ targets[k]`.
pub fn mobius_from_pairs<C: Scalar>(
    sources: &[Ext<C>; 3],
    targets: &[Ext<C>; 3],
) -> Result<Mobius<C>> {
    if !distinct3(sources) || !distinct3(targets) {
        return Err(Error::InvalidArgument(
            "Möbius map needs three distinct sources and targets".into(),
        ));
    }
    let s = to_standard(sources);
    let t = to_standard(targets);
    Ok(t.inverse().compose(&s).normalized())
}

/// True iff the Möbius map fixed by the first three pairs sends the fourth
/// source to the fourth target.
pub fn mobius_equivalent<C: Scalar>(
    platform: &[C; 4],
    projected: &[C; 4],
    tol: f64,
) -> Result<bool> {
    let src = std::array::from_fn(|k| Ext::Finite(platform[k].clone()));
    let tgt = std::array::from_fn(|k| Ext::Finite(projected[k].clone()));
    let tau = mobius_from_pairs(&src, &tgt)?;
    // Compare τ(src4) with tgt4 in cleared-denominator form.
    let [a, b, c, d] = tau.z;
    let w = platform[3].clone();
    let lhs = a * w.clone() + b;
    let rhs = projected[3].clone() * (c * w + d);
    let scale = 1.0 + lhs.magnitude() + rhs.magnitude();
    Ok((lhs - rhs).is_negligible(tol * scale))
}

/// Outcome of the planar concyclicity test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Concyclic {
    /// All points lie on one proper circle.
    Circle,
    /// All points lie on one line (a circle through infinity).
    Line,
    No,
}

impl Concyclic {
    pub fn holds(self) -> bool {
        !matches!(self, Concyclic::No)
    }
}

/// Common circle (or line) test on rows `(x²+y², x, y, 1)`.
pub fn concyclic<T: Scalar>(points: &[[T; 2]], tol: f64) -> Result<Concyclic> {
    if points.len() < 4 {
        return Err(Error::InvalidArgument(
            "concyclicity needs at least four points".into(),
        ));
    }
    let rows: Vec<Vec<T>> = points
        .iter()
        .map(|[x, y]| {
            vec![
                x.clone() * x.clone() + y.clone() * y.clone(),
                x.clone(),
                y.clone(),
                T::one(),
            ]
        })
        .collect();
    let m = Matrix::from_rows(rows);
    let rank = numeric_rank(&m, tol)?;
    if rank >= 4 {
        return Ok(Concyclic::No);
    }
    // Null vector decides between circle and line.
    let lines = Matrix::from_rows(
        points
            .iter()
            .map(|[x, y]| vec![x.clone(), y.clone(), T::one()])
            .collect(),
    );
    if numeric_rank(&lines, tol)? <= 2 {
        Ok(Concyclic::Line)
    } else {
        Ok(Concyclic::Circle)
    }
}

/// Rank of the affine hull of a point set plus one (rank of rows `(1, p)`).
pub fn affine_rank<T: Scalar>(points: &[[T; 3]]) -> usize {
    if points.is_empty() {
        return 0;
    }
    let m = Matrix::from_rows(
        points
            .iter()
            .map(|p| vec![T::one(), p[0].clone(), p[1].clone(), p[2].clone()])
            .collect(),
    );
    if T::EXACT {
        m.rank(0.0)
    } else {
        numeric_rank(&m, 1e-10).unwrap_or(0)
    }
}

pub fn coplanar<T: Scalar>(points: &[[T; 3]]) -> bool {
    affine_rank(points) <= 3
}

pub fn collinear<T: Scalar>(points: &[[T; 3]]) -> bool {
    affine_rank(points) <= 2
}

pub fn sub3<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    std::array::from_fn(|k| a[k].clone() - b[k].clone())
}

pub fn dot3<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0].clone() * b[0].clone() + a[1].clone() * b[1].clone() + a[2].clone() * b[2].clone()
}

pub fn cross3<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[1].clone() * b[2].clone() - a[2].clone() * b[1].clone(),
        a[2].clone() * b[0].clone() - a[0].clone() * b[2].clone(),
        a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone(),
    ]
}

/// Affine parameters of collinear points along the line through them,
/// `t_i = (P_i − P_0)·d / d·d`. `None` if all points coincide.
pub fn line_params<T: Scalar>(points: &[[T; 3]]) -> Option<Vec<T>> {
    let d = points
        .iter()
        .map(|p| sub3(p, &points[0]))
        .find(|v| v.iter().any(|c| !c.is_zero()))?;
    let dd = dot3(&d, &d);
    Some(
        points
            .iter()
            .map(|p| dot3(&sub3(p, &points[0]), &d) / dd.clone())
            .collect(),
    )
}

/// Complex number `re + i·im` from two real scalars.
pub fn complexify<C: ComplexScalar>(re: &C::Real, im: &C::Real) -> C {
    C::from_parts(re.clone(), im.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::scalar::{gauss, rat, rat_int};
    use crate::{GaussRat, Rat};

    fn ri(v: i64) -> Rat {
        rat_int(v)
    }

    #[test]
    fn cross_ratio_values() {
        assert_eq!(
            cross_ratio(&ri(0), &ri(1), &ri(2), &ri(3)).unwrap(),
            Ext::Finite(rat(4, 3))
        );
        assert_eq!(
            cross_ratio(&ri(5), &ri(-1), &ri(2), &ri(2)).unwrap(),
            Ext::Finite(ri(1))
        );
        assert_eq!(
            cross_ratio(&ri(0), &ri(2), &ri(2), &ri(3)).unwrap(),
            Ext::Infinity
        );
    }

    #[test]
    fn mobius_special_cases() {
        let g = |v: i64| Ext::Finite(gauss(ri(v), ri(0)));
        let id =
            mobius_from_pairs(&[g(0), g(1), Ext::Infinity], &[g(0), g(1), Ext::Infinity]).unwrap();
        assert!(id.same_as(&Mobius::<GaussRat>::identity(), 0.0));
        assert_eq!(id.z, Mobius::<GaussRat>::identity().z);
        let tr = mobius_from_pairs(&[g(0), g(1), g(2)], &[g(1), g(2), g(3)]).unwrap();
        let one = gauss(ri(1), ri(0));
        let zero = gauss(ri(0), ri(0));
        assert_eq!(tr.z, [one.clone(), one.clone(), zero, one]);
        assert!(mobius_from_pairs(&[g(0), g(0), g(2)], &[g(1), g(2), g(3)]).is_err());
    }

    #[test]
    fn concyclic_examples() {
        let pts = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.6, -0.8]];
        assert_eq!(concyclic(&pts, 1e-10).unwrap(), Concyclic::Circle);
        let pts = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 1.0]];
        assert_eq!(concyclic(&pts, 1e-10).unwrap(), Concyclic::No);
        let pts = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]];
        assert_eq!(concyclic(&pts, 1e-10).unwrap(), Concyclic::Line);
        assert!(concyclic(&pts[..3], 1e-10).is_err());
    }
}
