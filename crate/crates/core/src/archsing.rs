//! Architectural singularity: the anchor-point assumptions, the nine
//! singular designs, and the determinant criteria in canonical frames.

use crate::error::{Error, Result};
use crate::geom::{collinear, coplanar, cross3, dot3, sub3};
use crate::kinmap::Pentapod;
use crate::polyalg::{numeric_rank, Matrix, Scalar};

const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    /// `perm[k]` is the input leg relabeled as leg `k + 1`.
    pub perm: [usize; 5],
    pub condition: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArchVerdict {
    pub singular: bool,
    pub case: Option<u8>,
    pub witness: Option<Witness>,
}

impl ArchVerdict {
    fn regular() -> Self {
        ArchVerdict {
            singular: false,
            case: None,
            witness: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanarD<T: Scalar> {
    pub d: [T; 5],
    /// Relabeling used for the canonical frame.
    pub perm: [usize; 5],
}

impl<T: Scalar> PlanarD<T> {
    pub fn singular(&self) -> bool {
        is_zero(&self.d[0], 1.0) && is_zero(&self.d[3], 1.0)
    }
}

fn is_zero<T: Scalar>(v: &T, scale: f64) -> bool {
    v.is_negligible(TOL * scale.max(1.0))
}

fn pt_scale<T: Scalar>(p: &[T; 3]) -> f64 {
    p.iter().map(|c| c.magnitude()).fold(1.0, f64::max)
}

fn same<T: Scalar>(a: &T, b: &T) -> bool {
    is_zero(
        &(a.clone() - b.clone()),
        1.0 + a.magnitude().max(b.magnitude()),
    )
}

fn same3<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> bool {
    let s = pt_scale(a).max(pt_scale(b));
    (0..3).all(|k| is_zero(&(a[k].clone() - b[k].clone()), s))
}

fn rank<T: Scalar>(m: &Matrix<T>) -> usize {
    if T::EXACT {
        m.rank(0.0)
    } else {
        numeric_rank(m, TOL).unwrap_or(0)
    }
}

/// Checks the three anchor-point assumptions; the error names the failed
/// item.
pub fn validate_assumptions<T: Scalar>(p: &Pentapod<T>) -> Result<()> {
    let a = p.platform();
    let m = p.bases();
    for i in 0..5 {
        for j in i + 1..5 {
            for k in j + 1..5 {
                if same(&a[i], &a[j]) && same(&a[j], &a[k]) {
                    return Err(Error::AssumptionViolated {
                        item: "i",
                        detail: "three platform anchor points coincide".into(),
                    });
                }
            }
        }
    }
    for i in 0..5 {
        for j in i + 1..5 {
            if !same(&a[i], &a[j]) {
                continue;
            }
            let rest: Vec<[T; 3]> = (0..5)
                .filter(|&k| k != i && k != j)
                .map(|k| m[k].clone())
                .collect();
            if collinear(&rest) {
                return Err(Error::AssumptionViolated {
                    item: "ii",
                    detail: format!(
                        "platform anchor points m{} and m{} coincide and the remaining three base points are collinear",
                        i + 1,
                        j + 1
                    ),
                });
            }
        }
    }
    for skip in 0..5 {
        let four: Vec<[T; 3]> = (0..5)
            .filter(|&k| k != skip)
            .map(|k| m[k].clone())
            .collect();
        if collinear(&four) {
            return Err(Error::AssumptionViolated {
                item: "iii",
                detail: "four base anchor points are collinear".into(),
            });
        }
    }
    Ok(())
}

/// All 120 permutations of five labels in lexicographic order.
pub fn permutations5() -> Vec<[usize; 5]> {
    let mut out = Vec::with_capacity(120);
    let mut cur = [0usize; 5];
    fn rec(depth: usize, used: &mut [bool; 5], cur: &mut [usize; 5], out: &mut Vec<[usize; 5]>) {
        if depth == 5 {
            out.push(*cur);
            return;
        }
        for v in 0..5 {
            if !used[v] {
                used[v] = true;
                cur[depth] = v;
                rec(depth + 1, used, cur, out);
                used[v] = false;
            }
        }
    }
    rec(0, &mut [false; 5], &mut cur, &mut out);
    out
}

/// Homogeneous parameter `(num, den)` of a point of the extended line.
type HParam<T> = (T, T);

/// The pairs `(a_k, t_k)` lie on the graph of one (possibly degenerate)
/// projectivity: rows `(a·t, a·s, t, s)` for `t/s` are dependent. For four
/// pairs with distinct entries this is equality of the cross-ratios; it
/// also covers the split case `m1 = m2, M3 = M4`.
fn projectively_related<T: Scalar>(a: &[T; 4], t: &[HParam<T>; 4]) -> bool {
    let rows: Vec<Vec<T>> = (0..4)
        .map(|k| {
            let (tn, td) = t[k].clone();
            vec![a[k].clone() * tn.clone(), a[k].clone() * td.clone(), tn, td]
        })
        .collect();
    let m = Matrix::from_rows(rows);
    let scale: f64 = (0..4)
        .map(|i| (0..4).map(|j| m[(i, j)].magnitude()).fold(1.0, f64::max))
        .product();
    is_zero(&m.det(), scale)
}

/// Parameters of collinear points along the line through the first point
/// with direction `d`.
fn params_on_line<T: Scalar>(origin: &[T; 3], d: &[T; 3], pts: &[&[T; 3]]) -> Vec<HParam<T>> {
    let dd = dot3(d, d);
    pts.iter()
        .map(|p| (dot3(&sub3(p, origin), d) / dd.clone(), T::one()))
        .collect()
}

fn line_direction<T: Scalar>(pts: &[&[T; 3]]) -> Option<[T; 3]> {
    pts.iter()
        .skip(1)
        .map(|p| sub3(p, pts[0]))
        .find(|v| !same3(v, &[T::zero(), T::zero(), T::zero()]))
}

/// Pairwise coincidences and collinear subsets, computed once.
struct Tables<T: Scalar> {
    a: [T; 5],
    m: [[T; 3]; 5],
    eq_a: [[bool; 5]; 5],
    eq_m: [[bool; 5]; 5],
    coll3: [[[bool; 5]; 5]; 5],
    /// `coll4[k]`: the four points other than `k` are collinear.
    coll4: [bool; 5],
    coll5: bool,
    planar: bool,
}

impl<T: Scalar> Tables<T> {
    fn new(a: [T; 5], m: [[T; 3]; 5]) -> Self {
        let eq_a = std::array::from_fn(|i| std::array::from_fn(|j| same(&a[i], &a[j])));
        let eq_m = std::array::from_fn(|i| std::array::from_fn(|j| same3(&m[i], &m[j])));
        let coll3 = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                std::array::from_fn(|k| collinear(&[m[i].clone(), m[j].clone(), m[k].clone()]))
            })
        });
        let coll4 = std::array::from_fn(|skip| {
            collinear(
                &(0..5)
                    .filter(|&k| k != skip)
                    .map(|k| m[k].clone())
                    .collect::<Vec<_>>(),
            )
        });
        let coll5 = collinear(&m);
        let planar = coplanar(&m);
        Tables {
            a,
            m,
            eq_a,
            eq_m,
            coll3,
            coll4,
            coll5,
            planar,
        }
    }
}

struct Labeled<'a, T: Scalar> {
    t: &'a Tables<T>,
    p: [usize; 5],
}

impl<T: Scalar> Labeled<'_, T> {
    fn a(&self, i: usize) -> &T {
        &self.t.a[self.p[i - 1]]
    }

    fn m(&self, i: usize) -> &[T; 3] {
        &self.t.m[self.p[i - 1]]
    }

    fn a_eq(&self, i: usize, j: usize) -> bool {
        self.t.eq_a[self.p[i - 1]][self.p[j - 1]]
    }

    fn m_eq(&self, i: usize, j: usize) -> bool {
        self.t.eq_m[self.p[i - 1]][self.p[j - 1]]
    }

    fn coll3(&self, i: usize, j: usize, k: usize) -> bool {
        self.t.coll3[self.p[i - 1]][self.p[j - 1]][self.p[k - 1]]
    }

    fn case1(&self) -> bool {
        self.m_eq(1, 2) && self.m_eq(2, 3)
    }

    fn case2(&self) -> bool {
        self.a_eq(1, 2) && self.a_eq(2, 3) && self.coll3(1, 2, 3)
    }

    fn case3(&self) -> bool {
        if !self.t.coll4[self.p[4]] {
            return false;
        }
        let pts = [self.m(1), self.m(2), self.m(3), self.m(4)];
        let Some(d) = line_direction(&pts) else {
            return false;
        };
        let t = params_on_line(self.m(1), &d, &pts);
        let a = [1, 2, 3, 4].map(|k| self.a(k).clone());
        projectively_related(
            &a,
            &[t[0].clone(), t[1].clone(), t[2].clone(), t[3].clone()],
        )
    }

    fn case4(&self) -> bool {
        self.a_eq(1, 2) && self.a_eq(2, 3) && self.a_eq(3, 4)
    }

    fn case5(&self) -> bool {
        self.t.coll5
    }

    fn case6(&self) -> bool {
        self.a_eq(1, 2) && self.a_eq(2, 3) && self.m_eq(4, 5)
    }

    fn case7(&self) -> bool {
        self.a_eq(1, 2) && self.a_eq(4, 5) && self.coll3(1, 2, 5) && self.coll3(3, 4, 5)
    }

    fn case9(&self) -> bool {
        if !self.t.planar || !self.a_eq(4, 5) || !self.coll3(1, 2, 3) || self.m_eq(4, 5) {
            return false;
        }
        let pts = [self.m(1), self.m(2), self.m(3)];
        let Some(d) = line_direction(&pts) else {
            return false;
        };
        let e = sub3(self.m(5), self.m(4));
        let n = cross3(&d, &e);
        let nn = dot3(&n, &n);
        let scale = pt_scale(&d) * pt_scale(&e);
        let t4: HParam<T> = if is_zero(&nn, scale * scale) {
            (T::one(), T::zero())
        } else {
            let w = cross3(&sub3(self.m(4), self.m(1)), &e);
            (dot3(&w, &n) / nn, T::one())
        };
        let t = params_on_line(self.m(1), &d, &pts);
        let a = [1, 2, 3, 4].map(|k| self.a(k).clone());
        projectively_related(&a, &[t[0].clone(), t[1].clone(), t[2].clone(), t4])
    }
}

pub(crate) struct PlaneCoords<T: Scalar> {
    pub drop: usize,
    pub keep: [usize; 2],
    pub normal: [T; 3],
    /// A point of the plane.
    pub origin: [T; 3],
    pub coords: Vec<[T; 2]>,
}

/// Affine coordinates of coplanar points in the plane, by dropping the
/// coordinate along which the plane normal is largest.
pub(crate) fn plane_coords<T: Scalar>(pts: &[[T; 3]]) -> Option<PlaneCoords<T>> {
    let mut best: Option<(f64, [T; 3])> = None;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                let n = cross3(&sub3(&pts[j], &pts[i]), &sub3(&pts[k], &pts[i]));
                let mag = n.iter().map(|c| c.magnitude()).fold(0.0, f64::max);
                if best.as_ref().is_none_or(|(b, _)| mag > *b) {
                    best = Some((mag, n));
                }
            }
        }
    }
    let (mag, n) = best?;
    if mag == 0.0 {
        return None;
    }
    let drop = (0..3).max_by(|&x, &y| n[x].magnitude().total_cmp(&n[y].magnitude()))?;
    let keep: Vec<usize> = (0..3).filter(|&c| c != drop).collect();
    let coords = pts
        .iter()
        .map(|p| [p[keep[0]].clone(), p[keep[1]].clone()])
        .collect();
    Some(PlaneCoords {
        drop,
        keep: [keep[0], keep[1]],
        normal: n,
        origin: pts[0].clone(),
        coords,
    })
}

/// Case 8: a quadratic parametrization `a ↦ K·(1, a, a²)` of a conic sends
/// every `m_i` to `M_i`. Unknowns are `K` (9) and one scale per point (5).
fn case8<T: Scalar>(a: &[T; 5], m: &[[T; 3]; 5]) -> bool {
    for i in 0..5 {
        for j in i + 1..5 {
            if same(&a[i], &a[j]) {
                return false;
            }
        }
    }
    if !coplanar(m) {
        return false;
    }
    for i in 0..5 {
        for j in i + 1..5 {
            for k in j + 1..5 {
                if collinear(&[m[i].clone(), m[j].clone(), m[k].clone()]) {
                    return false;
                }
            }
        }
    }
    let Some(pc) = plane_coords(m) else {
        return false;
    };
    let xy = pc.coords;
    let mut sys = Matrix::zeros(15, 14);
    for i in 0..5 {
        let pw = [T::one(), a[i].clone(), a[i].clone() * a[i].clone()];
        let target = [T::one(), xy[i][0].clone(), xy[i][1].clone()];
        for c in 0..3 {
            let row = 3 * i + c;
            for k in 0..3 {
                sys[(row, 3 * c + k)] = pw[k].clone();
            }
            sys[(row, 9 + i)] = -target[c].clone();
        }
    }
    rank(&sys) < 14
}

const CONDITIONS: [&str; 9] = [
    "M1 = M2 = M3",
    "m1 = m2 = m3 and M1, M2, M3 collinear",
    "M1..M4 collinear and CR(m1..m4) = CR(M1..M4)",
    "m1 = m2 = m3 = m4",
    "M1..M5 collinear",
    "m1 = m2 = m3 and M4 = M5",
    "m1 = m2, m4 = m5, M1, M2, M5 collinear and M3, M4, M5 collinear",
    "distinct m, coplanar M with no three collinear, related by a conic projectivity",
    "m4 = m5, coplanar M, M1, M2, M3 collinear, CR(m1, m2, m3, m4) = CR(M1, M2, M3, [M4 M5] ∩ [M1 M2])",
];

/// Searches the nine singular designs over all relabelings; the lowest
/// matching case wins.
pub fn classify_arch<T: Scalar>(p: &Pentapod<T>) -> Result<ArchVerdict> {
    Pentapod::new(p.legs.clone())?;
    let t = Tables::new(p.platform(), p.bases());
    let perms = permutations5();
    for case in 1..=9u8 {
        if case == 8 {
            if t.planar && case8(&t.a, &t.m) {
                return Ok(verdict(8, [0, 1, 2, 3, 4]));
            }
            continue;
        }
        for perm in &perms {
            let l = Labeled { t: &t, p: *perm };
            let hit = match case {
                1 => l.case1(),
                2 => l.case2(),
                3 => l.case3(),
                4 => l.case4(),
                5 => l.case5(),
                6 => l.case6(),
                7 => l.case7(),
                _ => l.case9(),
            };
            if hit {
                return Ok(verdict(case, *perm));
            }
        }
    }
    Ok(ArchVerdict::regular())
}

fn verdict(case: u8, perm: [usize; 5]) -> ArchVerdict {
    ArchVerdict {
        singular: true,
        case: Some(case),
        witness: Some(Witness {
            perm,
            condition: CONDITIONS[case as usize - 1].to_string(),
        }),
    }
}

/// Coordinates in the scaled orthogonal frame spanned by `e`, with origin
/// `o`: component `k` is `(P − o)·e_k / e_k·e_k`.
fn frame_coords<T: Scalar>(o: &[T; 3], e: &[[T; 3]], p: &[T; 3]) -> Vec<T> {
    let v = sub3(p, o);
    e.iter().map(|ek| dot3(&v, ek) / dot3(ek, ek)).collect()
}

fn gram_schmidt<T: Scalar>(e1: &[T; 3], v: &[T; 3]) -> [T; 3] {
    let f = dot3(v, e1) / dot3(e1, e1);
    std::array::from_fn(|k| v[k].clone() - f.clone() * e1[k].clone())
}

fn det4<T: Scalar>(cols: [&[T]; 4]) -> T {
    Matrix::from_fn(4, 4, |i, j| cols[j][i].clone()).det()
}

/// `D1..D5` over legs 2..5 in the canonical planar frame.
pub fn planar_d<T: Scalar>(p: &Pentapod<T>) -> Result<PlanarD<T>> {
    if !p.base_is_planar() {
        return Err(Error::WrongBranch("planar_d needs a planar base".into()));
    }
    validate_assumptions(p)?;
    let a = p.platform();
    let m = p.bases();
    for perm in permutations5() {
        let [i1, i2, i3, i4, _] = perm;
        if same3(&m[i1], &m[i2])
            || collinear(&[m[i1].clone(), m[i2].clone(), m[i3].clone()])
            || collinear(&[m[i1].clone(), m[i2].clone(), m[i4].clone()])
            || same(&a[i3], &a[i4])
        {
            continue;
        }
        let e1 = sub3(&m[i2], &m[i1]);
        let e2 = gram_schmidt(&e1, &sub3(&m[i3], &m[i1]));
        let mut av = Vec::new();
        let mut xa = Vec::new();
        let mut yb = Vec::new();
        for &k in &perm[1..] {
            let c = frame_coords(&m[i1], &[e1.clone(), e2.clone()], &m[k]);
            av.push(a[k].clone() - a[i1].clone());
            xa.push(c[0].clone());
            yb.push(c[1].clone());
        }
        let aa: Vec<T> = av
            .iter()
            .zip(&xa)
            .map(|(x, y)| x.clone() * y.clone())
            .collect();
        let ab: Vec<T> = av
            .iter()
            .zip(&yb)
            .map(|(x, y)| x.clone() * y.clone())
            .collect();
        let d1 = det4([&xa, &yb, &aa, &ab]);
        let d2 = -det4([&av, &yb, &aa, &ab]);
        let d3 = det4([&av, &xa, &aa, &ab]);
        let d4 = -det4([&av, &xa, &yb, &ab]);
        let d5 = det4([&av, &xa, &yb, &aa]);
        return Ok(PlanarD {
            d: [d1, d2, d3, d4, d5],
            perm,
        });
    }
    Err(Error::Internal(
        "no relabeling admits the canonical planar frame".into(),
    ))
}

/// Rows `(a, A, B, C, aA, aB, aC)` of legs 2..5 in the canonical spatial
/// frame (M1 origin, M2 on the first axis, M3 in the first coordinate
/// plane), with the relabeling used.
pub fn canonical_rows<T: Scalar>(p: &Pentapod<T>) -> Result<(Vec<[T; 7]>, [usize; 5])> {
    if p.base_is_planar() {
        return Err(Error::WrongBranch(
            "non-planar determinants need a non-planar base".into(),
        ));
    }
    let a = p.platform();
    let m = p.bases();
    // A2·B3·C4 ≠ 0 in the frame iff M1..M4 span space.
    let usable = |perm: &[usize; 5]| -> bool {
        let [i1, i2, i3, i4, _] = *perm;
        !coplanar(&[m[i1].clone(), m[i2].clone(), m[i3].clone(), m[i4].clone()])
    };
    let identity = [0, 1, 2, 3, 4];
    let perm = if usable(&identity) {
        identity
    } else {
        *permutations5()
            .iter()
            .find(|q| usable(q))
            .ok_or_else(|| Error::Internal("no relabeling admits the canonical frame".into()))?
    };
    let [i1, i2, i3, _, _] = perm;
    let e1 = sub3(&m[i2], &m[i1]);
    let e2 = gram_schmidt(&e1, &sub3(&m[i3], &m[i1]));
    let e3 = cross3(&e1, &e2);
    let mut rows = Vec::new();
    for &k in &perm[1..] {
        let c = frame_coords(&m[i1], &[e1.clone(), e2.clone(), e3.clone()], &m[k]);
        let ak = a[k].clone() - a[i1].clone();
        rows.push([
            ak.clone(),
            c[0].clone(),
            c[1].clone(),
            c[2].clone(),
            ak.clone() * c[0].clone(),
            ak.clone() * c[1].clone(),
            ak * c[2].clone(),
        ]);
    }
    Ok((rows, perm))
}

/// `D_ijk`: the 4×4 determinant left after removing columns `i, j, k`
/// (1-based) of the matrix `(a, A, B, C, aA, aB, aC)`.
pub fn nonplanar_d<T: Scalar>(p: &Pentapod<T>, i: usize, j: usize, k: usize) -> Result<T> {
    let (rows, _) = canonical_rows(p)?;
    d_ijk(&rows, i, j, k)
}

pub(crate) fn d_ijk<T: Scalar>(rows: &[[T; 7]], i: usize, j: usize, k: usize) -> Result<T> {
    let mut drop = [i, j, k];
    drop.sort_unstable();
    if drop[0] < 1 || drop[2] > 7 || drop[0] == drop[1] || drop[1] == drop[2] {
        return Err(Error::InvalidArgument(format!(
            "bad column triple ({i}, {j}, {k})"
        )));
    }
    let keep: Vec<usize> = (1..=7).filter(|c| !drop.contains(c)).collect();
    Ok(Matrix::from_fn(4, 4, |r, c| rows[r][keep[c] - 1].clone()).det())
}
