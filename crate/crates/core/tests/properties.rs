use num::traits::Zero;
use proptest::prelude::*;

use pentakin::archsing::classify_arch;
use pentakin::dirkin::solve_dk_exact;
use pentakin::geom::{cross_ratio_ext, dot3, proportional, sub3, Ext, Mobius};
use pentakin::kinmap::{
    displacement, lift_study, phi_residuals, Hyperplane, Leg, MotionParams, Pentapod, StudyParams,
};
use pentakin::polyalg::scalar::{gauss, rat, rat_int, rat_to_f64};
use pentakin::polyalg::{resultant_univariate, Matrix, UPoly};
use pentakin::rearrange::{replacement_cubic, sigma, Sigma};
use pentakin::selfmotion::{
    real_legs_from_design, synth_leg_params, CanonicalGeometry, DesignType, LegParams,
};
use pentakin::{GaussRat, Rat};

fn small_rat() -> impl Strategy<Value = Rat> {
    (-12i64..=12, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

fn nonzero_rat() -> impl Strategy<Value = Rat> {
    small_rat().prop_filter("nonzero", |r| !r.is_zero())
}

fn point() -> impl Strategy<Value = [Rat; 3]> {
    [small_rat(), small_rat(), small_rat()]
}

fn study() -> impl Strategy<Value = StudyParams<Rat>> {
    (
        [small_rat(), small_rat(), small_rat(), small_rat()],
        [small_rat(), small_rat(), small_rat(), small_rat()],
    )
        .prop_filter("e ≠ 0", |(e, _)| e.iter().any(|c| !c.is_zero()))
        .prop_map(|(e, f0)| {
            // Project f onto the Study quadric.
            let ee = e.iter().fold(Rat::zero(), |a, x| a + x * x);
            let ef = e.iter().zip(&f0).fold(Rat::zero(), |a, (x, y)| a + x * y);
            let f = std::array::from_fn(|k| &f0[k] - &e[k] * &ef / &ee);
            StudyParams::new(e, f)
        })
}

/// Sphere condition written directly in Study parameters.
fn sphere_quadratic(s: &StudyParams<Rat>, a: &Rat, m: &[Rat; 3], r2: &Rat) -> Rat {
    let [e0, e1, e2, e3] = &s.e;
    let [f0, f1, f2, f3] = &s.f;
    let [ma, mb, mc] = m;
    let two = rat_int(2);
    let four = rat_int(4);
    let esum = e0 * e0 + e1 * e1 + e2 * e2 + e3 * e3;
    let fsum = f0 * f0 + f1 * f1 + f2 * f2 + f3 * f3;
    (a * a + ma * ma + mb * mb + mc * mc - r2) * esum
        - &two * a * ma * (e0 * e0 + e1 * e1 - e2 * e2 - e3 * e3)
        - &four * a * mb * (e0 * e3 + e1 * e2)
        + &four * a * mc * (e0 * e2 - e1 * e3)
        - &four * a * (e0 * f1 - e1 * f0 - e2 * f3 + e3 * f2)
        + &four * ma * (e0 * f1 - e1 * f0 + e2 * f3 - e3 * f2)
        + &four * mb * (e0 * f2 - e1 * f3 - e2 * f0 + e3 * f1)
        + &four * mc * (e0 * f3 + e1 * f2 - e2 * f1 - e3 * f0)
        + &four * fsum
}

fn poly() -> impl Strategy<Value = UPoly<Rat>> {
    prop::collection::vec(small_rat(), 1..5).prop_map(UPoly::new)
}

fn pentapod() -> impl Strategy<Value = Pentapod<Rat>> {
    (
        [
            small_rat(),
            small_rat(),
            small_rat(),
            small_rat(),
            small_rat(),
        ],
        [point(), point(), point(), point(), point()],
    )
        .prop_filter_map("valid pentapod", |(a, b)| Pentapod::from_points(a, b).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linear_sphere_form_matches_quadratic(s in study(), a in small_rat(), m in point(), r2 in small_rat()) {
        let mp = lift_study(&s).unwrap();
        let lin = Hyperplane::sphere_r2(&a, &m, &r2).eval(&mp);
        prop_assert_eq!(lin, sphere_quadratic(&s, &a, &m, &r2));
    }

    #[test]
    fn lifted_points_lie_on_image_variety(s in study()) {
        let mp = lift_study(&s).unwrap();
        prop_assert!(phi_residuals(&mp).iter().all(|r| r.is_zero()));
    }

    #[test]
    fn displacement_is_rigid(s in study(), a in small_rat(), b in small_rat()) {
        let mp = lift_study(&s).unwrap();
        let d = sub3(&displacement(&mp, &a).unwrap(), &displacement(&mp, &b).unwrap());
        prop_assert_eq!(dot3(&d, &d), (&a - &b) * (&a - &b));
    }

    #[test]
    fn common_root_kills_resultant(p in poly(), q in poly(), r in small_rat()) {
        prop_assume!(!p.is_zero() && !q.is_zero());
        let lin = UPoly::linear_root(r);
        let res = resultant_univariate(&(&p * &lin), &(&q * &lin)).unwrap();
        prop_assert!(res.is_zero());
    }

    #[test]
    fn gcd_contains_common_factor(p in poly(), q in poly(), c in poly()) {
        prop_assume!(!p.is_zero() && !q.is_zero() && c.degree().unwrap_or(0) > 0);
        let g = (&p * &c).gcd_primitive(&(&q * &c));
        prop_assert!(g.rem(&c).is_zero());
    }

    #[test]
    fn cross_ratio_is_mobius_invariant(
        t in [small_rat(), small_rat(), small_rat(), small_rat()],
        z in [small_rat(), small_rat(), small_rat(), small_rat()],
    ) {
        let distinct = (0..4).all(|i| (i + 1..4).all(|j| t[i] != t[j]));
        prop_assume!(distinct);
        let Ok(m) = Mobius::new(z) else { return Ok(()) };
        let e = t.clone().map(Ext::Finite);
        let img = e.clone().map(|w| m.apply(&w, 0.0));
        let before = cross_ratio_ext(&e[0], &e[1], &e[2], &e[3]).unwrap();
        let after = cross_ratio_ext(&img[0], &img[1], &img[2], &img[3]).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn random_pentapods_are_not_singular(p in pentapod()) {
        let v = classify_arch(&p).unwrap();
        prop_assert!(!v.singular, "case {:?}", v.case);
    }

    #[test]
    fn leg_replacement_keeps_the_correspondence(p in pentapod(), b in small_rat()) {
        let Ok(c) = replacement_cubic(&p) else { return Ok(()) };
        let Sigma::Point(m) = sigma(&c, &b) else { return Ok(()) };
        let Some(base) = m.affine() else { return Ok(()) };
        let mut legs = p.legs.clone();
        legs[0] = Leg::new(b.clone(), base);
        let Ok(q) = Pentapod::new(legs) else { return Ok(()) };
        let Ok(c2) = replacement_cubic(&q) else { return Ok(()) };
        // Compare images at a few other platform coordinates.
        for s in [-3i64, 2, 7] {
            let s = rat_int(s);
            if let (Sigma::Point(x), Sigma::Point(y)) = (sigma(&c, &s), sigma(&c2, &s)) {
                prop_assert!(proportional(&x.0, &y.0, 0.0));
            }
        }
    }
}

fn canonical_type1() -> impl Strategy<Value = CanonicalGeometry> {
    (
        small_rat(),
        nonzero_rat(),
        small_rat(),
        point(),
        small_rat(),
    )
        .prop_map(|(ar, ac, a4, m5, r1)| CanonicalGeometry {
            kind: DesignType::Type1,
            a2: gauss(ar, ac),
            a_last: a4,
            m5,
            r1_sq: r1,
        })
}

fn canonical_any() -> impl Strategy<Value = CanonicalGeometry> {
    (canonical_type1(), 0..3usize).prop_map(|(mut g, k)| {
        match k {
            1 => {
                g.kind = DesignType::Type2;
                g.a_last = Rat::zero();
                g.m5[2] = Rat::zero();
            }
            2 => g.kind = DesignType::Type5,
            _ => {}
        }
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn synthesized_designs_satisfy_their_relations(g in canonical_any()) {
        let Ok(d) = synth_leg_params(&g) else { return Ok(()) };
        prop_assert!(d.satisfies_relations());
        let (p2, p3) = match &d.params {
            LegParams::Darboux { p2, p3, .. } | LegParams::Angle { p2, p3, .. } => (p2, p3),
        };
        prop_assert_eq!(p3.clone(), p2.conj());
    }

    #[test]
    fn generated_legs_are_combinations_of_the_design(g in canonical_any(), a in small_rat()) {
        let Ok(d) = synth_leg_params(&g) else { return Ok(()) };
        let Some(Ok(leg)) = real_legs_from_design(&d, &[a]).pop() else { return Ok(()) };
        let hs = d.hyperplanes();
        let extra = leg.sphere().unwrap().map(|c| GaussRat::new(c.clone(), Rat::zero()));
        let rows: Vec<Vec<GaussRat>> = hs.iter().chain(std::iter::once(&extra)).map(|h| h.coeffs.to_vec()).collect();
        prop_assert_eq!(Matrix::from_rows(rows).rank(0.0), 5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn seeded_pose_is_recovered(s in study(), p in pentapod()) {
        let m = lift_study(&s).unwrap();
        let legs: [Leg<Rat>; 5] = std::array::from_fn(|i| {
            let l = &p.legs[i];
            let q = displacement(&m, &l.a).unwrap();
            let d = sub3(&q, &l.base);
            Leg::with_r2(l.a.clone(), l.base.clone(), dot3(&d, &d))
        });
        let pp = Pentapod::new(legs).unwrap();
        prop_assume!(pp.legs.iter().all(|l| l.r2.as_ref().is_some_and(|r| !r.is_zero())));
        let Ok(res) = solve_dk_exact(&pp) else { return Ok(()) };
        let target: MotionParams<f64> = m.normalized().unwrap().map(rat_to_f64);
        let found = res.solutions.iter().any(|sol| {
            sol.params.to_array().iter().zip(target.to_array()).all(|(x, y)| (x - y).abs() <= 1e-7 * (1.0 + y.abs()))
        });
        prop_assert!(found, "degree {} with {} solutions", res.degree(), res.solutions.len());
        prop_assert!(res.degree() <= 8);
    }
}
