mod common;

use common::*;
use cvol::coloring::{check_arc_coloring, check_genericity, propagate_regions, ShadowColoring};
use cvol::diagram::{build_diagram, LinkDiagram};
use cvol::fixtures::*;
use cvol::potential::{
    build_potential, eval_v, eval_v0, eval_v0_with_branches, grad_z, li2, Assignment, CrossingTerm, PotentialFunction,
    PI2,
};
use cvol::quandle::{c, det2, hopf, mobius_apply, qop, qop_inv, to_matrix, ParabolicVector, C64};
use cvol::solution::construct_solution;
use cvol::triangulation::{cross_ratio, ptolemy_residual, Role, SignedTetrahedron};
use proptest::prelude::*;

const CASES: u32 = 10_000;

fn complex(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| c(a, b))
}

fn vector() -> impl Strategy<Value = ParabolicVector> {
    (complex(3.0), complex(3.0))
        .prop_filter("nonzero", |(a, b)| a.norm() + b.norm() > 0.1)
        .prop_map(|(a, b)| ParabolicVector::new(a, b))
}

fn close(x: &ParabolicVector, y: &ParabolicVector) -> bool {
    x.dist(y) <= 1e-9 * x.norm_inf().max(y.norm_inf()).max(1.0)
}

fn close_c(x: C64, y: C64) -> bool {
    (x - y).norm() <= 1e-9 * x.norm().max(y.norm()).max(1.0)
}

/// A random element of SL(2, ℂ).
fn sl2() -> impl Strategy<Value = [[C64; 2]; 2]> {
    (complex(2.0), complex(2.0), complex(2.0))
        .prop_filter("invertible corner", |(a, _, _)| a.norm() > 0.5)
        .prop_map(|(a, b, cc)| [[a, b], [cc, (1.0 + b * cc) / a]])
}

fn act(g: &[[C64; 2]; 2], v: &ParabolicVector) -> ParabolicVector {
    ParabolicVector::new(
        g[0][0] * v.alpha + g[0][1] * v.beta,
        g[1][0] * v.alpha + g[1][1] * v.beta,
    )
}

fn fixture_arcs(which: u8) -> (LinkDiagram, Vec<ParabolicVector>) {
    match which {
        0 => (
            build_diagram(&figure_eight_pd()).unwrap(),
            figure_eight_arcs(t_root(true)),
        ),
        1 => (
            build_diagram(&figure_eight_pd()).unwrap(),
            figure_eight_arcs(t_root(false)),
        ),
        _ => (build_diagram(&trefoil_pd()).unwrap(), trefoil_arcs()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn quandle_axioms(a in vector(), b in vector(), cc in vector()) {
        prop_assert!(close(&qop(&a, &a), &a));
        prop_assert!(close(&qop_inv(&qop(&a, &b), &b), &a));
        prop_assert!(close(&qop(&qop_inv(&a, &b), &b), &a));
        let lhs = qop(&qop(&a, &b), &cc);
        let rhs = qop(&qop(&a, &cc), &qop(&b, &cc));
        prop_assert!(close(&lhs, &rhs), "{lhs} vs {rhs}");
    }

    #[test]
    fn det_invariance(a in vector(), b in vector(), cc in vector()) {
        prop_assert!(close_c(det2(&qop(&a, &cc), &qop(&b, &cc)), det2(&a, &b)));
        prop_assert!(close_c(det2(&a, &b), -det2(&b, &a)));
    }

    #[test]
    fn hopf_equivariance(a in vector(), b in vector()) {
        let lhs = hopf(&qop(&a, &b));
        let rhs = mobius_apply(&to_matrix(&b), hopf(&a));
        prop_assert!(lhs.chordal(&rhs) <= 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn propagation_is_path_independent(
        which in 0u8..3,
        g in sl2(),
        seed in vector(),
        ra in 0usize..6,
        rb in 0usize..6,
    ) {
        let (d, arcs) = fixture_arcs(which);
        let arcs: Vec<_> = arcs.iter().map(|a| act(&g, a)).collect();
        check_arc_coloring(&d, &arcs).unwrap();
        let from_a = propagate_regions(&d, &arcs, ra, seed).unwrap();
        let from_b = propagate_regions(&d, &arcs, rb, from_a[rb]).unwrap();
        for (x, y) in from_a.iter().zip(&from_b) {
            prop_assert!(close(x, y));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn negating_arcs_keeps_regions(which in 0u8..3, seed in vector(), mask in 0u8..16) {
        let (d, arcs) = fixture_arcs(which);
        let flipped: Vec<_> = arcs.iter().enumerate().map(|(i, a)| if mask >> i & 1 == 1 { -*a } else { *a }).collect();
        let x = propagate_regions(&d, &arcs, 0, seed).unwrap();
        let y = propagate_regions(&d, &flipped, 0, seed).unwrap();
        for (u, v) in x.iter().zip(&y) {
            prop_assert!(close(u, v));
        }
    }

    #[test]
    fn genericity_is_monotone(which in 0u8..3, seed in vector(), p in vector(), tol in 1e-6f64..1.0, k in 0.0f64..1.0) {
        let (d, arcs) = fixture_arcs(which);
        let regions = propagate_regions(&d, &arcs, 0, seed).unwrap();
        let s = ShadowColoring { arc_colors: arcs, region_colors: regions, p };
        if check_genericity(&d, &s, tol).ok {
            prop_assert!(check_genericity(&d, &s, tol * k).ok);
        }
    }

    #[test]
    fn ptolemy_identity(a in vector(), b in vector(), cc in vector(), e in vector()) {
        let t = SignedTetrahedron { sigma: 1, coords: [a, b, cc, e], crossing: 0, role: Role::Efcd };
        let scale = [a, b, cc, e].iter().map(|v| v.norm_inf()).product::<f64>().max(1.0);
        prop_assert!(ptolemy_residual(&t) <= 1e-9 * scale);
    }

    #[test]
    fn orientation_inverts_shape(a in vector(), b in vector(), cc in vector(), e in vector()) {
        let t = SignedTetrahedron { sigma: 1, coords: [a, b, cc, e], crossing: 0, role: Role::Efcd };
        let z = cross_ratio(&t);
        prop_assume!(z.is_finite() && z.norm() > 1e-6 && z.norm() < 1e6);
        let u = cross_ratio(&SignedTetrahedron { sigma: -1, ..t });
        prop_assert!(close_c(z * u, c(1.0, 0.0)));
    }

    #[test]
    fn dilog_reflection(z in complex(6.0)) {
        prop_assume!(z.norm() > 1e-3 && (c(1.0, 0.0) - z).norm() > 1e-3 && z.im.abs() > 1e-9);
        let one = c(1.0, 0.0);
        let lhs = li2(z) + li2(one - z);
        let rhs = c(PI2 / 6.0, 0.0) - z.ln() * (one - z).ln();
        prop_assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn degenerate_term_vanishes_on_equal_locus(z in complex(4.0), w in (complex(4.0), complex(4.0), complex(4.0)), kink in any::<bool>()) {
        prop_assume!(z.norm() > 1e-2 && w.0.norm() > 1e-2 && w.1.norm() > 1e-2 && w.2.norm() > 1e-2);
        let sides = if kink { [0, 0, 1, 2] } else { [0, 1, 2, 3] };
        let n = if kink { 3 } else { 4 };
        let pf = PotentialFunction {
            n_vars: n,
            terms: vec![CrossingTerm::Degenerate { crossing: 0, sides, slot: 0 }],
            w_crossings: vec![0],
        };
        let asg = Assignment { z: vec![z; n], w: vec![[w.0, w.1, w.2]] };
        prop_assert!(eval_v0(&pf, &asg).unwrap().norm() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn grad_matches_central_difference(zs in proptest::collection::vec(complex(3.0), 8), k in 0usize..8) {
        let (d, s) = fig8(true);
        let pf = build_potential(&d, &s);
        prop_assume!(zs.iter().all(|z| z.norm() > 0.2));
        let asg = Assignment { z: zs, w: vec![] };
        // stay away from the dilogarithm branch cut so the difference quotient is smooth
        let h = 1e-5;
        let mut up = asg.clone();
        let mut dn = asg.clone();
        up.z[k] *= c(h, 0.0).exp();
        dn.z[k] *= c(-h, 0.0).exp();
        let far_from_cut = pf.terms.iter().all(|t| {
            let s = t.sides();
            [(1, 0), (1, 2), (3, 2), (3, 0)].iter().all(|&(n, m)| {
                [&asg, &up, &dn].iter().all(|a| {
                    let r = a.z[s[n]] / a.z[s[m]];
                    (r - 1.0).norm() > 1e-2 && !(r.re > 1.0 && r.im.abs() < 1e-3)
                })
            })
        });
        prop_assume!(far_from_cut);
        let fd = (eval_v(&pf, &up).unwrap() - eval_v(&pf, &dn).unwrap()) / (2.0 * h);
        let g = grad_z(&pf, &asg, k).unwrap();
        prop_assert!((fd - g).norm() < 1e-6 * g.norm().max(1.0), "{fd} vs {g}");
    }

    #[test]
    fn branch_shifts_change_v0_by_pi2_multiples(shift in proptest::collection::vec(-3i64..=3, 8), ws in proptest::collection::vec(-2i64..=2, 3), tref in any::<bool>()) {
        let (d, s) = if tref { trefoil() } else { fig8(true) };
        let pf = build_potential(&d, &s);
        let asg = construct_solution(&d, &s).unwrap().to_assignment();
        let base = eval_v0(&pf, &asg).unwrap();
        let w_shift: Vec<[i64; 3]> = (0..pf.n_w()).map(|_| [ws[0], ws[1], ws[2]]).collect();
        let shifted = eval_v0_with_branches(&pf, &asg, &shift, &w_shift).unwrap();
        // shifts can move V₀ by more than the ±8π² window of mod_pi2_distance
        let k = (shifted - base) / PI2;
        prop_assert!((k.re - k.re.round()).abs() < 1e-9 && k.im.abs() < 1e-9, "{shifted} vs {base}");
    }
}
