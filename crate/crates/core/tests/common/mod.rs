#![allow(dead_code)]

use cvol::coloring::{find_region_coloring, ShadowColoring};
use cvol::diagram::{build_diagram, LinkDiagram};
use cvol::fixtures::*;
use cvol::potential::{build_potential, build_simplified, check_h, eval_v0, r_values, PotentialError};
use cvol::quandle::{ParabolicVector, C64};
use cvol::solution::construct_solution;

pub fn fig8(minus: bool) -> (LinkDiagram, ShadowColoring) {
    let t = t_root(minus);
    let d = build_diagram(&figure_eight_pd()).unwrap();
    let s = ShadowColoring {
        arc_colors: figure_eight_arcs(t),
        region_colors: figure_eight_regions(t),
        p: base_point(),
    };
    (d, s)
}

pub fn trefoil() -> (LinkDiagram, ShadowColoring) {
    let d = build_diagram(&trefoil_pd()).unwrap();
    let s = ShadowColoring {
        arc_colors: trefoil_arcs(),
        region_colors: trefoil_regions(),
        p: base_point(),
    };
    (d, s)
}

/// The reference coloring followed by `n` searched ones (seeds 0..n).
pub fn colorings(fixture: (LinkDiagram, ShadowColoring), n: u64) -> (LinkDiagram, Vec<ShadowColoring>) {
    let (d, s) = fixture;
    let mut out = vec![s.clone()];
    for seed in 0..n {
        out.push(find_region_coloring(&d, &s.arc_colors, seed).unwrap());
    }
    (d, out)
}

pub struct Eval {
    pub v0: C64,
    pub h: f64,
    pub r: Result<Vec<C64>, PotentialError>,
}

pub fn evaluate(d: &LinkDiagram, s: &ShadowColoring) -> Eval {
    let pf = build_potential(d, s);
    let asg = construct_solution(d, s).unwrap().to_assignment();
    let simp = build_simplified(&pf, &asg);
    Eval {
        v0: eval_v0(&pf, &asg).unwrap(),
        h: check_h(&pf, &asg).unwrap().max(),
        r: r_values(&simp.pf, &simp.asg, 1e-9),
    }
}

/// All `r_k` even integers and `Σ r_k = 0`, within `tol`.
pub fn parity_ok(r: &[C64], tol: f64) -> bool {
    let even = r
        .iter()
        .all(|x| (x.re / 2.0 - (x.re / 2.0).round()).abs() * 2.0 <= tol && x.im.abs() <= tol);
    let sum: C64 = r.iter().sum();
    even && sum.norm() <= tol
}

pub fn pv(a: C64, b: C64) -> ParabolicVector {
    ParabolicVector::new(a, b)
}
