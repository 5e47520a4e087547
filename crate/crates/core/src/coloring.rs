//! Shadow-colorings: arc colors from the representation, region colors by
//! propagation, and a generic base point `p`.
//!
//! Crossing a side from the region on its right to the region on its left
//! applies `· * a`, where `a` is the side's arc color.

use crate::diagram::LinkDiagram;
use crate::quandle::{det2, hopf_distance, qop, qop_inv, sign_against, ParabolicVector, TOL_EQ};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ColoringError {
    #[error("expected {expected} colors, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("invalid (zero or non-finite) color for {what} {index}")]
    InvalidColor { what: &'static str, index: usize },
    #[error("relation violated at crossing {crossing} (residual {residual:.3e})")]
    RelationViolated { crossing: usize, residual: f64 },
    #[error("inconsistent region propagation across side {side} (residual {residual:.3e})")]
    InconsistentPropagation { side: usize, residual: f64 },
    #[error("no generic region coloring found after {tries} tries")]
    SearchExhausted { tries: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShadowColoring {
    pub arc_colors: Vec<ParabolicVector>,
    pub region_colors: Vec<ParabolicVector>,
    pub p: ParabolicVector,
}

impl ShadowColoring {
    pub fn side_color(&self, d: &LinkDiagram, side: usize) -> ParabolicVector {
        self.arc_colors[d.side_arc[side]]
    }

    pub fn conj(&self) -> Self {
        ShadowColoring {
            arc_colors: self.arc_colors.iter().map(|a| a.conj()).collect(),
            region_colors: self.region_colors.iter().map(|a| a.conj()).collect(),
            p: self.p.conj(),
        }
    }
}

fn check_count(expected: usize, colors: &[ParabolicVector], what: &'static str) -> Result<(), ColoringError> {
    if colors.len() != expected {
        return Err(ColoringError::WrongCount {
            expected,
            got: colors.len(),
        });
    }
    if let Some(i) = colors.iter().position(|v| !v.is_valid()) {
        return Err(ColoringError::InvalidColor { what, index: i });
    }
    Ok(())
}

/// At every crossing, `a_l * a_k = ε·a_f` where `a_k` is the over arc, `a_l`
/// the under arc at `h` and `a_f` the under arc at `f`. Returns the ε's.
pub fn check_arc_coloring(d: &LinkDiagram, arcs: &[ParabolicVector]) -> Result<Vec<i8>, ColoringError> {
    check_arc_coloring_tol(d, arcs, TOL_EQ)
}

pub fn check_arc_coloring_tol(d: &LinkDiagram, arcs: &[ParabolicVector], tol: f64) -> Result<Vec<i8>, ColoringError> {
    check_count(d.n_arcs(), arcs, "arc")?;
    d.crossings
        .iter()
        .enumerate()
        .map(|(j, x)| {
            let ak = arcs[x.over_arc];
            let al = arcs[d.side_arc[x.h()]];
            let af = arcs[d.side_arc[x.f()]];
            let lhs = qop(&al, &ak);
            // relative to the scale of the vectors involved
            let scale = lhs.norm_inf().max(af.norm_inf()).max(1.0);
            sign_against(&lhs, &af, tol * scale).ok_or(ColoringError::RelationViolated {
                crossing: j,
                residual: lhs.dist(&af).min(lhs.dist(&-af)),
            })
        })
        .collect()
}

/// Propagate a region coloring from one seeded region, then verify every side.
pub fn propagate_regions(
    d: &LinkDiagram,
    arcs: &[ParabolicVector],
    seed_region: usize,
    seed_color: ParabolicVector,
) -> Result<Vec<ParabolicVector>, ColoringError> {
    check_count(d.n_arcs(), arcs, "arc")?;
    let m = d.n_regions();
    let mut col: Vec<Option<ParabolicVector>> = vec![None; m];
    col[seed_region] = Some(seed_color);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for s in 0..d.n_sides() {
        adj[d.side_left[s]].push(s);
        adj[d.side_right[s]].push(s);
    }
    let mut queue = VecDeque::from([seed_region]);
    while let Some(r) = queue.pop_front() {
        let cr = col[r].unwrap();
        for &s in &adj[r] {
            let a = arcs[d.side_arc[s]];
            let (l, rt) = (d.side_left[s], d.side_right[s]);
            let (target, val) = if rt == r {
                (l, qop(&cr, &a))
            } else {
                (rt, qop_inv(&cr, &a))
            };
            if col[target].is_none() {
                col[target] = Some(val);
                queue.push_back(target);
            }
        }
    }
    let col: Vec<ParabolicVector> = col.into_iter().map(|c| c.expect("dual graph is connected")).collect();
    for s in 0..d.n_sides() {
        let want = qop(&col[d.side_right[s]], &arcs[d.side_arc[s]]);
        let got = col[d.side_left[s]];
        let scale = want.norm_inf().max(1.0);
        let residual = want.dist(&got);
        if residual > TOL_EQ * scale {
            return Err(ColoringError::InconsistentPropagation { side: s, residual });
        }
    }
    Ok(col)
}

/// Check that given region colors satisfy the side rule.
pub fn check_region_coloring(
    d: &LinkDiagram,
    arcs: &[ParabolicVector],
    regions: &[ParabolicVector],
) -> Result<(), ColoringError> {
    check_count(d.n_regions(), regions, "region")?;
    for s in 0..d.n_sides() {
        let want = qop(&regions[d.side_right[s]], &arcs[d.side_arc[s]]);
        let residual = want.dist(&regions[d.side_left[s]]);
        if residual > TOL_EQ * want.norm_inf().max(1.0) {
            return Err(ColoringError::InconsistentPropagation { side: s, residual });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Hopf images of `(a, s, s*a)` at a side not pairwise distinct.
    Side {
        side: usize,
        arc: usize,
        right_region: usize,
        left_region: usize,
        pair: &'static str,
        distance: f64,
    },
    /// `h(p)` collides with an arc color.
    PointArc { arc: usize, distance: f64 },
    /// `h(p)` collides with a region color.
    PointRegion { region: usize, distance: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenericityReport {
    pub ok: bool,
    pub min_distance: f64,
    pub violations: Vec<Violation>,
}

pub const TOL_SEP: f64 = 1e-9;

/// For every side with arc color `a`, right region `s` and left region
/// `s*a`, the Hopf images of `a, s, s*a` are pairwise distinct; `h(p)`
/// avoids every arc and region image. Distances are chordal.
pub fn check_genericity(d: &LinkDiagram, s: &ShadowColoring, tol_sep: f64) -> GenericityReport {
    let mut violations = Vec::new();
    let mut min_distance = f64::INFINITY;
    let mut note = |dist: f64, v: Violation, out: &mut Vec<Violation>| {
        min_distance = min_distance.min(dist);
        if dist <= tol_sep {
            out.push(v);
        }
    };
    for side in 0..d.n_sides() {
        let arc = d.side_arc[side];
        let (r, l) = (d.side_right[side], d.side_left[side]);
        let (a, sr, sl) = (&s.arc_colors[arc], &s.region_colors[r], &s.region_colors[l]);
        for (pair, x, y) in [("arc/right", a, sr), ("right/left", sr, sl), ("left/arc", sl, a)] {
            let dist = hopf_distance(x, y);
            note(
                dist,
                Violation::Side {
                    side,
                    arc,
                    right_region: r,
                    left_region: l,
                    pair,
                    distance: dist,
                },
                &mut violations,
            );
        }
    }
    for (arc, a) in s.arc_colors.iter().enumerate() {
        let dist = hopf_distance(&s.p, a);
        note(dist, Violation::PointArc { arc, distance: dist }, &mut violations);
    }
    for (region, r) in s.region_colors.iter().enumerate() {
        let dist = hopf_distance(&s.p, r);
        note(dist, Violation::PointRegion { region, distance: dist }, &mut violations);
    }
    GenericityReport {
        ok: violations.is_empty(),
        min_distance,
        violations,
    }
}

pub const MAX_TRIES: usize = 10_000;

fn random_vector(rng: &mut ChaCha8Rng, range: i64) -> ParabolicVector {
    loop {
        let a = rng.gen_range(-range..=range) as f64;
        let b = rng.gen_range(-range..=range) as f64;
        if a != 0.0 || b != 0.0 {
            return ParabolicVector::real(a, b);
        }
    }
}

/// Search for a generic region coloring and base point with small integer
/// seeds. The entry range starts at 2 and grows every 50 failures.
pub fn find_region_coloring(
    d: &LinkDiagram,
    arcs: &[ParabolicVector],
    rng_seed: u64,
) -> Result<ShadowColoring, ColoringError> {
    find_region_coloring_with(d, arcs, rng_seed, MAX_TRIES, TOL_SEP)
}

pub fn find_region_coloring_with(
    d: &LinkDiagram,
    arcs: &[ParabolicVector],
    rng_seed: u64,
    max_tries: usize,
    tol_sep: f64,
) -> Result<ShadowColoring, ColoringError> {
    assert!(d.n_crossings() > 0, "diagram without crossings");
    check_arc_coloring(d, arcs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut range = 2i64;
    for attempt in 0..max_tries {
        if attempt > 0 && attempt % 50 == 0 {
            range += 1;
        }
        let seed = random_vector(&mut rng, range);
        let regions = propagate_regions(d, arcs, 0, seed)?;
        let p = random_vector(&mut rng, range);
        let s = ShadowColoring {
            arc_colors: arcs.to_vec(),
            region_colors: regions,
            p,
        };
        if check_genericity(d, &s, tol_sep).ok && nondegenerate_denominators(d, &s, tol_sep) {
            return Ok(s);
        }
    }
    Err(ColoringError::SearchExhausted { tries: max_tries })
}

/// Sample integer base points until the coloring with these fixed region
/// colors is generic.
pub fn find_base_point(
    d: &LinkDiagram,
    arcs: &[ParabolicVector],
    regions: &[ParabolicVector],
    rng_seed: u64,
) -> Result<ParabolicVector, ColoringError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut range = 2i64;
    for attempt in 0..MAX_TRIES {
        if attempt > 0 && attempt % 50 == 0 {
            range += 1;
        }
        let p = random_vector(&mut rng, range);
        let s = ShadowColoring {
            arc_colors: arcs.to_vec(),
            region_colors: regions.to_vec(),
            p,
        };
        if check_genericity(d, &s, TOL_SEP).ok && nondegenerate_denominators(d, &s, TOL_SEP) {
            return Ok(p);
        }
    }
    Err(ColoringError::SearchExhausted { tries: MAX_TRIES })
}

/// Extra guard: every `det(a, right region)` and `det(region, p)` is far from 0.
/// Implied by genericity in exact arithmetic; kept for conditioning.
fn nondegenerate_denominators(d: &LinkDiagram, s: &ShadowColoring, tol: f64) -> bool {
    (0..d.n_sides()).all(|k| det2(&s.side_color(d, k), &s.region_colors[d.side_right[k]]).norm() > tol)
        && s.region_colors.iter().all(|r| det2(r, &s.p).norm() > tol)
}
