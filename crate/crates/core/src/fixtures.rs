//! Built-in worked examples: the figure-eight knot and a trefoil with a kink.
//!
//! Side labels follow the reference numbering so that the side variables
//! line up with the printed `z_1, …, z_8`.

use crate::diagram::PdCode;
use crate::quandle::{c, ParabolicVector, C64};

pub fn figure_eight_pd() -> PdCode {
    PdCode::new(vec![[4, 7, 5, 8], [8, 3, 1, 4], [2, 6, 3, 5], [6, 2, 7, 1]]).unwrap()
}

/// Right-handed trefoil with one extra negative kink (crossing 3, sides 6–8).
pub fn trefoil_pd() -> PdCode {
    PdCode::new(vec![[1, 5, 2, 4], [5, 3, 6, 2], [3, 1, 4, 8], [7, 6, 8, 7]]).unwrap()
}

/// Root of t² + t + 1 = 0; `minus` selects (−1 − √3 i)/2.
pub fn t_root(minus: bool) -> C64 {
    let s = (3f64).sqrt() / 2.0;
    if minus {
        c(-0.5, -s)
    } else {
        c(-0.5, s)
    }
}

pub fn figure_eight_arcs(t: C64) -> Vec<ParabolicVector> {
    let z = c(0.0, 0.0);
    vec![
        ParabolicVector::new(z, t),
        ParabolicVector::new(c(1.0, 0.0), z),
        ParabolicVector::new(-t, 1.0 + t),
        ParabolicVector::new(-t, t),
    ]
}

/// The six reference region colors `s_1..s_6`.
pub fn figure_eight_regions_reference(t: C64) -> Vec<ParabolicVector> {
    let one = c(1.0, 0.0);
    vec![
        ParabolicVector::new(one, one),
        ParabolicVector::new(c(0.0, 0.0), one),
        ParabolicVector::new(-t - 1.0, t + 2.0),
        ParabolicVector::new(-2.0 * t - 1.0, 2.0 * t + 3.0),
        ParabolicVector::new(-2.0 * t - 1.0, t + 4.0),
        ParabolicVector::new(one, t + 2.0),
    ]
}

/// Region index (in diagram order) -> reference `s_k` index (0-based).
pub const FIGURE_EIGHT_REGION_MAP: [usize; 6] = [0, 3, 2, 1, 5, 4];

pub fn figure_eight_regions(t: C64) -> Vec<ParabolicVector> {
    let s = figure_eight_regions_reference(t);
    FIGURE_EIGHT_REGION_MAP.iter().map(|&k| s[k]).collect()
}

pub fn trefoil_arcs() -> Vec<ParabolicVector> {
    // arcs ordered by smallest side: {1,8}=a4, {2,3}=a1, {4,5}=a2, {6,7}=a3
    let a1 = ParabolicVector::real(1.0, 0.0);
    let a2 = ParabolicVector::real(0.0, 1.0);
    let a3 = ParabolicVector::real(-1.0, 1.0);
    let a4 = ParabolicVector::real(-1.0, 1.0);
    vec![a4, a1, a2, a3]
}

pub fn trefoil_regions_reference() -> Vec<ParabolicVector> {
    [
        (-1.0, 2.0),
        (1.0, 2.0),
        (-1.0, 3.0),
        (0.0, 1.0),
        (1.0, 1.0),
        (-2.0, 3.0),
    ]
    .iter()
    .map(|&(a, b)| ParabolicVector::real(a, b))
    .collect()
}

pub const TREFOIL_REGION_MAP: [usize; 6] = [4, 1, 0, 2, 3, 5];

pub fn trefoil_regions() -> Vec<ParabolicVector> {
    let s = trefoil_regions_reference();
    TREFOIL_REGION_MAP.iter().map(|&k| s[k]).collect()
}

pub fn base_point() -> ParabolicVector {
    ParabolicVector::real(2.0, 1.0)
}

/// Figure-eight arc colors in reference order `a_1..a_4`; the diagram's arc
/// order happens to coincide.
pub fn figure_eight_arcs_reference(t: C64) -> Vec<ParabolicVector> {
    figure_eight_arcs(t)
}

pub fn trefoil_arcs_reference() -> Vec<ParabolicVector> {
    vec![
        ParabolicVector::real(1.0, 0.0),
        ParabolicVector::real(0.0, 1.0),
        ParabolicVector::real(-1.0, 1.0),
        ParabolicVector::real(-1.0, 1.0),
    ]
}
