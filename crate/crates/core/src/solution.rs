//! The explicit saddle point built from a shadow-coloring, and the split of
//! `V₀` into volume and Chern–Simons parts.

use crate::coloring::ShadowColoring;
use crate::diagram::LinkDiagram;
use crate::potential::{is_degenerate, reduce_mod_pi2, Assignment};
use crate::quandle::{det2, ParabolicVector, C64, TOL_ZERO};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolutionError {
    #[error("genericity violated: zero denominator {what}")]
    GenericityViolated { what: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegenerateW {
    pub crossing: usize,
    /// `w_e, w_f, w_g, w_h` with `w_h = w_e w_g / w_f`.
    pub w: [C64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructedSolution {
    pub z: Vec<C64>,
    pub w: Vec<DegenerateW>,
}

impl ConstructedSolution {
    pub fn to_assignment(&self) -> Assignment {
        Assignment {
            z: self.z.clone(),
            w: self.w.iter().map(|d| [d.w[0], d.w[1], d.w[2]]).collect(),
        }
    }

    /// Largest spread of the four quadrant z-values over degenerate crossings.
    pub fn degenerate_spread(&self, d: &LinkDiagram) -> f64 {
        self.w
            .iter()
            .map(|dw| {
                let q = d.crossings[dw.crossing].quad_sides.map(|k| self.z[k]);
                q.iter().map(|z| (z - q[0]).norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

fn ratio(num: C64, den: C64, what: impl FnOnce() -> String) -> Result<C64, SolutionError> {
    if den.norm() <= TOL_ZERO {
        return Err(SolutionError::GenericityViolated { what: what() });
    }
    Ok(num / den)
}

/// `z_k = det(a, p)/det(a, s)` with `a` the side's arc color and `s` the region
/// on its right. At a degenerate crossing, with `D(x) = det(x, p)` over the
/// quadrant regions: `w_e = D(left)/D(bottom)`, `w_f = D(right)/D(bottom)`,
/// `w_g = D(right)/D(top)`.
pub fn construct_solution(d: &LinkDiagram, s: &ShadowColoring) -> Result<ConstructedSolution, SolutionError> {
    let p = s.p;
    let z = (0..d.n_sides())
        .map(|k| {
            let a = s.side_color(d, k);
            let r = s.region_colors[d.side_right[k]];
            ratio(det2(&a, &p), det2(&a, &r), || {
                format!("det(a, s) on side {}", d.labels[k])
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut w = Vec::new();
    for (j, x) in d.crossings.iter().enumerate() {
        if !is_degenerate(d, s, j) {
            continue;
        }
        let dp = |q: usize| -> C64 {
            let r: &ParabolicVector = &s.region_colors[x.quad_regions[q]];
            det2(r, &p)
        };
        let (bottom, right, top, left) = (dp(0), dp(1), dp(2), dp(3));
        let what = || format!("det(s, p) at crossing {j}");
        let we = ratio(left, bottom, what)?;
        let wf = ratio(right, bottom, what)?;
        let wg = ratio(right, top, what)?;
        let wh = ratio(we * wg, wf, what)?;
        w.push(DegenerateW {
            crossing: j,
            w: [we, wf, wg, wh],
        });
    }
    Ok(ConstructedSolution { z, w })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexVolumeResult {
    pub vol: f64,
    /// In `(−π²/2, π²/2]`.
    pub cs_mod_pi2: f64,
    pub v0: C64,
}

/// `V₀ ≡ i(vol + i·cs) mod π²`.
pub fn extract_complex_volume(v0: C64) -> ComplexVolumeResult {
    ComplexVolumeResult {
        vol: v0.im,
        cs_mod_pi2: reduce_mod_pi2(-v0.re),
        v0,
    }
}
