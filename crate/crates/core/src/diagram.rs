//! Oriented link diagrams from PD codes.
//!
//! PD convention: each crossing lists its four side labels counterclockwise,
//! starting at the incoming under-strand. Position 0 is under-in, 2 is
//! under-out, 1 and 3 carry the over-strand. If the over-strand runs 3 → 1
//! the crossing is positive, otherwise negative.
//!
//! Quadrant frame of a crossing (looking along the over-strand): `e` is the
//! over-out position, then `f`, `g`, `h` follow counterclockwise, i.e. `e`
//! lower-left, `f` lower-right, `g` upper-right, `h` upper-left. Corner `i`
//! is the wedge between positions `i` and `i+1`; the quadrant regions are
//! bottom = corner(e), right = corner(f), top = corner(g), left = corner(h).

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error("malformed PD at crossing {crossing:?}: {reason}")]
    MalformedPd { crossing: Option<usize>, reason: String },
    #[error("diagram is not planar (V - E + F = {euler}, expected 2)")]
    NonPlanar { euler: i64 },
    #[error("trivial component {component}: {reason}")]
    TrivialComponent { component: usize, reason: String },
    #[error("crossing {crossing}: sign hint {hint} disagrees with computed sign {computed}")]
    SignHintMismatch { crossing: usize, hint: i8, computed: i8 },
}

fn malformed(crossing: Option<usize>, reason: impl Into<String>) -> DiagramError {
    DiagramError::MalformedPd {
        crossing,
        reason: reason.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdCode {
    pub crossings: Vec<[i64; 4]>,
}

impl PdCode {
    pub fn new(crossings: Vec<[i64; 4]>) -> Result<Self, DiagramError> {
        let pd = PdCode { crossings };
        pd.validate()?;
        Ok(pd)
    }

    fn validate(&self) -> Result<(), DiagramError> {
        if self.crossings.is_empty() {
            return Err(malformed(None, "no crossings"));
        }
        let mut seen: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (j, x) in self.crossings.iter().enumerate() {
            for &l in x {
                seen.entry(l).or_default().push(j);
            }
        }
        for (l, at) in &seen {
            if at.len() != 2 {
                return Err(malformed(
                    Some(at[at.len() - 1]),
                    format!("side label {l} appears {} times", at.len()),
                ));
            }
        }
        Ok(())
    }
}

/// Parse a PD code: either a bare `[[a,b,c,d],...]` or an object with a `"pd"` key.
pub fn parse_pd(text: &str) -> Result<PdCode, DiagramError> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| malformed(None, format!("invalid JSON: {e}")))?;
    let list = match &v {
        serde_json::Value::Object(m) => m.get("pd").ok_or_else(|| malformed(None, "missing \"pd\""))?,
        other => other,
    };
    pd_from_value(list)
}

pub fn pd_from_value(v: &serde_json::Value) -> Result<PdCode, DiagramError> {
    let arr = v.as_array().ok_or_else(|| malformed(None, "pd must be a list"))?;
    let mut out = Vec::with_capacity(arr.len());
    for (j, x) in arr.iter().enumerate() {
        let row = x
            .as_array()
            .ok_or_else(|| malformed(Some(j), "crossing must be a list"))?;
        if row.len() != 4 {
            return Err(malformed(Some(j), format!("arity {} (expected 4)", row.len())));
        }
        let mut t = [0i64; 4];
        for (i, l) in row.iter().enumerate() {
            t[i] = l
                .as_i64()
                .ok_or_else(|| malformed(Some(j), "side labels must be integers"))?;
        }
        out.push(t);
    }
    PdCode::new(out)
}

/// Crossing end: (crossing, position 0..4).
pub type End = (usize, usize);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub sign: i8,
    /// PD positions of the quadrant sides e, f, g, h.
    pub frame: [usize; 4],
    /// Side indices at e, f, g, h (may coincide at a kink).
    pub quad_sides: [usize; 4],
    /// Regions bottom, right, top, left.
    pub quad_regions: [usize; 4],
    pub over_arc: usize,
    pub under_in_arc: usize,
    pub under_out_arc: usize,
}

impl Crossing {
    pub fn e(&self) -> usize {
        self.quad_sides[0]
    }
    pub fn f(&self) -> usize {
        self.quad_sides[1]
    }
    pub fn g(&self) -> usize {
        self.quad_sides[2]
    }
    pub fn h(&self) -> usize {
        self.quad_sides[3]
    }
}

pub fn crossing_sign(c: &Crossing) -> i8 {
    c.sign
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Region {
    /// Corners (crossing, corner index) in traversal order.
    pub corners: Vec<End>,
    /// Boundary sides in traversal order.
    pub sides: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LinkDiagram {
    pub pd: PdCode,
    /// Side index -> PD label (sorted ascending).
    pub labels: Vec<i64>,
    /// Side index -> [out end, in end].
    pub side_ends: Vec<[End; 2]>,
    /// (crossing, position) -> side index.
    pub slot: Vec<[usize; 4]>,
    pub crossings: Vec<Crossing>,
    /// Arc index -> member sides (ascending). Arcs are ordered by smallest side label.
    pub arcs: Vec<Vec<usize>>,
    pub side_arc: Vec<usize>,
    pub regions: Vec<Region>,
    /// (crossing, corner) -> region.
    pub corner_region: Vec<[usize; 4]>,
    pub side_left: Vec<usize>,
    pub side_right: Vec<usize>,
    pub side_component: Vec<usize>,
    pub n_components: usize,
}

impl LinkDiagram {
    pub fn n_crossings(&self) -> usize {
        self.crossings.len()
    }
    pub fn n_sides(&self) -> usize {
        self.labels.len()
    }
    pub fn n_arcs(&self) -> usize {
        self.arcs.len()
    }
    pub fn n_regions(&self) -> usize {
        self.regions.len()
    }

    pub fn side_of_label(&self, label: i64) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    /// Position of `e, f, g, h` (0..4) occupied by PD position `pos` at crossing `j`.
    pub fn quadrant_of(&self, j: usize, pos: usize) -> usize {
        self.crossings[j].frame.iter().position(|&p| p == pos).unwrap()
    }

    /// Whether a side end sits on the over-strand of its crossing.
    pub fn is_over_end(end: End) -> bool {
        end.1 % 2 == 1
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

pub fn build_diagram(pd: &PdCode) -> Result<LinkDiagram, DiagramError> {
    if pd.crossings.is_empty() {
        return Err(DiagramError::TrivialComponent {
            component: 0,
            reason: "diagram has no crossings".into(),
        });
    }
    pd.validate()?;
    let n = pd.crossings.len();
    let mut labels: Vec<i64> = pd.crossings.iter().flatten().copied().collect();
    labels.sort_unstable();
    labels.dedup();
    let ns = labels.len();
    let idx = |l: i64| labels.binary_search(&l).unwrap();

    let mut slot = vec![[0usize; 4]; n];
    let mut ends: Vec<Vec<End>> = vec![Vec::new(); ns];
    for (j, x) in pd.crossings.iter().enumerate() {
        for i in 0..4 {
            let s = idx(x[i]);
            slot[j][i] = s;
            ends[s].push((j, i));
        }
    }
    let other = |e: End| -> End {
        let s = slot[e.0][e.1];
        if ends[s][0] == e {
            ends[s][1]
        } else {
            ends[s][0]
        }
    };

    // orientation: Some(true) = incoming at this end
    let mut inn: Vec<[Option<bool>; 4]> = vec![[Some(true), None, Some(false), None]; n];
    loop {
        let mut changed = false;
        for s in 0..ns {
            let [a, b] = [ends[s][0], ends[s][1]];
            match (inn[a.0][a.1], inn[b.0][b.1]) {
                (Some(x), Some(y)) if x == y => {
                    return Err(malformed(
                        Some(a.0),
                        format!("side {} has inconsistent orientation", labels[s]),
                    ))
                }
                (Some(x), None) => {
                    inn[b.0][b.1] = Some(!x);
                    changed = true;
                }
                (None, Some(y)) => {
                    inn[a.0][a.1] = Some(!y);
                    changed = true;
                }
                _ => {}
            }
        }
        for v in inn.iter_mut() {
            match (v[1], v[3]) {
                (Some(x), None) => {
                    v[3] = Some(!x);
                    changed = true;
                }
                (None, Some(y)) => {
                    v[1] = Some(!y);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }

    // components via strand continuity
    let mut comp = Dsu::new(ns);
    for x in &slot {
        comp.union(x[0], x[2]);
        comp.union(x[1], x[3]);
    }
    let mut comp_id = BTreeMap::new();
    let side_component: Vec<usize> = (0..ns)
        .map(|s| {
            let r = comp.find(s);
            let k = comp_id.len();
            *comp_id.entry(r).or_insert(k)
        })
        .collect();
    let n_components = comp_id.len();
    let mut has_over = vec![false; n_components];
    let mut has_under = vec![false; n_components];
    for j in 0..n {
        has_under[side_component[slot[j][0]]] = true;
        has_over[side_component[slot[j][1]]] = true;
    }
    for k in 0..n_components {
        if !has_over[k] || !has_under[k] {
            let reason = if has_over[k] {
                "only over-crossings"
            } else {
                "only under-crossings"
            };
            return Err(DiagramError::TrivialComponent {
                component: k,
                reason: reason.into(),
            });
        }
    }
    for (j, v) in inn.iter().enumerate() {
        if v.iter().any(|o| o.is_none()) {
            return Err(malformed(Some(j), "could not orient over-strand"));
        }
    }
    let is_in = |e: End| inn[e.0][e.1].unwrap();
    if (0..n).any(|j| is_in((j, 1)) == is_in((j, 3))) {
        return Err(malformed(None, "over-strand orientation inconsistent"));
    }

    let side_ends: Vec<[End; 2]> = (0..ns)
        .map(|s| {
            let [a, b] = [ends[s][0], ends[s][1]];
            if is_in(a) {
                [b, a]
            } else {
                [a, b]
            }
        })
        .collect();

    // faces
    let mut corner_region = vec![[usize::MAX; 4]; n];
    let mut regions = Vec::new();
    for j in 0..n {
        for i in 0..4 {
            if corner_region[j][i] != usize::MAX {
                continue;
            }
            let rid = regions.len();
            let mut reg = Region {
                corners: Vec::new(),
                sides: Vec::new(),
            };
            let mut cur = (j, i);
            while corner_region[cur.0][cur.1] == usize::MAX {
                corner_region[cur.0][cur.1] = rid;
                reg.corners.push(cur);
                let leave = (cur.0, (cur.1 + 1) % 4);
                reg.sides.push(slot[leave.0][leave.1]);
                cur = other(leave);
            }
            if cur != (j, i) {
                return Err(DiagramError::NonPlanar { euler: i64::MIN });
            }
            regions.push(reg);
        }
    }
    let euler = n as i64 - ns as i64 + regions.len() as i64;
    if euler != 2 {
        return Err(DiagramError::NonPlanar { euler });
    }

    // arcs: glue the two over-sides at every crossing
    let mut arcs_dsu = Dsu::new(ns);
    for x in &slot {
        arcs_dsu.union(x[1], x[3]);
    }
    let mut arcs: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for s in 0..ns {
        arcs.entry(arcs_dsu.find(s)).or_default().push(s);
    }
    // Dsu roots are minimal members, so BTreeMap order = smallest-label order.
    let arcs: Vec<Vec<usize>> = arcs.into_values().collect();
    let mut side_arc = vec![0; ns];
    for (a, m) in arcs.iter().enumerate() {
        for &s in m {
            side_arc[s] = a;
        }
    }

    let mut side_left = vec![0; ns];
    let mut side_right = vec![0; ns];
    for s in 0..ns {
        let (j, i) = side_ends[s][0];
        side_left[s] = corner_region[j][i];
        side_right[s] = corner_region[j][(i + 3) % 4];
    }

    let crossings = (0..n)
        .map(|j| {
            let sign: i8 = if is_in((j, 3)) { 1 } else { -1 };
            let e = if sign > 0 { 1 } else { 3 };
            let frame = [e, (e + 1) % 4, (e + 2) % 4, (e + 3) % 4];
            Crossing {
                sign,
                frame,
                quad_sides: frame.map(|p| slot[j][p]),
                quad_regions: frame.map(|p| corner_region[j][p]),
                over_arc: side_arc[slot[j][1]],
                under_in_arc: side_arc[slot[j][0]],
                under_out_arc: side_arc[slot[j][2]],
            }
        })
        .collect();

    Ok(LinkDiagram {
        pd: pd.clone(),
        labels,
        side_ends,
        slot,
        crossings,
        arcs,
        side_arc,
        regions,
        corner_region,
        side_left,
        side_right,
        side_component,
        n_components,
    })
}

/// Faces of the diagram's 4-valent graph.
pub fn compute_regions(pd: &PdCode) -> Result<Vec<Region>, DiagramError> {
    Ok(build_diagram(pd)?.regions)
}

/// Compare computed crossing signs against a user-provided hint.
pub fn check_sign_hint(d: &LinkDiagram, hint: &[i8]) -> Result<(), DiagramError> {
    if hint.len() != d.n_crossings() {
        return Err(malformed(
            None,
            format!(
                "signs_hint has {} entries for {} crossings",
                hint.len(),
                d.n_crossings()
            ),
        ));
    }
    for (j, (&h, c)) in hint.iter().zip(&d.crossings).enumerate() {
        if h != c.sign {
            return Err(DiagramError::SignHintMismatch {
                crossing: j,
                hint: h,
                computed: c.sign,
            });
        }
    }
    Ok(())
}

/// Mirror image: reflect the plane. Reversing each cyclic order and restarting
/// at the incoming under-strand keeps the PD convention.
pub fn mirror_pd(pd: &PdCode) -> PdCode {
    PdCode {
        crossings: pd.crossings.iter().map(|&[a, b, c, d]| [a, d, c, b]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_pd("[]"), Err(DiagramError::MalformedPd { .. })));
        assert!(matches!(
            parse_pd("[[1,1,2,1],[2,3,3,4]]"),
            Err(DiagramError::MalformedPd { .. })
        ));
        assert!(matches!(
            parse_pd("[[1,2,3]]"),
            Err(DiagramError::MalformedPd { crossing: Some(0), .. })
        ));
        let pd = parse_pd(r#"{"pd": [[4,7,5,8],[8,3,1,4],[2,6,3,5],[6,2,7,1]]}"#).unwrap();
        assert_eq!(pd.crossings.len(), 4);
    }

    #[test]
    fn figure_eight_counts() {
        let d = build_diagram(&fixtures::figure_eight_pd()).unwrap();
        assert_eq!((d.n_crossings(), d.n_sides(), d.n_arcs(), d.n_regions()), (4, 8, 4, 6));
        let mut signs: Vec<i8> = d.crossings.iter().map(crossing_sign).collect();
        signs.sort();
        assert_eq!(signs, vec![-1, -1, 1, 1]);
    }

    #[test]
    fn trefoil_counts() {
        let d = build_diagram(&fixtures::trefoil_pd()).unwrap();
        assert_eq!((d.n_crossings(), d.n_sides(), d.n_arcs(), d.n_regions()), (4, 8, 4, 6));
        let signs: Vec<i8> = d.crossings.iter().map(crossing_sign).collect();
        // three positive crossings of a right-handed trefoil plus a negative kink
        assert_eq!(signs, vec![1, 1, 1, -1]);
        let writhe: i32 = signs.iter().map(|&s| s as i32).sum();
        assert_eq!(writhe, 2);
    }

    #[test]
    fn arcs_follow_over_strands() {
        let d = build_diagram(&fixtures::figure_eight_pd()).unwrap();
        let arc_labels: Vec<Vec<i64>> = d
            .arcs
            .iter()
            .map(|a| a.iter().map(|&s| d.labels[s]).collect())
            .collect();
        assert_eq!(arc_labels, vec![vec![1, 2], vec![3, 4], vec![5, 6], vec![7, 8]]);
        let d = build_diagram(&fixtures::trefoil_pd()).unwrap();
        let arc_labels: Vec<Vec<i64>> = d
            .arcs
            .iter()
            .map(|a| a.iter().map(|&s| d.labels[s]).collect())
            .collect();
        assert_eq!(arc_labels, vec![vec![1, 8], vec![2, 3], vec![4, 5], vec![6, 7]]);
    }

    #[test]
    fn crossingless_unknot_is_trivial() {
        let pd = PdCode { crossings: vec![] };
        assert!(matches!(build_diagram(&pd), Err(DiagramError::TrivialComponent { .. })));
    }

    #[test]
    fn unknot_loop_is_trivial() {
        // a lone kink is a component with one crossing that is both over and under,
        // so use a two-component split-free diagram where one strand is always over
        let pd = PdCode::new(vec![[1, 3, 2, 4], [2, 4, 1, 3]]).unwrap();
        assert!(matches!(build_diagram(&pd), Err(DiagramError::TrivialComponent { .. })));
    }

    #[test]
    fn kink_makes_monogon() {
        let d = build_diagram(&fixtures::trefoil_pd()).unwrap();
        assert!(d.regions.iter().any(|r| r.sides.len() == 1));
        // a single positive kink on a trefoil strand as well
        let pd = PdCode::new(vec![[1, 5, 2, 4], [5, 3, 6, 2], [3, 1, 4, 8], [7, 7, 8, 6]]).unwrap();
        let d = build_diagram(&pd).unwrap();
        assert_eq!(d.crossings[3].sign, 1);
        assert!(d.regions.iter().any(|r| r.sides.len() == 1));
    }

    #[test]
    fn mirror_negates_signs() {
        for pd in [fixtures::figure_eight_pd(), fixtures::trefoil_pd()] {
            let d = build_diagram(&pd).unwrap();
            let m = build_diagram(&mirror_pd(&pd)).unwrap();
            for (a, b) in d.crossings.iter().zip(&m.crossings) {
                assert_eq!(a.sign, -b.sign);
            }
        }
    }

    #[test]
    fn sides_border_two_faces_and_quadrants_match() {
        for pd in [fixtures::figure_eight_pd(), fixtures::trefoil_pd()] {
            let d = build_diagram(&pd).unwrap();
            let mut count = vec![0; d.n_sides()];
            for r in &d.regions {
                for &s in &r.sides {
                    count[s] += 1;
                }
            }
            assert!(count.iter().all(|&k| k == 2));
            for (j, x) in d.crossings.iter().enumerate() {
                let mut q = x.quad_regions.to_vec();
                let mut all: Vec<usize> = d.corner_region[j].to_vec();
                q.sort();
                all.sort();
                assert_eq!(q, all);
            }
        }
    }

    #[test]
    fn sign_hint() {
        let d = build_diagram(&fixtures::trefoil_pd()).unwrap();
        assert!(check_sign_hint(&d, &[1, 1, 1, -1]).is_ok());
        assert!(matches!(
            check_sign_hint(&d, &[1, 1, 1, 1]),
            Err(DiagramError::SignHintMismatch { crossing: 3, .. })
        ));
    }
}
