//! Octahedral triangulation of the link complement with quandle coordinates:
//! four signed tetrahedra per non-degenerate crossing, edge classes from the
//! face gluings, flattenings, and the sum `Σ σ·L̂` as an independent value of
//! the complex volume.
//!
//! Octahedron vertices: `E`, `F` (top and bottom of the central edge) and
//! `A, B, C, D`, which sit at the quadrant sides `e, f, g, h`.
//! Each tetrahedron is ordered `[E, F, X, Y]` with `X ∈ {A, C}`, `Y ∈ {B, D}`.

use crate::coloring::ShadowColoring;
use crate::diagram::LinkDiagram;
use crate::potential::{is_degenerate, li2, PI2};
use crate::quandle::{det2, hopf, hopf_distance, qop, ExtendedComplex, ParabolicVector, C64};
use crate::solution::ConstructedSolution;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use thiserror::Error;

/// Distinct Hopf images must be at least this far apart (chordal).
pub const TOL_HOPF: f64 = 1e-9;
pub const TOL_INTEGRAL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TriangulationError {
    #[error("degenerate tetrahedron {role:?} at crossing {crossing}: vertices {i} and {j} coincide")]
    DegenerateTetrahedron {
        crossing: usize,
        role: Role,
        i: usize,
        j: usize,
    },
    #[error("gluing mismatch in edge class {class}: |g| differs by {deviation:e}")]
    GluingMismatch { class: usize, deviation: f64 },
    #[error("flattening of tetrahedron {tet} not integral (p residual {p_res:e}, q residual {q_res:e})")]
    NotIntegral { tet: usize, p_res: f64, q_res: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Vertex {
    E,
    F,
    A,
    B,
    C,
    D,
}

/// The four production tetrahedra, then the four of a collapsed octahedron
/// (only built in debug mode).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Role {
    Efcd,
    Efad,
    Efab,
    Efcb,
    Facd,
    Eacd,
    Eacb,
    Facb,
}

impl Role {
    pub fn vertices(self) -> [Vertex; 4] {
        use Vertex::*;
        match self {
            Role::Efcd => [E, F, C, D],
            Role::Efad => [E, F, A, D],
            Role::Efab => [E, F, A, B],
            Role::Efcb => [E, F, C, B],
            Role::Facd => [F, A, C, D],
            Role::Eacd => [E, A, C, D],
            Role::Eacb => [E, A, C, B],
            Role::Facb => [F, A, C, B],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignedTetrahedron {
    pub sigma: i8,
    pub coords: [ParabolicVector; 4],
    pub crossing: usize,
    pub role: Role,
}

impl SignedTetrahedron {
    pub fn hopf_images(&self) -> [ExtendedComplex; 4] {
        self.coords.map(|a| hopf(&a))
    }

    /// Edge parameter `ĝ_kl = det(a_k, a_l)`.
    pub fn g_hat(&self, k: usize, l: usize) -> C64 {
        det2(&self.coords[k], &self.coords[l])
    }
}

/// Vertex pairs of a tetrahedron, in a fixed order.
pub const EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn edge_index(k: usize, l: usize) -> usize {
    let (k, l) = (k.min(l), k.max(l));
    EDGES.iter().position(|&e| e == (k, l)).unwrap()
}

fn check_distinct(t: &SignedTetrahedron) -> Result<(), TriangulationError> {
    for (i, j) in EDGES {
        if hopf_distance(&t.coords[i], &t.coords[j]) < TOL_HOPF {
            return Err(TriangulationError::DegenerateTetrahedron {
                crossing: t.crossing,
                role: t.role,
                i,
                j,
            });
        }
    }
    Ok(())
}

fn crossing_data(
    d: &LinkDiagram,
    s: &ShadowColoring,
    j: usize,
) -> (ParabolicVector, ParabolicVector, ParabolicVector, [ParabolicVector; 4]) {
    let x = &d.crossings[j];
    let ak = s.arc_colors[x.over_arc];
    let al = s.arc_colors[d.side_arc[x.h()]];
    let alk = qop(&al, &ak);
    let quad = x.quad_regions.map(|r| s.region_colors[r]);
    (al, ak, alk, quad)
}

/// Four tetrahedra per non-degenerate crossing; degenerate crossings are
/// dropped (their octahedra collapse and the gluing passes through them).
pub fn build_tetrahedra(d: &LinkDiagram, s: &ShadowColoring) -> Result<Vec<SignedTetrahedron>, TriangulationError> {
    let mut out = Vec::new();
    for j in 0..d.n_crossings() {
        if is_degenerate(d, s, j) {
            continue;
        }
        let p = s.p;
        let (al, ak, alk, [bottom, right, top, left]) = crossing_data(d, s, j);
        for (role, sigma, coords) in [
            (Role::Efcd, 1, [al, ak, top, p]),
            (Role::Efad, -1, [al, ak, left, p]),
            (Role::Efab, 1, [alk, ak, bottom, p]),
            (Role::Efcb, -1, [alk, ak, right, p]),
        ] {
            let t = SignedTetrahedron {
                sigma,
                coords,
                crossing: j,
                role,
            };
            check_distinct(&t)?;
            out.push(t);
        }
    }
    Ok(out)
}

/// The tetrahedra of collapsed octahedra at degenerate crossings. They cancel
/// in pairs and are never used in the volume.
pub fn build_degenerate_tetrahedra(d: &LinkDiagram, s: &ShadowColoring) -> Vec<SignedTetrahedron> {
    let mut out = Vec::new();
    for j in 0..d.n_crossings() {
        if !is_degenerate(d, s, j) {
            continue;
        }
        let p = s.p;
        let (al, ak, alk, [bottom, right, top, left]) = crossing_data(d, s, j);
        for (role, sigma, coords) in [
            (Role::Facd, -1, [ak, left, top, p]),
            (Role::Eacd, 1, [al, left, top, p]),
            (Role::Eacb, -1, [alk, bottom, right, p]),
            (Role::Facb, 1, [ak, bottom, right, p]),
        ] {
            out.push(SignedTetrahedron {
                sigma,
                coords,
                crossing: j,
                role,
            });
        }
    }
    out
}

/// The plain cross-ratio `ĝ₀₃ĝ₁₂ / (ĝ₀₂ĝ₁₃)`, before applying the sign.
pub fn plain_cross_ratio(t: &SignedTetrahedron) -> C64 {
    t.g_hat(0, 3) * t.g_hat(1, 2) / (t.g_hat(0, 2) * t.g_hat(1, 3))
}

/// Shape parameter `c^σ`, computed from determinants.
pub fn cross_ratio(t: &SignedTetrahedron) -> C64 {
    let c = plain_cross_ratio(t);
    if t.sigma > 0 {
        c
    } else {
        c.inv()
    }
}

/// `[v₀, v₁, v₂, v₃] = (v₃−v₀)/(v₂−v₀) · (v₂−v₁)/(v₃−v₁)` on the Hopf images;
/// factors through a vertex at ∞ drop out.
pub fn hopf_cross_ratio(v: [ExtendedComplex; 4]) -> C64 {
    let inf = v.iter().position(|x| x.is_infinite());
    let f = |i: usize| v[i].finite().unwrap_or_default();
    match inf {
        Some(0) => (f(2) - f(1)) / (f(3) - f(1)),
        Some(1) => (f(3) - f(0)) / (f(2) - f(0)),
        Some(2) => (f(3) - f(0)) / (f(3) - f(1)),
        Some(3) => (f(2) - f(1)) / (f(2) - f(0)),
        _ => (f(3) - f(0)) / (f(2) - f(0)) * (f(2) - f(1)) / (f(3) - f(1)),
    }
}

pub fn cross_ratio_hopf(t: &SignedTetrahedron) -> C64 {
    let c = hopf_cross_ratio(t.hopf_images());
    if t.sigma > 0 {
        c
    } else {
        c.inv()
    }
}

/// `|ĝ₀₂ĝ₁₃ − ĝ₀₁ĝ₂₃ − ĝ₀₃ĝ₁₂|`.
pub fn ptolemy_residual(t: &SignedTetrahedron) -> f64 {
    (t.g_hat(0, 2) * t.g_hat(1, 3) - t.g_hat(0, 1) * t.g_hat(2, 3) - t.g_hat(0, 3) * t.g_hat(1, 2)).norm()
}

/// Shape of the edge `(k, l)` as a function of the plain cross-ratio, raised to `σ`.
pub fn edge_shape(t: &SignedTetrahedron, k: usize, l: usize) -> C64 {
    let c = plain_cross_ratio(t);
    let one = C64::new(1.0, 0.0);
    let s = match (k.min(l), k.max(l)) {
        (0, 1) | (2, 3) => c,
        (0, 3) | (1, 2) => one / (one - c),
        _ => one - one / c,
    };
    if t.sigma > 0 {
        s
    } else {
        s.inv()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShapeReport {
    pub max_deviation: f64,
    /// `(crossing, role, shape of the horizontal edge, z-ratio)`.
    pub entries: Vec<(usize, Role, C64, C64)>,
}

/// The horizontal edge `XY` of each tetrahedron carries the z-ratio of its two
/// quadrant sides: `AB ↔ z_f/z_e`, `CB ↔ z_g/z_f`, `CD ↔ z_h/z_g`, `AD ↔ z_e/z_h`.
pub fn shape_consistency(d: &LinkDiagram, tets: &[SignedTetrahedron], sol: &ConstructedSolution) -> ShapeReport {
    let mut entries = Vec::new();
    let mut max_deviation: f64 = 0.0;
    for t in tets {
        let z = d.crossings[t.crossing].quad_sides.map(|k| sol.z[k]);
        let want = match t.role {
            Role::Efab => z[1] / z[0],
            Role::Efcb => z[2] / z[1],
            Role::Efcd => z[3] / z[2],
            Role::Efad => z[0] / z[3],
            _ => continue,
        };
        let got = edge_shape(t, 2, 3);
        max_deviation = max_deviation.max((got - want).norm());
        entries.push((t.crossing, t.role, got, want));
    }
    ShapeReport { max_deviation, entries }
}

/// A triangle of the octahedron boundary: `(crossing, vertex ∈ {A,B,C,D}, corner)`.
/// Each of the four side vertices meets two corners; each corner touches two
/// faces of the octahedron, one per side vertex.
pub type FaceSlot = (usize, usize, usize);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeClass {
    /// `(tetrahedron, vertex pair)`.
    pub members: Vec<(usize, (usize, usize))>,
    /// Long-edge value: `ĝ` of the first member.
    pub g: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeClasses {
    pub classes: Vec<EdgeClass>,
    /// Tetrahedron -> class of each edge in [`EDGES`] order.
    pub class_of: Vec<[usize; 6]>,
    /// Glued triangle pairs.
    pub face_pairs: Vec<(FaceSlot, FaceSlot)>,
    pub max_coincidence: f64,
}

impl EdgeClasses {
    pub fn g(&self, tet: usize, k: usize, l: usize) -> C64 {
        self.classes[self.class_of[tet][edge_index(k, l)]].g
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
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

fn role_of(x: Vertex, y: Vertex) -> Role {
    match (x, y) {
        (Vertex::C, Vertex::D) => Role::Efcd,
        (Vertex::A, Vertex::D) => Role::Efad,
        (Vertex::A, Vertex::B) => Role::Efab,
        (Vertex::C, Vertex::B) => Role::Efcb,
        _ => unreachable!("not a horizontal edge"),
    }
}

const SIDE_VERTICES: [Vertex; 4] = [Vertex::A, Vertex::B, Vertex::C, Vertex::D];

/// The triangle in slot `(j, V, corner)`: vertex `V`, its neighbor `N` across
/// that corner, and the apex `F` (for `A`, `C`) or `E` (for `B`, `D`).
/// Returns the tetrahedron role and which of `E`/`F` is the apex (0 or 1).
fn slot_triangle(d: &LinkDiagram, slot: FaceSlot) -> (Role, usize) {
    let (j, v, corner) = slot;
    let frame = d.crossings[j].frame;
    let n = if frame[v] == corner { (v + 1) % 4 } else { (v + 3) % 4 };
    let over = v % 2 == 0;
    let (x, y) = if over {
        (SIDE_VERTICES[v], SIDE_VERTICES[n])
    } else {
        (SIDE_VERTICES[n], SIDE_VERTICES[v])
    };
    (role_of(x, y), if over { 1 } else { 0 })
}

/// Edge classes of the glued triangulation. Inside an octahedron, edges with
/// the same end labels coincide, and additionally `EC ∼ EA` and `FD ∼ FB`.
/// Across each side, the triangles on its left and on its right are glued to
/// their counterparts at the side's other end, passing straight through
/// collapsed (degenerate) octahedra.
pub fn build_edge_classes(d: &LinkDiagram, tets: &[SignedTetrahedron]) -> Result<EdgeClasses, TriangulationError> {
    let nt = tets.len();
    let slot_id = |t: usize, e: usize| 6 * t + e;
    let mut dsu = Dsu((0..6 * nt).collect());

    let canon = |a: Vertex, b: Vertex| -> (Vertex, Vertex) {
        let key = if format!("{a:?}") <= format!("{b:?}") {
            (a, b)
        } else {
            (b, a)
        };
        match key {
            (Vertex::C, Vertex::E) => (Vertex::A, Vertex::E),
            (Vertex::D, Vertex::F) => (Vertex::B, Vertex::F),
            k => k,
        }
    };
    let mut first: HashMap<(usize, (Vertex, Vertex)), usize> = HashMap::new();
    let mut tet_of: HashMap<(usize, Role), usize> = HashMap::new();
    for (ti, t) in tets.iter().enumerate() {
        tet_of.insert((t.crossing, t.role), ti);
        let vs = t.role.vertices();
        for (ei, &(k, l)) in EDGES.iter().enumerate() {
            let key = (t.crossing, canon(vs[k], vs[l]));
            let id = slot_id(ti, ei);
            match first.get(&key) {
                Some(&f) => dsu.union(f, id),
                None => {
                    first.insert(key, id);
                }
            }
        }
    }

    let live = |j: usize| tet_of.contains_key(&(j, Role::Efcd));
    let quad = |j: usize, pos: usize| d.crossings[j].frame.iter().position(|&p| p == pos).unwrap();

    // the triangles on either side of each side end
    let mut partner: HashMap<FaceSlot, FaceSlot> = HashMap::new();
    for [out, inn] in &d.side_ends {
        let lr = |(c, i): (usize, usize), is_out: bool| {
            let prev = (i + 3) % 4;
            if is_out {
                [(c, quad(c, i), i), (c, quad(c, i), prev)]
            } else {
                [(c, quad(c, i), prev), (c, quad(c, i), i)]
            }
        };
        let a = lr(*out, true);
        let b = lr(*inn, false);
        for k in 0..2 {
            partner.insert(a[k], b[k]);
            partner.insert(b[k], a[k]);
        }
    }
    let internal = |slot: FaceSlot| -> FaceSlot {
        let (j, v, corner) = slot;
        let frame = d.crossings[j].frame;
        if frame[v] == corner {
            (j, (v + 1) % 4, corner)
        } else {
            (j, (v + 3) % 4, corner)
        }
    };

    let tri_edges = |slot: FaceSlot| -> [usize; 3] {
        let (role, apex) = slot_triangle(d, slot);
        let ti = tet_of[&(slot.0, role)];
        [
            slot_id(ti, edge_index(2, 3)),
            slot_id(ti, edge_index(apex, 2)),
            slot_id(ti, edge_index(apex, 3)),
        ]
    };

    let mut slots: Vec<FaceSlot> = partner.keys().copied().filter(|s| live(s.0)).collect();
    slots.sort_unstable();
    let mut done = std::collections::HashSet::new();
    let mut face_pairs = Vec::new();
    for s in slots {
        if done.contains(&s) {
            continue;
        }
        let mut cur = partner[&s];
        let mut hops = 0;
        while !live(cur.0) {
            cur = partner[&internal(cur)];
            hops += 1;
            assert!(hops <= 4 * d.n_crossings(), "gluing chain does not terminate");
        }
        done.insert(s);
        done.insert(cur);
        face_pairs.push((s, cur));
        for (x, y) in tri_edges(s).into_iter().zip(tri_edges(cur)) {
            dsu.union(x, y);
        }
    }

    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut classes: Vec<EdgeClass> = Vec::new();
    let mut class_of = vec![[0usize; 6]; nt];
    for ti in 0..nt {
        for (ei, &(k, l)) in EDGES.iter().enumerate() {
            let r = dsu.find(slot_id(ti, ei));
            let ci = *index.entry(r).or_insert_with(|| {
                classes.push(EdgeClass {
                    members: Vec::new(),
                    g: tets[ti].g_hat(k, l),
                });
                classes.len() - 1
            });
            classes[ci].members.push((ti, (k, l)));
            class_of[ti][ei] = ci;
        }
    }

    let mut max_coincidence: f64 = 0.0;
    for (ci, cl) in classes.iter().enumerate() {
        let g0 = cl.g.norm();
        for &(ti, (k, l)) in &cl.members {
            let dev = (tets[ti].g_hat(k, l).norm() - g0).abs() / g0.max(1.0);
            max_coincidence = max_coincidence.max(dev);
            if dev > 1e-9 {
                return Err(TriangulationError::GluingMismatch {
                    class: ci,
                    deviation: dev,
                });
            }
        }
    }
    Ok(EdgeClasses {
        classes,
        class_of,
        face_pairs,
        max_coincidence,
    })
}

/// Product of the edge shapes around each class.
pub fn gluing_products(tets: &[SignedTetrahedron], classes: &EdgeClasses) -> Vec<C64> {
    classes
        .classes
        .iter()
        .map(|cl| {
            cl.members
                .iter()
                .map(|&(ti, (k, l))| edge_shape(&tets[ti], k, l))
                .product()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlattenedTetrahedron {
    /// Plain cross-ratio (the shape is `z^σ`).
    pub z: C64,
    pub p: i64,
    pub q: i64,
    pub sigma: i8,
    /// Distance of the raw (p, q) from the nearest integers.
    pub integral_residual: f64,
}

/// Flattening from the long-edge values:
/// `pπi = −log z + log g₀₃ + log g₁₂ − log g₀₂ − log g₁₃`,
/// `qπi = log(1−z) + log g₀₂ + log g₁₃ − log g₀₁ − log g₂₃`.
pub fn flatten(
    tets: &[SignedTetrahedron],
    ti: usize,
    classes: &EdgeClasses,
) -> Result<FlattenedTetrahedron, TriangulationError> {
    let t = &tets[ti];
    let z = plain_cross_ratio(t);
    let lg = |k, l| classes.g(ti, k, l).ln();
    let pi_i = C64::new(0.0, PI);
    let one = C64::new(1.0, 0.0);
    let pp = (-z.ln() + lg(0, 3) + lg(1, 2) - lg(0, 2) - lg(1, 3)) / pi_i;
    let qq = ((one - z).ln() + lg(0, 2) + lg(1, 3) - lg(0, 1) - lg(2, 3)) / pi_i;
    let (p, q) = (pp.re.round(), qq.re.round());
    let (p_res, q_res) = ((pp - p).norm(), (qq - q).norm());
    if p_res > TOL_INTEGRAL || q_res > TOL_INTEGRAL {
        return Err(TriangulationError::NotIntegral { tet: ti, p_res, q_res });
    }
    Ok(FlattenedTetrahedron {
        z,
        p: p as i64,
        q: q as i64,
        sigma: t.sigma,
        integral_residual: p_res.max(q_res),
    })
}

/// `L̂[z; p, q] = Li₂(z) + ½ log z log(1−z) + (πi/2)(q log z + p log(1−z)) − π²/6`.
pub fn lhat_raw(z: C64, p: i64, q: i64) -> C64 {
    let one = C64::new(1.0, 0.0);
    let (lz, l1z) = (z.ln(), (one - z).ln());
    li2(z) + 0.5 * lz * l1z + C64::new(0.0, PI / 2.0) * (q as f64 * lz + p as f64 * l1z) - PI2 / 6.0
}

pub fn lhat(f: &FlattenedTetrahedron) -> C64 {
    lhat_raw(f.z, f.p, f.q)
}

/// `Σ σ·L̂`.
pub fn total_complex_volume(flats: &[FlattenedTetrahedron]) -> C64 {
    flats.iter().map(|f| f.sigma as f64 * lhat(f)).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub n_tetrahedra: usize,
    pub n_edge_classes: usize,
    pub flats: Vec<FlattenedTetrahedron>,
    pub lhat_sum: C64,
    pub max_ptolemy: f64,
    pub max_gluing: f64,
    pub max_shape: f64,
    pub max_hopf_route: f64,
    pub max_coincidence: f64,
    pub max_integral: f64,
}

/// Build, glue, flatten and sum.
pub fn cross_check(
    d: &LinkDiagram,
    s: &ShadowColoring,
    sol: &ConstructedSolution,
) -> Result<CrossCheck, TriangulationError> {
    let tets = build_tetrahedra(d, s)?;
    let classes = build_edge_classes(d, &tets)?;
    let flats = (0..tets.len())
        .map(|ti| flatten(&tets, ti, &classes))
        .collect::<Result<Vec<_>, _>>()?;
    let one = C64::new(1.0, 0.0);
    let fold = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
    Ok(CrossCheck {
        n_tetrahedra: tets.len(),
        n_edge_classes: classes.classes.len(),
        lhat_sum: total_complex_volume(&flats),
        max_ptolemy: fold(&mut tets.iter().map(ptolemy_residual)),
        max_gluing: fold(&mut gluing_products(&tets, &classes).into_iter().map(|g| (g - one).norm())),
        max_shape: shape_consistency(d, &tets, sol).max_deviation,
        max_hopf_route: fold(&mut tets.iter().map(|t| (cross_ratio(t) - cross_ratio_hopf(t)).norm())),
        max_coincidence: classes.max_coincidence,
        max_integral: fold(&mut flats.iter().map(|f| f.integral_residual)),
        flats,
    })
}
