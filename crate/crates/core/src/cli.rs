//! `cvol` command line: JSON job in, JSON report out.
//!
//! Exit codes: 0 success, 1 validation failure, 2 numerical gate failure.

use crate::coloring::{
    check_arc_coloring, check_genericity, check_region_coloring, find_base_point, find_region_coloring,
    propagate_regions, ColoringError, GenericityReport, ShadowColoring, TOL_SEP,
};
use crate::diagram::{build_diagram, check_sign_hint, pd_from_value, DiagramError, LinkDiagram};
use crate::fixtures;
use crate::potential::{
    build_potential, build_simplified, check_h, eval_v0, mod_pi2_distance, r_values, side_condition_margin, HResidual,
    PotentialError,
};
use crate::quandle::{ParabolicVector, C64};
use crate::solution::{construct_solution, extract_complex_volume, DegenerateW, SolutionError};
use crate::triangulation::{
    build_degenerate_tetrahedra, cross_check, plain_cross_ratio, CrossCheck, TriangulationError,
};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;
use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-9;
/// Agreement of values taken mod π².
pub const TOL_MOD_PI2: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArcColors {
    /// In arc order (arcs numbered by their smallest side label).
    List(Vec<ParabolicVector>),
    /// Keyed by the label of any side on the arc.
    BySide(BTreeMap<String, ParabolicVector>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSeed {
    /// The seeded region lies on the right of this side.
    pub right_of_side: i64,
    pub color: ParabolicVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    /// Kept raw so arity/label errors are reported by the diagram parser.
    pub pd: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs_hint: Option<Vec<i8>>,
    pub arc_colors: ArcColors,
    /// Full region coloring, in diagram region order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region_colors: Option<Vec<ParabolicVector>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region_seed: Option<RegionSeed>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<ParabolicVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub cross_check: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub debug_degenerate: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error("invalid job: {0}")]
    InvalidJob(String),
    #[error("unknown example {0:?} (expected fig8_minus, fig8_plus or trefoil)")]
    UnknownExample(String),
    #[error("i/o: {0}")]
    Io(String),
}

fn variant_name(dbg: String) -> String {
    dbg.chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect()
}

impl CliError {
    pub fn kind(&self) -> String {
        match self {
            CliError::Diagram(e) => variant_name(format!("{e:?}")),
            CliError::Coloring(e) => variant_name(format!("{e:?}")),
            CliError::Solution(e) => variant_name(format!("{e:?}")),
            CliError::Potential(e) => variant_name(format!("{e:?}")),
            CliError::Triangulation(e) => variant_name(format!("{e:?}")),
            CliError::InvalidJob(_) => "InvalidJob".into(),
            CliError::UnknownExample(_) => "UnknownExample".into(),
            CliError::Io(_) => "Io".into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Potential(_) | CliError::Triangulation(_) => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "ok": false, "error": { "kind": self.kind(), "message": self.to_string() } })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Options {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub cross_check: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagramSummary {
    pub n_crossings: usize,
    pub n_sides: usize,
    pub n_arcs: usize,
    pub n_regions: usize,
    pub n_components: usize,
    pub signs: Vec<i8>,
    /// `ε_j` in `a_l * a_k = ε_j a_f`.
    pub relation_signs: Vec<i8>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Simplification {
    pub n_classes: usize,
    pub n_li2_terms: usize,
    pub v0: C64,
    pub distance_to_v0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeBlock {
    pub vol: f64,
    pub cs_mod_pi2: f64,
    pub v0: C64,
    pub degenerate_crossings: Vec<usize>,
    pub n_li2_terms: usize,
    pub z: Vec<C64>,
    pub w: Vec<DegenerateW>,
    pub h_residual: HResidual,
    pub side_condition_margin: f64,
    pub degenerate_spread: f64,
    pub simplified: Simplification,
    /// `r_k` on the simplified potential.
    pub r_values: Option<Vec<f64>>,
    pub r_sum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheckBlock {
    #[serde(flatten)]
    pub summary: CrossCheck,
    pub distance_to_v0: f64,
    /// Largest cross-ratio mismatch between canceling pairs of collapsed octahedra.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate_cancellation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub ok: bool,
    pub tol: f64,
    pub seed: u64,
    pub region_source: &'static str,
    pub diagram: DiagramSummary,
    pub coloring: ShadowColoring,
    pub genericity: GenericityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume: Option<VolumeBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheckBlock>,
    pub gates: BTreeMap<&'static str, bool>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.ok {
            0
        } else if !self.gates.get("genericity").copied().unwrap_or(true) {
            1
        } else {
            2
        }
    }
}

fn resolve_arcs(d: &LinkDiagram, arcs: &ArcColors) -> Result<Vec<ParabolicVector>, CliError> {
    match arcs {
        ArcColors::List(v) => Ok(v.clone()),
        ArcColors::BySide(m) => {
            let mut out: Vec<Option<ParabolicVector>> = vec![None; d.n_arcs()];
            for (key, color) in m {
                let label: i64 = key
                    .trim()
                    .parse()
                    .map_err(|_| CliError::InvalidJob(format!("bad side label {key:?}")))?;
                let side = d
                    .side_of_label(label)
                    .ok_or_else(|| CliError::InvalidJob(format!("no side labelled {label}")))?;
                let arc = d.side_arc[side];
                if let Some(prev) = out[arc] {
                    if !crate::quandle::eq_up_to_sign(&prev, color, crate::quandle::TOL_EQ) {
                        return Err(CliError::InvalidJob(format!(
                            "conflicting colors given for the arc of side {label}"
                        )));
                    }
                }
                out[arc] = Some(*color);
            }
            out.into_iter()
                .enumerate()
                .map(|(a, c)| {
                    c.ok_or_else(|| {
                        let l = d.labels[d.arcs[a][0]];
                        CliError::InvalidJob(format!("no color for the arc through side {l}"))
                    })
                })
                .collect()
        }
    }
}

struct Prepared {
    d: LinkDiagram,
    s: ShadowColoring,
    relation_signs: Vec<i8>,
    region_source: &'static str,
    seed: u64,
    tol: f64,
}

fn prepare(job: &JobSpec, opts: &Options) -> Result<Prepared, CliError> {
    let seed = opts.seed.or(job.seed).unwrap_or(0);
    let tol = opts.tol.or(job.tol).unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::InvalidJob(format!("tolerance must be positive, got {tol}")));
    }
    let d = build_diagram(&pd_from_value(&job.pd)?)?;
    if let Some(h) = &job.signs_hint {
        check_sign_hint(&d, h)?;
    }
    let arcs = resolve_arcs(&d, &job.arc_colors)?;
    let relation_signs = check_arc_coloring(&d, &arcs)?;
    let (regions, region_source) = match (&job.region_colors, &job.region_seed) {
        (Some(_), Some(_)) => {
            return Err(CliError::InvalidJob(
                "give region_colors or region_seed, not both".into(),
            ));
        }
        (Some(r), None) => {
            check_region_coloring(&d, &arcs, r)?;
            (Some(r.clone()), "given")
        }
        (None, Some(rs)) => {
            let side = d
                .side_of_label(rs.right_of_side)
                .ok_or_else(|| CliError::InvalidJob(format!("no side labelled {}", rs.right_of_side)))?;
            (
                Some(propagate_regions(&d, &arcs, d.side_right[side], rs.color)?),
                "seeded",
            )
        }
        (None, None) => (None, "search"),
    };
    let s = match (regions, job.p) {
        (Some(r), Some(p)) => ShadowColoring {
            arc_colors: arcs,
            region_colors: r,
            p,
        },
        (Some(r), None) => {
            let p = find_base_point(&d, &arcs, &r, seed)?;
            ShadowColoring {
                arc_colors: arcs,
                region_colors: r,
                p,
            }
        }
        (None, p) => {
            let mut s = find_region_coloring(&d, &arcs, seed)?;
            if let Some(p) = p {
                s.p = p;
            }
            s
        }
    };
    Ok(Prepared {
        d,
        s,
        relation_signs,
        region_source,
        seed,
        tol,
    })
}

fn base_report(command: &'static str, pr: &Prepared) -> Report {
    let d = &pr.d;
    Report {
        command,
        ok: false,
        tol: pr.tol,
        seed: pr.seed,
        region_source: pr.region_source,
        diagram: DiagramSummary {
            n_crossings: d.n_crossings(),
            n_sides: d.n_sides(),
            n_arcs: d.n_arcs(),
            n_regions: d.n_regions(),
            n_components: d.n_components,
            signs: d.crossings.iter().map(|c| c.sign).collect(),
            relation_signs: pr.relation_signs.clone(),
        },
        coloring: pr.s.clone(),
        genericity: check_genericity(d, &pr.s, TOL_SEP),
        volume: None,
        cross_check: None,
        gates: BTreeMap::new(),
    }
}

/// Diagram and coloring validation only.
pub fn cmd_check(job: &JobSpec, opts: &Options) -> Result<Report, CliError> {
    let pr = prepare(job, opts)?;
    let mut rep = base_report("check", &pr);
    rep.gates.insert("genericity", rep.genericity.ok);
    rep.ok = rep.genericity.ok;
    Ok(rep)
}

/// The full pipeline: diagram, coloring, constructed solution, `V₀`, and the
/// checks around it.
pub fn cmd_volume(job: &JobSpec, opts: &Options) -> Result<Report, CliError> {
    let pr = prepare(job, opts)?;
    let mut rep = base_report("volume", &pr);
    rep.gates.insert("genericity", rep.genericity.ok);
    if !rep.genericity.ok {
        return Ok(rep);
    }
    let (d, s, tol) = (&pr.d, &pr.s, pr.tol);
    let pf = build_potential(d, s);
    let sol = construct_solution(d, s)?;
    let asg = sol.to_assignment();
    let v0 = eval_v0(&pf, &asg)?;
    let cv = extract_complex_volume(v0);
    let h = check_h(&pf, &asg)?;
    let simp = build_simplified(&pf, &asg);
    let v0_hat = eval_v0(&simp.pf, &simp.asg)?;
    let rs = r_values(&simp.pf, &simp.asg, tol);
    let (r_values_out, r_sum, r_error, parity) = match rs {
        Ok(r) => {
            let re: Vec<f64> = r.iter().map(|x| x.re).collect();
            let sum: f64 = re.iter().sum();
            let even = re.iter().all(|x| (x / 2.0 - (x / 2.0).round()).abs() * 2.0 <= tol);
            (Some(re), Some(sum), None, even && sum.abs() <= tol)
        }
        Err(e) => (None, None, Some(e.to_string()), false),
    };
    let simplified = Simplification {
        n_classes: simp.pf.n_vars,
        n_li2_terms: simp.pf.n_li2_terms(),
        v0: v0_hat,
        distance_to_v0: mod_pi2_distance(v0_hat, v0),
    };
    rep.gates.insert("saddle", h.max() < tol);
    rep.gates.insert("parity", parity);
    rep.gates.insert("simplified", simplified.distance_to_v0 < TOL_MOD_PI2);

    if opts.cross_check || job.cross_check {
        let cc = cross_check(d, s, &sol)?;
        let distance_to_v0 = mod_pi2_distance(cc.lhat_sum, v0);
        let degenerate_cancellation = job.debug_degenerate.then(|| {
            let deg = build_degenerate_tetrahedra(d, s);
            deg.chunks(2)
                .map(|p| (plain_cross_ratio(&p[0]) - plain_cross_ratio(&p[1])).norm())
                .fold(0.0, f64::max)
        });
        rep.gates.insert(
            "cross_check",
            distance_to_v0 < TOL_MOD_PI2 && cc.max_ptolemy < tol && cc.max_gluing < tol && cc.max_shape < tol,
        );
        rep.cross_check = Some(CrossCheckBlock {
            summary: cc,
            distance_to_v0,
            degenerate_cancellation,
        });
    }

    rep.volume = Some(VolumeBlock {
        vol: cv.vol,
        cs_mod_pi2: cv.cs_mod_pi2,
        v0,
        degenerate_crossings: pf.w_crossings.clone(),
        n_li2_terms: pf.n_li2_terms(),
        side_condition_margin: side_condition_margin(&pf, &asg),
        degenerate_spread: sol.degenerate_spread(d),
        z: sol.z,
        w: sol.w,
        h_residual: h,
        simplified,
        r_values: r_values_out,
        r_sum,
        r_error,
    });
    rep.ok = rep.gates.values().all(|&g| g);
    Ok(rep)
}

fn by_side(pairs: &[(i64, ParabolicVector)]) -> ArcColors {
    ArcColors::BySide(pairs.iter().map(|&(l, c)| (l.to_string(), c)).collect())
}

/// The built-in worked examples, with colors as given in the worked examples.
pub fn cmd_examples(name: &str) -> Result<JobSpec, CliError> {
    let (pd, arcs, seed_color) = match name {
        "fig8_minus" | "fig8_plus" => {
            let t = fixtures::t_root(name == "fig8_minus");
            let a = fixtures::figure_eight_arcs_reference(t);
            let arcs = by_side(&[(1, a[0]), (3, a[1]), (5, a[2]), (7, a[3])]);
            (
                fixtures::figure_eight_pd(),
                arcs,
                fixtures::figure_eight_regions_reference(t)[5],
            )
        }
        "trefoil" => {
            let a = fixtures::trefoil_arcs_reference();
            let arcs = by_side(&[(2, a[0]), (4, a[1]), (6, a[2]), (8, a[3])]);
            (fixtures::trefoil_pd(), arcs, fixtures::trefoil_regions_reference()[4])
        }
        _ => return Err(CliError::UnknownExample(name.to_string())),
    };
    Ok(JobSpec {
        pd: serde_json::json!(pd.crossings),
        signs_hint: None,
        arc_colors: arcs,
        region_colors: None,
        region_seed: Some(RegionSeed {
            right_of_side: 1,
            color: seed_color,
        }),
        p: Some(fixtures::base_point()),
        seed: None,
        tol: None,
        cross_check: false,
        debug_degenerate: false,
    })
}

pub fn parse_job(text: &str) -> Result<JobSpec, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::InvalidJob(e.to_string()))
}

#[derive(Parser, Debug)]
#[command(
    name = "cvol",
    version,
    about = "Complex volume of a link from a quandle shadow-coloring"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for the region-coloring / base-point search.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Residual tolerance for the numerical gates [default: 1e-9].
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Also compute the triangulation sum and compare it with V₀.
    #[arg(long, global = true)]
    pub cross_check: bool,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    pub json_out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the full pipeline on a job file (`-` for stdin).
    Volume { file: PathBuf },
    /// Validate the diagram and coloring of a job file.
    Check { file: PathBuf },
    /// Print a built-in job: fig8_minus, fig8_plus or trefoil.
    Examples { name: String },
}

fn read_job(path: &PathBuf) -> Result<JobSpec, CliError> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    }
    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_job(&text)
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report is serializable") + "\n"
}

/// Run the command and return `(pretty JSON, exit code)`.
pub fn execute(cli: &Cli) -> (String, i32) {
    let opts = Options {
        seed: cli.seed,
        tol: cli.tol,
        cross_check: cli.cross_check,
    };
    let result = match &cli.command {
        Command::Examples { name } => cmd_examples(name).map(|j| (pretty(&j), 0)),
        Command::Volume { file } => read_job(file)
            .and_then(|j| cmd_volume(&j, &opts))
            .map(|r| (pretty(&r), r.exit_code())),
        Command::Check { file } => read_job(file)
            .and_then(|j| cmd_check(&j, &opts))
            .map(|r| (pretty(&r), r.exit_code())),
    };
    result.unwrap_or_else(|e| (pretty(&e.to_json()), e.exit_code()))
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (text, code) = execute(&cli);
    match &cli.json_out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("cvol: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{text}"),
    }
    code
}
