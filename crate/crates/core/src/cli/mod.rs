//! Problem-file surface: a line-oriented config format, the five
//! subcommands, and deterministic TSV output. All numbers print exactly —
//! rationals and p^(−v) radius strings, never decimals. The optional SVG
//! plot converts to floating point at render time only.

mod parse;
mod svg;

pub use parse::{parse_problem, ChartsQuery, ProblemFile, Query};

use crate::berkline::{convex_hull, BerkPoint};
use crate::charts::{
    g_eval, m_from_chart, radius_of_tuple, tuple_of_ball, OrderingG, RadiusOutcome,
};
use crate::roots::{flatten_multiset, pairwise_distance_multiset};
use crate::splitting::{
    self, fiber_poly, skeleton_with_extra, split_radius_at_point, split_radius_with_hints,
    verify_theorem, FiberPoint, SkeletonReport,
};
use crate::valfield::{mult_radius_string, Elem, ValQ};
use crate::{Error, Result};
use clap::{Parser, Subcommand};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "splitrad",
    version,
    about = "Exact splitting radii on the Berkovich line"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the splitting radius at the query points.
    Eval {
        file: PathBuf,
        /// Extra root-hint file merged into the problem's hints.
        #[arg(long)]
        hints: Option<PathBuf>,
    },
    /// Emit the candidate skeleton with its piecewise-linear data.
    Skeleton {
        file: PathBuf,
        /// Sampling cap per edge for the adaptive refinement.
        #[arg(long)]
        budget: Option<usize>,
        /// Write an SVG plot of val f along the skeleton edges.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        hints: Option<PathBuf>,
    },
    /// Verify fiber-constancy and piecewise linearity on the skeleton.
    Verify {
        file: PathBuf,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        hints: Option<PathBuf>,
    },
    /// Tuple/radius/size-conversion tables for the chart queries.
    Charts { file: PathBuf },
    /// Cross-check the cluster engine against the resultant oracle.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        hints: Option<PathBuf>,
    },
}

/// Entry point for the binary: parses std::env::args and returns the
/// process exit code.
pub fn run_main() -> i32 {
    let cli = Cli::parse();
    let (file, hints_path) = match &cli.cmd {
        Cmd::Eval { file, hints } => (file.clone(), hints.clone()),
        Cmd::Skeleton { file, hints, .. } => (file.clone(), hints.clone()),
        Cmd::Verify { file, hints, .. } => (file.clone(), hints.clone()),
        Cmd::Charts { file } => (file.clone(), None),
        Cmd::Oracle { file, hints } => (file.clone(), hints.clone()),
    };
    let text = match std::fs::read_to_string(&file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", file.display());
            return 2;
        }
    };
    let mut problem = match parse_problem(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Some(hp) = hints_path {
        let htext = match std::fs::read_to_string(&hp) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", hp.display());
                return 2;
            }
        };
        if let Err(e) = parse::merge_hints(&mut problem, &htext) {
            eprintln!("error: {e}");
            return 2;
        }
    }

    let out = match &cli.cmd {
        Cmd::Eval { .. } => cmd_eval(&problem),
        Cmd::Skeleton { budget, svg, .. } => cmd_skeleton(&problem, *budget, svg.as_deref()),
        Cmd::Verify { budget, .. } => cmd_verify(&problem, *budget),
        Cmd::Charts { .. } => cmd_charts(&problem),
        Cmd::Oracle { .. } => cmd_oracle(&problem),
    };
    match out {
        Ok(CmdOutput { text, failed }) => {
            print!("{text}");
            if failed {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse { .. } => 2,
                Error::UnresolvedCluster { .. } => 3,
                _ => 2,
            }
        }
    }
}

pub struct CmdOutput {
    pub text: String,
    pub failed: bool,
}

fn ok(text: String) -> Result<CmdOutput> {
    Ok(CmdOutput {
        text,
        failed: false,
    })
}

fn hint_for<'a>(problem: &'a ProblemFile, x: &Elem) -> Option<&'a [Elem]> {
    problem
        .hints
        .iter()
        .find(|(k, _)| k == x)
        .map(|(_, v)| v.as_slice())
}

fn named_query_err(e: Error, query: &str) -> Error {
    match e {
        Error::UnresolvedCluster { reason } => Error::UnresolvedCluster {
            reason: format!("query {query}: {reason}"),
        },
        other => other,
    }
}

pub fn cmd_eval(problem: &ProblemFile) -> Result<CmdOutput> {
    let p = problem.domain.p();
    let mut out = String::new();
    writeln!(out, "# point\tf\tval_f\twitness").unwrap();
    for q in &problem.queries {
        let Query::Eval(pt) = q else { continue };
        let sr = match pt {
            BerkPoint::TypeI(a) => split_radius_with_hints(
                &problem.map,
                &FiberPoint::Affine(a.clone()),
                hint_for(problem, a),
            ),
            _ => split_radius_at_point(&problem.map, pt),
        }
        .map_err(|e| named_query_err(e, &pt.to_string()))?;
        writeln!(
            out,
            "{pt}\t{}\t{}\t{}",
            mult_radius_string(p, sr.val),
            sr.val,
            sr.witness_kind()
        )
        .unwrap();
    }
    ok(out)
}

fn problem_tree(problem: &ProblemFile) -> Result<crate::berkline::FiniteTree> {
    match &problem.skeleton {
        Some(pts) => convex_hull(pts),
        None => skeleton_with_extra(&problem.map, &[]),
    }
}

fn render_report(rep: &SkeletonReport, out: &mut String) {
    for (i, v) in rep.tree.vertices.iter().enumerate() {
        writeln!(out, "vertex\t{i}\t{v}").unwrap();
    }
    for (i, e) in rep.tree.edges.iter().enumerate() {
        writeln!(out, "edge\t{i}\t{}\t{}\t{}", e.child, e.parent, e.center).unwrap();
    }
    for (i, er) in rep.edges.iter().enumerate() {
        for pc in &er.pieces {
            writeln!(
                out,
                "piece\t{i}\t{}\t{}\t{}\t{}",
                ValQ::Fin(pc.lo),
                ValQ::Fin(pc.hi),
                ValQ::Fin(pc.slope),
                ValQ::Fin(pc.value_lo)
            )
            .unwrap();
        }
    }
}

pub fn cmd_skeleton(
    problem: &ProblemFile,
    budget: Option<usize>,
    svg: Option<&std::path::Path>,
) -> Result<CmdOutput> {
    let tree = problem_tree(problem)?;
    let mut b = problem.budget;
    if let Some(n) = budget {
        b.edge_samples = n;
    }
    let rep = verify_theorem(&problem.map, &tree, b)?;
    let mut out = String::new();
    render_report(&rep, &mut out);
    if let Some(path) = svg {
        let doc = svg::render(&rep);
        std::fs::write(path, doc).map_err(|e| Error::invalid(format!("svg write: {e}")))?;
    }
    ok(out)
}

pub fn cmd_verify(problem: &ProblemFile, budget: Option<usize>) -> Result<CmdOutput> {
    let tree = problem_tree(problem)?;
    let mut b = problem.budget;
    if let Some(n) = budget {
        b.edge_samples = n;
    }
    let rep = verify_theorem(&problem.map, &tree, b)?;
    let mut out = String::new();
    render_report(&rep, &mut out);
    for s in &rep.constancy {
        writeln!(
            out,
            "constancy\t{}\t{}\t{}\t{}\t{}",
            s.point,
            s.image,
            s.val_at_point,
            s.val_at_image,
            if s.ok { "ok" } else { "FAIL" }
        )
        .unwrap();
    }
    writeln!(
        out,
        "conclusion\tpiecewise-linear\t{}",
        if rep.pl_ok { "PASS" } else { "FAIL" }
    )
    .unwrap();
    writeln!(
        out,
        "conclusion\tfiber-constancy\t{}",
        if rep.constancy_ok { "PASS" } else { "FAIL" }
    )
    .unwrap();
    Ok(CmdOutput {
        text: out,
        failed: !(rep.pl_ok && rep.constancy_ok),
    })
}

pub fn cmd_charts(problem: &ProblemFile) -> Result<CmdOutput> {
    let mut out = String::new();
    for q in &problem.queries {
        let Query::Charts(cq) = q else { continue };
        match cq {
            ChartsQuery::Tuple { a, rval } => {
                let t = tuple_of_ball(a, *rval)?;
                let back = match radius_of_tuple(a, &t)? {
                    RadiusOutcome::Radius(r) => ValQ::Fin(r).to_string(),
                    RadiusOutcome::InfinityNeighborhood => "inf-neighborhood".to_string(),
                };
                let size = g_eval(&OrderingG::Product, &t);
                writeln!(out, "tuple\t{a}\t{}\t{t}\t{back}\t{size}", ValQ::Fin(*rval)).unwrap();
            }
            ChartsQuery::Radius { a, tuple } => {
                let r = match radius_of_tuple(a, tuple)? {
                    RadiusOutcome::Radius(r) => ValQ::Fin(r).to_string(),
                    RadiusOutcome::InfinityNeighborhood => "inf-neighborhood".to_string(),
                };
                writeln!(out, "radius\t{a}\t{tuple}\t{r}").unwrap();
            }
            ChartsQuery::M { mpp, delta } => {
                let m = m_from_chart(*mpp, *delta);
                writeln!(out, "m\t{mpp}\t{}\t{m}", ValQ::Fin(*delta)).unwrap();
            }
        }
    }
    ok(out)
}

pub fn cmd_oracle(problem: &ProblemFile) -> Result<CmdOutput> {
    let mut out = String::new();
    writeln!(
        out,
        "# point\tengine_separations\toracle_separations\tmatch"
    )
    .unwrap();
    for q in &problem.queries {
        let Query::Oracle(x) = q else { continue };
        let qname = x.to_string();
        let fiber = fiber_poly(&problem.map, &FiberPoint::Affine(x.clone()));
        let fa = splitting::analyze_fiber(&problem.map, x, hint_for(problem, x))
            .map_err(|e| named_query_err(e, &qname))?;
        let mut engine: Vec<String> = vec![];
        let poss = fa.tree.positions();
        let fposs: Vec<_> = poss
            .iter()
            .filter(|p| fa.tree.label_of(**p) == splitting::LABEL_FIBER)
            .collect();
        for i in 0..fposs.len() {
            for j in i + 1..fposs.len() {
                let s = fa.tree.separation_w(*fposs[i], *fposs[j]);
                let wf = fa.tree.wrap_factor();
                engine.push(ValQ::Fin(s / wf).to_string());
                engine.push(ValQ::Fin(s / wf).to_string());
            }
        }
        engine.sort();
        let mut oracle: Vec<String> = if fiber.poly.degree().is_none_or(|d| d == 0) {
            vec![]
        } else {
            let sqfree = squarefree_over_closure(&fiber.poly)?;
            flatten_multiset(&pairwise_distance_multiset(&sqfree)?)
                .into_iter()
                .map(|v| ValQ::Fin(v).to_string())
                .collect()
        };
        oracle.sort();
        let matches = engine == oracle;
        writeln!(
            out,
            "{qname}\t[{}]\t[{}]\t{}",
            engine.join(","),
            oracle.join(","),
            if matches { "ok" } else { "MISMATCH" }
        )
        .unwrap();
    }
    ok(out)
}

fn squarefree_over_closure(f: &crate::valfield::poly::Poly) -> Result<crate::valfield::poly::Poly> {
    // product of the distinct-root parts; wraps would need p-th roots
    let parts = crate::valfield::poly::separable_parts(f)?;
    let mut acc = crate::valfield::poly::Poly::constant(f.domain().one());
    for part in parts {
        if part.depth > 0 {
            return Err(Error::unresolved(
                "inseparable fiber layer: the distance oracle needs a separable polynomial",
            ));
        }
        acc = acc.mul(&part.poly);
    }
    Ok(acc)
}
