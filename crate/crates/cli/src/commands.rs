use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use reebli::graph::{validate, Injectivity, ReebGraph};
use reebli::interleave::{
    classify_essential, labeled_distance_contour_with, Distance, DistanceOptions, Essential, Labeling, Search,
};
use reebli::intrinsic::{
    build_counterexample, contour_candidate_family, contour_midpoint_obstruction, cycle_bound, js_spreads,
    reeb_candidate_family, reeb_midpoint_obstruction, simple_cycles, CounterexampleKind, ObstructionReport,
    Verdict,
};
use reebli::io::{export_dot, ingest_contour_tree, ingest_merge_tree, perturb_ties, GraphDocument, ScalarGrid};
use reebli::merge::{merge_labeled_distance, MergeTree};
use reebli::par::{self, Mode};
use reebli::{smoothing::smooth_with, Rational};

use crate::{Cli, Command, DemoKind, DistKind, Family, InputFlags, TreeKind};

pub const EXIT_INFEASIBLE: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_SIZE_LIMIT: u8 = 3;

pub struct Outcome {
    text: String,
    json: Value,
    pub code: u8,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Self {
        Outcome { text, json, code: 0 }
    }

    pub fn print(&self, as_json: bool) {
        if as_json {
            println!("{}", serde_json::to_string_pretty(&self.json).unwrap());
        } else {
            print!("{}", self.text);
        }
    }
}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<reebli::Error>() {
        Some(e) if e.is_size_limit() => EXIT_SIZE_LIMIT,
        _ => EXIT_INVALID,
    }
}

impl InputFlags {
    fn mode(self) -> Mode {
        if self.sequential {
            Mode::Sequential
        } else {
            Mode::Parallel
        }
    }

    fn read(self, path: &Path) -> Result<(ReebGraph, Labeling)> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let doc = GraphDocument::parse(&text)?;
        let mut raw = doc.to_raw(self.allow_decimal)?;
        if self.perturb {
            raw = perturb_ties(&raw);
        }
        let graph = ReebGraph::from_raw(&raw, Injectivity::Strict).map_err(reebli::Error::from)?;
        Ok((graph, doc.labeling()?))
    }
}

fn emit(doc: &GraphDocument, output: Option<&Path>) -> Result<String> {
    let body = doc.to_json();
    match output {
        Some(p) => {
            fs::write(p, body + "\n").with_context(|| format!("writing {}", p.display()))?;
            Ok(format!("wrote {}\n", p.display()))
        }
        None => Ok(body + "\n"),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let flags = cli.input;
    match &cli.command {
        Command::Validate { file } => validate_file(flags, file),
        Command::Classify { file } => {
            let (g, _) = flags.read(file)?;
            let mut text = String::new();
            let mut rows = Vec::new();
            for v in g.nodes() {
                writeln!(text, "{}\t{}\t{}", g.name(v), g.value(v), g.classify(v))?;
                rows.push(json!({"id": g.name(v), "f": g.value(v).to_string(), "class": g.classify(v)}));
            }
            Ok(Outcome::ok(text, Value::Array(rows)))
        }
        Command::Smooth { epsilon, file, output } => {
            let (g, _) = flags.read(file)?;
            let sm = smooth_with(&g, *epsilon, flags.mode())?;
            let doc = GraphDocument::from_graph(sm.graph(), None);
            let text = emit(&doc, output.as_deref())?;
            Ok(Outcome::ok(text, serde_json::to_value(&doc)?))
        }
        Command::Dist { kind } => dist(flags, kind),
        Command::Essential { epsilon, file } => {
            let (g, _) = flags.read(file)?;
            let mut text = String::new();
            let mut rows = Vec::new();
            for v in g.nodes() {
                let class = classify_essential(&g, v, *epsilon)?;
                if class == Essential::NotApplicable {
                    continue;
                }
                let word = match class {
                    Essential::Essential => "essential".to_string(),
                    Essential::Inessential { short_loop, one_branch } => {
                        format!("inessential (short loop: {short_loop}, one branch: {one_branch})")
                    }
                    Essential::NotApplicable => unreachable!(),
                };
                writeln!(text, "{}\t{}\t{}\t{}", g.name(v), g.value(v), g.classify(v), word)?;
                rows.push(json!({"id": g.name(v), "class": g.classify(v), "essential": class}));
            }
            Ok(Outcome::ok(text, Value::Array(rows)))
        }
        Command::LoopHeight { file } => {
            let (g, _) = flags.read(file)?;
            let report = simple_cycles(&g, cycle_bound())?;
            let mut text = String::new();
            for c in &report.cycles {
                writeln!(
                    text,
                    "cycle of {} edges: bottom {} at {}, top {} at {}, height {}",
                    c.edges.len(),
                    g.name(c.bottom),
                    g.value(c.bottom),
                    g.name(c.top),
                    g.value(c.top),
                    c.height
                )?;
            }
            writeln!(text, "max loop height {}", report.max_height())?;
            let json = json!({"max_height": report.max_height(), "cycles": report.cycles});
            Ok(Outcome::ok(text, json))
        }
        Command::JsSpread { file } => {
            let (g, _) = flags.read(file)?;
            let report = js_spreads(&g)?;
            let mut text = String::new();
            for s in &report.structures {
                writeln!(text, "join at {}, split at {}, spread {}", s.join_value, s.split_value, s.spread)?;
            }
            match report.min_spread() {
                Some(m) => writeln!(text, "min spread {m}")?,
                None => writeln!(text, "no join-split structures")?,
            }
            Ok(Outcome::ok(text, serde_json::to_value(&report)?))
        }
        Command::Obstruct { kind, alpha, candidate } => {
            let (g, _) = flags.read(candidate)?;
            let report = match kind {
                Family::Reeb => reeb_midpoint_obstruction(*alpha, &g)?,
                Family::Contour => contour_midpoint_obstruction(*alpha, &g)?,
            };
            Ok(Outcome::ok(obstruction_text(&report), serde_json::to_value(&report)?))
        }
        Command::Demo { kind, alpha } => demo(flags, *kind, *alpha),
        Command::Ingest { kind, grid, output } => {
            let file = fs::File::open(grid).with_context(|| format!("reading {}", grid.display()))?;
            let grid = ScalarGrid::read_csv(file, flags.allow_decimal)?;
            let doc = match kind {
                TreeKind::Merge => {
                    let tree = ingest_merge_tree(&grid)?;
                    GraphDocument::from_graph(tree.graph(), Some(&Labeling::new(tree.leaves())))
                }
                TreeKind::Contour => {
                    let g = ingest_contour_tree(&grid)?;
                    GraphDocument::from_graph(&g, Some(&Labeling::new(g.leaves())))
                }
            };
            let text = emit(&doc, output.as_deref())?;
            Ok(Outcome::ok(text, serde_json::to_value(&doc)?))
        }
        Command::ExportDot { file, output } => {
            let (g, l) = flags.read(file)?;
            let dot = export_dot(&g, Some(&l));
            let text = match output {
                Some(p) => {
                    fs::write(p, &dot).with_context(|| format!("writing {}", p.display()))?;
                    format!("wrote {}\n", p.display())
                }
                None => dot.clone(),
            };
            Ok(Outcome::ok(text, json!({"dot": dot})))
        }
    }
}

fn validate_file(flags: InputFlags, file: &Path) -> Result<Outcome> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let doc = GraphDocument::parse(&text)?;
    let mut raw = doc.to_raw(flags.allow_decimal)?;
    if flags.perturb {
        raw = perturb_ties(&raw);
    }
    let report = validate(&raw);
    let mut out = Outcome::ok(format!("{report}\n"), serde_json::to_value(&report)?);
    if !report.is_valid() {
        out.code = EXIT_INVALID;
        return Ok(out);
    }
    let graph = ReebGraph::from_raw(&raw, Injectivity::Strict)?;
    doc.labeling()?.check_nodes(&graph)?;
    writeln!(
        out.text,
        "{} nodes, {} edges, first Betti number {}",
        graph.node_count(),
        graph.edge_count(),
        graph.betti_one()
    )?;
    Ok(out)
}

fn dist(flags: InputFlags, kind: &DistKind) -> Result<Outcome> {
    match kind {
        DistKind::Merge { t1, t2 } => {
            let (g1, l1) = flags.read(t1)?;
            let (g2, l2) = flags.read(t2)?;
            let d = merge_labeled_distance(&MergeTree::new(g1)?, &l1, &MergeTree::new(g2)?, &l2)?;
            Ok(Outcome::ok(format!("{d}\n"), json!({"distance": d})))
        }
        DistKind::Contour { t1, t2, events: _, bisect } => {
            let (g1, l1) = flags.read(t1)?;
            let (g2, l2) = flags.read(t2)?;
            let search = match bisect {
                Some(iterations) => Search::Bisect { iterations: *iterations },
                None => Search::Events,
            };
            let options = DistanceOptions { search, mode: flags.mode() };
            let result = labeled_distance_contour_with(&g1, &l1, &g2, &l2, &options)?;
            let mut text = format!("{}\n", result.distance);
            writeln!(text, "label lower bound {}", result.lower_bound)?;
            writeln!(text, "{} probes", result.probes.len())?;
            for d in &result.diagnostics {
                writeln!(text, "note: {}", serde_json::to_string(d)?)?;
            }
            if let Some((eps, w)) = &result.witness_below {
                writeln!(text, "infeasible at {eps}: {w}")?;
            }
            let json = json!({
                "distance": result.distance,
                "lower_bound": result.lower_bound,
                "diagnostics": result.diagnostics,
                "probes": result.probes.iter().map(|(e, ok)| json!([e, ok])).collect::<Vec<_>>(),
            });
            let mut out = Outcome::ok(text, json);
            if result.distance == Distance::Infinite {
                out.code = EXIT_INFEASIBLE;
            }
            Ok(out)
        }
    }
}

fn obstruction_text(r: &ObstructionReport) -> String {
    let mut text = format!("candidate: {}\n", r.candidate);
    for line in &r.trace {
        text.push_str("  ");
        text.push_str(line);
        text.push('\n');
    }
    let _ = writeln!(text, "verdict: {}", r.verdict);
    text
}

fn demo(flags: InputFlags, kind: DemoKind, alpha: Rational) -> Result<Outcome> {
    let eps = alpha / Rational::from(8);
    let d = alpha / Rational::from(4);
    let mut text = String::new();
    let (facts, family) = match kind {
        DemoKind::ReebCounterexample => {
            let lp = build_counterexample(CounterexampleKind::Loop, alpha, Rational::ZERO)?;
            let at = |t: Rational| -> Result<Rational> {
                let sm = smooth_with(&lp, t, flags.mode())?;
                Ok(reebli::intrinsic::max_loop_height(sm.graph())?)
            };
            let (h_eps, h_2d) = (at(eps)?, at(d + d)?);
            writeln!(text, "loop of height {alpha} and segment [0, {alpha}], claimed distance {d}")?;
            writeln!(text, "loop smoothed by {eps}: loop height {h_eps}")?;
            writeln!(text, "loop smoothed by {}: loop height {h_2d}", d + d)?;
            let family = reeb_candidate_family(alpha)?;
            let reports = par::map(flags.mode(), &family, |g| reeb_midpoint_obstruction(alpha, g));
            (json!({"loop_height_after_eps": h_eps, "loop_height_after_2d": h_2d}), reports)
        }
        DemoKind::ContourCounterexample => {
            let x = build_counterexample(CounterexampleKind::XTree, alpha, Rational::ZERO)?;
            let sm = smooth_with(&x, d, flags.mode())?;
            let spread = js_spreads(sm.graph())?.min_spread();
            writeln!(text, "X-shaped tree on [0, {alpha}] and segment, claimed distance {d}")?;
            match spread {
                Some(s) => writeln!(text, "X-tree smoothed by {d}: spread {s}")?,
                None => writeln!(text, "X-tree smoothed by {d}: no join-split structure")?,
            }
            let family = contour_candidate_family(alpha)?;
            let reports = par::map(flags.mode(), &family, |g| contour_midpoint_obstruction(alpha, g));
            (json!({"spread_after_smoothing": spread}), reports)
        }
    };
    let reports = family.into_iter().collect::<reebli::Result<Vec<_>>>()?;
    let hits = reports.iter().filter(|r| r.verdict == Verdict::Contradiction).count();
    writeln!(text, "{hits} of {} candidate midpoints are contradicted", reports.len())?;
    for r in reports.iter().filter(|r| r.verdict != Verdict::Contradiction) {
        writeln!(text, "  not contradicted: {}", r.candidate)?;
    }
    let json = json!({"facts": facts, "candidates": reports.len(), "contradictions": hits, "reports": reports});
    Ok(Outcome::ok(text, json))
}
