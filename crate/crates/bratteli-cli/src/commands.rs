use serde::Serialize;
use serde_json::{json, Value};

use bratteli::diagram::{classify, telescope};
use bratteli::hgraph::{build_graph, connectivity, crossing_numbers, export_dot, positively_strong};
use bratteli::infinitesimal::{
    chain_base, countable_family, epsilon_family, epsilon_vector, perron_pairing_check, propagate_check,
    independence_rank, Chain,
};
use bratteli::io::{to_pretty_json, DiagramFile, OrderFile};
use bratteli::ordering::{level_language, telescope_order, word};
use bratteli::skeleton::{skeleton_from_order, validate_correspondence};
use bratteli::synth::{
    check_balance, solve_decomposition, synthesize_order, synthesize_stationary, synthesize_target,
    synthesize_vertex_order, SynthesizedOrder, TargetFailure, WalkPolicy,
};
use bratteli::verify::{
    brute_force_orders, check_perfect_finite_rank, check_words_follow_graph, class_a_obstruction, CensusMode,
    CensusOptions, ObstructionVerdict, VerdictStatus,
};
use bratteli::BratteliDiagram;

use crate::input::{load, Inputs};
use crate::{envelope, Cli, Command, Common, InputError, Mode, Outcome, Policy};

fn to_value<T: Serialize>(x: &T) -> Result<Value, InputError> {
    Ok(serde_json::to_value(x)?)
}

pub fn run(cli: &Cli) -> Result<Outcome, InputError> {
    let inputs = load(&cli.common)?;
    let c = &cli.common;
    match &cli.command {
        Command::Validate => validate(&inputs, c),
        Command::Telescope { levels } => telescope_cmd(&inputs, levels),
        Command::Words { level, from, vertex } => words(&inputs, *level, *from, vertex.as_deref()),
        Command::Language { level, max_len } => language(&inputs, c, *level, *max_len),
        Command::Hgraph { level, target } => hgraph(&inputs, c, *level, target.as_deref()),
        Command::Balance { level, target } => balance(&inputs, *level, target.as_deref()),
        Command::Synthesize { policy, level, target } => {
            let policy = match policy {
                Policy::Greedy => WalkPolicy::Greedy,
                Policy::Guarded => WalkPolicy::Guarded,
            };
            match (level, target) {
                (Some(n), Some(u)) => synthesize_one(&inputs, policy, *n, u),
                _ => synthesize_all(&inputs, policy),
            }
        }
        Command::Verify => verify(&inputs, c),
        Command::Census { mode, fixed_mu, fixed_tau, no_necessity } => {
            census(&inputs, c, *mode, fixed_mu.as_deref(), fixed_tau.as_deref(), !no_necessity)
        }
        Command::Infinitesimal { level, offset, vertex, chains } => {
            infinitesimal(&inputs, *level, *offset, vertex.as_deref(), chains.as_deref())
        }
    }
}

fn diagram_summary(b: &BratteliDiagram) -> Value {
    json!({
        "depth": b.depth(),
        "vertex_counts": b.vertex_counts(),
        "stationary": b.is_stationary(),
    })
}

fn validate(inputs: &Inputs, c: &Common) -> Result<Outcome, InputError> {
    let b = &inputs.diagram;
    let check_depth = c.horizon.unwrap_or(b.depth().max(6));
    let mut report = json!({
        "name": inputs.name,
        "diagram": diagram_summary(b),
        "class": to_value(&classify(b, check_depth))?,
    });
    let mut ok = true;
    if let Some(omega) = &inputs.order {
        let mut o = json!({ "depth": omega.depth(), "stationary_from_2": omega.depth() >= 2 && omega.is_stationary_from(2) });
        match skeleton_from_order(b, omega) {
            Ok(ex) => o["extracted_skeleton_levels"] = json!(ex.levels),
            Err(e) => o["extracted_skeleton_error"] = json!(e.to_string()),
        }
        report["order"] = o;
    }
    if let Some((skel, sigma)) = &inputs.skeleton {
        let s = skel.validate(b);
        ok &= s.is_ok();
        report["skeleton"] = json!({
            "depth": skel.depth(),
            "valid": s.is_ok(),
            "error": s.err().map(|e| e.to_string()),
        });
        let cr = validate_correspondence(b, skel, sigma);
        ok &= cr.ok();
        report["correspondence"] = to_value(&cr)?;
        report["correspondence"]["ok"] = json!(cr.ok());
    }
    Ok(if ok { Outcome::new("OK", 0, report) } else { Outcome::new("INVALID", 1, report) })
}

fn telescope_cmd(inputs: &Inputs, levels: &[usize]) -> Result<Outcome, InputError> {
    let b = &inputs.diagram;
    let t = telescope(b, levels)?;
    let mut report = json!({
        "levels": t.levels,
        "diagram": to_value(&DiagramFile::from_diagram(&t.diagram))?,
    });
    if let Some(omega) = &inputs.order {
        let lo = telescope_order(b, omega, &t)?;
        report["order"] = to_value(&OrderFile::from_order(&t.diagram, &lo))?;
    }
    Ok(Outcome::new("OK", 0, report))
}

fn words(inputs: &Inputs, level: Option<usize>, from: Option<usize>, vertex: Option<&str>) -> Result<Outcome, InputError> {
    let b = &inputs.diagram;
    let omega = inputs.order()?;
    let n = level.unwrap_or(b.depth());
    b.check_level(n)?;
    let m = from.unwrap_or(n.saturating_sub(1));
    let vertices: Vec<usize> = match vertex {
        Some(v) => vec![inputs.vertex(n, v)?],
        None => (0..b.vertex_count(n)).collect(),
    };
    let mut entries = Vec::new();
    for v in vertices {
        let w = word(b, omega, n, v, m)?;
        entries.push(json!({
            "vertex": b.label(n, v),
            "length": w.len(),
            "word": b.word_string(m, &w),
        }));
    }
    Ok(Outcome::new("OK", 0, json!({ "level": n, "from": m, "words": entries })))
}

fn language(inputs: &Inputs, c: &Common, level: usize, max_len: usize) -> Result<Outcome, InputError> {
    let b = &inputs.diagram;
    let omega = inputs.order()?;
    let horizon = c.horizon.unwrap_or(b.depth());
    let lang = level_language(b, omega, level, horizon, max_len)?;
    let by_len: Vec<Value> = (1..=max_len)
        .map(|k| {
            let fs: Vec<String> = lang.of_length(k).map(|f| b.word_string(level, f)).collect();
            json!({ "length": k, "count": fs.len(), "factors": fs })
        })
        .collect();
    Ok(Outcome::new("OK", 0, json!({ "level": level, "horizon": horizon, "factors": by_len })))
}

fn hgraph(inputs: &Inputs, c: &Common, level: usize, target: Option<&str>) -> Result<Outcome, InputError> {
    let b = &inputs.diagram;
    let (skel, sigma) = inputs.skeleton()?;
    let graph = build_graph(b, skel, sigma, level)?;
    let conn = connectivity(&graph);
    let mut outcome = Outcome::new("OK", 0, Value::Null);
    let targets: Vec<usize> = if level + 1 > b.depth().min(skel.depth()) {
        Vec::new()
    } else {
        match target {
            Some(u) => vec![inputs.vertex(level + 1, u)?],
            None => (0..b.vertex_count(level + 1)).collect(),
        }
    };
    let mut per_target = Vec::new();
    for u in targets {
        let crossing = crossing_numbers(b, skel, &graph, u)?;
        let pc = positively_strong(&graph, &crossing);
        let witness = pc.witness.map(|(x, y)| {
            format!("no path from {} to {}", graph.cell_labels[x], graph.cell_labels[y])
        });
        if c.dot {
            outcome.files.push((format!("H{level}_u{u}.dot"), export_dot(&graph, Some(&crossing))));
        }
        per_target.push(json!({
            "target": b.label(level + 1, u),
            "crossing": crossing.counts,
            "terminal": graph.cell_labels[crossing.terminal],
            "start": graph.cell_labels[crossing.start],
            "positively_strong": pc.strongly_connected,
            "witness": witness,
        }));
    }
    if c.dot {
        outcome.files.push((format!("H{level}.dot"), export_dot(&graph, None)));
    }
    let edges: Vec<(String, String)> = graph
        .successors
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.iter().map(move |&j| (i, j)))
        .map(|(i, j)| (graph.cell_labels[i].clone(), graph.cell_labels[j].clone()))
        .collect();
    outcome.report = json!({
        "level": level,
        "cells": graph.cell_labels,
        "members": graph.partition.cells.iter().map(|cell| {
            cell.members.iter().map(|&w| b.label(level, w)).collect::<Vec<_>>()
        }).collect::<Vec<_>>(),
        "edges": edges,
        "strongly_connected": conn.strong,
        "weakly_connected": conn.weak,
        "targets": per_target,
    });
    Ok(outcome)
}

fn balance(inputs: &Inputs, level: usize, target: Option<&str>) -> Result<Outcome, InputError> {
    let b = &inputs.diagram;
    let (skel, sigma) = inputs.skeleton()?;
    b.check_level(level + 1)?;
    let targets: Vec<usize> = match target {
        Some(u) => vec![inputs.vertex(level + 1, u)?],
        None => (0..b.vertex_count(level + 1)).collect(),
    };
    let mut all_ok = true;
    let mut any_infeasible = false;
    let mut entries = Vec::new();
    for u in targets {
        let given = inputs.decomposition.as_ref().filter(|d| d.level == level && d.target == u);
        let entry = match given {
            Some(d) => {
                let r = check_balance(b, skel, sigma, level, u, d)?;
                all_ok &= r.pass();
                json!({ "target": b.label(level + 1, u), "source": "given", "pass": r.pass(), "check": to_value(&r)? })
            }
            None => match solve_decomposition(b, skel, sigma, level, u)? {
                Ok(d) => json!({ "target": b.label(level + 1, u), "source": "solved", "pass": true, "decomposition": to_value(&d)? }),
                Err(inf) => {
                    all_ok = false;
                    any_infeasible = true;
                    json!({ "target": b.label(level + 1, u), "source": "solved", "pass": false, "infeasible": to_value(&inf)? })
                }
            },
        };
        entries.push(entry);
    }
    let report = json!({ "level": level, "targets": entries });
    Ok(match (all_ok, any_infeasible) {
        (true, _) => Outcome::new("PASS", 0, report),
        (false, true) => Outcome::new("INFEASIBLE", 1, report),
        (false, false) => Outcome::new("FAIL", 1, report),
    })
}

fn run_value(b: &BratteliDiagram, r: &SynthesizedOrder) -> Value {
    json!({
        "level": r.level,
        "target": b.label(r.level, r.target),
        "word": b.word_string(r.level - 1, &r.word),
        "letters": r.word,
        "cell_visits": r.cell_visits,
        "trace": r.trace,
    })
}

fn trace_files(b: &BratteliDiagram, runs: &[SynthesizedOrder]) -> Vec<(String, String)> {
    runs.iter()
        .map(|r| (format!("trace_n{}_u{}.json", r.level - 1, r.target), to_pretty_json(&run_value(b, r)) + "\n"))
        .collect()
}

fn failures_outcome(b: &BratteliDiagram, failures: &[TargetFailure]) -> Result<Outcome, InputError> {
    let list: Vec<Value> = failures
        .iter()
        .map(|f| {
            Ok(json!({
                "level": f.level,
                "target": if f.level <= b.depth() { b.label(f.level, f.target) } else { f.target.to_string() },
                "message": f.failure.to_string(),
                "failure": to_value(&f.failure)?,
            }))
        })
        .collect::<Result<_, InputError>>()?;
    Ok(Outcome::new("FAILED", 1, json!({ "failures": list })))
}

fn synthesize_one(inputs: &Inputs, policy: WalkPolicy, n: usize, u: &str) -> Result<Outcome, InputError> {
    let b = &inputs.diagram;
    let (skel, sigma) = inputs.skeleton()?;
    let u = inputs.vertex(n + 1, u)?;
    let given = inputs.decomposition.as_ref().filter(|d| d.level == n && d.target == u);
    let result = match given {
        Some(d) => synthesize_vertex_order(b, skel, sigma, n, u, d, policy),
        None => synthesize_target(b, skel, sigma, n, u, policy),
    };
    match result {
        Ok(r) => {
            let mut out = Outcome::new("OK", 0, json!({ "run": run_value(b, &r), "decomposition": if given.is_some() { "given" } else { "solved" } }));
            out.files = trace_files(b, std::slice::from_ref(&r));
            Ok(out)
        }
        Err(failure) => failures_outcome(b, &[TargetFailure { level: n + 1, target: u, failure }]),
    }
}

fn synthesize_all(inputs: &Inputs, policy: WalkPolicy) -> Result<Outcome, InputError> {
    let b = &inputs.diagram;
    let (skel, sigma) = inputs.skeleton()?;
    let result = if b.is_stationary() {
        synthesize_stationary(b, skel, sigma, policy).map(|(_, s)| s)
    } else {
        synthesize_order(b, skel, sigma, policy)
    };
    match result {
        Ok(s) => {
            let order = OrderFile::from_order(b, &s.order);
            let mut out = Outcome::new(
                "OK",
                0,
                json!({
                    "order": to_value(&order)?,
                    "runs": s.runs.iter().map(|r| run_value(b, r)).collect::<Vec<_>>(),
                }),
            );
            out.files.push(("order.json".into(), to_pretty_json(&order) + "\n"));
            out.files.extend(trace_files(b, &s.runs));
            Ok(out)
        }
        Err(failures) => failures_outcome(b, &failures),
    }
}

fn verify(inputs: &Inputs, c: &Common) -> Result<Outcome, InputError> {
    let b = &inputs.diagram;
    let Some(omega) = &inputs.order else {
        let check_depth = c.depth.unwrap_or(b.depth());
        let r = class_a_obstruction(b, check_depth);
        let report = json!({ "obstruction": to_value(&r)? });
        return Ok(match r.verdict {
            ObstructionVerdict::NoPerfectOrder => Outcome::new("NO_PERFECT_ORDER", 1, report),
            ObstructionVerdict::NotBlocked => Outcome::new("NOT_BLOCKED", 0, report),
            ObstructionVerdict::NotApplicable => Outcome::new("NOT_APPLICABLE", 2, report),
        });
    };
    let horizon = c.horizon.unwrap_or(b.depth()).min(b.depth());
    let verdict = check_perfect_finite_rank(b, omega, horizon)?;
    let mut report = json!({ "verdict": to_value(&verdict)? });
    if let Some((skel, sigma)) = &inputs.skeleton {
        let top = horizon.min(skel.depth());
        let mut checks = Vec::new();
        for n in 1..top {
            if n > sigma.depth() {
                break;
            }
            checks.push(to_value(&check_words_follow_graph(b, omega, skel, sigma, n, horizon)?)?);
        }
        report["words_follow_graph"] = json!(checks);
    }
    Ok(match verdict.status {
        VerdictStatus::PerfectUpToDepth => Outcome::new("PERFECT_UP_TO_DEPTH", 0, report),
        VerdictStatus::NotPerfect => Outcome::new("NOT_PERFECT", 1, report),
        VerdictStatus::Inconclusive => Outcome::new("INCONCLUSIVE", 2, report),
    })
}

fn vertex_list(inputs: &Inputs, names: Option<&[String]>) -> Result<Option<Vec<usize>>, InputError> {
    let Some(names) = names else { return Ok(None) };
    let d = inputs.diagram.vertex_count(1);
    if names.len() != d {
        return Err(InputError(format!("expected {d} letters, got {}", names.len())));
    }
    names.iter().map(|s| inputs.vertex(1, s)).collect::<Result<Vec<_>, _>>().map(Some)
}

fn census(
    inputs: &Inputs,
    c: &Common,
    mode: Mode,
    fixed_mu: Option<&[String]>,
    fixed_tau: Option<&[String]>,
    necessity: bool,
) -> Result<Outcome, InputError> {
    let b = &inputs.diagram;
    let mode = match mode {
        Mode::Stationary => CensusMode::Stationary,
        Mode::PerLevel => CensusMode::PerLevel,
    };
    let mut options = CensusOptions::new(mode, c.budget);
    options.fixed_mu = vertex_list(inputs, fixed_mu)?;
    options.fixed_tau = vertex_list(inputs, fixed_tau)?;
    options.necessity = necessity;
    let census = brute_force_orders(b, &options)?;
    let mut lines = String::new();
    for e in &census.entries {
        let words: Vec<Vec<String>> = e
            .words
            .iter()
            .enumerate()
            .map(|(i, lv)| {
                let letters = if mode == CensusMode::Stationary { 1 } else { i };
                lv.iter().map(|w| b.word_string(letters, w)).collect()
            })
            .collect();
        let line = json!({
            "index": e.index,
            "words": words,
            "status": to_value(&e.verdict.status)?,
            "verdict": to_value(&e.verdict)?,
            "necessity": to_value(&e.necessity)?,
        });
        lines.push_str(&serde_json::to_string(&line)?);
        lines.push('\n');
    }
    let summary = json!({ "mode": to_value(&census.mode)?, "count": census.count.to_string(), "perfect": census.perfect });
    let env = envelope(c, "census", "OK", summary.clone());
    lines.push_str(&serde_json::to_string(&env)?);
    lines.push('\n');
    let mut out = Outcome::new("OK", 0, summary);
    out.files.push(("census.jsonl".into(), lines.clone()));
    out.stdout = Some(lines);
    Ok(out)
}

fn infinitesimal(
    inputs: &Inputs,
    n: usize,
    k: usize,
    vertex: Option<&str>,
    chains: Option<&[String]>,
) -> Result<Outcome, InputError> {
    let b = &inputs.diagram;
    let (skel, sigma) = inputs.skeleton()?;
    if let Some(chains) = chains {
        let mut parsed = Vec::new();
        for s in chains {
            let (lvl, v) = s
                .split_once(':')
                .ok_or_else(|| InputError(format!("chain {s:?} is not top_level:vertex")))?;
            let top_level: usize = lvl.parse()?;
            let top_vertex = inputs.vertex(top_level, v)?;
            let base_level = chain_base(skel, sigma, top_level, top_vertex)
                .ok_or_else(|| InputError(format!("chain {s:?} has no point-map base")))?;
            parsed.push(Chain { top_level, top_vertex, base_level });
        }
        let fam = countable_family(b, skel, sigma, &parsed)?;
        let agree = fam.vectors.iter().all(|v| v.formulas_agree);
        let report = json!({ "chains": to_value(&parsed)?, "family": to_value(&fam)?, "formulas_agree": agree });
        return Ok(if agree { Outcome::new("PASS", 0, report) } else { Outcome::new("FAIL", 1, report) });
    }
    let vectors = match vertex {
        Some(v) => vec![epsilon_vector(b, skel, sigma, n, inputs.vertex(n - 1, v)?, k)?],
        None => epsilon_family(b, skel, sigma, n, k)?,
    };
    let rank = independence_rank(&vectors.iter().map(|v| v.entries.clone()).collect::<Vec<_>>())?;
    let mut pass = vectors.iter().all(|v| v.formulas_agree);
    let mut per_vector = Vec::new();
    for v in &vectors {
        let mut entry = json!({
            "max_vertex": b.label(n - 1, v.max_vertex),
            "min_vertex": b.label(n - 1, v.min_vertex),
            "vector": to_value(v)?,
        });
        match propagate_check(b, skel, sigma, n, v.max_vertex) {
            Ok(p) => {
                pass &= p.pass;
                entry["propagation"] = to_value(&p)?;
            }
            Err(e) => entry["propagation"] = json!({ "skipped": e.to_string() }),
        }
        match perron_pairing_check(b, &v.entries) {
            Ok(p) => {
                pass &= p.pass;
                entry["perron"] = to_value(&p)?;
            }
            Err(e) => entry["perron"] = json!({ "skipped": e.to_string() }),
        }
        per_vector.push(entry);
    }
    let report = json!({ "base_level": n, "offset": k, "vectors": per_vector, "rank": to_value(&rank)? });
    Ok(if pass { Outcome::new("PASS", 0, report) } else { Outcome::new("FAIL", 1, report) })
}
