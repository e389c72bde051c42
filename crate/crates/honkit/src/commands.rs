//! One function per CLI command. Each returns the rendered report so the
//! binary only has to decide where it goes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use honkit_core::{
    build_hon, build_multi_order, comparison_report, first_order_graph, generate_corpus,
    multi_order_reports, optimal_order, pagerank_alignment, prediction_accuracy,
    random_planted_chain, AlignmentPoint, ComparisonReport, PathCorpus, StructuralReport,
};
use serde::Serialize;

use crate::config::{OutputFormat, RunConfig};
use crate::format::{hon_csv, hon_edge_list, hon_rows, write_lines};
use crate::Result;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    config: &'a RunConfig,
    result: T,
}

fn json<T: Serialize>(command: &str, cfg: &RunConfig, result: T) -> String {
    let mut s = serde_json::to_string_pretty(&Envelope {
        command,
        config: cfg,
        result,
    })
    .expect("reports serialize to JSON");
    s.push('\n');
    s
}

/// `# key=value` lines describing the command and its configuration.
pub fn config_comment(command: &str, cfg: &RunConfig) -> String {
    let value = serde_json::to_value(cfg).expect("config serializes to JSON");
    let mut out = format!("# command={command}\n");
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            match v {
                serde_json::Value::Null => {}
                serde_json::Value::String(s) => writeln!(out, "# {k}={s}").unwrap(),
                v => writeln!(out, "# {k}={v}").unwrap(),
            }
        }
    }
    out
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct Stats {
    path_count: u64,
    distinct_paths: usize,
    node_count: usize,
    mean_length: f64,
    mean_transitions: f64,
    length_histogram: BTreeMap<usize, u64>,
}

pub fn stats(corpus: &PathCorpus, cfg: &RunConfig) -> String {
    let s = corpus.path_stats();
    let stats = Stats {
        path_count: s.path_count,
        distinct_paths: corpus.paths().len(),
        node_count: corpus.node_count(),
        mean_length: s.mean_length,
        mean_transitions: s.mean_transitions,
        length_histogram: s.length_histogram,
    };
    let cfg = &cfg.resolve(OutputFormat::Json);
    match cfg.format_or(OutputFormat::Json) {
        OutputFormat::Json => json("stats", cfg, stats),
        OutputFormat::Csv => {
            let mut out = config_comment("stats", cfg);
            writeln!(
                out,
                "# path_count={} distinct_paths={} node_count={} mean_length={} mean_transitions={}",
                stats.path_count,
                stats.distinct_paths,
                stats.node_count,
                stats.mean_length,
                stats.mean_transitions
            )
            .unwrap();
            out.push_str("length,count\n");
            for (len, c) in &stats.length_histogram {
                writeln!(out, "{len},{c}").unwrap();
            }
            out
        }
    }
}

#[derive(Serialize)]
struct HonRow {
    from: String,
    to: String,
    count: u64,
    probability: f64,
}

/// Serialized order-`order` network: `from_state,to_state,count,probability`
/// by default, `u,v,count` with `edge_list`.
pub fn build(
    corpus: &PathCorpus,
    order: usize,
    edge_list: bool,
    cfg: &RunConfig,
) -> Result<String> {
    let hon = build_hon(corpus, order)?;
    let body = if edge_list {
        hon_edge_list(corpus, &hon)
    } else {
        hon_csv(corpus, &hon)
    };
    let cfg = &cfg.resolve(OutputFormat::Csv);
    Ok(match cfg.format_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            let mut out = config_comment("build", cfg);
            writeln!(out, "# order={order}").unwrap();
            out.push_str(&body);
            out
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Built {
                order: usize,
                node_count: usize,
                edge_count: usize,
                edges: Vec<HonRow>,
            }
            let edges = hon_rows(corpus, &hon)
                .into_iter()
                .map(|(from, to, count, probability)| HonRow {
                    from,
                    to,
                    count,
                    probability,
                })
                .collect();
            json(
                "build",
                cfg,
                Built {
                    order,
                    node_count: hon.node_count(),
                    edge_count: hon.edge_count(),
                    edges,
                },
            )
        }
    })
}

/// First-order topology of a corpus as `u,v,count`.
pub fn topology_edge_list(corpus: &PathCorpus) -> String {
    crate::format::graph_edge_list(corpus, &first_order_graph(corpus))
}

#[derive(Serialize)]
struct TraceRow {
    k: usize,
    lambda: f64,
    delta_d: u128,
    p_value: f64,
    log_likelihood_null: f64,
    log_likelihood_alt: f64,
}

#[derive(Serialize)]
struct OrderTrace {
    optimal_order: usize,
    epsilon: f64,
    truncated: bool,
    trace: Vec<TraceRow>,
}

pub fn order(corpus: &PathCorpus, cfg: &RunConfig) -> Result<String> {
    let model = build_multi_order(corpus, cfg.max_order)?;
    let sel = optimal_order(&model, corpus, cfg.epsilon, cfg.max_order)?;
    let trace: Vec<TraceRow> = sel
        .trace
        .iter()
        .map(|r| TraceRow {
            k: r.null_order,
            lambda: r.lambda,
            delta_d: r.delta_d,
            p_value: r.p_value,
            log_likelihood_null: r.log_likelihood_null,
            log_likelihood_alt: r.log_likelihood_alt,
        })
        .collect();
    let cfg = &cfg.resolve(OutputFormat::Json);
    Ok(match cfg.format_or(OutputFormat::Json) {
        OutputFormat::Json => json(
            "order",
            cfg,
            OrderTrace {
                optimal_order: sel.optimal_order,
                epsilon: sel.epsilon,
                truncated: sel.truncated,
                trace,
            },
        ),
        OutputFormat::Csv => {
            let mut out = config_comment("order", cfg);
            writeln!(
                out,
                "# optimal_order={} truncated={}",
                sel.optimal_order, sel.truncated
            )
            .unwrap();
            out.push_str("k,lambda,delta_d,p_value,log_likelihood_null,log_likelihood_alt\n");
            for r in &trace {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.k,
                    r.lambda,
                    r.delta_d,
                    r.p_value,
                    r.log_likelihood_null,
                    r.log_likelihood_alt
                )
                .unwrap();
            }
            out
        }
    })
}

pub const REPORT_COLUMNS: &str = "order,node_count,edge_count,mean_in_degree,mean_out_degree,diameter,avg_shortest_path,density,gcc_ratio";

pub fn report_rows(reports: &[StructuralReport]) -> String {
    let mut out = String::from(REPORT_COLUMNS);
    out.push('\n');
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.order,
            r.node_count,
            r.edge_count,
            r.mean_in_degree,
            r.mean_out_degree,
            r.diameter,
            r.avg_shortest_path,
            r.density,
            r.gcc_ratio
        )
        .unwrap();
    }
    out
}

fn estimated_note(reports: &[StructuralReport]) -> Option<String> {
    let orders: Vec<String> = reports
        .iter()
        .filter(|r| r.estimated)
        .map(|r| r.order.to_string())
        .collect();
    (!orders.is_empty()).then(|| {
        format!(
            "# diameter and avg_shortest_path estimated from sampled sources at orders {}\n",
            orders.join(",")
        )
    })
}

pub fn report(corpus: &PathCorpus, cfg: &RunConfig) -> Result<String> {
    let reports = multi_order_reports(corpus, cfg.max_order, &cfg.report_options())?;
    let cfg = &cfg.resolve(OutputFormat::Csv);
    Ok(match cfg.format_or(OutputFormat::Csv) {
        OutputFormat::Json => json("report", cfg, &reports),
        OutputFormat::Csv => {
            let mut out = config_comment("report", cfg);
            if let Some(note) = estimated_note(&reports) {
                out.push_str(&note);
            }
            out.push_str(&report_rows(&reports));
            out
        }
    })
}

/// Alignment curve, plus per-node aggregated scores as
/// `order,node,score` CSV.
pub fn pagerank(corpus: &PathCorpus, cfg: &RunConfig) -> Result<(String, String)> {
    let points = pagerank_alignment(corpus, cfg.max_order, &cfg.pagerank_options())?;
    let cfg = &cfg.resolve(OutputFormat::Json);
    let main = match cfg.format_or(OutputFormat::Json) {
        OutputFormat::Json => json("pagerank", cfg, &points),
        OutputFormat::Csv => {
            let mut out = config_comment("pagerank", cfg);
            out.push_str("order,tau,converged,iterations\n");
            for p in &points {
                writeln!(
                    out,
                    "{},{},{},{}",
                    p.order,
                    opt(p.tau),
                    p.converged,
                    p.iterations
                )
                .unwrap();
            }
            out
        }
    };
    Ok((main, node_scores(corpus, cfg, &points)))
}

fn node_scores(corpus: &PathCorpus, cfg: &RunConfig, points: &[AlignmentPoint]) -> String {
    let mut out = config_comment("pagerank", &cfg.resolve(OutputFormat::Csv));
    out.push_str("order,node,score\n");
    for p in points {
        let mut rows: Vec<(&str, f64)> = p
            .node_scores
            .iter()
            .map(|(n, s)| (corpus.token(*n), *s))
            .collect();
        rows.sort_by(|a, b| a.0.cmp(b.0));
        for (node, score) in rows {
            writeln!(out, "{},{node},{score}", p.order).unwrap();
        }
    }
    out
}

#[derive(Serialize)]
struct AccuracyRow {
    order: usize,
    accuracy: f64,
    evaluated_transitions: u64,
    none_rate: f64,
    protocol: &'static str,
}

fn accuracy_curve(
    train: &PathCorpus,
    eval: &PathCorpus,
    max_order: usize,
    protocol: &'static str,
    rows: &mut Vec<AccuracyRow>,
) -> Result<()> {
    let model = build_multi_order(train, max_order)?;
    for k in 1..=max_order {
        let r = prediction_accuracy(&model, eval, k)?;
        rows.push(AccuracyRow {
            order: k,
            accuracy: r.accuracy,
            evaluated_transitions: r.evaluated_transitions,
            none_rate: r.none_rate(),
            protocol,
        });
    }
    Ok(())
}

/// In-sample accuracy curve and, with `holdout`, the curve of a model
/// trained on a seeded split and evaluated on the held-out part.
pub fn predict(corpus: &PathCorpus, holdout: bool, cfg: &RunConfig) -> Result<String> {
    let mut rows = Vec::new();
    accuracy_curve(corpus, corpus, cfg.max_order, "in_sample", &mut rows)?;
    if holdout {
        let (train, test) = corpus.split(cfg.split_fraction, cfg.seed)?;
        accuracy_curve(&train, &test, cfg.max_order, "holdout", &mut rows)?;
    }
    let cfg = &cfg.resolve(OutputFormat::Json);
    Ok(match cfg.format_or(OutputFormat::Json) {
        OutputFormat::Json => json("predict", cfg, &rows),
        OutputFormat::Csv => {
            let mut out = config_comment("predict", cfg);
            out.push_str("protocol,order,accuracy,evaluated_transitions,none_rate\n");
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.protocol, r.order, r.accuracy, r.evaluated_transitions, r.none_rate
                )
                .unwrap();
            }
            out
        }
    })
}

/// Plot-ready CSV blocks of a comparison, keyed by block name.
pub fn comparison_blocks(report: &ComparisonReport) -> BTreeMap<&'static str, String> {
    let mut blocks = BTreeMap::new();

    let mut curves = String::from("scenario,");
    curves.push_str(REPORT_COLUMNS);
    curves.push('\n');
    for (label, reports) in [
        (&report.scenario_a, &report.reports_a),
        (&report.scenario_b, &report.reports_b),
    ] {
        for line in report_rows(reports).lines().skip(1) {
            writeln!(curves, "{label},{line}").unwrap();
        }
    }
    blocks.insert("metric_curves", curves);

    let mut cosine = String::from("metric,cosine\n");
    for s in &report.similarity {
        writeln!(cosine, "{},{}", s.metric.name(), opt(s.cosine)).unwrap();
    }
    blocks.insert("cosine", cosine);

    let mut kl = String::from("order,kl_divergence\n");
    for o in &report.orders {
        writeln!(kl, "{},{}", o.order, opt(o.kl_divergence)).unwrap();
    }
    blocks.insert("kl", kl);

    let mut curves =
        String::from("order,tau_a,tau_b,tau_delta,accuracy_a,accuracy_b,accuracy_delta\n");
    for o in &report.orders {
        writeln!(
            curves,
            "{},{},{},{},{},{},{}",
            o.order,
            opt(o.tau_a),
            opt(o.tau_b),
            opt(o.tau_delta),
            opt(o.accuracy_a),
            opt(o.accuracy_b),
            opt(o.accuracy_delta)
        )
        .unwrap();
    }
    blocks.insert("tau_accuracy", curves);
    blocks
}

pub fn compare(
    label_a: &str,
    a: &PathCorpus,
    label_b: &str,
    b: &PathCorpus,
    cfg: &RunConfig,
) -> Result<String> {
    let report = comparison_report(label_a, a, label_b, b, &cfg.compare_config())?;
    let blocks = comparison_blocks(&report);
    let cfg = &cfg.resolve(OutputFormat::Json);
    Ok(match cfg.format_or(OutputFormat::Json) {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Compared<'a> {
                report: &'a ComparisonReport,
                csv: &'a BTreeMap<&'static str, String>,
            }
            json(
                "compare",
                cfg,
                Compared {
                    report: &report,
                    csv: &blocks,
                },
            )
        }
        OutputFormat::Csv => {
            let mut out = config_comment("compare", cfg);
            for (i, (name, body)) in blocks.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                writeln!(out, "# block={name}").unwrap();
                out.push_str(body);
            }
            out
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SynthParams {
    pub nodes: usize,
    pub order: usize,
    pub branching: usize,
    pub determinism: f64,
    pub paths: usize,
    pub min_len: usize,
    pub max_len: usize,
}

/// Generated corpus in the `lines` format, preceded by comment lines.
pub fn synth(params: &SynthParams, cfg: &RunConfig) -> Result<String> {
    let chain = random_planted_chain(
        params.nodes,
        params.order,
        params.branching,
        params.determinism,
        cfg.seed,
    )?;
    // Offset the sampling seed so topology and paths use distinct streams.
    let corpus = generate_corpus(
        &chain,
        params.paths,
        params.min_len,
        params.max_len,
        cfg.seed.wrapping_add(1),
    )?;
    let mut out = config_comment("synth", cfg);
    let p = serde_json::to_value(params).expect("params serialize");
    if let serde_json::Value::Object(map) = p {
        for (k, v) in map {
            writeln!(out, "# {k}={v}").unwrap();
        }
    }
    let mut body = Vec::new();
    write_lines(&corpus, &mut body).expect("writing to memory");
    out.push_str(std::str::from_utf8(&body).expect("tokens are UTF-8"));
    Ok(out)
}
