//! Line-oriented path files and CSV graph serializations.
//!
//! Both path formats hold one path per line with comma-separated node
//! tokens. In the `ngram` format the last field is the path's multiplicity.
//! Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use honkit_core::{CorpusBuilder, Graph, HigherOrderNetwork, NodeIndex, PathCorpus};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Lines,
    Ngram,
}

fn parse_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_paths<R: BufRead>(reader: R, format: Format) -> Result<PathCorpus> {
    let mut builder = CorpusBuilder::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| parse_error(lineno, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let multiplicity = match format {
            Format::Lines => 1,
            Format::Ngram => {
                let last = fields.pop().expect("split yields at least one field");
                let m: u64 = last
                    .parse()
                    .map_err(|_| parse_error(lineno, format!("bad multiplicity `{last}`")))?;
                if m == 0 {
                    return Err(parse_error(lineno, "multiplicity must be at least 1"));
                }
                if fields.is_empty() {
                    return Err(parse_error(lineno, "path has no nodes"));
                }
                m
            }
        };
        builder
            .push(fields, multiplicity)
            .map_err(|e| parse_error(lineno, e.to_string()))?;
    }
    if builder.is_empty() {
        return Err(Error::Core(honkit_core::Error::EmptyCorpus));
    }
    Ok(builder.finish()?)
}

pub fn parse_str(text: &str, format: Format) -> Result<PathCorpus> {
    parse_paths(text.as_bytes(), format)
}

/// Distinct paths as token vectors with their multiplicities, sorted.
fn sorted_paths(corpus: &PathCorpus) -> Vec<(Vec<&str>, u64)> {
    corpus.to_multiset().into_iter().collect()
}

/// One line per distinct path, multiplicity in the last field.
pub fn write_ngram<W: Write>(corpus: &PathCorpus, mut w: W) -> std::io::Result<()> {
    for (tokens, m) in sorted_paths(corpus) {
        writeln!(w, "{},{m}", tokens.join(","))?;
    }
    Ok(())
}

/// One line per path instance; repeated paths are written repeatedly.
pub fn write_lines<W: Write>(corpus: &PathCorpus, mut w: W) -> std::io::Result<()> {
    for (tokens, m) in sorted_paths(corpus) {
        let line = tokens.join(",");
        for _ in 0..m {
            writeln!(w, "{line}")?;
        }
    }
    Ok(())
}

/// Node tokens of a state joined with `|`.
pub fn state_label(corpus: &PathCorpus, state: &[NodeIndex]) -> String {
    let mut s = String::new();
    for (i, n) in state.iter().enumerate() {
        if i > 0 {
            s.push('|');
        }
        s.push_str(corpus.token(*n));
    }
    s
}

/// Edges of a layer as `(from, to, count, probability)` with state labels,
/// sorted by label.
pub fn hon_rows(corpus: &PathCorpus, hon: &HigherOrderNetwork) -> Vec<(String, String, u64, f64)> {
    let labels: Vec<String> = hon.states().map(|s| state_label(corpus, s)).collect();
    let mut rows: Vec<_> = hon
        .edges()
        .iter()
        .map(|e| {
            (
                labels[e.from].clone(),
                labels[e.to].clone(),
                e.count,
                e.probability,
            )
        })
        .collect();
    rows.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    rows
}

/// `from_state,to_state,count,probability` CSV of a layer.
pub fn hon_csv(corpus: &PathCorpus, hon: &HigherOrderNetwork) -> String {
    let mut out = String::from("from_state,to_state,count,probability\n");
    for (f, t, c, p) in hon_rows(corpus, hon) {
        writeln!(out, "{f},{t},{c},{p}").unwrap();
    }
    out
}

/// `u,v,count` CSV of a layer, states labelled as in [`hon_csv`].
pub fn hon_edge_list(corpus: &PathCorpus, hon: &HigherOrderNetwork) -> String {
    let rows = hon_rows(corpus, hon);
    edge_rows(
        rows.iter()
            .map(|(u, v, c, _)| (u.as_str(), v.as_str(), *c))
            .collect(),
    )
}

/// `u,v,count` rows of a first-order graph.
pub fn graph_edge_list(corpus: &PathCorpus, graph: &Graph) -> String {
    let mut rows: Vec<(&str, &str, u64)> = graph
        .edges()
        .map(|(u, v, c)| (corpus.token(u), corpus.token(v), c))
        .collect();
    rows.sort();
    edge_rows(rows)
}

fn edge_rows(rows: Vec<(&str, &str, u64)>) -> String {
    let mut out = String::from("u,v,count\n");
    for (u, v, c) in rows {
        writeln!(out, "{u},{v},{c}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(e: Error) -> usize {
        match e {
            Error::Parse { line, .. } => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn lines_and_ngram() {
        let c = parse_str("a,b,c\na,b,d", Format::Lines).unwrap();
        assert_eq!(c.tokens(), ["a", "b", "c", "d"]);
        assert_eq!(c.instance_count(), 2);

        let c = parse_str("a,b,2", Format::Ngram).unwrap();
        assert_eq!(
            c.to_multiset().into_iter().collect::<Vec<_>>(),
            [(vec!["a", "b"], 2)]
        );
    }

    #[test]
    fn comments_blank_lines_and_whitespace() {
        let text = "# header\n\n  a , b \r\n#a,z\nb,c\n";
        let c = parse_str(text, Format::Lines).unwrap();
        assert_eq!(c.tokens(), ["a", "b", "c"]);
        assert_eq!(c.instance_count(), 2);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(line_of(parse_str("a,,b", Format::Lines).unwrap_err()), 1);
        assert_eq!(
            line_of(parse_str("a,b,1\n\na,b,x", Format::Ngram).unwrap_err()),
            3
        );
        assert_eq!(line_of(parse_str("a,b,0", Format::Ngram).unwrap_err()), 1);
        assert_eq!(line_of(parse_str("a,b,-1", Format::Ngram).unwrap_err()), 1);
        assert_eq!(line_of(parse_str("# c\n3", Format::Ngram).unwrap_err()), 2);
        assert_eq!(line_of(parse_str("a,b c", Format::Lines).unwrap_err()), 1);
        assert!(matches!(
            parse_str("# only comments\n\n", Format::Lines),
            Err(Error::Core(honkit_core::Error::EmptyCorpus))
        ));
    }

    #[test]
    fn writers() {
        let c = parse_str("b,c,1\na,b,c,2", Format::Ngram).unwrap();
        let mut ngram = Vec::new();
        write_ngram(&c, &mut ngram).unwrap();
        assert_eq!(String::from_utf8(ngram).unwrap(), "a,b,c,2\nb,c,1\n");
        let mut lines = Vec::new();
        write_lines(&c, &mut lines).unwrap();
        assert_eq!(String::from_utf8(lines).unwrap(), "a,b,c\na,b,c\nb,c\n");
    }

    #[test]
    fn hon_serializations() {
        let c = parse_str("a,b,c,2\na,b,d,1", Format::Ngram).unwrap();
        let h = honkit_core::build_hon(&c, 2).unwrap();
        assert_eq!(
            hon_csv(&c, &h),
            "from_state,to_state,count,probability\n\
             a|b,b|c,2,0.6666666666666666\n\
             a|b,b|d,1,0.3333333333333333\n"
        );
        assert_eq!(hon_edge_list(&c, &h), "u,v,count\na|b,b|c,2\na|b,b|d,1\n");
        let g = honkit_core::first_order_graph(&c);
        assert_eq!(graph_edge_list(&c, &g), "u,v,count\na,b,3\nb,c,2\nb,d,1\n");
    }
}
