//! Path corpora: interned node sequences with multiplicities.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Dense index of an interned node token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[repr(transparent)]
pub struct NodeIndex(pub u32);

impl NodeIndex {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One distinct observed path and how many times it was observed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    nodes: Vec<NodeIndex>,
    multiplicity: u64,
}

impl Path {
    pub fn nodes(&self) -> &[NodeIndex] {
        &self.nodes
    }

    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Always false; paths hold at least one node.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn transitions(&self) -> usize {
        self.nodes.len() - 1
    }
}

/// Length histogram and mean lengths of a corpus, weighted by multiplicity.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PathStats {
    pub path_count: u64,
    pub length_histogram: BTreeMap<usize, u64>,
    pub mean_length: f64,
    pub mean_transitions: f64,
}

/// Checks that a node token is usable in the line formats.
///
/// Tokens must be non-empty and contain no whitespace, `,` or `|` (the
/// latter joins tokens inside serialized higher-order states).
pub fn validate_token(token: &str) -> Result<()> {
    if token.is_empty()
        || token
            .chars()
            .any(|c| c.is_whitespace() || c == ',' || c == '|')
    {
        return Err(Error::InvalidToken(token.to_string()));
    }
    Ok(())
}

/// Incremental corpus construction. Identical paths are merged.
#[derive(Debug, Default, Clone)]
pub struct CorpusBuilder {
    tokens: Vec<String>,
    lookup: BTreeMap<String, NodeIndex>,
    paths: Vec<Path>,
    path_slot: BTreeMap<Vec<NodeIndex>, usize>,
}

impl CorpusBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, token: &str) -> Result<NodeIndex> {
        if let Some(&idx) = self.lookup.get(token) {
            return Ok(idx);
        }
        validate_token(token)?;
        let idx = u32::try_from(self.tokens.len())
            .map(NodeIndex)
            .map_err(|_| Error::InvalidArgument("too many distinct nodes".into()))?;
        self.tokens.push(token.to_string());
        self.lookup.insert(token.to_string(), idx);
        Ok(idx)
    }

    /// Adds one path observed `multiplicity` times.
    pub fn push<I, S>(&mut self, tokens: I, multiplicity: u64) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        if multiplicity == 0 {
            return Err(Error::ZeroMultiplicity);
        }
        // Validate everything before touching the interner so a failed push
        // leaves the builder unchanged.
        let tokens: Vec<S> = tokens.into_iter().collect();
        if tokens.is_empty() {
            return Err(Error::EmptyPath);
        }
        for t in &tokens {
            if !self.lookup.contains_key(t.as_ref()) {
                validate_token(t.as_ref())?;
            }
        }
        let nodes = tokens
            .iter()
            .map(|t| self.intern(t.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        self.push_indices(nodes, multiplicity);
        Ok(())
    }

    fn push_indices(&mut self, nodes: Vec<NodeIndex>, multiplicity: u64) {
        match self.path_slot.get(&nodes) {
            Some(&slot) => self.paths[slot].multiplicity += multiplicity,
            None => {
                self.path_slot.insert(nodes.clone(), self.paths.len());
                self.paths.push(Path {
                    nodes,
                    multiplicity,
                });
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn finish(self) -> Result<PathCorpus> {
        if self.paths.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(PathCorpus {
            tokens: self.tokens,
            lookup: self.lookup,
            paths: self.paths,
        })
    }
}

/// A non-empty multiset of node sequences over an interned node universe.
///
/// The universe is exactly the set of tokens observed in some path; indices
/// are assigned in first-appearance order.
#[derive(Debug, Clone)]
pub struct PathCorpus {
    tokens: Vec<String>,
    lookup: BTreeMap<String, NodeIndex>,
    paths: Vec<Path>,
}

impl PathCorpus {
    pub fn builder() -> CorpusBuilder {
        CorpusBuilder::new()
    }

    /// Builds a corpus from `(tokens, multiplicity)` pairs.
    pub fn from_token_paths<I, P, S>(paths: I) -> Result<Self>
    where
        I: IntoIterator<Item = (P, u64)>,
        P: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut b = CorpusBuilder::new();
        for (p, m) in paths {
            b.push(p, m)?;
        }
        b.finish()
    }

    /// Distinct paths in first-appearance order.
    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    /// Total number of path instances, `Σ multiplicity`.
    pub fn instance_count(&self) -> u64 {
        self.paths.iter().map(|p| p.multiplicity).sum()
    }

    pub fn node_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn token(&self, idx: NodeIndex) -> &str {
        &self.tokens[idx.index()]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn index_of(&self, token: &str) -> Option<NodeIndex> {
        self.lookup.get(token).copied()
    }

    pub fn path_tokens<'a>(&'a self, path: &'a Path) -> impl Iterator<Item = &'a str> + 'a {
        path.nodes.iter().map(move |&n| self.token(n))
    }

    /// Rank of every node index under lexicographic token order.
    pub fn token_ranks(&self) -> Vec<u32> {
        let mut ranks = alloc::vec![0u32; self.tokens.len()];
        for (rank, idx) in self.lookup.values().enumerate() {
            ranks[idx.index()] = rank as u32;
        }
        ranks
    }

    /// Token-keyed view of the corpus, used for equality and reporting.
    pub fn to_multiset(&self) -> BTreeMap<Vec<&str>, u64> {
        let mut out = BTreeMap::new();
        for p in &self.paths {
            *out.entry(self.path_tokens(p).collect()).or_insert(0) += p.multiplicity;
        }
        out
    }

    pub fn path_stats(&self) -> PathStats {
        let mut hist = BTreeMap::new();
        let mut count = 0u64;
        let mut total_len = 0f64;
        for p in &self.paths {
            *hist.entry(p.len()).or_insert(0) += p.multiplicity;
            count += p.multiplicity;
            total_len += p.len() as f64 * p.multiplicity as f64;
        }
        let mean_length = total_len / count as f64;
        PathStats {
            path_count: count,
            length_histogram: hist,
            mean_length,
            mean_transitions: mean_length - 1.0,
        }
    }

    /// Multiplicity-weighted visit count per node index (repeat visits count).
    pub fn visit_counts(&self) -> Vec<u64> {
        let mut counts = alloc::vec![0u64; self.tokens.len()];
        for p in &self.paths {
            for n in &p.nodes {
                counts[n.index()] += p.multiplicity;
            }
        }
        counts
    }

    pub fn visit_counts_by_token(&self) -> BTreeMap<&str, u64> {
        self.visit_counts()
            .into_iter()
            .enumerate()
            .map(|(i, c)| (self.tokens[i].as_str(), c))
            .collect()
    }

    /// Splits path instances into `(train, test)`.
    ///
    /// Each instance (a path with multiplicity `m` counts as `m` instances)
    /// goes to the test side with probability `test_fraction`, drawn from a
    /// ChaCha8 stream seeded with `seed` in corpus order. Both sides must end
    /// up non-empty.
    pub fn split(&self, test_fraction: f64, seed: u64) -> Result<(PathCorpus, PathCorpus)> {
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "test fraction {test_fraction} outside (0, 1)"
            )));
        }
        if self.instance_count() < 2 {
            return Err(Error::InvalidArgument(
                "splitting needs at least two path instances".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut train = CorpusBuilder::new();
        let mut test = CorpusBuilder::new();
        for p in &self.paths {
            let mut to_test = 0u64;
            for _ in 0..p.multiplicity {
                if rng.random::<f64>() < test_fraction {
                    to_test += 1;
                }
            }
            let tokens = || p.nodes.iter().map(|&n| self.token(n));
            if to_test > 0 {
                test.push(tokens(), to_test)?;
            }
            if to_test < p.multiplicity {
                train.push(tokens(), p.multiplicity - to_test)?;
            }
        }
        if train.is_empty() || test.is_empty() {
            return Err(Error::InvalidArgument(
                "split left one side empty; use more paths or another seed".into(),
            ));
        }
        Ok((train.finish()?, test.finish()?))
    }

    /// Remaps a path of this corpus onto another corpus' node indices.
    /// Nodes unknown to `other` become `None`.
    pub fn translate_path(&self, path: &Path, other: &PathCorpus) -> Vec<Option<NodeIndex>> {
        path.nodes
            .iter()
            .map(|&n| other.index_of(self.token(n)))
            .collect()
    }
}

impl PartialEq for PathCorpus {
    fn eq(&self, other: &Self) -> bool {
        let mut a: Vec<&String> = self.tokens.iter().collect();
        let mut b: Vec<&String> = other.tokens.iter().collect();
        a.sort();
        b.sort();
        a == b && self.to_multiset() == other.to_multiset()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn corpus(paths: &[(&[&str], u64)]) -> PathCorpus {
        PathCorpus::from_token_paths(paths.iter().map(|(p, m)| (p.iter().copied(), *m))).unwrap()
    }

    #[test]
    fn tokens_are_validated() {
        assert!(validate_token("a").is_ok());
        assert!(validate_token("").is_err());
        assert!(validate_token("a b").is_err());
        assert!(validate_token("a,b").is_err());
        assert!(validate_token("a|b").is_err());
        assert_eq!(
            PathCorpus::from_token_paths([(["a", ""], 1)]).unwrap_err(),
            Error::InvalidToken(String::new())
        );
    }

    #[test]
    fn rejects_empty_inputs() {
        let none: [(Vec<&str>, u64); 0] = [];
        assert_eq!(
            PathCorpus::from_token_paths(none).unwrap_err(),
            Error::EmptyCorpus
        );
        assert_eq!(
            PathCorpus::from_token_paths([(Vec::<&str>::new(), 1)]).unwrap_err(),
            Error::EmptyPath
        );
        assert_eq!(
            PathCorpus::from_token_paths([(["a"], 0)]).unwrap_err(),
            Error::ZeroMultiplicity
        );
    }

    #[test]
    fn identical_paths_merge() {
        let c = corpus(&[(&["a", "b"], 1), (&["a", "b"], 2)]);
        assert_eq!(c.paths().len(), 1);
        assert_eq!(c.paths()[0].multiplicity(), 3);
        assert_eq!(c.instance_count(), 3);
    }

    #[test]
    fn stats_single_path() {
        let s = corpus(&[(&["a", "b", "c"], 1)]).path_stats();
        assert_eq!(s.path_count, 1);
        assert_eq!(s.length_histogram, BTreeMap::from([(3, 1)]));
        assert_eq!(s.mean_length, 3.0);
        assert_eq!(s.mean_transitions, 2.0);
    }

    #[test]
    fn stats_weighted_mean() {
        let s = corpus(&[(&["a", "b"], 2), (&["a", "b", "c", "d"], 2)]).path_stats();
        assert_eq!(s.path_count, 4);
        assert_eq!(s.mean_length, (2.0 * 2.0 + 2.0 * 4.0) / 4.0);
    }

    #[test]
    fn visit_count_examples() {
        let c = corpus(&[(&["a", "b", "a"], 1)]);
        assert_eq!(
            c.visit_counts_by_token(),
            BTreeMap::from([("a", 2), ("b", 1)])
        );
        let c = corpus(&[(&["a", "b"], 3)]);
        assert_eq!(
            c.visit_counts_by_token(),
            BTreeMap::from([("a", 3), ("b", 3)])
        );
        let c = corpus(&[(&["a", "b", "c"], 2), (&["b", "c"], 1)]);
        assert_eq!(
            c.visit_counts_by_token(),
            BTreeMap::from([("a", 2), ("b", 3), ("c", 3)])
        );
    }

    #[test]
    fn token_ranks_follow_lexicographic_order() {
        let c = corpus(&[(&["z", "b", "m"], 1)]);
        assert_eq!(c.token_ranks(), vec![2, 0, 1]);
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let c = corpus(&[(&["a", "b"], 10)]);
        assert!(c.split(0.0, 1).is_err());
        assert!(c.split(1.0, 1).is_err());
        assert!(c.split(f64::NAN, 1).is_err());
        assert!(corpus(&[(&["a"], 1)]).split(0.5, 1).is_err());
    }

    #[test]
    fn split_is_deterministic() {
        let c = corpus(&[(&["a", "b"], 30), (&["b", "c"], 30), (&["c", "a", "b"], 40)]);
        let (tr1, te1) = c.split(0.5, 9).unwrap();
        let (tr2, te2) = c.split(0.5, 9).unwrap();
        assert_eq!(tr1, tr2);
        assert_eq!(te1, te2);
        assert_eq!(tr1.instance_count() + te1.instance_count(), 100);
    }

    #[test]
    fn split_fraction_concentrates() {
        let c = corpus(&[(&["a", "b"], 500), (&["b", "c", "d"], 500)]);
        let mean = (0..20u64)
            .map(|seed| c.split(0.2, seed).unwrap().1.instance_count() as f64)
            .sum::<f64>()
            / 20.0;
        assert!((150.0..=250.0).contains(&mean), "mean test size {mean}");
    }

    fn arb_corpus() -> impl Strategy<Value = PathCorpus> {
        let path = (prop::collection::vec(0u8..6, 1..6), 1u64..4);
        prop::collection::vec(path, 1..12).prop_map(|ps| {
            PathCorpus::from_token_paths(
                ps.into_iter()
                    .map(|(nodes, m)| (nodes.into_iter().map(|n| alloc::format!("n{n}")), m)),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn visit_total_matches_path_mass(c in arb_corpus()) {
            let total: u64 = c.visit_counts().iter().sum();
            let expected: u64 = c.paths().iter().map(|p| p.len() as u64 * p.multiplicity()).sum();
            prop_assert_eq!(total, expected);
        }

        #[test]
        fn split_partitions_the_multiset(c in arb_corpus(), seed in 0u64..1000, frac in 0.05f64..0.95) {
            if let Ok((train, test)) = c.split(frac, seed) {
                let mut merged = train.to_multiset();
                for (k, v) in test.to_multiset() {
                    *merged.entry(k).or_insert(0) += v;
                }
                prop_assert_eq!(merged, c.to_multiset());
            }
        }
    }
}
