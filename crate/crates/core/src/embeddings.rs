//! Pretrained word-vector tables and post centroids.
//!
//! Three on-disk layouts are read: word2vec binary (`"<count> <dim>\n"`
//! header, then per word the UTF-8 word terminated by a space followed by
//! `dim` little-endian `f32`s), word2vec text (same header, then one
//! `word v1 .. vd` row per line) and GloVe text (rows only, no header).

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbeddingFormat {
    Word2vecBinary,
    Word2vecText,
    GloveText,
}

impl FromStr for EmbeddingFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "word2vec-binary" | "bin" => Ok(EmbeddingFormat::Word2vecBinary),
            "word2vec-text" => Ok(EmbeddingFormat::Word2vecText),
            "glove-text" | "glove" => Ok(EmbeddingFormat::GloveText),
            other => Err(format!("unknown embedding format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Keep only these words (compared after optional lowercasing).
    pub vocabulary: Option<HashSet<String>>,
    /// Fold words to lowercase; the first occurrence of each folded form wins.
    pub lowercase: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f32>,
    source: EmbeddingFormat,
}

impl EmbeddingTable {
    pub fn new(dim: usize, source: EmbeddingFormat) -> Self {
        EmbeddingTable {
            dim,
            words: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
            source,
        }
    }

    /// Builds a table from `(word, vector)` pairs; the first occurrence of a
    /// word wins.
    pub fn from_pairs<S: Into<String>>(
        dim: usize,
        pairs: impl IntoIterator<Item = (S, Vec<f32>)>,
    ) -> Result<Self> {
        let mut table = EmbeddingTable::new(dim, EmbeddingFormat::GloveText);
        for (i, (word, vector)) in pairs.into_iter().enumerate() {
            table.insert(word.into(), &vector, i + 1)?;
        }
        Ok(table)
    }

    fn insert(&mut self, word: String, vector: &[f32], line: usize) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                line,
                expected: self.dim,
                found: vector.len(),
            });
        }
        if let Some(i) = vector.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parse {
                line,
                message: format!("non-finite component {i} for {word:?}"),
            });
        }
        if self.index.contains_key(&word) {
            return Ok(());
        }
        self.index.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.data.extend_from_slice(vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn source(&self) -> EmbeddingFormat {
        self.source
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.index
            .get(word)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }

    pub fn write_text(&self, out: &mut impl Write, with_header: bool) -> std::io::Result<()> {
        if with_header {
            writeln!(out, "{} {}", self.len(), self.dim)?;
        }
        for word in &self.words {
            write!(out, "{word}")?;
            for v in self.get(word).unwrap() {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn write_word2vec_binary(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.len(), self.dim)?;
        for word in &self.words {
            out.write_all(word.as_bytes())?;
            out.write_all(b" ")?;
            for v in self.get(word).unwrap() {
                out.write_all(&v.to_le_bytes())?;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

pub fn load_embeddings(
    path: &Path,
    format: EmbeddingFormat,
    options: &LoadOptions,
) -> Result<EmbeddingTable> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_embeddings(&bytes, format, options)
}

pub fn parse_embeddings(
    bytes: &[u8],
    format: EmbeddingFormat,
    options: &LoadOptions,
) -> Result<EmbeddingTable> {
    match format {
        EmbeddingFormat::Word2vecBinary => parse_binary(bytes, options),
        EmbeddingFormat::Word2vecText | EmbeddingFormat::GloveText => {
            let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
                line: 0,
                message: format!("invalid UTF-8: {e}"),
            })?;
            parse_text(text, format, options)
        }
    }
}

fn keep(word: &str, options: &LoadOptions) -> Option<String> {
    let word = if options.lowercase {
        word.to_lowercase()
    } else {
        word.to_string()
    };
    match &options.vocabulary {
        Some(vocab) if !vocab.contains(&word) => None,
        _ => Some(word),
    }
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let mut parts = line.split_whitespace();
    let parsed = (
        parts.next().and_then(|s| s.parse::<usize>().ok()),
        parts.next().and_then(|s| s.parse::<usize>().ok()),
        parts.next(),
    );
    match parsed {
        (Some(count), Some(dim), None) if dim > 0 => Ok((count, dim)),
        _ => Err(Error::MalformedHeader(line.to_string())),
    }
}

fn parse_text(
    text: &str,
    format: EmbeddingFormat,
    options: &LoadOptions,
) -> Result<EmbeddingTable> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let mut table: Option<EmbeddingTable> = None;
    if format == EmbeddingFormat::Word2vecText {
        let Some((_, header)) = lines.next() else {
            return Err(Error::MalformedHeader(String::new()));
        };
        let (_, dim) = parse_header(header)?;
        table = Some(EmbeddingTable::new(dim, format));
    }
    let mut row = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let mut parts = line.split_whitespace();
        let word = parts.next().unwrap();
        row.clear();
        for part in parts {
            let value = part.parse::<f32>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad vector component {part:?}"),
            })?;
            row.push(value);
        }
        let table = table.get_or_insert_with(|| EmbeddingTable::new(row.len(), format));
        if row.len() != table.dim {
            return Err(Error::DimensionMismatch {
                line: line_no,
                expected: table.dim,
                found: row.len(),
            });
        }
        if let Some(word) = keep(word, options) {
            table.insert(word, &row, line_no)?;
        }
    }
    Ok(table.unwrap_or_else(|| EmbeddingTable::new(0, format)))
}

fn parse_binary(bytes: &[u8], options: &LoadOptions) -> Result<EmbeddingTable> {
    let header_end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::MalformedHeader("missing header line".to_string()))?;
    let header = std::str::from_utf8(&bytes[..header_end])
        .map_err(|_| Error::MalformedHeader("header is not UTF-8".to_string()))?;
    let (count, dim) = parse_header(header)?;
    let mut table = EmbeddingTable::new(dim, EmbeddingFormat::Word2vecBinary);
    let mut pos = header_end + 1;
    let mut vector = vec![0f32; dim];
    for entry in 0..count {
        let record = entry + 1;
        while pos < bytes.len() && (bytes[pos] == b'\n' || bytes[pos] == b'\r') {
            pos += 1;
        }
        let word_len = bytes[pos..]
            .iter()
            .position(|&b| b == b' ')
            .ok_or_else(|| Error::Parse {
                line: record,
                message: "truncated word".to_string(),
            })?;
        let word = String::from_utf8_lossy(&bytes[pos..pos + word_len]).into_owned();
        pos += word_len + 1;
        let end = pos + 4 * dim;
        if end > bytes.len() {
            return Err(Error::Parse {
                line: record,
                message: format!("truncated vector for {word:?}"),
            });
        }
        for (v, chunk) in vector.iter_mut().zip(bytes[pos..end].chunks_exact(4)) {
            *v = f32::from_le_bytes(chunk.try_into().unwrap());
        }
        pos = end;
        if let Some(word) = keep(&word, options) {
            table.insert(word, &vector, record)?;
        }
    }
    Ok(table)
}

/// A post's point in embedding space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidVector {
    pub values: Vec<f64>,
    pub covered_tokens: usize,
    pub total_tokens: usize,
}

impl CentroidVector {
    /// True when no token was found in the table; `values` is then zero.
    pub fn is_empty(&self) -> bool {
        self.covered_tokens == 0
    }
}

/// Arithmetic mean of the vectors of the tokens present in `table`.
pub fn centroid<S: AsRef<str>>(tokens: &[S], table: &EmbeddingTable) -> CentroidVector {
    weighted_mean(tokens, table, |_| 1.0)
}

/// Weighted mean `sum(w_i * v_i) / sum(w_i)` over tokens present in the
/// table. Falls back to the plain centroid when the weights sum to zero.
pub fn weighted_centroid<S: AsRef<str>>(
    tokens: &[S],
    table: &EmbeddingTable,
    weight: impl Fn(&str) -> f64,
) -> CentroidVector {
    let weighted = weighted_mean(tokens, table, weight);
    if weighted.is_empty() || weighted.values.iter().all(|v| !v.is_nan()) {
        weighted
    } else {
        centroid(tokens, table)
    }
}

// Yields NaN components when the weight sum is zero; callers handle that.
fn weighted_mean<S: AsRef<str>>(
    tokens: &[S],
    table: &EmbeddingTable,
    weight: impl Fn(&str) -> f64,
) -> CentroidVector {
    let mut values = vec![0.0; table.dim()];
    let mut covered = 0;
    let mut total_weight = 0.0;
    for token in tokens {
        let token = token.as_ref();
        if let Some(vector) = table.get(token) {
            let w = weight(token);
            covered += 1;
            total_weight += w;
            for (acc, &v) in values.iter_mut().zip(vector) {
                *acc += w * f64::from(v);
            }
        }
    }
    if covered > 0 {
        if total_weight > 0.0 {
            values.iter_mut().for_each(|v| *v /= total_weight);
        } else {
            values.iter_mut().for_each(|v| *v = f64::NAN);
        }
    }
    CentroidVector {
        values,
        covered_tokens: covered,
        total_tokens: tokens.len(),
    }
}

/// Unit-normalized vectors for a candidate word set, for cosine
/// nearest-neighbor queries. Candidates are kept in lexicographic order so
/// that the first maximum wins ties.
#[derive(Debug, Clone)]
pub struct NeighborIndex {
    dim: usize,
    words: Vec<String>,
    units: Vec<f64>,
}

impl NeighborIndex {
    /// Candidates absent from `table` are ignored.
    pub fn build<'a>(
        table: &EmbeddingTable,
        candidates: impl IntoIterator<Item = &'a str>,
    ) -> Self {
        let sorted: BTreeSet<&str> = candidates
            .into_iter()
            .filter(|w| table.contains(w))
            .collect();
        let dim = table.dim();
        let mut words = Vec::with_capacity(sorted.len());
        let mut units = Vec::with_capacity(sorted.len() * dim);
        for word in sorted {
            let v = table.get(word).unwrap();
            let norm = norm(v);
            words.push(word.to_string());
            units.extend(
                v.iter()
                    .map(|&x| if norm > 0.0 { f64::from(x) / norm } else { 0.0 }),
            );
        }
        NeighborIndex { dim, words, units }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Candidate with the highest cosine similarity to `word`'s vector. A
    /// candidate word is its own nearest neighbor.
    pub fn nearest(&self, word: &str, table: &EmbeddingTable) -> Option<&str> {
        if let Ok(i) = self.words.binary_search_by(|w| w.as_str().cmp(word)) {
            return Some(&self.words[i]);
        }
        let query = table.get(word)?;
        let qn = norm(query);
        if qn == 0.0 || self.words.is_empty() {
            return None;
        }
        let mut best = 0;
        let mut best_sim = f64::NEG_INFINITY;
        for (i, unit) in self.units.chunks_exact(self.dim.max(1)).enumerate() {
            let sim: f64 = unit
                .iter()
                .zip(query)
                .map(|(u, &q)| u * f64::from(q))
                .sum::<f64>()
                / qn;
            if sim > best_sim {
                best_sim = sim;
                best = i;
            }
        }
        Some(&self.words[best])
    }
}

fn norm(v: &[f32]) -> f64 {
    v.iter()
        .map(|&x| f64::from(x) * f64::from(x))
        .sum::<f64>()
        .sqrt()
}

/// Most cosine-similar member of `candidates` to `word`; `None` when `word`
/// has no vector or no candidate is in the table.
pub fn nearest_in_set(
    word: &str,
    table: &EmbeddingTable,
    candidates: &BTreeSet<String>,
) -> Option<String> {
    NeighborIndex::build(table, candidates.iter().map(String::as_str))
        .nearest(word, table)
        .map(str::to_string)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy() -> EmbeddingTable {
        EmbeddingTable::from_pairs(
            2,
            [
                ("a", vec![1.0, 0.0]),
                ("b", vec![0.0, 1.0]),
                ("c", vec![3.0, 4.0]),
            ],
        )
        .unwrap()
    }

    fn set(words: &[&str]) -> BTreeSet<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn glove_text() {
        let t = parse_embeddings(
            b"a 1.0 0.0\nb 0.0 1.0\n",
            EmbeddingFormat::GloveText,
            &LoadOptions::default(),
        )
        .unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("b"), Some(&[0.0f32, 1.0][..]));
        assert_eq!(t.get("zzz"), None);
    }

    #[test]
    fn dimension_mismatch() {
        let err = parse_embeddings(
            b"a 1.0 0.0\nb 0.0 1.0 2.0\n",
            EmbeddingFormat::GloveText,
            &LoadOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                line: 2,
                expected: 2,
                found: 3
            }
        ));
    }

    #[test]
    fn word2vec_text_header() {
        let opts = LoadOptions::default();
        let t =
            parse_embeddings(b"2 2\na 1 0\nb 0 1\n", EmbeddingFormat::Word2vecText, &opts).unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.len(), 2);
        assert!(matches!(
            parse_embeddings(b"a 1 0\n", EmbeddingFormat::Word2vecText, &opts),
            Err(Error::MalformedHeader(_))
        ));
        assert!(matches!(
            parse_embeddings(b"2 2\na 1 0 0\n", EmbeddingFormat::Word2vecText, &opts),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn word2vec_binary_round_trip() {
        let t = toy();
        let mut buf = Vec::new();
        t.write_word2vec_binary(&mut buf).unwrap();
        let back = parse_embeddings(
            &buf,
            EmbeddingFormat::Word2vecBinary,
            &LoadOptions::default(),
        )
        .unwrap();
        assert_eq!(back.words(), t.words());
        for w in t.words() {
            assert_eq!(back.get(w), t.get(w));
        }
        assert!(matches!(
            parse_embeddings(
                b"x y\n",
                EmbeddingFormat::Word2vecBinary,
                &LoadOptions::default()
            ),
            Err(Error::MalformedHeader(_))
        ));
    }

    #[test]
    fn duplicates_lowercase_and_restriction() {
        let opts = LoadOptions {
            vocabulary: Some(["flu".to_string(), "cold".to_string()].into()),
            lowercase: true,
        };
        let t = parse_embeddings(
            b"Flu 1 0\nflu 0 1\ncold 1 1\nother 2 2\n",
            EmbeddingFormat::GloveText,
            &opts,
        )
        .unwrap();
        assert_eq!(t.words(), &["flu".to_string(), "cold".to_string()]);
        assert_eq!(t.get("flu"), Some(&[1.0f32, 0.0][..]));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(parse_embeddings(
            b"a NaN 0\n",
            EmbeddingFormat::GloveText,
            &LoadOptions::default()
        )
        .is_err());
    }

    #[test]
    fn centroid_examples() {
        let t = toy();
        let c = centroid(&["a", "b"], &t);
        assert_eq!(c.values, vec![0.5, 0.5]);
        assert_eq!((c.covered_tokens, c.total_tokens), (2, 2));
        assert_eq!(centroid(&["a", "a"], &t).values, vec![1.0, 0.0]);
        let empty = centroid(&["zzz"], &t);
        assert!(empty.is_empty());
        assert_eq!(empty.values, vec![0.0, 0.0]);
        assert_eq!(empty.total_tokens, 1);
    }

    #[test]
    fn weighted_centroid_examples() {
        let t = toy();
        // (1*(1,0) + 3*(0,1)) / 4
        let c = weighted_centroid(&["a", "b"], &t, |w| if w == "a" { 1.0 } else { 3.0 });
        assert_eq!(c.values, vec![0.25, 0.75]);
        let plain = centroid(&["a", "b", "c"], &t);
        let uniform = weighted_centroid(&["a", "b", "c"], &t, |_| 0.37);
        for (x, y) in plain.values.iter().zip(&uniform.values) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(
            weighted_centroid(&["a", "b"], &t, |_| 0.0),
            centroid(&["a", "b"], &t)
        );
        assert!(weighted_centroid(&["q"], &t, |_| 0.0).is_empty());
    }

    #[test]
    fn nearest_examples() {
        let t = EmbeddingTable::from_pairs(
            2,
            [
                ("flu", vec![1.0, 0.0]),
                ("v", vec![1.0, 0.0]),
                ("a", vec![0.9, 0.1]),
                ("b", vec![0.0, 1.0]),
            ],
        )
        .unwrap();
        assert_eq!(
            nearest_in_set("flu", &t, &set(&["flu"])).as_deref(),
            Some("flu")
        );
        assert_eq!(nearest_in_set("absent", &t, &set(&["flu"])), None);
        // cos(v,a) = 0.9/sqrt(0.82) ~ 0.994 > cos(v,b) = 0
        assert_eq!(
            nearest_in_set("v", &t, &set(&["a", "b"])).as_deref(),
            Some("a")
        );
        assert_eq!(nearest_in_set("v", &t, &BTreeSet::new()), None);
        // x and y are both parallel to q; the lexicographically smaller wins.
        let t2 = EmbeddingTable::from_pairs(
            2,
            [
                ("q", vec![2.0, 0.0]),
                ("y", vec![1.0, 0.0]),
                ("x", vec![3.0, 0.0]),
            ],
        )
        .unwrap();
        assert_eq!(
            nearest_in_set("q", &t2, &set(&["y", "x"])).as_deref(),
            Some("x")
        );
    }

    fn vectors() -> impl Strategy<Value = Vec<Vec<f32>>> {
        prop::collection::vec(prop::collection::vec(-5.0f32..5.0, 3), 1..8)
    }

    proptest! {
        #[test]
        fn centroid_permutation_invariant_and_convex(vs in vectors(), seed in 0u64..1000) {
            let words: Vec<String> = (0..vs.len()).map(|i| format!("w{i}")).collect();
            let table = EmbeddingTable::from_pairs(3, words.iter().cloned().zip(vs.clone())).unwrap();
            let c = centroid(&words, &table);
            let mut shuffled = words.clone();
            let n = shuffled.len();
            shuffled.rotate_left(seed as usize % n);
            shuffled.reverse();
            let c2 = centroid(&shuffled, &table);
            for d in 0..3 {
                prop_assert!((c.values[d] - c2.values[d]).abs() < 1e-9);
                let lo = vs.iter().map(|v| f64::from(v[d])).fold(f64::INFINITY, f64::min);
                let hi = vs.iter().map(|v| f64::from(v[d])).fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(c.values[d] >= lo - 1e-9 && c.values[d] <= hi + 1e-9);
            }
        }

        #[test]
        fn weighted_single_token_is_its_vector(v in prop::collection::vec(-5.0f32..5.0, 3), w in 0.001f64..10.0, reps in 1usize..5) {
            let table = EmbeddingTable::from_pairs(3, [("t", v.clone())]).unwrap();
            let tokens = vec!["t"; reps];
            let c = weighted_centroid(&tokens, &table, |_| w);
            for (c, v) in c.values.iter().zip(&v) {
                prop_assert!((c - f64::from(*v)).abs() < 1e-9);
            }
        }

        #[test]
        fn nearest_is_self_for_members(vs in vectors(), pick in 0usize..8) {
            let words: Vec<String> = (0..vs.len()).map(|i| format!("w{i}")).collect();
            let table = EmbeddingTable::from_pairs(3, words.iter().cloned().zip(vs)).unwrap();
            let target = &words[pick % words.len()];
            let candidates: BTreeSet<String> = words.iter().cloned().collect();
            let found = nearest_in_set(target, &table, &candidates);
            prop_assert_eq!(found.as_ref(), Some(target));
        }
    }
}
