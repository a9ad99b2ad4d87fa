//! Dependency trees and frequent-subtree features.
//!
//! Patterns are induced ordered subtrees: parent-child edges of the pattern
//! map onto parent-child edges of the tree, children keep their left-to-right
//! order (gaps between matched siblings are allowed) and node labels are the
//! lowercased word forms. Mining enumerates patterns by rightmost extension,
//! so each pattern is produced exactly once, and support counts trees rather
//! than occurrences.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepNode {
    pub form: String,
    /// Index of the head node within the sentence, `None` for the root.
    pub head: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<DepNode>", into = "Vec<DepNode>")]
pub struct DependencyTree {
    nodes: Vec<DepNode>,
    children: Vec<Vec<usize>>,
    root: usize,
}

impl DependencyTree {
    /// Validates that there is exactly one root and that head links are
    /// acyclic. Forms are lowercased.
    pub fn new(mut nodes: Vec<DepNode>) -> std::result::Result<Self, String> {
        if nodes.is_empty() {
            return Err("empty sentence".to_string());
        }
        for node in &mut nodes {
            node.form = node.form.to_lowercase();
        }
        let mut root = None;
        let mut children = vec![Vec::new(); nodes.len()];
        for (i, node) in nodes.iter().enumerate() {
            match node.head {
                None => {
                    if let Some(r) = root {
                        return Err(format!("multiple roots (nodes {} and {})", r + 1, i + 1));
                    }
                    root = Some(i);
                }
                Some(h) if h >= nodes.len() => {
                    return Err(format!("node {} has out-of-range head {}", i + 1, h + 1));
                }
                Some(h) if h == i => return Err(format!("node {} heads itself", i + 1)),
                Some(h) => children[h].push(i),
            }
        }
        let root = root.ok_or_else(|| "no root node".to_string())?;
        // Every node must reach the root without revisiting a node.
        for start in 0..nodes.len() {
            let mut cur = start;
            let mut steps = 0;
            while let Some(h) = nodes[cur].head {
                cur = h;
                steps += 1;
                if steps > nodes.len() {
                    return Err(format!("cycle through node {}", start + 1));
                }
            }
        }
        Ok(DependencyTree {
            nodes,
            children,
            root,
        })
    }

    /// Builds a tree from `(form, head)` pairs with CoNLL conventions: heads
    /// are 1-based and 0 marks the root.
    pub fn from_conll_heads(rows: &[(&str, usize)]) -> std::result::Result<Self, String> {
        let nodes = rows
            .iter()
            .map(|&(form, head)| DepNode {
                form: form.to_string(),
                head: head.checked_sub(1),
            })
            .collect();
        DependencyTree::new(nodes)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn form(&self, node: usize) -> &str {
        &self.nodes[node].form
    }

    pub fn head(&self, node: usize) -> Option<usize> {
        self.nodes[node].head
    }

    /// Children of `node` in surface order.
    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    pub fn nodes(&self) -> &[DepNode] {
        &self.nodes
    }
}

impl TryFrom<Vec<DepNode>> for DependencyTree {
    type Error = String;

    fn try_from(nodes: Vec<DepNode>) -> std::result::Result<Self, String> {
        DependencyTree::new(nodes)
    }
}

impl From<DependencyTree> for Vec<DepNode> {
    fn from(tree: DependencyTree) -> Self {
        tree.nodes
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyForest {
    pub post_id: String,
    pub sentences: Vec<DependencyTree>,
}

pub type Treebank = BTreeMap<String, DependencyForest>;

/// 0-based column positions of the fields the reader needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConllColumns {
    pub id: usize,
    pub form: usize,
    pub head: usize,
}

impl Default for ConllColumns {
    fn default() -> Self {
        ConllColumns {
            id: 0,
            form: 1,
            head: 6,
        }
    }
}

pub fn load_conll(path: &Path, columns: ConllColumns) -> Result<Treebank> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_conll(&content, columns)
}

/// Reads tab-separated CoNLL-X/CoNLL-U style blocks. A `# id = <post>`
/// comment binds the following sentence blocks to a post. Multiword ranges
/// (`3-4`) and empty nodes (`5.1`) are skipped. Tokens with head `-1` (left
/// out of the parse, as some tweet parsers do for punctuation) are dropped.
pub fn parse_conll(content: &str, columns: ConllColumns) -> Result<Treebank> {
    let mut treebank = Treebank::new();
    let mut current: Option<String> = None;
    let mut rows: Vec<(usize, String, i64)> = Vec::new();
    let mut block_start = 0;

    let flush = |current: &Option<String>,
                 rows: &mut Vec<(usize, String, i64)>,
                 line: usize,
                 treebank: &mut Treebank|
     -> Result<()> {
        if rows.is_empty() {
            return Ok(());
        }
        let post_id = current.clone().ok_or_else(|| Error::Parse {
            line,
            message: "sentence block before any `# id =` comment".to_string(),
        })?;
        let tree = build_tree(rows).map_err(|message| Error::InvalidTree {
            post_id: post_id.clone(),
            message,
        })?;
        rows.clear();
        if let Some(tree) = tree {
            treebank
                .entry(post_id.clone())
                .or_insert_with(|| DependencyForest {
                    post_id,
                    sentences: Vec::new(),
                })
                .sentences
                .push(tree);
        }
        Ok(())
    };

    for (i, raw) in content.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(&current, &mut rows, block_start, &mut treebank)?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "id" {
                    flush(&current, &mut rows, block_start, &mut treebank)?;
                    current = Some(value.trim().to_string());
                }
            }
            continue;
        }
        if rows.is_empty() {
            block_start = line_no;
        }
        let fields: Vec<&str> = if line.contains('\t') {
            line.split('\t').collect()
        } else {
            line.split_whitespace().collect()
        };
        let field = |col: usize, name: &str| {
            fields.get(col).copied().ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("missing {name} column {}", col + 1),
            })
        };
        let id = field(columns.id, "id")?;
        if id.contains('-') || id.contains('.') {
            continue;
        }
        let id: usize = id.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad token id {id:?}"),
        })?;
        let form = field(columns.form, "form")?.to_string();
        let head = field(columns.head, "head")?;
        let head: i64 = head.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad head {head:?}"),
        })?;
        rows.push((id, form, head));
    }
    flush(&current, &mut rows, block_start, &mut treebank)?;
    Ok(treebank)
}

fn build_tree(
    rows: &[(usize, String, i64)],
) -> std::result::Result<Option<DependencyTree>, String> {
    for (expected, (id, _, _)) in rows.iter().enumerate() {
        if *id != expected + 1 {
            return Err(format!(
                "token ids must run 1..n, found {id} at position {}",
                expected + 1
            ));
        }
    }
    // Map surviving 1-based ids to new 0-based positions.
    let mut remap = vec![None; rows.len() + 1];
    let mut next = 0;
    for (id, _, head) in rows {
        if *head >= 0 {
            remap[*id] = Some(next);
            next += 1;
        }
    }
    if next == 0 {
        return Ok(None);
    }
    let mut nodes = Vec::with_capacity(next);
    for (id, form, head) in rows {
        if *head < 0 {
            continue;
        }
        let head = match *head as usize {
            0 => None,
            h if h > rows.len() => return Err(format!("node {id} has out-of-range head {h}")),
            h => Some(remap[h].ok_or_else(|| format!("node {id} depends on excluded node {h}"))?),
        };
        nodes.push(DepNode {
            form: form.clone(),
            head,
        });
    }
    DependencyTree::new(nodes).map(Some)
}

/// An ordered labeled tree stored as its preorder `(depth, label)` sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PatternShape(pub Vec<(u32, String)>);

impl PatternShape {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Children of each preorder position, in order.
    pub fn child_lists(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.0.len()];
        let mut stack: Vec<usize> = Vec::new();
        for (i, (depth, _)) in self.0.iter().enumerate() {
            stack.truncate(*depth as usize);
            if let Some(&parent) = stack.last() {
                children[parent].push(i);
            }
            stack.push(i);
        }
        children
    }

    /// Preorder positions from the root down to the last node.
    fn rightmost_path(&self) -> Vec<usize> {
        let mut path: Vec<usize> = Vec::new();
        for (i, (depth, _)) in self.0.iter().enumerate() {
            path.truncate(*depth as usize);
            path.push(i);
        }
        path
    }
}

impl fmt::Display for PatternShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let children = self.child_lists();
        fn write(
            f: &mut fmt::Formatter<'_>,
            shape: &PatternShape,
            children: &[Vec<usize>],
            node: usize,
        ) -> fmt::Result {
            f.write_str(&shape.0[node].1)?;
            if !children[node].is_empty() {
                f.write_str("(")?;
                for (i, &c) in children[node].iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write(f, shape, children, c)?;
                }
                f.write_str(")")?;
            }
            Ok(())
        }
        if self.0.is_empty() {
            return Ok(());
        }
        write(f, self, &children, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtreePattern {
    pub shape: PatternShape,
    pub support: usize,
    pub feature_index: usize,
}

impl SubtreePattern {
    pub fn size(&self) -> usize {
        self.shape.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiningOptions {
    pub min_support: usize,
    pub min_size: usize,
    /// Upper bound on pattern size; `None` mines without a cap.
    pub max_size: Option<usize>,
}

impl Default for MiningOptions {
    fn default() -> Self {
        MiningOptions {
            min_support: 10,
            min_size: 2,
            max_size: None,
        }
    }
}

struct Occurrence {
    tree: usize,
    images: Vec<usize>,
}

/// Every induced ordered subtree with document support `>= min_support` and
/// at least `min_size` nodes. Patterns come out in depth-first enumeration
/// order and `feature_index` is their position in the returned vector.
pub fn mine_frequent_subtrees(
    trees: &[&DependencyTree],
    options: MiningOptions,
) -> Vec<SubtreePattern> {
    let min_support = options.min_support.max(1);
    let mut seeds: BTreeMap<&str, Vec<Occurrence>> = BTreeMap::new();
    for (t, tree) in trees.iter().enumerate() {
        for node in 0..tree.len() {
            seeds.entry(tree.form(node)).or_default().push(Occurrence {
                tree: t,
                images: vec![node],
            });
        }
    }
    let mut out = Vec::new();
    for (label, occurrences) in seeds {
        if support(&occurrences) >= min_support {
            let shape = PatternShape(vec![(0, label.to_string())]);
            grow(trees, shape, occurrences, min_support, &options, &mut out);
        }
    }
    for (i, pattern) in out.iter_mut().enumerate() {
        pattern.feature_index = i;
    }
    out
}

fn support(occurrences: &[Occurrence]) -> usize {
    // Occurrences are grouped by tree in ascending order.
    let mut count = 0;
    let mut last = None;
    for occ in occurrences {
        if last != Some(occ.tree) {
            count += 1;
            last = Some(occ.tree);
        }
    }
    count
}

fn grow(
    trees: &[&DependencyTree],
    shape: PatternShape,
    occurrences: Vec<Occurrence>,
    min_support: usize,
    options: &MiningOptions,
    out: &mut Vec<SubtreePattern>,
) {
    let support_count = support(&occurrences);
    if shape.len() >= options.min_size {
        out.push(SubtreePattern {
            shape: shape.clone(),
            support: support_count,
            feature_index: 0,
        });
    }
    if options.max_size.is_some_and(|m| shape.len() >= m) {
        return;
    }
    let path = shape.rightmost_path();
    let mut extensions: BTreeMap<(u32, &str), Vec<Occurrence>> = BTreeMap::new();
    for occ in &occurrences {
        let tree = trees[occ.tree];
        for (depth, &pos) in path.iter().enumerate() {
            let anchor = occ.images[pos];
            // A new child must sit right of the anchor's current last child.
            let lower = path.get(depth + 1).map(|&p| occ.images[p]);
            for &child in tree.children(anchor) {
                if lower.is_some_and(|l| child <= l) {
                    continue;
                }
                let mut images = occ.images.clone();
                images.push(child);
                extensions
                    .entry((depth as u32 + 1, tree.form(child)))
                    .or_default()
                    .push(Occurrence {
                        tree: occ.tree,
                        images,
                    });
            }
        }
    }
    for ((depth, label), occs) in extensions {
        if support(&occs) >= min_support {
            let mut next = shape.clone();
            next.0.push((depth, label.to_string()));
            grow(trees, next, occs, min_support, options, out);
        }
    }
}

/// True iff `shape` embeds into `tree` as an induced ordered subtree.
pub fn contains(tree: &DependencyTree, shape: &PatternShape) -> bool {
    if shape.is_empty() {
        return true;
    }
    let children = shape.child_lists();
    (0..tree.len()).any(|t| matches_at(tree, shape, &children, 0, t))
}

fn matches_at(
    tree: &DependencyTree,
    shape: &PatternShape,
    pattern_children: &[Vec<usize>],
    p: usize,
    t: usize,
) -> bool {
    if shape.0[p].1 != tree.form(t) {
        return false;
    }
    // Leftmost greedy placement of each pattern child is optimal: it leaves
    // the most room for the remaining siblings.
    let mut candidates = tree.children(t).iter();
    'outer: for &pc in &pattern_children[p] {
        for &tc in candidates.by_ref() {
            if matches_at(tree, shape, pattern_children, pc, tc) {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Mined patterns indexed by root label for feature extraction.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<SubtreePattern>", into = "Vec<SubtreePattern>")]
pub struct PatternSet {
    patterns: Vec<SubtreePattern>,
    by_root: HashMap<String, Vec<usize>>,
}

impl PatternSet {
    pub fn new(patterns: Vec<SubtreePattern>) -> Self {
        let mut by_root: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, p) in patterns.iter().enumerate() {
            by_root.entry(p.shape.0[0].1.clone()).or_default().push(i);
        }
        PatternSet { patterns, by_root }
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn patterns(&self) -> &[SubtreePattern] {
        &self.patterns
    }

    /// Sorted feature indices of the patterns found in any sentence.
    pub fn features(&self, forest: Option<&DependencyForest>) -> Vec<usize> {
        let Some(forest) = forest else {
            return Vec::new();
        };
        let mut found = BTreeSet::new();
        for tree in &forest.sentences {
            let roots: BTreeSet<&str> = (0..tree.len()).map(|n| tree.form(n)).collect();
            for root in roots {
                for &i in self.by_root.get(root).into_iter().flatten() {
                    let pattern = &self.patterns[i];
                    if !found.contains(&pattern.feature_index) && contains(tree, &pattern.shape) {
                        found.insert(pattern.feature_index);
                    }
                }
            }
        }
        found.into_iter().collect()
    }
}

impl From<Vec<SubtreePattern>> for PatternSet {
    fn from(patterns: Vec<SubtreePattern>) -> Self {
        PatternSet::new(patterns)
    }
}

impl From<PatternSet> for Vec<SubtreePattern> {
    fn from(set: PatternSet) -> Self {
        set.patterns
    }
}

pub fn subtree_features(forest: Option<&DependencyForest>, patterns: &PatternSet) -> Vec<usize> {
    patterns.features(forest)
}

/// Mines positive and negative trees separately and merges the two pattern
/// sets; supports are recounted over all trees.
pub fn mine_per_class(
    positive: &[&DependencyTree],
    negative: &[&DependencyTree],
    options: MiningOptions,
) -> Vec<SubtreePattern> {
    let mut shapes: BTreeSet<PatternShape> = BTreeSet::new();
    for trees in [positive, negative] {
        shapes.extend(
            mine_frequent_subtrees(trees, options)
                .into_iter()
                .map(|p| p.shape),
        );
    }
    shapes
        .into_iter()
        .enumerate()
        .map(|(i, shape)| {
            let support = positive
                .iter()
                .chain(negative)
                .filter(|t| contains(t, &shape))
                .count();
            SubtreePattern {
                shape,
                support,
                feature_index: i,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(rows: &[(&str, usize)]) -> DependencyTree {
        DependencyTree::from_conll_heads(rows).unwrap()
    }

    fn shape(nodes: &[(u32, &str)]) -> PatternShape {
        PatternShape(nodes.iter().map(|&(d, l)| (d, l.to_string())).collect())
    }

    fn opts(min_support: usize, min_size: usize) -> MiningOptions {
        MiningOptions {
            min_support,
            min_size,
            max_size: None,
        }
    }

    #[test]
    fn conll_blocks() {
        let data = "# id = t1\n1\tMy\t_\t_\t_\t_\t2\t_\t_\t_\n2\tMom\t_\t_\t_\t_\t0\t_\t_\t_\n\n\
                    1\tsick\t_\t_\t_\t_\t0\t_\t_\t_\n\n";
        let tb = parse_conll(data, ConllColumns::default()).unwrap();
        let forest = &tb["t1"];
        assert_eq!(forest.sentences.len(), 2);
        assert_eq!(forest.sentences[0].form(0), "my");
        assert_eq!(forest.sentences[0].head(0), Some(1));
        assert!(parse_conll("", ConllColumns::default()).unwrap().is_empty());
    }

    #[test]
    fn conll_cycle_and_multi_root() {
        let cycle = "# id = t9\n1\ta\t_\t_\t_\t_\t2\n2\tb\t_\t_\t_\t_\t1\n";
        assert!(matches!(
            parse_conll(cycle, ConllColumns::default()),
            Err(Error::InvalidTree { post_id, .. }) if post_id == "t9"
        ));
        let two_roots = "# id = t2\n1\ta\t_\t_\t_\t_\t0\n2\tb\t_\t_\t_\t_\t0\n";
        assert!(matches!(
            parse_conll(two_roots, ConllColumns::default()),
            Err(Error::InvalidTree { .. })
        ));
        assert!(matches!(
            parse_conll("1\ta\t_\t_\t_\t_\t0\n", ConllColumns::default()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn conll_excluded_tokens_and_custom_columns() {
        let data = "# id = t1\n1 i 2\n2 got 0\n3 ! -1\n4 flu 2\n";
        let cols = ConllColumns {
            id: 0,
            form: 1,
            head: 2,
        };
        let tb = parse_conll(data, cols).unwrap();
        let t = &tb["t1"].sentences[0];
        assert_eq!(t.len(), 3);
        assert_eq!(t.form(2), "flu");
        assert_eq!(t.children(1), &[0, 2]);
    }

    #[test]
    fn contains_examples() {
        let ab = tree(&[("a", 0), ("b", 1)]);
        assert!(contains(&ab, &shape(&[(0, "a"), (1, "b")])));
        assert!(!contains(&ab, &shape(&[(0, "b"), (1, "a")])));
        let abc = tree(&[("a", 0), ("b", 1), ("c", 1)]);
        assert!(contains(&abc, &shape(&[(0, "a"), (1, "b"), (1, "c")])));
        assert!(!contains(&abc, &shape(&[(0, "a"), (1, "c"), (1, "b")])));
        // siblings may skip over unmatched children
        let abxc = tree(&[("a", 0), ("b", 1), ("x", 1), ("c", 1)]);
        assert!(contains(&abxc, &shape(&[(0, "a"), (1, "b"), (1, "c")])));
        // but not ancestor-descendant gaps
        let axb = tree(&[("a", 0), ("x", 1), ("b", 2)]);
        assert!(!contains(&axb, &shape(&[(0, "a"), (1, "b")])));
    }

    #[test]
    fn contains_greedy_sibling_placement() {
        // a(b(c) b) with pattern a(b(c)): the first b matches.
        let t = tree(&[("a", 0), ("b", 1), ("c", 2), ("b", 1)]);
        assert!(contains(&t, &shape(&[(0, "a"), (1, "b"), (2, "c")])));
        // a(b b(c)) with pattern a(b b(c)): greedy must skip nothing wrongly.
        let t = tree(&[("a", 0), ("b", 1), ("b", 1), ("c", 3)]);
        assert!(contains(
            &t,
            &shape(&[(0, "a"), (1, "b"), (1, "b"), (2, "c")])
        ));
        assert!(!contains(
            &t,
            &shape(&[(0, "a"), (1, "b"), (2, "c"), (1, "b")])
        ));
    }

    #[test]
    fn mining_identical_trees() {
        let t = tree(&[("a", 0), ("b", 1)]);
        let trees = vec![&t, &t, &t];
        let patterns = mine_frequent_subtrees(&trees, opts(2, 2));
        assert_eq!(patterns.len(), 1);
        assert_eq!(patterns[0].shape, shape(&[(0, "a"), (1, "b")]));
        assert_eq!(patterns[0].support, 3);
    }

    #[test]
    fn mining_unreachable_support_and_no_shared() {
        let t = tree(&[("a", 0), ("b", 1)]);
        assert!(mine_frequent_subtrees(&[&t, &t], opts(3, 1)).is_empty());
        let u = tree(&[("a", 0), ("c", 1)]);
        assert!(mine_frequent_subtrees(&[&t, &u], opts(2, 2)).is_empty());
        let singles = mine_frequent_subtrees(&[&t, &u], opts(2, 1));
        assert_eq!(singles.len(), 1);
        assert_eq!(singles[0].shape, shape(&[(0, "a")]));
    }

    #[test]
    fn support_counts_trees_not_occurrences() {
        let t = tree(&[("a", 0), ("b", 1), ("b", 1)]);
        let patterns = mine_frequent_subtrees(&[&t], opts(1, 2));
        let ab = patterns
            .iter()
            .find(|p| p.shape == shape(&[(0, "a"), (1, "b")]))
            .unwrap();
        assert_eq!(ab.support, 1);
        let abb = patterns
            .iter()
            .find(|p| p.shape == shape(&[(0, "a"), (1, "b"), (1, "b")]))
            .unwrap();
        assert_eq!(abb.support, 1);
        assert_eq!(patterns.len(), 2);
    }

    #[test]
    fn max_size_caps_growth() {
        let t = tree(&[("a", 0), ("b", 1), ("c", 2)]);
        let capped = mine_frequent_subtrees(
            &[&t],
            MiningOptions {
                min_support: 1,
                min_size: 1,
                max_size: Some(2),
            },
        );
        assert!(capped.iter().all(|p| p.size() <= 2));
        assert_eq!(capped.len(), 5);
    }

    #[test]
    fn features_examples() {
        let ab = tree(&[("a", 0), ("b", 1)]);
        let mut pattern = SubtreePattern {
            shape: shape(&[(0, "a"), (1, "b")]),
            support: 3,
            feature_index: 7,
        };
        let set = PatternSet::new(vec![pattern.clone()]);
        let forest = DependencyForest {
            post_id: "t".into(),
            sentences: vec![ab.clone(), ab.clone()],
        };
        assert_eq!(subtree_features(Some(&forest), &set), vec![7]);
        assert!(subtree_features(None, &set).is_empty());
        pattern.shape = shape(&[(0, "b"), (1, "a")]);
        assert!(subtree_features(Some(&forest), &PatternSet::new(vec![pattern])).is_empty());
    }

    #[test]
    fn per_class_union() {
        let ab = tree(&[("a", 0), ("b", 1)]);
        let ac = tree(&[("a", 0), ("c", 1)]);
        let patterns = mine_per_class(&[&ab, &ab], &[&ac, &ac, &ab], opts(2, 2));
        let shapes: Vec<String> = patterns.iter().map(|p| p.shape.to_string()).collect();
        assert_eq!(shapes, vec!["a(b)", "a(c)"]);
        assert_eq!(patterns[0].support, 3);
    }

    #[test]
    fn shape_display() {
        assert_eq!(
            shape(&[(0, "a"), (1, "b"), (2, "d"), (1, "c")]).to_string(),
            "a(b(d) c)"
        );
    }
}
