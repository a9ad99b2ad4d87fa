//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use wespad::corpus::{Corpus, Label, Post};
use wespad::treebank::{DependencyTree, PatternShape};

/// Entropy in bits of a label multiset, straight from `-sum p log2 p`.
pub fn entropy(labels: &[bool]) -> f64 {
    let n = labels.len() as f64;
    if labels.is_empty() {
        return 0.0;
    }
    let pos = labels.iter().filter(|&&y| y).count() as f64;
    [pos, n - pos]
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| -(c / n) * (c / n).log2())
        .sum()
}

/// Information gain of every word from explicit document partitions.
pub fn brute_force_ig(docs: &[(Vec<String>, bool)]) -> BTreeMap<String, f64> {
    let all: Vec<bool> = docs.iter().map(|d| d.1).collect();
    let words: BTreeSet<&String> = docs.iter().flat_map(|d| d.0.iter()).collect();
    let n = docs.len() as f64;
    words
        .into_iter()
        .map(|w| {
            let with: Vec<bool> = docs
                .iter()
                .filter(|d| d.0.contains(w))
                .map(|d| d.1)
                .collect();
            let without: Vec<bool> = docs
                .iter()
                .filter(|d| !d.0.contains(w))
                .map(|d| d.1)
                .collect();
            let gain = entropy(&all)
                - with.len() as f64 / n * entropy(&with)
                - without.len() as f64 / n * entropy(&without);
            (w.clone(), gain)
        })
        .collect()
}

pub fn corpus_of(docs: &[(Vec<String>, bool)]) -> Corpus {
    Corpus::new(
        docs.iter()
            .enumerate()
            .map(|(i, (tokens, y))| {
                Post::new(format!("d{i}"), tokens.join(" "), Label::from_bool(*y))
            })
            .collect(),
    )
    .unwrap()
}

/// A tree with `n` nodes and labels drawn from `alphabet`; node ids are a
/// random permutation of the attachment order so heads may point forward.
pub fn random_tree(rng: &mut impl Rng, n: usize, alphabet: &[&str]) -> DependencyTree {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut heads = vec![0usize; n];
    for k in 1..n {
        let parent = order[rng.random_range(0..k)];
        heads[order[k]] = parent + 1;
    }
    let rows: Vec<(&str, usize)> = (0..n)
        .map(|i| (alphabet[rng.random_range(0..alphabet.len())], heads[i]))
        .collect();
    DependencyTree::from_conll_heads(&rows).unwrap()
}

fn shape_of(tree: &DependencyTree, subset: u32) -> Option<PatternShape> {
    let inside = |v: usize| subset & (1 << v) != 0;
    let roots: Vec<usize> = (0..tree.len())
        .filter(|&v| inside(v) && tree.head(v).is_none_or(|h| !inside(h)))
        .collect();
    if roots.len() != 1 {
        return None;
    }
    let mut shape = Vec::new();
    let mut stack = vec![(roots[0], 0u32)];
    while let Some((v, depth)) = stack.pop() {
        shape.push((depth, tree.form(v).to_string()));
        for &c in tree.children(v).iter().rev() {
            if inside(c) {
                stack.push((c, depth + 1));
            }
        }
    }
    Some(PatternShape(shape))
}

/// Every induced ordered subtree of every tree, found by trying all node
/// subsets, with the number of trees containing it.
pub fn enumerate_subtrees(trees: &[DependencyTree]) -> BTreeMap<PatternShape, usize> {
    let mut support: BTreeMap<PatternShape, usize> = BTreeMap::new();
    for tree in trees {
        assert!(tree.len() < 16);
        let mut seen = BTreeSet::new();
        for subset in 1u32..(1 << tree.len()) {
            if let Some(shape) = shape_of(tree, subset) {
                seen.insert(shape);
            }
        }
        for shape in seen {
            *support.entry(shape).or_default() += 1;
        }
    }
    support
}
