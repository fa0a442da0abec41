//! Decision trees: evaluation, exact minimum-depth search, reduction.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::boolfn::BooleanFunction;
use crate::error::{Error, Result};

/// Cap for the memoized minimum-depth search (`3^n` restriction states).
pub const MIN_DEPTH_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf(bool),
    Query {
        var: usize,
        zero: Box<TreeNode>,
        one: Box<TreeNode>,
    },
}

/// A binary decision tree over `arity` variables. No variable repeats on any
/// root-to-leaf path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionTree {
    arity: usize,
    root: TreeNode,
}

/// One root-to-leaf path: the queried variables with the values taken, plus
/// the leaf bit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreePath {
    pub steps: Vec<(usize, bool)>,
    pub leaf: bool,
}

impl TreePath {
    /// The variables queried along the path.
    pub fn variables(&self) -> BTreeSet<usize> {
        self.steps.iter().map(|&(v, _)| v).collect()
    }

    pub fn value_of(&self, var: usize) -> Option<bool> {
        self.steps.iter().find(|&&(v, _)| v == var).map(|&(_, b)| b)
    }
}

impl TreeNode {
    fn check(&self, arity: usize, seen: &mut Vec<bool>) -> Result<()> {
        match self {
            TreeNode::Leaf(_) => Ok(()),
            TreeNode::Query { var, zero, one } => {
                if *var >= arity {
                    return Err(Error::InvalidParameter(format!(
                        "tree queries variable {var} but arity is {arity}"
                    )));
                }
                if seen[*var] {
                    return Err(Error::InvalidParameter(format!(
                        "variable {var} repeats on a root-to-leaf path"
                    )));
                }
                seen[*var] = true;
                zero.check(arity, seen)?;
                one.check(arity, seen)?;
                seen[*var] = false;
                Ok(())
            }
        }
    }

    fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 0,
            TreeNode::Query { zero, one, .. } => 1 + zero.depth().max(one.depth()),
        }
    }

    fn eval(&self, lookup: &impl Fn(usize) -> bool) -> bool {
        match self {
            TreeNode::Leaf(b) => *b,
            TreeNode::Query { var, zero, one } => {
                if lookup(*var) {
                    one.eval(lookup)
                } else {
                    zero.eval(lookup)
                }
            }
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        if let TreeNode::Query { var, zero, one } = self {
            out.insert(*var);
            zero.collect_vars(out);
            one.collect_vars(out);
        }
    }

    fn collect_paths(&self, prefix: &mut Vec<(usize, bool)>, out: &mut Vec<TreePath>) {
        match self {
            TreeNode::Leaf(b) => out.push(TreePath {
                steps: prefix.clone(),
                leaf: *b,
            }),
            TreeNode::Query { var, zero, one } => {
                prefix.push((*var, false));
                zero.collect_paths(prefix, out);
                prefix.pop();
                prefix.push((*var, true));
                one.collect_paths(prefix, out);
                prefix.pop();
            }
        }
    }
}

impl DecisionTree {
    pub fn new(arity: usize, root: TreeNode) -> Result<Self> {
        let mut seen = vec![false; arity];
        root.check(arity, &mut seen)?;
        Ok(Self { arity, root })
    }

    pub fn leaf(arity: usize, value: bool) -> Self {
        Self {
            arity,
            root: TreeNode::Leaf(value),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    /// Longest root-to-leaf path, counted in queries.
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn evaluate(&self, input: &[bool]) -> Result<bool> {
        if input.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: input.len(),
            });
        }
        Ok(self.root.eval(&|v| input[v]))
    }

    /// Evaluate with variables given as a little-endian index (arity <= 64).
    pub fn evaluate_index(&self, k: u64) -> bool {
        debug_assert!(self.arity <= 64);
        self.root.eval(&|v| (k >> v) & 1 == 1)
    }

    pub fn queried_variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.root.collect_vars(&mut out);
        out
    }

    pub fn paths(&self) -> Vec<TreePath> {
        let mut out = Vec::new();
        self.root.collect_paths(&mut Vec::new(), &mut out);
        out
    }

    /// Follow the tree under a variable lookup, recording the path taken.
    pub fn trace(&self, lookup: impl Fn(usize) -> bool) -> TreePath {
        let mut steps = Vec::new();
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf(b) => {
                    return TreePath {
                        steps,
                        leaf: *b,
                    }
                }
                TreeNode::Query { var, zero, one } => {
                    let v = lookup(*var);
                    steps.push((*var, v));
                    node = if v { one } else { zero };
                }
            }
        }
    }

    /// Materialize the computed function as a truth table.
    pub fn to_function(&self) -> Result<BooleanFunction> {
        BooleanFunction::from_fn(self.arity, |k| self.evaluate_index(k))
    }

    /// Remove every query whose two child subtrees compute the same function
    /// of the free variables. Depth never increases.
    pub fn reduced(&self) -> Result<Self> {
        fn go(node: &TreeNode, arity: usize) -> Result<(TreeNode, BooleanFunction)> {
            match node {
                TreeNode::Leaf(b) => Ok((TreeNode::Leaf(*b), BooleanFunction::constant(arity, *b)?)),
                TreeNode::Query { var, zero, one } => {
                    let (z_node, z_fn) = go(zero, arity)?;
                    let (o_node, o_fn) = go(one, arity)?;
                    if z_fn == o_fn {
                        return Ok((z_node, z_fn));
                    }
                    let bit = 1u64 << *var;
                    let combined = BooleanFunction::from_fn(arity, |k| {
                        if k & bit != 0 {
                            o_fn.value(k)
                        } else {
                            z_fn.value(k)
                        }
                    })?;
                    Ok((
                        TreeNode::Query {
                            var: *var,
                            zero: Box::new(z_node),
                            one: Box::new(o_node),
                        },
                        combined,
                    ))
                }
            }
        }
        let (root, _) = go(&self.root, self.arity)?;
        Ok(Self {
            arity: self.arity,
            root,
        })
    }
}

/// Restriction state for the minimum-depth search: which variables are fixed
/// and to what. Free-variable choice is canonical (lowest index wins ties),
/// so the search result is reproducible.
type StateKey = (u64, u64);

struct DepthSearch<'a> {
    f: &'a BooleanFunction,
    memo: HashMap<StateKey, SearchEntry>,
}

#[derive(Clone, Copy)]
enum SearchEntry {
    Constant(bool),
    Split { var: usize, depth: usize },
}

impl<'a> DepthSearch<'a> {
    /// Value of the restricted function if constant.
    fn constant_value(&self, fixed: u64, vals: u64) -> Option<bool> {
        let n = self.f.arity();
        let free: Vec<usize> = (0..n).filter(|i| fixed & (1 << i) == 0).collect();
        let first = self.f.value(vals);
        for y in 1u64..(1 << free.len()) {
            let mut k = vals;
            for (b, &pos) in free.iter().enumerate() {
                if (y >> b) & 1 == 1 {
                    k |= 1 << pos;
                }
            }
            if self.f.value(k) != first {
                return None;
            }
        }
        Some(first)
    }

    fn solve(&mut self, fixed: u64, vals: u64) -> usize {
        if let Some(entry) = self.memo.get(&(fixed, vals)) {
            return match entry {
                SearchEntry::Constant(_) => 0,
                SearchEntry::Split { depth, .. } => *depth,
            };
        }
        if let Some(v) = self.constant_value(fixed, vals) {
            self.memo.insert((fixed, vals), SearchEntry::Constant(v));
            return 0;
        }
        let n = self.f.arity();
        let mut best_depth = usize::MAX;
        let mut best_var = 0;
        for i in 0..n {
            let bit = 1u64 << i;
            if fixed & bit != 0 {
                continue;
            }
            let d0 = self.solve(fixed | bit, vals);
            let d1 = self.solve(fixed | bit, vals | bit);
            let d = 1 + d0.max(d1);
            if d < best_depth {
                best_depth = d;
                best_var = i;
            }
        }
        self.memo.insert(
            (fixed, vals),
            SearchEntry::Split {
                var: best_var,
                depth: best_depth,
            },
        );
        best_depth
    }

    fn build(&self, fixed: u64, vals: u64) -> TreeNode {
        match self.memo[&(fixed, vals)] {
            SearchEntry::Constant(v) => TreeNode::Leaf(v),
            SearchEntry::Split { var, .. } => {
                let bit = 1u64 << var;
                TreeNode::Query {
                    var,
                    zero: Box::new(self.build(fixed | bit, vals)),
                    one: Box::new(self.build(fixed | bit, vals | bit)),
                }
            }
        }
    }
}

impl BooleanFunction {
    /// Exact minimum decision-tree depth `D(f)`.
    pub fn min_depth(&self) -> Result<usize> {
        Ok(self.min_depth_tree()?.depth())
    }

    /// A minimum-depth decision tree for `f`, found by memoized search over
    /// restriction states. Ties between splitting variables break towards
    /// the lowest index.
    pub fn min_depth_tree(&self) -> Result<DecisionTree> {
        if self.arity() > MIN_DEPTH_CAP {
            return Err(Error::ArityCap {
                what: "minimum-depth tree search",
                arity: self.arity(),
                cap: MIN_DEPTH_CAP,
            });
        }
        let mut search = DepthSearch {
            f: self,
            memo: HashMap::new(),
        };
        search.solve(0, 0);
        let root = search.build(0, 0);
        DecisionTree::new(self.arity(), root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bf(spec: &str) -> BooleanFunction {
        BooleanFunction::parse_spec(spec).unwrap()
    }

    #[test]
    fn min_depth_dictator() {
        let f = BooleanFunction::from_fn(3, |k| k & 2 != 0).unwrap();
        let t = f.min_depth_tree().unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(t.to_function().unwrap(), f);
    }

    #[test]
    fn min_depth_or3_is_evasive() {
        let t = bf("OR:3").min_depth_tree().unwrap();
        assert_eq!(t.depth(), 3);
        assert_eq!(t.to_function().unwrap(), bf("OR:3"));
    }

    #[test]
    fn min_depth_addressing() {
        let f = BooleanFunction::addressing(2).unwrap();
        let t = f.min_depth_tree().unwrap();
        assert_eq!(t.depth(), 3);
        assert_eq!(t.to_function().unwrap(), f);
    }

    #[test]
    fn min_depth_constant_and_cap() {
        let c = BooleanFunction::constant(4, true).unwrap();
        assert_eq!(c.min_depth().unwrap(), 0);
        let big = BooleanFunction::or(MIN_DEPTH_CAP + 1).unwrap();
        assert!(big.min_depth_tree().is_err());
    }

    #[test]
    fn reduce_prunes_irrelevant_query() {
        // query x0 above two identical leaves
        let node = TreeNode::Query {
            var: 0,
            zero: Box::new(TreeNode::Leaf(true)),
            one: Box::new(TreeNode::Leaf(true)),
        };
        let t = DecisionTree::new(2, node).unwrap();
        let r = t.reduced().unwrap();
        assert_eq!(r.depth(), 0);
        assert_eq!(r.to_function().unwrap(), t.to_function().unwrap());
    }

    #[test]
    fn reduce_keeps_reduced_tree() {
        let t = bf("XOR:2").min_depth_tree().unwrap();
        let r = t.reduced().unwrap();
        assert_eq!(r, t);
    }

    #[test]
    fn reduced_addressing_tree_has_distinct_children() {
        let t = BooleanFunction::addressing(2)
            .unwrap()
            .min_depth_tree()
            .unwrap()
            .reduced()
            .unwrap();
        assert_eq!(t.depth(), 3);
        // every internal node's children compute distinct functions
        fn check(node: &TreeNode, arity: usize) {
            if let TreeNode::Query { zero, one, .. } = node {
                let fz = DecisionTree::new(arity, (**zero).clone()).unwrap();
                let fo = DecisionTree::new(arity, (**one).clone()).unwrap();
                assert_ne!(fz.to_function().unwrap(), fo.to_function().unwrap());
                check(zero, arity);
                check(one, arity);
            }
        }
        check(t.root(), t.arity());
    }

    #[test]
    fn rejects_repeated_variable_on_path() {
        let node = TreeNode::Query {
            var: 0,
            zero: Box::new(TreeNode::Query {
                var: 0,
                zero: Box::new(TreeNode::Leaf(false)),
                one: Box::new(TreeNode::Leaf(true)),
            }),
            one: Box::new(TreeNode::Leaf(true)),
        };
        assert!(DecisionTree::new(2, node).is_err());
    }

    #[test]
    fn paths_and_trace_agree() {
        let t = bf("MAJ:3").min_depth_tree().unwrap();
        for k in 0u64..8 {
            let traced = t.trace(|v| (k >> v) & 1 == 1);
            assert_eq!(traced.leaf, t.evaluate_index(k));
            assert!(t.paths().contains(&traced));
        }
    }
}
