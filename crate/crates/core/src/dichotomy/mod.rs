//! Class-subset selection, multiple subset evaluation and nested
//! dichotomy construction.

mod select;
mod strategies;
mod tree;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use select::{evaluate_split, select_split, split_rmse, Candidate, NodeView, SplitSelection};
pub use strategies::{draw_split, random_pair_split, sample_balanced_split, sample_random_split};
pub use tree::{build_nd, build_tree, nd_predict, NestedDichotomy, Node, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Uniform over all nested dichotomies.
    Random,
    /// Side sizes differ by at most one.
    Balanced,
    /// Grouping driven by a classifier trained on a random class pair.
    RandomPair,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Strategy::Random),
            "balanced" => Ok(Strategy::Balanced),
            "random-pair" | "random_pair" => Ok(Strategy::RandomPair),
            other => Err(Error::usage(format!("unknown strategy '{other}'"))),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::Random => "random",
            Strategy::Balanced => "balanced",
            Strategy::RandomPair => "random-pair",
        })
    }
}

/// Ordered set of distinct class indices present at a node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ClassSet(Vec<usize>);

impl ClassSet {
    pub fn new(members: Vec<usize>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::usage("class set must be non-empty"));
        }
        let mut sorted = members.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::usage("class set has duplicates"));
        }
        Ok(ClassSet(members))
    }

    /// `{0, 1, ..., n - 1}`.
    pub fn range(n: usize) -> Self {
        ClassSet((0..n).collect())
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: usize) -> bool {
        self.0.contains(&c)
    }
}

impl TryFrom<Vec<usize>> for ClassSet {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        ClassSet::new(v)
    }
}

impl From<ClassSet> for Vec<usize> {
    fn from(c: ClassSet) -> Self {
        c.0
    }
}

/// Two-way partition of a node's classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassSplit {
    pub left: ClassSet,
    pub right: ClassSet,
}

impl ClassSplit {
    /// Validates that the sides are disjoint and together equal `parent`.
    pub fn new(left: ClassSet, right: ClassSet, parent: &ClassSet) -> Result<Self> {
        if left.members().iter().any(|c| right.contains(*c)) {
            return Err(Error::usage("split sides overlap"));
        }
        if left.len() + right.len() != parent.len()
            || !left
                .members()
                .iter()
                .chain(right.members())
                .all(|c| parent.contains(*c))
        {
            return Err(Error::usage("split sides do not cover the parent set"));
        }
        Ok(ClassSplit { left, right })
    }

    /// Splits `parent` into the members satisfying `on_left` and the rest,
    /// keeping `parent`'s order on both sides.
    pub(crate) fn partition(parent: &ClassSet, on_left: impl Fn(usize) -> bool) -> Self {
        let (l, r): (Vec<usize>, Vec<usize>) = parent.members().iter().partition(|&&c| on_left(c));
        ClassSplit {
            left: ClassSet(l),
            right: ClassSet(r),
        }
    }

    pub fn side_of(&self, class: usize) -> Option<crate::learner::Side> {
        if self.left.contains(class) {
            Some(crate::learner::Side::Left)
        } else if self.right.contains(class) {
            Some(crate::learner::Side::Right)
        } else {
            None
        }
    }

    /// Unordered identity: the sides as sorted vectors, smaller-first-element side first.
    pub fn canonical(&self) -> (Vec<usize>, Vec<usize>) {
        let mut a = self.left.members().to_vec();
        let mut b = self.right.members().to_vec();
        a.sort_unstable();
        b.sort_unstable();
        if a[0] < b[0] {
            (a, b)
        } else {
            (b, a)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitterSpec {
    pub strategy: Strategy,
    /// Number of candidate splits evaluated per node.
    pub lambda: usize,
    /// Nodes with fewer classes than this draw a single candidate.
    pub class_threshold: usize,
    pub seed: u64,
}

impl SplitterSpec {
    pub fn new(strategy: Strategy, lambda: usize) -> Self {
        SplitterSpec {
            strategy,
            lambda,
            class_threshold: 1,
            seed: crate::seed::DEFAULT_SEED,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SplitterSpec { seed, ..self }
    }

    pub fn with_class_threshold(self, class_threshold: usize) -> Self {
        SplitterSpec {
            class_threshold,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0 {
            return Err(Error::usage("lambda must be at least 1"));
        }
        if self.class_threshold == 0 {
            return Err(Error::usage("class threshold must be at least 1"));
        }
        Ok(())
    }

    /// Candidates drawn at a node holding `n_classes` classes.
    pub fn candidates_for(&self, n_classes: usize) -> usize {
        if n_classes >= self.class_threshold {
            self.lambda
        } else {
            1
        }
    }
}

/// `counts[p][c]`: instances of class `c` that the pair classifier assigned
/// to pair member `p` (0 for `c1`, 1 for `c2`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub classes: Vec<usize>,
    pub counts: [Vec<usize>; 2],
}

impl ConfusionCounts {
    pub fn new(classes: Vec<usize>) -> Self {
        let k = classes.len();
        ConfusionCounts {
            classes,
            counts: [vec![0; k], vec![0; k]],
        }
    }

    pub(crate) fn record(&mut self, class: usize, predicted_first: bool) {
        if let Some(i) = self.classes.iter().position(|&c| c == class) {
            self.counts[usize::from(!predicted_first)][i] += 1;
        }
    }

    /// Whether `class` joins the first pair member's side: it was predicted
    /// as `c1` at least as often as `c2`.
    pub fn joins_first(&self, class: usize) -> bool {
        match self.classes.iter().position(|&c| c == class) {
            Some(i) => self.counts[0][i] >= self.counts[1][i],
            None => true,
        }
    }
}
