use serde::{Deserialize, Serialize};

use super::{select_split, ClassSet, ClassSplit, NodeView, SplitterSpec};
use crate::data::{Dataset, EncodedDataset, Encoder, Value};
use crate::error::{Error, Result};
use crate::learner::{BinaryLearnerConfig, BinaryModel, Side};
use crate::scalar::Scalar;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node<T> {
    Leaf {
        class: usize,
    },
    Internal {
        split: ClassSplit,
        model: BinaryModel<T>,
        left: Box<Node<T>>,
        right: Box<Node<T>>,
    },
}

impl<T: Scalar> Node<T> {
    fn classes(&self, out: &mut Vec<usize>) {
        match self {
            Node::Leaf { class } => out.push(*class),
            Node::Internal { left, right, .. } => {
                left.classes(out);
                right.classes(out);
            }
        }
    }

    fn leaf_classes(&self) -> Vec<usize> {
        let mut v = Vec::new();
        self.classes(&mut v);
        v
    }

    fn distribute(&self, row: &[T], mass: T, out: &mut [T]) {
        match self {
            Node::Leaf { class } => out[*class] += mass,
            Node::Internal { model, left, right, .. } => {
                let p = model.predict_unchecked(row);
                let p_left = if model.positive_side == Side::Left {
                    p
                } else {
                    T::one() - p
                };
                left.distribute(row, mass * p_left, out);
                right.distribute(row, mass * (T::one() - p_left), out);
            }
        }
    }

    fn visit<'s>(&'s self, f: &mut impl FnMut(&'s Node<T>, usize), depth: usize) {
        f(self, depth);
        if let Node::Internal { left, right, .. } = self {
            left.visit(f, depth + 1);
            right.visit(f, depth + 1);
        }
    }

    /// Replaces leaf `anchor` by an internal node over `{anchor}` and
    /// `{extra}`, adding `extra` to every ancestor split side on the way.
    fn attach_beside(&mut self, anchor: usize, extra: usize, width: usize) -> bool {
        match self {
            Node::Leaf { class } if *class == anchor => {
                *self = Node::Internal {
                    split: ClassSplit {
                        left: ClassSet(vec![anchor]),
                        right: ClassSet(vec![extra]),
                    },
                    model: BinaryModel::constant(width, T::lit(0.5), Side::Left),
                    left: Box::new(Node::Leaf { class: anchor }),
                    right: Box::new(Node::Leaf { class: extra }),
                };
                true
            }
            Node::Leaf { .. } => false,
            Node::Internal { split, left, right, .. } => {
                if left.attach_beside(anchor, extra, width) {
                    split.left.0.push(extra);
                    true
                } else if right.attach_beside(anchor, extra, width) {
                    split.right.0.push(extra);
                    true
                } else {
                    false
                }
            }
        }
    }
}

/// Binary tree of class splits with a model at every internal node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree<T> {
    pub n_classes: usize,
    /// Encoded row width expected by the node models.
    pub width: usize,
    pub root: Node<T>,
}

impl<T: Scalar> Tree<T> {
    /// Class probabilities for an encoded row: the product of branch
    /// probabilities along each leaf's path.
    pub fn predict_encoded(&self, row: &[T]) -> Result<Vec<T>> {
        if row.len() != self.width {
            return Err(Error::usage(format!(
                "row width {} does not match tree width {}",
                row.len(),
                self.width
            )));
        }
        let mut out = vec![T::zero(); self.n_classes];
        self.root.distribute(row, T::one(), &mut out);
        Ok(out)
    }

    pub fn internal_count(&self) -> usize {
        let mut n = 0;
        self.root.visit(
            &mut |node, _| n += usize::from(matches!(node, Node::Internal { .. })),
            0,
        );
        n
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut d = 0;
        self.root.visit(&mut |_, depth| d = d.max(depth), 0);
        d
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.root.leaf_classes()
    }

    /// Canonical string for the unordered tree structure.
    pub fn shape_key(&self) -> String {
        fn key<T: Scalar>(node: &Node<T>) -> (usize, String) {
            match node {
                Node::Leaf { class } => (*class, class.to_string()),
                Node::Internal { left, right, .. } => {
                    let (lm, l) = key(left);
                    let (rm, r) = key(right);
                    if lm < rm {
                        (lm, format!("({l}|{r})"))
                    } else {
                        (rm, format!("({r}|{l})"))
                    }
                }
            }
        }
        key(&self.root).1
    }

    /// Leaves cover each class exactly once, every split matches its
    /// children and every model has the tree's width.
    pub fn validate(&self) -> Result<()> {
        let mut leaves = self.leaves();
        leaves.sort_unstable();
        if leaves != (0..self.n_classes).collect::<Vec<_>>() {
            return Err(Error::Invariant(format!(
                "tree leaves {leaves:?} do not cover the classes"
            )));
        }
        let mut problem = None;
        self.root.visit(
            &mut |node, _| {
                if let Node::Internal {
                    split,
                    model,
                    left,
                    right,
                } = node
                {
                    let sorted = |mut v: Vec<usize>| {
                        v.sort_unstable();
                        v
                    };
                    if sorted(split.left.members().to_vec()) != sorted(left.leaf_classes())
                        || sorted(split.right.members().to_vec()) != sorted(right.leaf_classes())
                    {
                        problem.get_or_insert_with(|| "split sides differ from child classes".to_string());
                    }
                    if model.width() != self.width {
                        problem.get_or_insert_with(|| "node model width mismatch".to_string());
                    }
                }
            },
            0,
        );
        match problem {
            Some(p) => Err(Error::Invariant(p)),
            None => Ok(()),
        }
    }
}

fn grow<T: Scalar>(
    node: NodeView<'_, T>,
    classes: ClassSet,
    spec: &SplitterSpec,
    learner: &BinaryLearnerConfig,
    key: u64,
) -> Result<Node<T>> {
    if classes.len() == 1 {
        return Ok(Node::Leaf {
            class: classes.members()[0],
        });
    }
    let selection = select_split(&node, &classes, spec, learner, key)?;
    let left_view = node.restrict(&selection.split.left);
    let right_view = node.restrict(&selection.split.right);
    let (left, right) = rayon::join(
        || {
            grow(
                left_view,
                selection.split.left.clone(),
                spec,
                learner,
                seed::mix(key, seed::LEFT),
            )
        },
        || {
            grow(
                right_view,
                selection.split.right.clone(),
                spec,
                learner,
                seed::mix(key, seed::RIGHT),
            )
        },
    );
    Ok(Node::Internal {
        split: selection.split,
        model: selection.model,
        left: Box::new(left?),
        right: Box::new(right?),
    })
}

/// Builds a tree over every class of `data`.
///
/// Classes without instances are left out of split selection and then
/// hung beside the leaf of the nearest present class index (ties to the
/// lower index) under a constant 0.5/0.5 node.
pub fn build_tree<T: Scalar>(
    data: &EncodedDataset<T>,
    spec: &SplitterSpec,
    learner: &BinaryLearnerConfig,
) -> Result<Tree<T>> {
    spec.validate()?;
    learner.validate()?;
    let n_classes = data.n_classes;
    if n_classes < 2 {
        return Err(Error::usage("at least 2 classes required"));
    }
    let mut counts = vec![0usize; n_classes];
    for &l in &data.labels {
        counts[l] += 1;
    }
    let present: Vec<usize> = (0..n_classes).filter(|&c| counts[c] > 0).collect();
    let absent: Vec<usize> = (0..n_classes).filter(|&c| counts[c] == 0).collect();
    if present.is_empty() {
        return Err(Error::data("no instances to train on"));
    }
    let root_key = seed::mix(spec.seed, seed::ROOT);
    let mut root = grow(NodeView::all(data), ClassSet(present.clone()), spec, learner, root_key)?;
    for a in absent {
        let anchor = *present
            .iter()
            .min_by_key(|&&p| (p.abs_diff(a), p))
            .expect("present is non-empty");
        root.attach_beside(anchor, a, data.width());
    }
    let tree = Tree {
        n_classes,
        width: data.width(),
        root,
    };
    tree.validate()?;
    Ok(tree)
}

/// A tree together with the encoding needed to score raw instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedDichotomy<T> {
    pub encoder: Encoder<T>,
    pub tree: Tree<T>,
}

impl<T: Scalar> NestedDichotomy<T> {
    pub fn predict(&self, instance: &[Value]) -> Result<Vec<T>> {
        let row = self.encoder.encode_row(instance)?;
        self.tree.predict_encoded(&row)
    }
}

/// Fits the encoder on `data` and builds a tree on the encoded instances.
pub fn build_nd<T: Scalar>(
    data: &Dataset,
    spec: &SplitterSpec,
    learner: &BinaryLearnerConfig,
) -> Result<NestedDichotomy<T>> {
    let encoder = Encoder::fit(data);
    let encoded = encoder.transform(data)?;
    let tree = build_tree(&encoded, spec, learner)?;
    Ok(NestedDichotomy { encoder, tree })
}

pub fn nd_predict<T: Scalar>(nd: &NestedDichotomy<T>, instance: &[Value]) -> Result<Vec<T>> {
    nd.predict(instance)
}
