use num_bigint::BigUint;
use rand::seq::index;
use rand::{Rng, RngCore};

use super::{ClassSet, ClassSplit, ConfusionCounts, NodeView, Strategy};
use crate::analysis::growth::{growth_random, split_shapes};
use crate::error::{Error, Result};
use crate::learner::{train_binary, BinaryLearnerConfig, BinaryProblem, Side};
use crate::scalar::Scalar;

fn require_two(c: &ClassSet) -> Result<()> {
    if c.len() < 2 {
        return Err(Error::usage(format!("cannot split a set of {} class(es)", c.len())));
    }
    Ok(())
}

/// Uniform integer in `[0, bound)` by rejection on the bit length.
fn uniform_below(bound: &BigUint, rng: &mut impl RngCore) -> BigUint {
    let bits = bound.bits();
    let n_bytes = bits.div_ceil(8) as usize;
    let spare = (n_bytes as u64 * 8 - bits) as u32;
    let mut buf = vec![0u8; n_bytes];
    loop {
        rng.fill_bytes(&mut buf);
        if let Some(top) = buf.last_mut() {
            *top &= 0xffu8.checked_shr(spare).unwrap_or(0);
        }
        let v = BigUint::from_bytes_le(&buf);
        if &v < bound {
            return v;
        }
    }
}

/// Puts a uniformly chosen `size`-subset of `c` on the left.
fn uniform_subset_split(c: &ClassSet, size: usize, rng: &mut impl Rng) -> ClassSplit {
    let chosen = index::sample(rng, c.len(), size);
    let mut on_left = vec![false; c.len()];
    for i in chosen.iter() {
        on_left[i] = true;
    }
    let members = c.members();
    ClassSplit::partition(c, |class| {
        let pos = members.iter().position(|&m| m == class).expect("member");
        on_left[pos]
    })
}

/// Draws a split so that recursive application samples nested dichotomies
/// uniformly: the shape `(a, n - a)` is chosen with probability
/// `count(a) T(a) T(n - a) / T(n)`, then a uniform subset of size `a`.
pub fn sample_random_split(c: &ClassSet, rng: &mut impl Rng) -> Result<ClassSplit> {
    require_two(c)?;
    let n = c.len();
    let mut r = uniform_below(&growth_random(n), rng);
    for (a, count) in split_shapes(n, Strategy::Random) {
        let weight = count * growth_random(a) * growth_random(n - a);
        if r < weight {
            return Ok(uniform_subset_split(c, a, rng));
        }
        r -= weight;
    }
    Err(Error::Invariant("split shape weights do not sum to T(n)".into()))
}

/// Uniform over splits whose side sizes differ by at most one.
pub fn sample_balanced_split(c: &ClassSet, rng: &mut impl Rng) -> Result<ClassSplit> {
    require_two(c)?;
    Ok(uniform_subset_split(c, c.len() / 2, rng))
}

/// Random-pair selection: train on a random pair `(c1, c2)`, classify the
/// other classes' instances, and group each class with the pair member it
/// was predicted as at least as often. Classes without instances at the
/// node join `c1`.
pub fn random_pair_split<T: Scalar>(
    c: &ClassSet,
    node: &NodeView<'_, T>,
    config: &BinaryLearnerConfig,
    rng: &mut impl Rng,
) -> Result<ClassSplit> {
    require_two(c)?;
    let members = c.members();
    if members.len() == 2 {
        return Ok(ClassSplit::partition(c, |class| class == members[0]));
    }
    let i = rng.random_range(0..members.len());
    let mut j = rng.random_range(0..members.len() - 1);
    if j >= i {
        j += 1;
    }
    let (c1, c2) = (members[i], members[j]);

    let labels = &node.data.labels;
    let pair_rows: Vec<usize> = node
        .rows
        .iter()
        .copied()
        .filter(|&r| labels[r] == c1 || labels[r] == c2)
        .collect();
    let problem = BinaryProblem::from_encoded(node.data, &pair_rows, |l| l == c1);
    let model = train_binary(&problem, config, Side::Left);

    let rest: Vec<usize> = members.iter().copied().filter(|&m| m != c1 && m != c2).collect();
    let mut confusion = ConfusionCounts::new(rest);
    for &r in &node.rows {
        let label = labels[r];
        if label == c1 || label == c2 {
            continue;
        }
        let p_first = model.predict_unchecked(node.data.matrix.row(r));
        confusion.record(label, p_first >= T::lit(0.5));
    }
    Ok(ClassSplit::partition(c, |class| {
        class == c1 || (class != c2 && confusion.joins_first(class))
    }))
}

/// Draws one candidate split with the given strategy.
pub fn draw_split<T: Scalar>(
    strategy: Strategy,
    c: &ClassSet,
    node: &NodeView<'_, T>,
    config: &BinaryLearnerConfig,
    rng: &mut impl Rng,
) -> Result<ClassSplit> {
    match strategy {
        Strategy::Random => sample_random_split(c, rng),
        Strategy::Balanced => sample_balanced_split(c, rng),
        Strategy::RandomPair => random_pair_split(c, node, config, rng),
    }
}
