//! Simple conditional mixed strategies and their product-measure
//! decomposition.
//!
//! A simple conditional mixed strategy of player `i` is constant on the
//! cells of a finite partition of the opponents' mixed-profile space: cell
//! `l` maps to a distribution over `A_i`. Such a strategy is induced by a
//! finite-support probability measure over pure conditional strategies
//! (tables `cell -> action`): the product measure weighting table `t` by
//! `prod_l mu_l(t(l))`. Evaluating the measure cell-wise recovers the
//! original distributions exactly; [`verify_roundtrip`] checks that
//! equality in exact arithmetic.
//!
//! Cells are abstract labels. The partition geometry over the opponents'
//! simplex never enters the decomposition, so a membership function is
//! optional and only used to route queries to a cell.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Pow;
use thiserror::Error;

use crate::deviation::Budgets;
use crate::scalar::Scalar;

/// One mixed action per opponent: exact probability vectors.
pub type MixedProfile<T> = Vec<Vec<T>>;

type MembershipFn<T> = Arc<dyn Fn(&MixedProfile<T>) -> usize + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MixedError {
    #[error("unknown cell label {label:?}")]
    UnknownCell { label: String },
    #[error("invalid distribution at cell {cell}: {detail}")]
    InvalidDistribution { cell: usize, detail: String },
    #[error("invalid partition: {detail}")]
    InvalidPartition { detail: String },
    #[error("support of size {required} exceeds budget {budget}")]
    BudgetExceeded { required: BigUint, budget: u64 },
}

/// A finite partition of the opponents' mixed-profile space, as labelled
/// cells with an optional membership function.
#[derive(Clone)]
pub struct PartitionSpec<T: Scalar> {
    labels: Vec<String>,
    membership: Option<MembershipFn<T>>,
}

impl<T: Scalar> fmt::Debug for PartitionSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PartitionSpec")
            .field("labels", &self.labels)
            .field("membership", &self.membership.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

impl<T: Scalar> PartitionSpec<T> {
    pub fn from_labels(labels: Vec<String>) -> Result<Self, MixedError> {
        if labels.is_empty() {
            return Err(MixedError::InvalidPartition {
                detail: "a partition needs at least one cell".into(),
            });
        }
        for (idx, label) in labels.iter().enumerate() {
            if labels[..idx].contains(label) {
                return Err(MixedError::InvalidPartition {
                    detail: format!("duplicate cell label {label:?}"),
                });
            }
        }
        Ok(PartitionSpec { labels, membership: None })
    }

    /// Attaches a membership function; it must map every queried profile to
    /// a cell index below the cell count.
    pub fn with_membership(
        mut self,
        f: impl Fn(&MixedProfile<T>) -> usize + Send + Sync + 'static,
    ) -> Self {
        self.membership = Some(Arc::new(f));
        self
    }

    pub fn cell_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn cell_index(&self, label: &str) -> Result<usize, MixedError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| MixedError::UnknownCell { label: label.to_string() })
    }

    /// Routes an opponent mixed profile to its cell, when a membership
    /// function is attached.
    pub fn assign(&self, profile: &MixedProfile<T>) -> Option<usize> {
        let f = self.membership.as_ref()?;
        let cell = f(profile);
        debug_assert!(cell < self.cell_count());
        Some(cell)
    }
}

/// A strategy constant on partition cells: cell `l` plays distribution
/// `mu_l` over the owner's actions.
#[derive(Debug, Clone)]
pub struct SimpleConditionalMixedStrategy<T: Scalar> {
    pub owner: usize,
    action_count: usize,
    partition: PartitionSpec<T>,
    distributions: Vec<Vec<T>>,
}

impl<T: Scalar> SimpleConditionalMixedStrategy<T> {
    /// Validates one distribution per cell: `action_count` nonnegative
    /// entries summing to one, exactly.
    pub fn new(
        owner: usize,
        action_count: usize,
        partition: PartitionSpec<T>,
        distributions: Vec<Vec<T>>,
    ) -> Result<Self, MixedError> {
        if distributions.len() != partition.cell_count() {
            return Err(MixedError::InvalidPartition {
                detail: format!(
                    "{} cells but {} distributions",
                    partition.cell_count(),
                    distributions.len()
                ),
            });
        }
        for (cell, dist) in distributions.iter().enumerate() {
            if dist.len() != action_count {
                return Err(MixedError::InvalidDistribution {
                    cell,
                    detail: format!("{} entries for {} actions", dist.len(), action_count),
                });
            }
            if dist.iter().any(|p| p.is_negative()) {
                return Err(MixedError::InvalidDistribution {
                    cell,
                    detail: "negative probability".into(),
                });
            }
            let total = dist.iter().cloned().fold(T::zero(), |acc, p| acc + p);
            if !total.is_one() {
                return Err(MixedError::InvalidDistribution {
                    cell,
                    detail: format!("probabilities sum to {total}, not 1"),
                });
            }
        }
        Ok(SimpleConditionalMixedStrategy { owner, action_count, partition, distributions })
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    pub fn partition(&self) -> &PartitionSpec<T> {
        &self.partition
    }

    pub fn distribution(&self, cell: usize) -> &[T] {
        &self.distributions[cell]
    }
}

/// A finite-support probability measure over pure conditional strategies
/// measurable with respect to the partition, i.e. tables `cell -> action`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSupportMeasure<T: Scalar> {
    pub owner: usize,
    action_count: usize,
    labels: Vec<String>,
    /// `(table, weight)` pairs in ascending table order (first cell most
    /// significant).
    atoms: Vec<(Vec<usize>, T)>,
}

impl<T: Scalar> FiniteSupportMeasure<T> {
    pub fn atoms(&self) -> &[(Vec<usize>, T)] {
        &self.atoms
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    pub fn total_weight(&self) -> T {
        self.atoms
            .iter()
            .fold(T::zero(), |acc, (_, w)| acc + w.clone())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// Decomposes a simple strategy into the product measure over tables:
/// table `t` gets weight `prod_l mu_l(t(l))`.
///
/// Zero-weight atoms are kept when `prune` is false, so the support is all
/// of `A_i^L`; pruning drops them and leaves exactly the tables with
/// positive product weight.
pub fn decompose<T: Scalar>(
    sigma: &SimpleConditionalMixedStrategy<T>,
    budgets: &Budgets,
    prune: bool,
) -> Result<FiniteSupportMeasure<T>, MixedError> {
    let cells = sigma.partition().cell_count();
    let m = sigma.action_count();
    let required = BigUint::from(m).pow(cells as u64);
    if required > BigUint::from(budgets.decompose) {
        return Err(MixedError::BudgetExceeded { required, budget: budgets.decompose });
    }

    let mut atoms = Vec::new();
    let mut table = vec![0usize; cells];
    loop {
        let weight = table
            .iter()
            .enumerate()
            .fold(T::one(), |acc, (cell, &action)| {
                acc * sigma.distribution(cell)[action].clone()
            });
        if !prune || !weight.is_zero() {
            atoms.push((table.clone(), weight));
        }
        // Odometer, last cell fastest.
        let mut slot = cells;
        loop {
            if slot == 0 {
                return Ok(FiniteSupportMeasure {
                    owner: sigma.owner,
                    action_count: m,
                    labels: sigma.partition().labels().to_vec(),
                    atoms,
                });
            }
            slot -= 1;
            table[slot] += 1;
            if table[slot] < m {
                break;
            }
            table[slot] = 0;
        }
    }
}

/// Evaluates the induced strategy at a cell: the distribution assigning
/// each action the total weight of tables selecting it there.
pub fn phi_evaluate<T: Scalar>(
    measure: &FiniteSupportMeasure<T>,
    cell: &str,
) -> Result<Vec<T>, MixedError> {
    let index = measure
        .labels
        .iter()
        .position(|l| l == cell)
        .ok_or_else(|| MixedError::UnknownCell { label: cell.to_string() })?;
    let mut distribution = vec![T::zero(); measure.action_count];
    for (table, weight) in &measure.atoms {
        let action = table[index];
        distribution[action] = distribution[action].clone() + weight.clone();
    }
    Ok(distribution)
}

/// Exact cell-by-cell equality of `phi(decompose(sigma))` with `sigma`.
pub fn verify_roundtrip<T: Scalar>(
    sigma: &SimpleConditionalMixedStrategy<T>,
    budgets: &Budgets,
) -> Result<bool, MixedError> {
    let measure = decompose(sigma, budgets, false)?;
    for (cell, label) in sigma.partition().labels().iter().enumerate() {
        if phi_evaluate(&measure, label)? != sigma.distribution(cell) {
            return Ok(false);
        }
    }
    Ok(true)
}
