use super::{SolverError, SolverParams, WeightVector};
use crate::visibility::CoverageMatrix;
use fixedbitset::FixedBitSet;
use rayon::prelude::*;

pub const MAX_BRUTE_FORCE: usize = 20;

/// An ordered pick list with the samples it covers.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// `(viewpoint id, marginal gain)` in pick order.
    pub picks: Vec<(usize, f64)>,
    /// Union of the selected rows.
    pub covered: FixedBitSet,
    /// Covered weight over total weight.
    pub coverage_fraction: f64,
}

impl Selection {
    pub fn empty(sample_count: usize) -> Self {
        Selection {
            picks: Vec::new(),
            covered: FixedBitSet::with_capacity(sample_count),
            coverage_fraction: 0.0,
        }
    }

    pub fn ids(&self) -> Vec<usize> {
        self.picks.iter().map(|p| p.0).collect()
    }

    pub fn len(&self) -> usize {
        self.picks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.picks.is_empty()
    }
}

fn covered_weight(weights: &[f64], covered: &FixedBitSet) -> f64 {
    covered.ones().map(|i| weights[i]).sum()
}

fn gain(weights: &[f64], row: &FixedBitSet, covered: &FixedBitSet) -> f64 {
    row.ones().filter(|&i| !covered.contains(i)).map(|i| weights[i]).sum()
}

fn check_sizes(matrix: &CoverageMatrix, weights: &WeightVector) -> Result<(), SolverError> {
    if weights.len() != matrix.sample_count {
        return Err(SolverError::SizeMismatch {
            weights: weights.len(),
            samples: matrix.sample_count,
        });
    }
    Ok(())
}

/// Greedy loop seeded with samples already covered by an earlier phase.
/// Gains ignore `base`; the target is tested on `base ∪ covered`.
fn greedy_from(
    matrix: &CoverageMatrix,
    weights: &WeightVector,
    base: &FixedBitSet,
    params: &SolverParams,
) -> Result<Selection, SolverError> {
    params.validate()?;
    check_sizes(matrix, weights)?;
    let total = weights.total();
    let mut sel = Selection::empty(matrix.sample_count);
    let mut all = base.clone();
    let mut used = vec![false; matrix.candidate_count()];

    while sel.picks.len() < params.max_views {
        if covered_weight(weights, &all) / total >= params.target_coverage {
            break;
        }
        let gains: Vec<f64> = matrix
            .rows
            .par_iter()
            .map(|row| gain(weights, row, &all))
            .collect();
        let best = (0..gains.len())
            .filter(|&c| !used[c])
            .max_by(|&a, &b| {
                gains[a]
                    .total_cmp(&gains[b])
                    .then(matrix.candidates[b].id.cmp(&matrix.candidates[a].id))
            });
        let Some(best) = best else { break };
        let g = gains[best];
        if g <= 0.0 {
            if sel.picks.is_empty() {
                return Err(SolverError::NoProgress);
            }
            break;
        }
        if g < params.min_gain {
            break;
        }
        used[best] = true;
        sel.picks.push((matrix.candidates[best].id, g));
        sel.covered.union_with(&matrix.rows[best]);
        all.union_with(&matrix.rows[best]);
        sel.coverage_fraction = covered_weight(weights, &sel.covered) / total;
    }
    Ok(sel)
}

/// Repeatedly selects the candidate adding the most uncovered weight, ties to
/// the lowest viewpoint id, until the target, the gain floor or the view cap
/// stops it.
pub fn greedy_select(
    matrix: &CoverageMatrix,
    weights: &WeightVector,
    params: &SolverParams,
) -> Result<Selection, SolverError> {
    greedy_from(matrix, weights, &FixedBitSet::with_capacity(matrix.sample_count), params)
}

/// Smallest subset of candidates reaching `target`, found by enumerating
/// subsets in increasing size and lexicographic id order. The returned
/// picks are ordered greedily within the subset so gains are non-increasing.
pub fn brute_force_cover(
    matrix: &CoverageMatrix,
    weights: &WeightVector,
    target: f64,
) -> Result<Selection, SolverError> {
    check_sizes(matrix, weights)?;
    let n = matrix.candidate_count();
    if n > MAX_BRUTE_FORCE {
        return Err(SolverError::TooLarge {
            got: n,
            max: MAX_BRUTE_FORCE,
        });
    }
    let total = weights.total();
    let reachable = covered_weight(weights, &matrix.reachable()) / total;
    if reachable < target {
        return Err(SolverError::Infeasible { target, reachable });
    }
    let mut by_id: Vec<usize> = (0..n).collect();
    by_id.sort_by_key(|&c| matrix.candidates[c].id);

    for k in 1..=n {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            let mut cov = FixedBitSet::with_capacity(matrix.sample_count);
            combo.iter().for_each(|&p| cov.union_with(&matrix.rows[by_id[p]]));
            if covered_weight(weights, &cov) / total >= target {
                let chosen: Vec<usize> = combo.iter().map(|&p| by_id[p]).collect();
                return Ok(order_greedily(matrix, weights, &chosen));
            }
            // next combination in lexicographic order
            let Some(i) = (0..k).rev().find(|&i| combo[i] < n - k + i) else {
                break;
            };
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    unreachable!("the full candidate set reaches the target")
}

fn order_greedily(matrix: &CoverageMatrix, weights: &WeightVector, chosen: &[usize]) -> Selection {
    let total = weights.total();
    let mut sel = Selection::empty(matrix.sample_count);
    let mut left = chosen.to_vec();
    while !left.is_empty() {
        let (pos, g) = left
            .iter()
            .enumerate()
            .map(|(p, &c)| (p, gain(weights, &matrix.rows[c], &sel.covered)))
            .max_by(|a, b| {
                a.1.total_cmp(&b.1).then(
                    matrix.candidates[left[b.0]]
                        .id
                        .cmp(&matrix.candidates[left[a.0]].id),
                )
            })
            .unwrap();
        let c = left.remove(pos);
        sel.picks.push((matrix.candidates[c].id, g));
        sel.covered.union_with(&matrix.rows[c]);
    }
    sel.coverage_fraction = covered_weight(weights, &sel.covered) / total;
    sel
}

/// Ground-then-aerial selection result.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePlan {
    pub ground: Selection,
    pub aerial: Selection,
    pub combined_covered: FixedBitSet,
    pub combined_fraction: f64,
    /// Samples no selected viewpoint observes.
    pub residual: Vec<usize>,
    /// Set when the aerial phase found nothing left to gain.
    pub aerial_warning: Option<String>,
}

/// Runs the greedy on ground candidates, then on aerial candidates against
/// whatever the ground phase left uncovered.
pub fn two_phase_plan(
    ground: &CoverageMatrix,
    aerial: &CoverageMatrix,
    weights: &WeightVector,
    params: &SolverParams,
) -> Result<PhasePlan, SolverError> {
    if ground.sample_count != aerial.sample_count {
        return Err(SolverError::SizeMismatch {
            weights: ground.sample_count,
            samples: aerial.sample_count,
        });
    }
    // With no ground candidates at all the aerial phase does all the work.
    let ground_sel = if ground.candidate_count() == 0 {
        Selection::empty(ground.sample_count)
    } else {
        greedy_select(ground, weights, params)?
    };
    let mut aerial_warning = None;
    let aerial_sel = match greedy_from(aerial, weights, &ground_sel.covered, params) {
        Ok(s) => s,
        Err(SolverError::NoProgress) => {
            aerial_warning = Some(format!(
                "aerial phase added nothing; ground coverage {:.4}",
                ground_sel.coverage_fraction
            ));
            Selection::empty(aerial.sample_count)
        }
        Err(e) => return Err(e),
    };
    let mut combined = ground_sel.covered.clone();
    combined.union_with(&aerial_sel.covered);
    let combined_fraction = covered_weight(weights, &combined) / weights.total();
    let residual = (0..ground.sample_count)
        .filter(|&i| !combined.contains(i))
        .collect();
    Ok(PhasePlan {
        ground: ground_sel,
        aerial: aerial_sel,
        combined_covered: combined,
        combined_fraction,
        residual,
        aerial_warning,
    })
}
