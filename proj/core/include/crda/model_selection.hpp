#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

#include "crda/covariance.hpp"
#include "crda/dataset.hpp"
#include "crda/selector.hpp"

namespace crda {

struct CvConfig {
  int folds = 5;      // Q
  int grid_size = 10; // J
  std::vector<HtSelector> selectors = {HtSelector::Variance, HtSelector::L1,
                                       HtSelector::L2, HtSelector::Linf};
  std::uint64_t seed = 0;
  // Restricts the sparsity grid to one value instead of the adaptive grid.
  std::optional<Eigen::Index> fixed_k;
  // Recompute the sparsity bound inside each fold instead of once on the
  // full training set; cells then accumulate by grid position.
  bool per_fold_k_upper_bound = false;
};

struct CvReport {
  std::vector<HtSelector> selectors;     // row order of the table
  std::vector<Eigen::Index> grid;        // column order, ascending sparsity
  Eigen::MatrixXi error_counts;          // selectors x grid, summed over folds
  HtSelector chosen_selector = HtSelector::Variance;
  Eigen::Index chosen_k = 0;
  std::vector<int> fold_assignment;      // length n, values in [0, folds)
};

/// Logarithmically spaced sparsity grid with J values from
/// max(1, floor(0.05 p)) to k_ub, rounded to integers and deduplicated;
/// collapses to {k_ub} when k_ub does not exceed the starting point.
std::vector<Eigen::Index> k_grid(Eigen::Index k_ub, Eigen::Index p, int grid_size);

/// Per-class round-robin fold assignment after a seeded shuffle: class counts
/// per fold differ by at most one, as do total fold sizes.
std::vector<int> stratified_folds(const Eigen::VectorXi& labels, int folds,
                                  std::uint64_t seed);

/// Joint selection of (selector, K): fits the covariance and dense
/// coefficients once per fold, evaluates every candidate on the held-out
/// fold, and accumulates misclassification counts. The sparsity grid is
/// derived from the coefficient matrix fitted on the full training set.
/// Minimal error wins; ties prefer the smaller K, then the selector listed
/// first. Every class needs at least `folds` members.
CvReport cross_validate(const LabeledDataset& train, RscmVariant estimator,
                        const CvConfig& config,
                        const EllRscmOptions& estimator_options = {});

/// Variant taking the dense coefficient matrix already fitted on the full
/// training set, so callers that need that fit anyway do not repeat it.
CvReport cross_validate(const LabeledDataset& train, RscmVariant estimator,
                        const CvConfig& config,
                        const EllRscmOptions& estimator_options,
                        const Eigen::MatrixXd& full_train_dense_coef);

}  // namespace crda
