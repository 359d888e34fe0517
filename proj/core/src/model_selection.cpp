#include "crda/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "crda/discriminant.hpp"
#include "crda/linalg.hpp"

namespace crda {

std::vector<Eigen::Index> k_grid(Eigen::Index k_ub, Eigen::Index p, int grid_size) {
  if (k_ub < 1 || p < 1 || k_ub > p)
    throw std::invalid_argument("sparsity bound out of range");
  if (grid_size < 2) throw std::invalid_argument("grid needs at least two points");

  const Eigen::Index k1 = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::floor(0.05 * static_cast<double>(p))));
  if (k_ub <= k1) return {k_ub};

  const double log_lo = std::log(static_cast<double>(k1));
  const double log_hi = std::log(static_cast<double>(k_ub));
  std::vector<Eigen::Index> grid;
  grid.reserve(grid_size);
  for (int j = 0; j < grid_size; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(grid_size - 1);
    const auto k = static_cast<Eigen::Index>(
        std::llround(std::exp(log_lo + t * (log_hi - log_lo))));
    if (grid.empty() || grid.back() != k) grid.push_back(k);
  }
  return grid;
}

std::vector<int> stratified_folds(const Eigen::VectorXi& labels, int folds,
                                  std::uint64_t seed) {
  const Eigen::Index n = labels.size();
  if (folds < 1) throw std::invalid_argument("need at least one fold");
  if (static_cast<Eigen::Index>(folds) > n)
    throw std::invalid_argument("more folds than observations");
  if (n > 0 && labels.minCoeff() < 1)
    throw std::invalid_argument("labels must be positive integers");

  const int num_classes = n == 0 ? 0 : labels.maxCoeff();
  std::mt19937_64 rng(seed);
  std::vector<int> assignment(n, 0);
  // A cursor running across classes keeps total fold sizes within one of
  // each other as well.
  int cursor = 0;
  for (int g = 1; g <= num_classes; ++g) {
    std::vector<int> members;
    for (Eigen::Index i = 0; i < n; ++i)
      if (labels[i] == g) members.push_back(static_cast<int>(i));
    std::shuffle(members.begin(), members.end(), rng);
    for (int idx : members) assignment[idx] = cursor++ % folds;
  }
  return assignment;
}

namespace {

// Candidate grid for one fold; positionally aligned (no dedup) so per-fold
// bounds still accumulate into a rectangular table.
std::vector<Eigen::Index> positional_grid(Eigen::Index k_ub, Eigen::Index p,
                                          int grid_size) {
  const Eigen::Index k1 = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::floor(0.05 * static_cast<double>(p))));
  std::vector<Eigen::Index> grid(grid_size);
  if (k_ub <= k1) {
    std::fill(grid.begin(), grid.end(), k_ub);
    return grid;
  }
  const double log_lo = std::log(static_cast<double>(k1));
  const double log_hi = std::log(static_cast<double>(k_ub));
  for (int j = 0; j < grid_size; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(grid_size - 1);
    grid[j] = static_cast<Eigen::Index>(
        std::llround(std::exp(log_lo + t * (log_hi - log_lo))));
  }
  return grid;
}

CvReport cross_validate_impl(const LabeledDataset& train, RscmVariant estimator,
                             const CvConfig& config,
                             const EllRscmOptions& options,
                             const Eigen::MatrixXd* full_dense) {
  validate(train);
  if (config.folds < 2) throw std::invalid_argument("need at least two folds");
  if (config.selectors.empty()) throw std::invalid_argument("empty selector set");
  if (config.grid_size < 2)
    throw std::invalid_argument("grid needs at least two points");

  const Eigen::Index p = train.dim();
  const Eigen::Index n = train.size();
  const int num_classes = train.num_classes();
  const Eigen::VectorXi counts = class_counts(train.labels, num_classes);
  for (int g = 0; g < num_classes; ++g) {
    if (counts[g] < config.folds)
      throw std::invalid_argument("class " + std::to_string(g + 1) + " has " +
                                  std::to_string(counts[g]) +
                                  " members; use fewer folds");
  }

  CvReport report;
  report.selectors = config.selectors;
  report.fold_assignment = stratified_folds(train.labels, config.folds, config.seed);

  Eigen::MatrixXd owned_dense;
  if (config.fixed_k) {
    if (*config.fixed_k < 1 || *config.fixed_k > p)
      throw std::invalid_argument("sparsity level out of range");
    report.grid = {*config.fixed_k};
  } else {
    if (full_dense == nullptr) {
      const ShrinkageEstimate est = ell_rscm(train, estimator, options);
      const GroupStatistics stats = group_center(train, options.priors);
      owned_dense = est.op.apply_inverse(stats.means);
      full_dense = &owned_dense;
    }
    const Eigen::Index k_ub = k_upper_bound(*full_dense, config.selectors);
    report.grid = config.per_fold_k_upper_bound
                      ? positional_grid(k_ub, p, config.grid_size)
                      : k_grid(k_ub, p, config.grid_size);
  }

  const auto num_selectors = static_cast<Eigen::Index>(config.selectors.size());
  const auto num_cells = static_cast<Eigen::Index>(report.grid.size());
  report.error_counts = Eigen::MatrixXi::Zero(num_selectors, num_cells);

  for (int q = 0; q < config.folds; ++q) {
    std::vector<int> train_idx, val_idx;
    for (Eigen::Index i = 0; i < n; ++i)
      (report.fold_assignment[i] == q ? val_idx : train_idx)
          .push_back(static_cast<int>(i));

    const LabeledDataset fold_train = subset(train, train_idx);
    const ShrinkageEstimate est = ell_rscm(fold_train, estimator, options);
    const GroupStatistics stats = group_center(fold_train, options.priors);
    const Eigen::MatrixXd dense = est.op.apply_inverse(stats.means);

    std::vector<Eigen::Index> fold_grid = report.grid;
    if (config.per_fold_k_upper_bound && !config.fixed_k) {
      const Eigen::Index fold_k_ub = k_upper_bound(dense, config.selectors);
      fold_grid = positional_grid(fold_k_ub, p, config.grid_size);
    }

    const auto num_val = static_cast<Eigen::Index>(val_idx.size());
    Eigen::MatrixXd xval(p, num_val);
    Eigen::VectorXi yval(num_val);
    for (Eigen::Index j = 0; j < num_val; ++j) {
      xval.col(j) = train.features.col(val_idx[j]);
      yval[j] = train.labels[val_idx[j]];
    }

    for (Eigen::Index si = 0; si < num_selectors; ++si) {
      const Eigen::VectorXd scores = selector_scores(dense, config.selectors[si]);
      const std::vector<Eigen::Index> order = descending_score_order(scores);

      // Grow the selected prefix once per selector; every grid value reuses
      // the partial scores accumulated so far.
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(num_val, num_classes);
      Eigen::VectorXd offset = Eigen::VectorXd::Zero(num_classes);
      Eigen::Index pos = 0;
      for (Eigen::Index gi = 0; gi < num_cells; ++gi) {
        while (pos < fold_grid[gi]) {
          const Eigen::Index row = order[pos];
          acc.noalias() += xval.row(row).transpose() * dense.row(row);
          offset -= 0.5 * (stats.means.row(row).array() * dense.row(row).array())
                              .matrix()
                              .transpose();
          ++pos;
        }
        Eigen::MatrixXd val_scores = acc;
        val_scores.rowwise() += (offset + stats.log_priors).transpose();
        const Eigen::VectorXi pred = predict_labels(val_scores);
        int errors = 0;
        for (Eigen::Index j = 0; j < num_val; ++j)
          if (pred[j] != yval[j]) ++errors;
        report.error_counts(si, gi) += errors;
      }
    }
  }

  // Minimal error; ties prefer smaller K, then the selector listed first.
  int best_err = report.error_counts(0, 0);
  Eigen::Index best_si = 0, best_gi = 0;
  for (Eigen::Index gi = 0; gi < num_cells; ++gi)
    for (Eigen::Index si = 0; si < num_selectors; ++si)
      if (report.error_counts(si, gi) < best_err) {
        best_err = report.error_counts(si, gi);
        best_si = si;
        best_gi = gi;
      }
  report.chosen_selector = config.selectors[best_si];
  report.chosen_k = report.grid[best_gi];
  return report;
}

}  // namespace

CvReport cross_validate(const LabeledDataset& train, RscmVariant estimator,
                        const CvConfig& config,
                        const EllRscmOptions& estimator_options) {
  return cross_validate_impl(train, estimator, config, estimator_options, nullptr);
}

CvReport cross_validate(const LabeledDataset& train, RscmVariant estimator,
                        const CvConfig& config,
                        const EllRscmOptions& estimator_options,
                        const Eigen::MatrixXd& full_train_dense_coef) {
  return cross_validate_impl(train, estimator, config, estimator_options,
                             &full_train_dense_coef);
}

}  // namespace crda
