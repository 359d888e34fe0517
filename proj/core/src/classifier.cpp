#include "crda/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crda/linalg.hpp"

namespace crda {

std::string to_string(CrdaVariant variant) {
  switch (variant) {
    case CrdaVariant::Crda1: return "crda1";
    case CrdaVariant::Crda2: return "crda2";
    case CrdaVariant::Crda3: return "crda3";
    case CrdaVariant::ScrdaBaseline: return "scrda";
  }
  return "?";
}

CrdaVariant variant_from_string(const std::string& name) {
  if (name == "crda1") return CrdaVariant::Crda1;
  if (name == "crda2") return CrdaVariant::Crda2;
  if (name == "crda3") return CrdaVariant::Crda3;
  if (name == "scrda") return CrdaVariant::ScrdaBaseline;
  throw std::invalid_argument("unknown variant: " + name);
}

Eigen::MatrixXd discriminant_scores(const Eigen::MatrixXd& xtest,
                                    const Eigen::MatrixXd& means,
                                    const Eigen::MatrixXd& coefficients,
                                    const Eigen::VectorXd& log_priors) {
  if (xtest.rows() != coefficients.rows())
    throw std::invalid_argument("dimension mismatch between data and model");
  if (means.rows() != coefficients.rows() || means.cols() != coefficients.cols() ||
      log_priors.size() != coefficients.cols())
    throw std::invalid_argument("inconsistent model fields");
  Eigen::MatrixXd scores = xtest.transpose() * coefficients;
  const Eigen::VectorXd offset =
      log_priors - 0.5 * (means.array() * coefficients.array()).colwise().sum().matrix().transpose();
  scores.rowwise() += offset.transpose();
  return scores;
}

Eigen::VectorXi predict_labels(const Eigen::MatrixXd& scores) {
  Eigen::VectorXi labels(scores.rows());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index g = 1; g < scores.cols(); ++g)
      if (scores(i, g) > scores(i, best)) best = g;  // ties keep the first
    labels[i] = static_cast<int>(best) + 1;
  }
  return labels;
}

Eigen::MatrixXd discriminant_scores(const Eigen::MatrixXd& xtest,
                                    const CrdaModel& model) {
  return discriminant_scores(xtest, model.means, model.coefficients,
                             model.log_priors);
}

Eigen::VectorXi predict(const Eigen::MatrixXd& xtest, const CrdaModel& model) {
  return predict_labels(discriminant_scores(xtest, model));
}

namespace {

std::vector<Eigen::Index> nonzero_rows(const Eigen::MatrixXd& m) {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    if ((m.row(i).array() != 0.0).any()) rows.push_back(i);
  return rows;
}

// Threshold grid for the soft-shrinkage baseline: ten linear steps from 0 to
// the largest coefficient magnitude.
std::vector<double> delta_grid(const Eigen::MatrixXd& dense) {
  const double top = dense.cwiseAbs().maxCoeff();
  std::vector<double> grid(10);
  for (int j = 0; j < 10; ++j)
    grid[j] = top * static_cast<double>(j) / 9.0;
  return grid;
}

double cross_validate_delta(const LabeledDataset& train, const FitConfig& config,
                            const EllRscmOptions& options,
                            const std::vector<double>& grid) {
  const Eigen::Index n = train.size();
  const int num_classes = train.num_classes();
  const Eigen::VectorXi counts = class_counts(train.labels, num_classes);
  for (int g = 0; g < num_classes; ++g) {
    if (counts[g] < config.cv.folds)
      throw std::invalid_argument("class " + std::to_string(g + 1) + " has " +
                                  std::to_string(counts[g]) +
                                  " members; use fewer folds");
  }
  const std::vector<int> assignment =
      stratified_folds(train.labels, config.cv.folds, config.cv.seed);
  std::vector<int> errors(grid.size(), 0);

  for (int q = 0; q < config.cv.folds; ++q) {
    std::vector<int> train_idx, val_idx;
    for (Eigen::Index i = 0; i < n; ++i)
      (assignment[i] == q ? val_idx : train_idx).push_back(static_cast<int>(i));

    const LabeledDataset fold_train = subset(train, train_idx);
    const ShrinkageEstimate est = ell_rscm(fold_train, RscmVariant::Ell1, options);
    const GroupStatistics stats = group_center(fold_train, options.priors);
    const Eigen::MatrixXd dense = est.op.apply_inverse(stats.means);

    Eigen::MatrixXd xval(train.dim(), static_cast<Eigen::Index>(val_idx.size()));
    Eigen::VectorXi yval(static_cast<Eigen::Index>(val_idx.size()));
    for (std::size_t j = 0; j < val_idx.size(); ++j) {
      xval.col(static_cast<Eigen::Index>(j)) = train.features.col(val_idx[j]);
      yval[static_cast<Eigen::Index>(j)] = train.labels[val_idx[j]];
    }

    for (std::size_t j = 0; j < grid.size(); ++j) {
      const Eigen::MatrixXd shrunk = soft_threshold(dense, grid[j]);
      const Eigen::VectorXi pred = predict_labels(
          discriminant_scores(xval, stats.means, shrunk, stats.log_priors));
      for (Eigen::Index i = 0; i < yval.size(); ++i)
        if (pred[i] != yval[i]) ++errors[j];
    }
  }

  std::size_t best = 0;  // grid is ascending, so ties keep the smaller delta
  for (std::size_t j = 1; j < grid.size(); ++j)
    if (errors[j] < errors[best]) best = j;
  return grid[best];
}

EstimatorDiagnostics rscm_diagnostics(const ShrinkageEstimate& est) {
  EstimatorDiagnostics diag;
  diag.alpha = est.alpha;
  diag.gamma = est.gamma;
  diag.kappa = est.kappa;
  diag.eta = est.eta;
  return diag;
}

}  // namespace

CrdaModel fit(const LabeledDataset& train, const FitConfig& config) {
  validate(train);
  const bool is_rscm_variant = config.variant == CrdaVariant::Crda1 ||
                               config.variant == CrdaVariant::Crda2;
  if (config.soft_delta && config.variant != CrdaVariant::ScrdaBaseline)
    throw std::invalid_argument("soft threshold applies to the scrda baseline only");
  if (config.eta_penalty && config.variant != CrdaVariant::Crda3)
    throw std::invalid_argument("penalty weight applies to crda3 only");
  if ((config.selector || config.sparsity) && !is_rscm_variant)
    throw std::invalid_argument(
        "selector and sparsity can only be fixed for crda1/crda2");

  EllRscmOptions options;
  options.forced_alpha = config.forced_alpha;
  options.priors = config.priors;
  options.ell1_spatial_on_raw = config.ell1_spatial_on_raw;

  CrdaModel model;
  model.variant = config.variant;

  switch (config.variant) {
    case CrdaVariant::Crda1:
    case CrdaVariant::Crda2: {
      const RscmVariant rscm_variant = config.variant == CrdaVariant::Crda1
                                           ? RscmVariant::Ell1
                                           : RscmVariant::Ell2;
      const ShrinkageEstimate est = ell_rscm(train, rscm_variant, options);
      const GroupStatistics stats = group_center(train, config.priors);
      CoefficientMatrix coef = coefficient_matrix(est.op, stats.means);

      HtSelector selector;
      Eigen::Index sparsity;
      if (config.selector && config.sparsity) {
        selector = *config.selector;
        sparsity = *config.sparsity;
      } else {
        CvConfig cv = config.cv;
        if (config.selector) cv.selectors = {*config.selector};
        if (config.sparsity) cv.fixed_k = *config.sparsity;
        const CvReport report =
            cross_validate(train, rscm_variant, cv, options, coef.dense);
        selector = report.chosen_selector;
        sparsity = report.chosen_k;
      }
      hard_threshold_rows(coef, sparsity, selector);

      model.means = stats.means;
      model.coefficients = std::move(coef.sparse);
      model.selected_rows = std::move(coef.selected_rows);
      model.log_priors = stats.log_priors;
      model.selector = selector;
      model.sparsity = sparsity;
      model.diagnostics = rscm_diagnostics(est);
      break;
    }
    case CrdaVariant::Crda3: {
      const double eta_penalty =
          config.eta_penalty
              ? *config.eta_penalty
              : rie_pscm_select_eta(train, default_eta_grid(), config.cv.folds,
                                    config.cv.seed);
      const GroupStatistics stats = group_center(train, config.priors);
      const ThinSvd svd = thin_svd_via_gram(stats.centered);
      const RiePscmEstimate est = rie_pscm_from_svd(svd, train.size(), eta_penalty);
      CoefficientMatrix coef = coefficient_matrix(est.to_operator(), stats.means);

      const HtSelector selectors[] = {HtSelector::Linf};
      const Eigen::Index sparsity = k_upper_bound(coef.dense, selectors);
      hard_threshold_rows(coef, sparsity, HtSelector::Linf);

      model.means = stats.means;
      model.coefficients = std::move(coef.sparse);
      model.selected_rows = std::move(coef.selected_rows);
      model.log_priors = stats.log_priors;
      model.selector = HtSelector::Linf;
      model.sparsity = sparsity;
      model.diagnostics.eta_penalty = eta_penalty;
      model.diagnostics.eta = est.m_target;
      break;
    }
    case CrdaVariant::ScrdaBaseline: {
      const ShrinkageEstimate est = ell_rscm(train, RscmVariant::Ell1, options);
      const GroupStatistics stats = group_center(train, config.priors);
      const CoefficientMatrix coef = coefficient_matrix(est.op, stats.means);

      const double delta =
          config.soft_delta
              ? *config.soft_delta
              : cross_validate_delta(train, config, options, delta_grid(coef.dense));
      if (delta < 0.0) throw std::invalid_argument("negative soft threshold");

      model.means = stats.means;
      model.coefficients = soft_threshold(coef.dense, delta);
      model.selected_rows = nonzero_rows(model.coefficients);
      model.log_priors = stats.log_priors;
      model.selector = HtSelector::Linf;  // unused by the baseline
      model.sparsity = static_cast<Eigen::Index>(model.selected_rows.size());
      model.soft_delta = delta;
      model.diagnostics = rscm_diagnostics(est);
      break;
    }
  }
  return model;
}

}  // namespace crda
