#include "crda/selector.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace crda {

std::string to_string(HtSelector selector) {
  switch (selector) {
    case HtSelector::Variance: return "variance";
    case HtSelector::L1: return "l1";
    case HtSelector::L2: return "l2";
    case HtSelector::Linf: return "linf";
  }
  return "?";
}

HtSelector selector_from_string(const std::string& name) {
  if (name == "variance" || name == "var") return HtSelector::Variance;
  if (name == "l1") return HtSelector::L1;
  if (name == "l2") return HtSelector::L2;
  if (name == "linf") return HtSelector::Linf;
  throw std::invalid_argument("unknown selector: " + name);
}

CoefficientMatrix coefficient_matrix(const CovarianceOperator& inverse_op,
                                     const Eigen::MatrixXd& means) {
  if (inverse_op.dim() != means.rows())
    throw std::invalid_argument("dimension mismatch between operator and means");
  CoefficientMatrix coef;
  coef.dense = inverse_op.apply_inverse(means);
  coef.sparse = coef.dense;
  coef.selected_rows.resize(means.rows());
  std::iota(coef.selected_rows.begin(), coef.selected_rows.end(), Eigen::Index{0});
  return coef;
}

Eigen::VectorXd selector_scores(const Eigen::MatrixXd& b, HtSelector selector) {
  switch (selector) {
    case HtSelector::L1:
      return b.cwiseAbs().rowwise().sum();
    case HtSelector::L2:
      return b.rowwise().norm();
    case HtSelector::Linf:
      return b.cwiseAbs().rowwise().maxCoeff();
    case HtSelector::Variance: {
      const Eigen::Index num_classes = b.cols();
      if (num_classes < 2)
        throw std::invalid_argument(
            "variance selector needs at least two classes");
      const Eigen::VectorXd mean = b.rowwise().mean();
      return (b.colwise() - mean).rowwise().squaredNorm() /
             static_cast<double>(num_classes - 1);
    }
  }
  throw std::invalid_argument("unknown selector");
}

std::vector<Eigen::Index> descending_score_order(const Eigen::VectorXd& scores) {
  std::vector<Eigen::Index> order(scores.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  // stable: equal scores stay in index order, so the smaller index wins
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return scores[a] > scores[b]; });
  return order;
}

std::vector<Eigen::Index> top_k_rows(const Eigen::VectorXd& scores, Eigen::Index k) {
  const Eigen::Index p = scores.size();
  if (k < 1 || k > p) throw std::invalid_argument("sparsity level out of range");
  std::vector<Eigen::Index> order = descending_score_order(scores);
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

void hard_threshold_rows(CoefficientMatrix& coef, Eigen::Index k, HtSelector selector) {
  const Eigen::VectorXd scores = selector_scores(coef.dense, selector);
  coef.selected_rows = top_k_rows(scores, k);
  coef.sparse.setZero(coef.dense.rows(), coef.dense.cols());
  for (Eigen::Index row : coef.selected_rows)
    coef.sparse.row(row) = coef.dense.row(row);
}

Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& b, double delta) {
  if (delta < 0.0) throw std::invalid_argument("negative soft threshold");
  return b.array().sign() * (b.array().abs() - delta).max(0.0);
}

Eigen::Index k_upper_bound(const Eigen::MatrixXd& b,
                           std::span<const HtSelector> selectors) {
  if (selectors.empty()) throw std::invalid_argument("empty selector set");
  Eigen::Index best = b.rows();
  for (HtSelector selector : selectors) {
    const Eigen::VectorXd scores = selector_scores(b, selector);
    const double mean = scores.mean();
    const Eigen::Index count = (scores.array() >= mean).count();
    best = std::min(best, count);
  }
  return best;
}

}  // namespace crda
