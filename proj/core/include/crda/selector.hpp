#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

#include "crda/linalg.hpp"

namespace crda {

/// Row-scoring functions driving hard thresholding: sample variance and the
/// l1 / l2 / l-infinity norms.
enum class HtSelector { Variance, L1, L2, Linf };

std::string to_string(HtSelector selector);
HtSelector selector_from_string(const std::string& name);

/// Discriminant coefficients B = Sigma^{-1} M and a row-sparse compression.
struct CoefficientMatrix {
  Eigen::MatrixXd dense;                    // p x G
  Eigen::MatrixXd sparse;                   // p x G, zero off selected rows
  std::vector<Eigen::Index> selected_rows;  // ascending
};

/// B = Sigma^{-1} M via the factored operator; the sparse part starts as a
/// copy of the dense one with every row selected.
CoefficientMatrix coefficient_matrix(const CovarianceOperator& inverse_op,
                                     const Eigen::MatrixXd& means);

/// Per-row selector scores. The variance selector needs at least two classes
/// (divisor G-1).
Eigen::VectorXd selector_scores(const Eigen::MatrixXd& b, HtSelector selector);

/// Row indices ordered by descending score; equal scores keep index order.
std::vector<Eigen::Index> descending_score_order(const Eigen::VectorXd& scores);

/// Indices of the k largest scores; equal scores prefer the smaller row
/// index. Returned ascending.
std::vector<Eigen::Index> top_k_rows(const Eigen::VectorXd& scores, Eigen::Index k);

/// Keeps the k rows of the dense matrix with the largest selector scores and
/// zeroes the rest, recording the surviving row indices.
void hard_threshold_rows(CoefficientMatrix& coef, Eigen::Index k, HtSelector selector);

/// Element-wise sign(b) (|b| - delta)_+.
Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& b, double delta);

/// Data-adaptive sparsity bound: for each selector, the number of rows whose
/// score is at least the mean score; the minimum over the given set is
/// returned. Always within [1, p].
Eigen::Index k_upper_bound(const Eigen::MatrixXd& b,
                           std::span<const HtSelector> selectors);

}  // namespace crda
