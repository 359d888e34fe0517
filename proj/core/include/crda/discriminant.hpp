#pragma once

#include <Eigen/Dense>

namespace crda {

/// Linear discriminant scores, one row per test observation:
///   d(x) = x^T B - (1/2) diag(M^T B) + ln(pi).
Eigen::MatrixXd discriminant_scores(const Eigen::MatrixXd& xtest,
                                    const Eigen::MatrixXd& means,
                                    const Eigen::MatrixXd& coefficients,
                                    const Eigen::VectorXd& log_priors);

/// Row-wise argmax as 1-based class labels; ties resolve to the smallest
/// class index.
Eigen::VectorXi predict_labels(const Eigen::MatrixXd& scores);

}  // namespace crda
