#pragma once

#include <Eigen/Dense>

#include "crda/dataset.hpp"

namespace crda {

enum class PriorMode { Uniform, Empirical };

struct GroupStatistics {
  Eigen::MatrixXd means;       // p x G, column g = class-g sample mean
  Eigen::VectorXi counts;      // G
  Eigen::VectorXd log_priors;  // G
  Eigen::MatrixXd centered;    // p x n, observations minus own-class mean
};

/// Class means, log priors, and group-centered observations.
/// Uniform priors give ln(1/G); Empirical gives ln(n_g / n).
GroupStatistics group_center(const LabeledDataset& data,
                             PriorMode priors = PriorMode::Uniform);

/// Pooled sample covariance of the centered data, S = (1/n) Xc Xc^T.
Eigen::MatrixXd pooled_scm(const GroupStatistics& stats);

/// Thin SVD X = U diag(d) V^T with d > 0 in descending order.
struct ThinSvd {
  Eigen::MatrixXd u;  // p x m
  Eigen::VectorXd d;  // m
  Eigen::MatrixXd v;  // n x m
  Eigen::Index rank() const { return d.size(); }
};

/// Thin SVD obtained from the eigendecomposition of the n x n Gram matrix
/// X^T X, with U recovered as X V D^{-1}. An eigenvalue of the Gram matrix
/// counts toward the rank iff it is >= max_eigenvalue * max(p,n) * epsilon;
/// smaller (possibly negative) ones are discarded. Throws on an all-zero X.
ThinSvd thin_svd_via_gram(const Eigen::MatrixXd& x);

/// Factored covariance estimate that can apply both the matrix and its
/// inverse to p x k blocks without forming any p x p dense matrix
/// (except for the Dense kind, which is meant for small problems and tests).
class CovarianceOperator {
 public:
  enum class Kind { RscmFactored, RiePscm, Dense };

  /// alpha * S + (1 - alpha) * eta * I with S = (1/n) U D^2 U^T and
  /// eta = tr(S)/p. The inverse uses the factored identity
  ///   inv = U [ (alpha/n D^2 + (1-alpha) eta I)^{-1}
  ///             - 1/((1-alpha) eta) I ] U^T + 1/((1-alpha) eta) I.
  static CovarianceOperator rscm(ThinSvd svd, double alpha, Eigen::Index n_samples);

  /// basis diag(sigma) basis^T + sigma_null * (I - basis basis^T); the
  /// complement eigenvalue sigma_null covers the null space of a thin basis.
  static CovarianceOperator rie_pscm(Eigen::MatrixXd basis, Eigen::VectorXd sigma,
                                     double sigma_null);

  /// Explicit symmetric positive definite matrix (Cholesky-backed).
  static CovarianceOperator dense(Eigen::MatrixXd sigma);

  Kind kind() const { return kind_; }
  Eigen::Index dim() const;
  double trace() const;
  double log_det() const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& z) const;          // Sigma * z
  Eigen::MatrixXd apply_inverse(const Eigen::MatrixXd& z) const;  // Sigma^{-1} * z

 private:
  CovarianceOperator() = default;

  Kind kind_ = Kind::Dense;
  Eigen::MatrixXd u_;       // rscm: left singular vectors; rie: basis; dense: Sigma
  Eigen::VectorXd d_;       // rscm: singular values; rie: basis eigenvalues
  double alpha_ = 0.0;      // rscm
  double eta_ = 0.0;        // rscm: tr(S)/p
  double sigma_null_ = 0.0; // rie
  Eigen::Index n_ = 0;      // rscm sample count
  Eigen::LLT<Eigen::MatrixXd> llt_;  // dense
};

/// Operator form of the regularized SCM inverse of
/// alpha * S + (1 - alpha) * (tr(S)/p) * I, built from the thin SVD of the
/// centered data. Requires alpha in [0,1) and a nonzero target (eta > 0).
CovarianceOperator rscm_inverse_operator(const ThinSvd& svd, double alpha,
                                         Eigen::Index n_samples);

}  // namespace crda
