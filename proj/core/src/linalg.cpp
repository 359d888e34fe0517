#include "crda/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace crda {

GroupStatistics group_center(const LabeledDataset& data, PriorMode priors) {
  validate(data);
  const Eigen::Index p = data.dim();
  const Eigen::Index n = data.size();
  const int num_classes = data.num_classes();

  GroupStatistics stats;
  stats.counts = class_counts(data.labels, num_classes);
  stats.means = Eigen::MatrixXd::Zero(p, num_classes);
  for (Eigen::Index i = 0; i < n; ++i)
    stats.means.col(data.labels[i] - 1) += data.features.col(i);
  for (int g = 0; g < num_classes; ++g)
    stats.means.col(g) /= static_cast<double>(stats.counts[g]);

  stats.centered.resize(p, n);
  for (Eigen::Index i = 0; i < n; ++i)
    stats.centered.col(i) = data.features.col(i) - stats.means.col(data.labels[i] - 1);

  stats.log_priors.resize(num_classes);
  if (priors == PriorMode::Uniform) {
    stats.log_priors.setConstant(-std::log(static_cast<double>(num_classes)));
  } else {
    for (int g = 0; g < num_classes; ++g)
      stats.log_priors[g] =
          std::log(static_cast<double>(stats.counts[g]) / static_cast<double>(n));
  }
  return stats;
}

Eigen::MatrixXd pooled_scm(const GroupStatistics& stats) {
  if (stats.centered.size() == 0)
    throw std::invalid_argument("group statistics carry no centered data");
  const double n = static_cast<double>(stats.centered.cols());
  Eigen::MatrixXd s = (stats.centered * stats.centered.transpose()) / n;
  s = 0.5 * (s + s.transpose()).eval();
  return s;
}

ThinSvd thin_svd_via_gram(const Eigen::MatrixXd& x) {
  if (x.size() == 0 || x.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("zero matrix has no thin SVD");
  const Eigen::Index p = x.rows();
  const Eigen::Index n = x.cols();

  Eigen::MatrixXd gram = x.transpose() * x;
  gram = 0.5 * (gram + gram.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("Gram matrix eigendecomposition failed");

  // Eigen returns ascending eigenvalues; traverse in descending order.
  const Eigen::VectorXd& w = es.eigenvalues();
  const double w_max = w[n - 1];
  const double tol =
      w_max * static_cast<double>(std::max(p, n)) * std::numeric_limits<double>::epsilon();
  Eigen::Index m = 0;
  while (m < n && w[n - 1 - m] >= tol) ++m;
  if (m == 0) throw std::invalid_argument("zero matrix has no thin SVD");

  ThinSvd svd;
  svd.d.resize(m);
  svd.v.resize(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    // Tiny negative eigenvalues are clamped; the Gram matrix is PSD in
    // exact arithmetic.
    svd.d[j] = std::sqrt(std::max(w[n - 1 - j], 0.0));
    svd.v.col(j) = es.eigenvectors().col(n - 1 - j);
  }
  svd.u = x * svd.v;
  for (Eigen::Index j = 0; j < m; ++j) svd.u.col(j) /= svd.d[j];
  return svd;
}

CovarianceOperator CovarianceOperator::rscm(ThinSvd svd, double alpha,
                                            Eigen::Index n_samples) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw std::invalid_argument("shrinkage parameter must lie in [0,1)");
  if (n_samples < 1) throw std::invalid_argument("sample count must be positive");
  CovarianceOperator op;
  op.kind_ = Kind::RscmFactored;
  op.eta_ = svd.d.squaredNorm() /
            (static_cast<double>(n_samples) * static_cast<double>(svd.u.rows()));
  if (!(op.eta_ > 0.0)) throw std::runtime_error("singular target: tr(S) is zero");
  op.u_ = std::move(svd.u);
  op.d_ = std::move(svd.d);
  op.alpha_ = alpha;
  op.n_ = n_samples;
  return op;
}

CovarianceOperator CovarianceOperator::rie_pscm(Eigen::MatrixXd basis,
                                                Eigen::VectorXd sigma,
                                                double sigma_null) {
  if (basis.cols() != sigma.size())
    throw std::invalid_argument("basis/eigenvalue size mismatch");
  if (sigma.size() > 0 && sigma.minCoeff() <= 0.0)
    throw std::invalid_argument("shrunk eigenvalues must be positive");
  if (!(sigma_null > 0.0))
    throw std::invalid_argument("complement eigenvalue must be positive");
  CovarianceOperator op;
  op.kind_ = Kind::RiePscm;
  op.u_ = std::move(basis);
  op.d_ = std::move(sigma);
  op.sigma_null_ = sigma_null;
  return op;
}

CovarianceOperator CovarianceOperator::dense(Eigen::MatrixXd sigma) {
  if (sigma.rows() != sigma.cols())
    throw std::invalid_argument("covariance matrix must be square");
  CovarianceOperator op;
  op.kind_ = Kind::Dense;
  op.llt_.compute(sigma);
  if (op.llt_.info() != Eigen::Success)
    throw std::runtime_error("covariance matrix is not positive definite");
  op.u_ = std::move(sigma);
  return op;
}

Eigen::Index CovarianceOperator::dim() const { return u_.rows(); }

double CovarianceOperator::trace() const {
  switch (kind_) {
    case Kind::RscmFactored:
      // Trace-matched by construction: tr(alpha S + (1-alpha) eta I) = tr(S).
      return alpha_ * d_.squaredNorm() / static_cast<double>(n_) +
             (1.0 - alpha_) * eta_ * static_cast<double>(dim());
    case Kind::RiePscm:
      return d_.sum() + sigma_null_ * static_cast<double>(dim() - d_.size());
    case Kind::Dense:
      return u_.trace();
  }
  return 0.0;
}

double CovarianceOperator::log_det() const {
  switch (kind_) {
    case Kind::RscmFactored: {
      const double target = (1.0 - alpha_) * eta_;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < d_.size(); ++i)
        acc += std::log(alpha_ * d_[i] * d_[i] / static_cast<double>(n_) + target);
      acc += static_cast<double>(dim() - d_.size()) * std::log(target);
      return acc;
    }
    case Kind::RiePscm: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < d_.size(); ++i) acc += std::log(d_[i]);
      acc += static_cast<double>(dim() - d_.size()) * std::log(sigma_null_);
      return acc;
    }
    case Kind::Dense: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < u_.rows(); ++i)
        acc += 2.0 * std::log(llt_.matrixL()(i, i));
      return acc;
    }
  }
  return 0.0;
}

Eigen::MatrixXd CovarianceOperator::apply(const Eigen::MatrixXd& z) const {
  if (z.rows() != dim()) throw std::invalid_argument("dimension mismatch");
  switch (kind_) {
    case Kind::RscmFactored: {
      const Eigen::MatrixXd w = u_.transpose() * z;
      const Eigen::VectorXd scale = (alpha_ / static_cast<double>(n_)) *
                                    d_.array().square().matrix();
      return u_ * (scale.asDiagonal() * w) + (1.0 - alpha_) * eta_ * z;
    }
    case Kind::RiePscm: {
      const Eigen::MatrixXd w = u_.transpose() * z;
      const Eigen::VectorXd scale = (d_.array() - sigma_null_).matrix();
      return u_ * (scale.asDiagonal() * w) + sigma_null_ * z;
    }
    case Kind::Dense:
      return u_ * z;
  }
  return {};
}

Eigen::MatrixXd CovarianceOperator::apply_inverse(const Eigen::MatrixXd& z) const {
  if (z.rows() != dim()) throw std::invalid_argument("dimension mismatch");
  switch (kind_) {
    case Kind::RscmFactored: {
      const double target = (1.0 - alpha_) * eta_;
      const Eigen::MatrixXd w = u_.transpose() * z;
      Eigen::VectorXd coeff(d_.size());
      for (Eigen::Index i = 0; i < d_.size(); ++i)
        coeff[i] =
            1.0 / (alpha_ * d_[i] * d_[i] / static_cast<double>(n_) + target) -
            1.0 / target;
      return u_ * (coeff.asDiagonal() * w) + z / target;
    }
    case Kind::RiePscm: {
      const Eigen::MatrixXd w = u_.transpose() * z;
      const Eigen::VectorXd coeff =
          (d_.array().inverse() - 1.0 / sigma_null_).matrix();
      return u_ * (coeff.asDiagonal() * w) + z / sigma_null_;
    }
    case Kind::Dense:
      return llt_.solve(z);
  }
  return {};
}

CovarianceOperator rscm_inverse_operator(const ThinSvd& svd, double alpha,
                                         Eigen::Index n_samples) {
  return CovarianceOperator::rscm(svd, alpha, n_samples);
}

}  // namespace crda
