#include "crda/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "crda/model_selection.hpp"

namespace crda {

Eigen::VectorXd excess_kurtosis_rows(const Eigen::MatrixXd& centered) {
  const Eigen::Index p = centered.rows();
  const Eigen::Index n = centered.cols();
  Eigen::VectorXd g2 = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double mean = centered.row(i).mean();
    const Eigen::ArrayXd dev = centered.row(i).transpose().array() - mean;
    const double m2 = dev.square().mean();
    if (m2 == 0.0) continue;
    const double m4 = dev.square().square().mean();
    g2[i] = m4 / (m2 * m2) - 3.0;
  }
  (void)n;
  return g2;
}

double kurtosis_kappa(const Eigen::MatrixXd& centered) {
  const Eigen::Index p = centered.rows();
  const Eigen::Index n = centered.cols();
  if (n < 4) throw std::invalid_argument("insufficient samples for kurtosis");
  bool any_variance = false;
  for (Eigen::Index i = 0; i < p && !any_variance; ++i) {
    const double mean = centered.row(i).mean();
    any_variance = ((centered.row(i).transpose().array() - mean) != 0.0).any();
  }
  if (!any_variance)
    throw std::invalid_argument("zero variance in every feature");
  const double kappa = excess_kurtosis_rows(centered).mean() / 3.0;
  // Elliptical lower bound; keeps the shrinkage denominator positive.
  const double lower = -2.0 / static_cast<double>(p + 2) + 1e-6;
  return std::max(kappa, lower);
}

Eigen::VectorXd spatial_median(const Eigen::MatrixXd& x) {
  if (x.cols() < 1) throw std::invalid_argument("spatial median of empty sample");
  const Eigen::Index n = x.cols();
  constexpr double kStepTol = 1e-8;
  constexpr double kTiePoint = 1e-12;
  constexpr int kMaxIter = 1000;

  Eigen::VectorXd y = x.rowwise().mean();
  for (int iter = 0; iter < kMaxIter; ++iter) {
    Eigen::VectorXd dist(n);
    for (Eigen::Index j = 0; j < n; ++j) dist[j] = (x.col(j) - y).norm();

    Eigen::VectorXd y_new;
    const Eigen::Index ties = (dist.array() < kTiePoint).count();
    if (ties == 0) {
      const Eigen::VectorXd w = dist.array().inverse();
      y_new = (x * w) / w.sum();
    } else {
      // Iterate sits on a data point: Vardi-Zhang correction.
      Eigen::VectorXd t = Eigen::VectorXd::Zero(x.rows());
      Eigen::VectorXd r_vec = Eigen::VectorXd::Zero(x.rows());
      double w_sum = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (dist[j] < kTiePoint) continue;
        const double w = 1.0 / dist[j];
        t += w * x.col(j);
        r_vec += w * (x.col(j) - y);
        w_sum += w;
      }
      if (w_sum == 0.0) return y;  // every column equals the iterate
      t /= w_sum;
      const double r = r_vec.norm();
      if (r <= static_cast<double>(ties)) return y;  // optimality at the point
      const double lambda = static_cast<double>(ties) / r;
      y_new = (1.0 - lambda) * t + lambda * y;
    }

    const double step = (y_new - y).norm();
    y = y_new;
    if (step <= kStepTol * (1.0 + y.norm())) return y;
  }
  throw ConvergenceError("spatial median did not converge", y);
}

namespace {

// Columns of x minus mu, normalized, with coincident columns dropped.
Eigen::MatrixXd sign_columns(const Eigen::MatrixXd& x, const Eigen::VectorXd& mu,
                             Eigen::Index* kept_out) {
  if (x.rows() != mu.size()) throw std::invalid_argument("dimension mismatch");
  Eigen::MatrixXd signs(x.rows(), x.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Eigen::VectorXd diff = x.col(j) - mu;
    const double norm = diff.norm();
    if (norm == 0.0) continue;
    signs.col(kept++) = diff / norm;
  }
  *kept_out = kept;
  return signs.leftCols(kept);
}

}  // namespace

Eigen::MatrixXd spatial_sign_covariance(const Eigen::MatrixXd& x,
                                        const Eigen::VectorXd& mu) {
  Eigen::Index kept = 0;
  const Eigen::MatrixXd w = sign_columns(x, mu, &kept);
  if (kept == 0)
    throw std::runtime_error("degenerate signs: every column equals the center");
  Eigen::MatrixXd s = (w * w.transpose()) / static_cast<double>(kept);
  s = 0.5 * (s + s.transpose()).eval();
  return s;
}

double sphericity_ell1(const Eigen::MatrixXd& x) {
  const Eigen::Index p = x.rows();
  const Eigen::VectorXd mu = spatial_median(x);
  Eigen::Index kept = 0;
  const Eigen::MatrixXd w = sign_columns(x, mu, &kept);
  if (kept < 2) throw std::invalid_argument("insufficient samples for sphericity");
  const double n = static_cast<double>(kept);
  // tr(S~^2) via the small Gram matrix: S~ = (1/n) W W^T.
  const Eigen::MatrixXd gram = w.transpose() * w;
  const double tr_s2 = gram.squaredNorm() / (n * n);
  const double raw = n / (n - 1.0) * (static_cast<double>(p) * tr_s2 -
                                      static_cast<double>(p) / n);
  return std::clamp(raw, 1.0, static_cast<double>(p));
}

double sphericity_ell2_traces(double tr_s, double tr_s2, Eigen::Index p,
                              Eigen::Index n, double kappa) {
  if (n < 3) throw std::invalid_argument("insufficient samples for sphericity");
  if (!(tr_s > 0.0)) throw std::runtime_error("non-positive trace");
  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);
  const double a_n = (nd / (nd + kappa)) * (nd / (nd - 1.0) + kappa);
  const double b_n = (kappa + nd) * (nd - 1.0) * (nd - 1.0) /
                     ((nd - 2.0) * (3.0 * kappa * (nd - 1.0) + nd * (nd + 1.0)));
  const double raw = b_n * (pd * tr_s2 / (tr_s * tr_s) - a_n * pd / nd);
  return std::clamp(raw, 1.0, pd);
}

double sphericity_ell2(const Eigen::MatrixXd& pooled_scm, Eigen::Index n,
                       double kappa) {
  if (pooled_scm.rows() != pooled_scm.cols())
    throw std::invalid_argument("pooled SCM must be square");
  return sphericity_ell2_traces(pooled_scm.trace(), pooled_scm.squaredNorm(),
                                pooled_scm.rows(), n, kappa);
}

double sphericity_ell2_centered(const Eigen::MatrixXd& centered, double kappa) {
  const Eigen::Index n = centered.cols();
  const double nd = static_cast<double>(n);
  const Eigen::MatrixXd gram = centered.transpose() * centered;
  const double tr_s = gram.trace() / nd;
  const double tr_s2 = gram.squaredNorm() / (nd * nd);
  return sphericity_ell2_traces(tr_s, tr_s2, centered.rows(), n, kappa);
}

double alpha_hat(double gamma, double kappa, Eigen::Index n, Eigen::Index p) {
  if (!(gamma >= 1.0 && gamma <= static_cast<double>(p)))
    throw std::invalid_argument("sphericity must lie in [1, p]");
  if (n < 2) throw std::invalid_argument("insufficient samples");
  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);
  const double den = (gamma - 1.0) + kappa * (2.0 * gamma + pd) / nd +
                     (gamma + pd) / (nd - 1.0);
  if (!(den > 0.0))
    throw std::runtime_error("invalid kurtosis/sphericity combination");
  return std::clamp((gamma - 1.0) / den, 0.0, 1.0 - 1e-12);
}

ShrinkageEstimate ell_rscm(const LabeledDataset& data, RscmVariant variant,
                           const EllRscmOptions& options) {
  const GroupStatistics stats = group_center(data, options.priors);
  const Eigen::Index p = data.dim();
  const Eigen::Index n = data.size();

  ShrinkageEstimate est;
  est.variant = variant;
  est.kappa = kurtosis_kappa(stats.centered);
  if (variant == RscmVariant::Ell1) {
    est.gamma = sphericity_ell1(options.ell1_spatial_on_raw ? data.features
                                                            : stats.centered);
  } else {
    est.gamma = sphericity_ell2_centered(stats.centered, est.kappa);
  }
  if (options.forced_alpha) {
    est.alpha = *options.forced_alpha;
    if (!(est.alpha >= 0.0 && est.alpha < 1.0))
      throw std::invalid_argument("forced shrinkage parameter must lie in [0,1)");
  } else {
    est.alpha = alpha_hat(est.gamma, est.kappa, n, p);
  }
  const ThinSvd svd = thin_svd_via_gram(stats.centered);
  est.eta = svd.d.squaredNorm() / (static_cast<double>(n) * static_cast<double>(p));
  est.op = rscm_inverse_operator(svd, est.alpha, n);
  return est;
}

double rie_pscm_eigenvalue(double d, double m_target, double eta_penalty) {
  if (!(m_target > 0.0)) throw std::invalid_argument("target mean must be positive");
  if (!(eta_penalty > 0.0)) throw std::invalid_argument("penalty must be positive");
  if (d < 0.0) throw std::invalid_argument("negative sample eigenvalue");

  const double sigma0 = m_target * std::exp(-0.5 / eta_penalty);
  if (d == 0.0) return sigma0;

  const double log_m = std::log(m_target);
  // Stationarity in theta = ln(sigma): h is strictly increasing, so the
  // root is unique and bracketed Newton cannot escape.
  const auto h = [&](double theta) {
    return 1.0 - d * std::exp(-theta) + 2.0 * eta_penalty * (theta - log_m);
  };
  double lo = std::log(std::min(d, sigma0) * 1e-3);
  double hi = std::log(std::max(d, m_target) * 10.0);
  for (int i = 0; i < 64 && h(lo) > 0.0; ++i) lo -= 1.0;
  for (int i = 0; i < 64 && h(hi) < 0.0; ++i) hi += 1.0;

  double theta = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double hv = h(theta);
    const double scale =
        1.0 + d * std::exp(-theta) + 2.0 * eta_penalty * (1.0 + std::abs(theta - log_m));
    if (std::abs(hv) <= 1e-14 * scale) return std::exp(theta);
    if (hv > 0.0)
      hi = theta;
    else
      lo = theta;
    if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::abs(theta)))
      return std::exp(theta);
    const double dh = d * std::exp(-theta) + 2.0 * eta_penalty;
    double next = theta - hv / dh;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    theta = next;
  }
  throw std::runtime_error("Rie-PSCM eigenvalue solve did not converge (bracket [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "])");
}

namespace {

Eigen::VectorXd solve_eigenvalues(const Eigen::VectorXd& d, double m_target,
                                  double eta_penalty) {
  Eigen::VectorXd sigma(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    try {
      sigma[i] = rie_pscm_eigenvalue(std::max(d[i], 0.0), m_target, eta_penalty);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("eigenvalue " + std::to_string(i) + ": " + e.what());
    }
  }
  return sigma;
}

}  // namespace

CovarianceOperator RiePscmEstimate::to_operator() const {
  return CovarianceOperator::rie_pscm(basis, sigma, sigma_null);
}

Eigen::VectorXd RiePscmEstimate::full_eigenvalues() const {
  Eigen::VectorXd all(dim());
  all.head(sigma.size()) = sigma;
  all.tail(dim() - sigma.size()).setConstant(sigma_null);
  return all;
}

RiePscmEstimate rie_pscm(const Eigen::MatrixXd& pooled_scm, double eta_penalty) {
  if (pooled_scm.rows() != pooled_scm.cols())
    throw std::invalid_argument("pooled SCM must be square");
  if (!(eta_penalty > 0.0)) throw std::invalid_argument("penalty must be positive");
  const Eigen::Index p = pooled_scm.rows();
  const double m_target = pooled_scm.trace() / static_cast<double>(p);
  if (!(m_target > 0.0)) throw std::runtime_error("singular target: tr(S) is zero");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pooled_scm);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("SCM eigendecomposition failed");

  RiePscmEstimate est;
  est.m_target = m_target;
  est.eta_penalty = eta_penalty;
  est.sigma_null = m_target * std::exp(-0.5 / eta_penalty);
  est.basis.resize(p, p);
  Eigen::VectorXd d(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    d[j] = es.eigenvalues()[p - 1 - j];
    est.basis.col(j) = es.eigenvectors().col(p - 1 - j);
  }
  est.sigma = solve_eigenvalues(d, m_target, eta_penalty);
  return est;
}

RiePscmEstimate rie_pscm_from_svd(const ThinSvd& svd, Eigen::Index n_samples,
                                  double eta_penalty) {
  if (!(eta_penalty > 0.0)) throw std::invalid_argument("penalty must be positive");
  if (n_samples < 1) throw std::invalid_argument("sample count must be positive");
  const Eigen::Index p = svd.u.rows();
  const double nd = static_cast<double>(n_samples);
  const double m_target = svd.d.squaredNorm() / (nd * static_cast<double>(p));
  if (!(m_target > 0.0)) throw std::runtime_error("singular target: tr(S) is zero");

  RiePscmEstimate est;
  est.m_target = m_target;
  est.eta_penalty = eta_penalty;
  est.sigma_null = m_target * std::exp(-0.5 / eta_penalty);
  est.basis = svd.u;
  const Eigen::VectorXd d = svd.d.array().square() / nd;
  est.sigma = solve_eigenvalues(d, m_target, eta_penalty);
  return est;
}

double rie_pscm_select_eta(const LabeledDataset& data,
                           std::span<const double> eta_grid, int folds,
                           std::uint64_t seed) {
  validate(data);
  if (eta_grid.empty()) throw std::invalid_argument("empty penalty grid");
  for (double eta : eta_grid)
    if (!(eta > 0.0)) throw std::invalid_argument("penalty grid must be positive");
  if (folds < 2) throw std::invalid_argument("need at least two folds");

  const int num_classes = data.num_classes();
  const Eigen::VectorXi counts = class_counts(data.labels, num_classes);
  for (int g = 0; g < num_classes; ++g) {
    if (counts[g] < folds)
      throw std::invalid_argument("class " + std::to_string(g + 1) + " has " +
                                  std::to_string(counts[g]) +
                                  " members; use fewer folds");
  }

  const std::vector<int> assignment = stratified_folds(data.labels, folds, seed);
  std::vector<double> score(eta_grid.size(), 0.0);

  for (int q = 0; q < folds; ++q) {
    std::vector<int> train_idx, val_idx;
    for (Eigen::Index i = 0; i < data.size(); ++i)
      (assignment[i] == q ? val_idx : train_idx).push_back(static_cast<int>(i));

    const GroupStatistics train_stats = group_center(subset(data, train_idx));
    const GroupStatistics val_stats = group_center(subset(data, val_idx));
    const ThinSvd svd = thin_svd_via_gram(train_stats.centered);
    const Eigen::Index n_train = train_stats.centered.cols();
    const double n_val = static_cast<double>(val_stats.centered.cols());
    const Eigen::Index p = data.dim();

    // Per-eta scoring reuses one SVD per fold; only the scalar eigenvalue
    // solves and diagonal sums change with eta.
    const Eigen::MatrixXd w = svd.u.transpose() * val_stats.centered;  // m x n_val
    const Eigen::VectorXd w_row_sq = w.array().square().rowwise().sum();
    const double val_frob_sq = val_stats.centered.squaredNorm();
    const Eigen::VectorXd d =
        svd.d.array().square() / static_cast<double>(n_train);
    const double m_target =
        svd.d.squaredNorm() / (static_cast<double>(n_train) * static_cast<double>(p));
    if (!(m_target > 0.0)) throw std::runtime_error("singular target: tr(S) is zero");

    for (std::size_t j = 0; j < eta_grid.size(); ++j) {
      const double eta = eta_grid[j];
      const Eigen::VectorXd sigma = solve_eigenvalues(d, m_target, eta);
      const double sigma_null = m_target * std::exp(-0.5 / eta);
      double tr_term = val_frob_sq / sigma_null;
      double log_det = static_cast<double>(p - sigma.size()) * std::log(sigma_null);
      for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        tr_term += (1.0 / sigma[i] - 1.0 / sigma_null) * w_row_sq[i];
        log_det += std::log(sigma[i]);
      }
      score[j] += tr_term / n_val + log_det;
    }
  }

  // Scan by ascending eta so exact ties keep the smaller penalty.
  std::vector<std::size_t> order(eta_grid.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return eta_grid[a] < eta_grid[b]; });
  std::size_t best = order[0];
  for (std::size_t j : order)
    if (score[j] < score[best]) best = j;
  return eta_grid[best];
}

std::vector<double> default_eta_grid() {
  std::vector<double> grid(10);
  for (int j = 0; j < 10; ++j)
    grid[j] = std::pow(10.0, -2.0 + 4.0 * static_cast<double>(j) / 9.0);
  return grid;
}

}  // namespace crda
