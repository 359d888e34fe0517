#include <doctest.h>

#include <random>

#include "crda/dataset.hpp"
#include "crda/linalg.hpp"

using namespace crda;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

LabeledDataset single_class(const Eigen::MatrixXd& x) {
  LabeledDataset data;
  data.features = x;
  data.labels = Eigen::VectorXi::Ones(x.cols());
  return data;
}

}  // namespace

TEST_CASE("group_center: one-dimensional single class") {
  LabeledDataset data;
  data.features.resize(1, 2);
  data.features << 1, 3;
  data.labels.resize(2);
  data.labels << 1, 1;
  const GroupStatistics stats = group_center(data);
  CHECK(stats.means(0, 0) == doctest::Approx(2.0));
  CHECK(stats.centered(0, 0) == doctest::Approx(-1.0));
  CHECK(stats.centered(0, 1) == doctest::Approx(1.0));
  CHECK(stats.log_priors[0] == doctest::Approx(0.0));
}

TEST_CASE("group_center: class-wise zero-mean input is a fixed point") {
  Eigen::MatrixXd x = random_matrix(4, 10, 1);
  Eigen::VectorXi labels(10);
  labels << 1, 1, 1, 1, 1, 2, 2, 2, 2, 2;
  for (int g = 0; g < 2; ++g) {
    const Eigen::VectorXd mean = x.middleCols(5 * g, 5).rowwise().mean();
    x.middleCols(5 * g, 5).colwise() -= mean;
  }
  LabeledDataset data{x, labels, {}};
  const GroupStatistics stats = group_center(data);
  CHECK(stats.means.cwiseAbs().maxCoeff() < 1e-14);
  CHECK((stats.centered - x).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("group_center: two classes by hand") {
  LabeledDataset data;
  data.features.resize(2, 3);
  data.features << 1, 3, 0, 0, 0, 2;
  data.labels.resize(3);
  data.labels << 1, 1, 2;
  const GroupStatistics stats = group_center(data);
  CHECK(stats.means(0, 0) == doctest::Approx(2.0));
  CHECK(stats.means(1, 0) == doctest::Approx(0.0));
  CHECK(stats.means(0, 1) == doctest::Approx(0.0));
  CHECK(stats.means(1, 1) == doctest::Approx(2.0));
  Eigen::MatrixXd expected(2, 3);
  expected << -1, 1, 0, 0, 0, 0;
  CHECK((stats.centered - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(stats.log_priors[0] == doctest::Approx(std::log(0.5)));

  const GroupStatistics empirical = group_center(data, PriorMode::Empirical);
  CHECK(empirical.log_priors[0] == doctest::Approx(std::log(2.0 / 3.0)));
  CHECK(empirical.log_priors[1] == doctest::Approx(std::log(1.0 / 3.0)));
}

TEST_CASE("group_center is idempotent on centered data") {
  const Eigen::MatrixXd x = random_matrix(5, 12, 2);
  Eigen::VectorXi labels(12);
  labels << 1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3;
  const GroupStatistics first = group_center({x, labels, {}});
  const GroupStatistics second = group_center({first.centered, labels, {}});
  CHECK(second.means.cwiseAbs().maxCoeff() < 1e-12);
  CHECK((second.centered - first.centered).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pooled_scm: degenerate and scalar cases") {
  GroupStatistics stats;
  stats.centered = Eigen::MatrixXd::Zero(3, 4);
  CHECK(pooled_scm(stats).cwiseAbs().maxCoeff() == 0.0);

  stats.centered.resize(1, 2);
  stats.centered << -1, 1;
  CHECK(pooled_scm(stats)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("pooled_scm matches direct summation") {
  const Eigen::MatrixXd x = random_matrix(3, 4, 3);
  GroupStatistics stats;
  stats.centered = x;
  const Eigen::MatrixXd s = pooled_scm(stats);
  Eigen::MatrixXd brute = Eigen::MatrixXd::Zero(3, 3);
  for (int j = 0; j < 4; ++j) brute += x.col(j) * x.col(j).transpose();
  brute /= 4.0;
  CHECK((s - brute).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pooled_scm equals the class-count weighted per-class SCMs") {
  const Eigen::MatrixXd x = random_matrix(4, 9, 4);
  Eigen::VectorXi labels(9);
  labels << 1, 1, 1, 1, 2, 2, 3, 3, 3;
  const LabeledDataset data{x, labels, {}};
  const GroupStatistics stats = group_center(data);
  const Eigen::MatrixXd s = pooled_scm(stats);

  Eigen::MatrixXd weighted = Eigen::MatrixXd::Zero(4, 4);
  for (int g = 1; g <= 3; ++g) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(4, 4);
    int count = 0;
    for (int j = 0; j < 9; ++j) {
      if (labels[j] != g) continue;
      acc += stats.centered.col(j) * stats.centered.col(j).transpose();
      ++count;
    }
    weighted += (acc / count) * (static_cast<double>(count) / 9.0);
  }
  CHECK((s - weighted).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("thin_svd_via_gram: unit column") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 1);
  x(0, 0) = 1.0;
  const ThinSvd svd = thin_svd_via_gram(x);
  CHECK(svd.rank() == 1);
  CHECK(svd.d[0] == doctest::Approx(1.0));
}

TEST_CASE("thin_svd_via_gram: orthogonal columns keep their norms") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 2);
  x(0, 0) = 2.0;
  x(1, 1) = 1.0;
  const ThinSvd svd = thin_svd_via_gram(x);
  REQUIRE(svd.rank() == 2);
  CHECK(svd.d[0] == doctest::Approx(2.0));
  CHECK(svd.d[1] == doctest::Approx(1.0));
}

TEST_CASE("thin_svd_via_gram reconstructs a random matrix") {
  const Eigen::MatrixXd x = random_matrix(50, 10, 5);
  const ThinSvd svd = thin_svd_via_gram(x);
  const Eigen::MatrixXd rebuilt = svd.u * svd.d.asDiagonal() * svd.v.transpose();
  CHECK((rebuilt - x).norm() / x.norm() < 1e-10);
  CHECK((svd.u.transpose() * svd.u - Eigen::MatrixXd::Identity(svd.rank(), svd.rank()))
            .cwiseAbs()
            .maxCoeff() < 1e-9);
  CHECK((svd.v.transpose() * svd.v - Eigen::MatrixXd::Identity(svd.rank(), svd.rank()))
            .cwiseAbs()
            .maxCoeff() < 1e-9);
}

TEST_CASE("thin_svd_via_gram rejects the zero matrix") {
  CHECK_THROWS_WITH_AS(thin_svd_via_gram(Eigen::MatrixXd::Zero(3, 2)),
                       doctest::Contains("zero matrix"), std::invalid_argument);
}

TEST_CASE("rscm operator: alpha = 0 is the scaled identity") {
  const Eigen::MatrixXd x = random_matrix(6, 4, 6);
  const ThinSvd svd = thin_svd_via_gram(x);
  const Eigen::Index n = 4;
  const double eta = svd.d.squaredNorm() / (n * 6.0);
  const CovarianceOperator op = rscm_inverse_operator(svd, 0.0, n);
  const Eigen::VectorXd v = random_matrix(6, 1, 7);
  CHECK((op.apply_inverse(v) - v / eta).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((op.apply(v) - v * eta).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rscm operator matches the dense inverse") {
  const Eigen::Index p = 5, n = 3;
  const Eigen::MatrixXd x = random_matrix(p, n, 8);
  const ThinSvd svd = thin_svd_via_gram(x);
  const Eigen::MatrixXd s = (x * x.transpose()) / static_cast<double>(n);
  const double eta = s.trace() / static_cast<double>(p);
  const double alpha = 0.5;
  const Eigen::MatrixXd reg =
      alpha * s + (1 - alpha) * eta * Eigen::MatrixXd::Identity(p, p);

  const CovarianceOperator op = rscm_inverse_operator(svd, alpha, n);
  const Eigen::MatrixXd z = random_matrix(p, 4, 9);
  const Eigen::MatrixXd direct = reg.ldlt().solve(z);
  CHECK((op.apply_inverse(z) - direct).norm() / direct.norm() < 1e-10);
}

TEST_CASE("rscm operator round-trips apply and apply_inverse") {
  const Eigen::MatrixXd x = random_matrix(12, 5, 10);
  const ThinSvd svd = thin_svd_via_gram(x);
  const CovarianceOperator op = rscm_inverse_operator(svd, 0.7, 5);
  const Eigen::VectorXd v = random_matrix(12, 1, 11);
  CHECK((op.apply_inverse(op.apply(v)) - v).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rscm trace equals tr(S) for every alpha") {
  const Eigen::MatrixXd x = random_matrix(7, 4, 12);
  const ThinSvd svd = thin_svd_via_gram(x);
  const double tr_s = (x * x.transpose() / 4.0).trace();
  for (double alpha : {0.0, 0.3, 0.9, 0.999}) {
    const CovarianceOperator op = rscm_inverse_operator(svd, alpha, 4);
    CHECK(op.trace() == doctest::Approx(tr_s).epsilon(1e-12));
  }
}

TEST_CASE("rscm operator rejects bad parameters") {
  const Eigen::MatrixXd x = random_matrix(4, 3, 13);
  const ThinSvd svd = thin_svd_via_gram(x);
  CHECK_THROWS_AS(rscm_inverse_operator(svd, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(rscm_inverse_operator(svd, -0.1, 3), std::invalid_argument);
}

TEST_CASE("dense operator applies and solves") {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 2, 0, 0, 1;
  const CovarianceOperator op = CovarianceOperator::dense(sigma);
  Eigen::VectorXd v(2);
  v << 2, 1;
  CHECK((op.apply_inverse(v) - Eigen::VectorXd::Ones(2)).cwiseAbs().maxCoeff() <
        1e-14);
  CHECK(op.trace() == doctest::Approx(3.0));
  CHECK(op.log_det() == doctest::Approx(std::log(2.0)));
}

TEST_CASE("rscm log_det matches the dense determinant") {
  const Eigen::Index p = 6, n = 4;
  const Eigen::MatrixXd x = random_matrix(p, n, 14);
  const ThinSvd svd = thin_svd_via_gram(x);
  const Eigen::MatrixXd s = (x * x.transpose()) / static_cast<double>(n);
  const double eta = s.trace() / static_cast<double>(p);
  const double alpha = 0.4;
  const Eigen::MatrixXd reg =
      alpha * s + (1 - alpha) * eta * Eigen::MatrixXd::Identity(p, p);
  const CovarianceOperator op = rscm_inverse_operator(svd, alpha, n);
  CHECK(op.log_det() == doctest::Approx(std::log(reg.determinant())).epsilon(1e-9));
}

TEST_CASE("single-class helper keeps validate happy") {
  CHECK_NOTHROW(validate(single_class(random_matrix(3, 5, 15))));
}
