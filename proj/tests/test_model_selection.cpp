#include <doctest.h>

#include <algorithm>
#include <random>

#include "crda/classifier.hpp"
#include "crda/discriminant.hpp"
#include "crda/evaluation.hpp"
#include "crda/model_selection.hpp"

using namespace crda;

TEST_CASE("k_grid: the worked 1000-feature case") {
  const std::vector<Eigen::Index> grid = k_grid(400, 1000, 10);
  REQUIRE(grid.size() == 10);
  CHECK(grid.front() == 50);
  CHECK(grid.back() == 400);
  const std::vector<Eigen::Index> expected = {50,  63,  79,  100, 126,
                                              159, 200, 252, 317, 400};
  CHECK(grid == expected);
}

TEST_CASE("k_grid collapses when the bound is below the start") {
  CHECK(k_grid(3, 100, 10) == std::vector<Eigen::Index>{3});
}

TEST_CASE("k_grid output is sorted, unique, within range") {
  std::mt19937_64 rng(70);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<Eigen::Index> pick_p(1, 3000);
    const Eigen::Index p = pick_p(rng);
    std::uniform_int_distribution<Eigen::Index> pick_k(1, p);
    const Eigen::Index k_ub = pick_k(rng);
    const std::vector<Eigen::Index> grid = k_grid(k_ub, p, 10);
    REQUIRE(!grid.empty());
    CHECK(grid.back() == k_ub);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      CHECK(grid[j] >= 1);
      CHECK(grid[j] <= k_ub);
      if (j > 0) CHECK(grid[j] > grid[j - 1]);
    }
  }
}

TEST_CASE("stratified_folds: leave-one-out when Q = n") {
  Eigen::VectorXi labels(6);
  labels << 1, 2, 1, 2, 1, 2;
  const std::vector<int> folds = stratified_folds(labels, 6, 3);
  std::vector<int> sorted = folds;
  std::sort(sorted.begin(), sorted.end());
  for (int q = 0; q < 6; ++q) CHECK(sorted[static_cast<std::size_t>(q)] == q);
}

TEST_CASE("stratified_folds: seven members over five folds") {
  Eigen::VectorXi labels = Eigen::VectorXi::Ones(7);
  const std::vector<int> folds = stratified_folds(labels, 5, 1);
  std::vector<int> counts(5, 0);
  for (int f : folds) ++counts[static_cast<std::size_t>(f)];
  std::sort(counts.begin(), counts.end(), std::greater<>());
  CHECK(counts == std::vector<int>{2, 2, 1, 1, 1});
}

TEST_CASE("stratified_folds: per-class counts differ by at most one") {
  std::mt19937_64 rng(71);
  Eigen::VectorXi labels(40);
  for (Eigen::Index i = 0; i < 40; ++i) labels[i] = 1 + static_cast<int>(i % 3);
  for (int q : {2, 3, 5, 7}) {
    const std::vector<int> folds = stratified_folds(labels, q, rng());
    for (int g = 1; g <= 3; ++g) {
      std::vector<int> counts(static_cast<std::size_t>(q), 0);
      for (Eigen::Index i = 0; i < 40; ++i)
        if (labels[i] == g) ++counts[static_cast<std::size_t>(folds[i])];
      const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
      CHECK(*hi - *lo <= 1);
    }
  }
}

TEST_CASE("stratified_folds: deterministic for a fixed seed") {
  Eigen::VectorXi labels(20);
  for (Eigen::Index i = 0; i < 20; ++i) labels[i] = 1 + static_cast<int>(i % 4);
  CHECK(stratified_folds(labels, 5, 99) == stratified_folds(labels, 5, 99));
  CHECK(stratified_folds(labels, 5, 99) != stratified_folds(labels, 5, 100));
}

TEST_CASE("stratified_folds rejects more folds than observations") {
  Eigen::VectorXi labels = Eigen::VectorXi::Ones(3);
  CHECK_THROWS_AS(stratified_folds(labels, 4, 0), std::invalid_argument);
}

namespace {

LabeledDataset cv_instance(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.p = 30;
  spec.p1 = 6;
  spec.num_classes = 3;
  spec.train_counts = {8, 8, 8};
  spec.test_counts = {2, 2, 2};
  spec.shift = 1.0;
  spec.noise_variance = 0.05;
  spec.de_variance = 0.5;
  spec.seed = seed;
  return make_partially_synthetic(spec).train;
}

}  // namespace

TEST_CASE("cross_validate: a single candidate is returned unchanged") {
  const LabeledDataset train = cv_instance(72);
  CvConfig config;
  config.selectors = {HtSelector::L2};
  config.fixed_k = 4;
  config.seed = 5;
  const CvReport report = cross_validate(train, RscmVariant::Ell2, config);
  CHECK(report.chosen_selector == HtSelector::L2);
  CHECK(report.chosen_k == 4);
  REQUIRE(report.grid.size() == 1);
  REQUIRE(report.error_counts.rows() == 1);
  CHECK(report.error_counts(0, 0) >= 0);
  CHECK(report.error_counts(0, 0) <= train.size());
}

TEST_CASE("cross_validate accumulation matches an independent double loop") {
  const LabeledDataset train = cv_instance(73);
  CvConfig config;
  config.seed = 11;
  const CvReport report = cross_validate(train, RscmVariant::Ell2, config);

  // Independent recomputation: explicit fold loop, fresh thresholding per
  // candidate, scoring through the public model surface.
  Eigen::MatrixXi recomputed =
      Eigen::MatrixXi::Zero(report.error_counts.rows(), report.error_counts.cols());
  for (int q = 0; q < config.folds; ++q) {
    std::vector<int> train_idx, val_idx;
    for (Eigen::Index i = 0; i < train.size(); ++i)
      (report.fold_assignment[static_cast<std::size_t>(i)] == q ? val_idx
                                                                : train_idx)
          .push_back(static_cast<int>(i));
    const LabeledDataset fold_train = subset(train, train_idx);
    const LabeledDataset fold_val = subset(train, val_idx);

    const ShrinkageEstimate est = ell_rscm(fold_train, RscmVariant::Ell2);
    const GroupStatistics stats = group_center(fold_train);
    CoefficientMatrix coef = coefficient_matrix(est.op, stats.means);

    for (std::size_t si = 0; si < report.selectors.size(); ++si) {
      for (std::size_t gi = 0; gi < report.grid.size(); ++gi) {
        hard_threshold_rows(coef, report.grid[gi], report.selectors[si]);
        const Eigen::VectorXi pred = predict_labels(discriminant_scores(
            fold_val.features, stats.means, coef.sparse, stats.log_priors));
        for (Eigen::Index i = 0; i < pred.size(); ++i)
          if (pred[i] != fold_val.labels[i])
            ++recomputed(static_cast<Eigen::Index>(si),
                         static_cast<Eigen::Index>(gi));
      }
    }
  }
  CHECK(report.error_counts == recomputed);
}

TEST_CASE("cross_validate: chosen cell is minimal with smallest K, listed order") {
  const LabeledDataset train = cv_instance(74);
  CvConfig config;
  config.seed = 21;
  const CvReport report = cross_validate(train, RscmVariant::Ell1, config);

  const int best = report.error_counts.minCoeff();
  bool seen_chosen = false;
  for (std::size_t gi = 0; gi < report.grid.size() && !seen_chosen; ++gi) {
    for (std::size_t si = 0; si < report.selectors.size() && !seen_chosen; ++si) {
      if (report.error_counts(static_cast<Eigen::Index>(si),
                              static_cast<Eigen::Index>(gi)) != best)
        continue;
      CHECK(report.chosen_selector == report.selectors[si]);
      CHECK(report.chosen_k == report.grid[gi]);
      seen_chosen = true;
    }
  }
  CHECK(seen_chosen);
}

TEST_CASE("cross_validate reproduces bit-for-bit under one seed") {
  const LabeledDataset train = cv_instance(75);
  CvConfig config;
  config.seed = 33;
  const CvReport a = cross_validate(train, RscmVariant::Ell2, config);
  const CvReport b = cross_validate(train, RscmVariant::Ell2, config);
  CHECK(a.error_counts == b.error_counts);
  CHECK(a.grid == b.grid);
  CHECK(a.fold_assignment == b.fold_assignment);
  CHECK(a.chosen_selector == b.chosen_selector);
  CHECK(a.chosen_k == b.chosen_k);
}

TEST_CASE("cross_validate: every observation validates exactly once") {
  const LabeledDataset train = cv_instance(76);
  CvConfig config;
  config.seed = 3;
  const CvReport report = cross_validate(train, RscmVariant::Ell2, config);
  CHECK(static_cast<Eigen::Index>(report.fold_assignment.size()) == train.size());
  for (int fold : report.fold_assignment) {
    CHECK(fold >= 0);
    CHECK(fold < config.folds);
  }
}

TEST_CASE("cross_validate rejects classes smaller than the fold count") {
  LabeledDataset train = cv_instance(77);
  train.labels[0] = 4;  // a singleton class
  CHECK_THROWS_WITH_AS(cross_validate(train, RscmVariant::Ell2, CvConfig{}),
                       doctest::Contains("fewer folds"), std::invalid_argument);
}

TEST_CASE("cross_validate honors the per-fold bound switch") {
  const LabeledDataset train = cv_instance(78);
  CvConfig config;
  config.seed = 13;
  config.per_fold_k_upper_bound = true;
  const CvReport report = cross_validate(train, RscmVariant::Ell2, config);
  CHECK(report.error_counts.rows() == 4);
  CHECK(report.error_counts.cols() ==
        static_cast<Eigen::Index>(report.grid.size()));
  CHECK(report.error_counts.minCoeff() >= 0);
}
