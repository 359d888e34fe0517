#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "crda/dataset.hpp"

namespace crda {

/// Classification and feature-selection rates for one evaluation. The
/// false-positive/negative rates are present only when a ground-truth mask
/// of differentially expressed features was supplied.
struct MetricsRecord {
  double ter = 0.0;  // misclassified / total
  double fsr = 0.0;  // selected features / p
  std::optional<double> fpr;  // false positives / non-DE features
  std::optional<double> fnr;  // missed DE features / DE features
  double act_seconds = 0.0;   // wall-clock fit time, reported only
  int split_index = 0;
};

/// TER and FSR, plus FPR/FNR against the mask when given:
/// FPR = F/p0 and FNR = (p1 - T)/p1 with T = |selected ∩ DE|,
/// F = |selected| - T, p1 = |DE|, p0 = p - p1.
MetricsRecord evaluate_metrics(const Eigen::VectorXi& predictions,
                               const Eigen::VectorXi& truth_labels,
                               std::span<const Eigen::Index> selected_rows,
                               Eigen::Index p,
                               const std::optional<std::vector<bool>>& de_mask = {});

/// Constant classifier predicting the majority training class (ties go to
/// the smallest class index).
struct NaiveModel {
  int label = 1;
  int num_classes = 1;
};

NaiveModel naive_fit(const LabeledDataset& train);
Eigen::VectorXi predict(const NaiveModel& model, Eigen::Index count);

/// Partially synthetic benchmark: p1 randomly placed rows carry class mean
/// patterns of +/- shift (half the classes up, half down, shuffled per row)
/// with within-class variance de_variance; every other row is centered noise
/// with variance noise_variance.
struct SyntheticSpec {
  Eigen::Index p = 100;
  Eigen::Index p1 = 5;
  int num_classes = 2;
  std::vector<int> train_counts;  // per class
  std::vector<int> test_counts;   // per class
  double shift = 1.0;
  double noise_variance = 0.01;
  double de_variance = 0.25;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<bool> de_mask;  // length p
};

SyntheticData make_partially_synthetic(const SyntheticSpec& spec);

/// One stratified train/test partition by observation index.
struct Split {
  std::vector<int> train_indices;
  std::vector<int> test_indices;
};

/// L reproducible stratified splits with about train_size observations in
/// each training part and class proportions preserved (largest-remainder
/// rounding, every class keeping at least one observation on each side).
std::vector<Split> monte_carlo_splits(const LabeledDataset& data, int num_splits,
                                      int train_size, std::uint64_t seed);

}  // namespace crda
