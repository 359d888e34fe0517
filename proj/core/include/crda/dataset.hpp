#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace crda {

/// Labeled data with one observation per column. Class labels are integers
/// in {1..G}; G is the largest label and every class must be nonempty.
struct LabeledDataset {
  Eigen::MatrixXd features;                 // p x n
  Eigen::VectorXi labels;                   // n
  std::vector<std::string> feature_names;   // optional, size p when present

  Eigen::Index dim() const { return features.rows(); }
  Eigen::Index size() const { return features.cols(); }
  int num_classes() const;
};

/// Throws std::invalid_argument when the dataset invariants do not hold:
/// p >= 1, n >= 2, labels within {1..G}, no empty class, and label count
/// matching the number of observations.
void validate(const LabeledDataset& data);

/// Per-class observation counts; length num_classes.
Eigen::VectorXi class_counts(const Eigen::VectorXi& labels, int num_classes);

/// Dataset restricted to the given observation indices (kept in order).
LabeledDataset subset(const LabeledDataset& data, std::span<const int> indices);

}  // namespace crda
