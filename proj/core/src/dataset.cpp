#include "crda/dataset.hpp"

#include <stdexcept>
#include <string>

namespace crda {

int LabeledDataset::num_classes() const {
  return labels.size() == 0 ? 0 : labels.maxCoeff();
}

void validate(const LabeledDataset& data) {
  if (data.features.rows() < 1)
    throw std::invalid_argument("dataset needs at least one feature");
  if (data.features.cols() < 2)
    throw std::invalid_argument("dataset needs at least two observations");
  if (data.labels.size() != data.features.cols())
    throw std::invalid_argument("label count does not match observation count");
  if (!data.feature_names.empty() &&
      static_cast<Eigen::Index>(data.feature_names.size()) != data.features.rows())
    throw std::invalid_argument("feature name count does not match dimension");
  const int num_classes = data.labels.maxCoeff();
  if (data.labels.minCoeff() < 1)
    throw std::invalid_argument("labels must be positive integers");
  const Eigen::VectorXi counts = class_counts(data.labels, num_classes);
  for (int g = 0; g < num_classes; ++g) {
    if (counts[g] == 0)
      throw std::invalid_argument("degenerate class " + std::to_string(g + 1) +
                                  ": no observations");
  }
}

Eigen::VectorXi class_counts(const Eigen::VectorXi& labels, int num_classes) {
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(num_classes);
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const int g = labels[i];
    if (g < 1 || g > num_classes)
      throw std::invalid_argument("label out of range: " + std::to_string(g));
    ++counts[g - 1];
  }
  return counts;
}

LabeledDataset subset(const LabeledDataset& data, std::span<const int> indices) {
  LabeledDataset out;
  out.features.resize(data.features.rows(), static_cast<Eigen::Index>(indices.size()));
  out.labels.resize(static_cast<Eigen::Index>(indices.size()));
  Eigen::Index j = 0;
  for (int idx : indices) {
    if (idx < 0 || idx >= data.features.cols())
      throw std::invalid_argument("subset index out of range");
    out.features.col(j) = data.features.col(idx);
    out.labels[j] = data.labels[idx];
    ++j;
  }
  out.feature_names = data.feature_names;
  return out;
}

}  // namespace crda
