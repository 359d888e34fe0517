#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "crda/classifier.hpp"
#include "crda/evaluation.hpp"

namespace crda {

/// Shortest-form decimal with 17 significant digits; round-trips doubles
/// exactly.
std::string format_double(double value);

struct LoadedDataset {
  LabeledDataset data;
  std::vector<std::string> label_names;  // original labels, index order 1..G
};

/// CSV with a header row; first column holds the class label (any string,
/// mapped to 1..G in first-appearance order), remaining columns the
/// features. One observation per row; stored transposed internally.
LoadedDataset load_dataset(const std::filesystem::path& path);

/// CSV with a header row and only feature columns (for label-free scoring).
Eigen::MatrixXd load_unlabeled_features(const std::filesystem::path& path);

void save_dataset(const LabeledDataset& data,
                  const std::vector<std::string>& label_names,
                  const std::filesystem::path& path);

/// Single-column CSV of 0/1 flags marking differentially expressed rows.
void save_mask(const std::vector<bool>& mask, const std::filesystem::path& path);
std::vector<bool> load_mask(const std::filesystem::path& path);

/// Versioned textual model document; load rejects unknown versions and
/// truncated files. The coefficient matrix is stored as one
/// (row index, G values) line per selected row.
void save_model(const CrdaModel& model, const std::filesystem::path& path);
CrdaModel load_model(const std::filesystem::path& path);

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& record, const std::string& variant,
                            Eigen::Index sparsity, const std::string& selector);

void save_predictions(const Eigen::VectorXi& labels,
                      const std::vector<std::string>& label_names,
                      const std::filesystem::path& path);

}  // namespace crda
