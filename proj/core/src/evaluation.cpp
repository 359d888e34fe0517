#include "crda/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace crda {

MetricsRecord evaluate_metrics(const Eigen::VectorXi& predictions,
                               const Eigen::VectorXi& truth_labels,
                               std::span<const Eigen::Index> selected_rows,
                               Eigen::Index p,
                               const std::optional<std::vector<bool>>& de_mask) {
  if (predictions.size() != truth_labels.size())
    throw std::invalid_argument("prediction/truth length mismatch");
  if (predictions.size() == 0)
    throw std::invalid_argument("nothing to evaluate");
  if (p < 1) throw std::invalid_argument("dimension must be positive");

  MetricsRecord rec;
  int wrong = 0;
  for (Eigen::Index i = 0; i < predictions.size(); ++i)
    if (predictions[i] != truth_labels[i]) ++wrong;
  rec.ter = static_cast<double>(wrong) / static_cast<double>(predictions.size());
  rec.fsr = static_cast<double>(selected_rows.size()) / static_cast<double>(p);

  if (de_mask) {
    if (static_cast<Eigen::Index>(de_mask->size()) != p)
      throw std::invalid_argument("mask length does not match dimension");
    const auto p1 = static_cast<Eigen::Index>(
        std::count(de_mask->begin(), de_mask->end(), true));
    const Eigen::Index p0 = p - p1;
    if (p1 == 0 || p0 == 0)
      throw std::invalid_argument("mask must mark a proper nonempty subset");
    Eigen::Index true_positives = 0;
    for (Eigen::Index row : selected_rows) {
      if (row < 0 || row >= p) throw std::invalid_argument("selected row out of range");
      if ((*de_mask)[static_cast<std::size_t>(row)]) ++true_positives;
    }
    const auto false_positives =
        static_cast<Eigen::Index>(selected_rows.size()) - true_positives;
    rec.fpr = static_cast<double>(false_positives) / static_cast<double>(p0);
    rec.fnr = static_cast<double>(p1 - true_positives) / static_cast<double>(p1);
  }
  return rec;
}

NaiveModel naive_fit(const LabeledDataset& train) {
  validate(train);
  const int num_classes = train.num_classes();
  const Eigen::VectorXi counts = class_counts(train.labels, num_classes);
  int best = 0;
  for (int g = 1; g < num_classes; ++g)
    if (counts[g] > counts[best]) best = g;  // ties keep the smaller index
  return {best + 1, num_classes};
}

Eigen::VectorXi predict(const NaiveModel& model, Eigen::Index count) {
  return Eigen::VectorXi::Constant(count, model.label);
}

SyntheticData make_partially_synthetic(const SyntheticSpec& spec) {
  if (spec.p < 1) throw std::invalid_argument("dimension must be positive");
  if (spec.p1 < 0 || spec.p1 > spec.p)
    throw std::invalid_argument("cannot place more DE rows than features");
  if (spec.num_classes < 2) throw std::invalid_argument("need at least two classes");
  if (!(spec.noise_variance > 0.0))
    throw std::invalid_argument("noise variance must be positive");
  if (!(spec.de_variance > 0.0))
    throw std::invalid_argument("DE variance must be positive");
  if (spec.shift < 0.0) throw std::invalid_argument("negative shift");
  const auto num_classes = static_cast<std::size_t>(spec.num_classes);
  if (spec.train_counts.size() != num_classes ||
      spec.test_counts.size() != num_classes)
    throw std::invalid_argument("class size lists must have one entry per class");
  for (std::size_t g = 0; g < num_classes; ++g)
    if (spec.train_counts[g] < 1 || spec.test_counts[g] < 1)
      throw std::invalid_argument("every class needs observations on both sides");

  std::mt19937_64 rng(spec.seed);

  // DE row placement.
  std::vector<Eigen::Index> all_rows(spec.p);
  std::iota(all_rows.begin(), all_rows.end(), Eigen::Index{0});
  std::vector<Eigen::Index> de_rows;
  std::sample(all_rows.begin(), all_rows.end(), std::back_inserter(de_rows),
              spec.p1, rng);
  std::vector<bool> mask(spec.p, false);
  for (Eigen::Index row : de_rows) mask[static_cast<std::size_t>(row)] = true;

  // Sign patterns: half the classes shifted up, half down, shuffled per row.
  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(spec.p, spec.num_classes);
  std::vector<double> pattern(num_classes);
  for (Eigen::Index row : de_rows) {
    for (std::size_t g = 0; g < num_classes; ++g)
      pattern[g] = g < (num_classes + 1) / 2 ? 1.0 : -1.0;
    std::shuffle(pattern.begin(), pattern.end(), rng);
    for (std::size_t g = 0; g < num_classes; ++g)
      mu(row, static_cast<Eigen::Index>(g)) = spec.shift * pattern[g];
  }

  Eigen::VectorXd sd = Eigen::VectorXd::Constant(spec.p, std::sqrt(spec.noise_variance));
  for (Eigen::Index row : de_rows) sd[row] = std::sqrt(spec.de_variance);

  std::normal_distribution<double> normal(0.0, 1.0);
  const auto draw = [&](const std::vector<int>& class_sizes) {
    Eigen::Index total = 0;
    for (int c : class_sizes) total += c;
    LabeledDataset data;
    data.features.resize(spec.p, total);
    data.labels.resize(total);
    Eigen::Index col = 0;
    for (std::size_t g = 0; g < num_classes; ++g) {
      for (int j = 0; j < class_sizes[g]; ++j, ++col) {
        for (Eigen::Index i = 0; i < spec.p; ++i)
          data.features(i, col) =
              mu(i, static_cast<Eigen::Index>(g)) + sd[i] * normal(rng);
        data.labels[col] = static_cast<int>(g) + 1;
      }
    }
    return data;
  };

  SyntheticData out;
  out.train = draw(spec.train_counts);
  out.test = draw(spec.test_counts);
  out.de_mask = std::move(mask);
  return out;
}

std::vector<Split> monte_carlo_splits(const LabeledDataset& data, int num_splits,
                                      int train_size, std::uint64_t seed) {
  validate(data);
  if (num_splits < 1) throw std::invalid_argument("need at least one split");
  const Eigen::Index n = data.size();
  const int num_classes = data.num_classes();
  const Eigen::VectorXi counts = class_counts(data.labels, num_classes);
  if (train_size < num_classes || train_size > static_cast<int>(n) - num_classes)
    throw std::invalid_argument("infeasible training size");

  // Largest-remainder allocation of the training size across classes.
  std::vector<int> targets(num_classes);
  std::vector<std::pair<double, int>> remainders(num_classes);
  int assigned = 0;
  for (int g = 0; g < num_classes; ++g) {
    const double exact = static_cast<double>(counts[g]) *
                         static_cast<double>(train_size) / static_cast<double>(n);
    targets[g] = static_cast<int>(std::floor(exact));
    remainders[g] = {exact - std::floor(exact), g};
    assigned += targets[g];
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int j = 0; j < train_size - assigned; ++j)
    ++targets[remainders[static_cast<std::size_t>(j)].second];
  for (int g = 0; g < num_classes; ++g) {
    if (targets[g] < 1 || targets[g] >= counts[g])
      throw std::invalid_argument("class " + std::to_string(g + 1) +
                                  " cannot be split with this training size");
  }

  std::vector<std::vector<int>> members(num_classes);
  for (Eigen::Index i = 0; i < n; ++i)
    members[data.labels[i] - 1].push_back(static_cast<int>(i));

  std::mt19937_64 rng(seed);
  std::vector<Split> splits(num_splits);
  for (Split& split : splits) {
    for (int g = 0; g < num_classes; ++g) {
      std::vector<int> shuffled = members[g];
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      split.train_indices.insert(split.train_indices.end(), shuffled.begin(),
                                 shuffled.begin() + targets[g]);
      split.test_indices.insert(split.test_indices.end(),
                                shuffled.begin() + targets[g], shuffled.end());
    }
    std::sort(split.train_indices.begin(), split.train_indices.end());
    std::sort(split.test_indices.begin(), split.test_indices.end());
  }
  return splits;
}

}  // namespace crda
