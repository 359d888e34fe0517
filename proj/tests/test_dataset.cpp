#include <doctest.h>

#include "crda/dataset.hpp"

using namespace crda;

namespace {

LabeledDataset tiny() {
  LabeledDataset data;
  data.features.resize(2, 3);
  data.features << 1, 3, 0, 0, 0, 2;
  data.labels.resize(3);
  data.labels << 1, 1, 2;
  return data;
}

}  // namespace

TEST_CASE("validate accepts a well-formed dataset") {
  CHECK_NOTHROW(validate(tiny()));
}

TEST_CASE("validate rejects an empty class") {
  LabeledDataset data = tiny();
  data.labels << 1, 1, 3;  // class 2 missing
  CHECK_THROWS_WITH_AS(validate(data), doctest::Contains("degenerate class"),
                       std::invalid_argument);
}

TEST_CASE("validate rejects non-positive labels and bad sizes") {
  LabeledDataset data = tiny();
  data.labels << 0, 1, 2;
  CHECK_THROWS_AS(validate(data), std::invalid_argument);

  data = tiny();
  data.labels.resize(2);
  data.labels << 1, 2;
  CHECK_THROWS_AS(validate(data), std::invalid_argument);

  data = tiny();
  data.features.resize(2, 1);
  data.labels.resize(1);
  data.labels << 1;
  CHECK_THROWS_AS(validate(data), std::invalid_argument);
}

TEST_CASE("class_counts tallies labels and rejects strays") {
  const LabeledDataset data = tiny();
  const Eigen::VectorXi counts = class_counts(data.labels, 2);
  CHECK(counts[0] == 2);
  CHECK(counts[1] == 1);
  CHECK_THROWS_AS(class_counts(data.labels, 1), std::invalid_argument);
}

TEST_CASE("subset keeps requested columns in order") {
  const LabeledDataset data = tiny();
  const std::vector<int> idx = {2, 0};
  const LabeledDataset sub = subset(data, idx);
  CHECK(sub.size() == 2);
  CHECK(sub.features(1, 0) == 2.0);
  CHECK(sub.labels[0] == 2);
  CHECK(sub.labels[1] == 1);

  const std::vector<int> bad = {5};
  CHECK_THROWS_AS(subset(data, bad), std::invalid_argument);
}
