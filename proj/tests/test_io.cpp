#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "crda/classifier.hpp"
#include "crda/evaluation.hpp"
#include "crda/io.hpp"

using namespace crda;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static int counter = 0;
  const fs::path dir =
      fs::temp_directory_path() / ("crda_io_test_" + std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

CrdaModel fitted_model(const SyntheticData& data) {
  FitConfig config;
  config.variant = CrdaVariant::Crda2;
  config.cv.folds = 2;
  return fit(data.train, config);
}

SyntheticData small_synth(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.p = 40;
  spec.p1 = 6;
  spec.num_classes = 2;
  spec.train_counts = {8, 8};
  spec.test_counts = {6, 6};
  spec.de_variance = 0.05;
  spec.shift = 1.5;
  spec.seed = seed;
  return make_partially_synthetic(spec);
}

}  // namespace

TEST_CASE("format_double round-trips doubles exactly") {
  std::mt19937_64 rng(90);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double value = normal(rng) * std::pow(10.0, static_cast<int>(rng() % 21) - 10);
    CHECK(std::stod(format_double(value)) == value);
  }
  CHECK(format_double(0.0) == "0");
}

TEST_CASE("load_dataset maps string labels in first-appearance order") {
  const fs::path dir = temp_dir();
  write_file(dir / "d.csv", "label,f1,f2\nA,1,2\nB,3,4\nA,5,6\n");
  const LoadedDataset loaded = load_dataset(dir / "d.csv");
  CHECK(loaded.data.dim() == 2);
  CHECK(loaded.data.size() == 3);
  CHECK(loaded.data.num_classes() == 2);
  CHECK(loaded.label_names == std::vector<std::string>{"A", "B"});
  CHECK(loaded.data.labels[0] == 1);
  CHECK(loaded.data.labels[1] == 2);
  CHECK(loaded.data.labels[2] == 1);
  CHECK(loaded.data.features(0, 1) == 3.0);
  CHECK(loaded.data.feature_names == std::vector<std::string>{"f1", "f2"});
}

TEST_CASE("load_dataset names the offending line") {
  const fs::path dir = temp_dir();
  write_file(dir / "ragged.csv", "label,f1,f2\nA,1,2\nB,3\n");
  CHECK_THROWS_WITH_AS(load_dataset(dir / "ragged.csv"),
                       doctest::Contains("line 3"), std::runtime_error);

  write_file(dir / "word.csv", "label,f1\nA,1\nB,dog\n");
  CHECK_THROWS_WITH_AS(load_dataset(dir / "word.csv"), doctest::Contains("line 3"),
                       std::runtime_error);
}

TEST_CASE("dataset write-read round trip is exact") {
  const fs::path dir = temp_dir();
  const SyntheticData data = small_synth(91);
  save_dataset(data.train, {"N", "T"}, dir / "train.csv");
  const LoadedDataset loaded = load_dataset(dir / "train.csv");
  CHECK((loaded.data.features - data.train.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded.data.labels == data.train.labels);
  CHECK(loaded.label_names == std::vector<std::string>{"N", "T"});
}

TEST_CASE("unlabeled loader reads all columns as features") {
  const fs::path dir = temp_dir();
  write_file(dir / "u.csv", "f1,f2,f3\n1,2,3\n4,5,6\n");
  const Eigen::MatrixXd features = load_unlabeled_features(dir / "u.csv");
  CHECK(features.rows() == 3);
  CHECK(features.cols() == 2);
  CHECK(features(2, 1) == 6.0);
}

TEST_CASE("mask round trip") {
  const fs::path dir = temp_dir();
  const std::vector<bool> mask = {true, false, false, true, true};
  save_mask(mask, dir / "mask.csv");
  CHECK(load_mask(dir / "mask.csv") == mask);

  write_file(dir / "bad.csv", "de\n1\n2\n");
  CHECK_THROWS_AS(load_mask(dir / "bad.csv"), std::runtime_error);
}

TEST_CASE("model save/load round trip reproduces predictions bit-exactly") {
  const fs::path dir = temp_dir();
  const SyntheticData data = small_synth(92);
  CrdaModel model = fitted_model(data);
  model.label_names = {"N", "T"};
  save_model(model, dir / "m.crda");
  const CrdaModel loaded = load_model(dir / "m.crda");

  CHECK(loaded.variant == model.variant);
  CHECK(loaded.selector == model.selector);
  CHECK(loaded.sparsity == model.sparsity);
  CHECK(loaded.selected_rows == model.selected_rows);
  CHECK(loaded.label_names == model.label_names);

  std::mt19937_64 rng(93);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(model.dim(), 100);
  for (Eigen::Index j = 0; j < 100; ++j)
    for (Eigen::Index i = 0; i < model.dim(); ++i) x(i, j) = normal(rng);

  const Eigen::MatrixXd before = discriminant_scores(x, model);
  const Eigen::MatrixXd after = discriminant_scores(x, loaded);
  CHECK((before - after).cwiseAbs().maxCoeff() == 0.0);
  CHECK(predict(x, model) == predict(x, loaded));
}

TEST_CASE("model file stores exactly K coefficient rows") {
  const fs::path dir = temp_dir();
  const SyntheticData data = small_synth(94);
  const CrdaModel model = fitted_model(data);
  save_model(model, dir / "m.crda");
  const std::string text = read_file(dir / "m.crda");
  const std::string key = "coefficients " + std::to_string(model.selected_rows.size());
  CHECK(text.find(key) != std::string::npos);
  CHECK(static_cast<Eigen::Index>(model.selected_rows.size()) == model.sparsity);
}

TEST_CASE("model loader rejects unknown versions and truncation") {
  const fs::path dir = temp_dir();
  const SyntheticData data = small_synth(95);
  const CrdaModel model = fitted_model(data);
  save_model(model, dir / "m.crda");

  std::string text = read_file(dir / "m.crda");
  std::string wrong = text;
  wrong.replace(wrong.find("format_version 1"), 16, "format_version 9");
  write_file(dir / "wrong.crda", wrong);
  CHECK_THROWS_WITH_AS(load_model(dir / "wrong.crda"),
                       doctest::Contains("version"), std::runtime_error);

  write_file(dir / "short.crda", text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_model(dir / "short.crda"), std::runtime_error);

  write_file(dir / "noise.crda", "not a model\n");
  CHECK_THROWS_AS(load_model(dir / "noise.crda"), std::runtime_error);
}

TEST_CASE("metrics csv row renders optional fields as empty") {
  MetricsRecord rec;
  rec.ter = 0.125;
  rec.fsr = 0.5;
  rec.split_index = 3;
  CHECK(metrics_csv_row(rec, "crda1", 7, "l2") ==
        "3,crda1,0.125,0.5,,,0,7,l2");
  rec.fpr = 0.25;
  rec.fnr = 1.0;
  CHECK(metrics_csv_row(rec, "crda1", 7, "l2") ==
        "3,crda1,0.125,0.5,0.25,1,0,7,l2");
}
