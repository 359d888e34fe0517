#include "crda/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "crda/classifier.hpp"
#include "crda/evaluation.hpp"
#include "crda/io.hpp"
#include "crda/model_selection.hpp"

namespace crda {

namespace {

std::vector<HtSelector> parse_selectors(const std::vector<std::string>& names) {
  std::vector<HtSelector> selectors;
  for (const std::string& name : names) selectors.push_back(selector_from_string(name));
  return selectors;
}

struct TrainArgs {
  std::string data, out, variant = "crda1", priors = "uniform";
  std::vector<std::string> selectors = {"variance", "l1", "l2", "linf"};
  int folds = 5, grid_size = 10;
  std::uint64_t seed = 0;
  std::optional<std::string> fixed_selector;
  std::optional<long> fixed_sparsity;
  std::optional<double> delta, eta, alpha;
  bool ell1_raw = false;
};

FitConfig make_fit_config(const TrainArgs& args) {
  FitConfig config;
  config.variant = variant_from_string(args.variant);
  if (args.fixed_selector) config.selector = selector_from_string(*args.fixed_selector);
  if (args.fixed_sparsity) config.sparsity = *args.fixed_sparsity;
  config.soft_delta = args.delta;
  config.eta_penalty = args.eta;
  config.forced_alpha = args.alpha;
  config.ell1_spatial_on_raw = args.ell1_raw;
  config.priors = args.priors == "empirical" ? PriorMode::Empirical : PriorMode::Uniform;
  config.cv.folds = args.folds;
  config.cv.grid_size = args.grid_size;
  config.cv.selectors = parse_selectors(args.selectors);
  config.cv.seed = args.seed;
  return config;
}

int run_train(const TrainArgs& args) {
  const LoadedDataset loaded = load_dataset(args.data);
  CrdaModel model = fit(loaded.data, make_fit_config(args));
  model.label_names = loaded.label_names;
  save_model(model, args.out);
  std::cout << "variant=" << to_string(model.variant)
            << " selector=" << to_string(model.selector)
            << " K=" << model.sparsity;
  if (model.variant == CrdaVariant::ScrdaBaseline)
    std::cout << " delta=" << format_double(model.soft_delta);
  if (model.variant == CrdaVariant::Crda3)
    std::cout << " eta_penalty=" << format_double(model.diagnostics.eta_penalty);
  else
    std::cout << " alpha=" << format_double(model.diagnostics.alpha);
  std::cout << " model=" << args.out << "\n";
  return 0;
}

int run_cv(const TrainArgs& args) {
  const CrdaVariant variant = variant_from_string(args.variant);
  if (variant != CrdaVariant::Crda1 && variant != CrdaVariant::Crda2)
    throw std::invalid_argument("cv applies to crda1 or crda2");
  const LoadedDataset loaded = load_dataset(args.data);

  CvConfig config;
  config.folds = args.folds;
  config.grid_size = args.grid_size;
  config.selectors = parse_selectors(args.selectors);
  config.seed = args.seed;
  EllRscmOptions options;
  options.forced_alpha = args.alpha;
  options.ell1_spatial_on_raw = args.ell1_raw;
  options.priors = args.priors == "empirical" ? PriorMode::Empirical : PriorMode::Uniform;

  const CvReport report = cross_validate(
      loaded.data,
      variant == CrdaVariant::Crda1 ? RscmVariant::Ell1 : RscmVariant::Ell2, config,
      options);

  std::cout << "selector,K,errors,chosen\n";
  for (std::size_t si = 0; si < report.selectors.size(); ++si) {
    for (std::size_t gi = 0; gi < report.grid.size(); ++gi) {
      const bool chosen = report.selectors[si] == report.chosen_selector &&
                          report.grid[gi] == report.chosen_k;
      std::cout << to_string(report.selectors[si]) << ',' << report.grid[gi] << ','
                << report.error_counts(static_cast<Eigen::Index>(si),
                                       static_cast<Eigen::Index>(gi))
                << ',' << (chosen ? 1 : 0) << '\n';
    }
  }
  return 0;
}

struct PredictArgs {
  std::string model, data, out;
  bool no_labels = false;
};

int run_predict(const PredictArgs& args) {
  const CrdaModel model = load_model(args.model);
  Eigen::MatrixXd features;
  if (args.no_labels) {
    features = load_unlabeled_features(args.data);
  } else {
    features = load_dataset(args.data).data.features;
  }
  const Eigen::VectorXi labels = predict(features, model);
  save_predictions(labels, model.label_names, args.out);
  std::cout << "predictions=" << args.out << " count=" << labels.size() << "\n";
  return 0;
}

struct EvalArgs {
  std::string model, data, mask, out;
  int split_index = 0;
};

int run_eval(const EvalArgs& args) {
  const CrdaModel model = load_model(args.model);
  const LoadedDataset loaded = load_dataset(args.data);

  // Truth labels of the evaluation file are matched to the model's label
  // order; unseen label strings are an error.
  Eigen::VectorXi truth(loaded.data.size());
  for (Eigen::Index i = 0; i < loaded.data.size(); ++i) {
    const std::string& name =
        loaded.label_names[static_cast<std::size_t>(loaded.data.labels[i] - 1)];
    const auto pos =
        std::find(model.label_names.begin(), model.label_names.end(), name);
    if (pos == model.label_names.end())
      throw std::runtime_error("label '" + name + "' not known to the model");
    truth[i] = static_cast<int>(pos - model.label_names.begin()) + 1;
  }

  const Eigen::VectorXi predictions = predict(loaded.data.features, model);
  std::optional<std::vector<bool>> mask;
  if (!args.mask.empty()) mask = load_mask(args.mask);

  MetricsRecord record = evaluate_metrics(predictions, truth, model.selected_rows,
                                          model.dim(), mask);
  record.split_index = args.split_index;

  const std::string text = metrics_csv_header() + "\n" +
                           metrics_csv_row(record, to_string(model.variant),
                                           model.sparsity, to_string(model.selector)) +
                           "\n";
  if (args.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream file(args.out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + args.out);
    file << text;
    std::cout << "metrics=" << args.out << "\n";
  }
  return 0;
}

struct SynthArgs {
  long p = 100, p1 = 5;
  int num_classes = 2;
  std::vector<int> sizes, test_sizes;
  double shift = 1.0, noise_var = 0.01, de_var = 0.25;
  std::uint64_t seed = 0;
  std::string out;
};

int run_synth(const SynthArgs& args) {
  SyntheticSpec spec;
  spec.p = args.p;
  spec.p1 = args.p1;
  spec.num_classes = args.num_classes;
  spec.train_counts = args.sizes;
  spec.test_counts = args.test_sizes.empty() ? args.sizes : args.test_sizes;
  spec.shift = args.shift;
  spec.noise_variance = args.noise_var;
  spec.de_variance = args.de_var;
  spec.seed = args.seed;

  const SyntheticData data = make_partially_synthetic(spec);
  std::vector<std::string> label_names;
  for (int g = 1; g <= spec.num_classes; ++g)
    label_names.push_back("C" + std::to_string(g));

  const std::string train_path = args.out + "_train.csv";
  const std::string test_path = args.out + "_test.csv";
  const std::string mask_path = args.out + "_mask.csv";
  save_dataset(data.train, label_names, train_path);
  save_dataset(data.test, label_names, test_path);
  save_mask(data.de_mask, mask_path);
  std::cout << "train=" << train_path << " test=" << test_path
            << " mask=" << mask_path << "\n";
  return 0;
}

}  // namespace

int run_command(int argc, const char* const* argv) {
  CLI::App app{"Compressive regularized discriminant analysis"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "Fit a model and save it");
  train->add_option("--data", train_args.data, "Training CSV")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--variant", train_args.variant, "crda1|crda2|crda3|scrda")
      ->check(CLI::IsMember({"crda1", "crda2", "crda3", "scrda"}));
  train->add_option("--out", train_args.out, "Model output path")->required();
  train->add_option("--folds", train_args.folds, "CV folds");
  train->add_option("--seed", train_args.seed, "Random seed");
  train->add_option("--grid-size", train_args.grid_size, "Sparsity grid size");
  train->add_option("--selectors", train_args.selectors,
                    "Candidate selectors (comma separated)")
      ->delimiter(',');
  train->add_option("--selector", train_args.fixed_selector,
                    "Fix the selector (variance|l1|l2|linf)");
  train->add_option("--sparsity", train_args.fixed_sparsity, "Fix K");
  train->add_option("--delta", train_args.delta, "Fix the scrda soft threshold");
  train->add_option("--eta", train_args.eta, "Fix the crda3 penalty weight");
  train->add_option("--alpha", train_args.alpha, "Force the shrinkage parameter");
  train->add_flag("--ell1-raw", train_args.ell1_raw,
                  "Ell1 spatial statistics from raw observations");
  train->add_option("--priors", train_args.priors, "uniform|empirical")
      ->check(CLI::IsMember({"uniform", "empirical"}));

  TrainArgs cv_args;
  CLI::App* cv = app.add_subcommand("cv", "Print the cross-validation table");
  cv->add_option("--data", cv_args.data, "Training CSV")
      ->required()
      ->check(CLI::ExistingFile);
  cv->add_option("--variant", cv_args.variant, "crda1|crda2")
      ->check(CLI::IsMember({"crda1", "crda2"}));
  cv->add_option("--folds", cv_args.folds, "CV folds");
  cv->add_option("--seed", cv_args.seed, "Random seed");
  cv->add_option("--grid-size", cv_args.grid_size, "Sparsity grid size");
  cv->add_option("--selectors", cv_args.selectors,
                 "Candidate selectors (comma separated)")
      ->delimiter(',');
  cv->add_option("--alpha", cv_args.alpha, "Force the shrinkage parameter");
  cv->add_flag("--ell1-raw", cv_args.ell1_raw,
               "Ell1 spatial statistics from raw observations");
  cv->add_option("--priors", cv_args.priors, "uniform|empirical")
      ->check(CLI::IsMember({"uniform", "empirical"}));

  PredictArgs predict_args;
  CLI::App* predict_cmd = app.add_subcommand("predict", "Score observations");
  predict_cmd->add_option("--model", predict_args.model, "Model file")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--data", predict_args.data, "Input CSV")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", predict_args.out, "Predictions CSV")->required();
  predict_cmd->add_flag("--no-labels", predict_args.no_labels,
                        "Input file has no label column");

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a model on labeled data");
  eval_cmd->add_option("--model", eval_args.model, "Model file")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", eval_args.data, "Labeled CSV")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--mask", eval_args.mask, "Ground-truth DE mask CSV")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", eval_args.out, "Metrics CSV (default stdout)");
  eval_cmd->add_option("--split-index", eval_args.split_index, "Split index column");

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "Generate a partially synthetic set");
  synth->add_option("--p", synth_args.p, "Feature count")->required();
  synth->add_option("--p1", synth_args.p1, "DE feature count")->required();
  synth->add_option("--G", synth_args.num_classes, "Class count")->required();
  synth->add_option("--sizes", synth_args.sizes, "Per-class training sizes")
      ->required()
      ->delimiter(',');
  synth->add_option("--test-sizes", synth_args.test_sizes,
                    "Per-class test sizes (default: same as --sizes)")
      ->delimiter(',');
  synth->add_option("--shift", synth_args.shift, "DE mean shift magnitude");
  synth->add_option("--noise-var", synth_args.noise_var, "Non-DE feature variance");
  synth->add_option("--de-var", synth_args.de_var, "DE within-class variance");
  synth->add_option("--seed", synth_args.seed, "Random seed");
  synth->add_option("--out", synth_args.out, "Output path prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (train->parsed()) return run_train(train_args);
    if (cv->parsed()) return run_cv(cv_args);
    if (predict_cmd->parsed()) return run_predict(predict_args);
    if (eval_cmd->parsed()) return run_eval(eval_args);
    if (synth->parsed()) return run_synth(synth_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace crda
