#include "crda/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crda {

namespace {

constexpr int kModelFormatVersion = 1;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

double parse_double(const std::string& text, const std::string& where) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw std::runtime_error("non-numeric value '" + text + "' " + where);
  return value;
}

long parse_int(const std::string& text, const std::string& where) {
  long value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::runtime_error("non-integer value '" + text + "' " + where);
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

LoadedDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty dataset file " + path.string());
  const std::vector<std::string> header = split_csv(strip_cr(line));
  if (header.size() < 2)
    throw std::runtime_error("dataset needs a label column and features");
  const std::size_t columns = header.size();
  const std::size_t p = columns - 1;

  LoadedDataset out;
  out.data.feature_names.assign(header.begin() + 1, header.end());

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != columns)
      throw std::runtime_error("ragged row at line " + std::to_string(line_number) +
                               " of " + path.string());
    const std::string& label = fields[0];
    auto found = std::find(out.label_names.begin(), out.label_names.end(), label);
    if (found == out.label_names.end()) {
      out.label_names.push_back(label);
      found = std::prev(out.label_names.end());
    }
    labels.push_back(static_cast<int>(found - out.label_names.begin()) + 1);
    std::vector<double> values(p);
    for (std::size_t j = 0; j < p; ++j)
      values[j] = parse_double(fields[j + 1],
                               "at line " + std::to_string(line_number));
    rows.push_back(std::move(values));
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  out.data.features.resize(static_cast<Eigen::Index>(p), n);
  out.data.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.data.labels[i] = labels[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < p; ++j)
      out.data.features(static_cast<Eigen::Index>(j), i) =
          rows[static_cast<std::size_t>(i)][j];
  }
  validate(out.data);
  return out;
}

Eigen::MatrixXd load_unlabeled_features(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty dataset file " + path.string());
  const std::size_t p = split_csv(strip_cr(line)).size();

  std::vector<std::vector<double>> rows;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != p)
      throw std::runtime_error("ragged row at line " + std::to_string(line_number) +
                               " of " + path.string());
    std::vector<double> values(p);
    for (std::size_t j = 0; j < p; ++j)
      values[j] = parse_double(fields[j], "at line " + std::to_string(line_number));
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw std::runtime_error("no observations in " + path.string());

  Eigen::MatrixXd features(static_cast<Eigen::Index>(p),
                           static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < p; ++j)
      features(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rows[i][j];
  return features;
}

void save_dataset(const LabeledDataset& data,
                  const std::vector<std::string>& label_names,
                  const std::filesystem::path& path) {
  validate(data);
  std::ofstream out = open_output(path);
  out << "label";
  for (Eigen::Index i = 0; i < data.dim(); ++i) {
    if (!data.feature_names.empty())
      out << ',' << data.feature_names[static_cast<std::size_t>(i)];
    else
      out << ",f" << (i + 1);
  }
  out << '\n';
  for (Eigen::Index j = 0; j < data.size(); ++j) {
    const int label = data.labels[j];
    if (!label_names.empty())
      out << label_names.at(static_cast<std::size_t>(label - 1));
    else
      out << label;
    for (Eigen::Index i = 0; i < data.dim(); ++i)
      out << ',' << format_double(data.features(i, j));
    out << '\n';
  }
}

void save_mask(const std::vector<bool>& mask, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << "de\n";
  for (bool flag : mask) out << (flag ? '1' : '0') << '\n';
}

std::vector<bool> load_mask(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty mask file " + path.string());
  std::vector<bool> mask;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    line = strip_cr(line);
    if (line.empty()) continue;
    if (line == "1")
      mask.push_back(true);
    else if (line == "0")
      mask.push_back(false);
    else
      throw std::runtime_error("mask entries must be 0 or 1 (line " +
                               std::to_string(line_number) + ")");
  }
  return mask;
}

void save_model(const CrdaModel& model, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  const Eigen::Index p = model.dim();
  const Eigen::Index num_classes = model.num_classes();

  out << "crda-model\n";
  out << "format_version " << kModelFormatVersion << '\n';
  out << "variant " << to_string(model.variant) << '\n';
  out << "p " << p << '\n';
  out << "num_classes " << num_classes << '\n';
  out << "label_names\n";
  for (Eigen::Index g = 0; g < num_classes; ++g) {
    if (!model.label_names.empty())
      out << model.label_names.at(static_cast<std::size_t>(g)) << '\n';
    else
      out << (g + 1) << '\n';
  }
  out << "selector " << to_string(model.selector) << '\n';
  out << "sparsity " << model.sparsity << '\n';
  out << "soft_delta " << format_double(model.soft_delta) << '\n';
  out << "alpha " << format_double(model.diagnostics.alpha) << '\n';
  out << "gamma " << format_double(model.diagnostics.gamma) << '\n';
  out << "kappa " << format_double(model.diagnostics.kappa) << '\n';
  out << "eta " << format_double(model.diagnostics.eta) << '\n';
  out << "eta_penalty " << format_double(model.diagnostics.eta_penalty) << '\n';
  out << "log_priors";
  for (Eigen::Index g = 0; g < num_classes; ++g)
    out << ' ' << format_double(model.log_priors[g]);
  out << '\n';
  out << "means\n";
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index g = 0; g < num_classes; ++g)
      out << (g == 0 ? "" : " ") << format_double(model.means(i, g));
    out << '\n';
  }
  out << "coefficients " << model.selected_rows.size() << '\n';
  for (Eigen::Index row : model.selected_rows) {
    out << row;
    for (Eigen::Index g = 0; g < num_classes; ++g)
      out << ' ' << format_double(model.coefficients(row, g));
    out << '\n';
  }
  out << "end\n";
}

namespace {

class LineReader {
 public:
  LineReader(std::ifstream& in, std::string name)
      : in_(in), name_(std::move(name)) {}

  std::string next() {
    std::string line;
    if (!std::getline(in_, line))
      throw std::runtime_error("truncated model file " + name_);
    return strip_cr(line);
  }

  // "key value..." line; returns the payload after the key.
  std::string expect(const std::string& key) {
    const std::string line = next();
    if (line == key) return {};
    if (line.rfind(key + ' ', 0) != 0)
      throw std::runtime_error("malformed model file " + name_ + ": expected '" +
                               key + "', got '" + line + "'");
    return line.substr(key.size() + 1);
  }

 private:
  std::ifstream& in_;
  std::string name_;
};

std::vector<std::string> split_space(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream stream(line);
  std::string token;
  while (stream >> token) fields.push_back(token);
  return fields;
}

}  // namespace

CrdaModel load_model(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  LineReader reader(in, path.string());

  if (reader.next() != "crda-model")
    throw std::runtime_error("not a crda model file: " + path.string());
  const long version = parse_int(reader.expect("format_version"), "in format_version");
  if (version != kModelFormatVersion)
    throw std::runtime_error("unsupported model format version " +
                             std::to_string(version));

  CrdaModel model;
  model.variant = variant_from_string(reader.expect("variant"));
  const long p = parse_int(reader.expect("p"), "in p");
  const long num_classes = parse_int(reader.expect("num_classes"), "in num_classes");
  if (p < 1 || num_classes < 1)
    throw std::runtime_error("malformed model dimensions");
  reader.expect("label_names");
  for (long g = 0; g < num_classes; ++g) model.label_names.push_back(reader.next());
  model.selector = selector_from_string(reader.expect("selector"));
  model.sparsity = parse_int(reader.expect("sparsity"), "in sparsity");
  model.soft_delta = parse_double(reader.expect("soft_delta"), "in soft_delta");
  model.diagnostics.alpha = parse_double(reader.expect("alpha"), "in alpha");
  model.diagnostics.gamma = parse_double(reader.expect("gamma"), "in gamma");
  model.diagnostics.kappa = parse_double(reader.expect("kappa"), "in kappa");
  model.diagnostics.eta = parse_double(reader.expect("eta"), "in eta");
  model.diagnostics.eta_penalty =
      parse_double(reader.expect("eta_penalty"), "in eta_penalty");

  const std::vector<std::string> priors = split_space(reader.expect("log_priors"));
  if (static_cast<long>(priors.size()) != num_classes)
    throw std::runtime_error("malformed log priors");
  model.log_priors.resize(num_classes);
  for (long g = 0; g < num_classes; ++g)
    model.log_priors[g] = parse_double(priors[static_cast<std::size_t>(g)],
                                       "in log_priors");

  reader.expect("means");
  model.means.resize(p, num_classes);
  for (long i = 0; i < p; ++i) {
    const std::vector<std::string> fields = split_space(reader.next());
    if (static_cast<long>(fields.size()) != num_classes)
      throw std::runtime_error("malformed means row " + std::to_string(i));
    for (long g = 0; g < num_classes; ++g)
      model.means(i, g) =
          parse_double(fields[static_cast<std::size_t>(g)], "in means");
  }

  const long rows = parse_int(reader.expect("coefficients"), "in coefficients");
  if (rows < 0 || rows > p) throw std::runtime_error("malformed coefficient count");
  model.coefficients = Eigen::MatrixXd::Zero(p, num_classes);
  model.selected_rows.reserve(static_cast<std::size_t>(rows));
  for (long r = 0; r < rows; ++r) {
    const std::vector<std::string> fields = split_space(reader.next());
    if (static_cast<long>(fields.size()) != num_classes + 1)
      throw std::runtime_error("malformed coefficient row");
    const long row = parse_int(fields[0], "in coefficient row index");
    if (row < 0 || row >= p)
      throw std::runtime_error("coefficient row index out of range");
    for (long g = 0; g < num_classes; ++g)
      model.coefficients(row, g) =
          parse_double(fields[static_cast<std::size_t>(g + 1)], "in coefficients");
    model.selected_rows.push_back(row);
  }
  if (reader.next() != "end")
    throw std::runtime_error("truncated model file " + path.string());
  return model;
}

std::string metrics_csv_header() {
  return "split_index,variant,ter,fsr,fpr,fnr,act_seconds,K,selector";
}

std::string metrics_csv_row(const MetricsRecord& record, const std::string& variant,
                            Eigen::Index sparsity, const std::string& selector) {
  std::string row = std::to_string(record.split_index) + ',' + variant + ',' +
                    format_double(record.ter) + ',' + format_double(record.fsr) + ',';
  if (record.fpr) row += format_double(*record.fpr);
  row += ',';
  if (record.fnr) row += format_double(*record.fnr);
  row += ',' + format_double(record.act_seconds) + ',' + std::to_string(sparsity) +
         ',' + selector;
  return row;
}

void save_predictions(const Eigen::VectorXi& labels,
                      const std::vector<std::string>& label_names,
                      const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << "index,prediction\n";
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    out << i << ',';
    const int label = labels[i];
    if (!label_names.empty() && label >= 1 &&
        label <= static_cast<int>(label_names.size()))
      out << label_names[static_cast<std::size_t>(label - 1)];
    else
      out << label;
    out << '\n';
  }
}

}  // namespace crda
