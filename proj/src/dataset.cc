#include "npdmd/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "npdmd/error.h"

namespace npdmd {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

std::string where(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

double checked_value(std::string_view field, const std::filesystem::path& path,
                     std::size_t line_no) {
  const auto value = parse_number(field);
  if (!value) {
    throw Error(ErrorCode::kMalformedRow,
                where(path, line_no) + ": not a number '" + std::string(field) + "'");
  }
  if (!std::isfinite(*value)) {
    throw Error(ErrorCode::kNonFiniteValue,
                where(path, line_no) + ": '" + std::string(field) + "'");
  }
  return *value;
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows, Index d) {
  Matrix m(static_cast<Index>(rows.size()), d);
  for (Index i = 0; i < m.rows(); ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (Index j = 0; j < d; ++j) {
      m(i, j) = j < static_cast<Index>(row.size()) ? row[static_cast<std::size_t>(j)] : 0.0;
    }
  }
  return m;
}

RawTable load_csv(const std::filesystem::path& path, std::ifstream& in,
                  const std::string& label_column) {
  RawTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> width;
  std::size_t label_idx = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);

    if (!width) {
      width = fields.size();
      if (*width < 2) {
        throw Error(ErrorCode::kMalformedRow,
                    where(path, line_no) + ": need a label and at least one feature");
      }
      bool by_name = false;
      if (label_column == "last") {
        label_idx = *width - 1;
      } else if (label_column == "first") {
        label_idx = 0;
      } else if (auto idx = parse_number(label_column);
                 idx && *idx >= 0 && std::floor(*idx) == *idx) {
        label_idx = static_cast<std::size_t>(*idx);
      } else {
        by_name = true;
        const auto it = std::find(fields.begin(), fields.end(), label_column);
        if (it == fields.end()) {
          throw Error(ErrorCode::kBadLabel,
                      "label column '" + label_column + "' not in header of " + path.string());
        }
        label_idx = static_cast<std::size_t>(it - fields.begin());
      }
      if (label_idx >= *width) {
        throw Error(ErrorCode::kBadLabel, "label column index out of range in " + path.string());
      }
      bool header = by_name;
      for (std::size_t j = 0; j < fields.size() && !header; ++j) {
        if (j != label_idx && !parse_number(fields[j])) header = true;
      }
      if (header) {
        for (std::size_t j = 0; j < fields.size(); ++j) {
          if (j != label_idx) table.feature_names.emplace_back(fields[j]);
        }
        continue;
      }
    }

    if (fields.size() != *width) {
      throw Error(ErrorCode::kMalformedRow,
                  where(path, line_no) + ": expected " + std::to_string(*width) +
                      " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(*width - 1);
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (j == label_idx) continue;
      row.push_back(checked_value(fields[j], path, line_no));
    }
    if (fields[label_idx].empty()) {
      throw Error(ErrorCode::kBadLabel, where(path, line_no) + ": empty label");
    }
    table.labels.emplace_back(fields[label_idx]);
    rows.push_back(std::move(row));
  }
  if (!width) throw Error(ErrorCode::kMalformedRow, path.string() + ": empty file");
  table.features = to_matrix(rows, static_cast<Index>(*width - 1));
  return table;
}

RawTable load_libsvm(const std::filesystem::path& path, std::ifstream& in) {
  RawTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  Index d = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream tokens{std::string(body)};
    std::string token;
    tokens >> token;
    table.labels.push_back(token);
    std::vector<double> row;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) {
        throw Error(ErrorCode::kMalformedRow,
                    where(path, line_no) + ": expected idx:val, got '" + token + "'");
      }
      const auto idx = parse_number(std::string_view(token).substr(0, colon));
      if (!idx || *idx < 1 || std::floor(*idx) != *idx) {
        throw Error(ErrorCode::kMalformedRow,
                    where(path, line_no) + ": bad feature index in '" + token + "'");
      }
      const auto col = static_cast<std::size_t>(*idx) - 1;
      if (col >= row.size()) row.resize(col + 1, 0.0);
      row[col] = checked_value(std::string_view(token).substr(colon + 1), path, line_no);
    }
    d = std::max(d, static_cast<Index>(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::kMalformedRow, path.string() + ": empty file");
  if (d == 0) throw Error(ErrorCode::kMalformedRow, path.string() + ": no features");
  table.features = to_matrix(rows, d);
  return table;
}

// Numeric order when every label parses as a number, lexical otherwise.
bool label_less(const std::string& a, const std::string& b, bool numeric) {
  if (numeric) return *parse_number(a) < *parse_number(b);
  return a < b;
}

}  // namespace

Dataset::Dataset(Matrix features, Vector labels,
                 std::vector<std::string> feature_names, std::string source)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)),
      source_(std::move(source)) {
  if (features_.rows() < 1 || features_.cols() < 1) {
    throw Error(ErrorCode::kTooFewSamples, "dataset needs at least one row and one column");
  }
  if (labels_.size() != features_.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "label count differs from row count");
  }
  for (Index i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 1.0 && labels_[i] != -1.0) {
      throw Error(ErrorCode::kBadLabel, "labels must be +1 or -1");
    }
  }
  if (!features_.allFinite()) {
    throw Error(ErrorCode::kNonFiniteValue, "features contain NaN or infinity");
  }
  if (!feature_names_.empty() &&
      static_cast<Index>(feature_names_.size()) != features_.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature name count differs from column count");
  }
}

Index Dataset::count(int label) const {
  return (labels_.array() == static_cast<double>(label)).count();
}

void Dataset::require_both_classes() const {
  if (!has_both_classes()) {
    throw Error(ErrorCode::kSingleClass, "both +1 and -1 samples are required");
  }
}

Dataset Dataset::subset(std::span<const Index> rows) const {
  Matrix x(static_cast<Index>(rows.size()), dim());
  Vector y(static_cast<Index>(rows.size()));
  for (Index r = 0; r < x.rows(); ++r) {
    x.row(r) = features_.row(rows[static_cast<std::size_t>(r)]);
    y[r] = labels_[rows[static_cast<std::size_t>(r)]];
  }
  return Dataset(std::move(x), std::move(y), feature_names_, source_);
}

Dataset Dataset::with_features(Matrix features) const {
  return Dataset(std::move(features), labels_, feature_names_, source_);
}

RawTable load_raw_table(const std::filesystem::path& path, TableFormat format,
                        const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  RawTable table = format == TableFormat::kCsv ? load_csv(path, in, label_column)
                                               : load_libsvm(path, in);
  table.source = path.string();
  return table;
}

std::vector<std::string> distinct_labels(const RawTable& table) {
  std::set<std::string> unique(table.labels.begin(), table.labels.end());
  std::vector<std::string> out(unique.begin(), unique.end());
  const bool numeric = std::all_of(out.begin(), out.end(),
                                   [](const std::string& s) { return parse_number(s).has_value(); });
  std::sort(out.begin(), out.end(), [numeric](const std::string& a, const std::string& b) {
    return label_less(a, b, numeric);
  });
  return out;
}

Dataset to_binary(const RawTable& table) {
  const auto classes = distinct_labels(table);
  if (classes.size() == 1) {
    throw Error(ErrorCode::kBadLabel,
                table.source + ": single class '" + classes[0] + "'; two label values required");
  }
  if (classes.size() != 2) {
    throw Error(ErrorCode::kBadLabel, table.source + ": expected exactly two label values, found " +
                                          std::to_string(classes.size()));
  }
  Vector y(static_cast<Index>(table.labels.size()));
  for (Index i = 0; i < y.size(); ++i) {
    y[i] = table.labels[static_cast<std::size_t>(i)] == classes[1] ? 1.0 : -1.0;
  }
  return Dataset(table.features, std::move(y), table.feature_names,
                 table.source + " [labels: " + classes[0] + "->-1, " + classes[1] + "->+1]");
}

Dataset one_vs_rest(const RawTable& table, const std::string& positive_label) {
  Vector y(static_cast<Index>(table.labels.size()));
  for (Index i = 0; i < y.size(); ++i) {
    y[i] = table.labels[static_cast<std::size_t>(i)] == positive_label ? 1.0 : -1.0;
  }
  return Dataset(table.features, std::move(y), table.feature_names,
                 table.source + " [one-vs-rest: " + positive_label + "->+1]");
}

Dataset load_table(const std::filesystem::path& path, TableFormat format,
                   const std::string& label_column) {
  return to_binary(load_raw_table(path, format, label_column));
}

void write_table(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (Index j = 0; j < ds.dim(); ++j) {
    if (ds.feature_names().empty()) {
      out << "x" << j + 1;
    } else {
      out << ds.feature_names()[static_cast<std::size_t>(j)];
    }
    out << ',';
  }
  out << "label\n";
  out << std::setprecision(17);
  for (Index i = 0; i < ds.size(); ++i) {
    for (Index j = 0; j < ds.dim(); ++j) out << ds.features()(i, j) << ',';
    out << (ds.labels()[i] > 0 ? "+1" : "-1") << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

TableFormat parse_format(const std::string& name) {
  if (name == "csv") return TableFormat::kCsv;
  if (name == "libsvm") return TableFormat::kLibsvm;
  throw Error(ErrorCode::kInvalidArgument, "unknown table format '" + name + "'");
}

std::pair<Dataset, Vector> center(const Dataset& ds) {
  Vector mean = ds.features().colwise().mean().transpose();
  return {center_with(ds, mean), std::move(mean)};
}

Dataset center_with(const Dataset& ds, const Vector& mean) {
  if (mean.size() != ds.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "centering mean has wrong length");
  }
  Matrix x = ds.features().rowwise() - mean.transpose();
  return ds.with_features(std::move(x));
}

std::vector<Index> SplitPlan::test_indices(int fold) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < fold_assignments.size(); ++i) {
    if (fold_assignments[i] == fold) out.push_back(static_cast<Index>(i));
  }
  return out;
}

std::vector<Index> SplitPlan::train_indices(int fold) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < fold_assignments.size(); ++i) {
    if (fold_assignments[i] != fold) out.push_back(static_cast<Index>(i));
  }
  return out;
}

SplitPlan make_splits(const Dataset& ds, int k, bool stratified, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "fold count must be at least 2");
  SplitPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.stratified = stratified;
  plan.fold_assignments.assign(static_cast<std::size_t>(ds.size()), -1);

  std::mt19937_64 rng(seed);
  std::vector<std::vector<Index>> groups;
  if (stratified) {
    for (int label : {+1, -1}) {
      std::vector<Index> members;
      for (Index i = 0; i < ds.size(); ++i) {
        if (ds.labels()[i] == label) members.push_back(i);
      }
      if (static_cast<Index>(members.size()) < k) {
        throw Error(ErrorCode::kTooFewSamples,
                    "class " + std::to_string(label) + " has fewer samples than folds");
      }
      groups.push_back(std::move(members));
    }
  } else {
    if (ds.size() < k) throw Error(ErrorCode::kTooFewSamples, "fewer samples than folds");
    std::vector<Index> all(static_cast<std::size_t>(ds.size()));
    for (Index i = 0; i < ds.size(); ++i) all[static_cast<std::size_t>(i)] = i;
    groups.push_back(std::move(all));
  }

  // Round-robin dealing continues across groups so fold sizes stay within
  // one of each other overall, not just per class.
  int next = 0;
  for (auto& group : groups) {
    std::shuffle(group.begin(), group.end(), rng);
    for (Index idx : group) {
      plan.fold_assignments[static_cast<std::size_t>(idx)] = next;
      next = (next + 1) % k;
    }
  }
  return plan;
}

}  // namespace npdmd
