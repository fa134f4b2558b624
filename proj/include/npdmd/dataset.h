#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace npdmd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Labeled samples: one row per sample, labels in {+1, -1}.
///
/// Construction validates shape, label values and finiteness; the object is
/// immutable afterwards and may be shared read-only between threads.
class Dataset {
 public:
  Dataset(Matrix features, Vector labels,
          std::vector<std::string> feature_names = {}, std::string source = {});

  const Matrix& features() const { return features_; }
  const Vector& labels() const { return labels_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::string& source() const { return source_; }

  Index size() const { return features_.rows(); }
  Index dim() const { return features_.cols(); }
  Index count(int label) const;
  bool has_both_classes() const { return count(+1) > 0 && count(-1) > 0; }

  // Throws SingleClass unless both labels occur.
  void require_both_classes() const;

  Dataset subset(std::span<const Index> rows) const;
  Dataset with_features(Matrix features) const;

 private:
  Matrix features_;
  Vector labels_;
  std::vector<std::string> feature_names_;
  std::string source_;
};

enum class TableFormat { kCsv, kLibsvm };

/// Rows of a table with labels kept as raw strings. Used for one-vs-rest
/// driving of multi-class files before labels are reduced to +/-1.
struct RawTable {
  Matrix features;
  std::vector<std::string> labels;
  std::vector<std::string> feature_names;
  std::string source;
};

// label_column: "last" (default), "first", a 0-based column index, or a
// header name. Ignored for the libsvm format, where the label leads each line.
RawTable load_raw_table(const std::filesystem::path& path, TableFormat format,
                        const std::string& label_column = "last");

/// Loads a two-class table. The smaller raw label maps to -1 and the larger
/// to +1 (numeric order when both parse as numbers, lexical otherwise); the
/// mapping is appended to the dataset source string.
Dataset load_table(const std::filesystem::path& path, TableFormat format,
                   const std::string& label_column = "last");

Dataset to_binary(const RawTable& table);
Dataset one_vs_rest(const RawTable& table, const std::string& positive_label);
std::vector<std::string> distinct_labels(const RawTable& table);

// CSV with a header row, label in the last column, 17 significant digits.
void write_table(const Dataset& ds, const std::filesystem::path& path);

TableFormat parse_format(const std::string& name);

/// Subtracts the pooled column mean. Returns the centered dataset and the
/// mean, which is reused to center held-out data.
std::pair<Dataset, Vector> center(const Dataset& ds);
Dataset center_with(const Dataset& ds, const Vector& mean);

struct SplitPlan {
  std::vector<int> fold_assignments;
  int k = 0;
  std::uint64_t seed = 0;
  bool stratified = false;

  std::vector<Index> test_indices(int fold) const;
  std::vector<Index> train_indices(int fold) const;
};

SplitPlan make_splits(const Dataset& ds, int k, bool stratified,
                      std::uint64_t seed);

}  // namespace npdmd
