#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <string>

#include "npdmd/dataset.h"
#include "npdmd/error.h"
#include "oracles.h"

namespace fs = std::filesystem;

namespace npdmd {
namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("npdmd_ds_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path file(const std::string& name, const std::string& body) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << body;
    return p;
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(DatasetTest, RejectsNonFiniteAndBadLabels) {
  Matrix x(2, 1);
  x << 1, std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(code_of([&] { Dataset(x, Vector::Ones(2)); }), ErrorCode::kNonFiniteValue);
  Vector y(2);
  y << 1, 0;
  EXPECT_EQ(code_of([&] { Dataset(Matrix::Zero(2, 1), y); }), ErrorCode::kBadLabel);
  EXPECT_EQ(code_of([&] { Dataset(Matrix::Zero(2, 1), Vector::Ones(3)); }),
            ErrorCode::kDimensionMismatch);
}

TEST(DatasetTest, RequireBothClasses) {
  Dataset ds(Matrix::Zero(3, 2), Vector::Ones(3));
  EXPECT_FALSE(ds.has_both_classes());
  EXPECT_EQ(code_of([&] { ds.require_both_classes(); }), ErrorCode::kSingleClass);
}

TEST(LoadTableTest, ParsesSmallCsv) {
  TempDir tmp;
  const auto p = tmp.file("a.csv", "1,2,+1\n3,4,-1\n5,6,+1\n");
  const Dataset ds = load_table(p, TableFormat::kCsv);
  EXPECT_EQ(ds.size(), 3);
  EXPECT_EQ(ds.dim(), 2);
  EXPECT_DOUBLE_EQ(ds.features()(2, 1), 6.0);
  EXPECT_EQ(ds.labels()[0], 1.0);
  EXPECT_EQ(ds.labels()[1], -1.0);
  EXPECT_EQ(ds.labels()[2], 1.0);
}

TEST(LoadTableTest, HeaderAndNamedLabelColumn) {
  TempDir tmp;
  const auto p = tmp.file("h.csv", "class,g1,g2\ntumor,0.5,1\nnormal,2,3\n");
  const Dataset ds = load_table(p, TableFormat::kCsv, "class");
  EXPECT_EQ(ds.dim(), 2);
  ASSERT_EQ(ds.feature_names().size(), 2u);
  EXPECT_EQ(ds.feature_names()[0], "g1");
  // lexical order: "normal" < "tumor"
  EXPECT_EQ(ds.labels()[0], 1.0);
  EXPECT_EQ(ds.labels()[1], -1.0);
  EXPECT_NE(ds.source().find("normal"), std::string::npos);
}

TEST(LoadTableTest, FirstColumnAndNumericLabels) {
  TempDir tmp;
  const auto p = tmp.file("f.csv", "2,1,1\n10,0,0\n");
  const Dataset ds = load_table(p, TableFormat::kCsv, "first");
  // 10 > 2 numerically even though "10" < "2" lexically
  EXPECT_EQ(ds.labels()[0], -1.0);
  EXPECT_EQ(ds.labels()[1], 1.0);
}

TEST(LoadTableTest, SingleClassIsBadLabel) {
  TempDir tmp;
  const auto p = tmp.file("s.csv", "1,2,+1\n3,4,+1\n");
  EXPECT_EQ(code_of([&] { load_table(p, TableFormat::kCsv); }), ErrorCode::kBadLabel);
}

TEST(LoadTableTest, ThreeClassesIsBadLabel) {
  TempDir tmp;
  const auto p = tmp.file("t.csv", "1,a\n2,b\n3,c\n");
  EXPECT_EQ(code_of([&] { load_table(p, TableFormat::kCsv); }), ErrorCode::kBadLabel);
}

TEST(LoadTableTest, RaggedRowIsMalformed) {
  TempDir tmp;
  const auto p = tmp.file("r.csv", "1,2,+1\n3,-1\n");
  EXPECT_EQ(code_of([&] { load_table(p, TableFormat::kCsv); }), ErrorCode::kMalformedRow);
}

TEST(LoadTableTest, NonFiniteValue) {
  TempDir tmp;
  const auto p = tmp.file("n.csv", "1,inf,+1\n3,4,-1\n");
  EXPECT_EQ(code_of([&] { load_table(p, TableFormat::kCsv); }), ErrorCode::kNonFiniteValue);
}

TEST(LoadTableTest, MissingFileIsIo) {
  EXPECT_EQ(code_of([&] { load_table("/nonexistent/x.csv", TableFormat::kCsv); }),
            ErrorCode::kIo);
}

TEST(LoadTableTest, Libsvm) {
  TempDir tmp;
  const auto p = tmp.file("l.svm", "+1 1:0.5 3:2\n-1 2:1.5\n");
  const Dataset ds = load_table(p, TableFormat::kLibsvm);
  ASSERT_EQ(ds.size(), 2);
  ASSERT_EQ(ds.dim(), 3);
  EXPECT_DOUBLE_EQ(ds.features()(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(ds.features()(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(ds.features()(0, 2), 2.0);
  EXPECT_DOUBLE_EQ(ds.features()(1, 1), 1.5);
  EXPECT_EQ(ds.labels()[0], 1.0);
  EXPECT_EQ(ds.labels()[1], -1.0);
}

TEST(LoadTableTest, RoundTripIsBitExact) {
  TempDir tmp;
  const Dataset ds = oracle::random_dataset(3, 5, 4, 7);
  const fs::path p = tmp.path() / "rt.csv";
  write_table(ds, p);
  const Dataset back = load_table(p, TableFormat::kCsv);
  ASSERT_EQ(back.size(), ds.size());
  EXPECT_TRUE((back.features().array() == ds.features().array()).all());
  EXPECT_TRUE((back.labels().array() == ds.labels().array()).all());
}

TEST(OneVsRestTest, SelectsPositiveClass) {
  TempDir tmp;
  const auto p = tmp.file("m.csv", "1,a\n2,b\n3,c\n4,b\n");
  const RawTable raw = load_raw_table(p, TableFormat::kCsv);
  EXPECT_EQ(distinct_labels(raw), (std::vector<std::string>{"a", "b", "c"}));
  const Dataset ds = one_vs_rest(raw, "b");
  EXPECT_EQ(ds.count(+1), 2);
  EXPECT_EQ(ds.count(-1), 2);
  EXPECT_EQ(ds.labels()[1], 1.0);
  EXPECT_EQ(ds.labels()[3], 1.0);
}

TEST(CenterTest, HandExample) {
  Matrix x(2, 1);
  x << 1, 3;
  Vector y(2);
  y << 1, -1;
  const auto [c, mean] = center(Dataset(x, y));
  EXPECT_DOUBLE_EQ(c.features()(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(c.features()(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(mean[0], 2.0);
}

TEST(CenterTest, SingleSample) {
  Matrix x(1, 2);
  x << 5, 7;
  const auto [c, mean] = center(Dataset(x, Vector::Ones(1)));
  EXPECT_EQ(c.features().norm(), 0.0);
  EXPECT_DOUBLE_EQ(mean[0], 5.0);
  EXPECT_DOUBLE_EQ(mean[1], 7.0);
}

TEST(CenterTest, ZeroColumnMeansAndIdempotent) {
  const Dataset ds = oracle::random_dataset(11, 9, 6, 13, 3.0);
  const auto [once, mean] = center(ds);
  EXPECT_LT(once.features().colwise().mean().cwiseAbs().maxCoeff(), 1e-12);
  const auto [twice, mean2] = center(once);
  EXPECT_LT((twice.features() - once.features()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(mean2.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CenterTest, CenterWithUsesGivenMean) {
  const Dataset ds = oracle::random_dataset(2, 3, 3, 4);
  const Vector mean = Vector::Constant(4, 0.25);
  const Dataset c = center_with(ds, mean);
  EXPECT_LT((c.features().row(0).transpose() - (ds.features().row(0).transpose() - mean))
                .norm(),
            1e-15);
  EXPECT_EQ(code_of([&] { center_with(ds, Vector::Zero(3)); }), ErrorCode::kDimensionMismatch);
}

void check_partition(const SplitPlan& plan, Index n) {
  std::set<Index> seen;
  for (int f = 0; f < plan.k; ++f) {
    const auto test = plan.test_indices(f);
    EXPECT_FALSE(test.empty()) << "fold " << f;
    const auto train = plan.train_indices(f);
    EXPECT_EQ(static_cast<Index>(test.size() + train.size()), n);
    for (Index i : test) EXPECT_TRUE(seen.insert(i).second) << "index " << i << " repeated";
  }
  EXPECT_EQ(static_cast<Index>(seen.size()), n);
}

TEST(SplitTest, BalancedStratified) {
  const Dataset ds = oracle::random_dataset(1, 5, 5, 2);
  const SplitPlan plan = make_splits(ds, 5, true, 42);
  check_partition(plan, 10);
  for (int f = 0; f < 5; ++f) {
    int plus = 0;
    int minus = 0;
    for (Index i : plan.test_indices(f)) (ds.labels()[i] > 0 ? plus : minus)++;
    EXPECT_EQ(plus, 1);
    EXPECT_EQ(minus, 1);
  }
}

TEST(SplitTest, Deterministic) {
  const Dataset ds = oracle::random_dataset(1, 17, 12, 2);
  const SplitPlan a = make_splits(ds, 4, true, 9);
  const SplitPlan b = make_splits(ds, 4, true, 9);
  EXPECT_EQ(a.fold_assignments, b.fold_assignments);
  const SplitPlan c = make_splits(ds, 4, true, 10);
  EXPECT_NE(a.fold_assignments, c.fold_assignments);
}

TEST(SplitTest, AlonShapedRatios) {
  const Dataset ds = oracle::random_dataset(4, 40, 22, 3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SplitPlan plan = make_splits(ds, 5, true, seed);
    check_partition(plan, 62);
    for (int f = 0; f < 5; ++f) {
      const auto test = plan.test_indices(f);
      double plus = 0;
      double minus = 0;
      for (Index i : test) (ds.labels()[i] > 0 ? plus : minus) += 1;
      const double size = static_cast<double>(test.size());
      EXPECT_LE(std::abs(plus - size * 40.0 / 62.0), 1.0);
      EXPECT_LE(std::abs(minus - size * 22.0 / 62.0), 1.0);
    }
  }
}

TEST(SplitTest, UnstratifiedPartition) {
  const Dataset ds = oracle::random_dataset(1, 7, 4, 2);
  const SplitPlan plan = make_splits(ds, 3, false, 1);
  check_partition(plan, 11);
}

TEST(SplitTest, Errors) {
  const Dataset ds = oracle::random_dataset(1, 2, 6, 2);
  EXPECT_EQ(code_of([&] { make_splits(ds, 1, true, 0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { make_splits(ds, 3, true, 0); }), ErrorCode::kTooFewSamples);
  EXPECT_EQ(code_of([&] { make_splits(ds, 9, false, 0); }), ErrorCode::kTooFewSamples);
}

}  // namespace
}  // namespace npdmd
