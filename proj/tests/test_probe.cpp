#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace vast;
using vast::testing::flat_dump;

namespace {

ProbeDataset separable(std::size_t n_per_class, double gap, std::uint64_t seed) {
  auto rng = make_rng(seed);
  ProbeDataset ds;
  ds.class_names = {"a", "b", "c"};
  ds.features.resize(static_cast<Eigen::Index>(3 * n_per_class), 4);
  for (std::size_t i = 0; i < 3 * n_per_class; ++i) {
    const int y = static_cast<int>(i % 3);
    for (int j = 0; j < 4; ++j) ds.features(static_cast<Eigen::Index>(i), j) = 0.3 * standard_normal(rng);
    ds.features(static_cast<Eigen::Index>(i), y) += gap;
    ds.labels.push_back(y);
    (i % 5 == 0 ? ds.test : ds.train).push_back(i);
  }
  return ds;
}

std::vector<int> rows_of(const std::vector<int>& labels, const std::vector<std::size_t>& idx) {
  std::vector<int> out;
  for (auto i : idx) out.push_back(labels[i]);
  return out;
}

Eigen::MatrixXd take(const Eigen::MatrixXd& x, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

}  // namespace

TEST(WeightedF1, Examples) {
  EXPECT_NEAR(weighted_f1({0, 1, 1}, {0, 0, 1}), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(weighted_f1({0, 1, 0}, {0, 0, 1}), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(weighted_f1({2, 0, 1, 1}, {2, 0, 1, 1}), 1.0);
  EXPECT_EQ(weighted_f1({1, 0}, {0, 1}), 0.0);
  EXPECT_VAST_ERROR(weighted_f1({0}, {0, 1}), Errc::LengthMismatch);
  EXPECT_VAST_ERROR(weighted_f1({}, {}), Errc::LengthMismatch);
}

TEST(LogReg, GradientMatchesFiniteDifferences) {
  auto rng = make_rng(4);
  Eigen::MatrixXd x(5, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = standard_normal(rng);
  const std::vector<int> y = {0, 1, 1, 0, 1};
  Eigen::MatrixXd w(2, 3);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = 0.5 * standard_normal(rng);
  Eigen::VectorXd b(2);
  b << 0.1, -0.2;
  const double l2 = 0.3;
  const auto g = logreg_loss_and_gradient(x, y, w, b, l2);
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    Eigen::MatrixXd wp = w, wm = w;
    wp.data()[i] += h;
    wm.data()[i] -= h;
    const double fd = (logreg_loss_and_gradient(x, y, wp, b, l2).loss - logreg_loss_and_gradient(x, y, wm, b, l2).loss) / (2 * h);
    EXPECT_NEAR(g.grad_weights.data()[i], fd, 1e-5 * std::max(1.0, std::abs(fd)));
  }
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    Eigen::VectorXd bp = b, bm = b;
    bp[i] += h;
    bm[i] -= h;
    const double fd = (logreg_loss_and_gradient(x, y, w, bp, l2).loss - logreg_loss_and_gradient(x, y, w, bm, l2).loss) / (2 * h);
    EXPECT_NEAR(g.grad_bias[i], fd, 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST(LogReg, SeparableDataIsLearned) {
  const auto ds = separable(30, 3.0, 1);
  const auto m = train_logreg(ds, {1e-4, 0.5, 500});
  EXPECT_EQ(weighted_f1(m.predict(take(ds.features, ds.test)), rows_of(ds.labels, ds.test)), 1.0);
  for (std::size_t i = 1; i < m.loss_history.size(); ++i) EXPECT_LE(m.loss_history[i], m.loss_history[i - 1] + 1e-12);
}

TEST(LogReg, HeavyPenaltyFallsBackToMajority) {
  auto ds = separable(10, 3.0, 2);
  // make class 0 the majority of the train split
  for (std::size_t i = 0; i < 20; ++i) {
    const auto r = ds.features.rows();
    ds.features.conservativeResize(r + 1, Eigen::NoChange);
    ds.features.row(r).setZero();
    ds.labels.push_back(0);
    ds.train.push_back(static_cast<std::size_t>(r));
  }
  const auto m = train_logreg(ds, {1e6, 1e-7, 50});
  for (int p : m.predict(ds.features)) EXPECT_EQ(p, 0);
}

TEST(LogReg, Preconditions) {
  auto ds = separable(5, 1.0, 3);
  auto bad = ds;
  bad.test.push_back(bad.train.front());
  EXPECT_VAST_ERROR(train_logreg(bad, {}), Errc::InvariantViolation);
  bad = ds;
  bad.labels[0] = 7;
  EXPECT_VAST_ERROR(train_logreg(bad, {}), Errc::InvalidArgument);
  bad = ds;
  bad.features(0, 0) = std::nan("");
  EXPECT_VAST_ERROR(train_logreg(bad, {}), Errc::NonFiniteValue);
  EXPECT_VAST_ERROR(train_logreg(ds, {1e-4, 1e6, 1000}), Errc::NonFiniteLoss);
}

TEST(ProbeReport, VariantsOnSeparableDump) {
  auto rng = make_rng(8);
  std::vector<std::string> words;
  std::vector<Vec> vs;
  ProbeLabels labels;
  labels.class_names = {"neg", "pos"};
  for (int i = 0; i < 60; ++i) {
    words.push_back("w" + std::to_string(i));
    Vec v(6);
    for (auto& x : v) x = 0.2 * standard_normal(rng);
    const int y = i % 2;
    v[0] += y ? 2.0 : -2.0;
    vs.push_back(v);
    labels.labels.push_back(y);
  }
  const auto dump = flat_dump(words, vs);
  ProbeConfig cfg;
  cfg.k = 1;
  cfg.params = {1e-4, 0.5, 300};
  const auto rows = probe_report(dump, labels, cfg);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].weighted_f1, 1.0);  // raw
  EXPECT_EQ(rows[1].weighted_f1, 1.0);  // top PC carries the class
  EXPECT_LT(rows[2].weighted_f1, 0.8);  // and nullifying it removes the class
  EXPECT_EQ(rows[0].n_train + rows[0].n_test, 60u);
  EXPECT_EQ(rows[0].n_test, 12u);
  EXPECT_EQ(format_probe_rows(rows, cfg, dump.content_hash()),
            format_probe_rows(probe_report(dump, labels, cfg), cfg, dump.content_hash()));

  labels.labels.pop_back();
  EXPECT_VAST_ERROR(probe_report(dump, labels, cfg), Errc::RowCountMismatch);
}

TEST(ProbeLabels, Parse) {
  std::istringstream in("row_index,label,split\n1,pos,test\n0,neg,train\n2,pos,train\n");
  const auto l = parse_probe_labels(in, 3);
  EXPECT_EQ(l.class_names, (std::vector<std::string>{"neg", "pos"}));
  EXPECT_EQ(l.labels, (std::vector<int>{0, 1, 1}));
  ASSERT_TRUE(l.is_test);
  EXPECT_EQ(*l.is_test, (std::vector<bool>{false, true, false}));

  std::istringstream short_in("row_index,label\n0,a\n");
  EXPECT_VAST_ERROR(parse_probe_labels(short_in, 2), Errc::RowCountMismatch);
  std::istringstream dup("row_index,label\n0,a\n0,b\n");
  EXPECT_VAST_ERROR(parse_probe_labels(dup, 2), Errc::RowCountMismatch);
  std::istringstream split("row_index,label,split\n0,a,dev\n");
  EXPECT_VAST_ERROR(parse_probe_labels(split, 1), Errc::MalformedRecord);
}

TEST(ProbeLabels, DefaultSplitIsDeterministicPartition) {
  const auto [train, test] = default_split(50, 9);
  EXPECT_EQ(test.size(), 10u);
  EXPECT_EQ(train.size(), 40u);
  std::vector<std::size_t> all = train;
  all.insert(all.end(), test.begin(), test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
  EXPECT_EQ(default_split(50, 9), default_split(50, 9));
  EXPECT_NE(default_split(50, 9).second, default_split(50, 10).second);
}
