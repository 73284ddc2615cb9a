#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "vast/embed_store.hpp"
#include "vast/error.hpp"
#include "vast/isolate.hpp"
#include "vast/lexicon.hpp"
#include "vast/util.hpp"

namespace vast {

struct ProbeDataset {
  Eigen::MatrixXd features;  // n x f
  std::vector<int> labels;   // in [0, class_names.size())
  std::vector<std::string> class_names;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

inline void validate(const ProbeDataset& ds) {
  const auto n = static_cast<std::size_t>(ds.features.rows());
  if (ds.labels.size() != n) throw Error(Errc::RowCountMismatch, "labels and feature rows differ in count");
  const int c = static_cast<int>(ds.class_names.size());
  for (int y : ds.labels)
    if (y < 0 || y >= c) throw Error(Errc::InvalidArgument, "label index out of range");
  std::vector<int> seen(n, 0);
  for (auto i : ds.train) {
    if (i >= n) throw Error(Errc::InvalidArgument, "train index out of range");
    ++seen[i];
  }
  for (auto i : ds.test) {
    if (i >= n) throw Error(Errc::InvalidArgument, "test index out of range");
    ++seen[i];
  }
  if (std::any_of(seen.begin(), seen.end(), [](int s) { return s != 1; })) {
    throw Error(Errc::InvariantViolation, "train and test splits must be disjoint and cover every row");
  }
  std::vector<int> in_train(static_cast<std::size_t>(c), 0);
  for (auto i : ds.train) in_train[static_cast<std::size_t>(ds.labels[i])] = 1;
  for (int k = 0; k < c; ++k) {
    if (!in_train[static_cast<std::size_t>(k)]) {
      throw Error(Errc::InvariantViolation, "class '" + ds.class_names[static_cast<std::size_t>(k)] + "' absent from train split");
    }
  }
}

struct LogRegParams {
  double l2 = 1e-4;
  double lr = 0.1;
  std::size_t iters = 2000;
};

struct LogRegModel {
  Eigen::MatrixXd weights;  // C x f
  Eigen::VectorXd bias;     // C
  Eigen::RowVectorXd column_mean;
  Eigen::RowVectorXd column_scale;
  std::vector<double> loss_history;

  Eigen::MatrixXd standardize(const Eigen::MatrixXd& x) const {
    return (x.rowwise() - column_mean).array().rowwise() / column_scale.array();
  }

  std::vector<int> predict(const Eigen::MatrixXd& x) const {
    const Eigen::MatrixXd z = (standardize(x) * weights.transpose()).rowwise() + bias.transpose();
    std::vector<int> out(static_cast<std::size_t>(z.rows()));
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      Eigen::Index arg;
      z.row(i).maxCoeff(&arg);
      out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
    }
    return out;
  }
};

struct LossAndGradient {
  double loss;
  Eigen::MatrixXd grad_weights;
  Eigen::VectorXd grad_bias;
};

/// Mean softmax cross-entropy plus (l2 / 2) * ||W||^2, and its gradient.
inline LossAndGradient logreg_loss_and_gradient(const Eigen::MatrixXd& x, const std::vector<int>& y,
                                                const Eigen::MatrixXd& w, const Eigen::VectorXd& b, double l2) {
  const auto n = x.rows();
  Eigen::MatrixXd z = (x * w.transpose()).rowwise() + b.transpose();
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = z.row(i).maxCoeff();
    z.row(i).array() -= m;
    const double lse = std::log(z.row(i).array().exp().sum());
    loss -= z(i, y[static_cast<std::size_t>(i)]) - lse;
    z.row(i) = z.row(i).array().exp() / std::exp(lse);  // probabilities
    z(i, y[static_cast<std::size_t>(i)]) -= 1.0;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  z *= inv_n;
  LossAndGradient out;
  out.loss = loss * inv_n + 0.5 * l2 * w.squaredNorm();
  out.grad_weights = z.transpose() * x + l2 * w;
  out.grad_bias = z.colwise().sum().transpose();
  return out;
}

/// Multinomial logistic regression by full-batch gradient descent from zero
/// weights on train-standardized features. Deterministic; seed is recorded only.
inline LogRegModel train_logreg(const ProbeDataset& ds, const LogRegParams& p, std::uint64_t /*seed*/ = 0) {
  validate(ds);
  if (p.iters < 1) throw Error(Errc::InvalidArgument, "iters must be >= 1");
  if (!ds.features.allFinite()) throw Error(Errc::NonFiniteValue, "probe features");

  const auto f = ds.features.cols();
  const auto c = static_cast<Eigen::Index>(ds.class_names.size());
  Eigen::MatrixXd xt(static_cast<Eigen::Index>(ds.train.size()), f);
  std::vector<int> yt;
  for (std::size_t i = 0; i < ds.train.size(); ++i) {
    xt.row(static_cast<Eigen::Index>(i)) = ds.features.row(static_cast<Eigen::Index>(ds.train[i]));
    yt.push_back(ds.labels[ds.train[i]]);
  }

  LogRegModel m;
  m.column_mean = xt.colwise().mean();
  m.column_scale = ((xt.rowwise() - m.column_mean).array().square().colwise().mean()).sqrt();
  for (Eigen::Index j = 0; j < f; ++j)
    if (!(m.column_scale(j) > 1e-12)) m.column_scale(j) = 1.0;
  const Eigen::MatrixXd xs = m.standardize(xt);

  m.weights = Eigen::MatrixXd::Zero(c, f);
  m.bias = Eigen::VectorXd::Zero(c);
  for (std::size_t it = 0; it < p.iters; ++it) {
    const auto g = logreg_loss_and_gradient(xs, yt, m.weights, m.bias, p.l2);
    if (!std::isfinite(g.loss)) throw Error(Errc::NonFiniteLoss, "loss diverged at iteration " + std::to_string(it));
    m.loss_history.push_back(g.loss);
    m.weights -= p.lr * g.grad_weights;
    m.bias -= p.lr * g.grad_bias;
  }
  return m;
}

/// Per-class F1 averaged with weights proportional to class support.
inline double weighted_f1(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) {
    throw Error(Errc::LengthMismatch, std::to_string(predictions.size()) + " predictions for " +
                                          std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) throw Error(Errc::LengthMismatch, "no labels");
  std::map<int, std::size_t> support, tp, fp;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++support[labels[i]];
    if (predictions[i] == labels[i]) {
      ++tp[labels[i]];
    } else {
      ++fp[predictions[i]];
    }
  }
  double total = 0.0;
  for (const auto& [cls, sup] : support) {
    const double t = static_cast<double>(tp[cls]);
    const double prec_den = t + static_cast<double>(fp[cls]);
    const double precision = prec_den > 0 ? t / prec_den : 0.0;
    const double recall = t / static_cast<double>(sup);
    const double f1 = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    total += f1 * static_cast<double>(sup);
  }
  return total / static_cast<double>(labels.size());
}

// ---------------------------------------------------------------------------
// Probe report over dump features

enum class ProbeVariant { Raw, TopPcs, Nullified };

inline std::string_view to_string(ProbeVariant v) {
  switch (v) {
    case ProbeVariant::Raw: return "raw";
    case ProbeVariant::TopPcs: return "top_pcs";
    case ProbeVariant::Nullified: return "nullified";
  }
  return "raw";
}

inline ProbeVariant parse_variant(std::string_view s) {
  for (auto v : {ProbeVariant::Raw, ProbeVariant::TopPcs, ProbeVariant::Nullified})
    if (to_string(v) == s) return v;
  throw Error(Errc::InvalidArgument, "unknown probe variant '" + std::string(s) + "'");
}

/// Labels sidecar: header with row_index and label columns, optional split column (train|test).
struct ProbeLabels {
  std::vector<int> labels;  // by dump row
  std::vector<std::string> class_names;
  std::optional<std::vector<bool>> is_test;
};

inline ProbeLabels parse_probe_labels(std::istream& in, std::size_t n_rows, char delimiter = ',') {
  auto table = detail::read_table(in, delimiter);
  const auto ic = detail::column_index(table, "row_index");
  const auto lc = detail::column_index(table, "label");
  std::optional<std::size_t> sc;
  if (std::find(table.header.begin(), table.header.end(), "split") != table.header.end()) {
    sc = detail::column_index(table, "split");
  }
  if (table.rows.size() != n_rows) {
    throw Error(Errc::RowCountMismatch, std::to_string(table.rows.size()) + " label rows for " +
                                            std::to_string(n_rows) + " dump words");
  }
  std::vector<std::string> raw(n_rows);
  std::vector<int> have(n_rows, 0);
  std::vector<bool> test(n_rows, false);
  for (const auto& [line, fields] : table.rows) {
    const double idx = detail::numeric_field(fields[ic], line);
    if (idx < 0 || idx >= static_cast<double>(n_rows) || idx != std::floor(idx)) {
      throw Error(Errc::RowCountMismatch, "line " + std::to_string(line) + ": row_index out of range");
    }
    const auto i = static_cast<std::size_t>(idx);
    if (have[i]++) throw Error(Errc::RowCountMismatch, "line " + std::to_string(line) + ": row_index repeated");
    raw[i] = std::string(trim(fields[lc]));
    if (sc) {
      const auto s = trim(fields[*sc]);
      if (s != "train" && s != "test") {
        throw Error(Errc::MalformedRecord, "line " + std::to_string(line) + ": split must be train or test");
      }
      test[i] = s == "test";
    }
  }
  ProbeLabels out;
  out.class_names = raw;
  std::sort(out.class_names.begin(), out.class_names.end());
  out.class_names.erase(std::unique(out.class_names.begin(), out.class_names.end()), out.class_names.end());
  for (const auto& r : raw) {
    out.labels.push_back(static_cast<int>(std::lower_bound(out.class_names.begin(), out.class_names.end(), r) -
                                          out.class_names.begin()));
  }
  if (sc) out.is_test = test;
  return out;
}

/// Deterministic 80/20 split by seeded shuffle.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> default_split(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto rng = make_rng(seed);
  shuffle(idx, rng);
  const std::size_t n_test = n < 2 ? 0 : std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.2 * n)));
  std::vector<std::size_t> test(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {train, test};
}

struct ProbeRow {
  ProbeVariant variant = ProbeVariant::Raw;
  std::size_t k = 0;
  double weighted_f1 = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

struct ProbeConfig {
  int layer = 0;
  SubwordRepr repr = SubwordRepr::Last;
  std::size_t k = 8;
  std::vector<ProbeVariant> variants = {ProbeVariant::Raw, ProbeVariant::TopPcs, ProbeVariant::Nullified};
  LogRegParams params;
  std::uint64_t seed = 0;
};

/// Trains one probe per feature variant and scores weighted F1 on the test split.
/// With no basis given, one is fit on every dump word at the layer.
inline std::vector<ProbeRow> probe_report(const EmbeddingDump& dump, const ProbeLabels& labels, const ProbeConfig& cfg,
                                          const PcBasis* basis = nullptr) {
  check_layer(dump, cfg.layer);
  if (labels.labels.size() != dump.size()) {
    throw Error(Errc::RowCountMismatch, std::to_string(labels.labels.size()) + " labels for " +
                                            std::to_string(dump.size()) + " dump words");
  }
  std::vector<Vec> raw;
  for (std::size_t i = 0; i < dump.size(); ++i) raw.push_back(pool_subtokens(dump, i, cfg.layer, cfg.repr));

  std::optional<PcBasis> fitted;
  const bool needs_basis = std::any_of(cfg.variants.begin(), cfg.variants.end(),
                                       [](auto v) { return v != ProbeVariant::Raw; });
  if (needs_basis && !basis) {
    fitted = fit_pcs(raw);
    basis = &*fitted;
  }

  ProbeDataset ds;
  ds.labels = labels.labels;
  ds.class_names = labels.class_names;
  if (labels.is_test) {
    for (std::size_t i = 0; i < labels.is_test->size(); ++i) ((*labels.is_test)[i] ? ds.test : ds.train).push_back(i);
  } else {
    std::tie(ds.train, ds.test) = default_split(dump.size(), cfg.seed);
  }

  std::vector<ProbeRow> rows;
  for (auto variant : cfg.variants) {
    std::vector<Vec> feats;
    for (const auto& v : raw) {
      switch (variant) {
        case ProbeVariant::Raw: feats.push_back(v); break;
        case ProbeVariant::TopPcs: feats.push_back(project_top(v, *basis, cfg.k)); break;
        case ProbeVariant::Nullified: feats.push_back(nullify(v, *basis, cfg.k)); break;
      }
    }
    ds.features.resize(static_cast<Eigen::Index>(feats.size()), static_cast<Eigen::Index>(feats.front().size()));
    for (std::size_t i = 0; i < feats.size(); ++i)
      for (std::size_t j = 0; j < feats[i].size(); ++j)
        ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = feats[i][j];

    const auto model = train_logreg(ds, cfg.params, cfg.seed);
    Eigen::MatrixXd xtest(static_cast<Eigen::Index>(ds.test.size()), ds.features.cols());
    std::vector<int> ytest;
    for (std::size_t i = 0; i < ds.test.size(); ++i) {
      xtest.row(static_cast<Eigen::Index>(i)) = ds.features.row(static_cast<Eigen::Index>(ds.test[i]));
      ytest.push_back(ds.labels[ds.test[i]]);
    }
    const double f1 = ds.test.empty() ? 0.0 : weighted_f1(model.predict(xtest), ytest);
    rows.push_back({variant, variant == ProbeVariant::Raw ? 0 : cfg.k, f1, ds.train.size(), ds.test.size()});
  }
  return rows;
}

inline constexpr std::string_view kProbeHeader = "variant,k,weighted_f1,n_train,n_test,layer,repr,l2,lr,iters,seed,dump_hash";

inline std::string format_probe_rows(const std::vector<ProbeRow>& rows, const ProbeConfig& cfg, std::uint64_t dump_hash) {
  std::string out = std::string(kProbeHeader) + "\n";
  for (const auto& r : rows) {
    out += std::string(to_string(r.variant)) + "," + std::to_string(r.k) + "," + format_double(r.weighted_f1) + "," +
           std::to_string(r.n_train) + "," + std::to_string(r.n_test) + "," + std::to_string(cfg.layer) + "," +
           std::string(to_string(cfg.repr)) + "," + format_double(cfg.params.l2) + "," + format_double(cfg.params.lr) +
           "," + std::to_string(cfg.params.iters) + "," + std::to_string(cfg.seed) + "," + hex64(dump_hash) + "\n";
  }
  return out;
}

}  // namespace vast
