#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vast/assoc_stats.hpp"
#include "vast/embed_store.hpp"
#include "vast/error.hpp"
#include "vast/util.hpp"

namespace vast {

/// Mean and principal directions of a vector population.
struct PcBasis {
  Vec mean;
  std::vector<Vec> components;  // unit vectors, by decreasing singular value
  Vec singular_values;

  std::size_t dim() const { return mean.size(); }
  std::size_t rank() const { return components.size(); }
};

/// Principal components of the centered rows. Each component is signed so that
/// its largest-magnitude coordinate is positive.
inline PcBasis fit_pcs(std::span<const Vec> rows) {
  const std::size_t n = rows.size();
  if (n < 2) throw Error(Errc::DegenerateInput, "PCA needs at least 2 rows");
  const std::size_t d = rows.front().size();
  if (d == 0) throw Error(Errc::DegenerateInput, "PCA of zero-dimensional rows");

  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != d) throw Error(Errc::DimensionMismatch, "row " + std::to_string(i) + " has wrong length");
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(rows[i][j])) throw Error(Errc::NonFiniteValue, "row " + std::to_string(i));
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  bool identical = true;
  for (std::size_t i = 1; i < n && identical; ++i) identical = rows[i] == rows[0];
  if (identical) throw Error(Errc::DegenerateInput, "all rows are identical");

  const Eigen::RowVectorXd mu = x.colwise().mean();
  x.rowwise() -= mu;

  const std::size_t r = std::min(n - 1, d);
  Eigen::MatrixXd v;
  Eigen::VectorXd sv;
  if (n > d) {
    // Tall populations: eigendecomposition of the d x d scatter matrix.
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    scatter.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    scatter = scatter.selfadjointView<Eigen::Lower>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scatter);
    if (eig.info() != Eigen::Success) throw Error(Errc::DegenerateInput, "eigendecomposition failed");
    v = eig.eigenvectors().rowwise().reverse();
    sv = eig.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
    v = svd.matrixV();
    sv = svd.singularValues();
  }

  PcBasis basis;
  basis.mean.assign(mu.data(), mu.data() + d);
  for (std::size_t i = 0; i < r; ++i) {
    Vec c(d);
    std::size_t arg = 0;
    for (std::size_t j = 0; j < d; ++j) {
      c[j] = v(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
      if (std::abs(c[j]) > std::abs(c[arg])) arg = j;
    }
    if (c[arg] < 0.0)
      for (auto& e : c) e = -e;
    basis.components.push_back(std::move(c));
    basis.singular_values.push_back(sv(static_cast<Eigen::Index>(i)));
  }
  return basis;
}

namespace detail {

inline Vec centered(const Vec& v, const PcBasis& basis) {
  if (v.size() != basis.dim()) {
    throw Error(Errc::DimensionMismatch, std::to_string(v.size()) + " vs basis " + std::to_string(basis.dim()));
  }
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - basis.mean[i];
  return out;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// Subtracts the mean and removes the projections onto the top k components.
/// The mean is not added back.
inline Vec nullify(const Vec& v, const PcBasis& basis, std::size_t k) {
  if (k > basis.rank()) {
    throw Error(Errc::KOutOfRange, "k = " + std::to_string(k) + " exceeds basis rank " + std::to_string(basis.rank()));
  }
  Vec out = detail::centered(v, basis);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& c = basis.components[i];
    const double p = detail::dot(out, c);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] -= p * c[j];
  }
  return out;
}

/// Coordinates of the centered vector along the top k components.
inline Vec project_top(const Vec& v, const PcBasis& basis, std::size_t k) {
  if (k == 0 || k > basis.rank()) {
    throw Error(Errc::KOutOfRange, "k = " + std::to_string(k) + " outside [1, " + std::to_string(basis.rank()) + "]");
  }
  const Vec c = detail::centered(v, basis);
  Vec out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = detail::dot(c, basis.components[i]);
  return out;
}

/// Components to remove for a hidden size: one per hundred dimensions, at least one.
inline std::size_t default_k(std::size_t hidden_dim) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(hidden_dim) / 100.0)));
}

// ---------------------------------------------------------------------------
// Export: basis.json (shape) + basis.bin (float32 LE: mean, singular values,
// components row-major).

inline void write_basis(const std::filesystem::path& dir, const PcBasis& basis) {
  nlohmann::ordered_json j;
  j["format"] = "vast-basis";
  j["format_version"] = 1;
  j["hidden_dim"] = basis.dim();
  j["rank"] = basis.rank();
  j["dtype"] = "float32le";
  j["layout"] = "mean[hidden_dim],singular_values[rank],components[rank][hidden_dim]";
  std::vector<float> flat;
  for (double x : basis.mean) flat.push_back(static_cast<float>(x));
  for (double x : basis.singular_values) flat.push_back(static_cast<float>(x));
  for (const auto& c : basis.components)
    for (double x : c) flat.push_back(static_cast<float>(x));
  std::filesystem::create_directories(dir);
  write_file(dir / "basis.json", j.dump(2) + "\n");
  write_file(dir / "basis.bin", detail::floats_to_le_bytes(flat));
}

inline PcBasis read_basis(const std::filesystem::path& dir) {
  std::size_t d = 0;
  std::size_t r = 0;
  try {
    const auto j = nlohmann::json::parse(read_file(dir / "basis.json"));
    if (j.at("format_version").get<int>() != 1) throw Error(Errc::UnsupportedVersion, "basis version");
    d = j.at("hidden_dim").get<std::size_t>();
    r = j.at("rank").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedRecord, std::string("basis.json: ") + e.what());
  }
  const auto flat = detail::le_bytes_to_floats(read_file(dir / "basis.bin"));
  if (flat.size() != d + r + r * d) throw Error(Errc::SizeMismatch, "basis.bin does not match basis.json");
  PcBasis b;
  b.mean.assign(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(d));
  b.singular_values.assign(flat.begin() + static_cast<std::ptrdiff_t>(d),
                           flat.begin() + static_cast<std::ptrdiff_t>(d + r));
  for (std::size_t i = 0; i < r; ++i) {
    const auto off = static_cast<std::ptrdiff_t>(d + r + i * d);
    b.components.emplace_back(flat.begin() + off, flat.begin() + off + static_cast<std::ptrdiff_t>(d));
  }
  return b;
}

}  // namespace vast
