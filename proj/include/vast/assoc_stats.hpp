#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vast/error.hpp"
#include "vast/util.hpp"

namespace vast {

using Vec = std::vector<double>;

/// Delta degrees of freedom of the standard deviation in effect-size
/// denominators: 0 is the population deviation, 1 the sample deviation.
inline constexpr std::size_t kEffectSizeDdof = 0;

// Order-independent sum. Positive and negative parts are each added in order
// of increasing magnitude, so permuting the input never changes the result and
// negating every input exactly negates it.
inline double symmetric_sum(std::span<const double> xs) {
  Vec pos;
  Vec neg;
  for (double x : xs) (x >= 0.0 ? pos : neg).push_back(x);
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end(), std::greater<>());
  double sp = 0.0;
  for (double x : pos) sp += x;
  double sn = 0.0;
  for (double x : neg) sn += x;
  return sp + sn;
}

inline double symmetric_mean(std::span<const double> xs) { return symmetric_sum(xs) / static_cast<double>(xs.size()); }

inline double effect_size_std(std::span<const double> xs) {
  const double m = symmetric_mean(xs);
  Vec sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - m) * (xs[i] - m);
  return std::sqrt(symmetric_sum(sq) / static_cast<double>(xs.size() - kEffectSizeDdof));
}

// Below this, a standard deviation is treated as zero.
inline constexpr double kDegenerateStd = 1e-12;

template <typename T>
double cosine(std::span<const T> u, std::span<const T> v) {
  if (u.size() != v.size()) {
    throw Error(Errc::DimensionMismatch, std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  }
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = static_cast<double>(u[i]);
    const double b = static_cast<double>(v[i]);
    dot += a * b;
    nu += a * a;
    nv += b * b;
  }
  if (nu == 0.0 || nv == 0.0) throw Error(Errc::ZeroVector, "cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

inline double cosine(const Vec& u, const Vec& v) { return cosine(std::span<const double>(u), std::span<const double>(v)); }

namespace detail {

inline Vec cosines(const Vec& w, std::span<const Vec> group) {
  Vec out;
  out.reserve(group.size());
  for (const auto& x : group) out.push_back(cosine(w, x));
  return out;
}

}  // namespace detail

/// Single-category association effect size of w with attribute groups A and B.
inline double sc_weat(const Vec& w, std::span<const Vec> a, std::span<const Vec> b) {
  if (a.empty() || b.empty()) throw Error(Errc::EmptyPolarGroup, "attribute groups must be nonempty");
  const Vec ca = detail::cosines(w, a);
  const Vec cb = detail::cosines(w, b);
  Vec all = ca;
  all.insert(all.end(), cb.begin(), cb.end());
  const double sd = effect_size_std(all);
  if (!(sd > kDegenerateStd)) throw Error(Errc::DegenerateStd, "all attribute cosines are identical");
  return (symmetric_mean(ca) - symmetric_mean(cb)) / sd;
}

/// s(w, A, B): mean cosine with A minus mean cosine with B.
inline double association(const Vec& w, std::span<const Vec> a, std::span<const Vec> b) {
  const Vec ca = detail::cosines(w, a);
  const Vec cb = detail::cosines(w, b);
  return symmetric_mean(ca) - symmetric_mean(cb);
}

enum class PValueMethod { None, Exact, MonteCarlo };

struct AssociationResult {
  double effect_size = 0.0;
  std::optional<double> p_value;
  PValueMethod method = PValueMethod::None;
  std::size_t samples = 0;  // partitions evaluated
};

inline std::string method_label(const AssociationResult& r) {
  switch (r.method) {
    case PValueMethod::Exact: return "exact";
    case PValueMethod::MonteCarlo: return "monte_carlo(" + std::to_string(r.samples) + ")";
    case PValueMethod::None: break;
  }
  return "none";
}

/// C(n, k), saturating at cap.
inline std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  // Multiplicative form; every prefix is itself a binomial coefficient.
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(c);
}

struct WeatOptions {
  std::uint64_t seed = 0;
  std::size_t mc_samples = 10'000;
  std::uint64_t exact_limit = 100'000;
  bool compute_p = true;
};

// Partition statistic: sum of associations over X' minus sum over Y'.
// One-sided p counts partitions whose statistic reaches the observed one, with
// a relative tolerance so that rounding noise cannot split exact ties.
inline bool reaches(double stat, double observed) {
  return stat >= observed - 1e-9 * (1.0 + std::abs(observed));
}

/// Exact one-sided permutation p-value over all equal-size splits of s into
/// (|X'| = n_x, rest). The observed split is s[0, n_x).
inline double exact_permutation_p(std::span<const double> s, std::size_t n_x) {
  const std::size_t n = s.size();
  const double total = std::accumulate(s.begin(), s.end(), 0.0);
  auto stat_of = [&](const std::vector<std::size_t>& idx) {
    double sx = 0.0;
    for (auto i : idx) sx += s[i];
    return 2.0 * sx - total;
  };
  std::vector<std::size_t> idx(n_x);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const double observed = stat_of(idx);
  std::uint64_t hits = 0;
  std::uint64_t count = 0;
  while (true) {
    ++count;
    if (reaches(stat_of(idx), observed)) ++hits;
    // next combination in lexicographic order
    std::size_t i = n_x;
    while (i > 0 && idx[i - 1] == n - n_x + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < n_x; ++j) idx[j] = idx[j - 1] + 1;
  }
  return static_cast<double>(hits) / static_cast<double>(count);
}

/// Monte Carlo p-value; the observed split counts in numerator and denominator.
inline double monte_carlo_permutation_p(std::span<const double> s, std::size_t n_x, std::size_t samples,
                                        std::uint64_t seed) {
  const double total = std::accumulate(s.begin(), s.end(), 0.0);
  double sx0 = 0.0;
  for (std::size_t i = 0; i < n_x; ++i) sx0 += s[i];
  const double observed = 2.0 * sx0 - total;
  auto rng = make_rng(seed);
  Vec pool(s.begin(), s.end());
  std::uint64_t hits = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    // partial Fisher-Yates: the first n_x slots form X'
    double sx = 0.0;
    for (std::size_t i = 0; i < n_x; ++i) {
      std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
      sx += pool[i];
    }
    if (reaches(2.0 * sx - total, observed)) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(samples + 1);
}

/// Differential association of targets X, Y with attributes A, B (Cohen's d)
/// and its one-sided permutation p-value.
inline AssociationResult weat(std::span<const Vec> x, std::span<const Vec> y, std::span<const Vec> a,
                              std::span<const Vec> b, const WeatOptions& opt = {}) {
  if (x.size() != y.size() || x.empty()) {
    throw Error(Errc::UnequalTargetSizes, "|X| = " + std::to_string(x.size()) + ", |Y| = " + std::to_string(y.size()));
  }
  if (a.empty() || b.empty()) throw Error(Errc::EmptyPolarGroup, "attribute groups must be nonempty");

  Vec sx;
  Vec sy;
  for (const auto& w : x) sx.push_back(association(w, a, b));
  for (const auto& w : y) sy.push_back(association(w, a, b));
  Vec s = sx;
  s.insert(s.end(), sy.begin(), sy.end());
  const double sd = effect_size_std(s);
  if (!(sd > kDegenerateStd)) throw Error(Errc::DegenerateStd, "all target associations are identical");

  AssociationResult r;
  r.effect_size = (symmetric_mean(sx) - symmetric_mean(sy)) / sd;
  if (!opt.compute_p) return r;
  const auto partitions = binomial_capped(s.size(), x.size(), opt.exact_limit);
  if (partitions <= opt.exact_limit) {
    r.p_value = exact_permutation_p(s, x.size());
    r.method = PValueMethod::Exact;
    r.samples = partitions;
  } else {
    r.p_value = monte_carlo_permutation_p(s, x.size(), opt.mc_samples, opt.seed);
    r.method = PValueMethod::MonteCarlo;
    r.samples = opt.mc_samples;
  }
  return r;
}

// ---------------------------------------------------------------------------

inline void check_pairs(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(Errc::LengthMismatch, std::to_string(xs.size()) + " vs " + std::to_string(ys.size()));
  }
  if (xs.size() < 2) throw Error(Errc::LengthMismatch, "correlation needs at least 2 pairs");
}

/// Pearson's r from sample (n - 1) moments.
inline double pearson(std::span<const double> xs, std::span<const double> ys) {
  check_pairs(xs, ys);
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(Errc::ZeroVariance, "correlation of a constant sequence");
  const double cov = sxy / (n - 1.0);
  const double sdx = std::sqrt(sxx / (n - 1.0));
  const double sdy = std::sqrt(syy / (n - 1.0));
  return std::clamp(cov / (sdx * sdy), -1.0, 1.0);
}

/// 1-based fractional ranks; tied values share the mean of their ranks.
inline Vec fractional_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return xs[i] < xs[j]; });
  Vec ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double spearman(std::span<const double> xs, std::span<const double> ys) {
  check_pairs(xs, ys);
  const Vec rx = fractional_ranks(xs);
  const Vec ry = fractional_ranks(ys);
  return pearson(rx, ry);
}

}  // namespace vast
