#include <gtest/gtest.h>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace vast;

namespace {

Vec random_vec(Rng& rng, std::size_t d) {
  Vec v(d);
  for (auto& x : v) x = standard_normal(rng);
  return v;
}

std::vector<Vec> random_group(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<Vec> g;
  for (std::size_t i = 0; i < n; ++i) g.push_back(random_vec(rng, d));
  return g;
}

}  // namespace

TEST(Cosine, Examples) {
  EXPECT_DOUBLE_EQ(cosine(Vec{1, 2}, Vec{1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(cosine(Vec{1, 0}, Vec{0, 1}), 0.0);
  EXPECT_NEAR(cosine(Vec{1, 2}, Vec{2, 1}), 0.8, 1e-15);
  EXPECT_VAST_ERROR(cosine(Vec{0, 0}, Vec{1, 1}), Errc::ZeroVector);
  EXPECT_VAST_ERROR(cosine(Vec{1, 0}, Vec{1, 1, 1}), Errc::DimensionMismatch);
}

TEST(Cosine, FloatSpansAccumulateInDouble) {
  const std::vector<float> a = {1.f, 2.f};
  const std::vector<float> b = {2.f, 1.f};
  EXPECT_NEAR(cosine(std::span<const float>(a), std::span<const float>(b)), 0.8, 1e-15);
}

TEST(ScWeat, TwoPointExample) {
  const std::vector<Vec> a = {{1, 0}};
  const std::vector<Vec> b = {{0, 1}};
  // (1 - 0) / popstd{1, 0} = 1 / 0.5
  EXPECT_DOUBLE_EQ(sc_weat(Vec{1, 0}, a, b), 2.0);
}

TEST(ScWeat, SameAttributeListsGiveZero) {
  auto rng = make_rng(1);
  const auto a = random_group(rng, 4, 5);
  EXPECT_EQ(sc_weat(random_vec(rng, 5), a, a), 0.0);
}

TEST(ScWeat, DegenerateAndEmpty) {
  const std::vector<Vec> a = {{1, 0}};
  EXPECT_VAST_ERROR(sc_weat(Vec{1, 0}, a, a), Errc::DegenerateStd);
  EXPECT_VAST_ERROR(sc_weat(Vec{1, 0}, a, {}), Errc::EmptyPolarGroup);
}

TEST(ScWeat, MatchesBruteForceOracle) {
  auto rng = make_rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const auto d = 1 + uniform_index(rng, 8);
    const auto a = random_group(rng, 1 + uniform_index(rng, 6), d);
    const auto b = random_group(rng, 1 + uniform_index(rng, 6), d);
    const auto w = random_vec(rng, d);
    if (d == 1 && a.size() + b.size() <= 2) continue;  // may be exactly degenerate
    double got;
    try {
      got = sc_weat(w, a, b);
    } catch (const Error&) {
      continue;
    }
    EXPECT_NEAR(got, oracle::sc_weat(w, a, b), 1e-9) << "instance " << i;
  }
}

TEST(ScWeat, AntisymmetryAndScaleInvariance) {
  auto rng = make_rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_group(rng, 5, 6);
    const auto b = random_group(rng, 4, 6);
    auto w = random_vec(rng, 6);
    const double e = sc_weat(w, a, b);
    EXPECT_EQ(sc_weat(w, b, a), -e);
    for (auto& x : w) x *= 3.5;
    EXPECT_NEAR(sc_weat(w, a, b), e, 1e-12);
  }
}

TEST(SymmetricSum, PermutationInvariantAndNegatable) {
  auto rng = make_rng(8);
  for (int i = 0; i < 100; ++i) {
    Vec xs(17);
    for (auto& x : xs) x = standard_normal(rng) * std::pow(10.0, static_cast<double>(uniform_index(rng, 12)) - 6);
    const double s = symmetric_sum(xs);
    Vec neg = xs;
    for (auto& x : neg) x = -x;
    EXPECT_EQ(symmetric_sum(neg), -s);
    shuffle(xs, rng);
    EXPECT_EQ(symmetric_sum(xs), s);
  }
}

TEST(Weat, EffectSizeMatchesOracle) {
  auto rng = make_rng(17);
  for (int i = 0; i < 200; ++i) {
    const auto n = 2 + uniform_index(rng, 4);
    const auto x = random_group(rng, n, 5);
    const auto y = random_group(rng, n, 5);
    const auto a = random_group(rng, 3, 5);
    const auto b = random_group(rng, 4, 5);
    WeatOptions opt;
    opt.compute_p = false;
    EXPECT_NEAR(weat(x, y, a, b, opt).effect_size, oracle::weat_effect(x, y, a, b), 1e-9);
  }
}

TEST(Weat, SwapsNegateExactly) {
  auto rng = make_rng(18);
  for (int i = 0; i < 100; ++i) {
    const auto x = random_group(rng, 4, 6);
    const auto y = random_group(rng, 4, 6);
    const auto a = random_group(rng, 5, 6);
    const auto b = random_group(rng, 3, 6);
    WeatOptions opt;
    opt.compute_p = false;
    const double e = weat(x, y, a, b, opt).effect_size;
    EXPECT_EQ(weat(y, x, a, b, opt).effect_size, -e);
    EXPECT_EQ(weat(x, y, b, a, opt).effect_size, -e);
  }
}

TEST(Weat, Preconditions) {
  const std::vector<Vec> x = {{1, 0}};
  const std::vector<Vec> y = {{0, 1}, {1, 1}};
  EXPECT_VAST_ERROR(weat(x, y, x, y), Errc::UnequalTargetSizes);
  EXPECT_VAST_ERROR(weat(x, x, {}, y), Errc::EmptyPolarGroup);
  EXPECT_VAST_ERROR(weat(x, x, x, y), Errc::DegenerateStd);
}

TEST(Weat, ToyThreeByThreeExactPByEnumeration) {
  const std::vector<Vec> x = {{1, 0.1}, {0.9, 0.3}, {0.8, -0.2}};
  const std::vector<Vec> y = {{0.1, 1}, {-0.2, 0.7}, {0.3, 0.9}};
  const std::vector<Vec> a = {{1, 0}, {0.9, 0.1}};
  const std::vector<Vec> b = {{0, 1}, {0.1, 0.9}};
  const auto r = weat(x, y, a, b);
  EXPECT_EQ(r.method, PValueMethod::Exact);
  EXPECT_EQ(r.samples, 20u);
  Vec s;
  for (const auto* g : {&x, &y})
    for (const auto& w : *g) s.push_back(static_cast<double>(oracle::s(w, a, b)));
  EXPECT_EQ(*r.p_value, oracle::exact_p(s, 3));
  // X is the most pleasant split: only the observed partition reaches it.
  EXPECT_EQ(*r.p_value, 1.0 / 20.0);
  EXPECT_GT(r.effect_size, 0.0);
}

TEST(Weat, ExactPMatchesGosperEnumerator) {
  auto rng = make_rng(99);
  for (int i = 0; i < 300; ++i) {
    const std::size_t nx = 1 + uniform_index(rng, 5);
    Vec s(2 * nx);
    for (auto& v : s) v = standard_normal(rng);
    if (i % 5 == 0) s[1] = s[0];  // ties
    EXPECT_EQ(exact_permutation_p(s, nx), oracle::exact_p(s, nx));
  }
}

TEST(Weat, MonteCarloAgreesWithExact) {
  auto rng = make_rng(7);
  for (int i = 0; i < 10; ++i) {
    Vec s(10);
    for (auto& v : s) v = standard_normal(rng);
    const double exact = exact_permutation_p(s, 5);
    const double mc = monte_carlo_permutation_p(s, 5, 20'000, static_cast<std::uint64_t>(i));
    EXPECT_NEAR(mc, exact, 0.02);
  }
}

TEST(Weat, MethodSwitchesAtExactLimit) {
  auto rng = make_rng(3);
  const auto x = random_group(rng, 10, 4);
  const auto y = random_group(rng, 10, 4);
  const auto a = random_group(rng, 3, 4);
  const auto b = random_group(rng, 3, 4);
  // C(20, 10) = 184,756 partitions
  WeatOptions opt;
  opt.mc_samples = 2000;
  const auto r = weat(x, y, a, b, opt);
  EXPECT_EQ(r.method, PValueMethod::MonteCarlo);
  EXPECT_EQ(method_label(r), "monte_carlo(2000)");
  EXPECT_EQ(weat(x, y, a, b, opt).p_value, r.p_value);
  opt.exact_limit = 200'000;
  EXPECT_EQ(weat(x, y, a, b, opt).method, PValueMethod::Exact);
}

TEST(Binomial, Capped) {
  EXPECT_EQ(binomial_capped(6, 3, 1000), 20u);
  EXPECT_EQ(binomial_capped(20, 10, 1'000'000), 184'756u);
  EXPECT_EQ(binomial_capped(200, 100, 100'000), 100'001u);
  EXPECT_EQ(binomial_capped(3, 5, 10), 0u);
}

TEST(Pearson, Examples) {
  const Vec xs = {1, 2, 3, 4};
  Vec neg = xs;
  for (auto& x : neg) x = -x;
  EXPECT_NEAR(pearson(xs, xs), 1.0, 1e-12);
  EXPECT_NEAR(pearson(xs, neg), -1.0, 1e-12);
  EXPECT_NEAR(pearson(xs, Vec{1, 3, 2, 4}), 0.8, 1e-12);
  EXPECT_VAST_ERROR(pearson(xs, Vec{1, 1, 1, 1}), Errc::ZeroVariance);
  EXPECT_VAST_ERROR(pearson(xs, Vec{1, 2}), Errc::LengthMismatch);
  EXPECT_VAST_ERROR(pearson(Vec{1}, Vec{1}), Errc::LengthMismatch);
}

TEST(Pearson, MatchesOracleAndIsAffineInvariant) {
  auto rng = make_rng(21);
  for (int i = 0; i < 500; ++i) {
    const auto n = 2 + uniform_index(rng, 30);
    Vec x(n), y(n);
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = standard_normal(rng);
      y[j] = 0.5 * x[j] + standard_normal(rng);
    }
    const double r = pearson(x, y);
    EXPECT_NEAR(r, oracle::pearson(x, y), 1e-12);
    const double a = 0.1 + 5 * uniform_unit(rng);
    const double c = 10 * standard_normal(rng);
    Vec ax = x;
    for (auto& v : ax) v = a * v + c;
    EXPECT_NEAR(pearson(ax, y), r, 1e-9);
    for (auto& v : ax) v = -v;
    EXPECT_NEAR(pearson(ax, y), -r, 1e-9);
  }
}

TEST(Spearman, Examples) {
  EXPECT_NEAR(spearman(Vec{1, 2, 3, 4}, Vec{10, 20, 35, 100}), 1.0, 1e-12);
  EXPECT_EQ(fractional_ranks(Vec{10, 10, 30}), (Vec{1.5, 1.5, 3}));
  EXPECT_NEAR(spearman(Vec{1, 2, 3}, Vec{10, 10, 30}), 0.866, 1e-3);
  EXPECT_NEAR(spearman(Vec{1, 2, 3}, Vec{10, 10, 30}), std::sqrt(3.0) / 2.0, 1e-12);
}

TEST(Spearman, EqualsPearsonOfRanks) {
  auto rng = make_rng(33);
  for (int i = 0; i < 1000; ++i) {
    const auto n = 3 + uniform_index(rng, 20);
    Vec x(n), y(n);
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = static_cast<double>(uniform_index(rng, 6));  // plenty of ties
      y[j] = standard_normal(rng);
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) continue;
    EXPECT_EQ(fractional_ranks(x), oracle::ranks(x));
    EXPECT_NEAR(spearman(x, y), oracle::pearson(oracle::ranks(x), oracle::ranks(y)), 1e-12);
  }
}

TEST(Spearman, InvariantUnderMonotoneTransforms) {
  auto rng = make_rng(34);
  Vec x(40), y(40);
  for (std::size_t j = 0; j < 40; ++j) {
    x[j] = standard_normal(rng);
    y[j] = x[j] + standard_normal(rng);
  }
  Vec ex = x;
  for (auto& v : ex) v = std::exp(v);
  EXPECT_NEAR(spearman(ex, y), spearman(x, y), 1e-12);
}
