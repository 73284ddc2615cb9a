#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "vast/contexts.hpp"
#include "vast/embed_store.hpp"
#include "vast/error.hpp"
#include "vast/lexicon.hpp"
#include "vast/util.hpp"

namespace vast {

// Synthetic dumps with a known rating signal.
//
// Coordinates: 0 carries the rating signal, 1 a target component of fixed
// magnitude and random sign (so centering leaves it in place), 2 together
// with 1 spreads each polar group around a ring, 3 is the optional
// dominant distractor, and the rest are isotropic noise. Every target and polar
// vector is derived from a stream seeded by (seed, word), so dumps generated
// for different settings share their lexicon and noise.
struct FixtureSpec {
  int dims = 16;
  int layers = 4;
  std::size_t words = 400;
  std::size_t polar_per_group = 24;
  std::uint64_t seed = 0;
  double signal = 0.5;        // target extent along the rating axis
  double common = 1.0;        // magnitude of the target component along axis 1
  double noise = 0.05;        // per-coordinate noise sd
  double distractor = 0.0;    // sd along axis 3, in units of `common`; 0 disables
  int distractor_layer = -1;  // -1: every layer
  double multi_fraction = 0.0;
  int multi_signal_layer = 2;  // last subtoken of multi-token words carries the rating from here on
  Setting setting = Setting::Bleached;
  int context_layer = -1;  // from this layer on, targets encode their context instead; -1: never
  std::vector<std::string> extra_words;
  std::string model_id = "synthetic";
};

struct Fixture {
  EmbeddingDump dump;
  ValenceLexicon lexicon;
  PolarSet polar;
};

namespace detail {

// Rating-axis value a context conveys for a word rated r on the 1..9 scale.
inline double context_signal(Setting s, double r, double random_t) {
  const auto bank = default_template_bank();
  auto mid = [&](std::size_t b) { return (bank.buckets[b].lo + bank.buckets[b].hi) / 2.0; };
  switch (s) {
    case Setting::Aligned: return (mid(aligned_bucket(r, bank)) - 5.0) / 4.0;
    case Setting::Misaligned: return (mid(misaligned_bucket(r, bank)) - 5.0) / 4.0;
    case Setting::Bleached: return 0.0;
    case Setting::Random: return random_t;
  }
  return 0.0;
}

}  // namespace detail

inline Fixture make_fixture(const FixtureSpec& spec) {
  if (spec.dims < 5) throw Error(Errc::InvalidArgument, "fixture needs at least 5 dimensions");
  if (spec.layers < 1) throw Error(Errc::InvalidArgument, "fixture needs at least 1 layer");
  if (spec.words < 2 || spec.polar_per_group < 1) throw Error(Errc::InvalidArgument, "fixture needs words and polar words");
  if (spec.multi_fraction < 0.0 || spec.multi_fraction > 1.0) throw Error(Errc::InvalidArgument, "multi_fraction outside [0, 1]");

  const auto d = static_cast<std::size_t>(spec.dims);
  DumpManifest m;
  m.model_id = spec.model_id;
  m.num_layers = spec.layers;
  m.hidden_dim = spec.dims;
  m.setting = spec.setting;
  m.seed = spec.seed;
  std::vector<std::vector<float>> tensors;
  std::vector<ValenceLexicon::Entry> entries;

  auto distractor_on = [&](int layer) {
    return spec.distractor > 0.0 && (spec.distractor_layer < 0 || spec.distractor_layer == layer);
  };
  auto fill_noise = [&](Vec& v, Rng& rng) {
    for (std::size_t j = 4; j < d; ++j) v[j] = spec.noise * standard_normal(rng);
  };
  auto append = [&](std::vector<float>& t, const Vec& v) {
    for (double x : v) t.push_back(static_cast<float>(x));
  };

  char name[32];
  for (std::size_t i = 0; i < spec.words; ++i) {
    std::snprintf(name, sizeof(name), "w%04zu", i);
    auto rng = make_rng(spec.seed, name);
    const double rating = std::round((1.0 + 8.0 * uniform_unit(rng)) * 100.0) / 100.0;
    const bool multi = uniform_unit(rng) < spec.multi_fraction;
    const int subtokens = multi ? 2 + static_cast<int>(uniform_index(rng, 2)) : 1;
    const double word_t = (rating - 5.0) / 4.0;
    const double context_t = detail::context_signal(spec.setting, rating, 2.0 * uniform_unit(rng) - 1.0);
    const double decoy_t = 2.0 * uniform_unit(rng) - 1.0;
    const double side = uniform_unit(rng) < 0.5 ? -1.0 : 1.0;
    std::vector<double> prefix_t;
    for (int s = 0; s + 1 < subtokens; ++s) prefix_t.push_back(2.0 * uniform_unit(rng) - 1.0);

    std::vector<float> t;
    for (int layer = 0; layer < spec.layers; ++layer) {
      const double g = standard_normal(rng);
      double last_t = spec.context_layer >= 0 && layer >= spec.context_layer ? context_t : word_t;
      if (multi && layer < spec.multi_signal_layer) last_t = decoy_t;
      for (int s = 0; s < subtokens; ++s) {
        Vec v(d, 0.0);
        v[0] = spec.signal * (s + 1 == subtokens ? last_t : prefix_t[static_cast<std::size_t>(s)]);
        v[1] = side * spec.common;
        if (distractor_on(layer)) v[3] = spec.distractor * spec.common * g;
        fill_noise(v, rng);
        append(t, v);
      }
    }
    m.words.push_back({name, rating, subtokens, 0});
    tensors.push_back(std::move(t));
    entries.push_back({name, rating});
  }

  PolarSet polar{"synthetic_polar", {}, {}};
  for (int sign : {1, -1}) {
    for (std::size_t i = 0; i < spec.polar_per_group; ++i) {
      std::snprintf(name, sizeof(name), sign > 0 ? "pos%02zu" : "neg%02zu", i);
      auto rng = make_rng(spec.seed, name);
      const double theta = 2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) /
                           static_cast<double>(spec.polar_per_group);
      std::vector<float> t;
      for (int layer = 0; layer < spec.layers; ++layer) {
        const double g = standard_normal(rng);
        Vec v(d, 0.0);
        v[0] = sign;
        v[1] = std::cos(theta);
        v[2] = std::sin(theta);
        if (distractor_on(layer)) v[3] = spec.distractor * spec.common * g;
        fill_noise(v, rng);
        append(t, v);
      }
      m.words.push_back({name, std::nullopt, 1, 0});
      tensors.push_back(std::move(t));
      (sign > 0 ? polar.positive : polar.negative).push_back(name);
    }
  }

  for (const auto& w : spec.extra_words) {
    auto rng = make_rng(spec.seed, w);
    std::vector<float> t;
    for (int layer = 0; layer < spec.layers; ++layer) {
      Vec v(d);
      for (auto& x : v) x = standard_normal(rng);
      append(t, v);
    }
    m.words.push_back({w, std::nullopt, 1, 0});
    tensors.push_back(std::move(t));
  }

  assign_offsets(m);
  auto dump = make_dump(std::move(m), tensors);
  return Fixture{std::move(dump), ValenceLexicon("synthetic", AffectDimension::Valence, {1.0, 9.0}, std::move(entries)),
                 std::move(polar)};
}

/// Writes dump/ plus lexicon.csv, polar.tsv, pairs.csv and labels.csv inputs
/// that exercise every command against the fixture.
inline void write_fixture_bundle(const std::filesystem::path& dir, const Fixture& fx) {
  write_dump(dir / "dump", fx.dump);

  std::string lex = "word,rating\n";
  for (const auto& e : fx.lexicon.entries()) lex += e.word + "," + format_double(e.rating) + "\n";
  write_file(dir / "lexicon.csv", lex);
  write_file(dir / "polar.tsv", format_polar_set(fx.polar));

  std::string pairs = "word1,word2,score\n";
  const auto& es = fx.lexicon.entries();
  for (std::size_t i = 0; i + 1 < es.size(); i += 2) {
    const double score = 10.0 - std::abs(es[i].rating - es[i + 1].rating);
    pairs += es[i].word + "," + es[i + 1].word + "," + format_double(score) + "\n";
  }
  write_file(dir / "pairs.csv", pairs);

  std::string labels = "row_index,label\n";
  const auto& words = fx.dump.manifest().words;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string label = "other";
    if (auto r = fx.lexicon.rating(words[i].text)) {
      label = *r >= 5.0 ? "pleasant" : "unpleasant";
    } else if (std::find(fx.polar.positive.begin(), fx.polar.positive.end(), words[i].text) != fx.polar.positive.end()) {
      label = "pleasant";
    } else if (std::find(fx.polar.negative.begin(), fx.polar.negative.end(), words[i].text) != fx.polar.negative.end()) {
      label = "unpleasant";
    }
    labels += std::to_string(i) + "," + label + "\n";
  }
  write_file(dir / "labels.csv", labels);
}

}  // namespace vast
