#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "vast/assoc_stats.hpp"
#include "vast/contexts.hpp"
#include "vast/embed_store.hpp"
#include "vast/error.hpp"
#include "vast/isolate.hpp"
#include "vast/lexicon.hpp"
#include "vast/util.hpp"

namespace vast {

// ---------------------------------------------------------------------------
// Shared helpers

namespace detail {

inline void require_words(const EmbeddingDump& dump, const std::vector<std::string>& words, std::string_view what) {
  std::vector<std::string> missing;
  std::unordered_set<std::string> seen;
  for (const auto& w : words)
    if (!dump.contains(w) && seen.insert(w).second) missing.push_back(w);
  if (missing.empty()) return;
  std::string list;
  for (std::size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? ", " : "") + missing[i];
  if (missing.size() > 10) list += ", ...";
  throw Error(Errc::MissingWord, std::to_string(missing.size()) + " " + std::string(what) + " missing from dump: " + list);
}

inline std::vector<Vec> vectors(const EmbeddingDump& dump, const std::vector<std::string>& words, int layer,
                                SubwordRepr repr) {
  std::vector<Vec> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(word_vector(dump, w, layer, repr));
  return out;
}

inline std::vector<Vec> nullified(const std::vector<Vec>& vs, const PcBasis& basis, std::size_t k) {
  std::vector<Vec> out;
  out.reserve(vs.size());
  for (const auto& v : vs) out.push_back(nullify(v, basis, k));
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// VAST scores

struct VastScore {
  double rho = 0.0;
  std::size_t n_words = 0;
  std::size_t n_dropped = 0;
  std::vector<std::string> dropped;
};

/// Target and polar vectors for one layer and representation. Polar vectors
/// may come from a second dump (aligned polar contexts for the misaligned setting).
struct LayerPopulation {
  std::vector<std::string> words;
  Vec ratings;
  std::vector<Vec> targets;
  std::vector<Vec> positive;
  std::vector<Vec> negative;

  std::vector<Vec> all() const {
    std::vector<Vec> out = targets;
    out.insert(out.end(), positive.begin(), positive.end());
    out.insert(out.end(), negative.begin(), negative.end());
    return out;
  }
};

/// The dump polar vectors are read from: the dump itself, or for the
/// misaligned setting the aligned-setting dump, which is then mandatory.
inline const EmbeddingDump& polar_source(const EmbeddingDump& dump, const EmbeddingDump* polar_dump) {
  if (dump.setting() == Setting::Misaligned) {
    if (!polar_dump || polar_dump->setting() != Setting::Aligned) {
      throw Error(Errc::InvalidArgument, "the misaligned setting reads polar vectors from an aligned-setting dump");
    }
    return *polar_dump;
  }
  return polar_dump ? *polar_dump : dump;
}

inline LayerPopulation gather_population(const EmbeddingDump& dump, const EmbeddingDump* polar_dump,
                                         const ValenceLexicon& lex, const PolarSet& polar, int layer,
                                         SubwordRepr repr) {
  validate(polar);
  const auto& pd = polar_source(dump, polar_dump);
  detail::require_words(dump, lex.words(), "lexicon words");
  detail::require_words(pd, polar.all_words(), "polar words");
  check_layer(dump, layer);
  check_layer(pd, layer);
  if (pd.hidden_dim() != dump.hidden_dim()) throw Error(Errc::DimensionMismatch, "polar dump hidden size differs");
  check_ratings(dump, lex);

  LayerPopulation pop;
  pop.words = lex.words();
  for (const auto& e : lex.entries()) pop.ratings.push_back(e.rating);
  pop.targets = detail::vectors(dump, pop.words, layer, repr);
  pop.positive = detail::vectors(pd, polar.positive, layer, repr);
  pop.negative = detail::vectors(pd, polar.negative, layer, repr);
  return pop;
}

/// Basis over targets and polar words of one layer population.
inline PcBasis fit_population(const LayerPopulation& pop) {
  const auto rows = pop.all();
  return fit_pcs(rows);
}

/// Pearson's rho between per-word SC-WEAT effect sizes and ratings. k = 0
/// scores the raw vectors; k > 0 scores mean-subtracted vectors with the top
/// k components of basis removed.
inline VastScore score_population(const LayerPopulation& pop, const PcBasis* basis, std::size_t k) {
  std::vector<Vec> targets;
  std::vector<Vec> pos;
  std::vector<Vec> neg;
  const std::vector<Vec>* t = &pop.targets;
  const std::vector<Vec>* p = &pop.positive;
  const std::vector<Vec>* n = &pop.negative;
  if (k > 0) {
    if (!basis) throw Error(Errc::InvalidArgument, "k > 0 needs a fitted basis");
    targets = detail::nullified(pop.targets, *basis, k);
    pos = detail::nullified(pop.positive, *basis, k);
    neg = detail::nullified(pop.negative, *basis, k);
    t = &targets;
    p = &pos;
    n = &neg;
  }

  VastScore out;
  Vec effects;
  Vec ratings;
  for (std::size_t i = 0; i < t->size(); ++i) {
    try {
      effects.push_back(sc_weat((*t)[i], *p, *n));
      ratings.push_back(pop.ratings[i]);
    } catch (const Error& e) {
      if (e.code() != Errc::DegenerateStd && e.code() != Errc::ZeroVector) throw;
      out.dropped.push_back(pop.words[i]);
    }
  }
  out.n_words = effects.size();
  out.n_dropped = out.dropped.size();
  if (effects.size() < 2) {
    throw Error(Errc::EmptyAfterDrops, std::to_string(out.n_dropped) + " of " + std::to_string(t->size()) +
                                           " words dropped as degenerate");
  }
  out.rho = pearson(effects, ratings);
  return out;
}

inline VastScore vast_score(const EmbeddingDump& dump, const EmbeddingDump* polar_dump, const ValenceLexicon& lex,
                            const PolarSet& polar, int layer, SubwordRepr repr, std::size_t k) {
  const auto pop = gather_population(dump, polar_dump, lex, polar, layer, repr);
  if (k == 0) return score_population(pop, nullptr, 0);
  const auto basis = fit_population(pop);
  return score_population(pop, &basis, k);
}

struct VastRow {
  int layer = 0;
  Setting setting = Setting::Bleached;
  Setting polar_setting = Setting::Bleached;
  SubwordRepr repr = SubwordRepr::Last;
  std::size_t k = 0;
  VastScore score;
  std::string dump_hash;
  std::string polar_dump_hash;
};

inline VastRow make_row(const EmbeddingDump& dump, const EmbeddingDump& pd, int layer, SubwordRepr repr, std::size_t k,
                        VastScore s) {
  return VastRow{layer, dump.setting(), pd.setting(), repr, k, std::move(s), hex64(dump.content_hash()),
                 hex64(pd.content_hash())};
}

/// One row per k in 0..k_max; the basis is fit once for the layer.
inline std::vector<VastRow> isolation_sweep(const EmbeddingDump& dump, const EmbeddingDump* polar_dump,
                                            const ValenceLexicon& lex, const PolarSet& polar, int layer,
                                            SubwordRepr repr, std::size_t k_max) {
  const auto& pd = polar_source(dump, polar_dump);
  const auto pop = gather_population(dump, polar_dump, lex, polar, layer, repr);
  std::optional<PcBasis> basis;
  if (k_max > 0) {
    basis = fit_population(pop);
    if (k_max > basis->rank()) {
      throw Error(Errc::KOutOfRange, "k_max = " + std::to_string(k_max) + " exceeds basis rank " +
                                         std::to_string(basis->rank()));
    }
  }
  std::vector<VastRow> rows;
  for (std::size_t k = 0; k <= k_max; ++k) {
    rows.push_back(make_row(dump, pd, layer, repr, k, score_population(pop, basis ? &*basis : nullptr, k)));
  }
  return rows;
}

/// Rows for every layer of every supplied setting. Misaligned polar vectors
/// come from the aligned dump.
inline std::vector<VastRow> setting_comparison(const std::map<Setting, const EmbeddingDump*>& dumps,
                                               const ValenceLexicon& lex, const PolarSet& polar, SubwordRepr repr,
                                               const std::vector<std::size_t>& ks = {0}) {
  if (dumps.empty()) throw Error(Errc::InvalidArgument, "no dumps supplied");
  const int layers = dumps.begin()->second->num_layers();
  for (const auto& [s, d] : dumps) {
    if (d->setting() != s) {
      throw Error(Errc::InvalidArgument, "dump labeled " + std::string(to_string(d->setting())) + " supplied as " +
                                             std::string(to_string(s)));
    }
    if (d->num_layers() != layers) throw Error(Errc::DimensionMismatch, "dumps disagree on layer count");
  }
  std::vector<VastRow> rows;
  for (int layer = 0; layer < layers; ++layer) {
    for (const auto& [s, d] : dumps) {
      const EmbeddingDump* pd = nullptr;
      if (s == Setting::Misaligned) {
        auto it = dumps.find(Setting::Aligned);
        if (it == dumps.end()) throw Error(Errc::InvalidArgument, "misaligned comparison needs the aligned dump");
        pd = it->second;
      }
      const auto& src = polar_source(*d, pd);
      const auto pop = gather_population(*d, pd, lex, polar, layer, repr);
      std::optional<PcBasis> basis;
      for (auto k : ks) {
        if (k > 0 && !basis) basis = fit_population(pop);
        rows.push_back(make_row(*d, src, layer, repr, k, score_population(pop, basis ? &*basis : nullptr, k)));
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Tokenization

struct TokenizationRow {
  int layer = 0;
  std::string cohort;  // single | multi
  std::string repr;    // any | first | last | mean | max
  VastScore score;
};

struct TokenizationReport {
  std::vector<TokenizationRow> rows;
  std::size_t singly_tokenized = 0;  // before sampling
  std::size_t multiply_tokenized = 0;
  std::size_t cohort_size = 0;
  PolarSet polar;  // balanced
  std::vector<std::string> warnings;
  std::string dump_hash;
};

/// Per-layer scores of singly vs. multiply tokenized lexicon words, with
/// single-token polar groups. Cohorts are equal-sized.
inline TokenizationReport tokenization_experiment(const EmbeddingDump& dump, const ValenceLexicon& lex,
                                                  const PolarSet& polar, std::uint64_t seed, std::size_t k = 0) {
  detail::require_words(dump, polar.all_words(), "polar words");
  detail::require_words(dump, lex.words(), "lexicon words");
  TokenizationReport rep;
  rep.dump_hash = hex64(dump.content_hash());
  rep.polar = balance_polar_set(polar, dump.subtoken_counts(), seed);
  for (const auto& e : lex.entries()) {
    (dump.record(*dump.find(e.word)).subtoken_count > 1 ? rep.multiply_tokenized : rep.singly_tokenized)++;
  }

  auto part = partition_by_tokenization(lex, dump, seed);
  if (part.multi.empty()) {
    rep.warnings.push_back("no multiply tokenized lexicon words; reporting the single cohort only");
    part.single = lex.words();
  }
  rep.cohort_size = part.multi.empty() ? part.single.size() : part.multi.size();
  const auto single_lex = lex.subset(part.single);
  const auto multi_lex = lex.subset(part.multi);

  for (int layer = 0; layer < dump.num_layers(); ++layer) {
    auto cohort = [&](const ValenceLexicon& l, SubwordRepr r) {
      const auto pop = gather_population(dump, nullptr, l, rep.polar, layer, r);
      if (k == 0) return score_population(pop, nullptr, 0);
      const auto basis = fit_population(pop);
      return score_population(pop, &basis, k);
    };
    rep.rows.push_back({layer, "single", "any", cohort(single_lex, SubwordRepr::Last)});
    if (!part.multi.empty()) {
      for (auto r : kAllReprs) rep.rows.push_back({layer, "multi", std::string(to_string(r)), cohort(multi_lex, r)});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Bias battery

struct BiasTest {
  std::string name;
  std::vector<std::string> x;
  std::vector<std::string> y;
  std::vector<std::string> a;
  std::vector<std::string> b;
};

inline std::vector<BiasTest> builtin_bias_tests() {
  const std::vector<std::string> pleasant = weat_valence_polar().positive;
  const std::vector<std::string> unpleasant = weat_valence_polar().negative;
  const std::vector<std::string> pleasant8 = {"joy", "love", "peace", "wonderful", "pleasure", "friend", "laughter", "happy"};
  const std::vector<std::string> unpleasant8 = {"agony", "terrible", "horrible", "nasty", "evil", "war", "awful", "failure"};
  const std::vector<std::string> ea_names2 = {"Brad", "Brendan", "Geoffrey", "Greg", "Brett", "Matthew", "Neil", "Todd",
                                              "Allison", "Anne", "Carrie", "Emily", "Jill", "Laurie", "Meredith", "Sarah"};
  const std::vector<std::string> aa_names2 = {"Darnell", "Hakim", "Jermaine", "Kareem", "Jamal", "Leroy", "Rasheed", "Tyrone",
                                              "Aisha", "Ebony", "Keisha", "Kenya", "Lakisha", "Latoya", "Tamika", "Tanisha"};
  return {
      {"flowers_insects",
       {"aster", "clover", "hyacinth", "marigold", "poppy", "azalea", "crocus", "iris", "orchid", "rose", "bluebell",
        "daffodil", "lilac", "pansy", "tulip", "buttercup", "daisy", "lily", "peony", "violet", "carnation", "gladiola",
        "magnolia", "petunia", "zinnia"},
       {"ant", "caterpillar", "flea", "locust", "spider", "bedbug", "centipede", "fly", "maggot", "tarantula", "bee",
        "cockroach", "gnat", "mosquito", "termite", "beetle", "cricket", "hornet", "moth", "wasp", "blackfly",
        "dragonfly", "horsefly", "roach", "weevil"},
       pleasant,
       unpleasant},
      {"instruments_weapons",
       {"bagpipe", "cello", "guitar", "lute", "trombone", "banjo", "clarinet", "harmonica", "mandolin", "trumpet",
        "bassoon", "drum", "harp", "oboe", "tuba", "bell", "fiddle", "harpsichord", "piano", "viola", "bongo", "flute",
        "horn", "saxophone", "violin"},
       {"arrow", "club", "gun", "missile", "spear", "axe", "dagger", "harpoon", "pistol", "sword", "blade", "dynamite",
        "hatchet", "rifle", "tank", "bomb", "firearm", "knife", "shotgun", "teargas", "cannon", "grenade", "mace",
        "slingshot", "whip"},
       pleasant,
       unpleasant},
      {"race_1",
       {"Adam", "Harry", "Josh", "Roger", "Alan", "Frank", "Justin", "Ryan", "Andrew", "Jack", "Matthew",
        "Stephen", "Brad", "Greg", "Paul", "Jonathan", "Peter", "Amanda", "Courtney", "Heather", "Melanie",
        "Katie", "Betsy", "Kristin", "Nancy", "Stephanie", "Ellen", "Lauren", "Colleen", "Emily", "Megan", "Rachel"},
       {"Alonzo", "Jamel", "Theo", "Alphonse", "Jerome", "Leroy", "Torrance", "Darnell", "Lamar", "Lionel",
        "Tyree", "Deion", "Lamont", "Malik", "Terrence", "Tyrone", "Lavon", "Marcellus", "Wardell", "Nichelle",
        "Shereen", "Ebony", "Latisha", "Shaniqua", "Jasmine", "Tanisha", "Tia", "Lakisha", "Latoya", "Yolanda",
        "Malika", "Yvette"},
       pleasant,
       unpleasant},
      {"race_2", ea_names2, aa_names2, pleasant, unpleasant},
      {"race_3", ea_names2, aa_names2, pleasant8, unpleasant8},
      {"gender_career_family",
       {"John", "Paul", "Mike", "Kevin", "Steve", "Greg", "Jeff", "Bill"},
       {"Amy", "Joan", "Lisa", "Sarah", "Diana", "Kate", "Ann", "Donna"},
       {"executive", "management", "professional", "corporation", "salary", "office", "business", "career"},
       {"home", "parents", "children", "family", "cousins", "marriage", "wedding", "relatives"}},
      {"gender_math_art",
       {"math", "algebra", "geometry", "calculus", "equations", "computation", "numbers", "addition"},
       {"poetry", "art", "dance", "literature", "novel", "symphony", "drama", "sculpture"},
       {"male", "man", "boy", "brother", "he", "him", "his", "son"},
       {"female", "woman", "girl", "sister", "she", "her", "hers", "daughter"}},
      {"gender_science_art",
       {"science", "technology", "physics", "chemistry", "Einstein", "NASA", "experiment", "astronomy"},
       {"poetry", "art", "Shakespeare", "dance", "literature", "novel", "symphony", "drama"},
       {"brother", "father", "uncle", "grandfather", "son", "he", "his", "him"},
       {"sister", "mother", "aunt", "grandmother", "daughter", "she", "hers", "her"}},
      {"disease",
       {"sick", "illness", "influenza", "disease", "virus", "cancer"},
       {"sad", "hopeless", "gloomy", "tearful", "miserable", "depressed"},
       {"stable", "always", "constant", "persistent", "chronic", "prolonged", "forever"},
       {"impermanent", "unstable", "variable", "fleeting", "short-term", "brief", "occasional"}},
      {"age",
       {"Tiffany", "Michelle", "Cindy", "Kristy", "Brad", "Eric", "Joey", "Billy"},
       {"Ethel", "Bernice", "Gertrude", "Agnes", "Cecil", "Wilbert", "Mortimer", "Edgar"},
       pleasant8,
       unpleasant8},
  };
}

inline std::vector<std::string> bias_test_vocabulary(const std::vector<BiasTest>& tests) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& t : tests)
    for (const auto* g : {&t.x, &t.y, &t.a, &t.b})
      for (const auto& w : *g)
        if (seen.insert(w).second) out.push_back(w);
  return out;
}

/// Bias test file: JSON array of {"name", "x", "y", "a", "b"}.
inline std::vector<BiasTest> parse_bias_tests(std::string_view text) {
  try {
    std::vector<BiasTest> out;
    for (const auto& t : nlohmann::json::parse(text)) {
      out.push_back({t.at("name").get<std::string>(), t.at("x").get<std::vector<std::string>>(),
                     t.at("y").get<std::vector<std::string>>(), t.at("a").get<std::vector<std::string>>(),
                     t.at("b").get<std::vector<std::string>>()});
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedRecord, std::string("bias tests: ") + e.what());
  }
}

struct BiasRow {
  std::string test;
  int layer = 0;
  std::size_t k = 0;
  AssociationResult result;
  std::size_t n_targets = 0;
  std::size_t n_attributes = 0;
  std::string dump_hash;
};

struct BiasOptions {
  SubwordRepr repr = SubwordRepr::Last;
  std::size_t mc_samples = 10'000;
  const ValenceLexicon* lexicon = nullptr;  // joins the PC-fit population when given
};

/// WEAT per test and per k. The PC basis for a test is fit on its targets and
/// attributes plus the lexicon words present in the dump.
inline std::vector<BiasRow> bias_battery(const EmbeddingDump& dump, const std::vector<BiasTest>& tests, int layer,
                                         const std::vector<std::size_t>& ks, std::uint64_t seed,
                                         const BiasOptions& opt = {}) {
  check_layer(dump, layer);
  detail::require_words(dump, bias_test_vocabulary(tests), "bias test words");
  std::vector<BiasRow> rows;
  for (const auto& t : tests) {
    auto x = detail::vectors(dump, t.x, layer, opt.repr);
    auto y = detail::vectors(dump, t.y, layer, opt.repr);
    auto a = detail::vectors(dump, t.a, layer, opt.repr);
    auto b = detail::vectors(dump, t.b, layer, opt.repr);

    std::optional<PcBasis> basis;
    if (std::any_of(ks.begin(), ks.end(), [](auto k) { return k > 0; })) {
      std::vector<std::string> pop_words = bias_test_vocabulary({t});
      if (opt.lexicon) {
        std::unordered_set<std::string> have(pop_words.begin(), pop_words.end());
        for (const auto& e : opt.lexicon->entries())
          if (dump.contains(e.word) && have.insert(e.word).second) pop_words.push_back(e.word);
      }
      const auto rows_for_fit = detail::vectors(dump, pop_words, layer, opt.repr);
      basis = fit_pcs(rows_for_fit);
    }

    WeatOptions wo;
    wo.seed = splitmix64(seed ^ fnv1a(t.name));
    wo.mc_samples = opt.mc_samples;
    for (auto k : ks) {
      BiasRow row;
      row.test = t.name;
      row.layer = layer;
      row.k = k;
      row.n_targets = t.x.size() + t.y.size();
      row.n_attributes = t.a.size() + t.b.size();
      row.dump_hash = hex64(dump.content_hash());
      if (k == 0) {
        row.result = weat(x, y, a, b, wo);
      } else {
        row.result = weat(detail::nullified(x, *basis, k), detail::nullified(y, *basis, k),
                          detail::nullified(a, *basis, k), detail::nullified(b, *basis, k), wo);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Word similarity

struct WordSimRow {
  std::string dataset;
  int layer = 0;
  SubwordRepr repr = SubwordRepr::Last;
  std::size_t k = 0;
  double spearman = 0.0;
  std::size_t pairs_used = 0;
  std::size_t pairs_skipped = 0;
  std::string dump_hash;
};

/// Spearman's rho between pair cosines and human scores. Pairs with a word
/// missing from the dump, or a zero vector, are skipped. For k > 0 the basis
/// is fit on the dataset words present in the dump.
inline WordSimRow wordsim_eval(const EmbeddingDump& dump, const WordPairDataset& ds, int layer, SubwordRepr repr,
                               std::size_t k) {
  check_layer(dump, layer);
  std::vector<std::string> vocab;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& p : ds.pairs) {
    for (const auto* w : {&p.first, &p.second}) {
      if (dump.contains(*w) && !slot.count(*w)) {
        slot.emplace(*w, vocab.size());
        vocab.push_back(*w);
      }
    }
  }
  auto vs = detail::vectors(dump, vocab, layer, repr);
  if (k > 0) {
    if (vs.size() < 2) throw Error(Errc::AllPairsSkipped, "fewer than two dataset words in dump");
    const auto basis = fit_pcs(vs);
    vs = detail::nullified(vs, basis, k);
  }

  WordSimRow row{ds.name, layer, repr, k, 0.0, 0, 0, hex64(dump.content_hash())};
  Vec sims;
  Vec human;
  for (const auto& p : ds.pairs) {
    auto i = slot.find(p.first);
    auto j = slot.find(p.second);
    if (i == slot.end() || j == slot.end()) {
      ++row.pairs_skipped;
      continue;
    }
    try {
      sims.push_back(cosine(vs[i->second], vs[j->second]));
      human.push_back(p.score);
    } catch (const Error& e) {
      if (e.code() != Errc::ZeroVector) throw;
      ++row.pairs_skipped;
    }
  }
  row.pairs_used = sims.size();
  if (sims.size() < 2) {
    throw Error(Errc::AllPairsSkipped, std::to_string(row.pairs_skipped) + " of " + std::to_string(ds.pairs.size()) +
                                           " pairs skipped");
  }
  row.spearman = spearman(sims, human);
  return row;
}

// ---------------------------------------------------------------------------
// Report CSVs. Column orders are fixed; every row carries its provenance.

inline constexpr std::string_view kVastHeader =
    "layer,setting,polar_setting,repr,k,n_words,n_dropped,rho,lexicon,polar,seed,dump_hash,polar_dump_hash";
inline constexpr std::string_view kTokenizationHeader =
    "layer,cohort,repr,k,n_words,n_dropped,rho,cohort_size,singly_tokenized,multiply_tokenized,polar_size,seed,dump_hash";
inline constexpr std::string_view kBiasHeader =
    "test,layer,k,effect_size,p_value,p_method,n_targets,n_attributes,repr,seed,dump_hash";
inline constexpr std::string_view kWordSimHeader = "dataset,layer,repr,k,spearman,pairs_used,pairs_skipped,dump_hash";

namespace detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string format_vast_rows(const std::vector<VastRow>& rows, std::string_view lexicon, std::string_view polar,
                                    std::uint64_t seed) {
  std::string out = std::string(kVastHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.layer) + "," + std::string(to_string(r.setting)) + "," +
           std::string(to_string(r.polar_setting)) + "," + std::string(to_string(r.repr)) + "," +
           std::to_string(r.k) + "," + std::to_string(r.score.n_words) + "," + std::to_string(r.score.n_dropped) + "," +
           format_double(r.score.rho) + "," + detail::csv_field(lexicon) + "," + detail::csv_field(polar) + "," +
           std::to_string(seed) + "," + r.dump_hash + "," + r.polar_dump_hash + "\n";
  }
  return out;
}

inline std::string format_tokenization_report(const TokenizationReport& rep, std::size_t k, std::uint64_t seed) {
  std::string out = std::string(kTokenizationHeader) + "\n";
  for (const auto& r : rep.rows) {
    out += std::to_string(r.layer) + "," + r.cohort + "," + r.repr + "," + std::to_string(k) + "," +
           std::to_string(r.score.n_words) + "," + std::to_string(r.score.n_dropped) + "," +
           format_double(r.score.rho) + "," + std::to_string(rep.cohort_size) + "," +
           std::to_string(rep.singly_tokenized) + "," + std::to_string(rep.multiply_tokenized) + "," +
           std::to_string(rep.polar.positive.size()) + "," + std::to_string(seed) + "," + rep.dump_hash + "\n";
  }
  return out;
}

inline std::string format_bias_rows(const std::vector<BiasRow>& rows, SubwordRepr repr, std::uint64_t seed) {
  std::string out = std::string(kBiasHeader) + "\n";
  for (const auto& r : rows) {
    out += detail::csv_field(r.test) + "," + std::to_string(r.layer) + "," + std::to_string(r.k) + "," +
           format_double(r.result.effect_size) + "," + (r.result.p_value ? format_double(*r.result.p_value) : "") +
           "," + detail::csv_field(method_label(r.result)) + "," + std::to_string(r.n_targets) + "," +
           std::to_string(r.n_attributes) + "," + std::string(to_string(repr)) + "," + std::to_string(seed) + "," +
           r.dump_hash + "\n";
  }
  return out;
}

inline std::string format_wordsim_rows(const std::vector<WordSimRow>& rows) {
  std::string out = std::string(kWordSimHeader) + "\n";
  for (const auto& r : rows) {
    out += detail::csv_field(r.dataset) + "," + std::to_string(r.layer) + "," + std::string(to_string(r.repr)) + "," +
           std::to_string(r.k) + "," + format_double(r.spearman) + "," + std::to_string(r.pairs_used) + "," +
           std::to_string(r.pairs_skipped) + "," + r.dump_hash + "\n";
  }
  return out;
}

}  // namespace vast
