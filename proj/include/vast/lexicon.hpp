#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "vast/error.hpp"
#include "vast/util.hpp"

namespace vast {

enum class AffectDimension { Valence, Dominance, Arousal };

inline std::string_view to_string(AffectDimension d) {
  switch (d) {
    case AffectDimension::Valence: return "valence";
    case AffectDimension::Dominance: return "dominance";
    case AffectDimension::Arousal: return "arousal";
  }
  return "valence";
}

inline AffectDimension parse_dimension(std::string_view s) {
  if (s == "valence") return AffectDimension::Valence;
  if (s == "dominance") return AffectDimension::Dominance;
  if (s == "arousal") return AffectDimension::Arousal;
  throw Error(Errc::InvalidArgument, "unknown affect dimension '" + std::string(s) + "'");
}

struct Scale {
  double min = 1.0;
  double max = 9.0;

  bool contains(double r) const { return r >= min && r <= max; }
};

inline void check_scale(const Scale& s) {
  if (!(s.min < s.max)) {
    throw Error(Errc::InvalidArgument, "scale requires min < max, got (" + format_double(s.min) + ", " +
                                           format_double(s.max) + ")");
  }
}

/// Linear map of a rating between two closed scales.
inline double rescale_rating(double r, const Scale& from, const Scale& to) {
  check_scale(from);
  check_scale(to);
  if (!from.contains(r)) {
    throw Error(Errc::RatingOutOfRange, format_double(r) + " outside [" + format_double(from.min) + ", " +
                                            format_double(from.max) + "]");
  }
  return to.min + (r - from.min) * (to.max - to.min) / (from.max - from.min);
}

/// Word ratings on one affect dimension, in file order.
class ValenceLexicon {
 public:
  struct Entry {
    std::string word;
    double rating;
  };

  ValenceLexicon(std::string name, AffectDimension dim, Scale scale, std::vector<Entry> entries)
      : name_(std::move(name)), dim_(dim), scale_(scale), entries_(std::move(entries)) {
    check_scale(scale_);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (e.word.empty()) throw Error(Errc::MalformedRecord, "empty word at entry " + std::to_string(i));
      if (!scale_.contains(e.rating)) {
        throw Error(Errc::RatingOutOfRange, "'" + e.word + "' rated " + format_double(e.rating));
      }
      if (!index_.emplace(e.word, i).second) throw Error(Errc::DuplicateWord, "'" + e.word + "'");
    }
  }

  const std::string& name() const { return name_; }
  AffectDimension dimension() const { return dim_; }
  const Scale& scale() const { return scale_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool contains(std::string_view w) const { return index_.count(std::string(w)) != 0; }

  std::optional<double> rating(std::string_view w) const {
    auto it = index_.find(std::string(w));
    if (it == index_.end()) return std::nullopt;
    return entries_[it->second].rating;
  }

  std::vector<std::string> words() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.word);
    return out;
  }

  /// Copy restricted to the given words, keeping this lexicon's order.
  ValenceLexicon subset(const std::vector<std::string>& keep) const {
    std::unordered_set<std::string> k(keep.begin(), keep.end());
    std::vector<Entry> out;
    for (const auto& e : entries_)
      if (k.count(e.word)) out.push_back(e);
    return ValenceLexicon(name_, dim_, scale_, std::move(out));
  }

  ValenceLexicon without(const std::vector<std::string>& drop) const {
    std::unordered_set<std::string> d(drop.begin(), drop.end());
    std::vector<Entry> out;
    for (const auto& e : entries_)
      if (!d.count(e.word)) out.push_back(e);
    return ValenceLexicon(name_, dim_, scale_, std::move(out));
  }

 private:
  std::string name_;
  AffectDimension dim_;
  Scale scale_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct LexiconSchema {
  std::string word_column = "word";
  std::string rating_column = "rating";
  char delimiter = ',';
};

namespace detail {

struct Table {
  std::vector<std::string> header;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line number, fields)
};

inline Table read_table(std::istream& in, char delim) {
  Table t;
  auto lines = read_lines(in);
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw Error(Errc::MalformedRecord, "missing header row");
  t.header = split_record(lines[i], delim);
  for (auto& h : t.header) h = std::string(trim(h));
  for (++i; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto fields = split_record(lines[i], delim);
    if (fields.size() != t.header.size()) {
      throw Error(Errc::MalformedRecord, "line " + std::to_string(i + 1) + ": expected " +
                                             std::to_string(t.header.size()) + " fields, got " +
                                             std::to_string(fields.size()));
    }
    t.rows.emplace_back(i + 1, std::move(fields));
  }
  return t;
}

inline std::size_t column_index(const Table& t, std::string_view name) {
  auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end()) throw Error(Errc::MalformedRecord, "no column named '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - t.header.begin());
}

inline double numeric_field(const std::string& field, std::size_t line) {
  auto v = parse_double(field);
  if (!v) {
    throw Error(Errc::MalformedRecord, "line " + std::to_string(line) + ": non-numeric value '" + field + "'");
  }
  return *v;
}

}  // namespace detail

/// Parses a header-led, delimiter-separated lexicon. Words are NFC-normalized.
inline ValenceLexicon parse_lexicon(std::istream& in, const LexiconSchema& schema, Scale scale,
                                    AffectDimension dim = AffectDimension::Valence, std::string name = "lexicon") {
  check_scale(scale);
  auto table = detail::read_table(in, schema.delimiter);
  const auto wc = detail::column_index(table, schema.word_column);
  const auto rc = detail::column_index(table, schema.rating_column);
  if (table.rows.empty()) throw Error(Errc::MalformedRecord, "empty lexicon: no records after the header");

  std::vector<ValenceLexicon::Entry> entries;
  entries.reserve(table.rows.size());
  for (const auto& [line, fields] : table.rows) {
    std::string word = nfc(trim(fields[wc]));
    if (word.empty()) throw Error(Errc::MalformedRecord, "line " + std::to_string(line) + ": empty word");
    const double r = detail::numeric_field(fields[rc], line);
    if (!scale.contains(r)) {
      throw Error(Errc::RatingOutOfRange, "line " + std::to_string(line) + ": '" + word + "' rated " +
                                              format_double(r));
    }
    entries.push_back({std::move(word), r});
  }
  return ValenceLexicon(std::move(name), dim, scale, std::move(entries));
}

// ---------------------------------------------------------------------------

/// Two disjoint attribute groups.
struct PolarSet {
  std::string label;
  std::vector<std::string> positive;
  std::vector<std::string> negative;

  std::vector<std::string> all_words() const {
    std::vector<std::string> out = positive;
    out.insert(out.end(), negative.begin(), negative.end());
    return out;
  }

  bool operator==(const PolarSet&) const = default;
};

inline void validate(const PolarSet& p) {
  if (p.positive.empty() || p.negative.empty()) {
    throw Error(Errc::EmptyPolarGroup, "polar set '" + p.label + "' has an empty group");
  }
  std::unordered_set<std::string> pos;
  for (const auto& w : p.positive) {
    if (!pos.insert(w).second) throw Error(Errc::DuplicateWord, "'" + w + "' repeated in positive group");
  }
  std::unordered_set<std::string> neg;
  for (const auto& w : p.negative) {
    if (pos.count(w)) throw Error(Errc::InvariantViolation, "'" + w + "' appears in both polar groups");
    if (!neg.insert(w).second) throw Error(Errc::DuplicateWord, "'" + w + "' repeated in negative group");
  }
}

// The WEAT pleasant/unpleasant attribute lists.
inline PolarSet weat_valence_polar() {
  return PolarSet{
      "weat_valence",
      {"caress", "freedom", "health", "love", "peace", "cheer", "friend", "heaven", "loyal",
       "pleasure", "diamond", "gentle", "honest", "lucky", "rainbow", "diploma", "gift", "honor",
       "miracle", "sunrise", "family", "happy", "laughter", "paradise", "vacation"},
      {"abuse", "crash", "filth", "murder", "sickness", "accident", "death", "grief", "poison",
       "stink", "assault", "disaster", "hatred", "pollute", "tragedy", "divorce", "jail", "poverty",
       "ugly", "cancer", "kill", "rotten", "vomit", "agony", "prison"}};
}

/// Polar file: one word per line, "positive<TAB>word" or "negative<TAB>word";
/// an optional "label<TAB>name" line; '#' starts a comment line.
inline PolarSet parse_polar_set(std::istream& in, std::string label = "polar") {
  PolarSet p;
  p.label = std::move(label);
  auto lines = read_lines(in);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto sep = line.find('\t');
    if (sep == std::string_view::npos) sep = line.find(' ');
    if (sep == std::string_view::npos) {
      throw Error(Errc::MalformedRecord, "polar line " + std::to_string(i + 1) + ": expected '<group>\\t<word>'");
    }
    const auto group = line.substr(0, sep);
    std::string word = nfc(trim(line.substr(sep + 1)));
    if (word.empty()) throw Error(Errc::MalformedRecord, "polar line " + std::to_string(i + 1) + ": empty word");
    if (group == "positive") {
      p.positive.push_back(std::move(word));
    } else if (group == "negative") {
      p.negative.push_back(std::move(word));
    } else if (group == "label") {
      p.label = std::move(word);
    } else {
      throw Error(Errc::MalformedRecord, "polar line " + std::to_string(i + 1) + ": unknown group '" +
                                             std::string(group) + "'");
    }
  }
  validate(p);
  return p;
}

inline std::string format_polar_set(const PolarSet& p) {
  std::string out = "label\t" + p.label + "\n";
  for (const auto& w : p.positive) out += "positive\t" + w + "\n";
  for (const auto& w : p.negative) out += "negative\t" + w + "\n";
  return out;
}

/// Drops multiply tokenized words from both groups, then removes seeded
/// uniform picks from the larger group until the sizes match.
inline PolarSet balance_polar_set(const PolarSet& p, const std::unordered_map<std::string, int>& subtoken_count,
                                  std::uint64_t seed) {
  auto singles = [&](const std::vector<std::string>& group) {
    std::vector<std::string> out;
    for (const auto& w : group) {
      auto it = subtoken_count.find(w);
      if (it == subtoken_count.end()) throw Error(Errc::MissingWord, "no subtoken count for polar word '" + w + "'");
      if (it->second < 1) throw Error(Errc::InvalidArgument, "subtoken count for '" + w + "' must be positive");
      if (it->second == 1) out.push_back(w);
    }
    return out;
  };
  PolarSet out{p.label, singles(p.positive), singles(p.negative)};
  if (out.positive.empty() || out.negative.empty()) {
    throw Error(Errc::EmptyPolarGroup, "polar set '" + p.label + "' has no singly tokenized words in a group");
  }
  auto rng = make_rng(seed);
  auto& larger = out.positive.size() > out.negative.size() ? out.positive : out.negative;
  const std::size_t target = std::min(out.positive.size(), out.negative.size());
  while (larger.size() > target) {
    larger.erase(larger.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, larger.size())));
  }
  return out;
}

/// Greedy extreme-rating selection: n highest as positive, n lowest as negative.
/// Ties at equal rating go to the lexicographically smaller word.
inline PolarSet select_extreme_polar(const ValenceLexicon& lex, std::size_t n,
                                     const std::function<bool(const std::string&)>& filter = {}) {
  std::vector<const ValenceLexicon::Entry*> pool;
  for (const auto& e : lex.entries())
    if (!filter || filter(e.word)) pool.push_back(&e);
  if (n == 0 || pool.size() < 2 * n) {
    throw Error(Errc::InsufficientWords, "need " + std::to_string(2 * n) + " eligible words (n > 0), have " +
                                             std::to_string(pool.size()));
  }
  auto high = pool;
  std::sort(high.begin(), high.end(), [](auto* a, auto* b) {
    return a->rating != b->rating ? a->rating > b->rating : a->word < b->word;
  });
  PolarSet out;
  out.label = lex.name() + "_" + std::string(to_string(lex.dimension())) + "_extreme" + std::to_string(n);
  std::unordered_set<std::string> taken;
  for (std::size_t i = 0; i < n; ++i) {
    out.positive.push_back(high[i]->word);
    taken.insert(high[i]->word);
  }
  auto low = pool;
  std::sort(low.begin(), low.end(), [](auto* a, auto* b) {
    return a->rating != b->rating ? a->rating < b->rating : a->word < b->word;
  });
  for (const auto* e : low) {
    if (out.negative.size() == n) break;
    if (!taken.count(e->word)) out.negative.push_back(e->word);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct WordPair {
  std::string first;
  std::string second;
  double score;
};

struct WordPairDataset {
  std::string name;
  Scale scale;
  std::vector<WordPair> pairs;
};

struct PairSchema {
  std::string first_column = "word1";
  std::string second_column = "word2";
  std::string score_column = "score";
  char delimiter = ',';
};

inline WordPairDataset parse_pair_dataset(std::istream& in, const PairSchema& schema, Scale scale,
                                          std::string name = "pairs") {
  check_scale(scale);
  auto table = detail::read_table(in, schema.delimiter);
  const auto c1 = detail::column_index(table, schema.first_column);
  const auto c2 = detail::column_index(table, schema.second_column);
  const auto cs = detail::column_index(table, schema.score_column);
  if (table.rows.empty()) throw Error(Errc::MalformedRecord, "empty pair dataset: no records after the header");

  WordPairDataset ds{std::move(name), scale, {}};
  for (const auto& [line, fields] : table.rows) {
    WordPair p{nfc(trim(fields[c1])), nfc(trim(fields[c2])), detail::numeric_field(fields[cs], line)};
    if (p.first.empty() || p.second.empty()) {
      throw Error(Errc::MalformedRecord, "line " + std::to_string(line) + ": empty word");
    }
    if (!scale.contains(p.score)) {
      throw Error(Errc::RatingOutOfRange, "line " + std::to_string(line) + ": score " + format_double(p.score));
    }
    ds.pairs.push_back(std::move(p));
  }
  return ds;
}

}  // namespace vast
