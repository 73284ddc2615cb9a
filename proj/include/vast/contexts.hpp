#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vast/error.hpp"
#include "vast/lexicon.hpp"
#include "vast/util.hpp"

namespace vast {

enum class Setting { Random, Bleached, Aligned, Misaligned };

inline constexpr Setting kAllSettings[] = {Setting::Random, Setting::Bleached, Setting::Aligned, Setting::Misaligned};

inline std::string_view to_string(Setting s) {
  switch (s) {
    case Setting::Random: return "random";
    case Setting::Bleached: return "bleached";
    case Setting::Aligned: return "aligned";
    case Setting::Misaligned: return "misaligned";
  }
  return "bleached";
}

inline Setting parse_setting(std::string_view s) {
  for (auto v : kAllSettings)
    if (to_string(v) == s) return v;
  throw Error(Errc::InvalidArgument, "unknown setting '" + std::string(s) + "'");
}

inline constexpr std::string_view kPlaceholder = "WORD";

inline std::size_t count_placeholders(std::string_view tmpl) {
  std::size_t n = 0;
  for (auto pos = tmpl.find(kPlaceholder); pos != std::string_view::npos;
       pos = tmpl.find(kPlaceholder, pos + kPlaceholder.size()))
    ++n;
  return n;
}

/// Rating-bucketed templates plus the bleached template.
/// Buckets are half-open [lo, hi) except the last, which is closed.
struct TemplateBank {
  struct Bucket {
    double lo;
    double hi;
    std::string text;
  };

  std::string id = "default_en";
  std::vector<Bucket> buckets;
  std::string bleached;

  Scale scale() const { return {buckets.front().lo, buckets.back().hi}; }
};

inline void validate(const TemplateBank& bank) {
  if (bank.buckets.empty()) throw Error(Errc::InvalidArgument, "template bank has no buckets");
  if (count_placeholders(bank.bleached) != 1) {
    throw Error(Errc::InvalidArgument, "bleached template needs exactly one " + std::string(kPlaceholder));
  }
  for (std::size_t i = 0; i < bank.buckets.size(); ++i) {
    const auto& b = bank.buckets[i];
    if (!(b.lo < b.hi)) throw Error(Errc::InvalidArgument, "bucket " + std::to_string(i) + " has lo >= hi");
    if (i + 1 < bank.buckets.size() && b.hi != bank.buckets[i + 1].lo) {
      throw Error(Errc::InvalidArgument, "buckets " + std::to_string(i) + " and " + std::to_string(i + 1) +
                                             " leave a gap or overlap");
    }
    if (count_placeholders(b.text) != 1) {
      throw Error(Errc::InvalidArgument, "bucket " + std::to_string(i) + " template needs exactly one " +
                                             std::string(kPlaceholder));
    }
  }
}

inline TemplateBank default_template_bank() {
  return TemplateBank{"default_en",
                      {{1.0, 2.5, "It is very unpleasant to think of WORD"},
                       {2.5, 4.0, "It is unpleasant to think of WORD"},
                       {4.0, 6.0, "It is neither pleasant nor unpleasant to think of WORD"},
                       {6.0, 7.5, "It is pleasant to think of WORD"},
                       {7.5, 9.0, "It is very pleasant to think of WORD"}},
                      "This is WORD"};
}

/// Bank file: "lo<TAB>hi<TAB>template" per bucket, "bleached<TAB>template",
/// optional "id<TAB>name"; '#' comment lines.
inline TemplateBank parse_template_bank(std::istream& in) {
  TemplateBank bank;
  bank.id = "custom";
  auto lines = read_lines(in);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty() || trim(lines[i]).front() == '#') continue;
    auto f = split_record(lines[i], '\t');
    const auto where = "bank line " + std::to_string(i + 1);
    if (f.size() == 2 && f[0] == "bleached") {
      bank.bleached = nfc(f[1]);
    } else if (f.size() == 2 && f[0] == "id") {
      bank.id = f[1];
    } else if (f.size() == 3) {
      auto lo = parse_double(f[0]);
      auto hi = parse_double(f[1]);
      if (!lo || !hi) throw Error(Errc::MalformedRecord, where + ": non-numeric bucket bound");
      bank.buckets.push_back({*lo, *hi, nfc(f[2])});
    } else {
      throw Error(Errc::MalformedRecord, where + ": expected 'lo\\thi\\ttemplate' or 'bleached\\ttemplate'");
    }
  }
  validate(bank);
  return bank;
}

inline std::string format_template_bank(const TemplateBank& bank) {
  std::string out = "id\t" + bank.id + "\nbleached\t" + bank.bleached + "\n";
  for (const auto& b : bank.buckets) out += format_double(b.lo) + "\t" + format_double(b.hi) + "\t" + b.text + "\n";
  return out;
}

inline std::size_t aligned_bucket(double rating, const TemplateBank& bank) {
  const auto& bs = bank.buckets;
  if (bs.empty() || rating < bs.front().lo || rating > bs.back().hi) {
    throw Error(Errc::RatingOutOfRange, "rating " + format_double(rating) + " outside the template bank scale");
  }
  for (std::size_t i = 0; i + 1 < bs.size(); ++i)
    if (rating < bs[i].hi) return i;
  return bs.size() - 1;
}

inline std::size_t misaligned_bucket(double rating, const TemplateBank& bank) {
  if (bank.buckets.size() % 2 == 0) {
    throw Error(Errc::EvenBucketCount, "misalignment needs an odd bucket count, bank has " +
                                           std::to_string(bank.buckets.size()));
  }
  return bank.buckets.size() - 1 - aligned_bucket(rating, bank);
}

inline const std::string& aligned_template_for(double rating, const TemplateBank& bank) {
  return bank.buckets[aligned_bucket(rating, bank)].text;
}

inline const std::string& misaligned_template_for(double rating, const TemplateBank& bank) {
  return bank.buckets[misaligned_bucket(rating, bank)].text;
}

/// A word placed in a context. The span counts Unicode code points.
struct ContextAssignment {
  std::string word;
  Setting setting = Setting::Bleached;
  std::string context;
  std::size_t span_start = 0;
  std::size_t span_end = 0;

  std::string span_text() const {
    const auto b = byte_offset_of(context, span_start);
    const auto e = byte_offset_of(context, span_end);
    return context.substr(b, e - b);
  }
};

inline ContextAssignment fill_template(std::string_view tmpl, const std::string& word, Setting setting) {
  if (word.empty()) throw Error(Errc::InvalidArgument, "empty word");
  if (count_placeholders(tmpl) != 1) {
    throw Error(Errc::InvalidArgument, "template needs exactly one " + std::string(kPlaceholder));
  }
  const auto pos = tmpl.find(kPlaceholder);
  ContextAssignment a;
  a.word = word;
  a.setting = setting;
  a.context.append(tmpl.substr(0, pos)).append(word).append(tmpl.substr(pos + kPlaceholder.size()));
  a.span_start = code_point_count(tmpl.substr(0, pos));
  a.span_end = a.span_start + code_point_count(word);
  return a;
}

inline ContextAssignment bleached_context(const std::string& word, const TemplateBank& bank = default_template_bank()) {
  return fill_template(bank.bleached, word, Setting::Bleached);
}

// ---------------------------------------------------------------------------
// Random corpus contexts

/// Byte offset of the first whole-token occurrence of word in sentence.
/// Token boundaries are non-letter code points or the string ends; matching is case-sensitive.
inline std::optional<std::size_t> find_whole_token(std::string_view sentence, std::string_view word) {
  if (word.empty()) return std::nullopt;
  for (auto pos = sentence.find(word); pos != std::string_view::npos; pos = sentence.find(word, pos + 1)) {
    const auto end = pos + word.size();
    const bool left_ok = pos == 0 || !is_letter(prev_code_point(sentence, pos));
    std::size_t after = end;
    const bool right_ok = end == sentence.size() || !is_letter(next_code_point(sentence, after));
    if (left_ok && right_ok) return pos;
  }
  return std::nullopt;
}

/// Keeps a window of at most max_tokens whitespace tokens around the byte range
/// [start, end). Returns the window and the range's new byte offset.
inline std::pair<std::string, std::size_t> truncate_around(std::string_view sentence, std::size_t start,
                                                           std::size_t end, std::size_t max_tokens) {
  struct Tok {
    std::size_t b, e;
  };
  std::vector<Tok> toks;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  for (std::size_t i = 0; i < sentence.size();) {
    while (i < sentence.size() && is_space(sentence[i])) ++i;
    if (i == sentence.size()) break;
    const auto b = i;
    while (i < sentence.size() && !is_space(sentence[i])) ++i;
    toks.push_back({b, i});
  }
  if (max_tokens == 0 || toks.size() <= max_tokens) return {std::string(sentence), start};

  std::size_t first = 0;
  while (first + 1 < toks.size() && toks[first].e <= start) ++first;
  std::size_t last = first;
  while (last + 1 < toks.size() && toks[last].e < end) ++last;

  std::size_t lo = first;
  std::size_t hi = last + 1;  // exclusive
  if (hi - lo < max_tokens) {
    const std::size_t mid = (first + last) / 2;
    const std::size_t half = max_tokens / 2;
    lo = mid > half ? mid - half : 0;
    lo = std::min(lo, toks.size() - max_tokens);
    lo = std::min(lo, first);
    hi = lo + max_tokens;
    if (hi < last + 1) {
      hi = last + 1;
      lo = hi - max_tokens;
    }
  }
  const auto b = toks[lo].b;
  const auto e = toks[hi - 1].e;
  return {std::string(sentence.substr(b, e - b)), start - b};
}

namespace detail {

inline ContextAssignment corpus_assignment(const std::string& word, std::string_view sentence, std::size_t byte_pos,
                                           std::size_t max_tokens) {
  auto [ctx, pos] = truncate_around(sentence, byte_pos, byte_pos + word.size(), max_tokens);
  ContextAssignment a;
  a.word = word;
  a.setting = Setting::Random;
  a.span_start = code_point_count(std::string_view(ctx).substr(0, pos));
  a.span_end = a.span_start + code_point_count(word);
  a.context = std::move(ctx);
  return a;
}

// Leading run of letters; words are indexed by it for single-pass batch matching.
inline std::string_view leading_letters(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = pos;
    if (!is_letter(next_code_point(s, next))) break;
    pos = next;
  }
  return s.substr(0, pos);
}

}  // namespace detail

/// Reservoir-samples one corpus sentence containing each word, in one pass over
/// the corpus. Every word draws from its own stream seeded by (seed, word), so
/// the result for a word does not depend on which other words are sampled.
class RandomContextSampler {
 public:
  RandomContextSampler(const std::vector<std::string>& words, std::uint64_t seed, std::size_t max_tokens = 64)
      : max_tokens_(max_tokens) {
    for (const auto& w : words) {
      if (w.empty()) throw Error(Errc::InvalidArgument, "empty word");
      if (states_.count(w)) continue;
      states_.emplace(w, State{make_rng(seed, w), 0, {}, 0});
      by_head_[std::string(detail::leading_letters(w))].push_back(w);
    }
  }

  void consume(std::string_view sentence) {
    // Candidate words keyed by the letter run at each token start.
    std::vector<const std::string*> seen;
    auto offer = [&](const std::string& w) {
      for (auto* s : seen)
        if (s == &w) return;
      seen.push_back(&w);
      auto pos = find_whole_token(sentence, w);
      if (!pos) return;
      auto& st = states_.at(w);
      ++st.count;
      if (uniform_index(st.rng, st.count) == 0) {
        st.sentence = std::string(sentence);
        st.pos = *pos;
      }
    };
    if (auto it = by_head_.find(""); it != by_head_.end()) {
      for (const auto& w : it->second) offer(w);
    }
    std::size_t pos = 0;
    bool prev_letter = false;
    while (pos < sentence.size()) {
      const auto start = pos;
      const bool letter = is_letter(next_code_point(sentence, pos));
      if (letter && !prev_letter) {
        auto run = detail::leading_letters(sentence.substr(start));
        if (auto it = by_head_.find(std::string(run)); it != by_head_.end()) {
          for (const auto& w : it->second) offer(w);
        }
      }
      prev_letter = letter;
    }
  }

  void consume(std::istream& corpus) {
    std::string line;
    while (std::getline(corpus, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      consume(std::string_view(line));
    }
  }

  std::size_t occurrences(const std::string& word) const { return states_.at(word).count; }

  ContextAssignment result(const std::string& word) const {
    const auto& st = states_.at(word);
    if (st.count == 0) throw Error(Errc::WordNotFoundInCorpus, "'" + word + "' occurs in no corpus sentence");
    return detail::corpus_assignment(word, st.sentence, st.pos, max_tokens_);
  }

 private:
  struct State {
    Rng rng;
    std::size_t count;
    std::string sentence;
    std::size_t pos;
  };

  std::size_t max_tokens_;
  std::unordered_map<std::string, State> states_;
  std::unordered_map<std::string, std::vector<std::string>> by_head_;
};

inline ContextAssignment assign_random_context(const std::string& word, std::istream& corpus, std::uint64_t seed,
                                               std::size_t max_tokens = 64) {
  RandomContextSampler sampler({word}, seed, max_tokens);
  sampler.consume(corpus);
  return sampler.result(word);
}

// ---------------------------------------------------------------------------
// Extraction jobs

struct JobAssignment {
  std::string word;
  std::string role;  // target | positive | negative | extra
  std::optional<double> rating;
  std::string context;
  std::size_t span_start = 0;
  std::size_t span_end = 0;

  bool operator==(const JobAssignment&) const = default;
};

struct PolarSubJob {
  Setting setting = Setting::Aligned;
  std::vector<JobAssignment> assignments;

  bool operator==(const PolarSubJob&) const = default;
};

/// Model-agnostic description of every (word, context) pair to embed.
struct JobSpec {
  int format_version = 1;
  Setting setting = Setting::Bleached;
  std::uint64_t seed = 0;
  std::string lexicon_id;
  std::string polar_id;
  std::string bank_id;
  std::size_t max_tokens = 64;
  std::vector<JobAssignment> assignments;
  std::optional<PolarSubJob> aligned_polar_job;  // misaligned setting only

  bool operator==(const JobSpec&) const = default;
};

struct JobInputs {
  const ValenceLexicon* lexicon = nullptr;
  const PolarSet* polar = nullptr;
  std::vector<std::string> extra_words;
  Setting setting = Setting::Bleached;
  TemplateBank bank = default_template_bank();
  std::istream* corpus = nullptr;
  std::uint64_t seed = 0;
  std::size_t max_tokens = 64;
};

namespace detail {

inline JobAssignment to_job(const ContextAssignment& a, std::string role, std::optional<double> rating) {
  return {a.word, std::move(role), rating, a.context, a.span_start, a.span_end};
}

// Words sharing a job must share a context; the extractor embeds each word once.
inline void check_consistent(const std::vector<JobAssignment>& as) {
  std::unordered_map<std::string, const JobAssignment*> first;
  for (const auto& a : as) {
    auto [it, fresh] = first.emplace(a.word, &a);
    if (!fresh && (it->second->context != a.context || it->second->span_start != a.span_start)) {
      throw Error(Errc::InvariantViolation, "word '" + a.word + "' assigned two different contexts");
    }
  }
}

}  // namespace detail

/// Polar words are placed in aligned contexts by their lexicon rating when
/// rated, else by their group: positive at the top of the bank scale, negative
/// at the bottom.
inline double polar_alignment_rating(const std::string& word, bool positive, const ValenceLexicon* lex,
                                     const TemplateBank& bank) {
  if (lex) {
    if (auto r = lex->rating(word)) return rescale_rating(*r, lex->scale(), bank.scale());
  }
  return positive ? bank.scale().max : bank.scale().min;
}

inline JobSpec build_extraction_job(const JobInputs& in) {
  validate(in.bank);
  if (in.setting == Setting::Random && !in.corpus) {
    throw Error(Errc::InvalidArgument, "the random setting requires a corpus");
  }
  const bool rated = in.setting == Setting::Aligned || in.setting == Setting::Misaligned;
  if (rated && !in.extra_words.empty()) {
    throw Error(Errc::InvalidArgument, "extra (unrated) words cannot be placed in rating-bucketed contexts");
  }
  if (rated && !in.lexicon) throw Error(Errc::InvalidArgument, "aligned and misaligned settings need a lexicon");
  if (in.polar) validate(*in.polar);

  JobSpec job;
  job.setting = in.setting;
  job.seed = in.seed;
  job.lexicon_id = in.lexicon ? in.lexicon->name() : "";
  job.polar_id = in.polar ? in.polar->label : "";
  job.bank_id = in.bank.id;
  job.max_tokens = in.max_tokens;

  struct Item {
    std::string word;
    std::string role;
    std::optional<double> rating;
  };
  std::vector<Item> targets;
  std::vector<Item> polar;
  if (in.lexicon) {
    for (const auto& e : in.lexicon->entries()) targets.push_back({e.word, "target", e.rating});
  }
  if (in.polar) {
    for (const auto& w : in.polar->positive) {
      polar.push_back({w, "positive", in.lexicon ? in.lexicon->rating(w) : std::nullopt});
    }
    for (const auto& w : in.polar->negative) {
      polar.push_back({w, "negative", in.lexicon ? in.lexicon->rating(w) : std::nullopt});
    }
  }
  std::vector<Item> extras;
  for (const auto& w : in.extra_words) extras.push_back({nfc(w), "extra", std::nullopt});

  auto aligned_polar = [&](const Item& it) {
    const double r = polar_alignment_rating(it.word, it.role == "positive", in.lexicon, in.bank);
    return detail::to_job(fill_template(aligned_template_for(r, in.bank), it.word, Setting::Aligned), it.role,
                          it.rating);
  };
  auto target_rating = [&](const Item& it) { return rescale_rating(*it.rating, in.lexicon->scale(), in.bank.scale()); };

  switch (in.setting) {
    case Setting::Bleached:
      for (const auto* group : {&targets, &polar, &extras})
        for (const auto& it : *group)
          job.assignments.push_back(detail::to_job(bleached_context(it.word, in.bank), it.role, it.rating));
      break;
    case Setting::Aligned:
      for (const auto& it : targets) {
        job.assignments.push_back(detail::to_job(
            fill_template(aligned_template_for(target_rating(it), in.bank), it.word, Setting::Aligned), it.role,
            it.rating));
      }
      for (const auto& it : polar) job.assignments.push_back(aligned_polar(it));
      break;
    case Setting::Misaligned: {
      for (const auto& it : targets) {
        job.assignments.push_back(detail::to_job(
            fill_template(misaligned_template_for(target_rating(it), in.bank), it.word, Setting::Misaligned),
            it.role, it.rating));
      }
      PolarSubJob sub;
      for (const auto& it : polar) sub.assignments.push_back(aligned_polar(it));
      job.aligned_polar_job = std::move(sub);
      break;
    }
    case Setting::Random: {
      std::vector<std::string> words;
      for (const auto* group : {&targets, &polar, &extras})
        for (const auto& it : *group) words.push_back(it.word);
      RandomContextSampler sampler(words, in.seed, in.max_tokens);
      sampler.consume(*in.corpus);
      for (const auto* group : {&targets, &polar, &extras})
        for (const auto& it : *group) job.assignments.push_back(detail::to_job(sampler.result(it.word), it.role, it.rating));
      break;
    }
  }
  detail::check_consistent(job.assignments);
  if (job.aligned_polar_job) detail::check_consistent(job.aligned_polar_job->assignments);
  return job;
}

inline std::size_t unique_word_count(const std::vector<JobAssignment>& as) {
  std::unordered_map<std::string, int> seen;
  for (const auto& a : as) seen[a.word];
  return seen.size();
}

// ---------------------------------------------------------------------------
// JobSpec serialization

inline nlohmann::ordered_json to_json(const JobAssignment& a) {
  nlohmann::ordered_json j;
  j["word"] = a.word;
  j["role"] = a.role;
  j["rating"] = a.rating ? nlohmann::ordered_json(*a.rating) : nlohmann::ordered_json(nullptr);
  j["context"] = a.context;
  j["span"] = {a.span_start, a.span_end};
  return j;
}

inline nlohmann::ordered_json to_json(const JobSpec& job) {
  nlohmann::ordered_json j;
  j["format"] = "vast-jobspec";
  j["format_version"] = job.format_version;
  j["setting"] = std::string(to_string(job.setting));
  j["seed"] = job.seed;
  j["lexicon_id"] = job.lexicon_id;
  j["polar_id"] = job.polar_id;
  j["bank_id"] = job.bank_id;
  j["max_tokens"] = job.max_tokens;
  j["span_units"] = "code_points";
  j["assignments"] = nlohmann::ordered_json::array();
  for (const auto& a : job.assignments) j["assignments"].push_back(to_json(a));
  if (job.aligned_polar_job) {
    nlohmann::ordered_json sub;
    sub["setting"] = std::string(to_string(job.aligned_polar_job->setting));
    sub["assignments"] = nlohmann::ordered_json::array();
    for (const auto& a : job.aligned_polar_job->assignments) sub["assignments"].push_back(to_json(a));
    j["aligned_polar_job"] = std::move(sub);
  } else {
    j["aligned_polar_job"] = nullptr;
  }
  return j;
}

inline std::string format_job(const JobSpec& job) { return to_json(job).dump(2) + "\n"; }

namespace detail {

inline std::vector<JobAssignment> parse_assignments(const nlohmann::json& arr) {
  std::vector<JobAssignment> out;
  for (const auto& a : arr) {
    JobAssignment x;
    x.word = a.at("word").get<std::string>();
    x.role = a.at("role").get<std::string>();
    if (!a.at("rating").is_null()) x.rating = a.at("rating").get<double>();
    x.context = a.at("context").get<std::string>();
    x.span_start = a.at("span").at(0).get<std::size_t>();
    x.span_end = a.at("span").at(1).get<std::size_t>();
    ContextAssignment check{x.word, Setting::Bleached, x.context, x.span_start, x.span_end};
    if (x.span_start > x.span_end || x.span_end > code_point_count(x.context) || check.span_text() != x.word) {
      throw Error(Errc::InvariantViolation, "span of '" + x.word + "' does not cover the word");
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace detail

inline JobSpec parse_job(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "vast-jobspec") {
      throw Error(Errc::MalformedRecord, "not a vast-jobspec document");
    }
    JobSpec job;
    job.format_version = j.at("format_version").get<int>();
    if (job.format_version != 1) {
      throw Error(Errc::UnsupportedVersion, "jobspec version " + std::to_string(job.format_version));
    }
    job.setting = parse_setting(j.at("setting").get<std::string>());
    job.seed = j.at("seed").get<std::uint64_t>();
    job.lexicon_id = j.at("lexicon_id").get<std::string>();
    job.polar_id = j.at("polar_id").get<std::string>();
    job.bank_id = j.at("bank_id").get<std::string>();
    job.max_tokens = j.at("max_tokens").get<std::size_t>();
    job.assignments = detail::parse_assignments(j.at("assignments"));
    if (j.contains("aligned_polar_job") && !j.at("aligned_polar_job").is_null()) {
      const auto& sub = j.at("aligned_polar_job");
      job.aligned_polar_job = PolarSubJob{parse_setting(sub.at("setting").get<std::string>()),
                                          detail::parse_assignments(sub.at("assignments"))};
    }
    return job;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedRecord, std::string("jobspec: ") + e.what());
  }
}

}  // namespace vast
