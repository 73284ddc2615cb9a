#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "vast/contexts.hpp"
#include "vast/error.hpp"
#include "vast/lexicon.hpp"
#include "vast/util.hpp"

namespace vast {

enum class SubwordRepr { First, Last, Mean, Max };

inline constexpr SubwordRepr kAllReprs[] = {SubwordRepr::First, SubwordRepr::Last, SubwordRepr::Mean,
                                            SubwordRepr::Max};

inline std::string_view to_string(SubwordRepr r) {
  switch (r) {
    case SubwordRepr::First: return "first";
    case SubwordRepr::Last: return "last";
    case SubwordRepr::Mean: return "mean";
    case SubwordRepr::Max: return "max";
  }
  return "last";
}

inline SubwordRepr parse_repr(std::string_view s) {
  for (auto r : kAllReprs)
    if (to_string(r) == s) return r;
  throw Error(Errc::InvalidArgument, "unknown subword representation '" + std::string(s) + "'");
}

inline constexpr std::string_view kManifestFile = "manifest.json";
inline constexpr std::string_view kTensorFile = "embeddings.bin";

struct WordRecord {
  std::string text;
  std::optional<double> rating;
  int subtoken_count = 1;
  std::uint64_t byte_offset = 0;

  bool operator==(const WordRecord&) const = default;
};

struct DumpManifest {
  int format_version = 1;
  std::string model_id;
  int num_layers = 1;  // hidden-state snapshots; index 0 is the embedding output
  int hidden_dim = 1;
  Setting setting = Setting::Bleached;
  std::uint64_t seed = 0;
  std::vector<WordRecord> words;

  std::uint64_t record_floats(const WordRecord& w) const {
    return static_cast<std::uint64_t>(w.subtoken_count) * static_cast<std::uint64_t>(num_layers) *
           static_cast<std::uint64_t>(hidden_dim);
  }

  bool operator==(const DumpManifest&) const = default;
};

/// Fills byte_offset for every record from the declared subtoken counts.
inline void assign_offsets(DumpManifest& m) {
  std::uint64_t off = 0;
  for (auto& w : m.words) {
    w.byte_offset = off;
    off += m.record_floats(w) * sizeof(float);
  }
}

inline nlohmann::ordered_json to_json(const DumpManifest& m) {
  nlohmann::ordered_json j;
  j["format"] = "vast-dump";
  j["format_version"] = m.format_version;
  j["model_id"] = m.model_id;
  j["num_layers"] = m.num_layers;
  j["hidden_dim"] = m.hidden_dim;
  j["setting"] = std::string(to_string(m.setting));
  j["seed"] = m.seed;
  j["dtype"] = "float32le";
  j["layout"] = "layer,subtoken,dim";
  j["words"] = nlohmann::ordered_json::array();
  for (const auto& w : m.words) {
    nlohmann::ordered_json r;
    r["text"] = w.text;
    r["rating"] = w.rating ? nlohmann::ordered_json(*w.rating) : nlohmann::ordered_json(nullptr);
    r["subtoken_count"] = w.subtoken_count;
    r["byte_offset"] = w.byte_offset;
    j["words"].push_back(std::move(r));
  }
  return j;
}

inline std::string format_manifest(const DumpManifest& m) { return to_json(m).dump(2) + "\n"; }

inline DumpManifest parse_manifest(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", std::string("vast-dump")) != "vast-dump") {
      throw Error(Errc::MalformedRecord, "not a vast-dump manifest");
    }
    DumpManifest m;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != 1) throw Error(Errc::UnsupportedVersion, "dump version " + std::to_string(m.format_version));
    if (j.contains("dtype") && j.at("dtype") != "float32le") throw Error(Errc::UnsupportedVersion, "dtype must be float32le");
    if (j.contains("layout") && j.at("layout") != "layer,subtoken,dim") {
      throw Error(Errc::UnsupportedVersion, "layout must be layer,subtoken,dim");
    }
    m.model_id = j.at("model_id").get<std::string>();
    m.num_layers = j.at("num_layers").get<int>();
    m.hidden_dim = j.at("hidden_dim").get<int>();
    m.setting = parse_setting(j.at("setting").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& r : j.at("words")) {
      WordRecord w;
      w.text = r.at("text").get<std::string>();
      if (r.contains("rating") && !r.at("rating").is_null()) w.rating = r.at("rating").get<double>();
      w.subtoken_count = r.at("subtoken_count").get<int>();
      w.byte_offset = r.at("byte_offset").get<std::uint64_t>();
      m.words.push_back(std::move(w));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedRecord, std::string("manifest: ") + e.what());
  }
}

/// Validated, immutable manifest + float32 tensor blob.
class EmbeddingDump {
 public:
  EmbeddingDump(DumpManifest manifest, std::vector<float> blob)
      : manifest_(std::move(manifest)), blob_(std::move(blob)) {
    validate();
    const std::string canon = format_manifest(manifest_);
    hash_ = fnv1a(canon);
    hash_ = fnv1a(std::string_view(reinterpret_cast<const char*>(blob_.data()), blob_.size() * sizeof(float)), hash_);
  }

  const DumpManifest& manifest() const { return manifest_; }
  std::span<const float> blob() const { return blob_; }
  int num_layers() const { return manifest_.num_layers; }
  int hidden_dim() const { return manifest_.hidden_dim; }
  Setting setting() const { return manifest_.setting; }
  std::size_t size() const { return manifest_.words.size(); }
  std::uint64_t content_hash() const { return hash_; }

  std::optional<std::size_t> find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(std::string_view word) const { return index_.count(std::string(word)) != 0; }

  const WordRecord& record(std::size_t i) const { return manifest_.words[i]; }

  /// One subtoken's hidden state at one layer.
  std::span<const float> subtoken(std::size_t word_index, int layer, int sub) const {
    const auto& w = manifest_.words[word_index];
    const auto d = static_cast<std::size_t>(manifest_.hidden_dim);
    const auto base = w.byte_offset / sizeof(float) +
                      (static_cast<std::size_t>(layer) * static_cast<std::size_t>(w.subtoken_count) +
                       static_cast<std::size_t>(sub)) * d;
    return std::span<const float>(blob_).subspan(base, d);
  }

  std::unordered_map<std::string, int> subtoken_counts() const {
    std::unordered_map<std::string, int> out;
    for (const auto& w : manifest_.words) out.emplace(w.text, w.subtoken_count);
    return out;
  }

 private:
  void validate() {
    const auto& m = manifest_;
    if (m.format_version != 1) throw Error(Errc::UnsupportedVersion, "dump version " + std::to_string(m.format_version));
    if (m.num_layers < 1) throw Error(Errc::InvariantViolation, "num_layers must be >= 1");
    if (m.hidden_dim < 1) throw Error(Errc::InvariantViolation, "hidden_dim must be >= 1");
    std::uint64_t expected = 0;
    for (std::size_t i = 0; i < m.words.size(); ++i) {
      const auto& w = m.words[i];
      if (w.text.empty()) throw Error(Errc::InvariantViolation, "empty word text at record " + std::to_string(i));
      if (w.subtoken_count < 1) throw Error(Errc::InvariantViolation, "'" + w.text + "' has subtoken_count < 1");
      if (w.byte_offset != expected) {
        throw Error(Errc::InvariantViolation, "'" + w.text + "' declares byte_offset " + std::to_string(w.byte_offset) +
                                                  ", expected " + std::to_string(expected));
      }
      if (!index_.emplace(w.text, i).second) throw Error(Errc::DuplicateWord, "'" + w.text + "' repeated in manifest");
      expected += m.record_floats(w) * sizeof(float);
    }
    if (expected != blob_.size() * sizeof(float)) {
      throw Error(Errc::SizeMismatch, "tensor blob holds " + std::to_string(blob_.size() * sizeof(float)) +
                                          " bytes, manifest declares " + std::to_string(expected));
    }
    for (std::size_t i = 0; i < blob_.size(); ++i) {
      if (!std::isfinite(blob_[i])) {
        throw Error(Errc::NonFiniteValue, "non-finite value at float index " + std::to_string(i));
      }
    }
  }

  DumpManifest manifest_;
  std::vector<float> blob_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t hash_ = 0;
};

/// Builds a dump from per-word tensors laid out [layer][subtoken][dim].
/// Declared offsets must agree with the tensors in manifest order.
inline EmbeddingDump make_dump(DumpManifest manifest, const std::vector<std::vector<float>>& tensors) {
  if (tensors.size() != manifest.words.size()) {
    throw Error(Errc::InvariantViolation, std::to_string(tensors.size()) + " tensors for " +
                                              std::to_string(manifest.words.size()) + " manifest words");
  }
  std::vector<float> blob;
  std::uint64_t off = 0;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& w = manifest.words[i];
    if (w.byte_offset != off || tensors[i].size() != manifest.record_floats(w)) {
      throw Error(Errc::InvariantViolation, "tensor " + std::to_string(i) + " does not match the span of '" + w.text + "'");
    }
    blob.insert(blob.end(), tensors[i].begin(), tensors[i].end());
    off += tensors[i].size() * sizeof(float);
  }
  return EmbeddingDump(std::move(manifest), std::move(blob));
}

namespace detail {

inline std::uint32_t bswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

inline std::string floats_to_le_bytes(std::span<const float> xs) {
  std::string bytes(xs.size() * sizeof(float), '\0');
  std::memcpy(bytes.data(), xs.data(), bytes.size());
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      std::uint32_t u;
      std::memcpy(&u, bytes.data() + 4 * i, 4);
      u = bswap32(u);
      std::memcpy(bytes.data() + 4 * i, &u, 4);
    }
  }
  return bytes;
}

inline std::vector<float> le_bytes_to_floats(std::string_view bytes) {
  std::vector<float> out(bytes.size() / sizeof(float));
  std::memcpy(out.data(), bytes.data(), out.size() * sizeof(float));
  if constexpr (std::endian::native == std::endian::big) {
    for (auto& f : out) {
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      u = bswap32(u);
      std::memcpy(&f, &u, 4);
    }
  }
  return out;
}

}  // namespace detail

inline void write_dump(const std::filesystem::path& dir, const EmbeddingDump& dump) {
  std::filesystem::create_directories(dir);
  write_file(dir / kManifestFile, format_manifest(dump.manifest()));
  write_file(dir / kTensorFile, detail::floats_to_le_bytes(dump.blob()));
}

inline EmbeddingDump read_dump(const std::filesystem::path& dir) {
  if (!std::filesystem::is_regular_file(dir / kManifestFile)) {
    throw Error(Errc::Io, "no " + std::string(kManifestFile) + " in " + dir.string());
  }
  auto manifest = parse_manifest(read_file(dir / kManifestFile));
  const auto bytes = read_file(dir / kTensorFile);
  if (bytes.size() % sizeof(float) != 0) {
    throw Error(Errc::SizeMismatch, std::string(kTensorFile) + " length is not a multiple of 4");
  }
  return EmbeddingDump(std::move(manifest), detail::le_bytes_to_floats(bytes));
}

// ---------------------------------------------------------------------------

inline std::vector<double> pool_subtokens(const EmbeddingDump& dump, std::size_t word_index, int layer,
                                          SubwordRepr repr) {
  const int n = dump.record(word_index).subtoken_count;
  const auto d = static_cast<std::size_t>(dump.hidden_dim());
  std::vector<double> out(d);
  auto copy = [&](int sub) {
    auto v = dump.subtoken(word_index, layer, sub);
    std::copy(v.begin(), v.end(), out.begin());
  };
  switch (repr) {
    case SubwordRepr::First: copy(0); break;
    case SubwordRepr::Last: copy(n - 1); break;
    case SubwordRepr::Mean:
      std::fill(out.begin(), out.end(), 0.0);
      for (int s = 0; s < n; ++s) {
        auto v = dump.subtoken(word_index, layer, s);
        for (std::size_t i = 0; i < d; ++i) out[i] += v[i];
      }
      for (auto& x : out) x /= n;
      break;
    case SubwordRepr::Max:
      copy(0);
      for (int s = 1; s < n; ++s) {
        auto v = dump.subtoken(word_index, layer, s);
        for (std::size_t i = 0; i < d; ++i) out[i] = std::max(out[i], static_cast<double>(v[i]));
      }
      break;
  }
  return out;
}

inline void check_layer(const EmbeddingDump& dump, int layer) {
  if (layer < 0 || layer >= dump.num_layers()) {
    throw Error(Errc::LayerOutOfRange, "layer " + std::to_string(layer) + " outside [0, " +
                                           std::to_string(dump.num_layers()) + ")");
  }
}

/// Word vector at one layer, pooled over subtokens.
inline std::vector<double> word_vector(const EmbeddingDump& dump, std::string_view word, int layer, SubwordRepr repr) {
  auto idx = dump.find(word);
  if (!idx) throw Error(Errc::UnknownWord, "'" + std::string(word) + "' not in dump");
  check_layer(dump, layer);
  return pool_subtokens(dump, *idx, layer, repr);
}

/// Ratings copied into a manifest must agree with the lexicon.
inline void check_ratings(const EmbeddingDump& dump, const ValenceLexicon& lex, double tol = 1e-6) {
  for (const auto& w : dump.manifest().words) {
    if (!w.rating) continue;
    auto r = lex.rating(w.text);
    if (r && std::abs(*r - *w.rating) > tol) {
      throw Error(Errc::RatingMismatch, "'" + w.text + "' rated " + format_double(*w.rating) + " in dump, " +
                                            format_double(*r) + " in lexicon");
    }
  }
}

struct TokenizationPartition {
  std::vector<std::string> single;
  std::vector<std::string> multi;
};

/// All multiply tokenized lexicon words, plus an equal-sized seeded sample of
/// the singly tokenized ones. Both lists keep lexicon order.
inline TokenizationPartition partition_by_tokenization(const ValenceLexicon& lex, const EmbeddingDump& dump,
                                                       std::uint64_t seed) {
  std::vector<std::string> singles;
  TokenizationPartition out;
  for (const auto& e : lex.entries()) {
    auto idx = dump.find(e.word);
    if (!idx) throw Error(Errc::MissingWord, "lexicon word '" + e.word + "' not in dump");
    (dump.record(*idx).subtoken_count > 1 ? out.multi : singles).push_back(e.word);
  }
  if (singles.size() < out.multi.size()) {
    throw Error(Errc::InsufficientSingles, std::to_string(singles.size()) + " singly tokenized words for " +
                                               std::to_string(out.multi.size()) + " multiply tokenized");
  }
  auto rng = make_rng(seed);
  for (auto i : sample_indices(singles.size(), out.multi.size(), rng)) out.single.push_back(singles[i]);
  return out;
}

}  // namespace vast
