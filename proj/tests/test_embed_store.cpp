#include <gtest/gtest.h>

#include <cstring>
#include <json.hpp>

#include "helpers.hpp"

using namespace vast;
using vast::testing::TempDir;

namespace {

// 2 words x 3 layers x 4 dims, values encode (word, layer, dim).
EmbeddingDump small_dump() {
  std::vector<std::vector<float>> t(2);
  for (int w = 0; w < 2; ++w)
    for (int l = 0; l < 3; ++l)
      for (int d = 0; d < 4; ++d) t[static_cast<std::size_t>(w)].push_back(static_cast<float>(100 * w + 10 * l + d));
  DumpManifest m;
  m.model_id = "toy";
  m.num_layers = 3;
  m.hidden_dim = 4;
  m.seed = 1;
  m.words = {{"joy", 8.6, 1, 0}, {"grief", 1.7, 1, 0}};
  assign_offsets(m);
  return make_dump(m, t);
}

}  // namespace

TEST(Dump, FixtureLoadsAndRoundTripsBitIdentically) {
  TempDir dir("dump");
  const auto d = small_dump();
  write_dump(dir.path(), d);
  EXPECT_EQ(std::filesystem::file_size(dir.path() / "embeddings.bin"), 2u * 3 * 4 * 4);
  const auto back = read_dump(dir.path());
  EXPECT_EQ(back.content_hash(), d.content_hash());
  ASSERT_EQ(back.blob().size(), d.blob().size());
  EXPECT_EQ(std::memcmp(back.blob().data(), d.blob().data(), d.blob().size() * sizeof(float)), 0);
  EXPECT_EQ(format_manifest(back.manifest()), format_manifest(d.manifest()));
  EXPECT_EQ(*back.record(1).rating, 1.7);
  EXPECT_FLOAT_EQ(back.subtoken(1, 2, 0)[3], 123.0f);
}

TEST(Dump, RandomMultiSubtokenRoundTrip) {
  TempDir dir("dump_random");
  auto rng = make_rng(4);
  std::vector<std::string> words;
  std::vector<int> subs;
  std::vector<std::vector<float>> t;
  for (int i = 0; i < 20; ++i) {
    words.push_back("w" + std::to_string(i));
    subs.push_back(1 + static_cast<int>(uniform_index(rng, 3)));
    std::vector<float> v(static_cast<std::size_t>(5 * subs.back() * 6));
    for (auto& x : v) x = static_cast<float>(standard_normal(rng));
    t.push_back(std::move(v));
  }
  const auto d = vast::testing::dump_of(words, subs, 5, 6, t);
  write_dump(dir.path(), d);
  const auto back = read_dump(dir.path());
  EXPECT_EQ(back.content_hash(), d.content_hash());
  EXPECT_EQ(read_file(dir.path() / "embeddings.bin"), detail::floats_to_le_bytes(d.blob()));
}

TEST(Dump, LittleEndianByteLayout) {
  const std::vector<float> xs = {1.0f, -2.5f};
  const auto bytes = detail::floats_to_le_bytes(xs);
  ASSERT_EQ(bytes.size(), 8u);
  // 1.0f = 0x3F800000
  EXPECT_EQ(static_cast<unsigned char>(bytes[0]), 0x00);
  EXPECT_EQ(static_cast<unsigned char>(bytes[3]), 0x3F);
  EXPECT_EQ(static_cast<unsigned char>(bytes[2]), 0x80);
  EXPECT_EQ(detail::le_bytes_to_floats(bytes), xs);
}

TEST(Dump, TruncatedBlob) {
  TempDir dir("dump_trunc");
  write_dump(dir.path(), small_dump());
  auto blob = read_file(dir.path() / "embeddings.bin");
  blob.resize(blob.size() - 4);
  write_file(dir.path() / "embeddings.bin", blob);
  EXPECT_VAST_ERROR(read_dump(dir.path()), Errc::SizeMismatch);
}

TEST(Dump, NaNInjected) {
  TempDir dir("dump_nan");
  write_dump(dir.path(), small_dump());
  auto floats = detail::le_bytes_to_floats(read_file(dir.path() / "embeddings.bin"));
  floats[5] = std::numeric_limits<float>::quiet_NaN();
  write_file(dir.path() / "embeddings.bin", detail::floats_to_le_bytes(floats));
  EXPECT_VAST_ERROR(read_dump(dir.path()), Errc::NonFiniteValue);
}

TEST(Dump, PermutedWordOrderCaughtBySpanValidation) {
  TempDir dir("dump_perm");
  const auto d = vast::testing::dump_of({"a", "b", "c"}, {1, 2, 1}, 2, 3,
                                        {std::vector<float>(6, 1.f), std::vector<float>(12, 2.f),
                                         std::vector<float>(6, 3.f)});
  write_dump(dir.path(), d);
  auto j = nlohmann::json::parse(read_file(dir.path() / "manifest.json"));
  std::swap(j["words"][0], j["words"][1]);
  write_file(dir.path() / "manifest.json", j.dump(2));
  EXPECT_VAST_ERROR(read_dump(dir.path()), Errc::InvariantViolation);

  // Tensors handed over in a different order than the manifest declares.
  DumpManifest m = d.manifest();
  EXPECT_VAST_ERROR(make_dump(m, {std::vector<float>(12, 2.f), std::vector<float>(6, 1.f), std::vector<float>(6, 3.f)}),
                    Errc::InvariantViolation);
}

TEST(Dump, ManifestErrors) {
  TempDir dir("dump_bad");
  write_dump(dir.path(), small_dump());
  auto j = nlohmann::json::parse(read_file(dir.path() / "manifest.json"));
  j["format_version"] = 2;
  write_file(dir.path() / "manifest.json", j.dump());
  EXPECT_VAST_ERROR(read_dump(dir.path()), Errc::UnsupportedVersion);
  j["format_version"] = 1;
  j["words"][1]["text"] = "joy";
  write_file(dir.path() / "manifest.json", j.dump());
  EXPECT_VAST_ERROR(read_dump(dir.path()), Errc::DuplicateWord);
  write_file(dir.path() / "manifest.json", "{");
  EXPECT_VAST_ERROR(read_dump(dir.path()), Errc::MalformedRecord);
}

TEST(Dump, EmptyWordListIsValid) {
  TempDir dir("dump_empty");
  DumpManifest m;
  m.num_layers = 2;
  m.hidden_dim = 3;
  const auto d = make_dump(m, {});
  write_dump(dir.path(), d);
  const auto back = read_dump(dir.path());
  EXPECT_EQ(back.size(), 0u);
  EXPECT_EQ(std::filesystem::file_size(dir.path() / "embeddings.bin"), 0u);
}

TEST(Pooling, SingleSubtokenAllReprsIdentical) {
  const auto d = small_dump();
  const auto first = pool_subtokens(d, 0, 1, SubwordRepr::First);
  for (auto r : kAllReprs) EXPECT_EQ(pool_subtokens(d, 0, 1, r), first);
}

TEST(Pooling, TwoSubtokenExample) {
  const auto d = vast::testing::dump_of({"xy"}, {2}, 1, 2, {{1.f, 3.f, 3.f, 5.f}});
  EXPECT_EQ(pool_subtokens(d, 0, 0, SubwordRepr::Mean), (Vec{2, 4}));
  EXPECT_EQ(pool_subtokens(d, 0, 0, SubwordRepr::Max), (Vec{3, 5}));
  EXPECT_EQ(pool_subtokens(d, 0, 0, SubwordRepr::First), (Vec{1, 3}));
  EXPECT_EQ(pool_subtokens(d, 0, 0, SubwordRepr::Last), (Vec{3, 5}));
}

TEST(Pooling, LayerAndWordErrors) {
  const auto d = small_dump();
  EXPECT_VAST_ERROR(word_vector(d, "joy", 3, SubwordRepr::Last), Errc::LayerOutOfRange);
  EXPECT_VAST_ERROR(word_vector(d, "joy", -1, SubwordRepr::Last), Errc::LayerOutOfRange);
  EXPECT_VAST_ERROR(word_vector(d, "nope", 0, SubwordRepr::Last), Errc::UnknownWord);
  EXPECT_EQ(word_vector(d, "grief", 1, SubwordRepr::Last), (Vec{110, 111, 112, 113}));
}

TEST(Ratings, MismatchDetected) {
  const auto d = small_dump();
  const ValenceLexicon ok("l", AffectDimension::Valence, {1, 9}, {{"joy", 8.6}});
  EXPECT_NO_THROW(check_ratings(d, ok));
  const ValenceLexicon bad("l", AffectDimension::Valence, {1, 9}, {{"joy", 8.0}});
  EXPECT_VAST_ERROR(check_ratings(d, bad), Errc::RatingMismatch);
}

TEST(Partition, FiveSinglesThreeMultis) {
  std::vector<std::string> words = {"s1", "m1", "s2", "s3", "m2", "s4", "m3", "s5"};
  std::vector<int> subs = {1, 2, 1, 1, 3, 1, 2, 1};
  std::vector<std::vector<float>> t;
  std::vector<ValenceLexicon::Entry> entries;
  for (std::size_t i = 0; i < words.size(); ++i) {
    t.emplace_back(static_cast<std::size_t>(subs[i] * 2), 1.0f);
    entries.push_back({words[i], 5.0});
  }
  const auto d = vast::testing::dump_of(words, subs, 1, 2, t);
  const ValenceLexicon lex("l", AffectDimension::Valence, {1, 9}, entries);
  for (std::uint64_t seed : {0ull, 1ull, 2ull}) {
    const auto p = partition_by_tokenization(lex, d, seed);
    EXPECT_EQ(p.multi, (std::vector<std::string>{"m1", "m2", "m3"}));
    // Replay: partial Fisher-Yates over the 5 singles, first 3 slots, sorted.
    const std::vector<std::string> singles = {"s1", "s2", "s3", "s4", "s5"};
    std::vector<std::size_t> idx = {0, 1, 2, 3, 4};
    auto rng = make_rng(seed);
    for (std::size_t i = 0; i < 3; ++i) std::swap(idx[i], idx[i + uniform_index(rng, 5 - i)]);
    idx.resize(3);
    std::sort(idx.begin(), idx.end());
    std::vector<std::string> expect;
    for (auto i : idx) expect.push_back(singles[i]);
    EXPECT_EQ(p.single, expect);
    EXPECT_EQ(partition_by_tokenization(lex, d, seed).single, p.single);
  }
}

TEST(Partition, AllSinglesGivesEmptyLists) {
  const auto d = vast::testing::dump_of({"a", "b"}, {1, 1}, 1, 1, {{1.f}, {2.f}});
  const ValenceLexicon lex("l", AffectDimension::Valence, {1, 9}, {{"a", 2}, {"b", 3}});
  const auto p = partition_by_tokenization(lex, d, 0);
  EXPECT_TRUE(p.single.empty());
  EXPECT_TRUE(p.multi.empty());
}

TEST(Partition, MoreMultisThanSingles) {
  const auto d = vast::testing::dump_of({"a", "b"}, {2, 1}, 1, 1, {{1.f, 1.f}, {2.f}});
  const ValenceLexicon lex("l", AffectDimension::Valence, {1, 9}, {{"a", 2}});
  EXPECT_VAST_ERROR(partition_by_tokenization(lex, d, 0), Errc::InsufficientSingles);
}
