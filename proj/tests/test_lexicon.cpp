#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "helpers.hpp"

using namespace vast;

namespace {

ValenceLexicon lex_from(const std::string& text, Scale scale = {1, 9}) {
  std::istringstream in(text);
  return parse_lexicon(in, {}, scale);
}

}  // namespace

TEST(Lexicon, ThreeLineFixtureKeepsFileOrder) {
  const auto lex = lex_from("word,rating\njoy,8.6\ngrief,1.7\ntable,5.0\n");
  ASSERT_EQ(lex.size(), 3u);
  EXPECT_EQ(lex.entries()[0].word, "joy");
  EXPECT_EQ(lex.entries()[1].word, "grief");
  EXPECT_EQ(lex.entries()[2].word, "table");
  EXPECT_DOUBLE_EQ(*lex.rating("joy"), 8.6);
  EXPECT_DOUBLE_EQ(*lex.rating("grief"), 1.7);
  EXPECT_DOUBLE_EQ(*lex.rating("table"), 5.0);
  EXPECT_FALSE(lex.rating("chair"));
}

TEST(Lexicon, SchemaSelectsColumnsAndDelimiter) {
  std::istringstream in("id\tValence_Mean\tWord\n1\t7.5\thappy\n2\t2.0\t\"sad\"\n");
  const auto lex = parse_lexicon(in, {"Word", "Valence_Mean", '\t'}, {1, 9}, AffectDimension::Valence, "anew");
  ASSERT_EQ(lex.size(), 2u);
  EXPECT_EQ(lex.name(), "anew");
  EXPECT_DOUBLE_EQ(*lex.rating("sad"), 2.0);
}

TEST(Lexicon, Errors) {
  EXPECT_VAST_ERROR(lex_from("word,rating\n"), Errc::MalformedRecord);
  EXPECT_VAST_ERROR(lex_from("word,rating\njoy,9.5\n"), Errc::RatingOutOfRange);
  EXPECT_VAST_ERROR(lex_from("word,rating\njoy,8\njoy,7\n"), Errc::DuplicateWord);
  EXPECT_VAST_ERROR(lex_from("word,rating\njoy,high\n"), Errc::MalformedRecord);
  EXPECT_VAST_ERROR(lex_from("word,score\njoy,8\n"), Errc::MalformedRecord);
  EXPECT_VAST_ERROR(lex_from("word,rating\njoy,8\n", {5, 5}), Errc::InvalidArgument);
}

TEST(Lexicon, NfcNormalizesWords) {
  // "café" with a combining acute accent
  const auto lex = lex_from("word,rating\ncafe\xCC\x81,6\n");
  EXPECT_TRUE(lex.contains("caf\xC3\xA9"));
}

TEST(Rescale, Examples) {
  EXPECT_DOUBLE_EQ(rescale_rating(3.0, {1, 5}, {1, 9}), 5.0);
  EXPECT_DOUBLE_EQ(rescale_rating(1.0, {1, 5}, {1, 9}), 1.0);
  // 1 + (4.2 - 1) * 8 / 4
  EXPECT_NEAR(rescale_rating(4.2, {1, 5}, {1, 9}), 7.4, 1e-12);
  EXPECT_VAST_ERROR(rescale_rating(6.0, {1, 5}, {1, 9}), Errc::RatingOutOfRange);
}

TEST(Rescale, RoundTripProperty) {
  auto rng = make_rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double r = 1.0 + 4.0 * uniform_unit(rng);
    EXPECT_NEAR(rescale_rating(rescale_rating(r, {1, 5}, {-3, 3}), {-3, 3}, {1, 5}), r, 1e-12);
  }
}

TEST(PolarSet, ParseFormatRoundTrip) {
  std::istringstream in("# comment\nlabel\tmini\npositive\tjoy\npositive\tlove\nnegative\tgrief\n");
  const auto p = parse_polar_set(in);
  EXPECT_EQ(p.label, "mini");
  EXPECT_EQ(p.positive, (std::vector<std::string>{"joy", "love"}));
  EXPECT_EQ(p.negative, (std::vector<std::string>{"grief"}));
  std::istringstream again(format_polar_set(p));
  EXPECT_EQ(parse_polar_set(again), p);
}

TEST(PolarSet, Validation) {
  std::istringstream overlap("positive\tjoy\nnegative\tjoy\n");
  EXPECT_VAST_ERROR(parse_polar_set(overlap), Errc::InvariantViolation);
  std::istringstream empty("positive\tjoy\n");
  EXPECT_VAST_ERROR(parse_polar_set(empty), Errc::EmptyPolarGroup);
  std::istringstream bad("neutral\tjoy\n");
  EXPECT_VAST_ERROR(parse_polar_set(bad), Errc::MalformedRecord);
}

TEST(PolarSet, BuiltinListsAre25And25AndDisjoint) {
  const auto p = weat_valence_polar();
  EXPECT_EQ(p.positive.size(), 25u);
  EXPECT_EQ(p.negative.size(), 25u);
  EXPECT_NO_THROW(validate(p));
}

TEST(BalancePolar, NoOpWhenAllSingleAndEqual) {
  const PolarSet p{"p", {"a", "b"}, {"c", "d"}};
  const std::unordered_map<std::string, int> counts{{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}};
  EXPECT_EQ(balance_polar_set(p, counts, 5), p);
}

TEST(BalancePolar, ThreeVersusTwoDropsTheSeededPositive) {
  const PolarSet p{"p", {"a", "b", "c", "x"}, {"d", "e", "y"}};
  const std::unordered_map<std::string, int> counts{{"a", 1}, {"b", 1}, {"c", 1}, {"x", 2},
                                                    {"d", 1}, {"e", 1}, {"y", 3}};
  for (std::uint64_t seed : {0ull, 1ull, 2ull, 99ull}) {
    // Replay: one uniform pick out of the 3 positive survivors is removed.
    auto rng = make_rng(seed);
    std::vector<std::string> expect{"a", "b", "c"};
    expect.erase(expect.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, 3)));

    const auto out = balance_polar_set(p, counts, seed);
    EXPECT_EQ(out.positive, expect);
    EXPECT_EQ(out.negative, (std::vector<std::string>{"d", "e"}));
    EXPECT_EQ(balance_polar_set(p, counts, seed), out);
  }
  std::set<std::vector<std::string>> seen;
  for (std::uint64_t seed = 0; seed < 64; ++seed) seen.insert(balance_polar_set(p, counts, seed).positive);
  EXPECT_EQ(seen.size(), 3u);
}

TEST(BalancePolar, EmptyGroupAfterFiltering) {
  const PolarSet p{"p", {"a"}, {"b"}};
  EXPECT_VAST_ERROR(balance_polar_set(p, {{"a", 2}, {"b", 1}}, 0), Errc::EmptyPolarGroup);
  EXPECT_VAST_ERROR(balance_polar_set(p, {{"a", 1}}, 0), Errc::MissingWord);
}

TEST(SelectExtreme, SixWordToyWithTies) {
  const auto lex = lex_from("word,rating\nzeal,8\nbliss,8\ncalm,6\ndull,4\nugly,2\nawful,2\n");
  const auto p = select_extreme_polar(lex, 2);
  EXPECT_EQ(p.positive, (std::vector<std::string>{"bliss", "zeal"}));
  EXPECT_EQ(p.negative, (std::vector<std::string>{"awful", "ugly"}));
  const auto p1 = select_extreme_polar(lex, 1);
  EXPECT_EQ(p1.positive, (std::vector<std::string>{"bliss"}));
  EXPECT_EQ(p1.negative, (std::vector<std::string>{"awful"}));
  EXPECT_VAST_ERROR(select_extreme_polar(lex, 0), Errc::InsufficientWords);
  EXPECT_VAST_ERROR(select_extreme_polar(lex, 4), Errc::InsufficientWords);
}

TEST(SelectExtreme, FilterRestrictsPool) {
  const auto lex = lex_from("word,rating\nzeal,8\nbliss,8\ncalm,6\ndull,4\nugly,2\nawful,2\n");
  const auto p = select_extreme_polar(lex, 1, [](const std::string& w) { return w != "bliss" && w != "awful"; });
  EXPECT_EQ(p.positive, (std::vector<std::string>{"zeal"}));
  EXPECT_EQ(p.negative, (std::vector<std::string>{"ugly"}));
}

TEST(PairDataset, TwoPairFixtureInFileOrder) {
  std::istringstream in("word1,word2,score\ntiger,cat,7.35\nbook,paper,\"7.46\"\n");
  const auto ds = parse_pair_dataset(in, {}, {0, 10}, "ws");
  ASSERT_EQ(ds.pairs.size(), 2u);
  EXPECT_EQ(ds.pairs[0].first, "tiger");
  EXPECT_EQ(ds.pairs[0].second, "cat");
  EXPECT_DOUBLE_EQ(ds.pairs[0].score, 7.35);
  EXPECT_EQ(ds.pairs[1].first, "book");
  EXPECT_DOUBLE_EQ(ds.pairs[1].score, 7.46);
}

TEST(PairDataset, Errors) {
  std::istringstream header_only("word1,word2,score\n");
  EXPECT_VAST_ERROR(parse_pair_dataset(header_only, {}, {0, 10}), Errc::MalformedRecord);
  std::istringstream out_of_range("word1,word2,score\na,b,11\n");
  EXPECT_VAST_ERROR(parse_pair_dataset(out_of_range, {}, {0, 10}), Errc::RatingOutOfRange);
  std::istringstream ragged("word1,word2,score\na,b\n");
  EXPECT_VAST_ERROR(parse_pair_dataset(ragged, {}, {0, 10}), Errc::MalformedRecord);
}
