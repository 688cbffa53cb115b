#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "icl_lab/errors.hpp"
#include "icl_lab/prompt_kit.hpp"
#include "icl_lab/random.hpp"

using namespace icl_lab;

TEST(BuildPrompt, SentimentExample) {
  const std::vector<ExamplePair> pairs{{"Great movie!", "positive"}, {"Terrible plot.", "negative"}};
  EXPECT_EQ(build_prompt(pairs, "Amazing soundtrack!"),
            "Great movie! positive [SEP] Terrible plot. negative [SEP] Amazing soundtrack!");
}

TEST(BuildPrompt, QuestionAnsweringExample) {
  const std::vector<ExamplePair> pairs{{"What is the capital of France?", "Paris"},
                                       {"What is the capital of Japan?", "Tokyo"}};
  EXPECT_EQ(build_prompt(pairs, "What is the capital of Brazil?"),
            "What is the capital of France? Paris [SEP] What is the capital of Japan? Tokyo [SEP] What is the "
            "capital of Brazil?");
}

TEST(BuildPrompt, TranslationExample) {
  const std::vector<ExamplePair> pairs{{"Hello, how are you?", "Bonjour, comment vas-tu ?"},
                                       {"I love to travel.", "J'aime voyager."}};
  EXPECT_EQ(build_prompt(pairs, "Good morning!"),
            "Hello, how are you? Bonjour, comment vas-tu ? [SEP] I love to travel. J'aime voyager. [SEP] Good "
            "morning!");
}

TEST(BuildPrompt, EmptyPairsAndConfig) {
  EXPECT_EQ(build_prompt({}, "q"), "q");
  EXPECT_THROW(build_prompt({}, ""), ParameterError);

  const std::vector<ExamplePair> pairs{{"a", "b"}, {"c", "d"}};
  PromptConfig cfg;
  cfg.separator = ".";
  cfg.pair_joiner = "\n";
  EXPECT_EQ(build_prompt(pairs, "e", cfg), "a\nb\n.\nc\nd\n.\ne");
  cfg.trailing_separator_before_query = false;
  EXPECT_EQ(build_prompt(pairs, "e", cfg), "a\nb\n.\nc\nd\ne");
  cfg.separator = "";
  EXPECT_THROW(build_prompt(pairs, "e", cfg), ParameterError);
}

TEST(BuildPrompt, SeparatorCollisionsAreReported) {
  const std::vector<ExamplePair> pairs{{"contains [SEP] inside", "ok"}, {"fine", "also [SEP]"}};
  const auto warnings = separator_collisions(pairs, "clean query");
  ASSERT_EQ(warnings.size(), 2u);
  EXPECT_NE(warnings[0].find("pair 0 input"), std::string::npos);
  EXPECT_NE(warnings[1].find("pair 1 output"), std::string::npos);
  EXPECT_TRUE(separator_collisions(pairs, "x", PromptConfig{"<|SEP|>", " ", true}).empty());
}

// When no text contains the joiner or the separator, the prompt parses back
// to exactly the pairs and query it was built from.
TEST(BuildPrompt, RoundTripsWithoutCollisions) {
  Rng rng(8);
  auto word = [&] {
    std::string w;
    const std::size_t n = 1 + rng.below(8);
    for (std::size_t i = 0; i < n; ++i) w.push_back(static_cast<char>('a' + rng.below(26)));
    return w;
  };
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<ExamplePair> pairs(rng.below(6));
    for (auto& p : pairs) p = {word(), word()};
    const std::string query = word();
    const std::string prompt = build_prompt(pairs, query);

    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t pos; (pos = prompt.find(' ', start)) != std::string::npos; start = pos + 1) {
      fields.push_back(prompt.substr(start, pos - start));
    }
    fields.push_back(prompt.substr(start));
    ASSERT_EQ(fields.size(), 3 * pairs.size() + 1);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      EXPECT_EQ(fields[3 * i], pairs[i].input_text);
      EXPECT_EQ(fields[3 * i + 1], pairs[i].output_text);
      EXPECT_EQ(fields[3 * i + 2], "[SEP]");
    }
    EXPECT_EQ(fields.back(), query);
  }
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Tokenize, SplitsOnWhitespaceAndPunctuation) {
  EXPECT_EQ(tokenize("Hello, world! It's  ok."), (std::vector<std::string>{"hello", "world", "it", "s", "ok"}));
  EXPECT_TRUE(tokenize(" ,.!? ").empty());
}

TEST(CosineSimilarity, Examples) {
  const std::vector<double> a{1.0, 2.0, -3.0};
  EXPECT_NEAR(cosine_similarity(a, a), 1.0, 1e-15);
  EXPECT_NEAR(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{0, 5}), 0.0, 1e-15);
  EXPECT_NEAR(cosine_similarity(a, std::vector<double>{-1.0, -2.0, 3.0}), -1.0, 1e-15);
  EXPECT_THROW(cosine_similarity(a, std::vector<double>{0, 0, 0}), ZeroVectorError);
  EXPECT_THROW(cosine_similarity(a, std::vector<double>{1, 2}), DimensionError);
}

TEST(EmbedText, Examples) {
  const std::size_t dim = 1024;
  const auto x = embed_text("the quick brown fox", dim);
  EXPECT_EQ(x, embed_text("the quick brown fox", dim));
  EXPECT_NEAR(cosine_similarity(x, x), 1.0, 1e-15);

  std::set<std::uint64_t> buckets;
  for (const char* t : {"alpha", "beta", "gamma", "delta"}) buckets.insert(fnv1a64(t) % dim);
  ASSERT_EQ(buckets.size(), 4u) << "pick tokens that do not collide at this dim";
  EXPECT_EQ(cosine_similarity(embed_text("alpha beta", dim), embed_text("gamma delta", dim)), 0.0);

  // Counts (2, 1) against (1, 1): 3 / sqrt(10).
  ASSERT_NE(fnv1a64("a") % dim, fnv1a64("b") % dim);
  EXPECT_NEAR(cosine_similarity(embed_text("a a b", dim), embed_text("a b", dim)), 3.0 / std::sqrt(10.0), 1e-15);

  EXPECT_THROW(embed_text("", dim), ZeroVectorError);
  EXPECT_THROW(embed_text("...", dim), ZeroVectorError);
  EXPECT_THROW(embed_text("ok", 4), ParameterError);
}

TEST(SimilaritySelect, MostSimilarComesLast) {
  const std::vector<ExamplePair> pairs{{"the cat sat on the mat", "1"},
                                       {"stock prices fell sharply", "2"},
                                       {"a dog sat on a log", "3"},
                                       {"markets rallied today", "4"}};
  const auto out = similarity_select(pairs, "stock prices fell sharply", 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out.back().output_text, "2");

  const auto all = similarity_select(pairs, "the cat sat", 4);
  std::multiset<std::string> got, want{"1", "2", "3", "4"};
  for (const auto& p : all) got.insert(p.output_text);
  EXPECT_EQ(got, want);
  EXPECT_EQ(all.back().output_text, "1");

  EXPECT_THROW(similarity_select(pairs, "x", 5), ParameterError);
  EXPECT_THROW(similarity_select(pairs, "x", 0), ParameterError);
}

TEST(SimilaritySelect, TiesKeepOriginalOrder) {
  const std::vector<ExamplePair> pairs{{"same text", "0"}, {"same text", "1"}, {"same text", "2"}};
  const auto out = similarity_select(pairs, "same text", 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].output_text, "0");
  EXPECT_EQ(out[1].output_text, "1");
}

TEST(SimilaritySelect, StableUnderDuplicatingUnselectedPairs) {
  Rng rng(77);
  const std::vector<std::string> words{"red", "green", "blue", "fast", "slow", "big", "small", "cat", "dog", "sun"};
  auto sentence = [&] {
    std::string s;
    const std::size_t n = 1 + rng.below(5);
    for (std::size_t i = 0; i < n; ++i) s += words[rng.below(words.size())] + " ";
    return s;
  };
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<ExamplePair> pairs(3 + rng.below(10));
    for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i] = {sentence(), std::to_string(i)};
    const std::string query = sentence();
    const std::size_t k = 1 + rng.below(pairs.size());
    const auto base = similarity_select(pairs, query, k);

    std::set<std::string> selected;
    for (const auto& p : base) selected.insert(p.output_text);
    auto extended = pairs;
    for (const auto& p : pairs) {
      if (!selected.count(p.output_text)) extended.push_back({p.input_text, p.output_text + "dup"});
    }
    const auto again = similarity_select(extended, query, k);
    ASSERT_EQ(again.size(), base.size());
    for (std::size_t i = 0; i < base.size(); ++i) EXPECT_EQ(again[i].output_text, base[i].output_text);
  }
}
