#include <gtest/gtest.h>

#include <fstream>
#include <nlohmann/json.hpp>

#include "inkflux/textmetrics.hpp"
#include "oracles.hpp"

using namespace inkflux;
using namespace inkflux::textmetrics;

namespace {

nlohmann::json load_fixture(const std::string& name) {
  std::ifstream in(std::string(INKFLUX_FIXTURES) + "/" + name);
  return nlohmann::json::parse(in);
}

class FixedEmbedder : public EmbeddingProvider {
 public:
  explicit FixedEmbedder(std::map<std::string, std::vector<double>> table)
      : table_(std::move(table)) {}
  std::size_t dimension() const override { return table_.begin()->second.size(); }
  std::vector<double> embed(std::string_view t) const override {
    return table_.at(std::string(t));
  }

 private:
  std::map<std::string, std::vector<double>> table_;
};

class ConstantParaphraser : public ParaphraseProvider {
 public:
  explicit ConstantParaphraser(double p) : p_(p) {}
  double score(std::string_view, std::string_view) const override {
    ++calls;
    return p_;
  }
  mutable std::size_t calls = 0;

 private:
  double p_;
};

class FailingParaphraser : public ParaphraseProvider {
 public:
  double score(std::string_view, std::string_view) const override {
    throw std::runtime_error("connection refused");
  }
};

std::u32string random_unicode(stats::SeededRng& rng, std::size_t max_len) {
  static const std::u32string pool = U"ab c.Z!é😀漢-'’\n0";
  std::u32string s;
  const std::size_t n = rng.uniform_index(max_len + 1);
  for (std::size_t i = 0; i < n; ++i) s.push_back(pool[rng.uniform_index(pool.size())]);
  return s;
}

}  // namespace

TEST(WordCount, Examples) {
  EXPECT_EQ(word_count(""), 0u);
  EXPECT_EQ(word_count("Hello, world!"), 2u);
}

TEST(WordCount, HandCountedFixture) {
  const auto fx = load_fixture("word_count_50.json");
  ASSERT_EQ(fx.size(), 50u);
  for (const auto& row : fx) {
    const auto text = row["text"].get<std::string>();
    EXPECT_EQ(word_count(text), row["words"].get<std::size_t>()) << text;
    EXPECT_EQ(tokenize(text).size(), row["words"].get<std::size_t>()) << text;
  }
}

TEST(SplitSentences, Examples) {
  EXPECT_EQ(sentence_texts("The cat sat. The dog ran."),
            (std::vector<std::string>{"The cat sat.", "The dog ran."}));
  EXPECT_EQ(sentence_texts("Dr. Smith left."), (std::vector<std::string>{"Dr. Smith left."}));
  EXPECT_TRUE(sentence_texts("").empty());
  EXPECT_TRUE(sentence_texts("   \n ").empty());
}

TEST(SplitSentences, HandSegmentedFixture) {
  const auto fx = load_fixture("segmentation_30.json");
  ASSERT_EQ(fx.size(), 30u);
  for (const auto& row : fx) {
    const auto text = row["text"].get<std::string>();
    EXPECT_EQ(sentence_texts(text), row["sentences"].get<std::vector<std::string>>()) << text;
  }
}

TEST(SplitSentences, SpansReproduceInput) {
  stats::SeededRng root(3);
  for (std::size_t i = 0; i < 500; ++i) {
    auto rng = root.split(i);
    const auto text = random_unicode(rng, 80);
    const auto sentences = split_sentences(std::u32string_view(text));
    std::size_t prev_end = 0;
    std::u32string rebuilt;
    for (const auto& s : sentences) {
      ASSERT_LE(prev_end, s.char_span.first);
      for (std::size_t k = prev_end; k < s.char_span.first; ++k) {
        ASSERT_TRUE(is_space(text[k]));
      }
      rebuilt += text.substr(prev_end, s.char_span.second - prev_end);
      ASSERT_EQ(utf8::encode(text.substr(s.char_span.first,
                                         s.char_span.second - s.char_span.first)),
                s.text);
      ASSERT_FALSE(s.text.empty());
      prev_end = s.char_span.second;
    }
    rebuilt += text.substr(prev_end);
    ASSERT_EQ(rebuilt, text);
    for (std::size_t k = prev_end; k < text.size(); ++k) ASSERT_TRUE(is_space(text[k]));
  }
}

TEST(EditSimilarity, Examples) {
  EXPECT_DOUBLE_EQ(edit_similarity("same", "same"), 1.0);
  EXPECT_DOUBLE_EQ(edit_similarity("", ""), 1.0);
  EXPECT_DOUBLE_EQ(edit_similarity("", "abc"), 0.0);
  EXPECT_NEAR(edit_similarity("kitten", "sitting"), 1.0 - 3.0 / 7.0, 1e-15);
  EXPECT_EQ(oracle::levenshtein(U"kitten", U"sitting"), 3u);
}

TEST(EditSimilarity, MatchesDpOracleAndProperties) {
  stats::SeededRng root(8);
  for (std::size_t i = 0; i < 500; ++i) {
    auto rng = root.split(i);
    const auto a = random_unicode(rng, 20), b = random_unicode(rng, 20),
               c = random_unicode(rng, 20);
    const auto dab = levenshtein(a, b);
    ASSERT_EQ(dab, oracle::levenshtein(a, b));
    ASSERT_LE(levenshtein(a, c), dab + levenshtein(b, c));
    const auto sa = utf8::encode(a), sb = utf8::encode(b);
    const double e = edit_similarity(sa, sb);
    ASSERT_EQ(e, edit_similarity(sb, sa));
    ASSERT_GE(e, 0.0);
    ASSERT_LE(e, 1.0);
    const double l = lexical_cosine(sa, sb);
    ASSERT_EQ(l, lexical_cosine(sb, sa));
    ASSERT_GE(l, 0.0);
    ASSERT_LE(l, 1.0);
  }
}

TEST(LexicalCosine, Examples) {
  EXPECT_EQ(lexical_cosine("The quick fox.", "the QUICK fox"), 1.0);
  EXPECT_EQ(lexical_cosine("alpha beta", "gamma delta"), 0.0);
  EXPECT_DOUBLE_EQ(lexical_cosine("the cat", "the dog"), 0.5);
  EXPECT_EQ(lexical_cosine("", "x"), 0.0);
  EXPECT_EQ(lexical_cosine("...", "..."), 0.0);
}

TEST(SemanticSimilarity, ProviderVectors) {
  FixedEmbedder e({{"a", {1, 0}}, {"b", {0, 1}}, {"c", {-1, 0}}, {"z", {0, 0}}});
  EXPECT_DOUBLE_EQ(semantic_similarity(e, "a", "a"), 1.0);
  EXPECT_DOUBLE_EQ(semantic_similarity(e, "a", "b"), 0.0);
  EXPECT_DOUBLE_EQ(semantic_similarity(e, "a", "c"), 0.0);
  EXPECT_DOUBLE_EQ(semantic_similarity(e, "a", "z"), 0.0);
}

TEST(SemanticSimilarity, FailureCarriesContext) {
  FixedEmbedder e({{"a", {1, 0}}});
  try {
    semantic_similarity(e, "a", "missing");
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::ProviderFailure);
    EXPECT_NE(std::string(err.what()).find("semantic_similarity"), std::string::npos);
  }
}

TEST(ParaphraseScore, StubAndPassthrough) {
  LexicalParaphraseStub stub;
  EXPECT_NEAR(paraphrase_score(stub, "A b c.", "a b c"), 1.0 / (1.0 + std::exp(-3.0)), 1e-15);
  EXPECT_NEAR(paraphrase_score(stub, "A b c.", "x y"), 1.0 / (1.0 + std::exp(3.0)), 1e-15);
  EXPECT_NEAR(paraphrase_score(stub, "A b c.", "a b c"), 0.9526, 1e-4);
  ConstantParaphraser mock(0.87);
  EXPECT_EQ(paraphrase_score(mock, "x", "y"), 0.87);
  ConstantParaphraser bad(1.5);
  EXPECT_THROW(paraphrase_score(bad, "x", "y"), Error);
  FailingParaphraser fail;
  try {
    paraphrase_score(fail, "x", "y");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ProviderFailure);
  }
}

TEST(MaxPairwise, FifteenComparisons) {
  const std::vector<std::string> sug = {"One a.", "Two b.", "Three c."};
  const std::vector<std::string> fresh = {"v.", "w.", "x.", "y.", "z."};
  ConstantParaphraser p(0.25);
  Providers prov{nullptr, &p};
  EXPECT_EQ(pairwise_scores(SimilarityMetricId::paraphrase, sug, fresh, prov).size(), 15u);
  p.calls = 0;
  EXPECT_EQ(max_pairwise_influence(SimilarityMetricId::paraphrase, sug, fresh, prov), 0.25);
  EXPECT_EQ(p.calls, 15u);
  EXPECT_EQ(pairwise_scores(SimilarityMetricId::edit, sug, fresh).size(), 15u);
}

TEST(MaxPairwise, VerbatimAndEmpty) {
  const std::vector<std::string> sug = {"The ship sank.", "Nobody noticed."};
  const std::vector<std::string> fresh = {"Something else.", "Nobody noticed."};
  EXPECT_EQ(max_pairwise_influence(SimilarityMetricId::edit, sug, fresh), 1.0);
  EXPECT_EQ(max_pairwise_influence(SimilarityMetricId::edit, sug, {}), std::nullopt);
  EXPECT_EQ(max_pairwise_influence(SimilarityMetricId::edit, {}, fresh), std::nullopt);
}

TEST(MaxPairwise, MonotoneUnderAddedSentences) {
  stats::SeededRng root(21);
  for (std::size_t i = 0; i < 200; ++i) {
    auto rng = root.split(i);
    std::vector<std::string> a, b;
    for (std::size_t k = 0; k < 1 + rng.uniform_index(3); ++k) a.push_back(utf8::encode(random_unicode(rng, 15)));
    for (std::size_t k = 0; k < 1 + rng.uniform_index(3); ++k) b.push_back(utf8::encode(random_unicode(rng, 15)));
    for (auto m : kAllMetrics) {
      const double before = *max_pairwise_influence(m, a, b);
      auto a2 = a;
      a2.push_back(utf8::encode(random_unicode(rng, 15)));
      auto b2 = b;
      b2.push_back(utf8::encode(random_unicode(rng, 15)));
      ASSERT_GE(*max_pairwise_influence(m, a2, b), before);
      ASSERT_GE(*max_pairwise_influence(m, a, b2), before);
    }
  }
}

TEST(Metrics, ParseNames) {
  EXPECT_EQ(parse_metric("edit"), SimilarityMetricId::edit);
  EXPECT_EQ(parse_metric("semantic"), SimilarityMetricId::semantic);
  EXPECT_EQ(parse_metric("paraphrase"), SimilarityMetricId::paraphrase);
  EXPECT_EQ(parse_metric("cosine"), std::nullopt);
}
