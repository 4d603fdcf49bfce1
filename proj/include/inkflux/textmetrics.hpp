#pragma once

// Tokenization, sentence segmentation and sentence-level similarity.
//
// All positions and lengths are in code points. The tokenizer and splitter
// are fixed, deterministic rules; they are not meant to agree with any
// particular NLP toolkit, only with themselves.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <exception>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "inkflux/error.hpp"
#include "inkflux/utf8.hpp"

namespace inkflux::textmetrics {

// ---------------------------------------------------------------------------
// Character classes

inline bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
         c == U'\v' || c == 0x00A0 || c == 0x2028 || c == 0x2029 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x3000;
}

inline bool is_ascii_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

/// Letters and digits. Outside ASCII every code point from U+00C0 up counts,
/// except the general punctuation, symbol, CJK punctuation, full-width
/// punctuation and emoji blocks.
inline bool is_word_char(char32_t c) {
  if (c < 0x80) {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') ||
           is_ascii_digit(c);
  }
  if (c < 0xC0 || c == 0xD7 || c == 0xF7) return false;
  if (c >= 0x2000 && c <= 0x2BFF) return false;
  if (c >= 0x2E00 && c <= 0x2E7F) return false;
  if (c >= 0x3000 && c <= 0x303F) return false;
  if (c >= 0xFE10 && c <= 0xFE6F) return false;
  if (c >= 0xFF00 && c <= 0xFF0F) return false;
  if (c >= 0xFF1A && c <= 0xFF20) return false;
  if (c >= 0xFF3B && c <= 0xFF40) return false;
  if (c >= 0xFF5B && c <= 0xFF65) return false;
  if (c >= 0xFFF0 && c <= 0xFFFF) return false;
  if (c >= 0x1F000 && c <= 0x1FAFF) return false;
  return true;
}

/// Apostrophes and hyphens join two word runs ("don't", "well-known").
inline bool is_joiner(char32_t c) {
  return c == U'\'' || c == 0x2019 || c == U'-' || c == 0x2010;
}

inline bool is_upper(char32_t c) {
  return (c >= U'A' && c <= U'Z') || (c >= 0xC0 && c <= 0xDE && c != 0xD7) ||
         (c >= 0x391 && c <= 0x3A9) || (c >= 0x410 && c <= 0x42F);
}

inline char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  if (c >= 0x391 && c <= 0x3A9) return c + 32;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  return c;
}

inline bool is_opening_quote(char32_t c) {
  return c == U'"' || c == U'\'' || c == 0x201C || c == 0x2018 ||
         c == 0x00AB || c == U'(' || c == U'[';
}

inline bool is_closing_punct(char32_t c) {
  return c == U'"' || c == U'\'' || c == 0x201D || c == 0x2019 ||
         c == 0x00BB || c == U')' || c == U']';
}

inline bool is_terminator(char32_t c) {
  return c == U'.' || c == U'!' || c == U'?';
}

// ---------------------------------------------------------------------------
// Tokens

/// Maximal runs of word characters, allowing single internal joiners.
/// Returned lowercased.
inline std::vector<std::u32string> tokenize(std::u32string_view text) {
  std::vector<std::u32string> out;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    if (!is_word_char(text[i])) {
      ++i;
      continue;
    }
    std::u32string tok;
    while (i < n) {
      if (is_word_char(text[i])) {
        tok.push_back(to_lower(text[i]));
        ++i;
      } else if (is_joiner(text[i]) && i + 1 < n && is_word_char(text[i + 1])) {
        tok.push_back(text[i]);
        ++i;
      } else {
        break;
      }
    }
    out.push_back(std::move(tok));
  }
  return out;
}

inline std::vector<std::u32string> tokenize(std::string_view text) {
  return tokenize(std::u32string_view(utf8::decode(text)));
}

/// Same rule as tokenize(), counting only.
inline std::size_t word_count(std::u32string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    const char32_t c = text[i];
    if (is_word_char(c)) {
      if (!in_word) ++count;
      in_word = true;
    } else if (in_word && is_joiner(c) && i + 1 < n && is_word_char(text[i + 1])) {
      // stays inside the word
    } else {
      in_word = false;
    }
  }
  return count;
}

inline std::size_t word_count(std::string_view text) {
  const std::u32string decoded = utf8::decode(text);
  return word_count(std::u32string_view(decoded));
}

// ---------------------------------------------------------------------------
// Sentences

struct Sentence {
  std::string text;
  std::pair<std::size_t, std::size_t> char_span;  // [start, end) code points
  bool operator==(const Sentence&) const = default;
};

inline constexpr std::array<std::u32string_view, 8> kAbbreviations = {
    U"mr.", U"mrs.", U"dr.", U"st.", U"vs.", U"e.g.", U"i.e.", U"etc."};

namespace detail {

/// True when the '.' at `dot` closes one of the stoplisted abbreviations.
inline bool ends_abbreviation(std::u32string_view text, std::size_t dot) {
  std::size_t start = dot;
  while (start > 0 && !is_space(text[start - 1])) --start;
  while (start < dot && is_opening_quote(text[start])) ++start;
  std::u32string word;
  for (std::size_t k = start; k <= dot; ++k) word.push_back(to_lower(text[k]));
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) !=
         kAbbreviations.end();
}

}  // namespace detail

/// Splits at '.', '!' or '?' (plus any run of further terminators and closing
/// quotes/brackets) when followed by end of text, or by whitespace and then
/// an uppercase letter, opening quote or digit. A single '.' ending a
/// stoplisted abbreviation never splits. Sentence texts exclude surrounding
/// whitespace, so the input is exactly the sentences plus the gaps between
/// their spans.
inline std::vector<Sentence> split_sentences(std::u32string_view text) {
  std::vector<Sentence> out;
  const std::size_t n = text.size();
  auto skip_space = [&](std::size_t k) {
    while (k < n && is_space(text[k])) ++k;
    return k;
  };
  auto emit = [&](std::size_t b, std::size_t e) {
    out.push_back({utf8::encode(text.substr(b, e - b)), {b, e}});
  };

  std::size_t start = skip_space(0);
  std::size_t k = start;
  while (k < n) {
    if (!is_terminator(text[k])) {
      ++k;
      continue;
    }
    const std::size_t first_term = k;
    std::size_t end = k + 1;
    while (end < n && is_terminator(text[end])) ++end;
    while (end < n && is_closing_punct(text[end])) ++end;

    bool boundary = false;
    if (end == n) {
      boundary = true;
    } else if (is_space(text[end])) {
      const std::size_t next = skip_space(end);
      boundary = next == n || is_upper(text[next]) ||
                 is_opening_quote(text[next]) || is_ascii_digit(text[next]);
    }
    const bool lone_dot = text[first_term] == U'.' &&
                          (first_term + 1 == n || !is_terminator(text[first_term + 1]));
    if (boundary && lone_dot && detail::ends_abbreviation(text, first_term)) {
      boundary = false;
    }
    if (boundary) {
      emit(start, end);
      start = skip_space(end);
      k = start;
    } else {
      k = end;
    }
  }
  if (start < n) {
    std::size_t e = n;
    while (e > start && is_space(text[e - 1])) --e;
    if (e > start) emit(start, e);
  }
  return out;
}

inline std::vector<Sentence> split_sentences(std::string_view text) {
  const std::u32string decoded = utf8::decode(text);
  return split_sentences(std::u32string_view(decoded));
}

inline std::vector<std::string> sentence_texts(std::string_view text) {
  std::vector<std::string> out;
  for (auto& s : split_sentences(text)) out.push_back(std::move(s.text));
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

enum class SimilarityMetricId { edit, semantic, paraphrase };

inline constexpr SimilarityMetricId kAllMetrics[] = {
    SimilarityMetricId::edit, SimilarityMetricId::semantic,
    SimilarityMetricId::paraphrase};

inline const char* to_string(SimilarityMetricId m) {
  switch (m) {
    case SimilarityMetricId::edit: return "edit";
    case SimilarityMetricId::semantic: return "semantic";
    case SimilarityMetricId::paraphrase: return "paraphrase";
  }
  return "?";
}

inline std::optional<SimilarityMetricId> parse_metric(std::string_view s) {
  for (auto m : kAllMetrics) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

/// Unit-cost Levenshtein distance (no transpositions), two-row DP.
inline std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({sub, up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[b.size()];
}

/// 1 - d(a, b) / max(|a|, |b|); 1 when both are empty.
inline double edit_similarity(std::string_view a, std::string_view b) {
  const std::u32string ua = utf8::decode(a);
  const std::u32string ub = utf8::decode(b);
  const std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(ua, ub)) /
                   static_cast<double>(longest);
}

/// Cosine of lowercase term-frequency vectors over word tokens.
inline double lexical_cosine(std::string_view a, std::string_view b) {
  std::map<std::u32string, long long> ta, tb;
  for (auto& t : tokenize(a)) ++ta[std::move(t)];
  for (auto& t : tokenize(b)) ++tb[std::move(t)];
  if (ta.empty() || tb.empty()) return 0.0;
  long long dot = 0, na = 0, nb = 0;
  for (const auto& [tok, c] : ta) {
    na += c * c;
    if (auto it = tb.find(tok); it != tb.end()) dot += c * it->second;
  }
  for (const auto& [tok, c] : tb) nb += c * c;
  // Integer norms keep identical inputs at exactly 1.
  const double cos = static_cast<double>(dot) /
                     std::sqrt(static_cast<double>(na) * static_cast<double>(nb));
  return std::clamp(cos, 0.0, 1.0);
}

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// ---------------------------------------------------------------------------
// Providers

/// Sentence embedder. Implementations must be deterministic and safe for
/// concurrent calls.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<double> embed(std::string_view text) const = 0;
  virtual std::vector<std::vector<double>> embed_batch(
      std::span<const std::string> texts) const {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t));
    return out;
  }
};

/// Paraphrase detector returning a probability in [0, 1].
class ParaphraseProvider {
 public:
  virtual ~ParaphraseProvider() = default;
  virtual double score(std::string_view a, std::string_view b) const = 0;
  virtual std::vector<double> score_batch(
      std::span<const std::pair<std::string, std::string>> pairs) const {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& [a, b] : pairs) out.push_back(score(a, b));
    return out;
  }
};

/// Offline paraphrase stand-in: logistic(6 * lexical_cosine - 3).
class LexicalParaphraseStub final : public ParaphraseProvider {
 public:
  double score(std::string_view a, std::string_view b) const override {
    return logistic(6.0 * lexical_cosine(a, b) - 3.0);
  }
};

/// Providers used by the semantic and paraphrase metrics. A null embedder
/// selects the built-in lexical cosine; a null paraphraser selects
/// LexicalParaphraseStub. Pointees must outlive every call.
struct Providers {
  const EmbeddingProvider* embedder = nullptr;
  const ParaphraseProvider* paraphraser = nullptr;
};

/// Cosine clamped into [0, 1]; a zero vector on either side gives 0.
inline double clamped_cosine(std::span<const double> a,
                             std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::ProviderFailure,
                "embedding dimensions differ: " + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

namespace detail {

template <typename F>
auto with_provider_context(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ProviderFailure) {
      throw Error(ErrorKind::ProviderFailure,
                  std::string(what) + ": " + e.what());
    }
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::ProviderFailure, std::string(what) + ": " + e.what());
  }
}

inline double check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::ProviderFailure,
                "paraphrase score outside [0,1]: " + std::to_string(p));
  }
  return p;
}

}  // namespace detail

inline double semantic_similarity(const EmbeddingProvider& provider,
                                  std::string_view a, std::string_view b) {
  return detail::with_provider_context("semantic_similarity", [&] {
    const auto va = provider.embed(a);
    const auto vb = provider.embed(b);
    return clamped_cosine(va, vb);
  });
}

inline double paraphrase_score(const ParaphraseProvider& provider,
                               std::string_view a, std::string_view b) {
  return detail::with_provider_context("paraphrase_score", [&] {
    return detail::check_probability(provider.score(a, b));
  });
}

inline double similarity(SimilarityMetricId metric, std::string_view a,
                         std::string_view b, const Providers& providers = {}) {
  switch (metric) {
    case SimilarityMetricId::edit:
      return edit_similarity(a, b);
    case SimilarityMetricId::semantic:
      return providers.embedder
                 ? semantic_similarity(*providers.embedder, a, b)
                 : lexical_cosine(a, b);
    case SimilarityMetricId::paraphrase:
      if (providers.paraphraser) {
        return paraphrase_score(*providers.paraphraser, a, b);
      }
      return LexicalParaphraseStub{}.score(a, b);
  }
  return 0.0;
}

/// Every metric(s_i, n_j), row-major over suggestion sentences. Remote
/// providers are called once per batch rather than once per pair.
inline std::vector<double> pairwise_scores(
    SimilarityMetricId metric, std::span<const std::string> suggestion,
    std::span<const std::string> fresh, const Providers& providers = {}) {
  std::vector<double> out;
  out.reserve(suggestion.size() * fresh.size());
  if (suggestion.empty() || fresh.empty()) return out;

  if (metric == SimilarityMetricId::semantic && providers.embedder) {
    const auto vectors =
        detail::with_provider_context("semantic_similarity", [&] {
          std::vector<std::string> all(suggestion.begin(), suggestion.end());
          all.insert(all.end(), fresh.begin(), fresh.end());
          auto v = providers.embedder->embed_batch(all);
          if (v.size() != all.size()) {
            throw Error(ErrorKind::ProviderFailure,
                        "embedder returned " + std::to_string(v.size()) +
                            " vectors for " + std::to_string(all.size()) +
                            " texts");
          }
          return v;
        });
    for (std::size_t i = 0; i < suggestion.size(); ++i) {
      for (std::size_t j = 0; j < fresh.size(); ++j) {
        out.push_back(
            clamped_cosine(vectors[i], vectors[suggestion.size() + j]));
      }
    }
    return out;
  }
  if (metric == SimilarityMetricId::paraphrase && providers.paraphraser) {
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(suggestion.size() * fresh.size());
    for (const auto& s : suggestion) {
      for (const auto& f : fresh) pairs.emplace_back(s, f);
    }
    auto scores = detail::with_provider_context("paraphrase_score", [&] {
      auto v = providers.paraphraser->score_batch(pairs);
      if (v.size() != pairs.size()) {
        throw Error(ErrorKind::ProviderFailure,
                    "paraphraser returned " + std::to_string(v.size()) +
                        " scores for " + std::to_string(pairs.size()) +
                        " pairs");
      }
      for (double p : v) detail::check_probability(p);
      return v;
    });
    return scores;
  }
  for (const auto& s : suggestion) {
    for (const auto& f : fresh) out.push_back(similarity(metric, s, f, providers));
  }
  return out;
}

/// Highest pairwise score, or nullopt when either side has no sentences.
inline std::optional<double> max_pairwise_influence(
    SimilarityMetricId metric, std::span<const std::string> suggestion,
    std::span<const std::string> fresh, const Providers& providers = {}) {
  if (suggestion.empty() || fresh.empty()) return std::nullopt;
  const auto scores = pairwise_scores(metric, suggestion, fresh, providers);
  return *std::max_element(scores.begin(), scores.end());
}

}  // namespace inkflux::textmetrics
