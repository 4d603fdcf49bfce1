#pragma once

// Synthetic vocabularies and sentences. Vocabularies built from disjoint
// letter sets share no token and no letter, which keeps cross-vocabulary
// similarity close to zero under every metric.

#include <algorithm>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "inkflux/error.hpp"
#include "inkflux/stats.hpp"

namespace inkflux::wordgen {

inline constexpr std::string_view kTypingLetters = "abcdefghijklm";
inline constexpr std::string_view kSuggestionLetters = "nopqrstuvwxyz";

/// `count` distinct lowercase words of 4..8 letters drawn from `letters`.
inline std::vector<std::string> make_vocabulary(std::string_view letters,
                                                std::size_t count,
                                                std::uint64_t seed) {
  stats::SeededRng rng(seed);
  std::set<std::string> seen;
  std::vector<std::string> out;
  out.reserve(count);
  while (out.size() < count) {
    const std::size_t len = 4 + rng.uniform_index(5);
    std::string w;
    for (std::size_t i = 0; i < len; ++i) {
      w.push_back(letters[rng.uniform_index(letters.size())]);
    }
    if (seen.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

inline const std::vector<std::string>& default_typing_vocabulary() {
  static const std::vector<std::string> v =
      make_vocabulary(kTypingLetters, 400, 0x7479706eULL);
  return v;
}

inline const std::vector<std::string>& default_suggestion_vocabulary() {
  static const std::vector<std::string> v =
      make_vocabulary(kSuggestionLetters, 400, 0x73756767ULL);
  return v;
}

inline std::string capitalize(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 32);
  return w;
}

/// Joins words as "Word word word." (first word capitalized).
inline std::string as_sentence(std::span<const std::string> words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += i == 0 ? capitalize(words[i]) : words[i];
  }
  out.push_back('.');
  return out;
}

/// Picks `n` distinct vocabulary words not in `used`, adding them to it.
inline std::vector<std::string> draw_distinct(std::span<const std::string> vocab,
                                              std::size_t n,
                                              std::set<std::string>& used,
                                              stats::SeededRng& rng) {
  if (used.size() + n > vocab.size()) {
    throw Error(ErrorKind::InvalidConfig,
                "vocabulary too small for distinct draws");
  }
  std::vector<std::string> out;
  while (out.size() < n) {
    const auto& w = vocab[rng.uniform_index(vocab.size())];
    if (used.insert(w).second) out.push_back(w);
  }
  return out;
}

/// 1..max_sentences sentences of min_words..max_words words; every word of
/// the text is distinct.
inline std::string distinct_word_text(std::span<const std::string> vocab,
                                      std::size_t max_sentences,
                                      std::size_t min_words,
                                      std::size_t max_words,
                                      stats::SeededRng& rng) {
  std::set<std::string> used;
  const std::size_t sentences = 1 + rng.uniform_index(max_sentences);
  std::string out;
  for (std::size_t s = 0; s < sentences; ++s) {
    const std::size_t n = min_words + rng.uniform_index(max_words - min_words + 1);
    const auto words = draw_distinct(vocab, n, used, rng);
    if (s) out.push_back(' ');
    out += as_sentence(words);
  }
  return out;
}

}  // namespace inkflux::wordgen
