#include "dorb/metrics.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>

namespace dorb {

namespace {

// Bit-vector LCS (one 64-bit word) for |b| <= 64: bit j of V is cleared once
// b[j] has been used by the running subsequence.
std::size_t lcs_bit_parallel(std::span<const Token> a, std::span<const Token> b) {
  std::array<Token, 64> symbols;  // entries below `distinct` are always written first
  std::array<std::uint64_t, 64> masks;
  std::size_t distinct = 0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    std::size_t s = 0;
    while (s < distinct && symbols[s] != b[j]) ++s;
    if (s == distinct) {
      symbols[distinct] = b[j];
      masks[distinct++] = 0;
    }
    masks[s] |= std::uint64_t{1} << j;
  }
  std::uint64_t v = ~std::uint64_t{0};
  for (Token c : a) {
    std::size_t s = 0;
    while (s < distinct && symbols[s] != c) ++s;
    if (s == distinct) continue;
    const std::uint64_t u = v & masks[s];
    v = (v + u) | (v - u);
  }
  const std::uint64_t live = b.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << b.size()) - 1;
  return b.size() - static_cast<std::size_t>(std::popcount(v & live));
}

}  // namespace

std::size_t lcs_length(std::span<const Token> a, std::span<const Token> b) {
  if (a.empty() || b.empty()) return 0;
  if (b.size() > a.size()) std::swap(a, b);
  if (b.size() <= 64) return lcs_bit_parallel(a, b);
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l_f1(std::span<const Token> candidate, std::span<const Token> reference) {
  const auto lcs = static_cast<double>(lcs_length(candidate, reference));
  if (lcs == 0.0) return 0.0;
  const double precision = lcs / static_cast<double>(candidate.size());
  const double recall = lcs / static_cast<double>(reference.size());
  return 2.0 * precision * recall / (precision + recall);
}

NgramStats& NgramStats::operator+=(const NgramStats& other) {
  if (other.matches.size() != matches.size()) throw std::invalid_argument("ngram stats: max_n mismatch");
  for (std::size_t n = 0; n < matches.size(); ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
  return *this;
}

namespace {

bool ngram_less(std::span<const Token> a, std::span<const Token> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// All n-grams of seq as views into it, sorted lexicographically.
std::vector<std::span<const Token>> sorted_ngrams(std::span<const Token> seq, std::size_t n) {
  std::vector<std::span<const Token>> grams;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) grams.push_back(seq.subspan(i, n));
  std::sort(grams.begin(), grams.end(), ngram_less);
  return grams;
}

// Sum over distinct n-grams of min(count in a, count in b), by merging sorted lists.
std::size_t clipped_matches(const std::vector<std::span<const Token>>& a, const std::vector<std::span<const Token>>& b) {
  std::size_t matched = 0, i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (ngram_less(a[i], b[j])) {
      ++i;
    } else if (ngram_less(b[j], a[i])) {
      ++j;
    } else {
      ++matched;
      ++i;
      ++j;
    }
  }
  return matched;
}

}  // namespace

NgramStats ngram_stats(std::span<const Token> candidate, std::span<const Token> reference, std::size_t max_n) {
  if (max_n == 0) throw std::invalid_argument("bleu: max_n must be at least 1");
  NgramStats stats(max_n);
  stats.candidate_length = candidate.size();
  stats.reference_length = reference.size();
  for (std::size_t n = 1; n <= max_n; ++n) {
    stats.matches[n - 1] = static_cast<double>(clipped_matches(sorted_ngrams(candidate, n), sorted_ngrams(reference, n)));
    stats.totals[n - 1] = candidate.size() >= n ? static_cast<double>(candidate.size() - n + 1) : 0.0;
  }
  return stats;
}

double bleu_from_stats(const NgramStats& stats, double epsilon) {
  if (stats.candidate_length == 0) return 0.0;
  // Orders longer than the candidate have no n-grams and are left out of the mean.
  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 0; n < stats.matches.size(); ++n) {
    if (stats.totals[n] == 0.0) continue;
    log_sum += std::log(std::max(stats.matches[n], epsilon) / stats.totals[n]);
    ++orders;
  }
  double score = std::exp(log_sum / static_cast<double>(orders));
  if (stats.candidate_length < stats.reference_length) {
    score *= std::exp(1.0 - static_cast<double>(stats.reference_length) / static_cast<double>(stats.candidate_length));
  }
  return std::clamp(score, 0.0, 1.0);
}

double bleu(std::span<const Token> candidate, std::span<const Token> reference, std::size_t max_n) {
  return bleu_from_stats(ngram_stats(candidate, reference, max_n));
}

double corpus_bleu(std::span<const TokenSeq> candidates, std::span<const TokenSeq> references, std::size_t max_n) {
  if (candidates.size() != references.size()) throw std::invalid_argument("corpus bleu: size mismatch");
  NgramStats total(max_n);
  for (std::size_t i = 0; i < candidates.size(); ++i) total += ngram_stats(candidates[i], references[i], max_n);
  return bleu_from_stats(total);
}

double keyword_coverage(std::span<const Token> candidate, std::span<const Token> keywords) {
  if (keywords.empty()) throw std::invalid_argument("keyword coverage: empty keyword set");
  const std::set<Token> wanted(keywords.begin(), keywords.end());
  const std::set<Token> present(candidate.begin(), candidate.end());
  std::size_t hit = 0;
  for (Token t : wanted) hit += present.count(t);
  return static_cast<double>(hit) / static_cast<double>(wanted.size());
}

}  // namespace dorb
