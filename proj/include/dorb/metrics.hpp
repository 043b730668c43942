#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dorb {

using Token = std::int32_t;
using TokenSeq = std::vector<Token>;

enum class MetricKind { RougeL, Bleu, Coverage, Synthetic };

struct MetricId {
  std::string name;
  std::size_t index = 0;
};

// Values indexed by MetricId::index.
using MetricVector = std::vector<double>;

std::size_t lcs_length(std::span<const Token> a, std::span<const Token> b);

// ROUGE-L with beta = 1. Zero when either side is empty or shares no subsequence.
double rouge_l_f1(std::span<const Token> candidate, std::span<const Token> reference);

inline constexpr double kBleuEpsilon = 0.1;

// Clipped n-gram matches and candidate n-gram totals for n = 1..max_n
// (entry n-1). Sums over pairs give corpus-level statistics.
struct NgramStats {
  std::vector<double> matches;
  std::vector<double> totals;
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;

  explicit NgramStats(std::size_t max_n = 4) : matches(max_n, 0.0), totals(max_n, 0.0) {}
  NgramStats& operator+=(const NgramStats& other);
};

NgramStats ngram_stats(std::span<const Token> candidate, std::span<const Token> reference, std::size_t max_n = 4);

// Geometric mean of max(matches, eps) / totals over the orders the candidate
// has n-grams for, times the brevity penalty exp(1 - ref/cand) when
// cand < ref. Zero for an empty candidate.
double bleu_from_stats(const NgramStats& stats, double epsilon = kBleuEpsilon);

// Sentence-level smoothed BLEU.
double bleu(std::span<const Token> candidate, std::span<const Token> reference, std::size_t max_n = 4);

// Corpus-level BLEU over aggregated n-gram counts.
double corpus_bleu(std::span<const TokenSeq> candidates, std::span<const TokenSeq> references, std::size_t max_n = 4);

// Fraction of keywords present at least once in the candidate. Duplicate
// keywords count once. Throws on an empty keyword set.
double keyword_coverage(std::span<const Token> candidate, std::span<const Token> keywords);

}  // namespace dorb
