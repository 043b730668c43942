#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "dorb/metrics.hpp"

using dorb::Token;
using dorb::TokenSeq;

namespace {

bool is_subsequence(const TokenSeq& s, const TokenSeq& of) {
  std::size_t j = 0;
  for (Token t : of) {
    if (j < s.size() && s[j] == t) ++j;
  }
  return j == s.size();
}

// Longest subsequence of `a` (all 2^|a| of them) that also occurs in `b`.
std::size_t brute_lcs(const TokenSeq& a, const TokenSeq& b) {
  std::size_t best = 0;
  for (unsigned mask = 0; mask < (1u << a.size()); ++mask) {
    TokenSeq s;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (mask & (1u << i)) s.push_back(a[i]);
    }
    if (s.size() > best && is_subsequence(s, b)) best = s.size();
  }
  return best;
}

TokenSeq random_seq(std::mt19937_64& rng, std::size_t max_len, int alphabet) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<Token> tok(0, alphabet - 1);
  TokenSeq s(len(rng));
  for (auto& t : s) t = tok(rng);
  return s;
}

std::size_t count_ngram(const TokenSeq& s, const TokenSeq& gram) {
  std::size_t c = 0;
  for (std::size_t i = 0; i + gram.size() <= s.size(); ++i) {
    if (std::equal(gram.begin(), gram.end(), s.begin() + static_cast<std::ptrdiff_t>(i))) ++c;
  }
  return c;
}

// Clipped matches by scanning candidate n-grams; each distinct gram counted at its first occurrence.
void naive_counts(const TokenSeq& cand, const TokenSeq& ref, std::size_t n, double& matches, double& total) {
  matches = 0;
  total = cand.size() >= n ? static_cast<double>(cand.size() - n + 1) : 0.0;
  for (std::size_t i = 0; i + n <= cand.size(); ++i) {
    TokenSeq gram(cand.begin() + static_cast<std::ptrdiff_t>(i), cand.begin() + static_cast<std::ptrdiff_t>(i + n));
    bool seen = false;
    for (std::size_t j = 0; j < i && !seen; ++j) {
      seen = std::equal(gram.begin(), gram.end(), cand.begin() + static_cast<std::ptrdiff_t>(j));
    }
    if (seen) continue;
    matches += static_cast<double>(std::min(count_ngram(cand, gram), count_ngram(ref, gram)));
  }
}

}  // namespace

TEST_CASE("lcs against brute force, all short pairs") {
  // Every pair of sequences over {0,1,2} with length <= 4.
  std::vector<TokenSeq> all{{}};
  for (std::size_t l = 1; l <= 4; ++l) {
    std::size_t count = 1;
    for (std::size_t i = 0; i < l; ++i) count *= 3;
    for (std::size_t code = 0; code < count; ++code) {
      TokenSeq s;
      for (std::size_t c = code, i = 0; i < l; ++i, c /= 3) s.push_back(static_cast<Token>(c % 3));
      all.push_back(s);
    }
  }
  for (const auto& a : all) {
    for (const auto& b : all) REQUIRE(dorb::lcs_length(a, b) == brute_lcs(a, b));
  }
}

TEST_CASE("lcs against brute force, random longer pairs") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 3000; ++i) {
    const auto a = random_seq(rng, 10, 3), b = random_seq(rng, 12, 3);
    REQUIRE(dorb::lcs_length(a, b) == brute_lcs(a, b));
    REQUIRE(dorb::lcs_length(b, a) == dorb::lcs_length(a, b));
  }
}

TEST_CASE("rouge-l worked examples") {
  CHECK(std::abs(dorb::rouge_l_f1(TokenSeq{0, 2, 3}, TokenSeq{0, 1, 2, 3}) - 6.0 / 7.0) < 1e-15);
  CHECK(dorb::rouge_l_f1(TokenSeq{1, 2, 3}, TokenSeq{1, 2, 3}) == 1.0);
  CHECK(dorb::rouge_l_f1(TokenSeq{1, 2}, TokenSeq{3, 4}) == 0.0);
  CHECK(dorb::rouge_l_f1(TokenSeq{}, TokenSeq{1}) == 0.0);
  CHECK(dorb::rouge_l_f1(TokenSeq{1}, TokenSeq{}) == 0.0);
}

TEST_CASE("rouge-l symmetric and bounded") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_seq(rng, 15, 5), b = random_seq(rng, 15, 5);
    const double f = dorb::rouge_l_f1(a, b);
    REQUIRE(f >= 0.0);
    REQUIRE(f <= 1.0);
    REQUIRE(f == doctest::Approx(dorb::rouge_l_f1(b, a)).epsilon(1e-15));
  }
}

TEST_CASE("clipped unigram precision") {
  const auto st = dorb::ngram_stats(TokenSeq{0, 0, 1}, TokenSeq{0, 1, 2}, 4);
  CHECK(st.matches[0] == 2.0);
  CHECK(st.totals[0] == 3.0);
  CHECK(std::abs(dorb::bleu(TokenSeq{0, 0, 1}, TokenSeq{0, 1, 2}, 1) - 2.0 / 3.0) < 1e-15);
}

TEST_CASE("n-gram counts against naive oracle") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 500; ++i) {
    const auto cand = random_seq(rng, 14, 4), ref = random_seq(rng, 14, 4);
    const auto st = dorb::ngram_stats(cand, ref, 4);
    CHECK(st.candidate_length == cand.size());
    CHECK(st.reference_length == ref.size());
    for (std::size_t n = 1; n <= 4; ++n) {
      double m = 0, t = 0;
      naive_counts(cand, ref, n, m, t);
      REQUIRE(st.matches[n - 1] == m);
      REQUIRE(st.totals[n - 1] == t);
    }
  }
}

TEST_CASE("bleu identity, bounds and smoothing") {
  const TokenSeq s{3, 1, 4, 1, 5, 9};
  CHECK(dorb::bleu(s, s) == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t len = 1; len <= 3; ++len) {
    const TokenSeq prefix(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(len));
    CHECK(dorb::bleu(prefix, prefix) == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(dorb::bleu(TokenSeq{}, s) == 0.0);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_seq(rng, 12, 4), b = random_seq(rng, 12, 4);
    const double v = dorb::bleu(a, b);
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0 + 1e-15);
  }
  // Disjoint vocabularies: every precision is floored at eps / total.
  for (std::size_t len = 1; len <= 20; ++len) {
    TokenSeq a(len, 0), b(len, 1);
    const double v = dorb::bleu(a, b);
    CHECK(v <= dorb::kBleuEpsilon + 1e-15);
    if (len >= 12) CHECK(v < 0.01);
  }
}

TEST_CASE("brevity penalty") {
  const TokenSeq ref{1, 2, 3, 4, 5, 6, 7, 8};
  const TokenSeq cand{1, 2, 3, 4};
  const auto st = dorb::ngram_stats(cand, ref);
  double logp = 0.0;
  for (std::size_t n = 0; n < 4; ++n) logp += std::log(std::max(st.matches[n], 0.1) / std::max(st.totals[n], 1.0));
  const double expect = std::exp(1.0 - 8.0 / 4.0) * std::exp(logp / 4.0);
  CHECK(std::abs(dorb::bleu(cand, ref) - expect) < 1e-15);
}

TEST_CASE("corpus bleu aggregates counts") {
  std::vector<TokenSeq> c{{1, 2, 3, 4}, {5, 6, 7}}, r{{1, 2, 3, 5}, {5, 6, 7, 8}};
  auto st = dorb::ngram_stats(c[0], r[0]);
  st += dorb::ngram_stats(c[1], r[1]);
  CHECK(dorb::corpus_bleu(c, r) == dorb::bleu_from_stats(st));
  CHECK(st.candidate_length == 7);
  CHECK(st.reference_length == 8);
  CHECK_THROWS(dorb::corpus_bleu(c, std::vector<TokenSeq>{{1}}));
}

TEST_CASE("keyword coverage") {
  CHECK(dorb::keyword_coverage(TokenSeq{1, 2, 3}, TokenSeq{1, 4}) == 0.5);
  CHECK(dorb::keyword_coverage(TokenSeq{}, TokenSeq{1}) == 0.0);
  CHECK(dorb::keyword_coverage(TokenSeq{1, 1}, TokenSeq{1, 1, 2}) == 0.5);
  CHECK(dorb::keyword_coverage(TokenSeq{4, 3, 2, 1}, TokenSeq{1, 2, 3, 4}) == 1.0);
  CHECK_THROWS_AS(dorb::keyword_coverage(TokenSeq{1}, TokenSeq{}), std::invalid_argument);
}
