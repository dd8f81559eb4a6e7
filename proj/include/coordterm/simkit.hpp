#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace coordterm {

// Smoothed categorical distribution over a shared context universe.
// Only observed contexts are stored explicitly; every unobserved universe
// context carries the same implicit probability `tail_unit`.
struct ContextDistribution {
  std::map<std::string, double> probs;  // observed contexts
  double tail_unit = 0.0;               // probability of one unobserved context
  long long tail_count = 0;             // number of unobserved contexts
  long long union_size = 0;             // size of the shared universe
  double lambda = 0.0;

  double smoothing_mass() const {
    return tail_unit * static_cast<double>(tail_count);
  }
  // Probability of `context`, which must belong to the shared universe.
  double probability(const std::string& context) const;
};

// Additive smoothing over `union_support`:
//   p(c) = (count(c) + lambda) / (sum counts + lambda * |union_support|)
// Zero-count entries are folded into the smoothing tail.
ContextDistribution make_distribution(const std::map<std::string, long long>& counts,
                                      const std::set<std::string>& union_support,
                                      double lambda);

// Symmetrized relative entropy D(p||q) + D(q||p), natural log. Both
// distributions must have been built over the same union support.
double sym_kl(const ContextDistribution& p, const ContextDistribution& q);

// Splits identifier-style strings at case and digit boundaries and on the
// separators . _ $ -; tokens come back lower-cased.
std::vector<std::string> camel_tokenize(std::string_view s);

double jaro_winkler(std::string_view a, std::string_view b);

// Inverse document frequencies over camel-tokenized strings.
class IdfTable {
 public:
  IdfTable() = default;
  static IdfTable build(const std::vector<std::string>& documents);

  double idf(const std::string& token) const;
  std::size_t document_count() const { return n_docs_; }

 private:
  std::map<std::string, long long> df_;
  std::size_t n_docs_ = 0;
};

// Token-level TFIDF similarity with soft (Jaro-Winkler) token matching.
// Matching is greedy best-first and one-to-one, which makes the score
// symmetric; both weight vectors are L2-normalized, so the result lies in
// [0, 1].
double soft_tfidf(std::string_view a, std::string_view b, const IdfTable& idf,
                  double theta = 0.9);

}  // namespace coordterm
