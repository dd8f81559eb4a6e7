#include "coordterm/simkit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace coordterm {

namespace {

bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

double ContextDistribution::probability(const std::string& context) const {
  auto it = probs.find(context);
  return it == probs.end() ? tail_unit : it->second;
}

ContextDistribution make_distribution(const std::map<std::string, long long>& counts,
                                      const std::set<std::string>& union_support,
                                      double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("make_distribution: negative lambda");
  long long total = 0;
  for (const auto& [context, count] : counts) {
    if (count < 0) throw std::invalid_argument("make_distribution: negative count for " + context);
    if (union_support.find(context) == union_support.end())
      throw std::invalid_argument("make_distribution: context outside union support: " + context);
    total += count;
  }
  if (total <= 0) throw std::invalid_argument("make_distribution: no observations");

  ContextDistribution dist;
  dist.lambda = lambda;
  dist.union_size = static_cast<long long>(union_support.size());
  const double denom = static_cast<double>(total) +
                       lambda * static_cast<double>(union_support.size());
  long long observed = 0;
  for (const auto& [context, count] : counts) {
    if (count == 0) continue;  // zero counts fall into the tail
    dist.probs[context] = (static_cast<double>(count) + lambda) / denom;
    ++observed;
  }
  dist.tail_count = dist.union_size - observed;
  dist.tail_unit = lambda / denom;
  return dist;
}

namespace {

// One direction D(p||q) over the shared universe, decomposed into observed
// and tail regions.
double kl_directed(const ContextDistribution& p, const ContextDistribution& q) {
  double d = 0.0;
  long long joint_observed = static_cast<long long>(p.probs.size());
  for (const auto& [context, pp] : p.probs) {
    d += pp * std::log(pp / q.probability(context));
  }
  for (const auto& [context, qq] : q.probs) {
    if (p.probs.find(context) != p.probs.end()) continue;
    ++joint_observed;
    if (p.tail_unit > 0.0) d += p.tail_unit * std::log(p.tail_unit / qq);
  }
  const long long rest = p.union_size - joint_observed;
  if (rest > 0 && p.tail_unit > 0.0) {
    d += static_cast<double>(rest) * p.tail_unit * std::log(p.tail_unit / q.tail_unit);
  }
  return d;
}

}  // namespace

double sym_kl(const ContextDistribution& p, const ContextDistribution& q) {
  if (p.union_size != q.union_size)
    throw std::invalid_argument("sym_kl: distributions built over different supports");
  return kl_directed(p, q) + kl_directed(q, p);
}

std::vector<std::string> camel_tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    for (char& c : current) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    tokens.push_back(current);
    current.clear();
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (!is_alnum(c)) {  // . _ $ - and any other punctuation separate tokens
      flush();
      continue;
    }
    if (!current.empty()) {
      const char prev = current.back();
      const bool case_boundary = is_lower(prev) && is_upper(c);
      const bool digit_boundary =
          (is_alpha(prev) && is_digit(c)) || (is_digit(prev) && is_alpha(c));
      // End of an upper-case run followed by a lower-case tail: the last
      // upper char starts the next token (GZIPOutputStream -> gzip|output...).
      const bool run_boundary =
          is_upper(prev) && is_upper(c) && i + 1 < s.size() && is_lower(s[i + 1]);
      if (case_boundary || digit_boundary || run_boundary) flush();
    }
    current.push_back(c);
  }
  flush();
  return tokens;
}

double jaro_winkler(std::string_view a, std::string_view b) {
  if (a == b) return 1.0;
  if (a.empty() || b.empty()) return 0.0;

  const int la = static_cast<int>(a.size());
  const int lb = static_cast<int>(b.size());
  const int window = std::max(std::max(la, lb) / 2 - 1, 0);

  std::vector<char> a_match(a.size(), 0), b_match(b.size(), 0);
  int matches = 0;
  for (int i = 0; i < la; ++i) {
    const int lo = std::max(0, i - window);
    const int hi = std::min(lb - 1, i + window);
    for (int j = lo; j <= hi; ++j) {
      if (b_match[j] || a[i] != b[j]) continue;
      a_match[i] = b_match[j] = 1;
      ++matches;
      break;
    }
  }
  if (matches == 0) return 0.0;

  int transpositions = 0;
  for (int i = 0, j = 0; i < la; ++i) {
    if (!a_match[i]) continue;
    while (!b_match[j]) ++j;
    if (a[i] != b[j]) ++transpositions;
    ++j;
  }
  transpositions /= 2;

  const double m = matches;
  const double jaro = (m / la + m / lb + (m - transpositions) / m) / 3.0;

  int prefix = 0;
  for (int i = 0; i < std::min({la, lb, 4}); ++i) {
    if (a[i] != b[i]) break;
    ++prefix;
  }
  return jaro + prefix * 0.1 * (1.0 - jaro);
}

IdfTable IdfTable::build(const std::vector<std::string>& documents) {
  IdfTable table;
  table.n_docs_ = documents.size();
  for (const auto& doc : documents) {
    std::set<std::string> seen;
    for (const auto& token : camel_tokenize(doc)) seen.insert(token);
    for (const auto& token : seen) ++table.df_[token];
  }
  return table;
}

double IdfTable::idf(const std::string& token) const {
  if (n_docs_ == 0) return 1.0;
  long long df = 0;
  if (auto it = df_.find(token); it != df_.end()) df = it->second;
  const double raw = std::log(static_cast<double>(n_docs_) / static_cast<double>(df + 1));
  return std::max(raw, 1e-6);  // keep weights positive so normalization is defined
}

namespace {

struct WeightedTokens {
  std::vector<std::string> tokens;  // unique, sorted
  std::vector<double> weights;      // L2-normalized
};

WeightedTokens weigh(std::string_view s, const IdfTable& idf) {
  std::map<std::string, long long> tf;
  for (const auto& token : camel_tokenize(s)) ++tf[token];
  WeightedTokens out;
  double norm2 = 0.0;
  for (const auto& [token, count] : tf) {
    const double w = std::log(1.0 + static_cast<double>(count)) * idf.idf(token);
    out.tokens.push_back(token);
    out.weights.push_back(w);
    norm2 += w * w;
  }
  const double norm = std::sqrt(norm2);
  if (norm > 0.0)
    for (double& w : out.weights) w /= norm;
  return out;
}

}  // namespace

double soft_tfidf(std::string_view a, std::string_view b, const IdfTable& idf,
                  double theta) {
  const WeightedTokens wa = weigh(a, idf);
  const WeightedTokens wb = weigh(b, idf);
  if (wa.tokens.empty() || wb.tokens.empty()) return 0.0;

  struct Candidate {
    double jw;
    std::string lo, hi;  // orientation-free tie-break keys
    std::size_t ia, ib;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < wa.tokens.size(); ++i) {
    for (std::size_t j = 0; j < wb.tokens.size(); ++j) {
      const double jw = jaro_winkler(wa.tokens[i], wb.tokens[j]);
      if (jw < theta) continue;
      const auto& ta = wa.tokens[i];
      const auto& tb = wb.tokens[j];
      candidates.push_back({jw, std::min(ta, tb), std::max(ta, tb), i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(y.jw, x.lo, x.hi, x.ia, x.ib) < std::tie(x.jw, y.lo, y.hi, y.ia, y.ib);
  });

  std::vector<char> used_a(wa.tokens.size(), 0), used_b(wb.tokens.size(), 0);
  double score = 0.0;
  for (const auto& c : candidates) {
    if (used_a[c.ia] || used_b[c.ib]) continue;
    used_a[c.ia] = used_b[c.ib] = 1;
    score += wa.weights[c.ia] * wb.weights[c.ib] * c.jw;
  }
  return std::clamp(score, 0.0, 1.0);
}

}  // namespace coordterm
