#include "coordterm/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "coordterm/rng.hpp"

namespace coordterm {

bool mention_filter(std::string_view word) {
  if (word.empty()) return false;
  int upper = 0, lower = 0;
  for (const char c : word) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u) == 0) return false;
    if (std::isupper(u)) ++upper;
    if (std::islower(u)) ++lower;
  }
  return upper >= 2 && lower >= 1;
}

int ancestry_feature(const CodeFacts& facts, const std::string& x_class,
                     const std::string& y_class, TaxonomyKind kind, int n) {
  const auto ax = ancestors_within(facts, x_class, kind, n);
  const auto ay = ancestors_within(facts, y_class, kind, n);
  int shared = 0;
  for (const auto& node : ax)
    if (ay.count(node)) ++shared;
  return shared;
}

double FeatureParams::divergence_sentinel() const { return 2.0 * std::log(1.0 / lambda); }

Eigen::VectorXd PairFeatures::to_vector() const {
  Eigen::VectorXd v(kFeatureCount);
  v[0] = corpus_dist_sim;
  v[1] = string_sim;
  v[2] = link_prob;
  v[3] = code_dist_sim;
  for (int n = 0; n < 6; ++n) v[4 + n] = pkg_ancestry[n];
  for (int n = 0; n < 6; ++n) v[10 + n] = type_ancestry[n];
  v[16] = code_dist_sim * link_prob;
  for (int n = 0; n < 6; ++n) v[17 + n] = pkg_ancestry[n] * link_prob;
  for (int n = 0; n < 6; ++n) v[23 + n] = type_ancestry[n] * link_prob;
  return v;
}

std::array<std::string, kFeatureCount> PairFeatures::names() {
  std::array<std::string, kFeatureCount> names;
  names[0] = "corpus_dist_sim";
  names[1] = "string_sim";
  names[2] = "link_prob";
  names[3] = "code_dist_sim";
  for (int n = 0; n < 6; ++n) names[4 + n] = "a_pkg" + std::to_string(n + 1);
  for (int n = 0; n < 6; ++n) names[10 + n] = "a_type" + std::to_string(n + 1);
  names[16] = "w_code_dist_sim";
  for (int n = 0; n < 6; ++n) names[17 + n] = "w_a_pkg" + std::to_string(n + 1);
  for (int n = 0; n < 6; ++n) names[23 + n] = "w_a_type" + std::to_string(n + 1);
  return names;
}

namespace {

// Per-pair divergence over possibly sparse count maps; empty sides get the
// configured sentinel.
double divergence_or_sentinel(const std::map<std::string, long long>& cx,
                              const std::map<std::string, long long>& cy,
                              const FeatureParams& params) {
  long long tx = 0, ty = 0;
  for (const auto& [k, v] : cx) tx += v;
  for (const auto& [k, v] : cy) ty += v;
  if (tx <= 0 || ty <= 0) return params.divergence_sentinel();

  std::set<std::string> support;
  for (const auto& [k, v] : cx) support.insert(k);
  for (const auto& [k, v] : cy) support.insert(k);
  const auto px = make_distribution(cx, support, params.lambda);
  const auto py = make_distribution(cy, support, params.lambda);
  return sym_kl(px, py);
}

const std::map<std::string, long long> kEmptyCounts;

const std::map<std::string, long long>& word_contexts_of(const CorpusStats& stats,
                                                         const std::string& word) {
  auto it = stats.word_contexts.find(word);
  return it == stats.word_contexts.end() ? kEmptyCounts : it->second;
}

const std::map<std::string, long long>& code_contexts_of(const CodeFacts& facts,
                                                         const std::string& qualified) {
  auto it = facts.contexts.find(qualified);
  return it == facts.contexts.end() ? kEmptyCounts : it->second;
}

}  // namespace

PairFeatures build_feature_vector(const std::string& x, const std::string& y,
                                  const CorpusStats& stats, const CodeFacts& facts,
                                  const LinkMap& links, const IdfTable& idf,
                                  const FeatureParams& params) {
  auto lx = links.find(x);
  auto ly = links.find(y);
  if (lx == links.end() || ly == links.end())
    throw std::invalid_argument("build_feature_vector: no link entry for pair <" + x + "," +
                                y + ">");
  const double link_prob = pair_link_probability(lx->second, ly->second);
  if (link_prob <= params.link_pair_threshold)
    throw std::invalid_argument("build_feature_vector: pair <" + x + "," + y +
                                "> is below the link threshold");

  PairFeatures f;
  f.link_prob = link_prob;
  f.corpus_dist_sim =
      divergence_or_sentinel(word_contexts_of(stats, x), word_contexts_of(stats, y), params);
  f.string_sim = soft_tfidf(x, y, idf, params.theta);

  const std::string& cx = lx->second.best()->qualified_name;
  const std::string& cy = ly->second.best()->qualified_name;
  f.code_dist_sim =
      divergence_or_sentinel(code_contexts_of(facts, cx), code_contexts_of(facts, cy), params);
  for (int n = 1; n <= 6; ++n) {
    f.pkg_ancestry[n - 1] = ancestry_feature(facts, cx, cy, TaxonomyKind::Package, n);
    f.type_ancestry[n - 1] = ancestry_feature(facts, cx, cy, TaxonomyKind::Type, n);
  }
  return f;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> y;
  y.reserve(pairs.size());
  for (const auto& p : pairs) y.push_back(p.positive ? 1 : -1);
  return y;
}

namespace {

bool pair_eligible(const std::string& x, const std::string& y, const LinkMap& links,
                   double threshold, double* link_prob_out) {
  if (x == y) return false;
  if (!mention_filter(x) || !mention_filter(y)) return false;
  auto lx = links.find(x);
  auto ly = links.find(y);
  if (lx == links.end() || ly == links.end()) return false;
  const double lp = pair_link_probability(lx->second, ly->second);
  if (lp <= threshold) return false;
  if (link_prob_out) *link_prob_out = lp;
  return true;
}

Dataset assemble(std::vector<LabeledPair> pairs, const CorpusStats& stats,
                 const CodeFacts& facts, const LinkMap& links, const IdfTable& idf,
                 const FeatureParams& params) {
  Dataset dataset;
  dataset.pairs = std::move(pairs);
  dataset.features.resize(static_cast<Eigen::Index>(dataset.pairs.size()), kFeatureCount);
  for (std::size_t i = 0; i < dataset.pairs.size(); ++i) {
    const auto& p = dataset.pairs[i];
    dataset.features.row(static_cast<Eigen::Index>(i)) =
        build_feature_vector(p.x, p.y, stats, facts, links, idf, params).to_vector();
  }
  return dataset;
}

std::vector<std::string> eligible_words(const CorpusStats& stats, const LinkMap& links) {
  std::vector<std::string> words;
  for (const auto& [word, freq] : stats.word_freq) {
    if (!mention_filter(word)) continue;
    auto it = links.find(word);
    if (it == links.end() || it->second.empty()) continue;
    words.push_back(word);
  }
  return words;
}

}  // namespace

Dataset build_coord_dataset(const CorpusStats& stats, const CodeFacts& facts,
                            const LinkMap& links, const IdfTable& idf,
                            const DatasetParams& params, std::ostream* warnings) {
  std::vector<LabeledPair> positives;
  for (const auto& pair : stats.conj_pairs) {
    double lp = 0.0;
    if (!pair_eligible(pair.first, pair.second, links, params.link_pair_threshold, &lp))
      continue;
    positives.push_back({pair.first, pair.second, true, lp, LabeledPair::Source::ConjPattern});
  }

  const std::vector<std::string> words = eligible_words(stats, links);
  std::mt19937_64 rng(params.seed);
  std::set<WordPair> chosen;
  std::vector<LabeledPair> negatives;
  if (words.size() >= 2) {
    const std::size_t wanted = positives.size();
    std::size_t attempts = 0;
    const std::size_t max_attempts = 200 * wanted + 1000;
    while (negatives.size() < wanted && attempts < max_attempts) {
      ++attempts;
      const auto& a = words[pick_index(rng, words.size())];
      const auto& b = words[pick_index(rng, words.size())];
      if (a == b) continue;
      const WordPair pair = canonical_pair(a, b);
      if (stats.conj_pairs.count(pair) || chosen.count(pair)) continue;
      double lp = 0.0;
      if (!pair_eligible(pair.first, pair.second, links, params.link_pair_threshold, &lp))
        continue;
      chosen.insert(pair);
      negatives.push_back(
          {pair.first, pair.second, false, lp, LabeledPair::Source::RandomNegative});
    }
  }

  if (negatives.size() < positives.size()) {
    if (warnings)
      *warnings << "warning: only " << negatives.size() << " negatives for "
                << positives.size() << " positives; truncating to balance\n";
    positives.resize(negatives.size());
  }

  std::vector<LabeledPair> all = positives;
  all.insert(all.end(), negatives.begin(), negatives.end());
  return assemble(std::move(all), stats, facts, links, idf, params);
}

Dataset build_coord_pmi_dataset(const CorpusStats& stats, const CodeFacts& facts,
                                const LinkMap& links, const IdfTable& idf,
                                const DatasetParams& params, std::ostream* warnings) {
  struct Scored {
    WordPair pair;
    double pmi;
    double link_prob;
  };

  std::vector<Scored> pos_pool;
  for (const auto& pair : stats.conj_pairs) {
    double lp = 0.0;
    if (!pair_eligible(pair.first, pair.second, links, params.link_pair_threshold, &lp))
      continue;
    auto it = stats.pair_freq.find(pair);
    if (it == stats.pair_freq.end() || it->second <= 0) continue;
    pos_pool.push_back({pair, pmi(stats, pair.first, pair.second), lp});
  }

  // median corpus frequency over all words
  std::vector<long long> freqs;
  freqs.reserve(stats.word_freq.size());
  for (const auto& [word, freq] : stats.word_freq) freqs.push_back(freq);
  std::sort(freqs.begin(), freqs.end());
  const long long median = freqs.empty() ? 0 : freqs[freqs.size() / 2];

  std::vector<Scored> neg_pool;
  for (const auto& [pair, count] : stats.pair_freq) {
    if (count <= 0 || stats.conj_pairs.count(pair)) continue;
    if (stats.word_freq.at(pair.first) <= median || stats.word_freq.at(pair.second) <= median)
      continue;
    double lp = 0.0;
    if (!pair_eligible(pair.first, pair.second, links, params.link_pair_threshold, &lp))
      continue;
    neg_pool.push_back({pair, pmi(stats, pair.first, pair.second), lp});
  }

  auto by_pmi_desc = [](const Scored& a, const Scored& b) {
    if (a.pmi != b.pmi) return a.pmi > b.pmi;
    return a.pair < b.pair;
  };
  auto by_pmi_asc = [](const Scored& a, const Scored& b) {
    if (a.pmi != b.pmi) return a.pmi < b.pmi;
    return a.pair < b.pair;
  };
  std::sort(pos_pool.begin(), pos_pool.end(), by_pmi_desc);
  std::sort(neg_pool.begin(), neg_pool.end(), by_pmi_asc);

  auto quantile_count = [&](std::size_t n) -> std::size_t {
    if (n == 0) return 0;
    return std::max<std::size_t>(1, static_cast<std::size_t>(
                                        std::llround(params.pmi_quantile * static_cast<double>(n))));
  };
  pos_pool.resize(std::min(pos_pool.size(), quantile_count(pos_pool.size())));
  neg_pool.resize(std::min(neg_pool.size(), quantile_count(neg_pool.size())));

  // balance by a seeded random subset of the larger side
  std::mt19937_64 rng(params.seed);
  const std::size_t keep = std::min(pos_pool.size(), neg_pool.size());
  auto trim = [&](std::vector<Scored>& pool) {
    if (pool.size() <= keep) return;
    seeded_shuffle(pool, rng);
    pool.resize(keep);
    std::sort(pool.begin(), pool.end(), [](const Scored& a, const Scored& b) {
      return a.pair < b.pair;
    });
  };
  if (pos_pool.size() != neg_pool.size() && warnings)
    *warnings << "warning: PMI pools of size " << pos_pool.size() << "/" << neg_pool.size()
              << "; truncating to " << keep << " per class\n";
  trim(pos_pool);
  trim(neg_pool);

  std::vector<LabeledPair> all;
  for (const auto& s : pos_pool)
    all.push_back({s.pair.first, s.pair.second, true, s.link_prob,
                   LabeledPair::Source::ConjPattern});
  for (const auto& s : neg_pool)
    all.push_back({s.pair.first, s.pair.second, false, s.link_prob,
                   LabeledPair::Source::PmiNegative});
  return assemble(std::move(all), stats, facts, links, idf, params);
}

namespace {

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace

void write_dataset_tsv(const Dataset& dataset, const std::string& path,
                       const std::string* config_echo) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("dataset: cannot open for writing: " + path);
  if (config_echo) out << "# config: " << *config_echo << "\n";
  out << "x\ty\tlabel\tlink_prob";
  for (int i = 1; i <= kFeatureCount; ++i) out << "\tf" << i;
  out << "\n";
  for (std::size_t i = 0; i < dataset.pairs.size(); ++i) {
    const auto& p = dataset.pairs[i];
    out << p.x << "\t" << p.y << "\t" << (p.positive ? 1 : 0) << "\t"
        << format_double(p.link_prob);
    for (int c = 0; c < kFeatureCount; ++c)
      out << "\t" << format_double(dataset.features(static_cast<Eigen::Index>(i), c));
    out << "\n";
  }
}

Dataset read_dataset_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("dataset: cannot open: " + path);

  Dataset dataset;
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column layout is fixed
      continue;
    }
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() != static_cast<std::size_t>(4 + kFeatureCount))
      throw std::runtime_error("dataset: bad column count in " + path);
    LabeledPair p;
    p.x = fields[0];
    p.y = fields[1];
    p.positive = fields[2] == "1";
    p.link_prob = std::stod(fields[3]);
    dataset.pairs.push_back(std::move(p));
    std::vector<double> row(kFeatureCount);
    for (int c = 0; c < kFeatureCount; ++c) row[c] = std::stod(fields[4 + c]);
    rows.push_back(std::move(row));
  }
  dataset.features.resize(static_cast<Eigen::Index>(rows.size()), kFeatureCount);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int c = 0; c < kFeatureCount; ++c)
      dataset.features(static_cast<Eigen::Index>(i), c) = rows[i][c];
  return dataset;
}

}  // namespace coordterm
