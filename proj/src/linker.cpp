#include "coordterm/linker.hpp"

#include <algorithm>

namespace coordterm {

namespace {

long long corpus_count(const CorpusStats& stats, const std::string& word) {
  auto it = stats.word_freq.find(word);
  return it == stats.word_freq.end() ? 0 : it->second;
}

}  // namespace

EntityLink link_word(const std::string& word, const CodeFacts& facts,
                     const CorpusStats& stats, const IdfTable& idf, double theta,
                     double candidate_threshold) {
  EntityLink link;
  link.word = word;

  double total_f = 0.0;
  for (const auto& [qualified, entry] : facts.classes) {
    if (entry.external) continue;
    total_f += static_cast<double>(corpus_count(stats, qualified) + 1);
  }
  if (total_f <= 0.0) return link;

  for (const auto& [qualified, entry] : facts.classes) {
    if (entry.external) continue;
    const double sim = soft_tfidf(entry.label, word, idf, theta);
    if (sim < candidate_threshold) continue;
    const double prior = static_cast<double>(corpus_count(stats, qualified) + 1) / total_f;
    link.candidates.push_back({qualified, 0.0, prior * sim, sim});
  }

  std::sort(link.candidates.begin(), link.candidates.end(),
            [](const LinkCandidate& a, const LinkCandidate& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.qualified_name < b.qualified_name;
            });
  double sum = 0.0;
  for (const auto& c : link.candidates) sum += c.score;
  if (sum > 0.0)
    for (auto& c : link.candidates) c.probability = c.score / sum;
  return link;
}

double pair_link_probability(const EntityLink& x, const EntityLink& y) {
  if (x.empty() || y.empty()) return 0.0;
  return x.best()->probability * y.best()->probability;
}

}  // namespace coordterm
