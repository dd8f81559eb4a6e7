#pragma once

#include <string>
#include <vector>

#include "coordterm/javafacts.hpp"
#include "coordterm/simkit.hpp"
#include "coordterm/textcorpus.hpp"

namespace coordterm {

struct LinkCandidate {
  std::string qualified_name;
  double probability = 0.0;  // normalized over the candidate set
  double score = 0.0;        // f(C)/sum_f * string similarity
  double string_sim = 0.0;
};

struct EntityLink {
  std::string word;
  std::vector<LinkCandidate> candidates;  // probability non-increasing

  bool empty() const { return candidates.empty(); }
  const LinkCandidate* best() const { return candidates.empty() ? nullptr : &candidates[0]; }
};

// Scores every defined class whose label is string-similar to `word`
// (soft_tfidf >= candidate_threshold) by the class-frequency prior times the
// label similarity, then normalizes scores into probabilities. The prior
// f(C) is the corpus count of the qualified name plus one.
EntityLink link_word(const std::string& word, const CodeFacts& facts,
                     const CorpusStats& stats, const IdfTable& idf,
                     double theta = 0.9, double candidate_threshold = 0.6);

// Product of the two best-candidate probabilities; 0 when either is empty.
double pair_link_probability(const EntityLink& x, const EntityLink& y);

}  // namespace coordterm
