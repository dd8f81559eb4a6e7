#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace coordterm {

struct Token {
  std::string surface;
  int sentence_index = 0;
  int position = 0;

  bool operator==(const Token&) const = default;
};

using Sentence = std::vector<Token>;
using WordPair = std::pair<std::string, std::string>;

// Unordered pairs are stored with the lexicographically smaller word first.
WordPair canonical_pair(std::string a, std::string b);

// Rule-based sentence splitting (. ? ! and blank lines) and tokenization.
// Identifier-like tokens keep internal dots, so `java.lang.String` survives
// as one token; other punctuation becomes single-character tokens.
std::vector<Sentence> tokenize(std::string_view text);

// Candidate mention shape used during conjunction extraction: alphanumeric
// with at least one upper-case and one lower-case letter. The stricter
// dataset filter is mention_filter() in features.hpp.
bool camelish(std::string_view word);

// Surface pattern `X (and|or) Y`, expanded over comma chains such as
// `A, B and C`, keeping members that pass camelish().
std::set<WordPair> extract_conjunction_pairs(const std::vector<Sentence>& sentences);

struct CorpusStats {
  std::map<std::string, long long> word_freq;
  std::map<WordPair, long long> pair_freq;  // distinct pairs per sentence
  std::set<WordPair> conj_pairs;
  std::map<std::string, std::map<std::string, long long>> word_contexts;
  long long total_tokens = 0;
  long long total_pairs = 0;  // sum over sentences of distinct-pair counts

  bool operator==(const CorpusStats&) const = default;
};

// Adds one count per neighbor within `window` positions under the context id
// `L:<surface>` / `R:<surface>`, and updates word/pair/total tallies.
void accumulate_contexts(CorpusStats& stats, const std::vector<Sentence>& sentences,
                         int window);
CorpusStats accumulate_contexts(const std::vector<Sentence>& sentences, int window);

// tokenize + accumulate_contexts + conjunction pairs for one document.
void ingest_document(CorpusStats& stats, std::string_view text, int window);

// Pointwise mutual information, natural log:
//   log( (pair_freq/total_pairs) / (p(x) p(y)) ),  p(w) = word_freq/total_tokens.
// Throws if the pair never co-occurs.
double pmi(const CorpusStats& stats, const std::string& x, const std::string& y);

std::string stats_to_json(const CorpusStats& stats, const std::string* config_echo = nullptr);
CorpusStats stats_from_json(const std::string& text);
void save_stats(const CorpusStats& stats, const std::string& path,
                const std::string* config_echo = nullptr);
CorpusStats load_stats(const std::string& path);

}  // namespace coordterm
