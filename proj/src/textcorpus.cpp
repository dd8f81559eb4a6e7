#include "coordterm/textcorpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace coordterm {

namespace {

// Bytes >= 0x80 are kept inside tokens so UTF-8 words stay intact.
bool is_ident_char(unsigned char c) {
  return std::isalnum(c) != 0 || c == '_' || c == '$' || c >= 0x80;
}

bool is_space_char(unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; }

}  // namespace

WordPair canonical_pair(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

std::vector<Sentence> tokenize(std::string_view text) {
  std::vector<Sentence> sentences;
  Sentence current;
  std::string token;

  auto flush_token = [&] {
    if (token.empty()) return;
    current.push_back(Token{token, static_cast<int>(sentences.size()),
                            static_cast<int>(current.size())});
    token.clear();
  };
  auto flush_sentence = [&] {
    flush_token();
    if (current.empty()) return;
    sentences.push_back(std::move(current));
    current.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_ident_char(c)) {
      token.push_back(static_cast<char>(c));
      continue;
    }
    if (c == '.') {
      // A dot joined by identifier characters on both sides stays inside the
      // token (java.lang.String); otherwise it terminates the sentence.
      if (!token.empty() && is_ident_char(static_cast<unsigned char>(token.back())) &&
          i + 1 < text.size() && is_ident_char(static_cast<unsigned char>(text[i + 1]))) {
        token.push_back('.');
      } else {
        flush_sentence();
      }
      continue;
    }
    if (c == '?' || c == '!') {
      flush_sentence();
      continue;
    }
    if (c == '\n') {
      flush_token();
      std::size_t j = i + 1;
      while (j < text.size() && is_space_char(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == '\n') {
        flush_sentence();  // blank line
        i = j;
      }
      continue;
    }
    if (is_space_char(c)) {
      flush_token();
      continue;
    }
    // Remaining punctuation becomes a one-character token.
    flush_token();
    token.push_back(static_cast<char>(c));
    flush_token();
  }
  flush_sentence();
  return sentences;
}

bool camelish(std::string_view word) {
  if (word.empty()) return false;
  bool upper = false, lower = false;
  for (const char c : word) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u) == 0) return false;
    upper = upper || std::isupper(u) != 0;
    lower = lower || std::islower(u) != 0;
  }
  return upper && lower;
}

namespace {

bool is_conjunction(const std::string& surface) {
  std::string s = surface;
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s == "and" || s == "or";
}

}  // namespace

std::set<WordPair> extract_conjunction_pairs(const std::vector<Sentence>& sentences) {
  std::set<WordPair> pairs;
  for (const auto& sentence : sentences) {
    const std::size_t n = sentence.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (!is_conjunction(sentence[i].surface)) continue;
      // Walk left over `ident ,` links to expand chains like `A, B and C`.
      std::vector<std::string> members;
      std::size_t j = i - 1;
      members.push_back(sentence[j].surface);
      while (j >= 2 && sentence[j - 1].surface == ",") {
        j -= 2;
        members.push_back(sentence[j].surface);
      }
      members.push_back(sentence[i + 1].surface);

      std::vector<std::string> kept;
      for (const auto& m : members)
        if (camelish(m)) kept.push_back(m);
      for (std::size_t a = 0; a < kept.size(); ++a)
        for (std::size_t b = a + 1; b < kept.size(); ++b)
          if (kept[a] != kept[b]) pairs.insert(canonical_pair(kept[a], kept[b]));
    }
  }
  return pairs;
}

void accumulate_contexts(CorpusStats& stats, const std::vector<Sentence>& sentences,
                         int window) {
  if (window < 1) throw std::invalid_argument("accumulate_contexts: window must be >= 1");
  for (const auto& sentence : sentences) {
    const int n = static_cast<int>(sentence.size());
    stats.total_tokens += n;
    for (const auto& token : sentence) ++stats.word_freq[token.surface];

    for (int i = 0; i < n; ++i) {
      auto& contexts = stats.word_contexts[sentence[i].surface];
      for (int d = 1; d <= window; ++d) {
        if (i - d >= 0) ++contexts["L:" + sentence[i - d].surface];
        if (i + d < n) ++contexts["R:" + sentence[i + d].surface];
      }
    }

    std::set<std::string> distinct;
    for (const auto& token : sentence) distinct.insert(token.surface);
    for (auto a = distinct.begin(); a != distinct.end(); ++a) {
      auto b = a;
      for (++b; b != distinct.end(); ++b) {
        ++stats.pair_freq[{*a, *b}];  // set iteration is already canonical
        ++stats.total_pairs;
      }
    }
  }
}

CorpusStats accumulate_contexts(const std::vector<Sentence>& sentences, int window) {
  CorpusStats stats;
  accumulate_contexts(stats, sentences, window);
  return stats;
}

void ingest_document(CorpusStats& stats, std::string_view text, int window) {
  const auto sentences = tokenize(text);
  accumulate_contexts(stats, sentences, window);
  for (auto& pair : extract_conjunction_pairs(sentences)) stats.conj_pairs.insert(pair);
}

double pmi(const CorpusStats& stats, const std::string& x, const std::string& y) {
  const auto pair = canonical_pair(x, y);
  auto it = stats.pair_freq.find(pair);
  if (it == stats.pair_freq.end() || it->second <= 0)
    throw std::invalid_argument("pmi: pair <" + x + "," + y + "> never co-occurs");
  auto fx = stats.word_freq.find(x);
  auto fy = stats.word_freq.find(y);
  if (fx == stats.word_freq.end() || fy == stats.word_freq.end())
    throw std::invalid_argument("pmi: unknown word in pair <" + x + "," + y + ">");

  const double p_pair =
      static_cast<double>(it->second) / static_cast<double>(stats.total_pairs);
  const double p_x =
      static_cast<double>(fx->second) / static_cast<double>(stats.total_tokens);
  const double p_y =
      static_cast<double>(fy->second) / static_cast<double>(stats.total_tokens);
  return std::log(p_pair / (p_x * p_y));
}

std::string stats_to_json(const CorpusStats& stats, const std::string* config_echo) {
  nlohmann::json j;
  j["version"] = 1;
  if (config_echo) j["config"] = nlohmann::json::parse(*config_echo);

  nlohmann::json words = nlohmann::json::object();
  for (const auto& [word, count] : stats.word_freq) words[word] = count;
  j["words"] = std::move(words);

  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [pair, count] : stats.pair_freq)
    pairs.push_back({pair.first, pair.second, count});
  j["pairs"] = std::move(pairs);

  nlohmann::json conj = nlohmann::json::array();
  for (const auto& pair : stats.conj_pairs) conj.push_back({pair.first, pair.second});
  j["conj"] = std::move(conj);

  nlohmann::json contexts = nlohmann::json::object();
  for (const auto& [word, ctx] : stats.word_contexts) {
    nlohmann::json inner = nlohmann::json::object();
    for (const auto& [id, count] : ctx) inner[id] = count;
    contexts[word] = std::move(inner);
  }
  j["contexts"] = std::move(contexts);

  j["total_tokens"] = stats.total_tokens;
  j["total_pairs"] = stats.total_pairs;
  return j.dump(2) + "\n";
}

CorpusStats stats_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("stats: malformed JSON: ") + e.what());
  }
  for (const char* key : {"words", "pairs", "conj", "contexts"})
    if (!j.contains(key))
      throw std::runtime_error(std::string("stats: missing \"") + key + "\" field");

  CorpusStats stats;
  for (const auto& [word, count] : j["words"].items())
    stats.word_freq[word] = count.get<long long>();
  for (const auto& entry : j["pairs"]) {
    if (!entry.is_array() || entry.size() != 3)
      throw std::runtime_error("stats: pair entries must be [w1, w2, n]");
    stats.pair_freq[canonical_pair(entry[0].get<std::string>(), entry[1].get<std::string>())] =
        entry[2].get<long long>();
  }
  for (const auto& entry : j["conj"])
    stats.conj_pairs.insert(
        canonical_pair(entry[0].get<std::string>(), entry[1].get<std::string>()));
  for (const auto& [word, ctx] : j["contexts"].items()) {
    auto& inner = stats.word_contexts[word];
    for (const auto& [id, count] : ctx.items()) inner[id] = count.get<long long>();
  }

  for (const auto& [word, count] : stats.word_freq) stats.total_tokens += count;
  for (const auto& [pair, count] : stats.pair_freq) stats.total_pairs += count;
  if (j.contains("total_tokens") && j["total_tokens"].get<long long>() != stats.total_tokens)
    throw std::runtime_error("stats: total_tokens does not match word frequencies");
  if (j.contains("total_pairs") && j["total_pairs"].get<long long>() != stats.total_pairs)
    throw std::runtime_error("stats: total_pairs does not match pair frequencies");
  return stats;
}

void save_stats(const CorpusStats& stats, const std::string& path,
                const std::string* config_echo) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("stats: cannot open for writing: " + path);
  out << stats_to_json(stats, config_echo);
}

CorpusStats load_stats(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("stats: cannot open: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return stats_from_json(buffer.str());
}

}  // namespace coordterm
