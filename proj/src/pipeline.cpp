#include "coordterm/pipeline.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace coordterm {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace

CorpusStats stage_ingest_corpus(const PipelineConfig& cfg) {
  if (cfg.corpus_paths.empty())
    throw std::runtime_error("no corpus paths configured");
  CorpusStats stats;
  for (const auto& path : cfg.corpus_paths) {
    const std::string text = read_file(path);
    if (cfg.one_doc_per_line) {
      std::istringstream lines(text);
      std::string line;
      while (std::getline(lines, line)) ingest_document(stats, line, cfg.window);
    } else {
      ingest_document(stats, text, cfg.window);
    }
  }
  return stats;
}

IdfTable build_idf(const CorpusStats& stats, const CodeFacts& facts) {
  std::vector<std::string> documents;
  for (const auto& [qualified, entry] : facts.classes)
    if (!entry.external) documents.push_back(entry.label);
  for (const auto& [word, freq] : stats.word_freq) {
    bool has_letter = false;
    for (const char c : word)
      if (std::isalpha(static_cast<unsigned char>(c))) {
        has_letter = true;
        break;
      }
    if (has_letter) documents.push_back(word);
  }
  return IdfTable::build(documents);
}

LinkMap stage_link(const PipelineConfig& cfg, const CorpusStats& stats,
                   const CodeFacts& facts, const IdfTable& idf) {
  LinkMap links;
  for (const auto& [word, freq] : stats.word_freq) {
    if (!mention_filter(word)) continue;
    links[word] = link_word(word, facts, stats, idf, cfg.softtfidf_theta,
                            cfg.link_candidate_threshold);
  }
  return links;
}

void save_links(const LinkMap& links, const std::string& path,
                const std::string* config_echo) {
  nlohmann::json j;
  j["version"] = 1;
  if (config_echo) j["config"] = nlohmann::json::parse(*config_echo);
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [word, link] : links) {
    nlohmann::json candidates = nlohmann::json::array();
    for (const auto& c : link.candidates)
      candidates.push_back({{"class", c.qualified_name},
                            {"p", c.probability},
                            {"score", c.score},
                            {"sim", c.string_sim}});
    entries[word] = std::move(candidates);
  }
  j["links"] = std::move(entries);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("links: cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

LinkMap load_links(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("links: malformed JSON: ") + e.what());
  }
  if (!j.contains("links")) throw std::runtime_error("links: missing \"links\" field");
  LinkMap links;
  for (const auto& [word, candidates] : j["links"].items()) {
    EntityLink link;
    link.word = word;
    for (const auto& c : candidates)
      link.candidates.push_back({c.at("class").get<std::string>(), c.at("p").get<double>(),
                                 c.value("score", 0.0), c.value("sim", 0.0)});
    links[word] = std::move(link);
  }
  return links;
}

DatasetParams dataset_params(const PipelineConfig& cfg) {
  DatasetParams params;
  params.lambda = cfg.smoothing_lambda;
  params.theta = cfg.softtfidf_theta;
  params.link_pair_threshold = cfg.link_pair_threshold;
  params.pmi_quantile = cfg.pmi_quantile;
  params.seed = cfg.seed;
  return params;
}

std::vector<std::pair<std::string, std::string>> candidate_pairs(
    const CorpusStats& stats, const LinkMap& links, double link_pair_threshold) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& [pair, count] : stats.pair_freq) {
    if (count <= 0) continue;
    if (!mention_filter(pair.first) || !mention_filter(pair.second)) continue;
    auto lx = links.find(pair.first);
    auto ly = links.find(pair.second);
    if (lx == links.end() || ly == links.end()) continue;
    if (pair_link_probability(lx->second, ly->second) <= link_pair_threshold) continue;
    pairs.push_back(pair);
  }
  return pairs;
}

void save_ranking(const std::vector<RankedPair>& ranking, const std::string& path,
                  const std::string* config_echo) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("ranking: cannot open for writing: " + path);
  if (config_echo) out << "# config: " << *config_echo << "\n";
  out << "x\ty\tscore\n";
  for (const auto& r : ranking)
    out << r.x << "\t" << r.y << "\t" << format_double(r.score) << "\n";
}

std::vector<RankedPair> load_ranking(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("ranking: cannot open: " + path);
  std::vector<RankedPair> ranking;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    RankedPair r;
    std::string score;
    if (!std::getline(ss, r.x, '\t') || !std::getline(ss, r.y, '\t') ||
        !std::getline(ss, score, '\t'))
      throw std::runtime_error("ranking: bad row in " + path);
    r.score = std::stod(score);
    ranking.push_back(std::move(r));
  }
  return ranking;
}

namespace {

// Output considered current when it is newer than every input.
bool up_to_date(const std::string& output, const std::vector<std::string>& inputs) {
  std::error_code ec;
  const auto out_time = fs::last_write_time(output, ec);
  if (ec) return false;
  for (const auto& input : inputs) {
    if (input.empty()) continue;
    const auto in_time = fs::last_write_time(input, ec);
    if (ec) return false;
    if (in_time >= out_time) return false;
  }
  return true;
}

struct StageRunner {
  const PipelineConfig& cfg;
  bool force;
  std::ostream* log;
  std::string config_path;

  template <typename Fn>
  void run(const std::string& name, const std::vector<std::string>& inputs,
           const std::vector<std::string>& outputs, Fn&& fn) const {
    std::vector<std::string> all_inputs = inputs;
    if (!config_path.empty()) all_inputs.push_back(config_path);
    bool current = !force;
    for (const auto& output : outputs)
      current = current && up_to_date(output, all_inputs);
    if (current) {
      if (log) *log << "[" << name << "] up to date\n";
      return;
    }
    if (log) *log << "[" << name << "] running\n";
    try {
      fn();
    } catch (const std::exception& e) {
      throw std::runtime_error("stage " + name + ": " + e.what());
    }
  }
};

}  // namespace

void run_pipeline(const PipelineConfig& cfg, bool force, std::ostream* log,
                  const std::string& config_file_path) {
  cfg.validate();
  if (cfg.out_dir.empty()) throw std::runtime_error("stage setup: no output directory configured");
  fs::create_directories(cfg.out_dir);
  const std::string echo = cfg.to_json();

  const std::string stats_path = (fs::path(cfg.out_dir) / "stats.json").string();
  const std::string facts_path = (fs::path(cfg.out_dir) / "facts.json").string();
  const std::string links_path = (fs::path(cfg.out_dir) / "links.json").string();
  const std::string coord_path = (fs::path(cfg.out_dir) / "coord.tsv").string();
  const std::string coord_pmi_path = (fs::path(cfg.out_dir) / "coord_pmi.tsv").string();
  const std::string cv_path = (fs::path(cfg.out_dir) / "cv.json").string();
  const std::string model_path = (fs::path(cfg.out_dir) / "model.json").string();
  const std::string ranking_path = (fs::path(cfg.out_dir) / "ranking.tsv").string();
  const std::string dot_path = (fs::path(cfg.out_dir) / "graph.dot").string();
  const std::string graph_json_path = (fs::path(cfg.out_dir) / "graph.json").string();

  const StageRunner runner{cfg, force, log, config_file_path};

  runner.run("ingest-corpus", cfg.corpus_paths, {stats_path}, [&] {
    for (const auto& path : cfg.corpus_paths)
      if (!fs::exists(path)) throw std::runtime_error("no such corpus file: " + path);
    save_stats(stage_ingest_corpus(cfg), stats_path, &echo);
  });

  runner.run("extract-facts", {cfg.source_dir}, {facts_path}, [&] {
    save_facts(parse_source_tree(cfg.source_dir, log), facts_path, &echo);
  });

  runner.run("link", {stats_path, facts_path}, {links_path}, [&] {
    const CorpusStats stats = load_stats(stats_path);
    const CodeFacts facts = load_facts(facts_path);
    const IdfTable idf = build_idf(stats, facts);
    save_links(stage_link(cfg, stats, facts, idf), links_path, &echo);
  });

  runner.run("build-dataset", {stats_path, facts_path, links_path},
             {coord_path, coord_pmi_path}, [&] {
               const CorpusStats stats = load_stats(stats_path);
               const CodeFacts facts = load_facts(facts_path);
               const LinkMap links = load_links(links_path);
               const IdfTable idf = build_idf(stats, facts);
               const DatasetParams params = dataset_params(cfg);
               write_dataset_tsv(build_coord_dataset(stats, facts, links, idf, params, log),
                                 coord_path, &echo);
               write_dataset_tsv(
                   build_coord_pmi_dataset(stats, facts, links, idf, params, log),
                   coord_pmi_path, &echo);
             });

  const std::string train_input = cfg.dataset == "coord" ? coord_path : coord_pmi_path;

  runner.run("cv", {train_input}, {cv_path}, [&] {
    const Dataset dataset = read_dataset_tsv(train_input);
    const double accuracy =
        cross_validate(dataset.features, dataset.labels(), cfg.cv_folds, cfg.svm_c, cfg.seed);
    nlohmann::json j;
    j["version"] = 1;
    j["config"] = nlohmann::json::parse(echo);
    j["dataset"] = cfg.dataset;
    j["folds"] = cfg.cv_folds;
    j["accuracy"] = accuracy;
    std::ofstream out(cv_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + cv_path);
    out << j.dump(2) << "\n";
  });

  runner.run("train", {train_input}, {model_path}, [&] {
    const Dataset dataset = read_dataset_tsv(train_input);
    save_model(train_svm(dataset.features, dataset.labels(), cfg.svm_c, cfg.seed), model_path,
               &echo);
  });

  runner.run("rank", {model_path, stats_path, facts_path, links_path}, {ranking_path}, [&] {
    const CorpusStats stats = load_stats(stats_path);
    const CodeFacts facts = load_facts(facts_path);
    const LinkMap links = load_links(links_path);
    const IdfTable idf = build_idf(stats, facts);
    const LinearModel model = load_model(model_path);
    const auto pairs = candidate_pairs(stats, links, cfg.link_pair_threshold);

    Eigen::MatrixXd X(static_cast<Eigen::Index>(pairs.size()), kFeatureCount);
    const DatasetParams params = dataset_params(cfg);
    for (std::size_t i = 0; i < pairs.size(); ++i)
      X.row(static_cast<Eigen::Index>(i)) =
          build_feature_vector(pairs[i].first, pairs[i].second, stats, facts, links, idf,
                               params)
              .to_vector();
    save_ranking(rank_pairs(model, pairs, X), ranking_path, &echo);
  });

  runner.run("export-graph", {ranking_path}, {dot_path, graph_json_path}, [&] {
    const auto ranking = load_ranking(ranking_path);
    const CoordGraph graph =
        build_graph(ranking, cfg.graph_edge_threshold, cfg.graph_top_k);
    save_graph_dot(graph, dot_path, &echo);
    save_graph_json(graph, graph_json_path, &echo);
  });
}

}  // namespace coordterm
