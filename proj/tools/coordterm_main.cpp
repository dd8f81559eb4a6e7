#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coordterm/pipeline.hpp"

namespace fs = std::filesystem;
using namespace coordterm;

namespace {

PipelineConfig load_config_or_default(const std::string& path) {
  if (!path.empty()) return PipelineConfig::load(path);
  PipelineConfig cfg;
  cfg.seed = 1;
  return cfg;
}

int run_stage(const std::string& name, const std::function<void()>& fn) {
  try {
    fn();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error [" << name << "]: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coordterm: coordinate-term discovery over text corpora and Java sources"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("-c,--config", config_path, "pipeline config JSON")->envname("COORDTERM_CONFIG");

  // ingest-corpus
  auto* ingest = app.add_subcommand("ingest-corpus", "tokenize text and write corpus stats");
  std::vector<std::string> corpus_files;
  std::string stats_out = "stats.json";
  bool one_doc_per_line = false;
  ingest->add_option("files", corpus_files, "plain-text input files")->required();
  ingest->add_option("-o,--out", stats_out, "output stats JSON");
  ingest->add_flag("--one-doc-per-line", one_doc_per_line, "treat each line as a document");

  // extract-facts
  auto* extract = app.add_subcommand("extract-facts", "parse a Java source tree into facts");
  std::string src_dir;
  std::string facts_out = "facts.json";
  extract->add_option("srcdir", src_dir, "Java source root")->required();
  extract->add_option("-o,--out", facts_out, "output facts JSON");

  // link
  auto* link_cmd = app.add_subcommand("link", "print ranked class candidates for a word");
  std::string link_word_arg, link_stats, link_facts;
  link_cmd->add_option("word", link_word_arg, "mention to link")->required();
  link_cmd->add_option("-s,--stats", link_stats, "corpus stats JSON")->required();
  link_cmd->add_option("-f,--facts", link_facts, "code facts JSON")->required();

  // build-dataset
  auto* build = app.add_subcommand("build-dataset", "assemble a labeled pair dataset");
  std::string bd_stats, bd_facts, bd_links, bd_out = "dataset.tsv", bd_kind = "coord";
  build->add_option("-s,--stats", bd_stats)->required();
  build->add_option("-f,--facts", bd_facts)->required();
  build->add_option("-l,--links", bd_links)->required();
  build->add_option("-o,--out", bd_out, "output TSV");
  build->add_option("-k,--kind", bd_kind, "coord | coord-pmi");

  // train / cv
  auto* train_cmd = app.add_subcommand("train", "train the linear classifier");
  std::string tr_dataset, tr_out = "model.json";
  train_cmd->add_option("-d,--dataset", tr_dataset, "dataset TSV")->required();
  train_cmd->add_option("-o,--out", tr_out, "output model JSON");

  auto* cv_cmd = app.add_subcommand("cv", "stratified cross-validation accuracy");
  std::string cv_dataset;
  cv_cmd->add_option("-d,--dataset", cv_dataset, "dataset TSV")->required();

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "decision values for dataset rows");
  std::string pr_model, pr_dataset, pr_out;
  predict_cmd->add_option("-m,--model", pr_model)->required();
  predict_cmd->add_option("-d,--dataset", pr_dataset, "dataset TSV")->required();
  predict_cmd->add_option("-o,--out", pr_out, "output TSV (stdout when omitted)");

  // rank
  auto* rank_cmd = app.add_subcommand("rank", "score and rank candidate pairs");
  std::string rk_model, rk_stats, rk_facts, rk_links, rk_out = "ranking.tsv";
  rank_cmd->add_option("-m,--model", rk_model)->required();
  rank_cmd->add_option("-s,--stats", rk_stats)->required();
  rank_cmd->add_option("-f,--facts", rk_facts)->required();
  rank_cmd->add_option("-l,--links", rk_links)->required();
  rank_cmd->add_option("-o,--out", rk_out, "output ranking TSV");

  // export-graph
  auto* export_cmd = app.add_subcommand("export-graph", "aggregate ranked pairs into a graph");
  std::string eg_ranking, eg_format = "dot", eg_out = "graph.dot";
  export_cmd->add_option("-r,--ranking", eg_ranking, "ranking TSV")->required();
  export_cmd->add_option("-f,--format", eg_format, "dot | json");
  export_cmd->add_option("-o,--out", eg_out, "output path");

  // run
  auto* run_cmd = app.add_subcommand("run", "run the full pipeline from a config file");
  std::string run_out_dir;
  bool force = false;
  run_cmd->add_option("--out", run_out_dir, "override the configured output directory");
  run_cmd->add_flag("--force", force, "re-run stages even when outputs are current");

  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  if (ingest->parsed()) {
    return run_stage("ingest-corpus", [&] {
      PipelineConfig cfg = load_config_or_default(config_path);
      cfg.corpus_paths = corpus_files;
      if (one_doc_per_line) cfg.one_doc_per_line = true;
      const std::string echo = cfg.to_json();
      save_stats(stage_ingest_corpus(cfg), stats_out, &echo);
    });
  }

  if (extract->parsed()) {
    return run_stage("extract-facts", [&] {
      PipelineConfig cfg = load_config_or_default(config_path);
      const std::string echo = cfg.to_json();
      save_facts(parse_source_tree(src_dir, &std::cerr), facts_out, &echo);
    });
  }

  if (link_cmd->parsed()) {
    return run_stage("link", [&] {
      const PipelineConfig cfg = load_config_or_default(config_path);
      const CorpusStats stats = load_stats(link_stats);
      const CodeFacts facts = load_facts(link_facts);
      const IdfTable idf = build_idf(stats, facts);
      const EntityLink link = link_word(link_word_arg, facts, stats, idf,
                                        cfg.softtfidf_theta, cfg.link_candidate_threshold);
      nlohmann::json j;
      j["word"] = link.word;
      nlohmann::json candidates = nlohmann::json::array();
      for (const auto& c : link.candidates)
        candidates.push_back({{"class", c.qualified_name},
                              {"p", c.probability},
                              {"score", c.score},
                              {"sim", c.string_sim}});
      j["candidates"] = std::move(candidates);
      std::cout << j.dump(2) << "\n";
    });
  }

  if (build->parsed()) {
    return run_stage("build-dataset", [&] {
      PipelineConfig cfg = load_config_or_default(config_path);
      const CorpusStats stats = load_stats(bd_stats);
      const CodeFacts facts = load_facts(bd_facts);
      const LinkMap links = load_links(bd_links);
      const IdfTable idf = build_idf(stats, facts);
      const DatasetParams params = dataset_params(cfg);
      const std::string echo = cfg.to_json();
      if (bd_kind == "coord")
        write_dataset_tsv(build_coord_dataset(stats, facts, links, idf, params, &std::cerr),
                          bd_out, &echo);
      else if (bd_kind == "coord-pmi")
        write_dataset_tsv(
            build_coord_pmi_dataset(stats, facts, links, idf, params, &std::cerr), bd_out,
            &echo);
      else
        throw std::runtime_error("unknown dataset kind: " + bd_kind);
    });
  }

  if (train_cmd->parsed()) {
    return run_stage("train", [&] {
      const PipelineConfig cfg = load_config_or_default(config_path);
      const Dataset dataset = read_dataset_tsv(tr_dataset);
      const std::string echo = cfg.to_json();
      save_model(train_svm(dataset.features, dataset.labels(), cfg.svm_c, cfg.seed), tr_out,
                 &echo);
    });
  }

  if (cv_cmd->parsed()) {
    return run_stage("cv", [&] {
      const PipelineConfig cfg = load_config_or_default(config_path);
      const Dataset dataset = read_dataset_tsv(cv_dataset);
      const double accuracy = cross_validate(dataset.features, dataset.labels(), cfg.cv_folds,
                                             cfg.svm_c, cfg.seed);
      nlohmann::json j;
      j["folds"] = cfg.cv_folds;
      j["accuracy"] = accuracy;
      std::cout << j.dump(2) << "\n";
    });
  }

  if (predict_cmd->parsed()) {
    return run_stage("predict", [&] {
      const LinearModel model = load_model(pr_model);
      const Dataset dataset = read_dataset_tsv(pr_dataset);
      std::ostringstream out;
      out << "x\ty\tscore\n";
      char score[64];
      for (std::size_t i = 0; i < dataset.pairs.size(); ++i) {
        const double value = decision_value(
            model, dataset.features.row(static_cast<Eigen::Index>(i)).transpose());
        std::snprintf(score, sizeof(score), "%.17g", value);
        out << dataset.pairs[i].x << "\t" << dataset.pairs[i].y << "\t" << score << "\n";
      }
      if (pr_out.empty()) {
        std::cout << out.str();
      } else {
        std::ofstream file(pr_out, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open for writing: " + pr_out);
        file << out.str();
      }
    });
  }

  if (rank_cmd->parsed()) {
    return run_stage("rank", [&] {
      const PipelineConfig cfg = load_config_or_default(config_path);
      const CorpusStats stats = load_stats(rk_stats);
      const CodeFacts facts = load_facts(rk_facts);
      const LinkMap links = load_links(rk_links);
      const IdfTable idf = build_idf(stats, facts);
      const LinearModel model = load_model(rk_model);
      const auto pairs = candidate_pairs(stats, links, cfg.link_pair_threshold);
      const DatasetParams params = dataset_params(cfg);
      Eigen::MatrixXd X(static_cast<Eigen::Index>(pairs.size()), kFeatureCount);
      for (std::size_t i = 0; i < pairs.size(); ++i)
        X.row(static_cast<Eigen::Index>(i)) =
            build_feature_vector(pairs[i].first, pairs[i].second, stats, facts, links, idf,
                                 params)
                .to_vector();
      const std::string echo = cfg.to_json();
      save_ranking(rank_pairs(model, pairs, X), rk_out, &echo);
    });
  }

  if (export_cmd->parsed()) {
    return run_stage("export-graph", [&] {
      const PipelineConfig cfg = load_config_or_default(config_path);
      const auto ranking = load_ranking(eg_ranking);
      const CoordGraph graph =
          build_graph(ranking, cfg.graph_edge_threshold, cfg.graph_top_k);
      const std::string echo = cfg.to_json();
      if (eg_format == "dot")
        save_graph_dot(graph, eg_out, &echo);
      else if (eg_format == "json")
        save_graph_json(graph, eg_out, &echo);
      else
        throw std::runtime_error("unknown format: " + eg_format);
    });
  }

  if (run_cmd->parsed()) {
    return run_stage("run", [&] {
      if (config_path.empty()) throw std::runtime_error("run requires --config");
      PipelineConfig cfg = PipelineConfig::load(config_path);
      if (!run_out_dir.empty()) cfg.out_dir = run_out_dir;
      run_pipeline(cfg, force, &std::cerr, config_path);
    });
  }

  return 0;
}
