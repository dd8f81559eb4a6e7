#include "coordterm/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace coordterm {

void PipelineConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("config: " + what);
  };
  check(window >= 1, "window must be >= 1");
  check(smoothing_lambda > 0.0 && smoothing_lambda <= 1.0,
        "smoothing_lambda must be in (0, 1]");
  check(softtfidf_theta >= 0.0 && softtfidf_theta <= 1.0,
        "softtfidf_theta must be in [0, 1]");
  check(link_candidate_threshold >= 0.0 && link_candidate_threshold <= 1.0,
        "link_candidate_threshold must be in [0, 1]");
  check(link_pair_threshold >= 0.0 && link_pair_threshold < 1.0,
        "link_pair_threshold must be in [0, 1)");
  check(pmi_quantile > 0.0 && pmi_quantile <= 0.5, "pmi_quantile must be in (0, 0.5]");
  check(svm_c > 0.0, "svm_c must be positive");
  check(cv_folds >= 2, "cv_folds must be >= 2");
  check(dataset == "coord" || dataset == "coord-pmi",
        "dataset must be \"coord\" or \"coord-pmi\"");
}

std::string PipelineConfig::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["window"] = window;
  j["smoothing_lambda"] = smoothing_lambda;
  j["softtfidf_theta"] = softtfidf_theta;
  j["link_candidate_threshold"] = link_candidate_threshold;
  j["link_pair_threshold"] = link_pair_threshold;
  j["pmi_quantile"] = pmi_quantile;
  j["svm_c"] = svm_c;
  j["cv_folds"] = cv_folds;
  j["dataset"] = dataset;
  j["graph_edge_threshold"] = graph_edge_threshold;
  j["graph_top_k"] = graph_top_k;
  j["one_doc_per_line"] = one_doc_per_line;
  j["paths"] = {{"corpus", corpus_paths}, {"source", source_dir}, {"out", out_dir}};
  return j.dump();
}

PipelineConfig PipelineConfig::from_json(const std::string& text,
                                         const std::string& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
  }
  if (!j.contains("seed")) throw std::invalid_argument("config: \"seed\" is mandatory");

  PipelineConfig cfg;
  cfg.seed = j["seed"].get<std::uint64_t>();
  cfg.window = j.value("window", cfg.window);
  cfg.smoothing_lambda = j.value("smoothing_lambda", cfg.smoothing_lambda);
  cfg.softtfidf_theta = j.value("softtfidf_theta", cfg.softtfidf_theta);
  cfg.link_candidate_threshold =
      j.value("link_candidate_threshold", cfg.link_candidate_threshold);
  cfg.link_pair_threshold = j.value("link_pair_threshold", cfg.link_pair_threshold);
  cfg.pmi_quantile = j.value("pmi_quantile", cfg.pmi_quantile);
  cfg.svm_c = j.value("svm_c", cfg.svm_c);
  cfg.cv_folds = j.value("cv_folds", cfg.cv_folds);
  cfg.dataset = j.value("dataset", cfg.dataset);
  cfg.graph_edge_threshold = j.value("graph_edge_threshold", cfg.graph_edge_threshold);
  cfg.graph_top_k = j.value("graph_top_k", cfg.graph_top_k);
  cfg.one_doc_per_line = j.value("one_doc_per_line", cfg.one_doc_per_line);

  auto resolve = [&](const std::string& path) -> std::string {
    if (path.empty() || base_dir.empty()) return path;
    const std::filesystem::path p(path);
    return p.is_absolute() ? path : (std::filesystem::path(base_dir) / p).string();
  };
  if (j.contains("paths")) {
    const auto& paths = j["paths"];
    if (paths.contains("corpus")) {
      if (paths["corpus"].is_string()) {
        cfg.corpus_paths.push_back(resolve(paths["corpus"].get<std::string>()));
      } else {
        for (const auto& p : paths["corpus"])
          cfg.corpus_paths.push_back(resolve(p.get<std::string>()));
      }
    }
    cfg.source_dir = resolve(paths.value("source", std::string()));
    cfg.out_dir = resolve(paths.value("out", std::string()));
  }
  cfg.validate();
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("config: cannot open: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace coordterm
