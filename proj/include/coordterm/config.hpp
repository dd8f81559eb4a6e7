#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace coordterm {

// All tunables in one place; the JSON form is echoed into every artifact so
// results are self-describing. The seed is mandatory.
struct PipelineConfig {
  std::uint64_t seed = 0;
  int window = 2;
  double smoothing_lambda = 1e-4;
  double softtfidf_theta = 0.9;
  double link_candidate_threshold = 0.6;
  double link_pair_threshold = 0.1;
  double pmi_quantile = 0.25;
  double svm_c = 1.0;
  int cv_folds = 10;
  std::string dataset = "coord";  // coord | coord-pmi, used by train/cv/rank
  double graph_edge_threshold = 0.0;
  std::size_t graph_top_k = 0;  // 0: use the threshold
  bool one_doc_per_line = false;

  std::vector<std::string> corpus_paths;
  std::string source_dir;
  std::string out_dir;

  // Throws std::invalid_argument when a value is out of its documented range.
  void validate() const;

  std::string to_json() const;
  // Relative paths are resolved against `base_dir` when given.
  static PipelineConfig from_json(const std::string& text,
                                  const std::string& base_dir = "");
  static PipelineConfig load(const std::string& path);
};

}  // namespace coordterm
