#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "coordterm/textcorpus.hpp"

namespace coordterm {

// L2-regularized L1-hinge linear classifier over z-scored features. The
// bias rides along as an implicit constant-1 feature.
struct LinearModel {
  Eigen::VectorXd weights;  // in standardized space
  double bias = 0.0;
  Eigen::VectorXd means;
  Eigen::VectorXd stds;  // degenerate features get std 1 (and weight 0)
  double C = 1.0;
};

struct TrainOptions {
  double tolerance = 1e-6;  // max dual violation
  int max_epochs = 1000;
};

// Dual coordinate descent; the per-epoch permutation comes from `seed`, so
// training is deterministic. Throws if `y` holds a single class.
LinearModel train_svm(const Eigen::MatrixXd& X, const std::vector<int>& y, double C,
                      std::uint64_t seed, const TrainOptions& options = {});

double decision_value(const LinearModel& model, const Eigen::VectorXd& x);

// Stratified k-fold mean accuracy; standardization is fit on the train folds
// only (inside train_svm). Throws when k < 2 or k exceeds the dataset size.
double cross_validate(const Eigen::MatrixXd& X, const std::vector<int>& y, int k, double C,
                      std::uint64_t seed, const TrainOptions& options = {});

struct RankedPair {
  std::string x, y;
  double score = 0.0;
};

// Decision values sorted descending, ties broken lexicographically on (x, y).
std::vector<RankedPair> rank_pairs(const LinearModel& model,
                                   const std::vector<std::pair<std::string, std::string>>& pairs,
                                   const Eigen::MatrixXd& X);

struct F1Result {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Precision/recall/F1 of the top-`cutoff` slice against a gold positive set
// (canonical pairs). An empty slice or empty gold set scores 0 by convention.
F1Result f1_at_rank(const std::vector<RankedPair>& ranked,
                    const std::set<WordPair>& gold_positives, std::size_t cutoff);

std::string model_to_json(const LinearModel& model, const std::string* config_echo = nullptr);
LinearModel model_from_json(const std::string& text);
void save_model(const LinearModel& model, const std::string& path,
                const std::string* config_echo = nullptr);
LinearModel load_model(const std::string& path);

}  // namespace coordterm
