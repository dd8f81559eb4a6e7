#include "coordterm/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "coordterm/rng.hpp"

namespace coordterm {

namespace {

struct Standardization {
  Eigen::VectorXd means;
  Eigen::VectorXd stds;
};

Standardization fit_standardization(const Eigen::MatrixXd& X) {
  Standardization s;
  const Eigen::Index n = X.rows();
  s.means = X.colwise().mean();
  Eigen::MatrixXd centered = X.rowwise() - s.means.transpose();
  s.stds = (centered.array().square().colwise().sum() / static_cast<double>(n))
               .sqrt()
               .matrix();
  for (Eigen::Index c = 0; c < s.stds.size(); ++c)
    if (s.stds[c] < 1e-12) s.stds[c] = 1.0;
  return s;
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd& X, const Standardization& s) {
  return (X.rowwise() - s.means.transpose()).array().rowwise() /
         s.stds.transpose().array();
}

}  // namespace

LinearModel train_svm(const Eigen::MatrixXd& X, const std::vector<int>& y, double C,
                      std::uint64_t seed, const TrainOptions& options) {
  const Eigen::Index n = X.rows();
  if (n == 0 || static_cast<std::size_t>(n) != y.size())
    throw std::invalid_argument("train_svm: empty dataset or label size mismatch");
  bool has_pos = false, has_neg = false;
  for (const int label : y) {
    if (label > 0) has_pos = true;
    if (label < 0) has_neg = true;
  }
  if (!has_pos || !has_neg)
    throw std::invalid_argument("train_svm: need at least one example of each label");
  if (C <= 0.0) throw std::invalid_argument("train_svm: C must be positive");

  const Standardization stz = fit_standardization(X);
  const Eigen::MatrixXd Z = standardize(X, stz);
  const Eigen::Index d = Z.cols();

  // Q_ii with the implicit bias feature appended.
  Eigen::VectorXd qii(n);
  for (Eigen::Index i = 0; i < n; ++i) qii[i] = Z.row(i).squaredNorm() + 1.0;

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double bias_w = 0.0;

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);

  for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
    seeded_shuffle(order, rng);
    double max_violation = 0.0;
    for (const std::size_t idx : order) {
      const Eigen::Index i = static_cast<Eigen::Index>(idx);
      const double yi = static_cast<double>(y[idx]);
      const double gradient = yi * (Z.row(i).dot(w) + bias_w) - 1.0;

      double projected = gradient;
      if (alpha[i] <= 0.0)
        projected = std::min(gradient, 0.0);
      else if (alpha[i] >= C)
        projected = std::max(gradient, 0.0);
      max_violation = std::max(max_violation, std::abs(projected));
      if (std::abs(projected) < 1e-14) continue;

      const double updated = std::clamp(alpha[i] - gradient / qii[i], 0.0, C);
      const double delta = (updated - alpha[i]) * yi;
      if (delta != 0.0) {
        w += delta * Z.row(i).transpose();
        bias_w += delta;
        alpha[i] = updated;
      }
    }
    if (max_violation < options.tolerance) break;
  }

  LinearModel model;
  model.weights = std::move(w);
  model.bias = bias_w;
  model.means = stz.means;
  model.stds = stz.stds;
  model.C = C;
  return model;
}

double decision_value(const LinearModel& model, const Eigen::VectorXd& x) {
  const Eigen::ArrayXd z = (x - model.means).array() / model.stds.array();
  return model.weights.dot(z.matrix()) + model.bias;
}

double cross_validate(const Eigen::MatrixXd& X, const std::vector<int>& y, int k, double C,
                      std::uint64_t seed, const TrainOptions& options) {
  const std::size_t n = y.size();
  if (k < 2) throw std::invalid_argument("cross_validate: k must be >= 2");
  if (static_cast<std::size_t>(k) > n)
    throw std::invalid_argument("cross_validate: k exceeds dataset size");

  // stratified fold assignment: shuffle each class, deal round-robin
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < n; ++i) (y[i] > 0 ? pos : neg).push_back(i);
  std::mt19937_64 rng(seed);
  seeded_shuffle(pos, rng);
  seeded_shuffle(neg, rng);
  std::vector<int> fold(n, 0);
  for (std::size_t i = 0; i < pos.size(); ++i) fold[pos[i]] = static_cast<int>(i % k);
  for (std::size_t i = 0; i < neg.size(); ++i) fold[neg[i]] = static_cast<int>(i % k);

  double accuracy_sum = 0.0;
  int folds_used = 0;
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < n; ++i) (fold[i] == f ? test_idx : train_idx).push_back(i);
    if (test_idx.empty()) continue;

    Eigen::MatrixXd Xtr(train_idx.size(), X.cols());
    std::vector<int> ytr(train_idx.size());
    for (std::size_t i = 0; i < train_idx.size(); ++i) {
      Xtr.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(train_idx[i]));
      ytr[i] = y[train_idx[i]];
    }
    const LinearModel model = train_svm(Xtr, ytr, C, seed + static_cast<std::uint64_t>(f) + 1,
                                        options);

    int correct = 0;
    for (const std::size_t i : test_idx) {
      const double score =
          decision_value(model, X.row(static_cast<Eigen::Index>(i)).transpose());
      const int predicted = score >= 0.0 ? 1 : -1;
      if (predicted == y[i]) ++correct;
    }
    accuracy_sum += static_cast<double>(correct) / static_cast<double>(test_idx.size());
    ++folds_used;
  }
  return folds_used == 0 ? 0.0 : accuracy_sum / folds_used;
}

std::vector<RankedPair> rank_pairs(const LinearModel& model,
                                   const std::vector<std::pair<std::string, std::string>>& pairs,
                                   const Eigen::MatrixXd& X) {
  if (static_cast<Eigen::Index>(pairs.size()) != X.rows())
    throw std::invalid_argument("rank_pairs: pair/feature row mismatch");
  std::vector<RankedPair> ranked;
  ranked.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    ranked.push_back({pairs[i].first, pairs[i].second,
                      decision_value(model, X.row(static_cast<Eigen::Index>(i)).transpose())});
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedPair& a, const RankedPair& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  });
  return ranked;
}

F1Result f1_at_rank(const std::vector<RankedPair>& ranked,
                    const std::set<WordPair>& gold_positives, std::size_t cutoff) {
  F1Result result;
  const std::size_t slice = std::min(cutoff, ranked.size());
  if (slice == 0 || gold_positives.empty()) return result;

  std::size_t true_positives = 0;
  for (std::size_t i = 0; i < slice; ++i)
    if (gold_positives.count(canonical_pair(ranked[i].x, ranked[i].y))) ++true_positives;

  result.precision = static_cast<double>(true_positives) / static_cast<double>(slice);
  result.recall =
      static_cast<double>(true_positives) / static_cast<double>(gold_positives.size());
  if (result.precision + result.recall > 0.0)
    result.f1 = 2.0 * result.precision * result.recall / (result.precision + result.recall);
  return result;
}

std::string model_to_json(const LinearModel& model, const std::string* config_echo) {
  nlohmann::json j;
  j["version"] = 1;
  if (config_echo) j["config"] = nlohmann::json::parse(*config_echo);
  j["C"] = model.C;
  j["bias"] = model.bias;
  auto to_array = [](const Eigen::VectorXd& v) {
    std::vector<double> out(v.data(), v.data() + v.size());
    return out;
  };
  j["weights"] = to_array(model.weights);
  j["means"] = to_array(model.means);
  j["stds"] = to_array(model.stds);
  return j.dump(2) + "\n";
}

LinearModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("model: malformed JSON: ") + e.what());
  }
  for (const char* key : {"weights", "bias", "means", "stds"})
    if (!j.contains(key))
      throw std::runtime_error(std::string("model: missing \"") + key + "\" field");

  LinearModel model;
  auto to_vector = [](const nlohmann::json& arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i];
    return v;
  };
  model.weights = to_vector(j["weights"]);
  model.means = to_vector(j["means"]);
  model.stds = to_vector(j["stds"]);
  model.bias = j["bias"].get<double>();
  model.C = j.value("C", 1.0);
  if (model.means.size() != model.weights.size() || model.stds.size() != model.weights.size())
    throw std::runtime_error("model: inconsistent vector sizes");
  for (Eigen::Index i = 0; i < model.stds.size(); ++i)
    if (model.stds[i] <= 0.0) throw std::runtime_error("model: non-positive std");
  return model;
}

void save_model(const LinearModel& model, const std::string& path,
                const std::string* config_echo) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("model: cannot open for writing: " + path);
  out << model_to_json(model, config_echo);
}

LinearModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("model: cannot open: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace coordterm
