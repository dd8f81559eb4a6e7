#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "coordterm/javafacts.hpp"
#include "coordterm/linker.hpp"
#include "coordterm/simkit.hpp"
#include "coordterm/textcorpus.hpp"

namespace coordterm {

// Dataset filter: alphanumeric with at least two upper-case and one
// lower-case character.
bool mention_filter(std::string_view word);

// |ancestors_within(x, n) ∩ ancestors_within(y, n)|
int ancestry_feature(const CodeFacts& facts, const std::string& x_class,
                     const std::string& y_class, TaxonomyKind kind, int n);

inline constexpr int kFeatureCount = 29;

// Per-pair features. The 13 code-side values (code_dist_sim and the twelve
// ancestry counts) are emitted twice in to_vector(): raw and multiplied by
// the pair linking probability.
struct PairFeatures {
  double corpus_dist_sim = 0.0;
  double string_sim = 0.0;
  double link_prob = 0.0;
  double code_dist_sim = 0.0;
  std::array<double, 6> pkg_ancestry{};
  std::array<double, 6> type_ancestry{};

  Eigen::VectorXd to_vector() const;
  static std::array<std::string, kFeatureCount> names();
};

struct FeatureParams {
  double lambda = 1e-4;
  double theta = 0.9;
  double link_pair_threshold = 0.1;
  // Divergence assigned when a side has no observed contexts: the smoothed
  // two-point upper bound 2*log(1/lambda).
  double divergence_sentinel() const;
};

using LinkMap = std::map<std::string, EntityLink>;

PairFeatures build_feature_vector(const std::string& x, const std::string& y,
                                  const CorpusStats& stats, const CodeFacts& facts,
                                  const LinkMap& links, const IdfTable& idf,
                                  const FeatureParams& params);

struct LabeledPair {
  enum class Source { ConjPattern, PmiNegative, RandomNegative };
  std::string x, y;
  bool positive = false;
  double link_prob = 0.0;
  Source source = Source::ConjPattern;
};

struct Dataset {
  std::vector<LabeledPair> pairs;
  Eigen::MatrixXd features;  // pairs.size() x kFeatureCount

  std::vector<int> labels() const;  // +1 / -1
};

struct DatasetParams : FeatureParams {
  double pmi_quantile = 0.25;
  std::uint64_t seed = 0;
};

// Positives: conjunction pairs passing mention_filter and the link
// threshold. Negatives: an equal number of seeded random word pairs passing
// the same filters with no conjunction occurrence.
Dataset build_coord_dataset(const CorpusStats& stats, const CodeFacts& facts,
                            const LinkMap& links, const IdfTable& idf,
                            const DatasetParams& params, std::ostream* warnings = nullptr);

// Positives: eligible conjunction pairs in the top-q PMI quantile.
// Negatives: eligible co-occurring non-conjunction pairs in the bottom-q
// quantile whose words are more frequent than the median word.
Dataset build_coord_pmi_dataset(const CorpusStats& stats, const CodeFacts& facts,
                                const LinkMap& links, const IdfTable& idf,
                                const DatasetParams& params,
                                std::ostream* warnings = nullptr);

// TSV with header `x y label link_prob f1..f29`; floats use %.17g so files
// are bit-exact for a given seed and config.
void write_dataset_tsv(const Dataset& dataset, const std::string& path,
                       const std::string* config_echo = nullptr);
Dataset read_dataset_tsv(const std::string& path);

}  // namespace coordterm
