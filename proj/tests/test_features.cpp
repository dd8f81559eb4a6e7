#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coordterm/features.hpp"
#include "coordterm/pipeline.hpp"

using namespace coordterm;

namespace {

std::string fixture_path(const std::string& name) {
  return std::string(COORDTERM_FIXTURE_DIR) + "/" + name;
}

struct Fixture {
  CorpusStats stats;
  CodeFacts facts;
  IdfTable idf;
  LinkMap links;
  PipelineConfig cfg;

  Fixture() {
    cfg = PipelineConfig::load(fixture_path("pipeline_config.json"));
    stats = stage_ingest_corpus(cfg);
    facts = parse_source_tree(cfg.source_dir);
    idf = build_idf(stats, facts);
    links = stage_link(cfg, stats, facts, idf);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("mention_filter requires two uppers and one lower, alphanumeric") {
  CHECK(mention_filter("JComboBox"));
  CHECK(mention_filter("ArrayList"));
  CHECK_FALSE(mention_filter("server"));
  CHECK_FALSE(mention_filter("AB"));
  CHECK_FALSE(mention_filter("Vector"));  // one upper only
  CHECK_FALSE(mention_filter("java.lang.String"));
  CHECK_FALSE(mention_filter(""));
  CHECK(mention_filter("utf8BigDecoder"));
}

TEST_CASE("ancestry_feature reproduces the worked taxonomy counts") {
  const auto& f = fixture();
  CHECK(ancestry_feature(f.facts, "java.util.ArrayList", "java.util.Vector",
                         TaxonomyKind::Package, 2) == 2);
  CHECK(ancestry_feature(f.facts, "java.util.ArrayList", "java.util.Vector",
                         TaxonomyKind::Type, 1) == 5);
  // disjoint package roots share nothing at any level
  for (int n = 1; n <= 6; ++n)
    CHECK(ancestry_feature(f.facts, "app.Usage", "java.util.ArrayList",
                           TaxonomyKind::Package, n) == 0);
  CHECK_THROWS(ancestry_feature(f.facts, "app.Usage", "no.Class", TaxonomyKind::Type, 1));
}

TEST_CASE("pairs linked to the same class have zero code divergence") {
  const auto& f = fixture();
  FeatureParams params;
  // ArrayList and ArrayLists both resolve to java.util.ArrayList
  REQUIRE(f.links.at("ArrayList").best()->qualified_name == "java.util.ArrayList");
  REQUIRE(f.links.at("ArrayLists").best()->qualified_name == "java.util.ArrayList");

  const PairFeatures pf =
      build_feature_vector("ArrayList", "ArrayLists", f.stats, f.facts, f.links, f.idf, params);
  CHECK(pf.code_dist_sim == 0.0);
  for (int n = 1; n <= 6; ++n) {
    const auto self =
        ancestors_within(f.facts, "java.util.ArrayList", TaxonomyKind::Type, n).size();
    CHECK(pf.type_ancestry[n - 1] == static_cast<double>(self));
  }
}

TEST_CASE("related classes diverge less than unrelated ones in code space") {
  CodeFacts facts;
  for (const auto& name :
       {"io.OutputStream", "io.FileOutputStream", "util.HashMap"}) {
    ClassEntry e;
    e.qualified_name = name;
    e.label = label_of(name);
    e.package = package_of(name);
    facts.classes[name] = std::move(e);
  }
  facts.contexts["io.OutputStream"] = {{"API-write", 10}, {"API-flush", 4}, {"API-close", 6}};
  facts.contexts["io.FileOutputStream"] = {
      {"API-write", 8}, {"API-flush", 3}, {"API-close", 5}, {"ARG-open", 1}};
  facts.contexts["util.HashMap"] = {{"API-put", 9}, {"API-get", 7}, {"ARG-merge", 2}};

  CorpusStats stats;
  ingest_document(stats,
                  "Use FileOutputStream and OutputStream. Use HashMap and OutputStream. "
                  "FileOutputStream wraps OutputStream. HashMap stores entries.",
                  2);
  const IdfTable idf = build_idf(stats, facts);
  PipelineConfig cfg;
  cfg.seed = 1;
  const LinkMap links = stage_link(cfg, stats, facts, idf);
  FeatureParams params;

  const PairFeatures related = build_feature_vector("FileOutputStream", "OutputStream", stats,
                                                    facts, links, idf, params);
  const PairFeatures unrelated =
      build_feature_vector("HashMap", "OutputStream", stats, facts, links, idf, params);
  CHECK(related.code_dist_sim < unrelated.code_dist_sim);
}

TEST_CASE("feature vector layout: weighted block tracks the raw block") {
  const auto& f = fixture();
  FeatureParams params;
  const PairFeatures pf =
      build_feature_vector("ArrayList", "HashMap", f.stats, f.facts, f.links, f.idf, params);
  const Eigen::VectorXd v = pf.to_vector();
  REQUIRE(v.size() == kFeatureCount);
  CHECK(std::abs(v[16] - v[3] * v[2]) < 1e-12);
  for (int n = 0; n < 6; ++n) {
    CHECK(std::abs(v[17 + n] - v[4 + n] * v[2]) < 1e-12);
    CHECK(std::abs(v[23 + n] - v[10 + n] * v[2]) < 1e-12);
  }

  // when the pair links with probability one, weighted equals raw
  if (pf.link_prob == 1.0) {
    CHECK(v[16] == v[3]);
    for (int n = 0; n < 6; ++n) CHECK(v[17 + n] == v[4 + n]);
  }
}

TEST_CASE("feature vectors are symmetric under pair swap") {
  const auto& f = fixture();
  FeatureParams params;
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"ArrayList", "HashMap"},
      {"AbstractList", "RandomAccess"},
      {"ArrayLists", "HashMaps"},
      {"ArrayList", "AbstractList"}};
  for (const auto& [x, y] : pairs) {
    const Eigen::VectorXd xy =
        build_feature_vector(x, y, f.stats, f.facts, f.links, f.idf, params).to_vector();
    const Eigen::VectorXd yx =
        build_feature_vector(y, x, f.stats, f.facts, f.links, f.idf, params).to_vector();
    for (int c = 0; c < kFeatureCount; ++c) CHECK(xy[c] == doctest::Approx(yx[c]).epsilon(1e-12));
  }
}

TEST_CASE("missing code contexts produce the divergence sentinel") {
  const auto& f = fixture();
  FeatureParams params;
  CHECK(params.divergence_sentinel() == doctest::Approx(2.0 * std::log(1e4)).epsilon(1e-12));

  // RandomAccess carries no context counts in the fixture tree
  REQUIRE(f.facts.contexts.at("java.util.RandomAccess").empty());
  const PairFeatures pf = build_feature_vector("RandomAccess", "HashMap", f.stats, f.facts,
                                               f.links, f.idf, params);
  CHECK(pf.code_dist_sim == params.divergence_sentinel());
}

TEST_CASE("below-threshold pairs are the caller's problem") {
  const auto& f = fixture();
  FeatureParams params;
  CHECK_THROWS(build_feature_vector("JButton", "JLabel", f.stats, f.facts, f.links, f.idf,
                                    params));
}

TEST_CASE("coord dataset: balanced, filtered, deterministic") {
  const auto& f = fixture();
  DatasetParams params = dataset_params(f.cfg);
  std::ostringstream warn1, warn2;
  const Dataset d1 =
      build_coord_dataset(f.stats, f.facts, f.links, f.idf, params, &warn1);
  const Dataset d2 =
      build_coord_dataset(f.stats, f.facts, f.links, f.idf, params, &warn2);

  REQUIRE(!d1.pairs.empty());
  std::size_t positives = 0;
  for (const auto& p : d1.pairs) {
    CHECK(mention_filter(p.x));
    CHECK(mention_filter(p.y));
    CHECK(p.link_prob > params.link_pair_threshold);
    CHECK(p.x != p.y);
    if (p.positive) {
      ++positives;
      CHECK(f.stats.conj_pairs.count(canonical_pair(p.x, p.y)) == 1);
    } else {
      CHECK(f.stats.conj_pairs.count(canonical_pair(p.x, p.y)) == 0);
    }
  }
  CHECK(positives * 2 == d1.pairs.size());  // balanced

  // seeded determinism, byte-identical TSV
  const auto path1 = std::filesystem::temp_directory_path() / "coordterm_ds1.tsv";
  const auto path2 = std::filesystem::temp_directory_path() / "coordterm_ds2.tsv";
  write_dataset_tsv(d1, path1.string());
  write_dataset_tsv(d2, path2.string());
  std::ifstream a(path1), b(path2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(!sa.str().empty());

  // round-trip through the TSV reader
  const Dataset reread = read_dataset_tsv(path1.string());
  REQUIRE(reread.pairs.size() == d1.pairs.size());
  for (std::size_t i = 0; i < reread.pairs.size(); ++i) {
    CHECK(reread.pairs[i].x == d1.pairs[i].x);
    CHECK(reread.pairs[i].positive == d1.pairs[i].positive);
  }
  CHECK((reread.features - d1.features).cwiseAbs().maxCoeff() == 0.0);

  std::filesystem::remove(path1);
  std::filesystem::remove(path2);

  // a different seed reshuffles the negatives
  DatasetParams other = params;
  other.seed = params.seed + 1;
  const Dataset d3 = build_coord_dataset(f.stats, f.facts, f.links, f.idf, other);
  CHECK(d3.pairs.size() == d1.pairs.size());
}

TEST_CASE("coord dataset truncates positives when negatives run out") {
  // three eligible words, two of the three pairs are conjunctions
  CodeFacts facts;
  for (const auto& name : {"p.AlphaXx", "p.BravoXx", "p.CriggXx"}) {
    ClassEntry e;
    e.qualified_name = name;
    e.label = label_of(name);
    e.package = "p";
    facts.classes[name] = std::move(e);
    facts.contexts[name];
  }
  CorpusStats stats;
  ingest_document(stats, "AlphaXx and BravoXx. AlphaXx and CriggXx.", 2);
  const IdfTable idf = build_idf(stats, facts);
  PipelineConfig cfg;
  cfg.seed = 9;
  const LinkMap links = stage_link(cfg, stats, facts, idf);

  DatasetParams params;
  params.seed = 9;
  std::ostringstream warnings;
  const Dataset d = build_coord_dataset(stats, facts, links, idf, params, &warnings);
  CHECK(warnings.str().find("truncating") != std::string::npos);
  std::size_t positives = 0, negatives = 0;
  for (const auto& p : d.pairs) (p.positive ? positives : negatives)++;
  CHECK(positives == negatives);
  CHECK(positives == 1);  // only one non-conjunction pair exists
}

TEST_CASE("coord-pmi dataset: quantile selection and filters") {
  const auto& f = fixture();
  DatasetParams params = dataset_params(f.cfg);
  const Dataset d = build_coord_pmi_dataset(f.stats, f.facts, f.links, f.idf, params);
  REQUIRE(!d.pairs.empty());

  std::size_t positives = 0, negatives = 0;
  for (const auto& p : d.pairs) {
    CHECK(mention_filter(p.x));
    CHECK(mention_filter(p.y));
    CHECK(p.link_prob > params.link_pair_threshold);
    const auto pair = canonical_pair(p.x, p.y);
    CHECK(f.stats.pair_freq.at(pair) > 0);
    if (p.positive) {
      ++positives;
      CHECK(f.stats.conj_pairs.count(pair) == 1);
    } else {
      ++negatives;
      CHECK(f.stats.conj_pairs.count(pair) == 0);
    }
  }
  CHECK(positives == negatives);

  const Dataset again = build_coord_pmi_dataset(f.stats, f.facts, f.links, f.idf, params);
  CHECK(again.pairs.size() == d.pairs.size());
  for (std::size_t i = 0; i < d.pairs.size(); ++i) {
    CHECK(again.pairs[i].x == d.pairs[i].x);
    CHECK(again.pairs[i].y == d.pairs[i].y);
  }
}
