#pragma once

#include <iosfwd>
#include <string>

#include "coordterm/classifier.hpp"
#include "coordterm/config.hpp"
#include "coordterm/features.hpp"
#include "coordterm/graphout.hpp"
#include "coordterm/javafacts.hpp"
#include "coordterm/linker.hpp"
#include "coordterm/textcorpus.hpp"

namespace coordterm {

// Stage helpers shared by the CLI; each writes one artifact into cfg.out_dir.
CorpusStats stage_ingest_corpus(const PipelineConfig& cfg);
IdfTable build_idf(const CorpusStats& stats, const CodeFacts& facts);
LinkMap stage_link(const PipelineConfig& cfg, const CorpusStats& stats,
                   const CodeFacts& facts, const IdfTable& idf);
void save_links(const LinkMap& links, const std::string& path,
                const std::string* config_echo = nullptr);
LinkMap load_links(const std::string& path);

DatasetParams dataset_params(const PipelineConfig& cfg);

// Pairs scored at the rank stage: co-occurring pairs passing mention_filter
// and the link threshold.
std::vector<std::pair<std::string, std::string>> candidate_pairs(const CorpusStats& stats,
                                                                 const LinkMap& links,
                                                                 double link_pair_threshold);

void save_ranking(const std::vector<RankedPair>& ranking, const std::string& path,
                  const std::string* config_echo = nullptr);
std::vector<RankedPair> load_ranking(const std::string& path);

// Runs ingest -> extract-facts -> link -> build-dataset -> cv/train -> rank
// -> export-graph. Stages whose outputs are newer than all of their inputs
// are skipped unless `force` is set. Errors carry the failing stage's name.
void run_pipeline(const PipelineConfig& cfg, bool force = false,
                  std::ostream* log = nullptr,
                  const std::string& config_file_path = "");

}  // namespace coordterm
