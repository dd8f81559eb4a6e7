#pragma once

// Reference implementations used by tests and the acceptance suite. They are
// deliberately written along different lines than the library code: direct
// summations, quadratic scans, exhaustive enumeration, projected-gradient
// optimization.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "coordterm/textcorpus.hpp"

namespace oracles {

// Term-by-term D(p||q) + D(q||p) over dense vectors on a shared support.
double sym_kl_dense(const std::vector<double>& p, const std::vector<double>& q);

// O(n^2) scan over all token pairs of every sentence.
std::map<std::string, std::map<std::string, long long>> contexts_quadratic(
    const std::vector<coordterm::Sentence>& sentences, int window);

// Independent re-scan of Java sources for ARG-/API- context counts. Naive
// token patterns plus a flat symbol table; the semantics mirror the parser's
// contract, the implementation does not.
std::map<std::string, std::map<std::string, long long>> context_counts_rescan(
    const std::vector<std::pair<std::string, std::string>>& named_sources);

// Projected-gradient ascent on the hinge-loss dual; returns the decision
// value for every training row.
std::vector<double> svm_reference_decisions(const Eigen::MatrixXd& X,
                                            const std::vector<int>& y, double C,
                                            int iterations = 200000);

// Brandes-free betweenness: enumerate every shortest path via DFS (small n).
std::vector<double> betweenness_enumerate(std::size_t n,
                                          const std::vector<std::vector<int>>& adjacency);

// All-pairs path-count identity: sigma_sv * sigma_vt / sigma_st summed over
// pairs with d(s,v) + d(v,t) = d(s,t).
std::vector<double> betweenness_pathcount(std::size_t n,
                                          const std::vector<std::vector<int>>& adjacency);

double modularity_of(std::size_t n, const std::vector<std::pair<int, int>>& edges,
                     const std::vector<int>& community);

// Exhaustive maximum over all partitions (restricted growth strings); n <= 10.
double best_partition_modularity(std::size_t n,
                                 const std::vector<std::pair<int, int>>& edges,
                                 std::vector<int>* best_partition = nullptr);

}  // namespace oracles
