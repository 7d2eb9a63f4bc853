#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "igwr/types.hpp"

namespace igwr {

struct SubsetSearchStats {
  std::uint64_t nodes_expanded = 0;
  std::uint64_t nodes_pruned = 0;
  std::uint64_t leaves_evaluated = 0;
  std::uint64_t incumbent_updates = 0;  // strict improvements after the seed
};

struct MpBetaResult {
  SubsetMask mask;
  CoefficientField beta;    // c x m, zero off-subset
  arma::mat errors;         // c x n residuals at the returned coefficients
  double objective = 0.0;   // gamma term + total WSSE == integrated objective
  SubsetSearchStats stats;
  bool ridge_used = false;
};

/// Streams every mask with exactly p of the listed free columns and no
/// forbidden pair, in lexicographic order of the ascending index tuples.
void enumerate_feasible_masks(
    const arma::uvec& free_cols, arma::uword p,
    const std::vector<IndexPair>& forbidden_pairs,
    const std::function<void(const arma::uvec&)>& visit);

/// Convenience collector over enumerate_feasible_masks.
std::vector<arma::uvec> collect_feasible_masks(
    const arma::uvec& free_cols, arma::uword p,
    const std::vector<IndexPair>& forbidden_pairs);

/// Exact subset estimation with the bandwidths held fixed: over all feasible
/// masks, minimize sum_o [gamma_o S_o + WSSE_o(mask)]. Ties go to the mask
/// with the smallest index sum. warm_start seeds the incumbent only; the
/// optimum is unaffected.
MpBetaResult solve_mp_beta(const SpatialDataset& ds, const DistanceMatrix& dm,
                           const BandwidthField& bw, arma::uword p,
                           const std::vector<IndexPair>& forbidden_pairs,
                           const SolverConfig& cfg,
                           const std::optional<SubsetMask>& warm_start = {});

}  // namespace igwr
