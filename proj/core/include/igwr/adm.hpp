#pragma once

#include <optional>
#include <vector>

#include "igwr/types.hpp"

namespace igwr {

/// Optional starting point for igwr_fit. gamma overrides the intercept-only
/// initialization; mask seeds the first subset search; when beta is also
/// present the run starts from a fully evaluated solution, so a fit re-seeded
/// with its own output terminates after one iteration.
struct IgwrSeed {
  std::optional<BandwidthField> gamma;
  std::optional<SubsetMask> mask;
  std::optional<arma::mat> beta;  // c x m
};

/// Alternating minimization over the two blocks: exact subset + coefficient
/// estimation with bandwidths fixed, then per-focal (or global) bandwidth
/// estimation with coefficients fixed, until the relative objective gap drops
/// below cfg.theta or cfg.max_adm_iters is hit. The half-step objective trace
/// is checked for monotonicity; any increase beyond 1e-9 relative aborts with
/// NonMonotoneObjective.
FitReport igwr_fit(const SpatialDataset& ds, const DistanceMatrix& dm,
                   arma::uword p, BandwidthMode mode, const SolverConfig& cfg,
                   const std::optional<IgwrSeed>& seed = {});

struct SweepResult {
  std::vector<FitReport> reports;  // one per cardinality, ascending
  arma::uword recommended_p = 0;
};

/// Runs igwr_fit for every cardinality in [p_min, p_max] and applies the
/// RSS-curve recommendation rule.
SweepResult sweep_p(const SpatialDataset& ds, const DistanceMatrix& dm,
                    arma::uword p_min, arma::uword p_max, BandwidthMode mode,
                    const SolverConfig& cfg);

/// Cardinality recommendation from an RSS-versus-p curve. The first p whose
/// next step improves RSS by no more than 10% of the curve's total range wins;
/// if every step improves by more than that, the point with the largest
/// normalized distance below the chord between the curve endpoints is used.
arma::uword recommend_cardinality(const std::vector<double>& rss,
                                  arma::uword p_min);

}  // namespace igwr
