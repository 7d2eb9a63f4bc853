#pragma once

#include <string>
#include <vector>

#include "igwr/metrics.hpp"
#include "igwr/types.hpp"

namespace igwr {

enum class BaselineMethod { bgwr_cv, bgwr_aicc, forward_selection };
enum class BandwidthCriterion { cv, aicc };

const char* to_string(BaselineMethod m);
const char* to_string(BandwidthCriterion c);

struct BaselineFit {
  BaselineMethod method = BaselineMethod::bgwr_aicc;
  double bandwidth = 0.0;        // global gamma chosen by the search
  double criterion_value = arma::datum::nan;
  SubsetMask subset;
  CoefficientField beta;
  MetricsBlock metrics;
  arma::vec fitted;
  std::vector<std::string> warnings;
};

/// Classic two-step GWR on a fixed subset: the global bandwidth minimizes the
/// CV score or AICc via a coarse scan plus golden-section search on log-gamma
/// over [1e-4, 1e4]; coefficients are per-focal WLS fits at the winner.
/// A minimum pinned to the bracket edge widens the bracket once and then
/// raises SearchBracketFailure; a flat criterion returns the bracket midpoint
/// with a warning.
BaselineFit bgwr_fit(const SpatialDataset& ds, const DistanceMatrix& dm,
                     const SubsetMask& subset, BandwidthCriterion criterion,
                     const SolverConfig& cfg);

struct ForwardSelectionResult {
  std::vector<BaselineFit> steps;   // step k holds the best subset of size k+1
  arma::uword recommended_p = 0;    // last cardinality before the criterion worsens
};

/// Greedy forward selection in which every candidate evaluation re-runs the
/// full bandwidth search, so each step is a complete bgwr_fit.
ForwardSelectionResult forward_selection(const SpatialDataset& ds,
                                         const DistanceMatrix& dm,
                                         arma::uword p_max,
                                         BandwidthCriterion criterion,
                                         const SolverConfig& cfg);

}  // namespace igwr
