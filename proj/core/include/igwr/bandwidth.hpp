#pragma once

#include <vector>

#include "igwr/types.hpp"

namespace igwr {

/// Bandwidth estimation with the coefficients held fixed. Each focal point
/// (local mode) or the pooled problem (global mode) is a strictly convex 1-D
/// minimization of f(g) = g*S + sum e^2 exp(-g d^2) over g >= 0, solved on
/// the monotone derivative by bracketing plus safeguarded Newton. Degenerate
/// rows (all-zero errors or distances) return 0 with a warning.
BandwidthField solve_mp_gamma(const arma::mat& errors, const DistanceMatrix& dm,
                              BandwidthMode mode, const SolverConfig& cfg,
                              std::vector<std::string>* warnings = nullptr);

/// Initial bandwidths from the intercept-only model: every focal point uses
/// the unweighted mean of y as its fit, and the resulting errors feed
/// solve_mp_gamma.
BandwidthField gamma_init(const SpatialDataset& ds, const DistanceMatrix& dm,
                          BandwidthMode mode, const SolverConfig& cfg,
                          std::vector<std::string>* warnings = nullptr);

}  // namespace igwr
