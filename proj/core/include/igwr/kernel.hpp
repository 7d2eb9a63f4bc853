#pragma once

#include "igwr/types.hpp"

namespace igwr {

/// Exponential kernel weights of one focal point: w_i = exp(-gamma d_i^2).
struct WeightRow {
  arma::vec w;
  double gamma_used = 0.0;
};

WeightRow weight_row(const arma::vec& d_row, double gamma);

/// gamma_o * S_o + sum_i e_i^2 exp(-gamma_o d_i^2) for one focal point.
double per_focal_objective(const arma::vec& errors_o, const arma::vec& d_row,
                           double gamma_o);

/// The integrated negative log-likelihood over all focal points,
///   sum_o gamma_o S_o + sum_o sum_i e_oi^2 exp(-gamma_o d_oi^2),
/// evaluated focal-major, observation-minor so traces reproduce bit-for-bit.
double integrated_objective(const arma::mat& errors, const DistanceMatrix& dm,
                            const BandwidthField& bw);

}  // namespace igwr
