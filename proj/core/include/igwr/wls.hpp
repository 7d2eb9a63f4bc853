#pragma once

#include "igwr/kernel.hpp"
#include "igwr/types.hpp"

namespace igwr {

struct WlsSolution {
  arma::vec beta_sub;        // coefficients on the selected columns, ascending
  double wsse = 0.0;         // sum_i w_i e_i^2
  double sse_unweighted = 0.0;
  double fitted_at_focal = 0.0;
  bool ridge_used = false;   // jitter fallback fired on a singular Gram matrix
};

/// Weighted least squares on an explicit column set. Normal equations with a
/// Cholesky factorization; on singularity the Gram diagonal is jittered with
/// 1e-10 and then 1e-6 before SingularNormalMatrix is thrown.
WlsSolution wls_fit_cols(const arma::mat& X, const arma::vec& y,
                         const arma::vec& w, const arma::uvec& cols,
                         const arma::rowvec& focal_row, double ridge = 0.0);

/// Mask-facing wrapper of wls_fit_cols.
WlsSolution wls_fit(const SpatialDataset& ds, const SubsetMask& subset,
                    const WeightRow& w, const arma::rowvec& focal_row,
                    double ridge = 0.0);

/// The hat row X_o(S) (X(S)^T W X(S))^-1 X(S)^T W mapping y to the fitted
/// value at the focal point.
arma::rowvec hat_row(const SpatialDataset& ds, const SubsetMask& subset,
                     const WeightRow& w, const arma::rowvec& focal_row,
                     double ridge = 0.0);

/// Leave-one-out prediction at observation focal_index: the self weight is
/// forced to zero before fitting.
double loo_predict(const SpatialDataset& ds, const SubsetMask& subset,
                   const WeightRow& w, arma::uword focal_index,
                   double ridge = 0.0);

}  // namespace igwr
