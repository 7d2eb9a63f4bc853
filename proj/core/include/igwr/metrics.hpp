#pragma once

#include <optional>
#include <vector>

#include "igwr/types.hpp"

namespace igwr {

struct MetricsBlock {
  double rss = arma::datum::nan;
  double r2 = arma::datum::nan;
  double r2_adj = arma::datum::nan;      // nominal: p+1 parameters
  double r2_adj_eff = arma::datum::nan;  // effective: tr(H) parameters
  double aicc = arma::datum::nan;
  double hat_trace = arma::datum::nan;
};

/// RSS, R^2 and both adjusted-R^2 variants; AICc (sigma-hat^2 = RSS/n) when a
/// hat-matrix trace is supplied. Throws ConstantResponse when TSS is zero.
MetricsBlock compute_metrics(const arma::vec& y, const arma::vec& fitted,
                             arma::uword n_params_nominal,
                             std::optional<double> hat_trace = {});

/// (max_o beta_oj - min_o beta_oj) / mean_o beta_oj. A mean within 1e-12 of
/// zero makes the ratio undefined and yields nullopt rather than infinity.
std::optional<double> range_to_mean(const CoefficientField& beta, arma::uword j);

/// Mean symmetric-difference cardinality between the free-column selections
/// of all unordered focal pairs. Undefined (nullopt) for fewer than two masks.
std::optional<double> avg_symmetric_difference(const std::vector<SubsetMask>& subsets);

}  // namespace igwr
