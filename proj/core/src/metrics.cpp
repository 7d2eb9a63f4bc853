#include "igwr/metrics.hpp"

#include <cmath>

namespace igwr {

MetricsBlock compute_metrics(const arma::vec& y, const arma::vec& fitted,
                             arma::uword n_params_nominal,
                             std::optional<double> hat_trace) {
  if (y.n_elem != fitted.n_elem)
    throw Exception(ErrorCode::ShapeMismatch, "fitted length differs from y");
  const double n = static_cast<double>(y.n_elem);
  const arma::vec resid = y - fitted;
  const double tss = arma::accu(arma::square(y - arma::mean(y)));
  if (tss <= 0.0)
    throw Exception(ErrorCode::ConstantResponse,
                    "TSS is zero; R^2 undefined");

  MetricsBlock block;
  block.rss = arma::dot(resid, resid);
  block.r2 = 1.0 - block.rss / tss;
  const double k = static_cast<double>(n_params_nominal);
  if (n - k > 0.0)
    block.r2_adj = 1.0 - (1.0 - block.r2) * (n - 1.0) / (n - k);
  if (hat_trace) {
    block.hat_trace = *hat_trace;
    if (n - *hat_trace > 0.0)
      block.r2_adj_eff =
          1.0 - (1.0 - block.r2) * (n - 1.0) / (n - *hat_trace);
    const double denom = n - 2.0 - *hat_trace;
    if (denom > 0.0 && block.rss > 0.0) {
      const double sigma_hat = std::sqrt(block.rss / n);
      block.aicc = 2.0 * n * std::log(sigma_hat) +
                   n * std::log(2.0 * arma::datum::pi) +
                   n * (n + *hat_trace) / denom;
    }
  }
  return block;
}

std::optional<double> range_to_mean(const CoefficientField& beta, arma::uword j) {
  if (j >= beta.beta.n_cols)
    throw Exception(ErrorCode::ShapeMismatch, "coefficient index out of range");
  const arma::vec col = beta.beta.col(j);
  const double mean = arma::mean(col);
  if (std::abs(mean) <= 1e-12) return std::nullopt;
  return (col.max() - col.min()) / mean;
}

std::optional<double> avg_symmetric_difference(
    const std::vector<SubsetMask>& subsets) {
  const std::size_t c = subsets.size();
  if (c < 2) return std::nullopt;
  double total = 0.0;
  for (std::size_t a = 0; a < c; ++a) {
    for (std::size_t b = a + 1; b < c; ++b) {
      const auto& za = subsets[a].z;
      const auto& zb = subsets[b].z;
      if (za.size() != zb.size())
        throw Exception(ErrorCode::ShapeMismatch, "subset masks differ in size");
      int diff = 0;
      for (std::size_t j = 0; j < za.size(); ++j) {
        if (subsets[a].intercept_locked && j == 0) continue;
        if (za[j] != zb[j]) ++diff;
      }
      total += diff;
    }
  }
  const double n_pairs = 0.5 * static_cast<double>(c) * static_cast<double>(c - 1);
  return total / n_pairs;
}

}  // namespace igwr
