#include "igwr/kernel.hpp"

namespace igwr {

WeightRow weight_row(const arma::vec& d_row, double gamma) {
  if (!(gamma >= 0.0))
    throw Exception(ErrorCode::NegativeBandwidth,
                    "kernel bandwidth must be >= 0");
  if (!d_row.is_finite())
    throw Exception(ErrorCode::NonFinite, "distance row contains NaN/inf");
  // exp underflow to 0 for huge gamma*d^2 is the correct limit.
  return WeightRow{arma::exp(-gamma * arma::square(d_row)), gamma};
}

double per_focal_objective(const arma::vec& errors_o, const arma::vec& d_row,
                           double gamma_o) {
  const arma::vec d2 = arma::square(d_row);
  double acc = gamma_o * arma::accu(d2);
  for (arma::uword i = 0; i < errors_o.n_elem; ++i)
    acc += errors_o[i] * errors_o[i] * std::exp(-gamma_o * d2[i]);
  return acc;
}

double integrated_objective(const arma::mat& errors, const DistanceMatrix& dm,
                            const BandwidthField& bw) {
  if (!errors.is_finite())
    throw Exception(ErrorCode::NonFiniteErrors, "errors contain NaN/inf");
  bw.validate();
  const arma::uword c = dm.d.n_rows;
  const arma::uword n = dm.d.n_cols;
  if (errors.n_rows != c || errors.n_cols != n)
    throw Exception(ErrorCode::ShapeMismatch, "errors shape differs from distances");

  // Fixed focal-major, observation-minor order keeps traces reproducible.
  double gamma_term = 0.0;
  for (arma::uword o = 0; o < c; ++o)
    gamma_term += bw.at(o) * dm.squared_row_sums[o];
  double wsse_term = 0.0;
  for (arma::uword o = 0; o < c; ++o) {
    const double g = bw.at(o);
    double row = 0.0;
    for (arma::uword i = 0; i < n; ++i) {
      const double e = errors(o, i);
      const double d = dm.d(o, i);
      row += e * e * std::exp(-g * d * d);
    }
    wsse_term += row;
  }
  return gamma_term + wsse_term;
}

}  // namespace igwr
