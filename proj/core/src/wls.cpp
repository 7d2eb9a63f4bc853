#include "igwr/wls.hpp"

namespace igwr {
namespace {

// Cholesky solve of the weighted normal equations with jitter escalation:
// clean, +1e-10 on the Gram diagonal, +1e-6, then SingularNormalMatrix.
arma::vec solve_normal_equations(arma::mat G, const arma::vec& b,
                                 double ridge, bool* fallback_used) {
  if (ridge > 0.0) G.diag() += ridge;
  arma::mat R;
  if (arma::chol(R, G))
    return arma::solve(arma::trimatu(R),
                       arma::solve(arma::trimatl(R.t()), b));
  for (double jitter : {1e-10, 1e-6}) {
    arma::mat Gj = G;
    Gj.diag() += jitter;
    if (arma::chol(R, Gj)) {
      if (fallback_used) *fallback_used = true;
      return arma::solve(arma::trimatu(R),
                         arma::solve(arma::trimatl(R.t()), b));
    }
  }
  throw Exception(ErrorCode::SingularNormalMatrix,
                  "weighted Gram matrix is singular even with 1e-6 jitter");
}

arma::uvec mask_columns(const SubsetMask& subset) {
  return subset.selected_columns();
}

}  // namespace

WlsSolution wls_fit_cols(const arma::mat& X, const arma::vec& y,
                         const arma::vec& w, const arma::uvec& cols,
                         const arma::rowvec& focal_row, double ridge) {
  if (cols.n_elem == 0)
    throw Exception(ErrorCode::ShapeMismatch, "empty column set");
  const arma::mat Xs = X.cols(cols);
  const arma::mat Xw = Xs.each_col() % w;
  const arma::mat G = Xs.t() * Xw;
  const arma::vec b = Xw.t() * y;

  WlsSolution sol;
  sol.beta_sub = solve_normal_equations(G, b, ridge, &sol.ridge_used);
  const arma::vec resid = y - Xs * sol.beta_sub;
  sol.wsse = arma::dot(w, arma::square(resid));
  sol.sse_unweighted = arma::dot(resid, resid);
  sol.fitted_at_focal = arma::dot(focal_row.cols(cols), sol.beta_sub);
  return sol;
}

WlsSolution wls_fit(const SpatialDataset& ds, const SubsetMask& subset,
                    const WeightRow& w, const arma::rowvec& focal_row,
                    double ridge) {
  return wls_fit_cols(ds.X, ds.y, w.w, mask_columns(subset), focal_row, ridge);
}

arma::rowvec hat_row(const SpatialDataset& ds, const SubsetMask& subset,
                     const WeightRow& w, const arma::rowvec& focal_row,
                     double ridge) {
  const arma::uvec cols = mask_columns(subset);
  const arma::mat Xs = ds.X.cols(cols);
  const arma::mat Xw = Xs.each_col() % w.w;
  const arma::mat G = Xs.t() * Xw;
  // row = x_o(S) G^-1 X(S)^T W
  bool fallback = false;
  const arma::vec g_inv_x =
      solve_normal_equations(G, focal_row.cols(cols).t(), ridge, &fallback);
  return g_inv_x.t() * Xw.t();
}

double loo_predict(const SpatialDataset& ds, const SubsetMask& subset,
                   const WeightRow& w, arma::uword focal_index, double ridge) {
  if (focal_index >= ds.n_obs())
    throw Exception(ErrorCode::ShapeMismatch, "focal index out of range");
  arma::vec w_loo = w.w;
  w_loo[focal_index] = 0.0;
  const arma::rowvec focal_row = ds.X.row(focal_index);
  const WlsSolution sol =
      wls_fit_cols(ds.X, ds.y, w_loo, mask_columns(subset), focal_row, ridge);
  return sol.fitted_at_focal;
}

}  // namespace igwr
