#include "igwr/bandwidth.hpp"

#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace igwr {
namespace {

// One convex subproblem: minimize g*S + sum_i a_i/q_i ... the objective is
// g*S + sum e^2 exp(-g d^2); its derivative S - sum_i a_i exp(-g q_i) with
// a_i = d_i^2 e_i^2 and q_i = d_i^2 is monotone increasing in g.
struct ConvexRow {
  double S = 0.0;
  std::vector<double> a;
  std::vector<double> q;
};

double derivative(const ConvexRow& row, double g) {
  double acc = 0.0;
  for (std::size_t i = 0; i < row.a.size(); ++i)
    acc += row.a[i] * std::exp(-g * row.q[i]);
  return row.S - acc;
}

double second_derivative(const ConvexRow& row, double g) {
  double acc = 0.0;
  for (std::size_t i = 0; i < row.a.size(); ++i)
    acc += row.a[i] * row.q[i] * std::exp(-g * row.q[i]);
  return acc;
}

// Root of the monotone derivative on [0, inf): bracket by doubling, then
// Newton clamped to the bracket with bisection fallback.
double solve_row(const ConvexRow& row, double gamma_tol, bool* degenerate) {
  if (row.a.empty()) {
    // All-zero errors or distances: objective weakly monotone in g, take 0.
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  const double tol = gamma_tol * (1.0 + row.S);
  if (derivative(row, 0.0) >= 0.0) return 0.0;

  double lo = 0.0;
  double hi = 1.0;
  while (derivative(row, hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300)
      throw Exception(ErrorCode::NonFiniteErrors,
                      "bandwidth bracketing diverged");
  }

  double g = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double fp = derivative(row, g);
    if (std::abs(fp) <= tol) return g;
    if (fp > 0.0)
      hi = g;
    else
      lo = g;
    const double fpp = second_derivative(row, g);
    double next = (fpp > 0.0) ? g - fp / fpp : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    g = next;
    if (hi - lo <= 1e-15 * (1.0 + hi)) return g;
  }
  return g;
}

ConvexRow row_for_focal(const arma::mat& errors, const DistanceMatrix& dm,
                        arma::uword o) {
  ConvexRow row;
  row.S = dm.squared_row_sums[o];
  const arma::uword n = dm.d.n_cols;
  row.a.reserve(n);
  row.q.reserve(n);
  for (arma::uword i = 0; i < n; ++i) {
    const double d2 = dm.d(o, i) * dm.d(o, i);
    const double a = d2 * errors(o, i) * errors(o, i);
    if (a > 0.0) {
      row.a.push_back(a);
      row.q.push_back(d2);
    }
  }
  return row;
}

}  // namespace

BandwidthField solve_mp_gamma(const arma::mat& errors, const DistanceMatrix& dm,
                              BandwidthMode mode, const SolverConfig& cfg,
                              std::vector<std::string>* warnings) {
  if (!errors.is_finite())
    throw Exception(ErrorCode::NonFiniteErrors, "errors contain NaN/inf");
  const arma::uword c = dm.d.n_rows;
  if (errors.n_rows != c || errors.n_cols != dm.d.n_cols)
    throw Exception(ErrorCode::ShapeMismatch, "errors shape differs from distances");

  if (mode == BandwidthMode::global) {
    ConvexRow pooled;
    for (arma::uword o = 0; o < c; ++o) {
      ConvexRow row = row_for_focal(errors, dm, o);
      pooled.S += row.S;
      pooled.a.insert(pooled.a.end(), row.a.begin(), row.a.end());
      pooled.q.insert(pooled.q.end(), row.q.begin(), row.q.end());
    }
    bool degenerate = false;
    const double g = solve_row(pooled, cfg.gamma_tol, &degenerate);
    if (degenerate && warnings)
      warnings->push_back("global bandwidth problem is degenerate; gamma = 0");
    return make_global_bandwidth(g);
  }

  arma::vec gamma(c, arma::fill::zeros);
  std::vector<char> degenerate(c, 0);
  std::exception_ptr error;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long oo = 0; oo < static_cast<long long>(c); ++oo) {
    const auto o = static_cast<arma::uword>(oo);
    try {
      bool deg = false;
      gamma[o] = solve_row(row_for_focal(errors, dm, o), cfg.gamma_tol, &deg);
      degenerate[o] = deg ? 1 : 0;
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  if (warnings) {
    for (arma::uword o = 0; o < c; ++o) {
      if (degenerate[o]) {
        std::ostringstream msg;
        msg << "focal " << o << " bandwidth problem is degenerate; gamma = 0";
        warnings->push_back(msg.str());
      }
    }
  }
  return make_local_bandwidth(std::move(gamma));
}

BandwidthField gamma_init(const SpatialDataset& ds, const DistanceMatrix& dm,
                          BandwidthMode mode, const SolverConfig& cfg,
                          std::vector<std::string>* warnings) {
  if (!ds.has_intercept)
    throw Exception(ErrorCode::ShapeMismatch,
                    "gamma_init requires an intercept column");
  // Intercept-only model: every focal fit is the unweighted mean of y.
  const arma::rowvec resid = (ds.y - arma::mean(ds.y)).t();
  const arma::mat errors = arma::repmat(resid, ds.n_focal(), 1);
  return solve_mp_gamma(errors, dm, mode, cfg, warnings);
}

}  // namespace igwr
