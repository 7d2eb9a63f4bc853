#include "igwr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "igwr/kernel.hpp"
#include "igwr/wls.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace igwr {
namespace {

constexpr double kLogLo = -4.0 * 2.302585092994046;  // ln(1e-4)
constexpr double kLogHi = 4.0 * 2.302585092994046;   // ln(1e4)
constexpr int kScanPoints = 33;

struct FocalFit {
  double fitted = 0.0;
  double hat_diag = 0.0;
  bool singular = false;
};

// One pass of per-focal WLS at a fixed global gamma, returning fitted values
// and hat diagonal entries. Requires the focal grid to be the observations.
std::vector<FocalFit> fit_all_focal(const SpatialDataset& ds,
                                    const DistanceMatrix& dm,
                                    const arma::uvec& cols, double gamma,
                                    double ridge) {
  const arma::uword n = ds.n_obs();
  std::vector<FocalFit> fits(n);
  const arma::mat Xs = ds.X.cols(cols);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long oo = 0; oo < static_cast<long long>(n); ++oo) {
    const auto o = static_cast<arma::uword>(oo);
    try {
      const arma::vec w = arma::exp(-gamma * arma::square(dm.d.row(o).t()));
      const arma::mat Xw = Xs.each_col() % w;
      const arma::mat G = Xs.t() * Xw;
      arma::mat R;
      arma::mat Gj = G;
      if (ridge > 0.0) Gj.diag() += ridge;
      bool ok = arma::chol(R, Gj);
      if (!ok) {
        Gj.diag() += 1e-10;
        ok = arma::chol(R, Gj);
      }
      if (!ok) {
        Gj.diag() += 1e-6;
        ok = arma::chol(R, Gj);
      }
      if (!ok) {
        fits[o].singular = true;
        continue;
      }
      const arma::vec b = Xw.t() * ds.y;
      const arma::vec beta = arma::solve(arma::trimatu(R),
                                         arma::solve(arma::trimatl(R.t()), b));
      const arma::rowvec x_o = Xs.row(o);
      fits[o].fitted = arma::dot(x_o, beta);
      const arma::vec v = arma::solve(arma::trimatu(R),
                                      arma::solve(arma::trimatl(R.t()), x_o.t()));
      fits[o].hat_diag = w[o] * arma::dot(x_o, v);
    } catch (...) {
      fits[o].singular = true;
    }
  }
  return fits;
}

double eval_cv(const SpatialDataset& ds, const DistanceMatrix& dm,
               const SubsetMask& subset, double gamma, double ridge) {
  const arma::uword n = ds.n_obs();
  arma::vec sq(n, arma::fill::zeros);
  bool failed = false;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(|| : failed)
#endif
  for (long long oo = 0; oo < static_cast<long long>(n); ++oo) {
    const auto o = static_cast<arma::uword>(oo);
    try {
      const WeightRow w = weight_row(dm.d.row(o).t(), gamma);
      const double pred = loo_predict(ds, subset, w, o, ridge);
      sq[o] = (ds.y[o] - pred) * (ds.y[o] - pred);
    } catch (...) {
      failed = true;
    }
  }
  if (failed) return std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (arma::uword o = 0; o < n; ++o) acc += sq[o];
  return acc;
}

double eval_aicc(const SpatialDataset& ds, const DistanceMatrix& dm,
                 const arma::uvec& cols, double gamma, double ridge) {
  const arma::uword n = ds.n_obs();
  const auto fits = fit_all_focal(ds, dm, cols, gamma, ridge);
  double rss = 0.0, tr = 0.0;
  for (arma::uword o = 0; o < n; ++o) {
    if (fits[o].singular) return std::numeric_limits<double>::infinity();
    const double e = ds.y[o] - fits[o].fitted;
    rss += e * e;
    tr += fits[o].hat_diag;
  }
  const double nn = static_cast<double>(n);
  const double denom = nn - 2.0 - tr;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  if (rss <= 0.0) return -1e308;  // exact fit at every gamma: flat floor
  return nn * std::log(rss / nn) + nn * std::log(2.0 * arma::datum::pi) +
         nn * (nn + tr) / denom;
}

struct SearchOutcome {
  double gamma = 1.0;
  double value = arma::datum::nan;
  std::string warning;  // empty when the search ended at an interior minimum
};

// Coarse scan to localize the minimizer, then golden-section inside the
// bracketing cell. A minimum pinned to a bracket edge widens the bracket
// once and, if it persists, is reported as a boundary optimum with a
// warning. flat_floor is the criterion value at which the fit is exact and
// the curve carries no information.
SearchOutcome search_bandwidth(const std::function<double(double)>& criterion,
                               double flat_floor) {
  double lo = kLogLo, hi = kLogHi;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<double> ts(kScanPoints), vals(kScanPoints);
    int best = -1;
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < kScanPoints; ++k) {
      ts[k] = lo + (hi - lo) * k / (kScanPoints - 1);
      vals[k] = criterion(std::exp(ts[k]));
      if (std::isfinite(vals[k])) {
        vmax = std::max(vmax, vals[k]);
        if (vals[k] < vmin) {
          vmin = vals[k];
          best = k;
        }
      }
    }
    if (best < 0)
      throw Exception(ErrorCode::SearchBracketFailure,
                      "criterion is invalid across the whole bandwidth bracket");
    if (vmin <= flat_floor || vmax - vmin <= 1e-12 * (1.0 + std::abs(vmin))) {
      SearchOutcome out;
      out.gamma = std::exp(0.5 * (kLogLo + kLogHi));
      out.value = vmin;
      out.warning = "bandwidth criterion is flat; returning the bracket midpoint";
      return out;
    }
    if (best == 0 || best == kScanPoints - 1) {
      if (attempt == 0) {
        lo -= std::log(100.0);
        hi += std::log(100.0);
        continue;
      }
      SearchOutcome out;
      out.gamma = std::exp(ts[best]);
      out.value = vals[best];
      out.warning =
          "bandwidth criterion is minimized at the bracket edge; returning "
          "the boundary value";
      return out;
    }
    double a = ts[best - 1], b = ts[best + 1];
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = criterion(std::exp(x1));
    double f2 = criterion(std::exp(x2));
    while (b - a > 1e-6) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - inv_phi * (b - a);
        f1 = criterion(std::exp(x1));
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + inv_phi * (b - a);
        f2 = criterion(std::exp(x2));
      }
    }
    SearchOutcome out;
    out.gamma = std::exp(0.5 * (a + b));
    out.value = criterion(out.gamma);
    return out;
  }
  throw Exception(ErrorCode::SearchBracketFailure, "unreachable");
}

}  // namespace

const char* to_string(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::bgwr_cv: return "bgwr_cv";
    case BaselineMethod::bgwr_aicc: return "bgwr_aicc";
    case BaselineMethod::forward_selection: return "forward_selection";
  }
  return "bgwr_aicc";
}

const char* to_string(BandwidthCriterion c) {
  return c == BandwidthCriterion::cv ? "cv" : "aicc";
}

BaselineFit bgwr_fit(const SpatialDataset& ds, const DistanceMatrix& dm,
                     const SubsetMask& subset, BandwidthCriterion criterion,
                     const SolverConfig& cfg) {
  if (!ds.focal_is_obs())
    throw Exception(ErrorCode::ShapeMismatch,
                    "bandwidth criteria need the focal grid to equal the "
                    "observations");
  const arma::uvec cols = subset.selected_columns();
  const double ridge = cfg.wls_ridge;

  const auto crit_fn = [&](double gamma) {
    return criterion == BandwidthCriterion::cv
               ? eval_cv(ds, dm, subset, gamma, ridge)
               : eval_aicc(ds, dm, cols, gamma, ridge);
  };
  // A CV score this far below the response energy means the fit is exact.
  const double flat_floor = criterion == BandwidthCriterion::cv
                                ? 1e-12 * (1.0 + arma::dot(ds.y, ds.y))
                                : -1e300;
  const SearchOutcome found = search_bandwidth(crit_fn, flat_floor);

  BaselineFit fit;
  fit.method = criterion == BandwidthCriterion::cv ? BaselineMethod::bgwr_cv
                                                   : BaselineMethod::bgwr_aicc;
  fit.bandwidth = found.gamma;
  fit.criterion_value = found.value;
  fit.subset = subset;
  if (!found.warning.empty()) fit.warnings.push_back(found.warning);

  const arma::uword n = ds.n_obs();
  fit.beta.beta.zeros(n, ds.n_vars());
  fit.fitted.set_size(n);
  double hat_trace = 0.0;
  for (arma::uword o = 0; o < n; ++o) {
    const WeightRow w = weight_row(dm.d.row(o).t(), found.gamma);
    const WlsSolution sol = wls_fit(ds, subset, w, ds.X.row(o), ridge);
    for (arma::uword k = 0; k < cols.n_elem; ++k)
      fit.beta.beta(o, cols[k]) = sol.beta_sub[k];
    fit.fitted[o] = sol.fitted_at_focal;
    const arma::rowvec h = hat_row(ds, subset, w, ds.X.row(o), ridge);
    hat_trace += h[o];
    if (sol.ridge_used)
      fit.warnings.push_back("ridge jitter fallback fired in WLS");
  }
  fit.metrics = compute_metrics(ds.y, fit.fitted,
                                subset.p + (ds.has_intercept ? 1 : 0), hat_trace);
  return fit;
}

ForwardSelectionResult forward_selection(const SpatialDataset& ds,
                                         const DistanceMatrix& dm,
                                         arma::uword p_max,
                                         BandwidthCriterion criterion,
                                         const SolverConfig& cfg) {
  const arma::uvec free = ds.free_columns();
  if (p_max > free.n_elem)
    throw Exception(ErrorCode::InfeasibleCardinality,
                    "p_max exceeds the number of selectable columns");

  ForwardSelectionResult result;
  std::vector<arma::uword> current;
  for (arma::uword step = 0; step < p_max; ++step) {
    std::optional<BaselineFit> best;
    arma::uword best_col = 0;
    for (arma::uword j : free) {
      if (std::find(current.begin(), current.end(), j) != current.end())
        continue;
      std::vector<arma::uword> trial = current;
      trial.push_back(j);
      const SubsetMask mask =
          make_subset_mask(ds.n_vars(), arma::uvec(trial), {}, ds.has_intercept);
      BaselineFit fit = bgwr_fit(ds, dm, mask, criterion, cfg);
      if (!best || fit.criterion_value < best->criterion_value) {
        best = std::move(fit);
        best_col = j;
      }
    }
    current.push_back(best_col);
    best->method = BaselineMethod::forward_selection;
    result.steps.push_back(std::move(*best));
  }

  // Recommend the last cardinality before the criterion first worsens.
  result.recommended_p = p_max;
  for (std::size_t k = 1; k < result.steps.size(); ++k) {
    if (result.steps[k].criterion_value >
        result.steps[k - 1].criterion_value) {
      result.recommended_p = static_cast<arma::uword>(k);
      break;
    }
  }
  return result;
}

}  // namespace igwr
