#include "igwr/adm.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "igwr/bandwidth.hpp"
#include "igwr/dataset.hpp"
#include "igwr/kernel.hpp"
#include "igwr/metrics.hpp"
#include "igwr/subset.hpp"
#include "igwr/wls.hpp"

namespace igwr {
namespace {

void check_monotone(const std::vector<TraceEntry>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const double prev = trace[i - 1].objective;
    const double next = trace[i].objective;
    if (next > prev + 1e-9 * std::abs(prev) + 1e-12) {
      std::ostringstream msg;
      msg << "objective rose from " << prev << " to " << next
          << " at iteration " << trace[i].iteration << " ("
          << to_string(trace[i].step) << " step); this indicates a solver bug";
      throw Exception(ErrorCode::NonMonotoneObjective, msg.str());
    }
  }
}

arma::mat errors_from_beta(const SpatialDataset& ds, const arma::mat& beta) {
  // e_oi = y_i - x_i . beta_o
  const arma::mat fitted_all = beta * ds.X.t();  // c x n
  return arma::repmat(ds.y.t(), beta.n_rows, 1) - fitted_all;
}

void fill_observation_metrics(const SpatialDataset& ds, const DistanceMatrix& dm,
                              FitReport* report) {
  if (!ds.focal_is_obs()) {
    report->warnings.push_back(
        "focal grid differs from observations; RSS/R2/AICc not computed");
    return;
  }
  const arma::uword n = ds.n_obs();
  report->fitted.set_size(n);
  for (arma::uword i = 0; i < n; ++i)
    report->fitted[i] = arma::dot(ds.X.row(i), report->beta.beta.row(i));

  double hat_trace = 0.0;
  for (arma::uword o = 0; o < n; ++o) {
    const WeightRow w = weight_row(dm.d.row(o).t(), report->gamma.at(o));
    const arma::rowvec h = hat_row(ds, report->selected, w, ds.X.row(o));
    hat_trace += h[o];
  }
  const arma::uword n_params =
      report->selected.p + (ds.has_intercept ? 1 : 0);
  const MetricsBlock metrics =
      compute_metrics(ds.y, report->fitted, n_params, hat_trace);
  report->rss = metrics.rss;
  report->r2 = metrics.r2;
  report->r2_adj = metrics.r2_adj;
  report->aicc = metrics.aicc;
  report->hat_trace = metrics.hat_trace;
}

}  // namespace

FitReport igwr_fit(const SpatialDataset& ds, const DistanceMatrix& dm,
                   arma::uword p, BandwidthMode mode, const SolverConfig& cfg,
                   const std::optional<IgwrSeed>& seed) {
  cfg.validate();
  FitReport report;
  report.mode = mode;
  report.p = p;

  const std::vector<IndexPair> forbidden = build_forbidden_pairs(ds, cfg.rho);

  BandwidthField gamma;
  if (seed && seed->gamma) {
    gamma = *seed->gamma;
    gamma.validate();
  } else {
    gamma = gamma_init(ds, dm, mode, cfg, &report.warnings);
  }

  std::optional<SubsetMask> warm;
  if (seed && seed->mask) warm = seed->mask;

  // Obj_0 = 0 by convention, so the first gap test happens after iteration 1.
  // A fully seeded run starts from the seed's own objective instead and can
  // therefore stop after a single confirming iteration.
  double obj_prev = 0.0;
  if (seed && seed->gamma && seed->beta) {
    obj_prev = integrated_objective(errors_from_beta(ds, *seed->beta), dm, gamma);
    report.objective_trace.push_back({0, HalfStep::gamma, obj_prev});
  }

  double obj = obj_prev;
  for (int t = 1; t <= cfg.max_adm_iters; ++t) {
    MpBetaResult beta_step = solve_mp_beta(ds, dm, gamma, p, forbidden, cfg, warm);
    if (beta_step.ridge_used)
      report.warnings.push_back("ridge jitter fallback fired in WLS");
    report.objective_trace.push_back({t, HalfStep::beta, beta_step.objective});

    gamma = solve_mp_gamma(beta_step.errors, dm, mode, cfg, &report.warnings);
    obj = integrated_objective(beta_step.errors, dm, gamma);
    report.objective_trace.push_back({t, HalfStep::gamma, obj});
    check_monotone(report.objective_trace);

    report.selected = std::move(beta_step.mask);
    report.beta = std::move(beta_step.beta);
    report.iterations = t;

    // Obj_0 = 0 makes the first gap infinite unless the fit is (numerically)
    // perfect; tie the zero threshold to the response energy so rounding in
    // an exact fit still counts as zero.
    const double zero_scale =
        1e-12 * std::max(1.0, static_cast<double>(ds.n_focal()) *
                                  arma::dot(ds.y, ds.y));
    double gap;
    if (obj_prev <= zero_scale)
      gap = (obj <= zero_scale) ? 0.0 : std::numeric_limits<double>::infinity();
    else
      gap = std::abs(obj - obj_prev) / obj_prev;
    obj_prev = obj;
    warm = report.selected;
    if (gap <= cfg.theta) {
      report.converged = true;
      break;
    }
  }

  report.gamma = std::move(gamma);
  report.objective = obj;
  fill_observation_metrics(ds, dm, &report);
  return report;
}

arma::uword recommend_cardinality(const std::vector<double>& rss,
                                  arma::uword p_min) {
  if (rss.empty())
    throw Exception(ErrorCode::ShapeMismatch, "empty RSS curve");
  const std::size_t K = rss.size();
  if (K == 1) return p_min;

  double lo = rss[0], hi = rss[0];
  for (double v : rss) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double range = hi - lo;

  // Rule 1: stop at the first step that improves RSS by no more than 10% of
  // the curve's total range (covers non-decreasing steps with any epsilon).
  const double eps = 0.10 * range;
  for (std::size_t k = 0; k + 1 < K; ++k)
    if (rss[k + 1] >= rss[k] - eps)
      return p_min + static_cast<arma::uword>(k);

  // Rule 2: every step is a large improvement; take the interior point
  // furthest below the chord between the endpoints (normalized axes).
  const double span = static_cast<double>(K - 1);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_k = K - 1;
  for (std::size_t k = 1; k + 1 < K; ++k) {
    const double t = static_cast<double>(k) / span;
    const double chord = (rss[0] - lo) / range * (1.0 - t) +
                         (rss[K - 1] - lo) / range * t;
    const double gap = chord - (rss[k] - lo) / range;
    if (gap > best + 1e-15) {
      best = gap;
      best_k = k;
    }
  }
  if (best <= 0.0) return p_min + static_cast<arma::uword>(K - 1);
  return p_min + static_cast<arma::uword>(best_k);
}

SweepResult sweep_p(const SpatialDataset& ds, const DistanceMatrix& dm,
                    arma::uword p_min, arma::uword p_max, BandwidthMode mode,
                    const SolverConfig& cfg) {
  if (p_min < 1 || p_min > p_max)
    throw Exception(ErrorCode::ShapeMismatch, "invalid cardinality range");
  SweepResult sweep;
  std::vector<double> rss;
  for (arma::uword p = p_min; p <= p_max; ++p) {
    sweep.reports.push_back(igwr_fit(ds, dm, p, mode, cfg));
    if (!std::isfinite(sweep.reports.back().rss))
      throw Exception(ErrorCode::ShapeMismatch,
                      "sweep recommendation needs RSS; focal grid must equal "
                      "the observations");
    rss.push_back(sweep.reports.back().rss);
  }
  sweep.recommended_p = recommend_cardinality(rss, p_min);
  return sweep;
}

}  // namespace igwr
