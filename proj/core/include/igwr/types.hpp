#pragma once

#include <armadillo>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "igwr/errors.hpp"

namespace igwr {

using IndexPair = std::pair<arma::uword, arma::uword>;

/// Observations, design matrix and calibration (focal) grid of one study area.
/// Column 0 of X is the all-ones intercept whenever has_intercept is set; the
/// focal grid defaults to the observation locations but may differ.
struct SpatialDataset {
  arma::vec y;              // n responses
  arma::mat X;              // n x m design matrix
  arma::mat coords;         // n x 2 projected planar coordinates
  arma::mat focal_coords;   // c x 2
  std::vector<std::string> var_names;  // m labels
  bool has_intercept = true;

  arma::uword n_obs() const { return y.n_elem; }
  arma::uword n_vars() const { return X.n_cols; }
  arma::uword n_focal() const { return focal_coords.n_rows; }

  /// Columns eligible for selection (everything but the locked intercept).
  arma::uvec free_columns() const;

  /// True when the focal grid is exactly the observation locations, in order.
  bool focal_is_obs() const;
};

/// Euclidean focal-to-observation distances rescaled so the largest entry is 1.
struct DistanceMatrix {
  arma::mat d;                 // c x n, entries in [0, 1]
  double d_raw_max = 0.0;      // scale factor in original units
  arma::vec squared_row_sums;  // S_o = sum_i d_oi^2
};

/// A fixed-cardinality selection over the design columns. The intercept, when
/// locked, is always selected and never counted in p.
struct SubsetMask {
  std::vector<bool> z;                    // m flags
  arma::uword p = 0;                      // cardinality over free columns
  std::vector<IndexPair> forbidden_pairs; // column-index pairs, j < k
  bool intercept_locked = true;

  arma::uword n_vars() const { return static_cast<arma::uword>(z.size()); }

  /// Selected column indices in ascending order (intercept included).
  arma::uvec selected_columns() const;

  /// Selected free-column indices (intercept excluded).
  arma::uvec selected_free_columns() const;

  /// Tie-break key: sum of selected free-column indices.
  std::uint64_t index_sum() const;

  bool violates_forbidden_pair() const;
};

SubsetMask make_subset_mask(arma::uword m, const arma::uvec& free_selected,
                            std::vector<IndexPair> forbidden_pairs = {},
                            bool intercept_locked = true);

/// Per-focal coefficients; entries on unselected columns are exactly zero.
struct CoefficientField {
  arma::mat beta;  // c x m
};

enum class BandwidthMode { global, local };

inline const char* to_string(BandwidthMode mode) {
  return mode == BandwidthMode::global ? "global" : "local";
}

/// Kernel decay rates: one shared value (global) or one per focal point.
struct BandwidthField {
  BandwidthMode mode = BandwidthMode::global;
  arma::vec gamma;  // 1 entry (global) or c entries (local)

  double at(arma::uword o) const {
    return mode == BandwidthMode::global ? gamma[0] : gamma[o];
  }
  /// Uniform c-vector view regardless of mode.
  arma::vec expanded(arma::uword c) const {
    return mode == BandwidthMode::global
               ? arma::vec(c, arma::fill::value(gamma[0]))
               : gamma;
  }
  void validate() const;
};

inline BandwidthField make_global_bandwidth(double gamma) {
  return BandwidthField{BandwidthMode::global, arma::vec{gamma}};
}
inline BandwidthField make_local_bandwidth(arma::vec gamma) {
  return BandwidthField{BandwidthMode::local, std::move(gamma)};
}

enum class SubsetStrategy { exhaustive, branch_and_bound, automatic };

const char* to_string(SubsetStrategy s);

struct SolverConfig {
  double theta = 1e-6;          // ADM relative-gap threshold
  int max_adm_iters = 50;
  double rho = 0.9;             // forbidden-pair correlation threshold
  double gamma_tol = 1e-10;     // stationarity tolerance of the 1-D solver
  double wls_ridge = 0.0;       // initial Gram jitter; fallback is 1e-10
  SubsetStrategy subset_strategy = SubsetStrategy::automatic;
  bool standardize_x = false;
  bool standardize_y = false;

  void validate() const;
};

enum class HalfStep { beta, gamma };

inline const char* to_string(HalfStep step) {
  return step == HalfStep::beta ? "beta" : "gamma";
}

struct TraceEntry {
  int iteration = 0;      // 0 marks a seeded starting value
  HalfStep step = HalfStep::gamma;
  double objective = 0.0;
};

/// Everything a fit produces: selection, coefficients, bandwidths, the
/// half-step objective trace and observation-level goodness-of-fit figures.
struct FitReport {
  SubsetMask selected;
  CoefficientField beta;
  BandwidthField gamma;
  std::vector<TraceEntry> objective_trace;
  double objective = arma::datum::nan;  // final integrated objective
  double rss = arma::datum::nan;
  double r2 = arma::datum::nan;
  double r2_adj = arma::datum::nan;     // nominal, p+1 parameters
  double aicc = arma::datum::nan;
  double hat_trace = arma::datum::nan;
  arma::vec fitted;                     // n entries when focal grid == observations
  int iterations = 0;
  bool converged = false;
  BandwidthMode mode = BandwidthMode::global;
  arma::uword p = 0;
  std::vector<std::string> warnings;
};

}  // namespace igwr
