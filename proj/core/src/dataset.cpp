#include "igwr/dataset.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace igwr {

arma::uvec SpatialDataset::free_columns() const {
  const arma::uword first = has_intercept ? 1 : 0;
  if (n_vars() <= first) return {};
  return arma::regspace<arma::uvec>(first, n_vars() - 1);
}

bool SpatialDataset::focal_is_obs() const {
  return focal_coords.n_rows == coords.n_rows &&
         arma::approx_equal(focal_coords, coords, "absdiff", 0.0);
}

arma::uvec SubsetMask::selected_columns() const {
  std::vector<arma::uword> idx;
  for (arma::uword j = 0; j < z.size(); ++j)
    if (z[j]) idx.push_back(j);
  return arma::uvec(idx);
}

arma::uvec SubsetMask::selected_free_columns() const {
  std::vector<arma::uword> idx;
  for (arma::uword j = 0; j < z.size(); ++j)
    if (z[j] && !(intercept_locked && j == 0)) idx.push_back(j);
  return arma::uvec(idx);
}

std::uint64_t SubsetMask::index_sum() const {
  std::uint64_t s = 0;
  for (arma::uword j = 0; j < z.size(); ++j)
    if (z[j] && !(intercept_locked && j == 0)) s += j;
  return s;
}

bool SubsetMask::violates_forbidden_pair() const {
  for (const auto& [j, k] : forbidden_pairs)
    if (z[j] && z[k]) return true;
  return false;
}

SubsetMask make_subset_mask(arma::uword m, const arma::uvec& free_selected,
                            std::vector<IndexPair> forbidden_pairs,
                            bool intercept_locked) {
  SubsetMask mask;
  mask.z.assign(m, false);
  mask.intercept_locked = intercept_locked;
  mask.forbidden_pairs = std::move(forbidden_pairs);
  if (intercept_locked) mask.z[0] = true;
  for (arma::uword j : free_selected) {
    if (j >= m || (intercept_locked && j == 0))
      throw Exception(ErrorCode::ShapeMismatch, "subset index out of range");
    mask.z[j] = true;
  }
  mask.p = free_selected.n_elem;
  return mask;
}

void BandwidthField::validate() const {
  if (gamma.n_elem == 0)
    throw Exception(ErrorCode::ShapeMismatch, "empty bandwidth field");
  if (!gamma.is_finite())
    throw Exception(ErrorCode::NonFinite, "bandwidth contains NaN/inf");
  if (gamma.min() < 0.0)
    throw Exception(ErrorCode::NegativeBandwidth, "bandwidth must be >= 0");
}

const char* to_string(SubsetStrategy s) {
  switch (s) {
    case SubsetStrategy::exhaustive: return "exhaustive";
    case SubsetStrategy::branch_and_bound: return "branch_and_bound";
    case SubsetStrategy::automatic: return "auto";
  }
  return "auto";
}

void SolverConfig::validate() const {
  if (!(theta > 0.0))
    throw Exception(ErrorCode::ShapeMismatch, "theta must be positive");
  if (!(rho > 0.0 && rho <= 1.0))
    throw Exception(ErrorCode::ShapeMismatch, "rho must lie in (0, 1]");
  if (max_adm_iters < 1)
    throw Exception(ErrorCode::ShapeMismatch, "max_adm_iters must be >= 1");
}

SpatialDataset validate_dataset(SpatialDataset ds,
                                std::vector<std::string>* warnings) {
  const arma::uword n = ds.n_obs();
  const arma::uword m = ds.n_vars();
  if (n < 2) throw Exception(ErrorCode::ShapeMismatch, "need at least 2 observations");
  if (m < 1) throw Exception(ErrorCode::ShapeMismatch, "need at least 1 variable");
  if (ds.X.n_rows != n)
    throw Exception(ErrorCode::ShapeMismatch, "X row count differs from y");
  if (ds.coords.n_rows != n || ds.coords.n_cols != 2)
    throw Exception(ErrorCode::ShapeMismatch, "coords must be n x 2");
  if (ds.focal_coords.n_rows < 1 || ds.focal_coords.n_cols != 2)
    throw Exception(ErrorCode::ShapeMismatch, "focal_coords must be c x 2, c >= 1");
  if (ds.var_names.size() != m)
    throw Exception(ErrorCode::ShapeMismatch, "var_names size differs from X columns");

  if (!ds.y.is_finite() || !ds.X.is_finite() || !ds.coords.is_finite() ||
      !ds.focal_coords.is_finite())
    throw Exception(ErrorCode::NonFinite, "dataset contains NaN/inf entries");

  if (ds.has_intercept) {
    if (arma::any(arma::abs(ds.X.col(0) - 1.0) > 0.0))
      throw Exception(ErrorCode::ShapeMismatch,
                      "intercept enabled but X column 0 is not all ones");
  }

  std::set<std::string> seen;
  for (const auto& name : ds.var_names)
    if (!seen.insert(name).second)
      throw Exception(ErrorCode::ShapeMismatch, "duplicate variable name: " + name);

  if (ds.y.max() == ds.y.min())
    throw Exception(ErrorCode::ConstantResponse, "response has zero variance");

  if (warnings) {
    std::set<std::pair<double, double>> locs;
    for (arma::uword i = 0; i < n; ++i) {
      if (!locs.insert({ds.coords(i, 0), ds.coords(i, 1)}).second) {
        std::ostringstream msg;
        msg << "duplicate coordinates at observation " << i;
        warnings->push_back(msg.str());
      }
    }
  }
  return ds;
}

DistanceMatrix build_distance_matrix(const SpatialDataset& ds) {
  const arma::uword c = ds.n_focal();
  const arma::uword n = ds.n_obs();
  DistanceMatrix dm;
  dm.d.set_size(c, n);
  for (arma::uword o = 0; o < c; ++o) {
    const double fx = ds.focal_coords(o, 0);
    const double fy = ds.focal_coords(o, 1);
    for (arma::uword i = 0; i < n; ++i) {
      const double dx = fx - ds.coords(i, 0);
      const double dy = fy - ds.coords(i, 1);
      dm.d(o, i) = std::sqrt(dx * dx + dy * dy);
    }
  }
  dm.d_raw_max = dm.d.max();
  if (dm.d_raw_max <= 0.0)
    throw Exception(ErrorCode::DegenerateGeometry, "all pairwise distances are zero");
  dm.d /= dm.d_raw_max;
  dm.squared_row_sums = arma::sum(arma::square(dm.d), 1);
  return dm;
}

std::vector<IndexPair> build_forbidden_pairs(const SpatialDataset& ds, double rho) {
  std::vector<IndexPair> pairs;
  const arma::uvec free = ds.free_columns();
  if (free.n_elem < 2) return pairs;

  const arma::uword n = ds.n_obs();
  std::vector<arma::uword> usable;
  std::vector<arma::vec> centered;
  std::vector<double> sq_norms;
  for (arma::uword j : free) {
    arma::vec cen = ds.X.col(j) - arma::mean(ds.X.col(j));
    const double sq = arma::dot(cen, cen);
    if (sq <= 1e-28 * static_cast<double>(n))
      continue;  // zero variance: pairs with nothing
    usable.push_back(j);
    centered.push_back(std::move(cen));
    sq_norms.push_back(sq);
  }
  // Compared on squared correlations so an exact duplicate column hits
  // |corr| == 1 without square-root rounding.
  for (std::size_t a = 0; a < usable.size(); ++a) {
    for (std::size_t b = a + 1; b < usable.size(); ++b) {
      const double cross = arma::dot(centered[a], centered[b]);
      if (cross * cross >= rho * rho * (sq_norms[a] * sq_norms[b]))
        pairs.emplace_back(usable[a], usable[b]);
    }
  }
  return pairs;
}

SpatialDataset apply_standardization(SpatialDataset ds, bool standardize_x,
                                     bool standardize_y,
                                     std::vector<std::string>* warnings) {
  if (standardize_x) {
    for (arma::uword j : ds.free_columns()) {
      const double mu = arma::mean(ds.X.col(j));
      const double sd = arma::stddev(ds.X.col(j));
      if (sd <= 0.0) {
        if (warnings)
          warnings->push_back("column " + ds.var_names[j] +
                              " has zero variance; left unstandardized");
        continue;
      }
      ds.X.col(j) = (ds.X.col(j) - mu) / sd;
    }
  }
  if (standardize_y) {
    const double mu = arma::mean(ds.y);
    const double sd = arma::stddev(ds.y);
    if (sd <= 0.0) {
      if (warnings)
        warnings->push_back("response has zero variance; left unstandardized");
    } else {
      ds.y = (ds.y - mu) / sd;
    }
  }
  return ds;
}

}  // namespace igwr
