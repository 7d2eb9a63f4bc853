#pragma once

#include <vector>

#include "igwr/types.hpp"

namespace igwr {

/// Checks all SpatialDataset invariants. Throws on violations; duplicate
/// coordinate pairs are legal (zero distance gives weight 1) and only produce
/// a warning. Returns the dataset unchanged on success.
SpatialDataset validate_dataset(SpatialDataset ds,
                                std::vector<std::string>* warnings = nullptr);

/// Euclidean distances between focal points and observations, divided by the
/// global maximum so every entry lies in [0, 1] and the largest is exactly 1.
DistanceMatrix build_distance_matrix(const SpatialDataset& ds);

/// Unordered free-column pairs whose absolute Pearson correlation is at least
/// rho. Zero-variance columns pair with nothing; the intercept is excluded.
std::vector<IndexPair> build_forbidden_pairs(const SpatialDataset& ds, double rho);

/// Z-scores the free columns of X and/or y. Constant columns are left alone
/// with a warning. Used by the CLI before fitting; the solvers never rescale.
SpatialDataset apply_standardization(SpatialDataset ds, bool standardize_x,
                                     bool standardize_y,
                                     std::vector<std::string>* warnings = nullptr);

}  // namespace igwr
