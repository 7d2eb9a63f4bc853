#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "igwr/adm.hpp"
#include "igwr/types.hpp"

namespace igwr {

/// Loads a header CSV into a SpatialDataset. An all-ones intercept column is
/// prepended, row order is preserved, and an optional second file supplies a
/// focal grid different from the observations (same coordinate column names).
/// An empty x_cols list selects every column that is not the response or a
/// coordinate.
SpatialDataset load_csv(const std::filesystem::path& path,
                        const std::string& y_col,
                        const std::vector<std::string>& x_cols,
                        const std::pair<std::string, std::string>& coord_cols,
                        const std::optional<std::filesystem::path>& focal_path = {},
                        bool intercept = true);

/// Writes a dataset back out (response, free columns, coordinates) with
/// 17-significant-digit floats so that load_csv round-trips exactly.
void write_dataset_csv(const SpatialDataset& ds, const std::filesystem::path& path);

/// Emits report.json (schema igwr-report/1), coefficients.csv and
/// bandwidths.csv for one fit. Returns the paths written.
std::vector<std::filesystem::path> emit_report(const FitReport& report,
                                               const SpatialDataset& ds,
                                               const SolverConfig& cfg,
                                               const std::filesystem::path& out_dir);

/// Emits rss_vs_p.csv plus the recommended fit's report files.
std::vector<std::filesystem::path> emit_sweep(const SweepResult& sweep,
                                              const SpatialDataset& ds,
                                              const SolverConfig& cfg,
                                              const std::filesystem::path& out_dir);

struct ComparisonRow {
  std::string method;
  std::string cardinality;  // "4", "all", or an average like "3.75"
  double rss = arma::datum::nan;
  double r2 = arma::datum::nan;
  double r2_adj = arma::datum::nan;
  double avg_symm_diff = arma::datum::nan;
  double bandwidth = arma::datum::nan;  // global gamma when the method has one
};

std::filesystem::path emit_comparison(const std::vector<ComparisonRow>& rows,
                                      const std::filesystem::path& out_dir);

/// Externally computed baselines (for report columns only), given as a long
/// CSV with columns method,focal_id,var,beta. focal_id is the 0-based focal
/// index; var must match a dataset variable name or "Intercept". Missing
/// entries stay zero.
struct ExternalBaseline {
  std::string method;
  CoefficientField beta;  // c x m in dataset column order
};

std::vector<ExternalBaseline> load_external_baselines(
    const std::filesystem::path& path, const SpatialDataset& ds);

}  // namespace igwr
