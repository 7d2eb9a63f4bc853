// Command line front end: fit (one cardinality), sweep (a cardinality range
// with a recommendation), bench (IGWR-G/IGWR-L/FS/BGWR side by side).

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "igwr/adm.hpp"
#include "igwr/baselines.hpp"
#include "igwr/dataset.hpp"
#include "igwr/io.hpp"
#include "igwr/metrics.hpp"

namespace {

struct CommonOpts {
  std::string data;
  std::string y;
  std::string x = "all";
  std::string coords;
  std::string focal;
  std::string out = "igwr_out";
  std::string mode = "global";
  std::string strategy = "auto";
  double rho = 0.9;
  double theta = 1e-6;
  int max_iters = 50;
  bool standardize_x = false;
  bool standardize_y = false;
  double gamma_init_override = -1.0;  // < 0 means unset
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--data", opts->data, "input CSV with a header row")->required();
  cmd->add_option("--y", opts->y, "response column name")->required();
  cmd->add_option("--x", opts->x, "comma list of predictor columns, or 'all'");
  cmd->add_option("--coords", opts->coords,
                  "two comma-separated coordinate column names")->required();
  cmd->add_option("--focal", opts->focal,
                  "optional CSV with focal coordinates (same column names)");
  cmd->add_option("--mode", opts->mode, "bandwidth mode")
      ->check(CLI::IsMember({"global", "local"}));
  cmd->add_option("--rho", opts->rho, "forbidden-pair correlation threshold");
  cmd->add_option("--theta", opts->theta, "relative-gap convergence threshold");
  cmd->add_option("--max-iters", opts->max_iters, "alternating iteration cap");
  cmd->add_option("--subset-strategy", opts->strategy, "subset search strategy")
      ->check(CLI::IsMember({"exhaustive", "branch_and_bound", "auto"}));
  cmd->add_flag("--standardize-x", opts->standardize_x, "z-score the predictors");
  cmd->add_flag("--standardize-y", opts->standardize_y, "z-score the response");
  cmd->add_option("--gamma-init", opts->gamma_init_override,
                  "override the intercept-only bandwidth initialization");
  cmd->add_option("--out", opts->out, "output directory");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream stream(s);
  std::string item;
  while (std::getline(stream, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

igwr::SolverConfig config_from(const CommonOpts& opts) {
  igwr::SolverConfig cfg;
  cfg.theta = opts.theta;
  cfg.max_adm_iters = opts.max_iters;
  cfg.rho = opts.rho;
  cfg.standardize_x = opts.standardize_x;
  cfg.standardize_y = opts.standardize_y;
  if (opts.strategy == "exhaustive")
    cfg.subset_strategy = igwr::SubsetStrategy::exhaustive;
  else if (opts.strategy == "branch_and_bound")
    cfg.subset_strategy = igwr::SubsetStrategy::branch_and_bound;
  else
    cfg.subset_strategy = igwr::SubsetStrategy::automatic;
  cfg.validate();
  return cfg;
}

igwr::BandwidthMode mode_from(const CommonOpts& opts) {
  return opts.mode == "local" ? igwr::BandwidthMode::local
                              : igwr::BandwidthMode::global;
}

igwr::SpatialDataset load_dataset(const CommonOpts& opts) {
  const auto coord_names = split_list(opts.coords);
  if (coord_names.size() != 2)
    throw igwr::Exception(igwr::ErrorCode::ShapeMismatch,
                          "--coords needs exactly two column names");
  std::vector<std::string> x_cols;
  if (opts.x != "all") x_cols = split_list(opts.x);
  std::optional<std::filesystem::path> focal;
  if (!opts.focal.empty()) focal = opts.focal;

  igwr::SpatialDataset ds =
      igwr::load_csv(opts.data, opts.y, x_cols,
                     {coord_names[0], coord_names[1]}, focal);
  std::vector<std::string> warnings;
  ds = igwr::apply_standardization(std::move(ds), opts.standardize_x,
                                   opts.standardize_y, &warnings);
  ds = igwr::validate_dataset(std::move(ds), &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return ds;
}

std::optional<igwr::IgwrSeed> seed_from(const CommonOpts& opts,
                                        igwr::BandwidthMode mode,
                                        arma::uword c) {
  if (opts.gamma_init_override < 0.0) return std::nullopt;
  igwr::IgwrSeed seed;
  seed.gamma = mode == igwr::BandwidthMode::global
                   ? igwr::make_global_bandwidth(opts.gamma_init_override)
                   : igwr::make_local_bandwidth(
                         arma::vec(c, arma::fill::value(opts.gamma_init_override)));
  return seed;
}

void print_fit(const igwr::SpatialDataset& ds, const igwr::FitReport& report) {
  std::printf("selected (p=%llu):",
              static_cast<unsigned long long>(report.p));
  for (arma::uword j : report.selected.selected_free_columns())
    std::printf(" %s", ds.var_names[j].c_str());
  std::printf("\n");
  const arma::vec gamma = report.gamma.expanded(ds.n_focal());
  std::printf("gamma [%s]: min %.6g  mean %.6g  max %.6g\n",
              igwr::to_string(report.mode), gamma.min(), arma::mean(gamma),
              gamma.max());
  std::printf("objective %.10g  iterations %d  converged %s\n",
              report.objective, report.iterations,
              report.converged ? "yes" : "no");
  std::printf("rss %.6g  r2 %.4f  r2_adj %.4f  aicc %.6g\n", report.rss,
              report.r2, report.r2_adj, report.aicc);
}

int run_fit(const CommonOpts& opts, arma::uword p) {
  const igwr::SpatialDataset ds = load_dataset(opts);
  const igwr::DistanceMatrix dm = igwr::build_distance_matrix(ds);
  const igwr::SolverConfig cfg = config_from(opts);
  const igwr::BandwidthMode mode = mode_from(opts);
  const igwr::FitReport report =
      igwr::igwr_fit(ds, dm, p, mode, cfg, seed_from(opts, mode, ds.n_focal()));
  print_fit(ds, report);
  for (const auto& path : igwr::emit_report(report, ds, cfg, opts.out))
    std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

int run_sweep(const CommonOpts& opts, arma::uword p_min, arma::uword p_max) {
  const igwr::SpatialDataset ds = load_dataset(opts);
  const igwr::DistanceMatrix dm = igwr::build_distance_matrix(ds);
  const igwr::SolverConfig cfg = config_from(opts);
  const igwr::SweepResult sweep =
      igwr::sweep_p(ds, dm, p_min, p_max, mode_from(opts), cfg);
  std::printf("   p        rss        r2    r2_adj  iters  conv\n");
  for (const auto& report : sweep.reports)
    std::printf("%4llu %10.4g %9.4f %9.4f %6d %5s\n",
                static_cast<unsigned long long>(report.p), report.rss,
                report.r2, report.r2_adj, report.iterations,
                report.converged ? "yes" : "no");
  std::printf("recommended p = %llu\n",
              static_cast<unsigned long long>(sweep.recommended_p));
  for (const auto& path : igwr::emit_sweep(sweep, ds, cfg, opts.out))
    std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

int run_bench(const CommonOpts& opts, arma::uword p,
              const std::string& criterion_name,
              const std::string& external_path) {
  const igwr::SpatialDataset ds = load_dataset(opts);
  const igwr::DistanceMatrix dm = igwr::build_distance_matrix(ds);
  const igwr::SolverConfig cfg = config_from(opts);
  const auto criterion = criterion_name == "cv" ? igwr::BandwidthCriterion::cv
                                                : igwr::BandwidthCriterion::aicc;
  std::vector<igwr::ComparisonRow> rows;

  const auto subset_row = [&](const std::string& method, double rss, double r2,
                              double r2_adj, const std::string& card,
                              double bandwidth) {
    igwr::ComparisonRow row;
    row.method = method;
    row.cardinality = card;
    row.rss = rss;
    row.r2 = r2;
    row.r2_adj = r2_adj;
    row.avg_symm_diff = 0.0;  // one global subset shared by every focal model
    row.bandwidth = bandwidth;
    rows.push_back(row);
  };

  const igwr::FitReport ig = igwr::igwr_fit(ds, dm, p, igwr::BandwidthMode::global, cfg);
  subset_row("IGWR-G", ig.rss, ig.r2, ig.r2_adj, std::to_string(p),
             ig.gamma.gamma[0]);
  const igwr::FitReport il = igwr::igwr_fit(ds, dm, p, igwr::BandwidthMode::local, cfg);
  subset_row("IGWR-L", il.rss, il.r2, il.r2_adj, std::to_string(p),
             arma::datum::nan);

  const igwr::ForwardSelectionResult fs =
      igwr::forward_selection(ds, dm, p, criterion, cfg);
  const igwr::BaselineFit& fs_fit = fs.steps.back();
  subset_row("FS", fs_fit.metrics.rss, fs_fit.metrics.r2, fs_fit.metrics.r2_adj,
             std::to_string(p), fs_fit.bandwidth);

  const arma::uvec all_free = ds.free_columns();
  const igwr::SubsetMask all_mask = igwr::make_subset_mask(
      ds.n_vars(), all_free, {}, ds.has_intercept);
  const igwr::BaselineFit bg = igwr::bgwr_fit(ds, dm, all_mask, criterion, cfg);
  subset_row("BGWR", bg.metrics.rss, bg.metrics.r2, bg.metrics.r2_adj, "all",
             bg.bandwidth);

  if (!external_path.empty()) {
    for (const auto& ext : igwr::load_external_baselines(external_path, ds)) {
      arma::vec fitted(ds.n_obs());
      for (arma::uword i = 0; i < ds.n_obs(); ++i)
        fitted[i] = arma::dot(ds.X.row(i), ext.beta.beta.row(i));
      std::vector<igwr::SubsetMask> masks;
      double cardinality = 0.0;
      for (arma::uword o = 0; o < ds.n_focal(); ++o) {
        std::vector<arma::uword> nz;
        for (arma::uword j : ds.free_columns())
          if (ext.beta.beta(o, j) != 0.0) nz.push_back(j);
        cardinality += static_cast<double>(nz.size());
        masks.push_back(igwr::make_subset_mask(ds.n_vars(), arma::uvec(nz), {},
                                               ds.has_intercept));
      }
      cardinality /= static_cast<double>(ds.n_focal());
      const auto k = static_cast<arma::uword>(std::lround(cardinality)) +
                     (ds.has_intercept ? 1 : 0);
      const igwr::MetricsBlock metrics = igwr::compute_metrics(ds.y, fitted, k);
      igwr::ComparisonRow row;
      row.method = ext.method;
      char card[32];
      std::snprintf(card, sizeof card, "%.2f", cardinality);
      row.cardinality = card;
      row.rss = metrics.rss;
      row.r2 = metrics.r2;
      row.r2_adj = metrics.r2_adj;
      row.avg_symm_diff = igwr::avg_symmetric_difference(masks).value_or(0.0);
      rows.push_back(row);
    }
  }

  std::printf("%-12s %-6s %10s %8s %8s %14s\n", "method", "p", "rss", "r2",
              "r2_adj", "avg_symm_diff");
  for (const auto& row : rows)
    std::printf("%-12s %-6s %10.4g %8.4f %8.4f %14.2f\n", row.method.c_str(),
                row.cardinality.c_str(), row.rss, row.r2, row.r2_adj,
                row.avg_symm_diff);
  const auto path = igwr::emit_comparison(rows, opts.out);
  std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geographically weighted regression with integrated bandwidth "
               "estimation and exact global subset selection"};
  app.require_subcommand(1);

  CommonOpts fit_opts, sweep_opts, bench_opts;
  arma::uword p = 1, p_min = 1, p_max = 1, bench_p = 1;
  std::string criterion = "aicc";
  std::string external;

  CLI::App* fit = app.add_subcommand("fit", "fit one subset cardinality");
  add_common(fit, &fit_opts);
  fit->add_option("--p", p, "subset cardinality")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "fit a cardinality range and recommend one");
  add_common(sweep, &sweep_opts);
  sweep->add_option("--p-min", p_min, "smallest cardinality");
  sweep->add_option("--p-max", p_max, "largest cardinality")->required();

  CLI::App* bench = app.add_subcommand("bench", "compare IGWR-G/IGWR-L/FS/BGWR");
  add_common(bench, &bench_opts);
  bench->add_option("--p", bench_p, "subset cardinality")->required();
  bench->add_option("--criterion", criterion, "baseline bandwidth criterion")
      ->check(CLI::IsMember({"cv", "aicc"}));
  bench->add_option("--external", external,
                    "CSV of externally computed baselines "
                    "(method,focal_id,var,beta)");

  try {
    app.parse(argc, argv);
    if (fit->parsed()) return run_fit(fit_opts, p);
    if (sweep->parsed()) return run_sweep(sweep_opts, p_min, p_max);
    if (bench->parsed()) return run_bench(bench_opts, bench_p, criterion, external);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const igwr::Exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return igwr::is_input_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
