#include "igwr/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "igwr/metrics.hpp"

namespace igwr {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  arma::uword column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw Exception(ErrorCode::MissingColumn, "no column named '" + name + "'");
    return static_cast<arma::uword>(it - header.begin());
  }
};

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Exception(ErrorCode::IoFailure, "cannot open " + path.string());
  Table table;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (table.header.empty())
      table.header = split_csv_line(line);
    else
      table.rows.push_back(split_csv_line(line));
  }
  if (table.header.empty())
    throw Exception(ErrorCode::EmptyFile, path.string() + " has no header row");
  if (table.rows.empty())
    throw Exception(ErrorCode::EmptyFile, path.string() + " has no data rows");
  return table;
}

double parse_cell(const Table& table, std::size_t row, arma::uword col) {
  const std::string& cell = table.rows[row][col];
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    std::ostringstream msg;
    msg << "row " << row + 1 << ", column '" << table.header[col]
        << "': cannot parse '" << cell << "' as a number";
    throw Exception(ErrorCode::UnparseableCell, msg.str());
  }
  return value;
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw Exception(ErrorCode::IoFailure,
                    "cannot create '" + dir.string() + "': " + ec.message());
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw Exception(ErrorCode::IoFailure, "cannot write " + path.string());
  return out;
}

}  // namespace

SpatialDataset load_csv(const std::filesystem::path& path,
                        const std::string& y_col,
                        const std::vector<std::string>& x_cols,
                        const std::pair<std::string, std::string>& coord_cols,
                        const std::optional<std::filesystem::path>& focal_path,
                        bool intercept) {
  const Table table = read_table(path);
  const arma::uword yc = table.column(y_col);
  const arma::uword cx = table.column(coord_cols.first);
  const arma::uword cy = table.column(coord_cols.second);

  std::vector<std::string> use_x = x_cols;
  if (use_x.empty()) {
    for (const auto& name : table.header)
      if (name != y_col && name != coord_cols.first && name != coord_cols.second)
        use_x.push_back(name);
  }
  std::vector<arma::uword> xc;
  for (const auto& name : use_x) xc.push_back(table.column(name));

  const arma::uword n = table.rows.size();
  const arma::uword m = use_x.size() + (intercept ? 1 : 0);
  SpatialDataset ds;
  ds.has_intercept = intercept;
  ds.y.set_size(n);
  ds.X.set_size(n, m);
  ds.coords.set_size(n, 2);
  if (intercept) {
    ds.var_names.push_back("Intercept");
    ds.X.col(0).ones();
  }
  for (const auto& name : use_x) ds.var_names.push_back(name);

  for (arma::uword i = 0; i < n; ++i) {
    if (table.rows[i].size() != table.header.size()) {
      std::ostringstream msg;
      msg << "row " << i + 1 << " has " << table.rows[i].size()
          << " cells, header has " << table.header.size();
      throw Exception(ErrorCode::ShapeMismatch, msg.str());
    }
    ds.y[i] = parse_cell(table, i, yc);
    ds.coords(i, 0) = parse_cell(table, i, cx);
    ds.coords(i, 1) = parse_cell(table, i, cy);
    for (std::size_t k = 0; k < xc.size(); ++k)
      ds.X(i, k + (intercept ? 1 : 0)) = parse_cell(table, i, xc[k]);
  }

  if (focal_path) {
    const Table focal = read_table(*focal_path);
    const arma::uword fx = focal.column(coord_cols.first);
    const arma::uword fy = focal.column(coord_cols.second);
    ds.focal_coords.set_size(focal.rows.size(), 2);
    for (std::size_t i = 0; i < focal.rows.size(); ++i) {
      ds.focal_coords(i, 0) = parse_cell(focal, i, fx);
      ds.focal_coords(i, 1) = parse_cell(focal, i, fy);
    }
  } else {
    ds.focal_coords = ds.coords;
  }
  return ds;
}

void write_dataset_csv(const SpatialDataset& ds, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "y";
  for (arma::uword j : ds.free_columns()) out << "," << ds.var_names[j];
  out << ",coord_x,coord_y\n";
  for (arma::uword i = 0; i < ds.n_obs(); ++i) {
    out << fmt17(ds.y[i]);
    for (arma::uword j : ds.free_columns()) out << "," << fmt17(ds.X(i, j));
    out << "," << fmt17(ds.coords(i, 0)) << "," << fmt17(ds.coords(i, 1)) << "\n";
  }
}

std::vector<std::filesystem::path> emit_report(const FitReport& report,
                                               const SpatialDataset& ds,
                                               const SolverConfig& cfg,
                                               const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  std::vector<std::filesystem::path> written;

  const arma::uvec sel = report.selected.selected_free_columns();
  const arma::uword c = ds.n_focal();
  const arma::vec gamma = report.gamma.expanded(c);

  ordered_json doc;
  doc["schema"] = "igwr-report/1";
  doc["timestamp"] = utc_timestamp();
  doc["config"] = {
      {"theta", cfg.theta},
      {"max_adm_iters", cfg.max_adm_iters},
      {"rho", cfg.rho},
      {"gamma_tol", cfg.gamma_tol},
      {"wls_ridge", cfg.wls_ridge},
      {"subset_strategy", to_string(cfg.subset_strategy)},
      {"standardize_x", cfg.standardize_x},
      {"standardize_y", cfg.standardize_y},
      {"mode", to_string(report.mode)},
      {"p", report.p},
  };
  ordered_json selected = ordered_json::array();
  for (arma::uword j : sel) selected.push_back(ds.var_names[j]);
  doc["selected"] = selected;
  doc["gamma"] = {
      {"mode", to_string(report.gamma.mode)},
      {"min", gamma.min()},
      {"max", gamma.max()},
      {"mean", arma::mean(gamma)},
      {"values", std::vector<double>(gamma.begin(), gamma.end())},
  };
  doc["metrics"] = {
      {"objective", report.objective}, {"rss", report.rss},
      {"r2", report.r2},               {"r2_adj", report.r2_adj},
      {"aicc", report.aicc},           {"hat_trace", report.hat_trace},
  };
  doc["iterations"] = report.iterations;
  doc["converged"] = report.converged;
  ordered_json trace = ordered_json::array();
  for (const auto& entry : report.objective_trace)
    trace.push_back({{"iteration", entry.iteration},
                     {"step", to_string(entry.step)},
                     {"objective", entry.objective}});
  doc["objective_trace"] = trace;
  doc["warnings"] = report.warnings;

  const auto json_path = out_dir / "report.json";
  open_out(json_path) << doc.dump(2) << "\n";
  written.push_back(json_path);

  const auto coef_path = out_dir / "coefficients.csv";
  {
    auto out = open_out(coef_path);
    out << "focal_id,x,y";
    if (ds.has_intercept) out << ",Intercept";
    for (arma::uword j : sel) out << "," << ds.var_names[j];
    out << "\n";
    for (arma::uword o = 0; o < c; ++o) {
      out << o << "," << fmt17(ds.focal_coords(o, 0)) << ","
          << fmt17(ds.focal_coords(o, 1));
      if (ds.has_intercept) out << "," << fmt17(report.beta.beta(o, 0));
      for (arma::uword j : sel) out << "," << fmt17(report.beta.beta(o, j));
      out << "\n";
    }
  }
  written.push_back(coef_path);

  const auto bw_path = out_dir / "bandwidths.csv";
  {
    auto out = open_out(bw_path);
    out << "focal_id,x,y,gamma\n";
    for (arma::uword o = 0; o < c; ++o)
      out << o << "," << fmt17(ds.focal_coords(o, 0)) << ","
          << fmt17(ds.focal_coords(o, 1)) << "," << fmt17(gamma[o]) << "\n";
  }
  written.push_back(bw_path);
  return written;
}

std::vector<std::filesystem::path> emit_sweep(const SweepResult& sweep,
                                              const SpatialDataset& ds,
                                              const SolverConfig& cfg,
                                              const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  std::vector<std::filesystem::path> written;
  const auto curve_path = out_dir / "rss_vs_p.csv";
  {
    auto out = open_out(curve_path);
    out << "p,rss,r2,r2_adj,objective,iterations,converged,recommended\n";
    for (const auto& report : sweep.reports) {
      out << report.p << "," << fmt17(report.rss) << "," << fmt17(report.r2)
          << "," << fmt17(report.r2_adj) << "," << fmt17(report.objective)
          << "," << report.iterations << "," << (report.converged ? 1 : 0)
          << "," << (report.p == sweep.recommended_p ? 1 : 0) << "\n";
    }
  }
  written.push_back(curve_path);
  for (const auto& report : sweep.reports) {
    if (report.p == sweep.recommended_p) {
      const auto more = emit_report(report, ds, cfg, out_dir);
      written.insert(written.end(), more.begin(), more.end());
    }
  }
  return written;
}

std::filesystem::path emit_comparison(const std::vector<ComparisonRow>& rows,
                                      const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  const auto path = out_dir / "comparison.csv";
  auto out = open_out(path);
  out << "method,cardinality,rss,r2,r2_adj,avg_symm_diff,bandwidth\n";
  for (const auto& row : rows) {
    out << row.method << "," << row.cardinality << "," << fmt17(row.rss) << ","
        << fmt17(row.r2) << "," << fmt17(row.r2_adj) << ","
        << fmt17(row.avg_symm_diff) << "," << fmt17(row.bandwidth) << "\n";
  }
  return path;
}

std::vector<ExternalBaseline> load_external_baselines(
    const std::filesystem::path& path, const SpatialDataset& ds) {
  const Table table = read_table(path);
  const arma::uword mc = table.column("method");
  const arma::uword fc = table.column("focal_id");
  const arma::uword vc = table.column("var");
  const arma::uword bc = table.column("beta");

  std::map<std::string, CoefficientField> by_method;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& method = table.rows[r][mc];
    const auto focal = static_cast<arma::uword>(parse_cell(table, r, fc));
    const std::string& var = table.rows[r][vc];
    const double beta = parse_cell(table, r, bc);
    if (focal >= ds.n_focal()) {
      std::ostringstream msg;
      msg << "row " << r + 1 << ": focal_id " << focal << " out of range";
      throw Exception(ErrorCode::ShapeMismatch, msg.str());
    }
    const auto it =
        std::find(ds.var_names.begin(), ds.var_names.end(), var);
    if (it == ds.var_names.end())
      throw Exception(ErrorCode::MissingColumn,
                      "external baseline names unknown variable '" + var + "'");
    auto [entry, inserted] = by_method.try_emplace(method);
    if (inserted) entry->second.beta.zeros(ds.n_focal(), ds.n_vars());
    entry->second.beta(focal, static_cast<arma::uword>(
                                  it - ds.var_names.begin())) = beta;
  }

  std::vector<ExternalBaseline> result;
  for (auto& [method, field] : by_method)
    result.push_back(ExternalBaseline{method, std::move(field)});
  return result;
}

}  // namespace igwr
