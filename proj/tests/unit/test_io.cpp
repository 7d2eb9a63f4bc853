#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "igwr/adm.hpp"
#include "igwr/dataset.hpp"
#include "igwr/io.hpp"
#include "test_support.hpp"

using namespace igwr;

namespace {

std::filesystem::path tmp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "igwr_io_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("synthetic fixture loads with the documented shape") {
  const SpatialDataset ds = load_csv(test::test_data_dir() / "synthetic.csv",
                                     "resp", {}, {"px", "py"});
  CHECK(ds.n_obs() == 40);
  CHECK(ds.n_vars() == 5);  // intercept + a,b,c,d
  CHECK(ds.var_names[0] == "Intercept");
  CHECK(ds.var_names[1] == "a");
  CHECK(ds.focal_is_obs());
  CHECK_NOTHROW(validate_dataset(ds));
}

TEST_CASE("missing columns are reported by name") {
  try {
    load_csv(test::test_data_dir() / "synthetic.csv", "nope", {}, {"px", "py"});
    CHECK(false);
  } catch (const Exception& e) {
    CHECK(e.code() == ErrorCode::MissingColumn);
    CHECK(std::string(e.what()).find("nope") != std::string::npos);
  }
}

TEST_CASE("unparseable cells carry row and column coordinates") {
  const auto path = tmp_dir() / "bad_cell.csv";
  std::ofstream(path) << "y,x1,cx,cy\n1.0,2.0,0,0\n2.0,N/A,1,0\n";
  try {
    load_csv(path, "y", {"x1"}, {"cx", "cy"});
    CHECK(false);
  } catch (const Exception& e) {
    CHECK(e.code() == ErrorCode::UnparseableCell);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    CHECK(std::string(e.what()).find("x1") != std::string::npos);
  }
}

TEST_CASE("empty and header-only files are rejected") {
  const auto empty = tmp_dir() / "empty.csv";
  std::ofstream(empty) << "";
  try {
    load_csv(empty, "y", {}, {"cx", "cy"});
    CHECK(false);
  } catch (const Exception& e) {
    CHECK(e.code() == ErrorCode::EmptyFile);
  }
  const auto header_only = tmp_dir() / "header_only.csv";
  std::ofstream(header_only) << "y,x1,cx,cy\n";
  try {
    load_csv(header_only, "y", {}, {"cx", "cy"});
    CHECK(false);
  } catch (const Exception& e) {
    CHECK(e.code() == ErrorCode::EmptyFile);
  }
}

TEST_CASE("dataset round-trips through write and load at full precision") {
  std::mt19937 rng(199);
  const SpatialDataset ds = test::random_dataset(rng, 20, 3, 2, 0.5);
  const auto path = tmp_dir() / "roundtrip.csv";
  write_dataset_csv(ds, path);
  const SpatialDataset back = load_csv(
      path, "y", {"x1", "x2", "x3"}, {"coord_x", "coord_y"});
  CHECK(arma::abs(back.y - ds.y).max() == 0.0);
  CHECK(arma::abs(back.X - ds.X).max() == 0.0);
  CHECK(arma::abs(back.coords - ds.coords).max() == 0.0);
}

TEST_CASE("a separate focal file yields c != n") {
  const auto obs = tmp_dir() / "obs.csv";
  std::ofstream(obs) << "y,x1,cx,cy\n1,0.5,0,0\n2,1.5,1,0\n4,2.5,0,1\n";
  const auto focal = tmp_dir() / "focal.csv";
  std::ofstream(focal) << "cx,cy\n0.5,0.5\n";
  const SpatialDataset ds = load_csv(obs, "y", {"x1"}, {"cx", "cy"}, focal);
  CHECK(ds.n_obs() == 3);
  CHECK(ds.n_focal() == 1);
  CHECK(!ds.focal_is_obs());
}

TEST_CASE("report artifacts are complete, deterministic and re-derivable") {
  std::mt19937 rng(211);
  const SpatialDataset ds = test::random_dataset(rng, 30, 4, 2, 0.5);
  const DistanceMatrix dm = build_distance_matrix(ds);
  const SolverConfig cfg;
  const FitReport report = igwr_fit(ds, dm, 2, BandwidthMode::local, cfg);

  const auto out_a = tmp_dir() / "report_a";
  const auto out_b = tmp_dir() / "report_b";
  const auto paths = emit_report(report, ds, cfg, out_a);
  emit_report(report, ds, cfg, out_b);
  REQUIRE(paths.size() == 3);

  // coefficients.csv has one row per focal point plus the header.
  std::istringstream coef(slurp(out_a / "coefficients.csv"));
  std::string line;
  std::size_t rows = 0;
  while (std::getline(coef, line))
    if (!line.empty()) ++rows;
  CHECK(rows == ds.n_focal() + 1);

  // Identical runs differ only in the timestamp field.
  auto a = nlohmann::json::parse(slurp(out_a / "report.json"));
  auto b = nlohmann::json::parse(slurp(out_b / "report.json"));
  a.erase("timestamp");
  b.erase("timestamp");
  CHECK(a == b);
  CHECK(slurp(out_a / "coefficients.csv") == slurp(out_b / "coefficients.csv"));
  CHECK(slurp(out_a / "bandwidths.csv") == slurp(out_b / "bandwidths.csv"));
  CHECK(a["schema"] == "igwr-report/1");

  // The reported RSS re-derives from coefficients.csv plus the input data.
  std::istringstream coefs(slurp(out_a / "coefficients.csv"));
  std::getline(coefs, line);  // header
  std::vector<std::vector<double>> beta_rows;
  while (std::getline(coefs, line)) {
    if (line.empty()) continue;
    std::vector<double> cells;
    std::istringstream cell_stream(line);
    std::string cell;
    while (std::getline(cell_stream, cell, ',')) cells.push_back(std::stod(cell));
    beta_rows.push_back(cells);
  }
  REQUIRE(beta_rows.size() == ds.n_focal());
  const arma::uvec sel = report.selected.selected_columns();
  double rss = 0.0;
  for (arma::uword i = 0; i < ds.n_obs(); ++i) {
    double fit = 0.0;
    for (arma::uword k = 0; k < sel.n_elem; ++k)
      fit += beta_rows[i][3 + k] * ds.X(i, sel[k]);
    rss += (ds.y[i] - fit) * (ds.y[i] - fit);
  }
  CHECK(rss == doctest::Approx(report.rss).epsilon(1e-12));
}

TEST_CASE("sweep artifacts include the RSS curve") {
  std::mt19937 rng(223);
  const SpatialDataset ds = test::random_dataset(rng, 30, 4, 2, 0.4);
  const DistanceMatrix dm = build_distance_matrix(ds);
  const SolverConfig cfg;
  const SweepResult sweep = sweep_p(ds, dm, 1, 4, BandwidthMode::global, cfg);
  const auto out = tmp_dir() / "sweep_out";
  const auto paths = emit_sweep(sweep, ds, cfg, out);
  CHECK(std::filesystem::exists(out / "rss_vs_p.csv"));
  CHECK(std::filesystem::exists(out / "report.json"));
  std::istringstream curve(slurp(out / "rss_vs_p.csv"));
  std::string line;
  std::size_t rows = 0;
  while (std::getline(curve, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 5);  // header + 4 cardinalities
}

TEST_CASE("external baselines parse into aligned coefficient fields") {
  const auto obs = tmp_dir() / "ext_obs.csv";
  std::ofstream(obs) << "y,x1,x2,cx,cy\n1,0.5,2,0,0\n2,1.5,1,1,0\n4,2.5,0,0,1\n";
  const SpatialDataset ds = load_csv(obs, "y", {"x1", "x2"}, {"cx", "cy"});

  const auto ext = tmp_dir() / "ext.csv";
  std::ofstream(ext) << "method,focal_id,var,beta\n"
                     << "MGWR,0,Intercept,1.5\n"
                     << "MGWR,0,x1,2.5\n"
                     << "MGWR,1,x2,-1.0\n"
                     << "GWL,2,x1,0.25\n";
  const auto baselines = load_external_baselines(ext, ds);
  REQUIRE(baselines.size() == 2);
  CHECK(baselines[0].method == "GWL");
  CHECK(baselines[1].method == "MGWR");
  CHECK(baselines[1].beta.beta(0, 0) == 1.5);
  CHECK(baselines[1].beta.beta(0, 1) == 2.5);
  CHECK(baselines[1].beta.beta(1, 2) == -1.0);
  CHECK(baselines[0].beta.beta(2, 1) == 0.25);

  const auto bad = tmp_dir() / "ext_bad.csv";
  std::ofstream(bad) << "method,focal_id,var,beta\nMGWR,0,unknown,1\n";
  CHECK_THROWS_AS(load_external_baselines(bad, ds), Exception);
}

TEST_CASE("georgia dataset loads with the published shape" *
          doctest::skip(!igwr::test::georgia_available())) {
  const SpatialDataset ds = load_csv(
      test::georgia_csv_path(), "PctBach",
      {"PctFB", "TotPop90", "PctRural", "PctEld", "PctBlack", "PctPov"},
      {"X", "Y"});
  CHECK(ds.n_obs() == 159);
  CHECK(ds.n_vars() == 7);
}
