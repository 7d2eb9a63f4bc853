#include <benchmark/benchmark.h>

#include <random>

#include "igwr/adm.hpp"
#include "igwr/bandwidth.hpp"
#include "igwr/dataset.hpp"
#include "igwr/kernel.hpp"
#include "igwr/subset.hpp"
#include "igwr/wls.hpp"

namespace {

igwr::SpatialDataset make_dataset(arma::uword n, arma::uword m_free) {
  std::mt19937 rng(4242);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 10.0);
  igwr::SpatialDataset ds;
  ds.has_intercept = true;
  ds.y.set_size(n);
  ds.X.set_size(n, m_free + 1);
  ds.coords.set_size(n, 2);
  ds.X.col(0).ones();
  ds.var_names.push_back("Intercept");
  for (arma::uword j = 1; j <= m_free; ++j) {
    for (arma::uword i = 0; i < n; ++i) ds.X(i, j) = gauss(rng);
    ds.var_names.push_back("x" + std::to_string(j));
  }
  for (arma::uword i = 0; i < n; ++i) {
    ds.coords(i, 0) = unif(rng);
    ds.coords(i, 1) = unif(rng);
    ds.y[i] = 2.0 + 1.3 * ds.X(i, 1) + 0.7 * ds.X(i, 2) + 0.4 * gauss(rng);
  }
  ds.focal_coords = ds.coords;
  return ds;
}

void BM_IntegratedObjective(benchmark::State& state) {
  const auto n = static_cast<arma::uword>(state.range(0));
  const igwr::SpatialDataset ds = make_dataset(n, 5);
  const igwr::DistanceMatrix dm = igwr::build_distance_matrix(ds);
  const arma::mat errors(n, n, arma::fill::randn);
  const igwr::BandwidthField bw = igwr::make_global_bandwidth(1.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(igwr::integrated_objective(errors, dm, bw));
}
BENCHMARK(BM_IntegratedObjective)->Arg(100)->Arg(200);

void BM_WlsFit(benchmark::State& state) {
  const auto n = static_cast<arma::uword>(state.range(0));
  const igwr::SpatialDataset ds = make_dataset(n, 6);
  const arma::vec w(n, arma::fill::ones);
  const arma::uvec cols = {0, 1, 2, 4};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        igwr::wls_fit_cols(ds.X, ds.y, w, cols, ds.X.row(0)));
}
BENCHMARK(BM_WlsFit)->Arg(100)->Arg(400);

void BM_SolveMpGamma(benchmark::State& state) {
  const auto n = static_cast<arma::uword>(state.range(0));
  const igwr::SpatialDataset ds = make_dataset(n, 4);
  const igwr::DistanceMatrix dm = igwr::build_distance_matrix(ds);
  const arma::mat errors(n, n, arma::fill::randn);
  for (auto _ : state)
    benchmark::DoNotOptimize(igwr::solve_mp_gamma(
        errors, dm, igwr::BandwidthMode::local, igwr::SolverConfig{}));
}
BENCHMARK(BM_SolveMpGamma)->Arg(100)->Arg(200);

void BM_SolveMpBeta(benchmark::State& state) {
  const auto m_free = static_cast<arma::uword>(state.range(0));
  const bool bnb = state.range(1) != 0;
  const igwr::SpatialDataset ds = make_dataset(60, m_free);
  const igwr::DistanceMatrix dm = igwr::build_distance_matrix(ds);
  const igwr::BandwidthField bw = igwr::make_global_bandwidth(1.0);
  igwr::SolverConfig cfg;
  cfg.subset_strategy = bnb ? igwr::SubsetStrategy::branch_and_bound
                            : igwr::SubsetStrategy::exhaustive;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        igwr::solve_mp_beta(ds, dm, bw, m_free / 2, {}, cfg));
}
BENCHMARK(BM_SolveMpBeta)
    ->Args({8, 0})
    ->Args({8, 1})
    ->Args({12, 0})
    ->Args({12, 1});

void BM_IgwrFit(benchmark::State& state) {
  const auto n = static_cast<arma::uword>(state.range(0));
  const igwr::SpatialDataset ds = make_dataset(n, 6);
  const igwr::DistanceMatrix dm = igwr::build_distance_matrix(ds);
  for (auto _ : state)
    benchmark::DoNotOptimize(igwr::igwr_fit(
        ds, dm, 3, igwr::BandwidthMode::global, igwr::SolverConfig{}));
}
BENCHMARK(BM_IgwrFit)->Arg(60)->Arg(120);

}  // namespace

BENCHMARK_MAIN();
