#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "zofd/directions.hpp"
#include "zofd/estimator.hpp"
#include "zofd/rng.hpp"

namespace {

double half_norm_sq(const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); }

// Cost of one surrogate with the directions drawn up front.
void BM_ForwardFd(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int ell = static_cast<int>(state.range(1));
  zofd::RngStream rng(11, 0);
  const auto p = zofd::generate(zofd::DirectionKind::qr_haar, d, ell, rng);
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(d);
  const zofd::ScalarFunction f = half_norm_sq;
  for (auto _ : state) {
    auto est = zofd::forward_fd(f, x, 1e-6, p);
    benchmark::DoNotOptimize(est.g.data());
  }
  state.SetItemsProcessed(state.iterations() * (ell + 1));
}

}  // namespace

BENCHMARK(BM_ForwardFd)
    ->Args({64, 1})
    ->Args({64, 32})
    ->Args({64, 64})
    ->Args({512, 16})
    ->Args({512, 256})
    ->Args({512, 512});
