// Serial reference kernels against their OpenMP counterparts on one phantom.

#include <benchmark/benchmark.h>

#include "medroi/kernels.hpp"
#include "medroi/phantom.hpp"
#include "medroi/roi_box.hpp"

namespace {

using namespace medroi;

const Volume& phantom() {
  static const Volume v = [] {
    PhantomSpec s;
    s.dims = {128, 128, 96};
    s.noise_amplitude = 20.0;
    return generate_phantom(s);
  }();
  return v;
}

const Volume& distorted() {
  static const Volume v = [] {
    Volume d = phantom();
    for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] += static_cast<float>(i % 7) - 3.0f;
    return d;
  }();
  return v;
}

template <auto Kernel>
void BM_NonzeroSum(benchmark::State& state) {
  const auto& v = phantom();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(v.data, v.dims));
}

template <auto Kernel>
void BM_ThresholdBbox(benchmark::State& state) {
  const auto& v = phantom();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(v.data, v.dims, 500.0));
}

template <auto Kernel>
void BM_CountInside(benchmark::State& state) {
  const auto& v = phantom();
  const RoiBox box{32, 95, 32, 95, 24, 71};
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(v.data, v.dims, box));
}

template <auto Kernel>
void BM_SquaredError(benchmark::State& state) {
  const auto& v = phantom();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        Kernel(v.data, distorted().data, v.dims, RoiBox::full(v.dims), 1e-3));
  }
}

template <auto Kernel>
void BM_Ssim(benchmark::State& state) {
  const auto& v = phantom();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        Kernel(v.data, distorted().data, v.dims, RoiBox::full(v.dims), 1e-3));
  }
}

}  // namespace

BENCHMARK(BM_NonzeroSum<kernels::serial::nonzero_sum>)->Name("nonzero_sum/serial");
BENCHMARK(BM_NonzeroSum<kernels::omp::nonzero_sum>)->Name("nonzero_sum/omp")->UseRealTime();
BENCHMARK(BM_ThresholdBbox<kernels::serial::threshold_bbox>)->Name("threshold_bbox/serial");
BENCHMARK(BM_ThresholdBbox<kernels::omp::threshold_bbox>)->Name("threshold_bbox/omp")->UseRealTime();
BENCHMARK(BM_CountInside<kernels::serial::count_nonzero_inside>)->Name("count_inside/serial");
BENCHMARK(BM_CountInside<kernels::omp::count_nonzero_inside>)->Name("count_inside/omp")->UseRealTime();
BENCHMARK(BM_SquaredError<kernels::serial::slice_squared_error>)->Name("squared_error/serial");
BENCHMARK(BM_SquaredError<kernels::omp::slice_squared_error>)->Name("squared_error/omp")->UseRealTime();
BENCHMARK(BM_Ssim<kernels::serial::slice_ssim>)->Name("ssim/serial");
BENCHMARK(BM_Ssim<kernels::omp::slice_ssim>)->Name("ssim/omp")->UseRealTime();

BENCHMARK_MAIN();
