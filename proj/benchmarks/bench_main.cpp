#include <filesystem>
#include <random>

#include <benchmark/benchmark.h>
#include <unistd.h>

#include "hsiseg/envi.hpp"
#include "hsiseg/imgproc.hpp"
#include "hsiseg/metrics.hpp"
#include "hsiseg/phantom.hpp"
#include "hsiseg/spectral.hpp"

using namespace hsiseg;

namespace {

phantom::Phantom scene(std::size_t side, std::size_t bands) {
    phantom::PhantomSpec spec;
    spec.height = side;
    spec.width = side;
    spec.bands = bands;
    return phantom::generate(spec);
}

ScoreMap random_map(std::size_t side, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(side * side);
    for (auto& x : v) x = u(rng);
    return ScoreMap(side, side, std::move(v));
}

void BM_ScfMap(benchmark::State& state) {
    const auto kind = static_cast<ScfKind>(state.range(0));
    const auto p = scene(static_cast<std::size_t>(state.range(1)), 32);
    const ClickSet clicks{{3, 3}, {p.cube.height() / 2, p.cube.width() / 2}};
    for (auto _ : state) benchmark::DoNotOptimize(scf_map(p.cube, clicks, kind));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.cube.pixel_count()));
    state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_ScfMap)
    ->ArgsProduct({{static_cast<int>(ScfKind::Pcc), static_cast<int>(ScfKind::SpectralAngle),
                    static_cast<int>(ScfKind::SpectralAngleEqualized)},
                   {64, 256}})
    ->Unit(benchmark::kMicrosecond);

void BM_DistanceTransform(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto p = scene(side, 8);
    const BinaryMask mask = p.labels.class_mask(0);
    for (auto _ : state) benchmark::DoNotOptimize(distance_transform_sq(mask));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}
BENCHMARK(BM_DistanceTransform)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMicrosecond);

void BM_DiceAtMax(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const ScoreMap scores = random_map(side, 7);
    const auto p = scene(side, 4);
    const BinaryMask gt = p.labels.class_mask(1);
    const BinaryMask valid = p.labels.valid_mask();
    for (auto _ : state) benchmark::DoNotOptimize(dice_at_max(scores, gt, valid));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}
BENCHMARK(BM_DiceAtMax)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMicrosecond);

void BM_HistogramEqualize(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const ScoreMap scores = random_map(side, 11);
    for (auto _ : state) benchmark::DoNotOptimize(histogram_equalize(scores));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}
BENCHMARK(BM_HistogramEqualize)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMicrosecond);

void BM_EnviLoad(benchmark::State& state) {
    const auto interleave = static_cast<envi::Interleave>(state.range(0));
    const auto p = scene(128, 64);
    const auto dir = std::filesystem::temp_directory_path() / ("hsiseg_bench_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const auto header = dir / "cube.hdr";
    envi::write_envi(header, p.cube, {interleave, envi::DataType::Float32, envi::ByteOrder::Big});
    for (auto _ : state) benchmark::DoNotOptimize(envi::load_envi(header));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(p.cube.data().size() * 4));
    std::filesystem::remove_all(dir);
}
BENCHMARK(BM_EnviLoad)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
