#include <random>

#include <benchmark/benchmark.h>

#include "roomsim/image_source.hpp"
#include "roomsim/rir.hpp"
#include "roomsim/stft.hpp"

using namespace roomsim;

namespace {

const std::vector<Point> kL{Point(0, 0, 0), Point(0, 4, 0), Point(8, 4, 0),
                            Point(8, 8, 0), Point(11, 8, 0), Point(11, 0, 0)};

Room l_room() { return extrude(from_corners(kL, 0.2), 3.0); }

}  // namespace

static void BM_BuildTree(benchmark::State& state) {
  const Room room = l_room();
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_tree(room, Point(9.5, 6, 1.5), order));
}
BENCHMARK(BM_BuildTree)->DenseRange(1, 4);

static void BM_BuildShoebox(benchmark::State& state) {
  const Room room = Room::shoebox(Point(6, 4, 3), 3, 0.3);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_shoebox(room, Point(2, 1.5, 1.2), order));
}
BENCHMARK(BM_BuildShoebox)->Arg(10)->Arg(20)->Arg(40);

static void BM_Visibility(benchmark::State& state) {
  const Room room = l_room();
  const auto images = build_tree(room, Point(9.5, 6, 1.5), static_cast<int>(state.range(0)));
  const Point mics[] = {Point(10, 7, 1.2), Point(3, 2, 1.2)};
  for (auto _ : state) benchmark::DoNotOptimize(compute_visibility(images, mics, room));
  state.counters["images"] = static_cast<double>(images.size());
}
BENCHMARK(BM_Visibility)->DenseRange(1, 3);

static void BM_ComputeRir(benchmark::State& state) {
  const Room room = Room::shoebox(Point(6, 4, 3), 3, 0.3);
  const auto images = build_shoebox(room, Point(2, 1.5, 1.2), static_cast<int>(state.range(0)));
  const std::vector<bool> visible(images.size(), true);
  for (auto _ : state) benchmark::DoNotOptimize(compute_rir(images, visible, Point(4, 3, 1.5), 16000, 343));
  state.counters["images"] = static_cast<double>(images.size());
}
BENCHMARK(BM_ComputeRir)->Arg(5)->Arg(10)->Arg(20);

static void BM_StftRoundTrip(benchmark::State& state) {
  const auto frame = static_cast<std::size_t>(state.range(0));
  const auto cfg = StftConfig::sqrt_hann(frame, frame / 2, 8);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(8, static_cast<Eigen::Index>(frame / 2));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
  Stft stft(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(stft.synthesis(stft.analysis(x)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_StftRoundTrip)->Arg(256)->Arg(512)->Arg(1024);
BENCHMARK_MAIN();
