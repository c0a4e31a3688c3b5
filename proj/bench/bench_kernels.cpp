// Serial reference vs OpenMP kernels. Arg(0) runs the serial version.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ovcd/kernels.hpp"

namespace k = ovcd::kernels;

namespace {

constexpr int kSide = 1024;

std::vector<std::uint8_t> random_bytes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>(rng());
  return v;
}

std::vector<float> random_floats(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(n);
  for (auto& f : v) f = u(rng);
  return v;
}

void BM_ChannelHistogram(benchmark::State& state) {
  const auto img = random_bytes(std::size_t{kSide} * kSide * 3, 1);
  for (auto _ : state) {
    auto h = state.range(0) ? k::parallel::channel_histogram(img, 3, 1)
                            : k::serial::channel_histogram(img, 3, 1);
    benchmark::DoNotOptimize(h);
  }
  state.SetBytesProcessed(state.iterations() * img.size());
}

void BM_ApplyLuts(benchmark::State& state) {
  const auto img = random_bytes(std::size_t{kSide} * kSide * 3, 2);
  std::vector<std::uint8_t> out(img.size());
  std::vector<k::Lut> luts(3);
  for (int c = 0; c < 3; ++c) {
    for (int v = 0; v < 256; ++v) luts[c][v] = static_cast<std::uint8_t>(255 - v);
  }
  for (auto _ : state) {
    if (state.range(0)) k::parallel::apply_luts(img, out, 3, luts);
    else k::serial::apply_luts(img, out, 3, luts);
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(state.iterations() * img.size());
}

void BM_Blend(benchmark::State& state) {
  const auto a = random_bytes(std::size_t{kSide} * kSide * 3, 3);
  const auto b = random_bytes(a.size(), 4);
  std::vector<std::uint8_t> out(a.size());
  for (auto _ : state) {
    if (state.range(0)) k::parallel::blend(a, b, 0.25, out);
    else k::serial::blend(a, b, 0.25, out);
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(state.iterations() * a.size());
}

void BM_MergeTiles(benchmark::State& state) {
  const int tile = 256, stride = 128;
  std::vector<std::vector<float>> storage;
  std::vector<k::TileView> tiles;
  for (int y = 0; y + tile <= kSide; y += stride) {
    for (int x = 0; x + tile <= kSide; x += stride) {
      storage.push_back(random_floats(std::size_t{tile} * tile, storage.size() + 10));
    }
  }
  std::size_t i = 0;
  for (int y = 0; y + tile <= kSide; y += stride) {
    for (int x = 0; x + tile <= kSide; x += stride) tiles.push_back({x, y, tile, tile, storage[i++]});
  }
  std::vector<float> out(std::size_t{kSide} * kSide);
  for (auto _ : state) {
    if (state.range(0)) k::parallel::merge_tiles(tiles, kSide, kSide, k::MergeRule::Mean, out);
    else k::serial::merge_tiles(tiles, kSide, kSide, k::MergeRule::Mean, out);
    benchmark::ClobberMemory();
  }
}

void BM_BlendByLabel(benchmark::State& state) {
  const std::size_t n = std::size_t{kSide} * kSide;
  const auto local = random_floats(n, 5);
  const auto global = random_floats(n, 6);
  std::vector<std::int32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::int32_t>((i / 4096) % 17);
  std::vector<double> weights(17);
  for (int i = 1; i < 17; ++i) weights[i] = i / 16.0;
  std::vector<float> out(n);
  for (auto _ : state) {
    if (state.range(0)) k::parallel::blend_by_label(local, global, labels, weights, out);
    else k::serial::blend_by_label(local, global, labels, weights, out);
    benchmark::ClobberMemory();
  }
}

void BM_Confusion(benchmark::State& state) {
  auto pred = random_bytes(std::size_t{kSide} * kSide, 7);
  auto gt = random_bytes(pred.size(), 8);
  for (auto& v : pred) v &= 1;
  for (auto& v : gt) v &= 1;
  for (auto _ : state) {
    auto c = state.range(0) ? k::parallel::confusion(pred, gt) : k::serial::confusion(pred, gt);
    benchmark::DoNotOptimize(c);
  }
}

void BM_ResizeBilinear(benchmark::State& state) {
  const auto src = random_floats(std::size_t{kSide / 2} * (kSide / 2), 9);
  std::vector<float> dst(std::size_t{kSide} * kSide);
  for (auto _ : state) {
    if (state.range(0)) k::parallel::resize_bilinear(src, kSide / 2, kSide / 2, dst, kSide, kSide);
    else k::serial::resize_bilinear(src, kSide / 2, kSide / 2, dst, kSide, kSide);
    benchmark::ClobberMemory();
  }
}

void BM_ResizeArea(benchmark::State& state) {
  const auto src = random_bytes(std::size_t{kSide} * kSide * 3, 10);
  std::vector<std::uint8_t> dst(std::size_t{kSide / 3} * (kSide / 3) * 3);
  for (auto _ : state) {
    if (state.range(0)) {
      k::parallel::resize_area_u8(src, kSide, kSide, 3, dst, kSide / 3, kSide / 3);
    } else {
      k::serial::resize_area_u8(src, kSide, kSide, 3, dst, kSide / 3, kSide / 3);
    }
    benchmark::ClobberMemory();
  }
}

}  // namespace

BENCHMARK(BM_ChannelHistogram)->Arg(0)->Arg(1);
BENCHMARK(BM_ApplyLuts)->Arg(0)->Arg(1);
BENCHMARK(BM_Blend)->Arg(0)->Arg(1);
BENCHMARK(BM_MergeTiles)->Arg(0)->Arg(1);
BENCHMARK(BM_BlendByLabel)->Arg(0)->Arg(1);
BENCHMARK(BM_Confusion)->Arg(0)->Arg(1);
BENCHMARK(BM_ResizeBilinear)->Arg(0)->Arg(1);
BENCHMARK(BM_ResizeArea)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
