// OpenMP kernels against their serial references. Run with OMP_NUM_THREADS
// to vary the thread count.

#include "splatguard/minisplat.hpp"
#include "splatguard/numeric.hpp"
#include "splatguard/pose.hpp"
#include "splatguard/synthetic.hpp"
#include "splatguard/wavelet.hpp"

#include <benchmark/benchmark.h>

using namespace splatguard;

namespace {

Image noise_image(int size) {
    Rng rng(1);
    Image img(size, size);
    for (int c = 0; c < Image::kChannels; ++c)
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) img.set(c, x, y, rng.uniform());
    return img;
}

std::vector<CameraPose> random_poses(int n) {
    Rng rng(2);
    std::vector<CameraPose> poses(static_cast<std::size_t>(n));
    for (auto& p : poses) {
        p.rotation = rotation_from_quaternion(rng.normal(), rng.normal(), rng.normal(), rng.normal());
        p.translation = {rng.normal(), rng.normal(), rng.normal()};
    }
    return poses;
}

void BM_Dwt2(benchmark::State& state) {
    const Image img = noise_image(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(dwt2(img));
}

void BM_Dwt2Serial(benchmark::State& state) {
    const Image img = noise_image(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reference::dwt2(img));
}

void BM_Filter(benchmark::State& state) {
    const Image img = noise_image(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(filter_high_freq(img));
}

void BM_FilterSerial(benchmark::State& state) {
    const Image img = noise_image(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reference::filter_high_freq(img));
}

void BM_Render(benchmark::State& state) {
    const MiniSplatScene s = synthetic_splat_scene(64, 64, 64, 7);
    for (auto _ : state) benchmark::DoNotOptimize(render(s));
}

void BM_RenderSerial(benchmark::State& state) {
    const MiniSplatScene s = synthetic_splat_scene(64, 64, 64, 7);
    for (auto _ : state) benchmark::DoNotOptimize(reference::render(s));
}

void BM_Gradients(benchmark::State& state) {
    const MiniSplatScene s = synthetic_splat_scene(64, 64, 64, 7);
    const MiniSplatScene init = make_initial_scene(64, 64, 64, 3);
    const std::vector<TargetView> targets{{render(s), {}}};
    for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradients(init, targets, TrainConfig{}));
}

void BM_GradientsSerial(benchmark::State& state) {
    const MiniSplatScene s = synthetic_splat_scene(64, 64, 64, 7);
    const MiniSplatScene init = make_initial_scene(64, 64, 64, 3);
    const std::vector<TargetView> targets{{render(s), {}}};
    for (auto _ : state) benchmark::DoNotOptimize(reference::loss_and_gradients(init, targets, TrainConfig{}));
}

void BM_PoseMatrix(benchmark::State& state) {
    const auto poses = random_poses(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(pose_loss_matrix(poses, {}));
}

void BM_PoseMatrixSerial(benchmark::State& state) {
    const auto poses = random_poses(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reference::pose_loss_matrix(poses, {}));
}

} // namespace

BENCHMARK(BM_Dwt2)->Arg(256)->Arg(1024);
BENCHMARK(BM_Dwt2Serial)->Arg(256)->Arg(1024);
BENCHMARK(BM_Filter)->Arg(256)->Arg(1024);
BENCHMARK(BM_FilterSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_Render);
BENCHMARK(BM_RenderSerial);
BENCHMARK(BM_Gradients);
BENCHMARK(BM_GradientsSerial);
BENCHMARK(BM_PoseMatrix)->Arg(100)->Arg(400);
BENCHMARK(BM_PoseMatrixSerial)->Arg(100)->Arg(400);

BENCHMARK_MAIN();
