#include <benchmark/benchmark.h>

#include "uwoam/analysis.hpp"
#include "uwoam/channel.hpp"
#include "uwoam/modes.hpp"
#include "uwoam/studies.hpp"

namespace {

using namespace uwoam;

const GridSpec kGrid{256, 0.1};

static void BM_LgField(benchmark::State& state) {
    LGModeSpec mode{3, 0, 0.01, 532e-9};
    for (auto _ : state) benchmark::DoNotOptimize(lg_field(mode, kGrid));
}
BENCHMARK(BM_LgField);

static void BM_PropagateStep(benchmark::State& state) {
    const ComplexField f = lg_field(LGModeSpec{1, 0, 0.01, 532e-9}, kGrid);
    for (auto _ : state) benchmark::DoNotOptimize(propagate_step(f, 5.5, 532e-9));
}
BENCHMARK(BM_PropagateStep);

static void BM_MakeScreen(benchmark::State& state) {
    TurbulenceSpec turb;
    turb.cn2 = kCalibratedCn2;
    uint64_t draw = 0;
    for (auto _ : state) benchmark::DoNotOptimize(make_screen(turb, kGrid, 5.5, 532e-9, draw++));
}
BENCHMARK(BM_MakeScreen);

static void BM_Transmit(benchmark::State& state) {
    const ComplexField f = superpose(SuperpositionSpec{1, 0.0, 0.5}, kGrid, 0.01, 532e-9);
    ChannelSpec ch;
    ch.turbulence.cn2 = kCalibratedCn2;
    uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(transmit(f, ch, seed++));
}
BENCHMARK(BM_Transmit);

static void BM_SegmentPetals(benchmark::State& state) {
    const ComplexField f = superpose(SuperpositionSpec{3, 1.0, 0.5}, kGrid, 0.01, 532e-9);
    DetectorSpec det{256, 0.1 / 256, 0.03, 1.0, 0.0, 0};
    const Frame frame = studies::render_noiseless_frame(f, det, 2e5);
    for (auto _ : state) benchmark::DoNotOptimize(segment_petals(frame, 3));
}
BENCHMARK(BM_SegmentPetals);

static void BM_FindVorticesField(benchmark::State& state) {
    const ComplexField f = lg_field(LGModeSpec{3, 0, 0.01, 532e-9}, kGrid);
    for (auto _ : state) benchmark::DoNotOptimize(find_vortices_field(f, 0.02));
}
BENCHMARK(BM_FindVorticesField);

}  // namespace

BENCHMARK_MAIN();
