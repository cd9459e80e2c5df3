// Serial reference vs OpenMP kernel timings.
// Usage: awg_bench [--threads N] [--repeats R] [--duration US]

#include <chrono>
#include <cstdio>
#include <functional>

#include <CLI11.hpp>

#include "awg/attention.hpp"
#include "awg/denoise.hpp"
#include "awg/parallel.hpp"
#include "awg/segmentation.hpp"
#include "awg/synth.hpp"

using namespace awg;

namespace {

double best_of(int repeats, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

void row(const char* name, double serial, double par) {
    std::printf("%-16s %12.4f %12.4f %8.2fx\n", name, serial * 1e3, par * 1e3, serial / par);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel benchmark"};
    int threads = 0, repeats = 5;
    std::int64_t duration = 100000;
    app.add_option("--threads", threads, "OpenMP threads (<= 0: default)");
    app.add_option("--repeats", repeats)->check(CLI::PositiveNumber);
    app.add_option("--duration", duration, "Synthetic scene length in microseconds")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);
    threads = parallel::resolve_threads(threads);

    SynthConfig sc;
    sc.duration = duration;
    const auto scene = generate(sc);
    const SegmentationConfig seg;
    const WeightParams weights;
    const auto voxels = segment(scene.stream, seg);

    std::size_t biggest = 0;
    for (std::size_t k = 1; k < voxels.size(); ++k)
        if (voxels[k].size() > voxels[biggest].size()) biggest = k;
    const auto denoised = denoise_voxel(voxels[biggest], weights);
    const auto feats = event_features(voxels[biggest].events.events);
    const auto params = AttentionParams::random(4, 16, 1);

    std::printf("events %zu, voxels %zu, largest voxel %zu nodes, threads %d\n", scene.stream.size(), voxels.size(),
                voxels[biggest].size(), threads);
    std::printf("%-16s %12s %12s %9s\n", "kernel", "serial ms", "openmp ms", "speedup");

    row("segment", best_of(repeats, [&] { segment(scene.stream, seg); }),
        best_of(repeats, [&] { parallel::segment(scene.stream, seg, threads); }));
    row("denoise_voxels", best_of(repeats, [&] { denoise_voxels(voxels, weights); }),
        best_of(repeats, [&] { parallel::denoise_voxels(voxels, weights, threads); }));
    row("layer_forward", best_of(repeats, [&] { layer_forward(denoised.graph, feats, params); }),
        best_of(repeats, [&] { parallel::layer_forward(denoised.graph, feats, params, threads); }));
    return 0;
}
