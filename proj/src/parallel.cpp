#include "awg/parallel.hpp"

#include <cstddef>
#include <exception>
#include <mutex>
#include <utility>

#include <omp.h>

#include "awg/error.hpp"

namespace awg::parallel {
namespace {

// Exceptions cannot cross an OpenMP region boundary; keep the first and rethrow after the join.
class ExceptionSlot {
public:
    template <typename Fn>
    void run(Fn&& fn) noexcept {
        try {
            fn();
        } catch (...) {
            std::lock_guard lock(mutex_);
            if (!eptr_) eptr_ = std::current_exception();
        }
    }

    void rethrow() const {
        if (eptr_) std::rethrow_exception(eptr_);
    }

private:
    std::mutex mutex_;
    std::exception_ptr eptr_;
};

}  // namespace

int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

std::vector<Voxel> segment(const EventStream& stream, const SegmentationConfig& config, int threads) {
    const auto windows = partition_windows(stream, config);
    const auto n = static_cast<std::ptrdiff_t>(windows.size());
    std::vector<std::vector<Voxel>> per_window(windows.size());
    ExceptionSlot errors;

#pragma omp parallel for schedule(dynamic) num_threads(resolve_threads(threads))
    for (std::ptrdiff_t w = 0; w < n; ++w) {
        errors.run([&] { per_window[w] = partition_voxels(windows[w], voxel_count(windows[w], config)); });
    }
    errors.rethrow();

    std::vector<Voxel> out;
    for (auto& voxels : per_window) {
        for (auto& v : voxels) out.push_back(std::move(v));
    }
    return out;
}

std::vector<DenoisedVoxel> denoise_voxels(std::span<const Voxel> voxels, const WeightParams& params, int threads) {
    params.validate();
    const auto n = static_cast<std::ptrdiff_t>(voxels.size());
    std::vector<DenoisedVoxel> out(voxels.size());
    ExceptionSlot errors;

#pragma omp parallel for schedule(dynamic) num_threads(resolve_threads(threads))
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        errors.run([&] { out[k] = denoise_voxel(voxels[k], params); });
    }
    errors.rethrow();
    return out;
}

NodeFeatureSet layer_forward(const EventGraph& graph, const NodeFeatureSet& feats, const AttentionParams& params,
                             int threads) {
    params.validate();
    if (feats.size() != graph.node_count()) throw DomainError("layer_forward: one feature vector per node required");
    const auto adj = detail::adjacency(graph);
    const auto n = static_cast<std::ptrdiff_t>(feats.size());
    NodeFeatureSet out;
    out.features.resize(feats.size());
    ExceptionSlot errors;

#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        errors.run([&] {
            const auto id = static_cast<NodeId>(i);
            if (adj[i].empty()) {
                if (static_cast<std::size_t>(feats.features[i].size()) != params.d_in()) {
                    throw DomainError("layer_forward: feature length does not match d_in");
                }
                out.features[i] = params.w_matrix.transpose() * feats.features[i];
            } else {
                const auto coeffs = detail::coefficients_over(id, adj[i], feats, params);
                out.features[i] = aggregate(id, coeffs, feats, params);
            }
        });
    }
    errors.rethrow();
    return out;
}

}  // namespace awg::parallel
