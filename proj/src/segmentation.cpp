#include "awg/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "awg/error.hpp"

namespace awg {
namespace {

double clamped_range(std::int64_t r) { return static_cast<double>(std::max<std::int64_t>(r, 1)); }

}  // namespace

void SegmentationConfig::validate() const {
    if (n_min < 1) throw DomainError("segmentation: n_min must be >= 1");
    if (!(c_scale > 0.0) || !std::isfinite(c_scale)) throw DomainError("segmentation: c_scale must be > 0");
    if (n_min_vox < 1) throw DomainError("segmentation: n_min_vox must be >= 1");
    if (n_max_vox < n_min_vox) throw DomainError("segmentation: n_max_vox must be >= n_min_vox");
}

Window make_window(EventStream events, std::size_t index) {
    Window w;
    w.source.resize(events.size());
    std::iota(w.source.begin(), w.source.end(), std::size_t{0});
    w.events = std::move(events);
    w.index = index;
    return w;
}

double normalized_density(const EventStream& stream) {
    const auto ext = compute_extents(stream);
    return static_cast<double>(stream.size()) /
           (clamped_range(ext.x_range()) * clamped_range(ext.y_range()) * clamped_range(ext.t_range()));
}

std::size_t window_capacity(double density, const SegmentationConfig& config) {
    if (!(density > 0.0)) throw DomainError("window_capacity: density must be > 0");
    const double scaled = std::floor(density * config.c_scale);
    // Anything beyond 2^62 events per window is effectively unbounded.
    constexpr double cap = 4611686018427387904.0;
    const auto product = static_cast<std::size_t>(std::min(scaled, cap));
    return std::max(config.n_min, product);
}

std::size_t window_count(std::size_t n_points, std::size_t capacity) {
    if (capacity == 0) throw DomainError("window_count: capacity must be >= 1");
    return (n_points + capacity - 1) / capacity;
}

std::vector<Window> partition_windows(const EventStream& stream, const SegmentationConfig& config) {
    config.validate();
    const auto capacity = window_capacity(normalized_density(stream), config);
    const auto count = window_count(stream.size(), capacity);

    std::vector<std::size_t> order(stream.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return stream.events[a].t < stream.events[b].t;
    });

    std::vector<Window> windows(count);
    for (std::size_t w = 0; w < count; ++w) {
        const auto begin = w * capacity;
        const auto end = std::min(begin + capacity, order.size());
        auto& win = windows[w];
        win.index = w;
        win.events.sorted_by_time = true;
        win.events.events.reserve(end - begin);
        win.source.reserve(end - begin);
        for (auto k = begin; k < end; ++k) {
            win.events.events.push_back(stream.events[order[k]]);
            win.source.push_back(order[k]);
        }
    }
    return windows;
}

std::size_t voxel_count(const Window& window, const SegmentationConfig& config) {
    const auto ext = compute_extents(window.events);
    const double volume =
        clamped_range(ext.x_range()) * clamped_range(ext.y_range()) * clamped_range(ext.t_range());
    const double root = std::round(std::sqrt(volume));
    const auto lo = static_cast<double>(config.n_min_vox);
    const auto hi = static_cast<double>(config.n_max_vox);
    return static_cast<std::size_t>(std::clamp(root, lo, hi));
}

std::vector<Voxel> partition_voxels(const Window& window, std::size_t n_voxels) {
    if (n_voxels < 1) throw DomainError("partition_voxels: n_voxels must be >= 1");
    if (window.source.size() != window.events.size()) {
        throw DomainError("partition_voxels: window source indices do not match its events");
    }

    std::vector<Voxel> voxels(n_voxels);
    for (std::size_t k = 0; k < n_voxels; ++k) {
        voxels[k].window_index = window.index;
        voxels[k].voxel_index = k;
        voxels[k].events.sorted_by_time = window.events.sorted_by_time;
    }
    if (window.events.empty()) return voxels;

    const auto ext = compute_extents(window.events);
    const std::int64_t t0 = ext.t_min;
    const std::int64_t duration = ext.t_range();
    const auto n = static_cast<std::int64_t>(n_voxels);

    // Slice k holds t with floor((t - t0) * n / duration) == k, i.e. t - t0 >= ceil(k * duration / n).
    const auto boundary = [&](std::int64_t k) {
        const __int128 num = static_cast<__int128>(k) * duration;
        return t0 + static_cast<std::int64_t>((num + n - 1) / n);
    };
    for (std::int64_t k = 0; k < n; ++k) {
        voxels[k].t_lo = boundary(k);
        voxels[k].t_hi = boundary(k + 1);
    }

    for (std::size_t e = 0; e < window.events.size(); ++e) {
        const auto& ev = window.events.events[e];
        std::int64_t k = n - 1;
        if (duration > 0) {
            const __int128 scaled = static_cast<__int128>(ev.t - t0) * n;
            k = std::min<std::int64_t>(static_cast<std::int64_t>(scaled / duration), n - 1);
        }
        voxels[k].events.events.push_back(ev);
        voxels[k].source.push_back(window.source[e]);
    }
    return voxels;
}

std::vector<Voxel> segment(const EventStream& stream, const SegmentationConfig& config) {
    std::vector<Voxel> out;
    for (const auto& window : partition_windows(stream, config)) {
        auto voxels = partition_voxels(window, voxel_count(window, config));
        std::move(voxels.begin(), voxels.end(), std::back_inserter(out));
    }
    return out;
}

}  // namespace awg
