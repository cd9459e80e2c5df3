#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "awg/event_io.hpp"

namespace awg {

struct SegmentationConfig {
    std::size_t n_min = 512;      // minimum events per window
    double c_scale = 1024.0;      // density-to-capacity scale
    std::size_t n_min_vox = 4;    // per-window voxel count clamp
    std::size_t n_max_vox = 64;

    /// Throws DomainError if any field is out of range.
    void validate() const;
};

/// A run of consecutive time-sorted events. `source[k]` is the input-stream index of `events[k]`.
struct Window {
    EventStream events;
    std::vector<std::size_t> source;
    std::size_t index = 0;
};

/// An equal-duration temporal slice of a window. Every event satisfies t_lo <= t < t_hi,
/// except in the last voxel of a window, which is closed on the right.
struct Voxel {
    EventStream events;
    std::vector<std::size_t> source;
    std::size_t window_index = 0;
    std::size_t voxel_index = 0;
    std::int64_t t_lo = 0;
    std::int64_t t_hi = 0;

    std::size_t size() const noexcept { return events.size(); }
};

/// Builds a window over `events` with identity source indices.
Window make_window(EventStream events, std::size_t index = 0);

/// Event count divided by the product of the x, y and t ranges, each range clamped below at 1.
double normalized_density(const EventStream& stream);

/// max(n_min, floor(density * c_scale)).
std::size_t window_capacity(double density, const SegmentationConfig& config);

/// ceil(n_points / capacity).
std::size_t window_count(std::size_t n_points, std::size_t capacity);

/// Sorts globally by t and chunks into runs of window_capacity events; the last window keeps
/// the remainder.
std::vector<Window> partition_windows(const EventStream& stream, const SegmentationConfig& config);

/// round(sqrt(X * Y * T)) over the window's spans (each clamped below at 1), clamped into
/// [n_min_vox, n_max_vox].
std::size_t voxel_count(const Window& window, const SegmentationConfig& config);

/// Splits [t_min, t_max] of the window into n_voxels equal-duration slices. Empty slices are
/// kept. A zero-duration window places every event in the last slice.
std::vector<Voxel> partition_voxels(const Window& window, std::size_t n_voxels);

/// Full segmentation: density, capacity, windows, then voxels in (window, voxel) order.
std::vector<Voxel> segment(const EventStream& stream, const SegmentationConfig& config);

}  // namespace awg
