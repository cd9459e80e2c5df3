#pragma once

// OpenMP kernels. Each mirrors a serial reference in its home module (segment,
// denoise_voxels, layer_forward) and must produce identical output for any thread count.

#include <span>
#include <vector>

#include "awg/attention.hpp"
#include "awg/denoise.hpp"
#include "awg/segmentation.hpp"

namespace awg::parallel {

/// threads <= 0 selects the OpenMP default.
int resolve_threads(int threads);

std::vector<Voxel> segment(const EventStream& stream, const SegmentationConfig& config, int threads);

std::vector<DenoisedVoxel> denoise_voxels(std::span<const Voxel> voxels, const WeightParams& params, int threads);

NodeFeatureSet layer_forward(const EventGraph& graph, const NodeFeatureSet& feats, const AttentionParams& params,
                             int threads);

}  // namespace awg::parallel
