#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "awg/event_io.hpp"
#include "awg/graph_build.hpp"
#include "awg/segmentation.hpp"

namespace awg {

constexpr int kReportSchemaVersion = 1;

struct PipelineConfig {
    SegmentationConfig segmentation;
    WeightParams weights;
    std::string preset = "comb3";  // empty when the weights were set individually
    std::string attention_params_path;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string report_path;
};

struct VoxelSummary {
    std::size_t window = 0;
    std::size_t voxel = 0;
    std::size_t n_nodes = 0;
    std::size_t n_edges = 0;       // candidate (complete-graph) edges
    std::size_t n_edges_kept = 0;  // edges with w <= t_opt
    double mst_max = 0.0;
    double t_opt = 0.0;
    std::size_t n_removed = 0;
};

struct PipelineResult {
    EventStream denoised;                   // kept events ordered by (t, input index)
    std::vector<std::size_t> kept_indices;  // input indices, same order as `denoised`
    std::vector<std::size_t> removed_indices;
    std::vector<VoxelSummary> voxels;
    std::size_t events_in = 0;
    std::size_t windows = 0;
};

/// Segmentation -> per-voxel graph -> threshold search -> filtering over the whole stream.
/// Output is identical for every thread count. Throws DomainError on an empty stream.
PipelineResult run_pipeline(const EventStream& input, const PipelineConfig& config);

/// Versioned JSON report. Thread count is deliberately left out so reports are byte-stable.
nlohmann::json pipeline_report(const PipelineResult& result, const PipelineConfig& config);

nlohmann::json to_json(const SegmentationConfig& config);
nlohmann::json to_json(const WeightParams& params, const std::string& preset);

}  // namespace awg
