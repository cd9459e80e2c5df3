#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "awg/graph_build.hpp"
#include "awg/segmentation.hpp"

namespace awg {

struct ThresholdPoint {
    double delta = 0.0;
    double variance = 0.0;

    bool operator==(const ThresholdPoint&) const = default;
};

struct ThresholdSearchResult {
    double t_opt = 0.0;
    double mst_max = 0.0;
    std::vector<ThresholdPoint> curve;  // ascending delta

    bool operator==(const ThresholdSearchResult&) const = default;
};

/// Filtered graph plus the node split. Removed nodes are exactly those left with degree 0.
struct DenoisedVoxel {
    EventGraph graph;
    std::vector<NodeId> kept;
    std::vector<NodeId> removed;
    ThresholdSearchResult threshold;
    std::size_t candidate_edges = 0;  // edges before filtering

    bool operator==(const DenoisedVoxel&) const = default;
};

/// Largest edge on a minimum spanning tree (Kruskal). 0 for graphs with at most one node.
/// Throws DomainError when the edge set does not connect all nodes.
double mst_max_edge(const EventGraph& graph);

/// Per-node count of incident edges with w <= delta.
std::vector<std::size_t> degree_vector(const EventGraph& graph, double delta);

/// Population variance of degrees / max(degrees). 0 for empty input or an all-zero vector.
double normalized_degree_variance(std::span<const std::size_t> degrees);

/// Sweeps the distinct edge weights up to the MST bound and returns the one maximizing the
/// normalized degree variance (largest on ties). The degree vector is piecewise constant
/// between edge weights, so this sweep is exact.
ThresholdSearchResult optimal_threshold(const EventGraph& graph);

/// Keeps edges with w <= t; isolated nodes are classified as noise.
DenoisedVoxel filter_graph(const EventGraph& graph, double t);

/// build_graph -> optimal_threshold -> filter_graph. Voxels with fewer than two events are
/// kept whole.
DenoisedVoxel denoise_voxel(const Voxel& voxel, const WeightParams& params);

/// Serial reference over a voxel sequence; see parallel.hpp for the OpenMP kernel.
std::vector<DenoisedVoxel> denoise_voxels(std::span<const Voxel> voxels, const WeightParams& params);

constexpr std::size_t kBruteForceMaxNodes = 64;
constexpr std::size_t kBruteForceMinGridSteps = 1000;

/// Verification oracle for optimal_threshold. Computes its own connectivity bound, then
/// evaluates the variance on a uniform grid over [0, bound] plus every edge weight, using a
/// fresh edge scan per point. A grid point reports the largest edge weight at or below it,
/// since that is the threshold producing the same filtered graph.
/// Throws DomainError for graphs over 64 nodes or fewer than 1000 grid steps.
ThresholdSearchResult brute_force_threshold(const EventGraph& graph, std::size_t grid_steps);

}  // namespace awg
