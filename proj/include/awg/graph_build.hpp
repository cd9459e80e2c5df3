#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "awg/event_io.hpp"
#include "awg/segmentation.hpp"

namespace awg {

using NodeId = std::uint32_t;

/// Coefficients of the four-factor edge weight
///   w = alpha * distance + beta * speed difference + gamma * angle + delta * polarity mismatch.
struct WeightParams {
    double alpha = 0.7;
    double beta = 0.1;
    double gamma = 0.1;
    double delta = 0.1;
    bool normalize_factors = true;

    void validate() const;

    bool operator==(const WeightParams&) const = default;
};

/// Named presets "comb1".."comb4". Throws DomainError on an unknown name.
WeightParams weight_preset(std::string_view name);

struct PairFactors {
    double d = 0.0;      // 3D Euclidean distance in raw (pixel, pixel, microsecond) units
    double dv = 0.0;     // | |v_i| - |v_j| |
    double theta = 0.0;  // angle between reference velocities, [0, pi]
    int pol = 0;         // 1 if polarities differ
};

struct VelocityVector {
    double vx = 0.0;
    double vy = 0.0;
    bool degenerate = false;  // defining pair shared a timestamp; (vx, vy) is a raw displacement

    double magnitude() const noexcept;
};

/// Per-voxel divisors applied when WeightParams::normalize_factors is set.
struct FactorScales {
    double distance = 1.0;          // bounding-box diagonal
    double speed_difference = 1.0;  // largest dv over the voxel
};

struct Edge {
    NodeId i = 0;
    NodeId j = 0;  // i < j
    double w = 0.0;

    bool operator==(const Edge&) const = default;
};

/// Undirected weighted graph over a voxel's events; node id = index into `nodes`.
struct EventGraph {
    std::vector<Event> nodes;
    std::vector<Edge> edges;

    std::size_t node_count() const noexcept { return nodes.size(); }
    std::size_t edge_count() const noexcept { return edges.size(); }

    /// Throws DomainError on self-loops, unordered or duplicate pairs, or out-of-range ids.
    void validate() const;

    bool operator==(const EventGraph&) const = default;
};

constexpr double kMinVelocityMagnitude = 1e-9;

VelocityVector velocity_vector(const Event& from, const Event& to);

/// The neighbor that defines node i's velocity: the earliest strictly later event; failing
/// that, the latest strictly earlier one; failing that (all timestamps equal), the spatially
/// nearest event. Ties go to the smaller spatial distance, then the smaller id.
NodeId reference_neighbor(std::span<const Event> events, NodeId i);

VelocityVector reference_velocity(const Voxel& voxel, NodeId i);

/// Reference velocity of every node. Throws DomainError for fewer than 2 events.
std::vector<VelocityVector> reference_velocities(std::span<const Event> events);

/// Angle in [0, pi]; 0 when either vector is shorter than kMinVelocityMagnitude.
double angular_difference(const VelocityVector& u, const VelocityVector& v);

int polarity_consistency(std::int8_t p_i, std::int8_t p_j);

PairFactors pair_factors(const Voxel& voxel, NodeId i, NodeId j);

FactorScales factor_scales(std::span<const Event> events, std::span<const VelocityVector> velocities);

double edge_weight(const PairFactors& f, const WeightParams& params, const FactorScales& scales = {});

/// Complete graph over the voxel's events, edges in lexicographic (i, j) order.
EventGraph build_graph(const Voxel& voxel, const WeightParams& params);
EventGraph build_graph(std::span<const Event> events, const WeightParams& params);

}  // namespace awg
