#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "awg/event_io.hpp"
#include "awg/graph_build.hpp"

namespace awg {

/// Forward-pass parameters of the inverse-weight attention layer.
/// Transformed features are W^T f (W is d_in x d_out); the logit vector `a` has 2 * d_out entries.
struct AttentionParams {
    Eigen::MatrixXd w_matrix;
    Eigen::VectorXd a_vector;
    double leaky_slope = 0.2;
    double w_floor = 1e-6;

    std::size_t d_in() const noexcept { return static_cast<std::size_t>(w_matrix.rows()); }
    std::size_t d_out() const noexcept { return static_cast<std::size_t>(w_matrix.cols()); }

    void validate() const;

    /// Uniform Glorot-style initialization from a seeded mt19937_64.
    static AttentionParams random(std::size_t d_in, std::size_t d_out, std::uint64_t seed);
};

struct NodeFeatureSet {
    std::vector<Eigen::VectorXd> features;

    std::size_t size() const noexcept { return features.size(); }
    std::size_t dim() const noexcept { return features.empty() ? 0 : static_cast<std::size_t>(features.front().size()); }
};

struct Coefficient {
    NodeId neighbor = 0;
    double alpha = 0.0;
};

/// (x, y, t, p) per event; with `standardize`, each coordinate is shifted to zero mean and
/// scaled to unit variance over the set (constant coordinates become 0).
NodeFeatureSet event_features(std::span<const Event> events, bool standardize = true);

/// LeakyReLU(a . (W^T f_i || W^T f_j)) / max(w_ij, w_floor).
double attention_logit(const Eigen::VectorXd& f_i, const Eigen::VectorXd& f_j, double w_ij,
                       const AttentionParams& params);

/// Softmax of attention_logit over i's neighbors, ascending neighbor id.
/// Throws DomainError when i has no neighbors.
std::vector<Coefficient> attention_coefficients(NodeId i, const EventGraph& graph, const NodeFeatureSet& feats,
                                                const AttentionParams& params);

/// sum_j alpha_ij W^T f_j.
Eigen::VectorXd aggregate(NodeId i, std::span<const Coefficient> coeffs, const NodeFeatureSet& feats,
                          const AttentionParams& params);

/// One layer over every node. Isolated nodes output W^T f_i. Serial reference; see parallel.hpp.
NodeFeatureSet layer_forward(const EventGraph& graph, const NodeFeatureSet& feats, const AttentionParams& params);

/// Parameter file: {d_in, d_out, w_matrix (row-major, d_in*d_out), a_vector, leaky_slope, w_floor, seed}.
/// When the matrices are absent they are generated from `seed` with d_in/d_out (default 4/4).
AttentionParams attention_params_from_json(const nlohmann::json& doc);
nlohmann::json attention_params_to_json(const AttentionParams& params);
AttentionParams load_attention_params(const std::filesystem::path& path);

namespace detail {

struct Neighbor {
    NodeId node = 0;
    double w = 0.0;
};

std::vector<std::vector<Neighbor>> adjacency(const EventGraph& graph);

std::vector<Coefficient> coefficients_over(NodeId i, std::span<const Neighbor> neighbors,
                                           const NodeFeatureSet& feats, const AttentionParams& params);

}  // namespace detail

}  // namespace awg
