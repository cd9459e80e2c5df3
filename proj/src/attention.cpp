#include "awg/attention.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "awg/error.hpp"
#include "awg/rng.hpp"

namespace awg {
namespace {

double leaky_relu(double x, double slope) { return x >= 0.0 ? x : slope * x; }

void check_dim(const Eigen::VectorXd& f, const AttentionParams& params, const char* where) {
    if (static_cast<std::size_t>(f.size()) != params.d_in()) {
        throw DomainError(std::string(where) + ": feature length " + std::to_string(f.size()) +
                          " does not match d_in " + std::to_string(params.d_in()));
    }
}

}  // namespace

void AttentionParams::validate() const {
    if (w_matrix.size() == 0) throw DomainError("attention: empty weight matrix");
    if (static_cast<std::size_t>(a_vector.size()) != 2 * d_out()) {
        throw DomainError("attention: a_vector length must be 2 * d_out");
    }
    if (!(w_floor > 0.0)) throw DomainError("attention: w_floor must be > 0");
    if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) throw DomainError("attention: leaky_slope must lie in (0, 1)");
}

AttentionParams AttentionParams::random(std::size_t d_in, std::size_t d_out, std::uint64_t seed) {
    if (d_in == 0 || d_out == 0) throw DomainError("attention: dimensions must be >= 1");
    Rng rng(seed);
    AttentionParams p;
    const double w_limit = std::sqrt(6.0 / static_cast<double>(d_in + d_out));
    p.w_matrix.resize(static_cast<Eigen::Index>(d_in), static_cast<Eigen::Index>(d_out));
    for (Eigen::Index r = 0; r < p.w_matrix.rows(); ++r) {
        for (Eigen::Index c = 0; c < p.w_matrix.cols(); ++c) p.w_matrix(r, c) = uniform_real(rng, -w_limit, w_limit);
    }
    const double a_limit = std::sqrt(6.0 / static_cast<double>(2 * d_out + 1));
    p.a_vector.resize(static_cast<Eigen::Index>(2 * d_out));
    for (Eigen::Index k = 0; k < p.a_vector.size(); ++k) p.a_vector(k) = uniform_real(rng, -a_limit, a_limit);
    return p;
}

NodeFeatureSet event_features(std::span<const Event> events, bool standardize) {
    NodeFeatureSet out;
    out.features.reserve(events.size());
    for (const auto& e : events) {
        Eigen::VectorXd f(4);
        f << static_cast<double>(e.x), static_cast<double>(e.y), static_cast<double>(e.t), static_cast<double>(e.p);
        out.features.push_back(std::move(f));
    }
    if (!standardize || events.empty()) return out;

    const auto n = static_cast<double>(events.size());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
    for (const auto& f : out.features) mean += f;
    mean /= n;
    Eigen::VectorXd var = Eigen::VectorXd::Zero(4);
    for (const auto& f : out.features) var += (f - mean).cwiseAbs2();
    var /= n;
    for (auto& f : out.features) {
        for (Eigen::Index k = 0; k < 4; ++k) {
            const double sd = std::sqrt(var(k));
            f(k) = sd > 0.0 ? (f(k) - mean(k)) / sd : 0.0;
        }
    }
    return out;
}

double attention_logit(const Eigen::VectorXd& f_i, const Eigen::VectorXd& f_j, double w_ij,
                       const AttentionParams& params) {
    params.validate();
    check_dim(f_i, params, "attention_logit");
    check_dim(f_j, params, "attention_logit");
    const auto d_out = static_cast<Eigen::Index>(params.d_out());
    const double pre = params.a_vector.head(d_out).dot(params.w_matrix.transpose() * f_i) +
                       params.a_vector.tail(d_out).dot(params.w_matrix.transpose() * f_j);
    return leaky_relu(pre, params.leaky_slope) / std::max(w_ij, params.w_floor);
}

namespace detail {

std::vector<std::vector<Neighbor>> adjacency(const EventGraph& graph) {
    std::vector<std::vector<Neighbor>> adj(graph.node_count());
    for (const auto& e : graph.edges) {
        if (e.i >= adj.size() || e.j >= adj.size()) throw DomainError("attention: edge endpoint out of range");
        adj[e.i].push_back({e.j, e.w});
        adj[e.j].push_back({e.i, e.w});
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    }
    return adj;
}

std::vector<Coefficient> coefficients_over(NodeId i, std::span<const Neighbor> neighbors,
                                           const NodeFeatureSet& feats, const AttentionParams& params) {
    if (neighbors.empty()) throw DomainError("attention_coefficients: node " + std::to_string(i) + " is isolated");
    if (i >= feats.size()) throw DomainError("attention_coefficients: node id out of range");

    std::vector<Coefficient> out;
    out.reserve(neighbors.size());
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto& nb : neighbors) {
        if (nb.node >= feats.size()) throw DomainError("attention_coefficients: neighbor id out of range");
        const double logit = attention_logit(feats.features[i], feats.features[nb.node], nb.w, params);
        out.push_back({nb.node, logit});
        peak = std::max(peak, logit);
    }
    double total = 0.0;
    for (auto& c : out) {
        c.alpha = std::exp(c.alpha - peak);
        total += c.alpha;
    }
    for (auto& c : out) c.alpha /= total;
    return out;
}

}  // namespace detail

std::vector<Coefficient> attention_coefficients(NodeId i, const EventGraph& graph, const NodeFeatureSet& feats,
                                                const AttentionParams& params) {
    std::vector<detail::Neighbor> neighbors;
    for (const auto& e : graph.edges) {
        if (e.i == i) neighbors.push_back({e.j, e.w});
        if (e.j == i) neighbors.push_back({e.i, e.w});
    }
    std::sort(neighbors.begin(), neighbors.end(),
              [](const detail::Neighbor& a, const detail::Neighbor& b) { return a.node < b.node; });
    return detail::coefficients_over(i, neighbors, feats, params);
}

Eigen::VectorXd aggregate(NodeId i, std::span<const Coefficient> coeffs, const NodeFeatureSet& feats,
                          const AttentionParams& params) {
    if (i >= feats.size()) throw DomainError("aggregate: node id out of range");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params.d_out()));
    for (const auto& c : coeffs) {
        if (c.neighbor >= feats.size()) throw DomainError("aggregate: neighbor id out of range");
        const auto& f = feats.features[c.neighbor];
        check_dim(f, params, "aggregate");
        out += c.alpha * (params.w_matrix.transpose() * f);
    }
    return out;
}

NodeFeatureSet layer_forward(const EventGraph& graph, const NodeFeatureSet& feats, const AttentionParams& params) {
    params.validate();
    if (feats.size() != graph.node_count()) throw DomainError("layer_forward: one feature vector per node required");
    const auto adj = detail::adjacency(graph);
    NodeFeatureSet out;
    out.features.resize(feats.size());
    for (NodeId i = 0; i < feats.size(); ++i) {
        if (adj[i].empty()) {
            check_dim(feats.features[i], params, "layer_forward");
            out.features[i] = params.w_matrix.transpose() * feats.features[i];
        } else {
            const auto coeffs = detail::coefficients_over(i, adj[i], feats, params);
            out.features[i] = aggregate(i, coeffs, feats, params);
        }
    }
    return out;
}

AttentionParams attention_params_from_json(const nlohmann::json& doc) {
    const auto seed = doc.value("seed", std::uint64_t{0});
    const auto d_in = doc.value("d_in", std::size_t{4});
    const auto d_out = doc.value("d_out", std::size_t{4});

    AttentionParams p;
    if (doc.contains("w_matrix") && doc.contains("a_vector")) {
        const auto w = doc.at("w_matrix").get<std::vector<double>>();
        const auto a = doc.at("a_vector").get<std::vector<double>>();
        if (w.size() != d_in * d_out) throw DomainError("attention params: w_matrix must hold d_in * d_out values");
        p.w_matrix.resize(static_cast<Eigen::Index>(d_in), static_cast<Eigen::Index>(d_out));
        for (std::size_t r = 0; r < d_in; ++r) {
            for (std::size_t c = 0; c < d_out; ++c) {
                p.w_matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = w[r * d_out + c];
            }
        }
        p.a_vector = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
    } else {
        p = AttentionParams::random(d_in, d_out, seed);
    }
    p.leaky_slope = doc.value("leaky_slope", p.leaky_slope);
    p.w_floor = doc.value("w_floor", p.w_floor);
    p.validate();
    return p;
}

nlohmann::json attention_params_to_json(const AttentionParams& params) {
    std::vector<double> w;
    w.reserve(params.d_in() * params.d_out());
    for (Eigen::Index r = 0; r < params.w_matrix.rows(); ++r) {
        for (Eigen::Index c = 0; c < params.w_matrix.cols(); ++c) w.push_back(params.w_matrix(r, c));
    }
    return {{"d_in", params.d_in()},
            {"d_out", params.d_out()},
            {"w_matrix", w},
            {"a_vector", std::vector<double>(params.a_vector.data(), params.a_vector.data() + params.a_vector.size())},
            {"leaky_slope", params.leaky_slope},
            {"w_floor", params.w_floor}};
}

AttentionParams load_attention_params(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError("attention params '" + path.string() + "': " + e.what());
    }
    return attention_params_from_json(doc);
}

}  // namespace awg
