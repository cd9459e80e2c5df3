#include "awg/denoise.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "awg/error.hpp"

namespace awg {
namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<unsigned> rank_;
};

std::vector<std::size_t> edges_by_weight(const EventGraph& graph) {
    std::vector<std::size_t> order(graph.edges.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return graph.edges[a].w < graph.edges[b].w; });
    return order;
}

struct ForestBound {
    double max_edge = 0.0;
    bool connected = true;
};

// Kruskal over the sorted edge order; the largest accepted edge is the bound.
ForestBound spanning_forest_bound(const EventGraph& graph, const std::vector<std::size_t>& order) {
    const auto n = graph.node_count();
    ForestBound out;
    if (n <= 1) return out;
    DisjointSets sets(n);
    std::size_t merged = 0;
    for (auto idx : order) {
        const auto& e = graph.edges[idx];
        if (sets.unite(e.i, e.j)) {
            out.max_edge = e.w;
            if (++merged == n - 1) break;
        }
    }
    out.connected = merged == n - 1;
    return out;
}

// Variance of d_k / max_d from exact integer moments: (n*S2 - S1^2) / (n^2 * max^2).
double variance_from_moments(std::size_t n, unsigned __int128 s1, unsigned __int128 s2, std::size_t max_degree) {
    if (n == 0 || max_degree == 0) return 0.0;
    const unsigned __int128 nn = n;
    const unsigned __int128 num = nn * s2 - s1 * s1;
    const unsigned __int128 den = nn * nn * max_degree * max_degree;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double mst_max_edge(const EventGraph& graph) {
    const auto bound = spanning_forest_bound(graph, edges_by_weight(graph));
    if (!bound.connected) throw DomainError("mst_max_edge: candidate edge set is disconnected");
    return bound.max_edge;
}

std::vector<std::size_t> degree_vector(const EventGraph& graph, double delta) {
    std::vector<std::size_t> degrees(graph.node_count(), 0);
    for (const auto& e : graph.edges) {
        if (e.w <= delta) {
            ++degrees[e.i];
            ++degrees[e.j];
        }
    }
    return degrees;
}

double normalized_degree_variance(std::span<const std::size_t> degrees) {
    unsigned __int128 s1 = 0, s2 = 0;
    std::size_t max_degree = 0;
    for (auto d : degrees) {
        s1 += d;
        s2 += static_cast<unsigned __int128>(d) * d;
        max_degree = std::max(max_degree, d);
    }
    return variance_from_moments(degrees.size(), s1, s2, max_degree);
}

ThresholdSearchResult optimal_threshold(const EventGraph& graph) {
    ThresholdSearchResult result;
    const auto n = graph.node_count();
    if (n == 0 || graph.edges.empty()) return result;

    const auto order = edges_by_weight(graph);
    const auto bound = spanning_forest_bound(graph, order);
    result.mst_max = bound.max_edge;

    std::vector<std::size_t> degrees(n, 0);
    unsigned __int128 s1 = 0, s2 = 0;
    std::size_t max_degree = 0;
    const auto bump = [&](NodeId v) {
        const auto d = degrees[v]++;
        s1 += 1;
        s2 += 2 * static_cast<unsigned __int128>(d) + 1;
        max_degree = std::max(max_degree, d + 1);
    };

    double best = -1.0;
    std::size_t k = 0;
    while (k < order.size() && graph.edges[order[k]].w <= bound.max_edge) {
        const double w = graph.edges[order[k]].w;
        for (; k < order.size() && graph.edges[order[k]].w == w; ++k) {
            bump(graph.edges[order[k]].i);
            bump(graph.edges[order[k]].j);
        }
        const double variance = variance_from_moments(n, s1, s2, max_degree);
        result.curve.push_back({w, variance});
        if (variance >= best) {
            best = variance;
            result.t_opt = w;
        }
    }
    return result;
}

DenoisedVoxel filter_graph(const EventGraph& graph, double t) {
    DenoisedVoxel out;
    out.graph.nodes = graph.nodes;
    out.candidate_edges = graph.edge_count();
    std::vector<std::size_t> degrees(graph.node_count(), 0);
    for (const auto& e : graph.edges) {
        if (e.w <= t) {
            out.graph.edges.push_back(e);
            ++degrees[e.i];
            ++degrees[e.j];
        }
    }
    for (NodeId v = 0; v < degrees.size(); ++v) {
        (degrees[v] > 0 ? out.kept : out.removed).push_back(v);
    }
    return out;
}

DenoisedVoxel denoise_voxel(const Voxel& voxel, const WeightParams& params) {
    if (voxel.size() < 2) {
        DenoisedVoxel out;
        out.graph.nodes = voxel.events.events;
        out.kept.resize(voxel.size());
        std::iota(out.kept.begin(), out.kept.end(), NodeId{0});
        return out;
    }
    const auto graph = build_graph(voxel, params);
    auto search = optimal_threshold(graph);
    auto out = filter_graph(graph, search.t_opt);
    out.threshold = std::move(search);
    return out;
}

std::vector<DenoisedVoxel> denoise_voxels(std::span<const Voxel> voxels, const WeightParams& params) {
    std::vector<DenoisedVoxel> out;
    out.reserve(voxels.size());
    for (const auto& v : voxels) out.push_back(denoise_voxel(v, params));
    return out;
}

ThresholdSearchResult brute_force_threshold(const EventGraph& graph, std::size_t grid_steps) {
    const auto n = graph.node_count();
    if (n > kBruteForceMaxNodes) {
        throw DomainError("brute_force_threshold: graph has " + std::to_string(n) + " nodes, limit is " +
                          std::to_string(kBruteForceMaxNodes));
    }
    if (grid_steps < kBruteForceMinGridSteps) {
        throw DomainError("brute_force_threshold: grid_steps must be >= " +
                          std::to_string(kBruteForceMinGridSteps));
    }
    ThresholdSearchResult result;
    if (n == 0 || graph.edges.empty()) return result;

    std::vector<double> weights;
    for (const auto& e : graph.edges) weights.push_back(e.w);
    std::sort(weights.begin(), weights.end());
    weights.erase(std::unique(weights.begin(), weights.end()), weights.end());

    // Component count of the graph restricted to edges with w <= delta, by graph search.
    const auto components = [&](double delta) {
        std::vector<std::vector<NodeId>> adj(n);
        for (const auto& e : graph.edges) {
            if (e.w <= delta) {
                adj[e.i].push_back(e.j);
                adj[e.j].push_back(e.i);
            }
        }
        std::vector<bool> seen(n, false);
        std::size_t count = 0;
        std::vector<NodeId> stack;
        for (NodeId s = 0; s < n; ++s) {
            if (seen[s]) continue;
            ++count;
            seen[s] = true;
            stack.push_back(s);
            while (!stack.empty()) {
                const auto v = stack.back();
                stack.pop_back();
                for (auto u : adj[v]) {
                    if (!seen[u]) {
                        seen[u] = true;
                        stack.push_back(u);
                    }
                }
            }
        }
        return count;
    };

    const auto target = components(weights.back());
    double bound = weights.back();
    for (double w : weights) {
        if (components(w) == target) {
            bound = w;
            break;
        }
    }
    result.mst_max = bound;

    std::vector<double> deltas;
    deltas.reserve(grid_steps + 1 + weights.size());
    for (std::size_t k = 0; k <= grid_steps; ++k) {
        deltas.push_back(k == grid_steps ? bound
                                         : bound * static_cast<double>(k) / static_cast<double>(grid_steps));
    }
    for (double w : weights) {
        if (w <= bound) deltas.push_back(w);
    }
    std::sort(deltas.begin(), deltas.end());

    double best = -1.0;
    double best_delta = 0.0;
    for (double delta : deltas) {
        const auto degrees = degree_vector(graph, delta);
        const double variance = normalized_degree_variance(degrees);
        result.curve.push_back({delta, variance});
        if (variance >= best) {
            best = variance;
            best_delta = delta;
        }
    }

    const auto at_or_below = std::upper_bound(weights.begin(), weights.end(), best_delta);
    result.t_opt = at_or_below == weights.begin() ? 0.0 : *std::prev(at_or_below);
    return result;
}

}  // namespace awg
