#include "awg/graph_build.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <tuple>

#include "awg/error.hpp"

namespace awg {
namespace {

std::int64_t spatial_dist2(const Event& a, const Event& b) {
    const std::int64_t dx = std::int64_t{a.x} - b.x;
    const std::int64_t dy = std::int64_t{a.y} - b.y;
    return dx * dx + dy * dy;
}

// Lexicographic preference key for neighbor j of node i; smaller is preferred.
std::tuple<int, std::int64_t, std::int64_t, NodeId> neighbor_key(const Event& ei, const Event& ej, NodeId j) {
    const int category = ej.t > ei.t ? 0 : (ej.t < ei.t ? 1 : 2);
    const std::int64_t dt = ej.t > ei.t ? ej.t - ei.t : ei.t - ej.t;
    return {category, dt, spatial_dist2(ei, ej), j};
}

void check_node(std::size_t n, NodeId i, const char* where) {
    if (i >= n) {
        throw DomainError(std::string(where) + ": node id " + std::to_string(i) + " out of range (" +
                          std::to_string(n) + " nodes)");
    }
}

PairFactors factors_from(const Event& a, const Event& b, const VelocityVector& va, const VelocityVector& vb) {
    const double dx = static_cast<double>(std::int64_t{b.x} - a.x);
    const double dy = static_cast<double>(std::int64_t{b.y} - a.y);
    const double dt = static_cast<double>(b.t - a.t);
    PairFactors f;
    f.d = std::sqrt(dx * dx + dy * dy + dt * dt);
    f.dv = std::abs(va.magnitude() - vb.magnitude());
    f.theta = angular_difference(va, vb);
    f.pol = polarity_consistency(a.p, b.p);
    return f;
}

}  // namespace

void WeightParams::validate() const {
    for (double c : {alpha, beta, gamma, delta}) {
        if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("weights: coefficients must be finite and >= 0");
    }
    if (!(alpha + beta + gamma + delta > 0.0)) throw DomainError("weights: coefficients must not all be zero");
}

WeightParams weight_preset(std::string_view name) {
    if (name == "comb1") return {1.0, 0.0, 0.0, 0.0, true};
    if (name == "comb2") return {0.8, 0.1, 0.05, 0.05, true};
    if (name == "comb3") return {0.7, 0.1, 0.1, 0.1, true};
    if (name == "comb4") return {0.6, 0.2, 0.1, 0.1, true};
    throw DomainError("unknown weight preset '" + std::string(name) + "' (expected comb1..comb4)");
}

void EventGraph::validate() const {
    const auto n = nodes.size();
    std::vector<std::pair<NodeId, NodeId>> seen;
    seen.reserve(edges.size());
    for (const auto& e : edges) {
        if (e.i >= e.j) throw DomainError("graph: edge endpoints must satisfy i < j");
        if (e.j >= n) throw DomainError("graph: edge endpoint out of range");
        seen.emplace_back(e.i, e.j);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) throw DomainError("graph: duplicate edge");
}

double VelocityVector::magnitude() const noexcept { return std::hypot(vx, vy); }

VelocityVector velocity_vector(const Event& from, const Event& to) {
    const double dx = static_cast<double>(std::int64_t{to.x} - from.x);
    const double dy = static_cast<double>(std::int64_t{to.y} - from.y);
    const std::int64_t dt = to.t - from.t;
    if (dt == 0) return {dx, dy, true};
    const auto dtd = static_cast<double>(dt);
    return {dx / dtd, dy / dtd, false};
}

NodeId reference_neighbor(std::span<const Event> events, NodeId i) {
    if (events.size() < 2) throw DomainError("reference_neighbor: voxel needs at least 2 events");
    check_node(events.size(), i, "reference_neighbor");
    const auto& ei = events[i];
    NodeId best = i == 0 ? 1 : 0;
    auto best_key = neighbor_key(ei, events[best], best);
    for (NodeId j = 0; j < events.size(); ++j) {
        if (j == i) continue;
        const auto key = neighbor_key(ei, events[j], j);
        if (key < best_key) {
            best_key = key;
            best = j;
        }
    }
    return best;
}

VelocityVector reference_velocity(const Voxel& voxel, NodeId i) {
    const auto& ev = voxel.events.events;
    const auto j = reference_neighbor(ev, i);
    return velocity_vector(ev[i], ev[j]);
}

std::vector<VelocityVector> reference_velocities(std::span<const Event> events) {
    const auto n = events.size();
    if (n < 2) throw DomainError("reference_velocities: voxel needs at least 2 events");

    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeId a, NodeId b) { return events[a].t < events[b].t; });

    const auto by_time = [&](NodeId a, std::int64_t t) { return events[a].t < t; };
    const auto time_by = [&](std::int64_t t, NodeId a) { return t < events[a].t; };

    const auto nearest_in = [&](NodeId i, auto first, auto last) {
        NodeId best = *first;
        for (auto it = first; it != last; ++it) {
            const auto d = spatial_dist2(events[i], events[*it]);
            const auto bd = spatial_dist2(events[i], events[best]);
            if (d < bd || (d == bd && *it < best)) best = *it;
        }
        return best;
    };

    std::vector<VelocityVector> out(n);
    for (NodeId i = 0; i < n; ++i) {
        const auto t = events[i].t;
        NodeId ref;
        const auto succ = std::upper_bound(order.begin(), order.end(), t, time_by);
        if (succ != order.end()) {
            const auto group_end = std::upper_bound(succ, order.end(), events[*succ].t, time_by);
            ref = nearest_in(i, succ, group_end);
        } else {
            const auto same = std::lower_bound(order.begin(), order.end(), t, by_time);
            if (same != order.begin()) {
                const auto pt = events[*std::prev(same)].t;
                const auto group_begin = std::lower_bound(order.begin(), same, pt, by_time);
                ref = nearest_in(i, group_begin, same);
            } else {
                // All timestamps equal: spatial nearest among the others.
                ref = i == 0 ? 1 : 0;
                for (NodeId j = 0; j < n; ++j) {
                    if (j == i) continue;
                    const auto d = spatial_dist2(events[i], events[j]);
                    const auto bd = spatial_dist2(events[i], events[ref]);
                    if (d < bd || (d == bd && j < ref)) ref = j;
                }
            }
        }
        out[i] = velocity_vector(events[i], events[ref]);
    }
    return out;
}

double angular_difference(const VelocityVector& u, const VelocityVector& v) {
    const double mu = u.magnitude();
    const double mv = v.magnitude();
    if (mu < kMinVelocityMagnitude || mv < kMinVelocityMagnitude) return 0.0;
    const double c = (u.vx * v.vx + u.vy * v.vy) / (mu * mv);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

int polarity_consistency(std::int8_t p_i, std::int8_t p_j) { return p_i == p_j ? 0 : 1; }

PairFactors pair_factors(const Voxel& voxel, NodeId i, NodeId j) {
    const auto& ev = voxel.events.events;
    check_node(ev.size(), i, "pair_factors");
    check_node(ev.size(), j, "pair_factors");
    if (i == j) throw DomainError("pair_factors: i and j must differ");
    return factors_from(ev[i], ev[j], reference_velocity(voxel, i), reference_velocity(voxel, j));
}

FactorScales factor_scales(std::span<const Event> events, std::span<const VelocityVector> velocities) {
    FactorScales s;
    if (events.empty()) return s;
    const auto ext = compute_extents(std::vector<Event>(events.begin(), events.end()));
    const auto X = static_cast<double>(ext.x_range());
    const auto Y = static_cast<double>(ext.y_range());
    const auto T = static_cast<double>(ext.t_range());
    const double diag = std::sqrt(X * X + Y * Y + T * T);
    s.distance = diag > 0.0 ? diag : 1.0;

    if (!velocities.empty()) {
        const auto [lo, hi] = std::minmax_element(
            velocities.begin(), velocities.end(),
            [](const VelocityVector& a, const VelocityVector& b) { return a.magnitude() < b.magnitude(); });
        const double spread = hi->magnitude() - lo->magnitude();
        s.speed_difference = spread > 0.0 ? spread : 1.0;
    }
    return s;
}

double edge_weight(const PairFactors& f, const WeightParams& params, const FactorScales& scales) {
    double d = f.d;
    double dv = f.dv;
    double theta = f.theta;
    if (params.normalize_factors) {
        d /= scales.distance;
        dv /= scales.speed_difference;
        theta /= std::numbers::pi;
    }
    return params.alpha * d + params.beta * dv + params.gamma * theta + params.delta * f.pol;
}

EventGraph build_graph(std::span<const Event> events, const WeightParams& params) {
    params.validate();
    EventGraph g;
    g.nodes.assign(events.begin(), events.end());
    const auto n = events.size();
    if (n < 2) return g;

    const auto velocities = reference_velocities(events);
    const auto scales = factor_scales(events, velocities);

    g.edges.reserve(n * (n - 1) / 2);
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) {
            const auto f = factors_from(events[i], events[j], velocities[i], velocities[j]);
            g.edges.push_back({i, j, edge_weight(f, params, scales)});
        }
    }
    return g;
}

EventGraph build_graph(const Voxel& voxel, const WeightParams& params) {
    return build_graph(std::span<const Event>(voxel.events.events), params);
}

}  // namespace awg
