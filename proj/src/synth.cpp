#include "awg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "awg/error.hpp"
#include "awg/rng.hpp"

namespace awg {
namespace {

std::int32_t wrap(double v, std::int32_t extent) {
    const auto k = static_cast<std::int64_t>(std::floor(v + 0.5));
    const auto m = ((k % extent) + extent) % extent;
    return static_cast<std::int32_t>(m);
}

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

SynthObject parse_synth_object(std::string_view name) {
    if (name == "moving_bar" || name == "bar") return SynthObject::moving_bar;
    if (name == "moving_disc" || name == "disc") return SynthObject::moving_disc;
    throw DomainError("unknown synthetic object '" + std::string(name) + "' (expected moving_bar or moving_disc)");
}

std::string_view to_string(SynthObject object) {
    return object == SynthObject::moving_bar ? "moving_bar" : "moving_disc";
}

void SynthConfig::validate() const {
    if (width < 1 || height < 1 || duration < 1) throw DomainError("synth: width, height and duration must be >= 1");
    if (!(noise_fraction >= 0.0 && noise_fraction < 1.0)) throw DomainError("synth: noise_fraction must lie in [0, 1)");
    if (!(signal_rate >= 0.0) || !std::isfinite(signal_rate)) throw DomainError("synth: signal_rate must be >= 0");
    if (!std::isfinite(vx) || !std::isfinite(vy)) throw DomainError("synth: velocity must be finite");
    if (!(object_size > 0.0) || !(bar_width >= 0.0)) throw DomainError("synth: object dimensions must be positive");
}

std::size_t noise_count_for(std::size_t n_signal, double noise_fraction) {
    return static_cast<std::size_t>(std::llround(noise_fraction / (1.0 - noise_fraction) * static_cast<double>(n_signal)));
}

LabeledEventStream generate(const SynthConfig& config) {
    config.validate();
    Rng rng(config.seed);

    const auto n_signal = static_cast<std::size_t>(std::llround(config.signal_rate * static_cast<double>(config.duration)));
    const auto n_noise = noise_count_for(n_signal, config.noise_fraction);

    const double speed = std::hypot(config.vx, config.vy);
    const double dir_x = speed > 0.0 ? config.vx / speed : 1.0;
    const double dir_y = speed > 0.0 ? config.vy / speed : 0.0;
    const double mid_t = static_cast<double>(config.duration) / 2.0;

    std::vector<Event> events;
    std::vector<EventLabel> labels;
    events.reserve(n_signal + n_noise);
    labels.reserve(n_signal + n_noise);

    for (std::size_t k = 0; k < n_signal; ++k) {
        const auto t = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(config.duration)));
        const double cx = config.width / 2.0 + config.vx * (static_cast<double>(t) - mid_t);
        const double cy = config.height / 2.0 + config.vy * (static_cast<double>(t) - mid_t);
        double px, py;
        std::int8_t p;
        if (config.object == SynthObject::moving_bar) {
            const bool leading = uniform01(rng) < 0.5;
            const double along = uniform_real(rng, -config.object_size / 2.0, config.object_size / 2.0);
            const double offset = (leading ? 0.5 : -0.5) * config.bar_width;
            px = cx + offset * dir_x - along * dir_y;
            py = cy + offset * dir_y + along * dir_x;
            p = leading ? 1 : -1;
        } else {
            const double phi = uniform_real(rng, 0.0, 2.0 * std::numbers::pi);
            const double r = config.object_size / 2.0;
            const double ux = std::cos(phi), uy = std::sin(phi);
            px = cx + r * ux;
            py = cy + r * uy;
            p = ux * dir_x + uy * dir_y >= 0.0 ? 1 : -1;
        }
        events.push_back({wrap(px, config.width), wrap(py, config.height), t, p});
        labels.push_back(EventLabel::signal);
    }

    for (std::size_t k = 0; k < n_noise; ++k) {
        Event e;
        e.x = static_cast<std::int32_t>(uniform_index(rng, static_cast<std::uint64_t>(config.width)));
        e.y = static_cast<std::int32_t>(uniform_index(rng, static_cast<std::uint64_t>(config.height)));
        e.t = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(config.duration)));
        e.p = uniform_index(rng, 2) == 0 ? std::int8_t{-1} : std::int8_t{1};
        events.push_back(e);
        labels.push_back(EventLabel::noise);
    }

    std::vector<std::size_t> order(events.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return events[a].t < events[b].t; });

    LabeledEventStream out;
    out.stream.sorted_by_time = true;
    out.stream.events.reserve(order.size());
    out.labels.reserve(order.size());
    for (auto k : order) {
        out.stream.events.push_back(events[k]);
        out.labels.push_back(labels[k]);
    }
    return out;
}

DenoiseMetrics evaluate(const LabeledEventStream& labeled, std::span<const std::size_t> kept_indices) {
    const auto n = labeled.stream.size();
    if (labeled.labels.size() != n) throw DomainError("evaluate: label count does not match stream length");

    std::vector<bool> kept(n, false);
    for (auto k : kept_indices) {
        if (k >= n) throw DomainError("evaluate: kept index " + std::to_string(k) + " out of range");
        kept[k] = true;
    }

    DenoiseMetrics m;
    for (std::size_t k = 0; k < n; ++k) {
        const bool signal = labeled.labels[k] == EventLabel::signal;
        if (signal) {
            ++(kept[k] ? m.true_positive : m.false_negative);
        } else {
            ++(kept[k] ? m.false_positive : m.true_negative);
        }
    }
    const auto n_kept = m.true_positive + m.false_positive;
    const auto n_signal = m.true_positive + m.false_negative;
    const auto n_noise = m.false_positive + m.true_negative;
    m.precision = ratio(m.true_positive, n_kept);
    m.recall = ratio(m.true_positive, n_signal);
    m.noise_removed_fraction = ratio(m.true_negative, n_noise);
    m.input_noise_fraction = n == 0 ? 0.0 : ratio(n_noise, n);
    m.output_noise_fraction = n_kept == 0 ? 0.0 : ratio(m.false_positive, n_kept);
    return m;
}

std::string write_labels(std::span<const EventLabel> labels) {
    std::string out;
    out.reserve(labels.size() * 2);
    for (auto l : labels) {
        out += l == EventLabel::signal ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::vector<EventLabel> parse_labels(std::string_view text) {
    std::vector<EventLabel> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
        while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
        if (line.empty()) continue;
        if (line == "1") {
            out.push_back(EventLabel::signal);
        } else if (line == "0") {
            out.push_back(EventLabel::noise);
        } else {
            throw ParseError(line_no, "label must be 0 or 1");
        }
    }
    return out;
}

}  // namespace awg
