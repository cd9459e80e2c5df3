#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "awg/event_io.hpp"

namespace awg {

enum class SynthObject { moving_bar, moving_disc };
enum class NoiseModel { uniform };
enum class EventLabel : std::uint8_t { noise = 0, signal = 1 };

SynthObject parse_synth_object(std::string_view name);
std::string_view to_string(SynthObject object);

/// A translating bar or disc seen by a width x height sensor. Signal events lie on the object
/// outline; noise events are spread over the whole (x, y, t) volume.
struct SynthConfig {
    std::int32_t width = 128;
    std::int32_t height = 128;
    std::int64_t duration = 20000;   // microseconds
    double signal_rate = 0.25;       // signal events per microsecond
    double noise_fraction = 0.3;     // of the final stream
    SynthObject object = SynthObject::moving_bar;
    NoiseModel noise = NoiseModel::uniform;
    double vx = 0.002;               // pixels per microsecond
    double vy = 0.0;
    double object_size = 40.0;       // bar length, or disc diameter
    double bar_width = 6.0;          // distance between a bar's leading and trailing edges
    std::uint64_t seed = 1;

    void validate() const;
};

struct LabeledEventStream {
    EventStream stream;
    std::vector<EventLabel> labels;
};

struct DenoiseMetrics {
    double precision = 1.0;
    double recall = 1.0;
    double noise_removed_fraction = 1.0;
    double input_noise_fraction = 0.0;
    double output_noise_fraction = 0.0;
    // Confusion cells with signal as the positive class; they sum to the stream length.
    std::size_t true_positive = 0;
    std::size_t false_positive = 0;
    std::size_t false_negative = 0;
    std::size_t true_negative = 0;
};

/// round(noise_fraction / (1 - noise_fraction) * n_signal).
std::size_t noise_count_for(std::size_t n_signal, double noise_fraction);

/// Deterministic in the config (seed included). The stream is time-sorted; labels align by index.
LabeledEventStream generate(const SynthConfig& config);

/// kept_indices are positions in labeled.stream; duplicates are ignored.
/// Throws DomainError on out-of-range indices.
DenoiseMetrics evaluate(const LabeledEventStream& labeled, std::span<const std::size_t> kept_indices);

/// One "0"/"1" per line, 1 = signal.
std::string write_labels(std::span<const EventLabel> labels);
std::vector<EventLabel> parse_labels(std::string_view text);

}  // namespace awg
