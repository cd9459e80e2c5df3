#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace awg {

/// One camera event. Timestamps are microseconds; polarity is exactly +1 (ON) or -1 (OFF).
struct Event {
    std::int32_t x = 0;
    std::int32_t y = 0;
    std::int64_t t = 0;
    std::int8_t p = 1;

    bool operator==(const Event&) const = default;
};

struct EventStream {
    std::vector<Event> events;
    bool sorted_by_time = false;

    std::size_t size() const noexcept { return events.size(); }
    bool empty() const noexcept { return events.empty(); }
    const Event& operator[](std::size_t i) const { return events[i]; }

    bool operator==(const EventStream&) const = default;
};

struct Extents {
    std::int32_t x_min = 0, x_max = 0;
    std::int32_t y_min = 0, y_max = 0;
    std::int64_t t_min = 0, t_max = 0;

    std::int64_t x_range() const noexcept { return std::int64_t{x_max} - x_min; }
    std::int64_t y_range() const noexcept { return std::int64_t{y_max} - y_min; }
    std::int64_t t_range() const noexcept { return t_max - t_min; }

    bool operator==(const Extents&) const = default;
};

/// Parses "x,y,t,p" records. An optional "x,y,t,p" header line is skipped, blank lines are
/// ignored, and polarity 0 is read as -1.
/// Throws ParseError on malformed records and DomainError on out-of-domain values.
EventStream parse_event_csv(std::string_view text);

/// One "x,y,t,p" line per event, no header.
std::string write_event_csv(const EventStream& stream);

/// Throws DomainError on an empty stream.
Extents compute_extents(const EventStream& stream);
Extents compute_extents(const std::vector<Event>& events);

/// Stable sort on t; equal timestamps keep their input order.
EventStream sort_by_time(EventStream stream);

// File helpers. Throw std::runtime_error on I/O failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace awg
