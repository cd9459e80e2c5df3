#include "awg/event_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "awg/error.hpp"

namespace awg {
namespace {

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

bool is_header(std::string_view line) {
    std::array<std::string_view, 4> names{"x", "y", "t", "p"};
    std::size_t k = 0;
    while (true) {
        const auto comma = line.find(',');
        if (k >= names.size() || trim(line.substr(0, comma)) != names[k]) return false;
        ++k;
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    return k == names.size();
}

template <typename Int>
Int parse_field(std::string_view field, std::size_t line_no, const char* name) {
    field = trim(field);
    Int value{};
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    if (!field.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc{} || ptr != last) {
        throw ParseError(line_no, std::string("invalid integer in field '") + name + "': '" +
                                      std::string(field) + "'");
    }
    return value;
}

Event parse_record(std::string_view line, std::size_t line_no) {
    std::array<std::string_view, 4> fields;
    std::size_t n = 0;
    while (true) {
        const auto comma = line.find(',');
        if (n == fields.size()) {
            throw ParseError(line_no, "expected 4 comma-separated fields, got more");
        }
        fields[n++] = line.substr(0, comma);
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    if (n != fields.size()) {
        throw ParseError(line_no, "expected 4 comma-separated fields, got " + std::to_string(n));
    }

    const auto x = parse_field<std::int32_t>(fields[0], line_no, "x");
    const auto y = parse_field<std::int32_t>(fields[1], line_no, "y");
    const auto t = parse_field<std::int64_t>(fields[2], line_no, "t");
    const auto p = parse_field<std::int32_t>(fields[3], line_no, "p");

    const auto where = "line " + std::to_string(line_no) + ": ";
    if (p < -1 || p > 1) throw DomainError(where + "polarity must be -1, 0 or 1");
    if (x < 0 || y < 0 || t < 0) throw DomainError(where + "coordinates and timestamp must be non-negative");

    return Event{x, y, t, static_cast<std::int8_t>(p == 0 ? -1 : p)};
}

}  // namespace

EventStream parse_event_csv(std::string_view text) {
    EventStream out;
    std::size_t line_no = 0;
    bool seen_record = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const auto line = trim(text.substr(0, nl));
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;

        if (line.empty()) continue;
        if (!seen_record && is_header(line)) {
            seen_record = true;
            continue;
        }
        seen_record = true;
        out.events.push_back(parse_record(line, line_no));
    }
    return out;
}

std::string write_event_csv(const EventStream& stream) {
    std::string out;
    out.reserve(stream.size() * 20);
    std::array<char, 24> buf{};
    const auto put = [&](auto v) {
        const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        out.append(buf.data(), ptr);
    };
    for (const auto& e : stream.events) {
        put(e.x);
        out += ',';
        put(e.y);
        out += ',';
        put(e.t);
        out += ',';
        put(static_cast<int>(e.p));
        out += '\n';
    }
    return out;
}

Extents compute_extents(const std::vector<Event>& events) {
    if (events.empty()) throw DomainError("compute_extents: empty stream");
    const auto& f = events.front();
    Extents ext{f.x, f.x, f.y, f.y, f.t, f.t};
    for (const auto& e : events) {
        ext.x_min = std::min(ext.x_min, e.x);
        ext.x_max = std::max(ext.x_max, e.x);
        ext.y_min = std::min(ext.y_min, e.y);
        ext.y_max = std::max(ext.y_max, e.y);
        ext.t_min = std::min(ext.t_min, e.t);
        ext.t_max = std::max(ext.t_max, e.t);
    }
    return ext;
}

Extents compute_extents(const EventStream& stream) { return compute_extents(stream.events); }

EventStream sort_by_time(EventStream stream) {
    if (!stream.sorted_by_time) {
        std::stable_sort(stream.events.begin(), stream.events.end(),
                         [](const Event& a, const Event& b) { return a.t < b.t; });
        stream.sorted_by_time = true;
    }
    return stream;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw std::runtime_error("read failed on '" + path.string() + "'");
    return std::move(ss).str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed on '" + path.string() + "'");
}

}  // namespace awg
