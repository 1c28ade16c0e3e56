#pragma once

// =============================================================================
// Serialization of traces: CSV with exact round-trip, JSON, and SVG figures.
// CSV doubles use the shortest representation that parses back to the same
// bits, so read-then-write reproduces a file byte for byte. Signed infinities
// (endpoint curvatures) serialize as the words inf / -inf.
// =============================================================================

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tractrix/geometry.hpp"

namespace tractrix {

// ---- canonical number text ----

[[nodiscard]] inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

[[nodiscard]] inline double parse_double(std::string_view text) {
    if (text == "inf") return inf;
    if (text == "-inf") return -inf;
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    // Only the canonical spellings above plus plain decimal/scientific digits;
    // from_chars alone would also accept "infinity" and "nan(...)".
    for (const char c : text)
        detail::require((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.' || c == 'e',
                        "malformed number field");
    double out = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    detail::require(res.ec == std::errc() && res.ptr == text.data() + text.size(),
                    "malformed number field");
    return out;
}

// ---- CSV trace table ----

inline constexpr std::string_view csv_header = "l,s,x,y,tau,nu,k";

/// Plain row form of a trace, decoupled from any leading curve so files can
/// be read back without reconstructing one.
struct TraceTable {
    /// Comment lines (without the leading marker), echoed verbatim on write.
    std::vector<std::string> metadata;
    /// Columns match csv_header.
    std::vector<std::array<double, 7>> rows;
};

[[nodiscard]] inline TraceTable to_table(const Trace& trace,
                                         std::vector<std::string> metadata = {}) {
    TraceTable table;
    table.metadata = std::move(metadata);
    table.rows.reserve(trace.samples.size());
    for (const TraceSample& sample : trace.samples)
        table.rows.push_back({sample.l, sample.s, sample.pose.position.x,
                              sample.pose.position.y, sample.pose.tangent_angle, sample.nu,
                              sample.curvature});
    return table;
}

[[nodiscard]] inline std::string write_csv(const TraceTable& table) {
    std::string out;
    for (const std::string& line : table.metadata) {
        out += "# ";
        out += line;
        out += '\n';
    }
    out += csv_header;
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

[[nodiscard]] inline TraceTable read_csv(std::string_view text) {
    TraceTable table;
    bool seen_header = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t eol = text.find('\n', pos);
        detail::require(eol != std::string_view::npos, "file must end with a newline");
        const std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.rfind("# ", 0) == 0) {
            detail::require(!seen_header, "comments must precede the header");
            table.metadata.emplace_back(line.substr(2));
            continue;
        }
        if (!seen_header) {
            detail::require(line == csv_header, "unrecognized header line");
            seen_header = true;
            continue;
        }
        std::array<double, 7> row{};
        std::size_t field = 0;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string_view cell =
                line.substr(start, comma == std::string_view::npos ? comma : comma - start);
            detail::require(field < row.size(), "too many fields in a row");
            row[field++] = parse_double(cell);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        detail::require(field == row.size(), "too few fields in a row");
        table.rows.push_back(row);
    }
    detail::require(seen_header, "missing header line");
    return table;
}

// ---- JSON ----

[[nodiscard]] inline nlohmann::json json_number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0.0 ? "inf" : "-inf";
}

[[nodiscard]] inline nlohmann::json trace_json(const Trace& trace) {
    nlohmann::json samples = nlohmann::json::array();
    for (const TraceSample& sample : trace.samples)
        samples.push_back({{"l", json_number(sample.l)},
                           {"s", json_number(sample.s)},
                           {"x", json_number(sample.pose.position.x)},
                           {"y", json_number(sample.pose.position.y)},
                           {"tau", json_number(sample.pose.tangent_angle)},
                           {"nu", json_number(sample.nu)},
                           {"k", json_number(sample.curvature)}});
    nlohmann::json switches = nlohmann::json::array();
    for (const ModeSwitch& sw : trace.mode_switches)
        switches.push_back({{"l", sw.l},
                            {"kind", sw.kind == ModeSwitchKind::StopSlack ? "stop_slack"
                                                                          : "cusp_reversal"},
                            {"sample_index", sw.sample_index}});
    const char* termination = "reached_length";
    if (trace.termination == Termination::Stopped) termination = "stopped";
    if (trace.termination == Termination::Closed) termination = "closed";
    return {{"samples", samples}, {"mode_switches", switches}, {"termination", termination}};
}

// ---- SVG ----

struct SvgOptions {
    double width = 900.0;
    double height = 700.0;
    double margin = 40.0;
    /// Leading-curve samples drawn alongside the trace.
    std::size_t leading_samples = 512;
};

namespace detail {

[[nodiscard]] inline std::string svg_num(double x) {
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.6f", x);
    return std::string(buf.data());
}

struct SvgBounds {
    double min_x = inf, min_y = inf, max_x = -inf, max_y = -inf;
    void include(Point2 p) {
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
};

[[nodiscard]] inline std::string svg_polyline(const std::vector<Point2>& pts,
                                              const char* style) {
    std::string out = "  <polyline fill=\"none\" ";
    out += style;
    out += " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) out += ' ';
        out += svg_num(pts[i].x);
        out += ',';
        out += svg_num(pts[i].y);
    }
    out += "\"/>\n";
    return out;
}

[[nodiscard]] inline std::string svg_leash(Point2 from, Point2 to, bool dashed) {
    std::string out = "  <line class=\"";
    out += dashed ? "leash-stop" : "leash-start";
    out += "\" x1=\"" + svg_num(from.x) + "\" y1=\"" + svg_num(from.y) + "\" x2=\"" +
           svg_num(to.x) + "\" y2=\"" + svg_num(to.y) + "\" stroke=\"#555555\"";
    if (dashed) out += " stroke-dasharray=\"4 3\"";
    out += " stroke-width=\"1.2\"/>\n";
    return out;
}

[[nodiscard]] inline std::string svg_marker(Point2 at, const char* cls, const char* color) {
    std::string out = "  <circle class=\"";
    out += cls;
    out += "\" cx=\"" + svg_num(at.x) + "\" cy=\"" + svg_num(at.y) +
           "\" r=\"2.5\" fill=\"";
    out += color;
    out += "\"/>\n";
    return out;
}

} // namespace detail

/// Render the leading curve and its trace. Geometry lives in y-up logical
/// coordinates under a single flip transform at the root group; leash vectors
/// are drawn solid at the start and dashed at the stop, with markers at
/// push-pull switches and at leading-curve corners.
[[nodiscard]] inline std::string write_svg(const LeadingCurve& curve, const Trace& trace,
                                           const SvgOptions& opts = {}) {
    detail::require(!trace.samples.empty(), "trace has no samples");
    const double l_lo = trace.samples.front().l;
    const double l_hi = trace.samples.back().l;

    std::vector<Point2> lead;
    lead.reserve(opts.leading_samples);
    for (std::size_t i = 0; i < opts.leading_samples; ++i) {
        const double l =
            l_lo + (l_hi - l_lo) * static_cast<double>(i) /
                       static_cast<double>(opts.leading_samples - 1);
        lead.push_back(curve.at(l).position);
    }
    std::vector<Point2> path;
    path.reserve(trace.samples.size());
    for (const TraceSample& sample : trace.samples) path.push_back(sample.pose.position);

    detail::SvgBounds box;
    for (const Point2 p : lead) box.include(p);
    for (const Point2 p : path) box.include(p);

    const double span_x = std::max(box.max_x - box.min_x, 1e-9);
    const double span_y = std::max(box.max_y - box.min_y, 1e-9);
    const double scale = std::min((opts.width - 2.0 * opts.margin) / span_x,
                                  (opts.height - 2.0 * opts.margin) / span_y);
    const double off_x = opts.margin - scale * box.min_x +
                         0.5 * ((opts.width - 2.0 * opts.margin) - scale * span_x);
    const double off_y = opts.margin - scale * box.min_y +
                         0.5 * ((opts.height - 2.0 * opts.margin) - scale * span_y);

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::svg_num(opts.width) +
           "\" height=\"" + detail::svg_num(opts.height) + "\" viewBox=\"0 0 " +
           detail::svg_num(opts.width) + " " + detail::svg_num(opts.height) + "\">\n";
    // Single y-flip at the root keeps all drawn geometry in y-up coordinates.
    out += "<g transform=\"translate(" + detail::svg_num(off_x) + " " +
           detail::svg_num(opts.height - off_y) + ") scale(" + detail::svg_num(scale) + " " +
           detail::svg_num(-scale) + ")\">\n";

    auto scaled_width = [&](double px) { return detail::svg_num(px / scale); };

    std::string lead_style = "class=\"leading\" stroke=\"#1f6fb2\" stroke-width=\"" +
                             scaled_width(1.4) + "\"";
    std::string trace_style = "class=\"trace\" stroke=\"#c23b22\" stroke-width=\"" +
                              scaled_width(1.8) + "\"";
    out += detail::svg_polyline(lead, lead_style.c_str());
    out += detail::svg_polyline(path, trace_style.c_str());

    const TraceSample& first = trace.samples.front();
    const TraceSample& last = trace.samples.back();
    out += detail::svg_leash(first.pose.position, curve.at(first.l).position, false);
    out += detail::svg_leash(last.pose.position, curve.at(last.l).position, true);

    for (const ModeSwitch& sw : trace.mode_switches)
        out += detail::svg_marker(trace.samples[sw.sample_index].pose.position,
                                  sw.kind == ModeSwitchKind::StopSlack ? "slack-marker"
                                                                       : "cusp-marker",
                                  "#7a2ea0");
    for (const Corner& corner : curve.corners)
        if (corner.turn != 0.0 && corner.l >= l_lo && corner.l <= l_hi)
            out += detail::svg_marker(curve.at(corner.l).position, "corner-marker", "#2a7a2a");

    out += "</g>\n</svg>\n";
    return out;
}

// ---- polyline vertex file ----

/// Vertices, one "x y" pair per line; blank lines and # comments are skipped.
[[nodiscard]] inline std::vector<Point2> parse_polyline(std::string_view text) {
    std::vector<Point2> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        std::vector<std::string_view> fields;
        while (!line.empty()) {
            const std::size_t start = line.find_first_not_of(" \t\r");
            if (start == std::string_view::npos) break;
            line.remove_prefix(start);
            if (line.front() == '#') break;
            const std::size_t end = line.find_first_of(" \t\r");
            fields.push_back(line.substr(0, end));
            line.remove_prefix(end == std::string_view::npos ? line.size() : end);
        }
        if (fields.empty()) continue;
        detail::require(fields.size() == 2, "polyline line is not an x y pair");
        out.push_back({parse_double(fields[0]), parse_double(fields[1])});
    }
    return out;
}

// ---- flat key=value config ----

[[nodiscard]] inline std::map<std::string, std::string> parse_config(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t pos = 0;
    auto trim = [](std::string_view sv) {
        while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
        while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t' || sv.back() == '\r'))
            sv.remove_suffix(1);
        return sv;
    };
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        const std::string_view raw =
            text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const std::size_t eq = line.find('=');
        detail::require(eq != std::string_view::npos, "config line is not key=value");
        const std::string key{trim(line.substr(0, eq))};
        detail::require(!key.empty(), "config line has an empty key");
        out[key] = std::string{trim(line.substr(eq + 1))};
    }
    return out;
}

} // namespace tractrix
