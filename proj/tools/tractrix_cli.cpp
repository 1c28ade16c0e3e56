// =============================================================================
// Command line front end: classify shapes, trace curves to CSV/SVG/JSON,
// emit the asymptotic-circle pencil, search periodic pulls, run verification
// suites, and regenerate the figure gallery.
// Exit codes: 0 success, 1 verification/search failure, 2 usage or domain
// error.
// =============================================================================

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tractrix/circle_family.hpp"
#include "tractrix/curves.hpp"
#include "tractrix/geometry.hpp"
#include "tractrix/io.hpp"
#include "tractrix/ode_engine.hpp"
#include "tractrix/periodic.hpp"
#include "tractrix/verify.hpp"

namespace {

using namespace tractrix;

[[nodiscard]] std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << content;
}

// ---- job assembly: config file first, flags override ----

struct JobSpec {
    std::string curve;
    std::optional<double> w;
    std::optional<double> K;
    std::optional<double> nu0;
    std::optional<double> s_end;
    std::optional<double> l_end;
    double T = 1.0;
    std::string mode = "pull";
    std::size_t samples = 0;
    std::string format = "csv";
    std::string out;
    bool allow_weak = false;
};

void apply_config(JobSpec& spec, const std::string& path) {
    const auto cfg = parse_config(read_file(path));
    const auto number = [&](const char* key) -> std::optional<double> {
        const auto it = cfg.find(key);
        if (it == cfg.end()) return std::nullopt;
        return parse_double(it->second);
    };
    const auto text = [&](const char* key, std::string& into) {
        const auto it = cfg.find(key);
        if (it != cfg.end()) into = it->second;
    };
    text("curve", spec.curve);
    if (const auto v = number("w")) spec.w = v;
    if (const auto v = number("K")) spec.K = v;
    if (const auto v = number("nu0")) spec.nu0 = v;
    if (const auto v = number("s_end")) spec.s_end = v;
    if (const auto v = number("l_end")) spec.l_end = v;
    if (const auto v = number("T")) spec.T = *v;
    if (const auto v = number("samples")) spec.samples = static_cast<std::size_t>(*v);
    text("mode", spec.mode);
    text("format", spec.format);
    text("out", spec.out);
    for (const auto& [key, value] : cfg) {
        static const std::vector<std::string> known = {
            "curve", "w", "K", "nu0", "s_end", "l_end", "T", "samples", "mode", "format", "out"};
        detail::require(std::find(known.begin(), known.end(), key) != known.end(),
                        "unknown config key: " + key);
        (void)value;
    }
}

/// A leading curve plus, when the job is a circle-family shape, its params.
struct BuiltCurve {
    LeadingCurve curve;
    std::optional<ShapeParams> family;
    std::string label;
};

[[nodiscard]] std::vector<double> parse_params(std::string_view text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        out.push_back(parse_double(
            text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

[[nodiscard]] BuiltCurve build_curve(const JobSpec& spec) {
    if (spec.curve.empty()) {
        detail::require(spec.w.has_value(),
                        "need either --curve or a family shape via --w");
        const ShapeParams p = ShapeParams::from_w(*spec.w, spec.T);
        return {leading_curve_of(p), p, std::string{class_label(classify(p))}};
    }

    if (std::filesystem::exists(spec.curve)) {
        const std::vector<Point2> pts = parse_polyline(read_file(spec.curve));
        return {resample_polyline(pts), std::nullopt, "polyline " + spec.curve};
    }

    const std::size_t colon = spec.curve.find(':');
    const std::string name = spec.curve.substr(0, colon);
    std::vector<double> par;
    if (colon != std::string::npos) par = parse_params(spec.curve.substr(colon + 1));
    const auto arg = [&](std::size_t i, double fallback) {
        return i < par.size() ? par[i] : fallback;
    };

    if (name == "circle") {
        double K = 0.0;
        if (!par.empty())
            K = par[0];
        else if (spec.K)
            K = *spec.K;
        else if (spec.w)
            K = *spec.w / spec.T;
        else
            throw std::invalid_argument("circle needs a curvature: circle:K, --K, or --w");
        detail::require(K != 0.0, "a circle needs nonzero curvature; use line instead");
        std::optional<ShapeParams> family;
        if (spec.T > 0.0 ? K * spec.T > -1.0 : K * spec.T < -1.0)
            family = ShapeParams::from_curvature(K, spec.T);
        return {circle_curve(K), family, "circle K=" + format_double(K)};
    }
    if (name == "line") {
        const ShapeParams p = ShapeParams::from_w(0.0, spec.T);
        return {line_curve(), p, "line"};
    }
    detail::require(!spec.K && !spec.w, "--K/--w only apply to circle-family jobs");
    if (name == "ellipse") return {ellipse_curve(arg(0, 2.0), arg(1, 1.0)), {}, spec.curve};
    if (name == "sinusoid")
        return {sinusoid_curve(arg(0, 1.0), arg(1, 2.0 * pi)), {}, spec.curve};
    if (name == "lemniscate") return {lemniscate_curve(arg(0, 1.0)), {}, spec.curve};
    if (name == "spiral" || name == "archimedean-spiral") {
        detail::require(!par.empty(), "spiral needs a pitch: spiral:R[,t0,t1]");
        return {archimedean_spiral_curve(par[0], arg(1, -3.0), arg(2, 3.0)), {}, spec.curve};
    }
    if (name == "parabola-line")
        return {parabola_line_curve(arg(0, 2.0), arg(1, 4.0)), {}, spec.curve};
    throw std::invalid_argument("unknown curve: " + name);
}

// ---- trace ----

[[nodiscard]] TraceTable subsample(TraceTable table, std::size_t n) {
    if (n < 2 || table.rows.size() <= n) return table;
    std::vector<std::array<double, 7>> rows;
    rows.reserve(n);
    const std::size_t last = table.rows.size() - 1;
    std::size_t prev = table.rows.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t pick = (i * last) / (n - 1);
        if (pick != prev) rows.push_back(table.rows[pick]);
        prev = pick;
    }
    table.rows = std::move(rows);
    return table;
}

[[nodiscard]] const char* termination_text(Termination t) {
    if (t == Termination::Stopped) return "stopped";
    if (t == Termination::Closed) return "closed";
    return "reached_length";
}

int cmd_trace(const JobSpec& spec) {
    detail::require(spec.samples == 0 || spec.samples >= 2,
                    "sample budget must be at least 2");
    detail::require(spec.mode == "pull" || spec.mode == "pushpull",
                    "mode must be pull or pushpull");
    detail::require(spec.format == "csv" || spec.format == "svg" || spec.format == "json",
                    "format must be csv, svg, or json");

    const BuiltCurve built = build_curve(spec);
    IntegratorConfig cfg;
    cfg.nu0 = spec.nu0.value_or(-pi / 2.0);
    cfg.mode = spec.mode == "pushpull" ? TraceMode::PushPull : TraceMode::PullOnly;
    if (spec.s_end) cfg.max_trace_arc = *spec.s_end;
    if (spec.l_end) cfg.max_leading_arc = *spec.l_end;
    if (!spec.s_end && !spec.l_end) {
        const bool stops_on_its_own = built.family && spec.mode == "pull" &&
                                      std::isfinite(stop_arc(*built.family));
        if (!stops_on_its_own) cfg.max_trace_arc = 10.0;
    }

    const Trace trace = trace_curve(built.curve, spec.T, cfg);

    std::vector<std::string> metadata;
    if (built.family) {
        const ShapeParams p = *built.family;
        metadata.push_back("class " + std::string{class_label(classify(p))});
        metadata.push_back("w " + format_double(p.w));
        metadata.push_back("T " + format_double(p.T));
        metadata.push_back("S1 " + format_double(stop_arc(p)));
        const auto s0 = inflection_arc(p);
        metadata.push_back("s0 " + (s0 ? format_double(*s0) : std::string{"none"}));
    } else {
        metadata.push_back("curve " + built.label);
        metadata.push_back("T " + format_double(spec.T));
    }
    metadata.push_back("mode " + spec.mode);
    metadata.emplace_back(std::string{"termination "} + termination_text(trace.termination));

    if (spec.format == "csv") {
        write_output(spec.out, write_csv(subsample(to_table(trace, metadata), spec.samples)));
    } else if (spec.format == "json") {
        nlohmann::json doc = trace_json(trace);
        doc["metadata"] = metadata;
        write_output(spec.out, doc.dump(2) + "\n");
    } else {
        write_output(spec.out, write_svg(built.curve, trace));
    }
    return 0;
}

// ---- classify ----

int cmd_classify(double w, double T) {
    const ShapeParams p = ShapeParams::from_w(w, T);
    std::string out{class_label(classify(p))};
    if (p.w != 0.0) {
        out += ", S1=" + format_double(stop_arc(p));
        if (const auto s0 = inflection_arc(p)) out += ", s0=" + format_double(*s0);
    }
    std::cout << out << "\n";
    return 0;
}

// ---- pencil ----

/// Circles every unbounded trace of leash T converges on (one per shape w in
/// (-1, 1)) plus the orthogonal family through the two foci.
struct PencilMembers {
    std::vector<std::pair<double, ImplicitCircle>> asymptotic; // keyed by w
    std::vector<std::pair<double, ImplicitCircle>> orthogonal; // keyed by center height
};

[[nodiscard]] PencilMembers build_pencil(double T, int count) {
    detail::require(T > 0.0, "pencil needs a positive leash");
    detail::require(count >= 3, "pencil needs at least 3 members per family");
    PencilMembers m;
    for (int i = 0; i < count; ++i) {
        const double w = -1.0 + 2.0 * (i + 1) / (count + 1);
        m.asymptotic.emplace_back(w, pencil_asymptotic_circle(w, T));
    }
    for (int i = 0; i < count; ++i) {
        // Heights fan out by equal angles seen from a focus.
        const double angle = (-0.5 + static_cast<double>(i + 1) / (count + 1)) * pi;
        const double h = T * std::tan(angle);
        m.orthogonal.emplace_back(h, ImplicitCircle{1.0, 0.0, -2.0 * h, -T * T});
    }
    return m;
}

[[nodiscard]] std::string pencil_csv(const PencilMembers& m) {
    std::string out = "family,param,a,b,c,d\n";
    const auto row = [&out](const char* family, double key, const ImplicitCircle& c) {
        out += family;
        out += ',' + format_double(key) + ',' + format_double(c.a) + ',' + format_double(c.b) +
               ',' + format_double(c.c) + ',' + format_double(c.d) + '\n';
    };
    for (const auto& [w, c] : m.asymptotic) row("asymptotic", w, c);
    for (const auto& [h, c] : m.orthogonal) row("orthogonal", h, c);
    return out;
}

[[nodiscard]] nlohmann::json pencil_json(double T, const PencilMembers& m) {
    const auto circle_json = [](double key, const ImplicitCircle& c) {
        nlohmann::json j{{"param", key},
                         {"a", c.a},
                         {"b", c.b},
                         {"c", c.c},
                         {"d", c.d},
                         {"line", c.is_line()}};
        if (!c.is_line()) {
            j["center"] = {c.center().x, c.center().y};
            j["radius"] = c.radius();
        }
        return j;
    };
    nlohmann::json a = nlohmann::json::array();
    for (const auto& [w, c] : m.asymptotic) a.push_back(circle_json(w, c));
    nlohmann::json b = nlohmann::json::array();
    for (const auto& [h, c] : m.orthogonal) b.push_back(circle_json(h, c));
    return {{"T", T},
            {"foci", {{T, 0.0}, {-T, 0.0}}},
            {"asymptotic", a},
            {"orthogonal", b}};
}

[[nodiscard]] std::string pencil_svg(double T, const PencilMembers& m) {
    // Viewport covers the asymptotic members and clips the tall orthogonal
    // ones; foci sit at (+-T, 0).
    double extent = 2.0 * T;
    for (const auto& [w, c] : m.asymptotic) {
        if (c.is_line()) continue;
        extent = std::max(extent, std::abs(c.center().x) + c.radius());
    }
    extent *= 1.1;
    const double size = 800.0;
    const double scale = size / (2.0 * extent);

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::svg_num(size) +
           "\" height=\"" + detail::svg_num(size) + "\" viewBox=\"0 0 " +
           detail::svg_num(size) + " " + detail::svg_num(size) + "\">\n";
    out += "<g transform=\"translate(" + detail::svg_num(size / 2.0) + " " +
           detail::svg_num(size / 2.0) + ") scale(" + detail::svg_num(scale) + " " +
           detail::svg_num(-scale) + ")\">\n";
    const std::string thin = detail::svg_num(1.2 / scale);

    const auto emit_member = [&](const ImplicitCircle& c, const char* cls, const char* color,
                                 bool dashed) {
        std::string style = std::string{"class=\""} + cls + "\" fill=\"none\" stroke=\"" +
                            color + "\" stroke-width=\"" + thin + "\"";
        if (dashed) style += " stroke-dasharray=\"" + thin + " " + thin + "\"";
        if (c.is_line()) {
            // Vertical line member through the radical axis.
            out += "  <line " + style + " x1=\"0.000000\" y1=\"" + detail::svg_num(-extent) +
                   "\" x2=\"0.000000\" y2=\"" + detail::svg_num(extent) + "\"/>\n";
            return;
        }
        out += "  <circle " + style + " cx=\"" + detail::svg_num(c.center().x) + "\" cy=\"" +
               detail::svg_num(c.center().y) + "\" r=\"" + detail::svg_num(c.radius()) +
               "\"/>\n";
    };
    for (const auto& [w, c] : m.asymptotic) emit_member(c, "asymptotic", "#1f6fb2", false);
    for (const auto& [h, c] : m.orthogonal) emit_member(c, "orthogonal", "#c23b22", true);
    for (const double sign : {1.0, -1.0})
        out += "  <circle class=\"focus\" cx=\"" + detail::svg_num(sign * T) +
               "\" cy=\"0.000000\" r=\"" + detail::svg_num(4.0 / scale) +
               "\" fill=\"#222222\"/>\n";
    out += "</g>\n</svg>\n";
    return out;
}

int cmd_pencil(double T, int count, const std::string& format, const std::string& out) {
    const PencilMembers m = build_pencil(T, count);
    if (format == "csv")
        write_output(out, pencil_csv(m));
    else if (format == "json")
        write_output(out, pencil_json(T, m).dump(2) + "\n");
    else if (format == "svg")
        write_output(out, pencil_svg(T, m));
    else
        throw std::invalid_argument("format must be csv, svg, or json");
    return 0;
}

// ---- periodic ----

int cmd_periodic(const JobSpec& spec) {
    const BuiltCurve built = build_curve(spec);
    PeriodicConfig pcfg;
    if (spec.l_end) pcfg.length = *spec.l_end;
    if (spec.nu0) pcfg.initial_nu = *spec.nu0;
    pcfg.allow_weak_contraction = spec.allow_weak;
    detail::require(built.curve.period.has_value() || pcfg.length > 0.0,
                    "periodic needs a closed curve or an explicit --l-end lap length");

    const PeriodicResult res = find_periodic(built.curve, spec.T, pcfg);

    Trace orbit;
    double closure = inf;
    if (res.converged) {
        IntegratorConfig icfg;
        icfg.nu0 = res.nu0;
        icfg.max_leading_arc = pcfg.length > 0.0 ? pcfg.length : *built.curve.period;
        orbit = trace_curve(built.curve, spec.T, icfg);
        closure = distance(orbit.samples.front().pose.position,
                           orbit.samples.back().pose.position);
    }

    if (spec.format == "csv" || spec.format == "svg") {
        detail::require(res.converged, "no orbit to emit: the search did not converge");
        if (spec.format == "svg") {
            write_output(spec.out, write_svg(built.curve, orbit));
        } else {
            std::vector<std::string> metadata{"curve " + built.label,
                                              "T " + format_double(spec.T),
                                              "nu_star " + format_double(res.nu0)};
            write_output(spec.out, write_csv(to_table(orbit, metadata)));
        }
    } else if (spec.format == "json" || spec.format.empty()) {
        nlohmann::json residuals = nlohmann::json::array();
        for (const double r : res.residuals) residuals.push_back(r);
        const nlohmann::json doc = {{"curve", built.label},
                                    {"T", spec.T},
                                    {"nu_star", res.nu0},
                                    {"converged", res.converged},
                                    {"stopped", res.stopped},
                                    {"iterations", res.iterations},
                                    {"residuals", residuals},
                                    {"closure", json_number(closure)}};
        write_output(spec.out, doc.dump(2) + "\n");
    } else {
        throw std::invalid_argument("format must be csv, svg, or json");
    }
    return res.converged ? 0 : 1;
}

// ---- verify ----

int cmd_verify(const std::string& suite, const std::string& out) {
    std::optional<double> override_bound;
    if (const char* env = std::getenv("TRACTRIX_TOL")) override_bound = parse_double(env);
    const Report report = run_suite(suite, override_bound);
    write_output(out, report_json(report).dump(2) + "\n");
    return report.all_pass() ? 0 : 1;
}

// ---- figure ----

int cmd_figure(const std::string& name, std::string prefix) {
    detail::require(name == "fig9", "unknown figure: " + name);
    if (prefix.empty()) prefix = "fig9";
    const std::array<double, 5> ws = {3.0, 1.0, 0.5, 0.0, -0.5};
    for (std::size_t i = 0; i < ws.size(); ++i) {
        const ShapeParams p = ShapeParams::from_w(ws[i], 1.0);
        IntegratorConfig cfg;
        if (!std::isfinite(stop_arc(p))) cfg.max_trace_arc = 6.0;
        const Trace trace = trace_curve(leading_curve_of(p), p.T, cfg);
        const std::string path = prefix + "_T" + std::to_string(i + 1) + ".svg";
        write_output(path, write_svg(leading_curve_of(p), trace));
        std::cout << path << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tractrix traces of planar curves"};
    app.require_subcommand(1);

    JobSpec spec;
    std::string config_path;
    double classify_w = 0.0;
    double classify_T = 1.0;
    double pencil_T = 1.0;
    int pencil_count = 9;
    std::string pencil_format = "svg";
    std::string pencil_out;
    std::string verify_suite = "all";
    std::string verify_out;
    std::string figure_name;
    std::string figure_out;

    // Shared job flags, attached to both trace and periodic.
    const auto add_job_flags = [&](CLI::App* sub) {
        sub->add_option("--curve", spec.curve,
                        "curve name (circle[:K], line, ellipse[:a,b], sinusoid[:amp,len], "
                        "lemniscate[:a], spiral:R[,t0,t1], parabola-line[:approach,run]) "
                        "or a polyline file of x y lines");
        sub->add_option("--config", config_path, "flat key=value job file; flags override");
        sub->add_option("--w", spec.w, "family shape parameter (leading curvature times T)");
        sub->add_option("--K", spec.K, "leading circle curvature");
        sub->add_option("--T", spec.T, "leash length, negative starts in push");
        sub->add_option("--nu0", spec.nu0, "starting pull angle, default -pi/2");
        sub->add_option("--samples", spec.samples, "CSV row budget (0 = every step)");
        sub->add_option("--s-end", spec.s_end, "stop after this much trace arc");
        sub->add_option("--l-end", spec.l_end, "stop after this much leading arc");
        sub->add_option("--format", spec.format, "csv, svg, or json");
        sub->add_option("--out", spec.out, "output path, default stdout");
    };

    CLI::App* classify =
        app.add_subcommand("classify", "name the shape of a circle-family tractrix");
    classify->add_option("--w", classify_w, "shape parameter")->required();
    classify->add_option("--T", classify_T, "leash length");

    CLI::App* trace = app.add_subcommand("trace", "trace a curve and emit samples");
    add_job_flags(trace);
    trace->add_option("--mode", spec.mode, "pull or pushpull")
        ->check(CLI::IsMember({"pull", "pushpull"}));

    CLI::App* pencil =
        app.add_subcommand("pencil", "asymptotic circles and their orthogonal family");
    pencil->add_option("--T", pencil_T, "leash length");
    pencil->add_option("--count", pencil_count, "members per family");
    pencil->add_option("--format", pencil_format, "csv, svg, or json");
    pencil->add_option("--out", pencil_out, "output path, default stdout");

    CLI::App* periodic =
        app.add_subcommand("periodic", "find the closed pull around a closed curve");
    add_job_flags(periodic);
    periodic->get_option("--format")->default_str("json");
    periodic->add_flag("--allow-weak", spec.allow_weak,
                       "try even when the contraction bound fails");

    CLI::App* verify = app.add_subcommand("verify", "run a named verification suite");
    verify->add_option("suite", verify_suite, "oracle, errata, pencil, inversion, periodic, all");
    verify->add_option("--out", verify_out, "report path, default stdout");

    CLI::App* figure = app.add_subcommand("figure", "regenerate a figure set");
    figure->add_option("name", figure_name, "figure name (fig9)")->required();
    figure->add_option("--out", figure_out, "filename prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(trace) || app.got_subcommand(periodic)) {
            // Rebuild the job with config values underneath explicit flags.
            const CLI::App* sub = app.got_subcommand(trace) ? trace : periodic;
            if (!config_path.empty()) {
                JobSpec flags = spec;
                spec = JobSpec{};
                if (sub == periodic) spec.format = "json";
                apply_config(spec, config_path);
                if (sub->count("--curve")) spec.curve = flags.curve;
                if (sub->count("--w")) spec.w = flags.w;
                if (sub->count("--K")) spec.K = flags.K;
                if (sub->count("--T")) spec.T = flags.T;
                if (sub->count("--nu0")) spec.nu0 = flags.nu0;
                if (sub->count("--samples")) spec.samples = flags.samples;
                if (sub->count("--s-end")) spec.s_end = flags.s_end;
                if (sub->count("--l-end")) spec.l_end = flags.l_end;
                if (sub->count("--format")) spec.format = flags.format;
                if (sub->count("--out")) spec.out = flags.out;
                if (sub == trace && sub->count("--mode")) spec.mode = flags.mode;
                if (sub == periodic && sub->count("--allow-weak"))
                    spec.allow_weak = flags.allow_weak;
            } else if (sub == periodic && !sub->count("--format")) {
                spec.format = "json";
            }
            return sub == trace ? cmd_trace(spec) : cmd_periodic(spec);
        }
        if (app.got_subcommand(classify)) return cmd_classify(classify_w, classify_T);
        if (app.got_subcommand(pencil))
            return cmd_pencil(pencil_T, pencil_count, pencil_format, pencil_out);
        if (app.got_subcommand(verify)) return cmd_verify(verify_suite, verify_out);
        if (app.got_subcommand(figure)) return cmd_figure(figure_name, figure_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
