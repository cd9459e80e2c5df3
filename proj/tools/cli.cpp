#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "awg/attention.hpp"
#include "awg/denoise.hpp"
#include "awg/error.hpp"
#include "awg/event_io.hpp"
#include "awg/graph_build.hpp"
#include "awg/parallel.hpp"
#include "awg/pipeline.hpp"
#include "awg/segmentation.hpp"
#include "awg/synth.hpp"

namespace awg::cli {
namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flags shared by every subcommand; they may appear before or after the subcommand name
// and may also come from a --config file (flags win).
struct GlobalOptions {
    SegmentationConfig segmentation;
    std::string preset = "comb3";
    std::optional<double> alpha, beta, gamma, delta;
    bool no_normalize = false;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string report;
};

PipelineConfig pipeline_config(const GlobalOptions& g) {
    PipelineConfig config;
    config.segmentation = g.segmentation;
    try {
        config.segmentation.validate();
        config.weights = weight_preset(g.preset);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    config.preset = g.preset;
    const auto override_with = [&](const std::optional<double>& v, double& slot) {
        if (v) {
            slot = *v;
            config.preset.clear();
        }
    };
    override_with(g.alpha, config.weights.alpha);
    override_with(g.beta, config.weights.beta);
    override_with(g.gamma, config.weights.gamma);
    override_with(g.delta, config.weights.delta);
    config.weights.normalize_factors = !g.no_normalize;
    try {
        config.weights.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    config.seed = g.seed;
    config.threads = g.threads;
    config.report_path = g.report;
    return config;
}

EventStream load_events(const std::string& path) {
    auto stream = parse_event_csv(read_text_file(path));
    if (stream.empty()) throw UsageError("input '" + path + "' contains no events");
    return stream;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
    } else {
        write_text_file(path, content);
    }
}

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const Voxel& select_voxel(const std::vector<Voxel>& voxels, std::size_t window, std::size_t voxel) {
    const auto it = std::find_if(voxels.begin(), voxels.end(), [&](const Voxel& v) {
        return v.window_index == window && v.voxel_index == voxel;
    });
    if (it == voxels.end()) {
        throw UsageError("no voxel (" + std::to_string(window) + ", " + std::to_string(voxel) + ") in this input");
    }
    return *it;
}

std::string index_lines(const std::vector<std::size_t>& indices) {
    std::string out;
    for (auto k : indices) out += std::to_string(k) + '\n';
    return out;
}

std::vector<std::size_t> parse_index_lines(const std::string& text) {
    std::vector<std::size_t> out;
    std::size_t line_no = 0, pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return c == '\r' || c == ' '; }), line.end());
        if (line.empty()) continue;
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(line, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != line.size()) throw ParseError(line_no, "expected a non-negative integer index");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

// Matches each denoised event to an unused input event with identical fields, earliest first.
std::vector<std::size_t> match_kept(const EventStream& input, const EventStream& denoised) {
    std::map<std::tuple<std::int32_t, std::int32_t, std::int64_t, int>, std::vector<std::size_t>> pool;
    for (std::size_t k = input.size(); k-- > 0;) {
        const auto& e = input.events[k];
        pool[{e.x, e.y, e.t, e.p}].push_back(k);
    }
    std::vector<std::size_t> kept;
    for (const auto& e : denoised.events) {
        auto it = pool.find({e.x, e.y, e.t, e.p});
        if (it == pool.end() || it->second.empty()) {
            throw DomainError("denoised event (" + std::to_string(e.x) + "," + std::to_string(e.y) + "," +
                              std::to_string(e.t) + ") is not present in the input");
        }
        kept.push_back(it->second.back());
        it->second.pop_back();
    }
    return kept;
}

json metrics_json(const DenoiseMetrics& m) {
    return {{"precision", m.precision},
            {"recall", m.recall},
            {"noise_removed_fraction", m.noise_removed_fraction},
            {"input_noise_fraction", m.input_noise_fraction},
            {"output_noise_fraction", m.output_noise_fraction},
            {"true_positive", m.true_positive},
            {"false_positive", m.false_positive},
            {"false_negative", m.false_negative},
            {"true_negative", m.true_negative}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adaptive weighted-graph denoising and attention aggregation for event-camera streams", "awg"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value config file; command-line flags take precedence");

    GlobalOptions g;
    app.add_option("--n-min", g.segmentation.n_min, "Minimum events per window")->capture_default_str();
    app.add_option("--c-scale", g.segmentation.c_scale, "Density-to-window-capacity scale")->capture_default_str();
    app.add_option("--min-vox", g.segmentation.n_min_vox, "Lower clamp on voxels per window")->capture_default_str();
    app.add_option("--max-vox", g.segmentation.n_max_vox, "Upper clamp on voxels per window")->capture_default_str();
    app.add_option("--preset", g.preset, "Edge-weight preset")
        ->check(CLI::IsMember({"comb1", "comb2", "comb3", "comb4"}))
        ->capture_default_str();
    app.add_option("--alpha", g.alpha, "Distance coefficient (overrides the preset)");
    app.add_option("--beta", g.beta, "Speed-difference coefficient (overrides the preset)");
    app.add_option("--gamma", g.gamma, "Angle coefficient (overrides the preset)");
    app.add_option("--delta", g.delta, "Polarity-mismatch coefficient (overrides the preset)");
    app.add_flag("--no-normalize-factors", g.no_normalize, "Use raw factor units in the edge weight");
    app.add_option("--seed", g.seed, "Seed for synthetic scenes and generated attention parameters")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (<= 0: OpenMP default)")->capture_default_str();
    app.add_option("--report", g.report, "Path of the JSON report");
    app.fallthrough();

    // segment
    std::string seg_input, seg_output;
    auto* seg = app.add_subcommand("segment", "Dump the voxel segmentation as JSON lines");
    seg->add_option("-i,--input", seg_input, "Event CSV")->required();
    seg->add_option("-o,--output", seg_output, "Output path (default stdout)");

    // denoise
    std::string dn_input, dn_output, dn_kept;
    auto* dn = app.add_subcommand("denoise", "Run the full denoising pipeline");
    dn->add_option("-i,--input", dn_input, "Event CSV")->required();
    dn->add_option("-o,--output", dn_output, "Denoised event CSV (default stdout)");
    dn->add_option("--kept-index", dn_kept, "Also write the input line indices of kept events");

    // synth
    SynthConfig sc;
    std::string sy_output, sy_labels, sy_object = "moving_bar";
    auto* sy = app.add_subcommand("synth", "Generate a labeled synthetic scene");
    sy->add_option("-o,--output", sy_output, "Event CSV")->required();
    sy->add_option("--labels", sy_labels, "Label sidecar (one 0/1 per line, 1 = signal)")->required();
    sy->add_option("--width", sc.width)->capture_default_str();
    sy->add_option("--height", sc.height)->capture_default_str();
    sy->add_option("--duration", sc.duration, "Microseconds")->capture_default_str();
    sy->add_option("--signal-rate", sc.signal_rate, "Signal events per microsecond")->capture_default_str();
    sy->add_option("--noise-fraction", sc.noise_fraction)->capture_default_str();
    sy->add_option("--object", sy_object)
        ->check(CLI::IsMember({"moving_bar", "moving_disc", "bar", "disc"}))
        ->capture_default_str();
    sy->add_option("--vx", sc.vx, "Pixels per microsecond")->capture_default_str();
    sy->add_option("--vy", sc.vy, "Pixels per microsecond")->capture_default_str();
    sy->add_option("--object-size", sc.object_size)->capture_default_str();
    sy->add_option("--bar-width", sc.bar_width)->capture_default_str();

    // eval
    std::string ev_input, ev_labels, ev_denoised, ev_kept;
    auto* ev = app.add_subcommand("eval", "Score a denoising result against ground-truth labels");
    ev->add_option("-i,--input", ev_input, "Original event CSV")->required();
    ev->add_option("--labels", ev_labels, "Label sidecar")->required();
    auto* ev_den_opt = ev->add_option("--denoised", ev_denoised, "Denoised event CSV");
    auto* ev_kept_opt = ev->add_option("--kept-index", ev_kept, "Kept-index file written by denoise");
    ev_den_opt->excludes(ev_kept_opt);

    // stats
    std::string st_input, st_dump;
    std::size_t st_window = 0, st_voxel = 0;
    auto* st = app.add_subcommand("stats", "Graph and weight diagnostics for one voxel");
    st->add_option("-i,--input", st_input, "Event CSV")->required();
    st->add_option("--window", st_window)->capture_default_str();
    st->add_option("--voxel", st_voxel)->capture_default_str();
    st->add_option("--dump-graph", st_dump, "Write the voxel's candidate edge list");

    // attend
    std::string at_input, at_output, at_params;
    std::size_t at_window = 0, at_voxel = 0, at_dout = 4;
    auto* at = app.add_subcommand("attend", "Attention forward pass over one denoised voxel");
    at->add_option("-i,--input", at_input, "Event CSV")->required();
    at->add_option("--window", at_window)->capture_default_str();
    at->add_option("--voxel", at_voxel)->capture_default_str();
    at->add_option("--params", at_params, "Attention parameter JSON (default: generated from --seed)");
    at->add_option("--d-out", at_dout, "Output width when parameters are generated")->capture_default_str();
    at->add_option("-o,--output", at_output, "Feature CSV (default stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const auto config = pipeline_config(g);

        if (seg->parsed()) {
            const auto stream = load_events(seg_input);
            const auto voxels = parallel::segment(stream, config.segmentation, config.threads);
            std::string text;
            for (const auto& v : voxels) {
                json events = json::array();
                for (const auto& e : v.events.events) events.push_back({e.x, e.y, e.t, static_cast<int>(e.p)});
                json line = {{"window_index", v.window_index},
                             {"voxel_index", v.voxel_index},
                             {"t_lo", v.t_lo},
                             {"t_hi", v.t_hi},
                             {"events", std::move(events)}};
                text += line.dump() + '\n';
            }
            emit(seg_output, text, out);
        } else if (dn->parsed()) {
            const auto stream = load_events(dn_input);
            const auto result = run_pipeline(stream, config);
            emit(dn_output, write_event_csv(result.denoised), out);
            if (!dn_kept.empty()) write_text_file(dn_kept, index_lines(result.kept_indices));
            const auto report = pipeline_report(result, config).dump(2) + '\n';
            if (!config.report_path.empty()) {
                write_text_file(config.report_path, report);
            }
            err << "events_in " << result.events_in << " kept " << result.kept_indices.size() << " removed "
                << result.removed_indices.size() << " windows " << result.windows << " voxels "
                << result.voxels.size() << '\n';
        } else if (sy->parsed()) {
            sc.object = parse_synth_object(sy_object);
            sc.seed = g.seed;
            try {
                sc.validate();
            } catch (const DomainError& e) {
                throw UsageError(e.what());
            }
            const auto scene = generate(sc);
            write_text_file(sy_output, write_event_csv(scene.stream));
            write_text_file(sy_labels, write_labels(scene.labels));
        } else if (ev->parsed()) {
            if (ev_denoised.empty() && ev_kept.empty()) throw UsageError("eval needs --denoised or --kept-index");
            LabeledEventStream labeled;
            labeled.stream = parse_event_csv(read_text_file(ev_input));
            labeled.labels = parse_labels(read_text_file(ev_labels));
            if (labeled.labels.size() != labeled.stream.size()) {
                throw UsageError("label file has " + std::to_string(labeled.labels.size()) + " entries for " +
                                 std::to_string(labeled.stream.size()) + " events");
            }
            const auto kept = ev_kept.empty()
                                  ? match_kept(labeled.stream, parse_event_csv(read_text_file(ev_denoised)))
                                  : parse_index_lines(read_text_file(ev_kept));
            const auto text = metrics_json(evaluate(labeled, kept)).dump(2) + '\n';
            out << text;
            if (!config.report_path.empty()) write_text_file(config.report_path, text);
        } else if (st->parsed()) {
            const auto stream = load_events(st_input);
            const auto voxels = parallel::segment(stream, config.segmentation, config.threads);
            const auto& voxel = select_voxel(voxels, st_window, st_voxel);
            const auto graph = build_graph(voxel, config.weights);
            const auto search = optimal_threshold(graph);
            const auto filtered = filter_graph(graph, search.t_opt);

            const double density = normalized_density(stream);
            json weights = {{"count", graph.edge_count()}};
            if (graph.edge_count() > 0) {
                double lo = graph.edges.front().w, hi = lo, sum = 0.0;
                for (const auto& e : graph.edges) {
                    lo = std::min(lo, e.w);
                    hi = std::max(hi, e.w);
                    sum += e.w;
                }
                weights["min"] = lo;
                weights["max"] = hi;
                weights["mean"] = sum / static_cast<double>(graph.edge_count());
            }
            json factors = nullptr;
            if (voxel.size() >= 2) {
                double d = 0, dv = 0, th = 0, pol = 0;
                const auto& ev_ = voxel.events.events;
                const auto vel = reference_velocities(ev_);
                for (NodeId i = 0; i < ev_.size(); ++i) {
                    for (NodeId j = i + 1; j < ev_.size(); ++j) {
                        const auto dx = static_cast<double>(ev_[j].x - ev_[i].x);
                        const auto dy = static_cast<double>(ev_[j].y - ev_[i].y);
                        const auto dt = static_cast<double>(ev_[j].t - ev_[i].t);
                        d += std::sqrt(dx * dx + dy * dy + dt * dt);
                        dv += std::abs(vel[i].magnitude() - vel[j].magnitude());
                        th += angular_difference(vel[i], vel[j]);
                        pol += polarity_consistency(ev_[i].p, ev_[j].p);
                    }
                }
                const auto pairs = static_cast<double>(graph.edge_count());
                factors = {{"mean_d", d / pairs}, {"mean_dv", dv / pairs}, {"mean_theta", th / pairs}, {"mean_pol", pol / pairs}};
            }
            json curve = json::array();
            for (const auto& p : search.curve) curve.push_back({p.delta, p.variance});

            const auto capacity = window_capacity(density, config.segmentation);
            json report = {{"schema_version", kReportSchemaVersion},
                           {"config",
                            {{"segmentation", to_json(config.segmentation)}, {"weights", to_json(config.weights, config.preset)}}},
                           {"stream",
                            {{"events", stream.size()},
                             {"normalized_density", density},
                             {"window_capacity", capacity},
                             {"windows", window_count(stream.size(), capacity)},
                             {"voxels", voxels.size()}}},
                           {"voxel",
                            {{"window", voxel.window_index},
                             {"voxel", voxel.voxel_index},
                             {"t_lo", voxel.t_lo},
                             {"t_hi", voxel.t_hi},
                             {"n_nodes", voxel.size()},
                             {"weights", weights},
                             {"factors", factors},
                             {"mst_max", search.mst_max},
                             {"t_opt", search.t_opt},
                             {"n_edges_kept", filtered.graph.edge_count()},
                             {"n_removed", filtered.removed.size()},
                             {"curve", curve}}}};
            const auto text = report.dump(2) + '\n';
            out << text;
            if (!config.report_path.empty()) write_text_file(config.report_path, text);

            if (!st_dump.empty()) {
                std::string dump = "nodes " + std::to_string(graph.node_count()) + " edges " +
                                   std::to_string(graph.edge_count()) + '\n';
                for (const auto& e : graph.edges) {
                    dump += std::to_string(e.i) + ' ' + std::to_string(e.j) + ' ' + format_real(e.w) + '\n';
                }
                write_text_file(st_dump, dump);
            }
        } else if (at->parsed()) {
            const auto stream = load_events(at_input);
            const auto voxels = parallel::segment(stream, config.segmentation, config.threads);
            const auto& voxel = select_voxel(voxels, at_window, at_voxel);
            const auto denoised = denoise_voxel(voxel, config.weights);
            const auto params = at_params.empty() ? AttentionParams::random(4, at_dout, g.seed)
                                                  : load_attention_params(at_params);
            if (params.d_in() != 4) throw UsageError("attention parameters must have d_in = 4 for (x, y, t, p) features");
            const auto feats = event_features(voxel.events.events);
            const auto result = parallel::layer_forward(denoised.graph, feats, params, config.threads);

            std::vector<bool> kept(voxel.size(), false);
            for (auto k : denoised.kept) kept[k] = true;
            std::string text = "node,kept";
            for (std::size_t c = 0; c < params.d_out(); ++c) text += ",f" + std::to_string(c);
            text += '\n';
            for (std::size_t i = 0; i < result.size(); ++i) {
                text += std::to_string(i) + ',' + (kept[i] ? "1" : "0");
                for (Eigen::Index c = 0; c < result.features[i].size(); ++c) text += ',' + format_real(result.features[i](c));
                text += '\n';
            }
            emit(at_output, text, out);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace awg::cli
