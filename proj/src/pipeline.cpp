#include "awg/pipeline.hpp"

#include <algorithm>

#include "awg/denoise.hpp"
#include "awg/error.hpp"
#include "awg/parallel.hpp"

namespace awg {

PipelineResult run_pipeline(const EventStream& input, const PipelineConfig& config) {
    if (input.empty()) throw DomainError("pipeline: input stream is empty");
    config.segmentation.validate();
    config.weights.validate();

    const auto voxels = parallel::segment(input, config.segmentation, config.threads);
    const auto denoised = parallel::denoise_voxels(voxels, config.weights, config.threads);

    PipelineResult result;
    result.events_in = input.size();
    result.voxels.reserve(voxels.size());
    for (std::size_t k = 0; k < voxels.size(); ++k) {
        const auto& v = voxels[k];
        const auto& d = denoised[k];
        result.windows = std::max(result.windows, v.window_index + 1);
        result.voxels.push_back({v.window_index, v.voxel_index, v.size(), d.candidate_edges, d.graph.edge_count(),
                                 d.threshold.mst_max, d.threshold.t_opt, d.removed.size()});
        for (auto node : d.kept) result.kept_indices.push_back(v.source[node]);
        for (auto node : d.removed) result.removed_indices.push_back(v.source[node]);
    }

    const auto by_time = [&](std::size_t a, std::size_t b) {
        const auto ta = input.events[a].t, tb = input.events[b].t;
        return ta != tb ? ta < tb : a < b;
    };
    std::sort(result.kept_indices.begin(), result.kept_indices.end(), by_time);
    std::sort(result.removed_indices.begin(), result.removed_indices.end(), by_time);

    result.denoised.sorted_by_time = true;
    result.denoised.events.reserve(result.kept_indices.size());
    for (auto k : result.kept_indices) result.denoised.events.push_back(input.events[k]);
    return result;
}

nlohmann::json to_json(const SegmentationConfig& config) {
    return {{"n_min", config.n_min},
            {"c_scale", config.c_scale},
            {"n_min_vox", config.n_min_vox},
            {"n_max_vox", config.n_max_vox}};
}

nlohmann::json to_json(const WeightParams& params, const std::string& preset) {
    nlohmann::json j = {{"alpha", params.alpha},
                        {"beta", params.beta},
                        {"gamma", params.gamma},
                        {"delta", params.delta},
                        {"normalize_factors", params.normalize_factors}};
    j["preset"] = preset.empty() ? nlohmann::json(nullptr) : nlohmann::json(preset);
    return j;
}

nlohmann::json pipeline_report(const PipelineResult& result, const PipelineConfig& config) {
    nlohmann::json voxels = nlohmann::json::array();
    for (const auto& v : result.voxels) {
        voxels.push_back({{"window", v.window},
                          {"voxel", v.voxel},
                          {"n_nodes", v.n_nodes},
                          {"n_edges", v.n_edges},
                          {"n_edges_kept", v.n_edges_kept},
                          {"mst_max", v.mst_max},
                          {"t_opt", v.t_opt},
                          {"n_removed", v.n_removed}});
    }
    return {{"schema_version", kReportSchemaVersion},
            {"config", {{"segmentation", to_json(config.segmentation)}, {"weights", to_json(config.weights, config.preset)}}},
            {"counts",
             {{"events_in", result.events_in},
              {"kept", result.kept_indices.size()},
              {"removed", result.removed_indices.size()},
              {"windows", result.windows},
              {"voxels", result.voxels.size()}}},
            {"voxels", std::move(voxels)}};
}

}  // namespace awg
