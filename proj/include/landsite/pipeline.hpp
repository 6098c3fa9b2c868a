#pragma once

// End-to-end landing-site detection: per-frame costmaps, decision map, dense
// candidates, registry insertion, and on-demand clustering, with stage timing.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "landsite/costmaps.hpp"
#include "landsite/detection.hpp"
#include "landsite/geometry.hpp"
#include "landsite/registry.hpp"

namespace landsite {

struct PipelineConfig {
    std::string profile = "sim";
    FusionWeights weights;
    CannyThresholds canny;
    int smoothing_window_px = 3;
    FootprintParams footprint;
    double dedup_radius_m = 0.5;
    ClusterParams cluster;
    DepthRange depth_range;

    /// Throws ConfigError.
    void validate() const;

    /// Simulation profile: weights (0.05, 0.4, 0.4, 0.15), threshold 0.72, z_th 0.01 m.
    static PipelineConfig sim();
    /// Real-world profile: weights (0.15, 0.35, 0.4, 0.1), threshold 0.7, z_th 0.05 m.
    static PipelineConfig real();
    /// "sim" or "real"; ConfigError otherwise.
    static PipelineConfig named(const std::string& profile);

    friend bool operator==(const PipelineConfig& a, const PipelineConfig& b);
};

nlohmann::json to_json(const PipelineConfig& config);
/// Missing fields fall back to the named profile (or "sim"). Throws ConfigError.
PipelineConfig config_from_json(const nlohmann::json& j);

/// Wall-clock milliseconds per stage for one frame.
struct StageTimes {
    double depth_accuracy = 0.0;
    double flatness = 0.0;
    double steepness = 0.0;
    double energy = 0.0;
    double final_fusion = 0.0;
    double dense_detection = 0.0;
    double clustering = 0.0;
    double total = 0.0;
};

struct FrameResult {
    Costmap depth_confidence_raw;
    Costmap flatness_raw;
    Costmap energy_raw;
    Costmap depth_confidence;  // normalized, higher is better
    Costmap flatness;          // normalized, higher is better
    Costmap steepness;
    Costmap energy;            // normalized, 1 = cheapest
    Costmap decision;
    BinaryMap edges;
    std::vector<CandidateSite> candidates;
    std::size_t sites_inserted = 0;
    std::size_t sites_skipped = 0;
    StageTimes times;
};

/// Computes all costmaps and candidates for one frame without touching a registry.
FrameResult evaluate_frame(const DepthFrame& frame, const PipelineConfig& config);

class Pipeline {
public:
    explicit Pipeline(PipelineConfig config);

    /// Evaluates the frame and inserts its candidates into the registry, best score
    /// first (ties in row-major pixel order).
    FrameResult process(const DepthFrame& frame);

    std::vector<ClusterSite> cluster() const { return cluster_sites(registry_, config_.cluster); }

    const SiteRegistry& registry() const { return registry_; }
    const PipelineConfig& config() const { return config_; }

private:
    PipelineConfig config_;
    SiteRegistry registry_;
};

// ---------------------------------------------------------------------------
// Benchmark

struct StageStats {
    std::string name;
    double mean_ms = 0.0;
    double stddev_ms = 0.0;
};

struct TimingReport {
    std::vector<StageStats> stages;  // Depth Accuracy .. Clustering, then Total Time
    std::size_t samples = 0;

    const StageStats& stage(const std::string& name) const;
    std::string table() const;
};

nlohmann::json to_json(const TimingReport& report);

/// Mean and sample standard deviation over every frame of every repetition. Each
/// repetition starts from an empty registry; clustering is run and timed after
/// every frame.
TimingReport summarize(const std::vector<StageTimes>& samples);
TimingReport bench(const PipelineConfig& config, const std::vector<DepthFrame>& frames, int repetitions);

}  // namespace landsite
