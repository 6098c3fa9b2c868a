#include "landsite/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "landsite/errors.hpp"

namespace landsite {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void PipelineConfig::validate() const {
    weights.validate();
    canny.validate();
    if (smoothing_window_px < 1 || smoothing_window_px % 2 == 0) {
        throw ConfigError("smoothing_window_px must be odd and >= 1");
    }
    if (!(footprint.uav_radius_m > 0.0)) throw ConfigError("uav_radius_m must be positive");
    if (!(footprint.safety_factor > 0.0)) throw ConfigError("safety_factor must be positive");
    if (!(dedup_radius_m > 0.0)) throw ConfigError("dedup_radius_m must be positive");
    if (!(cluster.dist_th_m > 0.0) || !(cluster.z_th_m > 0.0)) throw ConfigError("cluster thresholds must be positive");
    if (!(depth_range.min_m > 0.0) || !(depth_range.max_m > depth_range.min_m)) {
        throw ConfigError("depth range must satisfy 0 < d_min < d_max");
    }
}

PipelineConfig PipelineConfig::sim() {
    PipelineConfig c;
    c.profile = "sim";
    c.weights = {0.05, 0.4, 0.4, 0.15, 0.72, 15.0 * std::numbers::pi / 180.0};
    c.cluster = {0.5, 0.01, ClusterMetric::Horizontal};
    return c;
}

PipelineConfig PipelineConfig::real() {
    PipelineConfig c;
    c.profile = "real";
    c.weights = {0.15, 0.35, 0.4, 0.1, 0.7, 15.0 * std::numbers::pi / 180.0};
    c.cluster = {0.5, 0.05, ClusterMetric::Horizontal};
    return c;
}

PipelineConfig PipelineConfig::named(const std::string& profile) {
    if (profile == "sim") return sim();
    if (profile == "real") return real();
    throw ConfigError("unknown profile '" + profile + "' (expected sim or real)");
}

bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
    return to_json(a) == to_json(b);
}

nlohmann::json to_json(const PipelineConfig& c) {
    return {
        {"profile", c.profile},
        {"weights",
         {{"c1_depth_confidence", c.weights.c1_depth},
          {"c2_flatness", c.weights.c2_flatness},
          {"c3_steepness", c.weights.c3_steepness},
          {"c4_energy", c.weights.c4_energy}}},
        {"decision_threshold", c.weights.decision_threshold},
        {"theta_th_rad", c.weights.theta_th_rad},
        {"canny_low_m", c.canny.low},
        {"canny_high_m", c.canny.high},
        {"smoothing_window_px", c.smoothing_window_px},
        {"uav_radius_m", c.footprint.uav_radius_m},
        {"safety_factor", c.footprint.safety_factor},
        {"dedup_radius_m", c.dedup_radius_m},
        {"cluster_dist_th_m", c.cluster.dist_th_m},
        {"cluster_z_th_m", c.cluster.z_th_m},
        {"cluster_metric", std::string(to_string(c.cluster.metric))},
        {"d_min_m", c.depth_range.min_m},
        {"d_max_m", c.depth_range.max_m},
    };
}

PipelineConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        PipelineConfig c = PipelineConfig::named(j.value("profile", std::string("sim")));
        if (j.contains("weights")) {
            const auto& w = j.at("weights");
            c.weights.c1_depth = w.value("c1_depth_confidence", c.weights.c1_depth);
            c.weights.c2_flatness = w.value("c2_flatness", c.weights.c2_flatness);
            c.weights.c3_steepness = w.value("c3_steepness", c.weights.c3_steepness);
            c.weights.c4_energy = w.value("c4_energy", c.weights.c4_energy);
        }
        c.weights.decision_threshold = j.value("decision_threshold", c.weights.decision_threshold);
        c.weights.theta_th_rad = j.value("theta_th_rad", c.weights.theta_th_rad);
        c.canny.low = j.value("canny_low_m", c.canny.low);
        c.canny.high = j.value("canny_high_m", c.canny.high);
        c.smoothing_window_px = j.value("smoothing_window_px", c.smoothing_window_px);
        c.footprint.uav_radius_m = j.value("uav_radius_m", c.footprint.uav_radius_m);
        c.footprint.safety_factor = j.value("safety_factor", c.footprint.safety_factor);
        c.dedup_radius_m = j.value("dedup_radius_m", c.dedup_radius_m);
        c.cluster.dist_th_m = j.value("cluster_dist_th_m", c.cluster.dist_th_m);
        c.cluster.z_th_m = j.value("cluster_z_th_m", c.cluster.z_th_m);
        c.cluster.metric = cluster_metric_from_string(j.value("cluster_metric", std::string(to_string(c.cluster.metric))));
        c.depth_range.min_m = j.value("d_min_m", c.depth_range.min_m);
        c.depth_range.max_m = j.value("d_max_m", c.depth_range.max_m);
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Per-frame evaluation

FrameResult evaluate_frame(const DepthFrame& frame, const PipelineConfig& config) {
    FrameResult r;
    const auto frame_start = Clock::now();

    auto t = Clock::now();
    r.depth_confidence_raw = depth_confidence_map(frame);
    r.times.depth_accuracy = elapsed_ms(t);

    t = Clock::now();
    r.edges = canny_edges(frame, config.canny);
    r.flatness_raw = distance_transform(r.edges);
    r.flatness_raw.valid = frame.valid;
    r.times.flatness = elapsed_ms(t);

    t = Clock::now();
    r.steepness = steepness_map(surface_normals(frame, config.smoothing_window_px), config.weights.theta_th_rad);
    r.times.steepness = elapsed_ms(t);

    t = Clock::now();
    r.energy_raw = energy_map(frame);
    r.times.energy = elapsed_ms(t);

    t = Clock::now();
    r.depth_confidence = minmax_normalize(r.depth_confidence_raw, Orientation::HigherIsBetter);
    r.flatness = minmax_normalize(r.flatness_raw, Orientation::HigherIsBetter);
    r.energy = minmax_normalize(r.energy_raw, Orientation::LowerIsBetter);
    r.decision = decision_map(r.depth_confidence, r.flatness, r.steepness, r.energy, config.weights);
    r.times.final_fusion = elapsed_ms(t);

    t = Clock::now();
    r.candidates = dense_candidates(r.decision, r.flatness_raw, frame, config.weights, config.footprint);
    r.times.dense_detection = elapsed_ms(t);

    r.times.total = elapsed_ms(frame_start);
    return r;
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)), registry_(config_.dedup_radius_m) {
    config_.validate();
}

FrameResult Pipeline::process(const DepthFrame& frame) {
    const auto start = Clock::now();
    FrameResult r = evaluate_frame(frame, config_);

    const auto t = Clock::now();
    WorldSites world = candidates_to_world(r.candidates, frame);
    std::stable_sort(world.sites.begin(), world.sites.end(),
                     [](const LandingSite& a, const LandingSite& b) { return a.score > b.score; });
    for (const LandingSite& s : world.sites) {
        if (registry_.insert_site(s)) ++r.sites_inserted;
    }
    r.sites_skipped = world.skipped;
    r.times.dense_detection += elapsed_ms(t);
    r.times.total = elapsed_ms(start);
    return r;
}

// ---------------------------------------------------------------------------
// Benchmark

const StageStats& TimingReport::stage(const std::string& name) const {
    for (const StageStats& s : stages) {
        if (s.name == name) return s;
    }
    throw std::out_of_range("no stage named " + name);
}

std::string TimingReport::table() const {
    std::ostringstream out;
    out << std::left << std::setw(20) << "Algorithm" << "Time (mean +- std) ms\n";
    out << std::string(44, '-') << '\n';
    out << std::fixed << std::setprecision(2);
    for (const StageStats& s : stages) {
        const bool costmap = s.name == "Depth Accuracy" || s.name == "Flatness" || s.name == "Steepness" ||
                             s.name == "Energy" || s.name == "Final";
        if (s.name == "Total Time") out << std::string(44, '-') << '\n';
        out << std::left << std::setw(20) << ((costmap ? "  " : "") + s.name) << std::right << std::setw(9)
            << s.mean_ms << " +- " << std::setw(8) << s.stddev_ms << '\n';
    }
    out << "samples: " << samples << '\n';
    return out.str();
}

nlohmann::json to_json(const TimingReport& report) {
    nlohmann::json stages = nlohmann::json::array();
    for (const StageStats& s : report.stages) {
        stages.push_back({{"stage", s.name}, {"mean_ms", s.mean_ms}, {"stddev_ms", s.stddev_ms}});
    }
    return {{"stages", stages}, {"samples", report.samples}};
}

TimingReport summarize(const std::vector<StageTimes>& samples) {
    using Field = double StageTimes::*;
    const std::pair<const char*, Field> rows[] = {
        {"Depth Accuracy", &StageTimes::depth_accuracy}, {"Flatness", &StageTimes::flatness},
        {"Steepness", &StageTimes::steepness},           {"Energy", &StageTimes::energy},
        {"Final", &StageTimes::final_fusion},            {"Dense Detection", &StageTimes::dense_detection},
        {"Clustering", &StageTimes::clustering},         {"Total Time", &StageTimes::total},
    };
    TimingReport report;
    report.samples = samples.size();
    for (const auto& [name, field] : rows) {
        StageStats s{name, 0.0, 0.0};
        if (!samples.empty()) {
            double sum = 0.0;
            for (const StageTimes& t : samples) sum += t.*field;
            s.mean_ms = sum / static_cast<double>(samples.size());
            if (samples.size() > 1) {
                double ss = 0.0;
                for (const StageTimes& t : samples) ss += (t.*field - s.mean_ms) * (t.*field - s.mean_ms);
                s.stddev_ms = std::sqrt(ss / static_cast<double>(samples.size() - 1));
            }
        }
        report.stages.push_back(s);
    }
    return report;
}

TimingReport bench(const PipelineConfig& config, const std::vector<DepthFrame>& frames, int repetitions) {
    if (repetitions < 1) throw ConfigError("bench: repetitions must be >= 1");
    std::vector<StageTimes> samples;
    samples.reserve(frames.size() * static_cast<std::size_t>(repetitions));
    for (int rep = 0; rep < repetitions; ++rep) {
        Pipeline pipeline(config);
        for (const DepthFrame& frame : frames) {
            const auto start = Clock::now();
            FrameResult r = pipeline.process(frame);
            const auto t = Clock::now();
            const auto clusters = pipeline.cluster();
            r.times.clustering = elapsed_ms(t);
            r.times.total = elapsed_ms(start);
            samples.push_back(r.times);
            (void)clusters;
        }
    }
    return summarize(samples);
}

}  // namespace landsite
