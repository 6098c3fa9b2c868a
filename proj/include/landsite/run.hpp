#pragma once

// Directory-level drivers used by the command line tool: run the pipeline over a
// frame stream and write its outputs, and write synthetic frame streams.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "landsite/pipeline.hpp"
#include "landsite/scene_synth.hpp"

namespace landsite {

struct RunOptions {
    std::filesystem::path frames_dir;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> dump_dir;  // costmap dumps, one prefix per frame
};

struct RunSummary {
    std::size_t frames_processed = 0;
    std::size_t frames_skipped = 0;  // unreadable or malformed depth files
    std::size_t candidates = 0;
    std::size_t sites_skipped = 0;
    std::size_t registry_size = 0;
    std::size_t clusters = 0;
    std::vector<StageTimes> times;
};

/// Processes every frame listed in frames.jsonl in file order and writes
/// candidates.jsonl, sites.json, clusters.json and timing.json under out_dir.
/// Throws ConfigError for an invalid config (before reading anything) and IoError
/// when the stream metadata cannot be read or outputs cannot be written. Frames whose
/// depth file cannot be loaded are skipped and reported on `log`.
RunSummary run_pipeline(const PipelineConfig& config, const RunOptions& options, std::ostream* log = nullptr);

/// Renders `count` frames of the scene from its default viewpoint, the camera
/// stepping `step_m` along world x per frame at 20 Hz.
std::vector<RenderedFrame> render_sequence(const NamedScene& scene, int count, double step_m = 0.25,
                                           const DepthRange& range = {});

/// Writes the frame stream plus scene.json and per-frame ground truth
/// (NNNNNN_safe.pgm, NNNNNN_boundary.pgm, NNNNNN_exact.pfm).
void write_synthetic_stream(const std::filesystem::path& dir, const NamedScene& scene,
                            const std::vector<RenderedFrame>& frames);

}  // namespace landsite
