#include "landsite/run.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "landsite/errors.hpp"
#include "landsite/frame_io.hpp"
#include "landsite/image_io.hpp"

namespace landsite {

namespace fs = std::filesystem;

namespace {

std::string frame_stem(std::int64_t frame_id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06lld", static_cast<long long>(frame_id));
    return buf;
}

Grid<std::uint8_t> to_pgm(const Mask& m) {
    Grid<std::uint8_t> out(m.width(), m.height(), 0);
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] ? 255 : 0;
    return out;
}

}  // namespace

RunSummary run_pipeline(const PipelineConfig& config, const RunOptions& options, std::ostream* log) {
    Pipeline pipeline(config);
    const CameraIntrinsics k = read_intrinsics(options.frames_dir);
    const std::vector<PoseRecord> records = read_pose_records(options.frames_dir);

    fs::create_directories(options.out_dir);
    const fs::path cand_path = options.out_dir / "candidates.jsonl";
    std::ofstream cand_out(cand_path);
    if (!cand_out) throw IoError("cannot open " + cand_path.string() + " for writing");

    RunSummary summary;
    for (const PoseRecord& rec : records) {
        DepthFrame frame;
        try {
            frame = load_frame(options.frames_dir, rec, k, config.depth_range);
        } catch (const IoError& e) {
            ++summary.frames_skipped;
            if (log) *log << "skipping frame " << rec.frame_id << ": " << e.what() << '\n';
            continue;
        }
        FrameResult r = pipeline.process(frame);
        for (const CandidateSite& c : r.candidates) cand_out << to_json(c).dump() << '\n';
        if (options.dump_dir) dump_costmaps(*options.dump_dir, frame_stem(rec.frame_id), r);
        ++summary.frames_processed;
        summary.candidates += r.candidates.size();
        summary.sites_skipped += r.sites_skipped;
        summary.times.push_back(r.times);
    }
    cand_out.close();
    if (!cand_out) throw IoError("write failed: " + cand_path.string());

    const std::vector<ClusterSite> clusters = pipeline.cluster();
    write_json_file(options.out_dir / "sites.json", registry_to_json(pipeline.registry()));
    write_json_file(options.out_dir / "clusters.json", clusters_to_json(clusters, config.cluster));
    write_json_file(options.out_dir / "timing.json", to_json(summarize(summary.times)));

    summary.registry_size = pipeline.registry().size();
    summary.clusters = clusters.size();
    if (log && summary.frames_skipped > 0) *log << summary.frames_skipped << " frame(s) skipped\n";
    if (log && summary.sites_skipped > 0) *log << summary.sites_skipped << " candidate(s) on invalid pixels skipped\n";
    return summary;
}

std::vector<RenderedFrame> render_sequence(const NamedScene& scene, int count, double step_m,
                                           const DepthRange& range) {
    if (count < 1) throw ConfigError("frame count must be >= 1");
    std::vector<RenderedFrame> frames;
    frames.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Pose pose = scene.camera;
        pose.translation.x() += step_m * i;
        SceneSpec spec = scene.spec;
        spec.seed = scene.spec.seed + static_cast<std::uint64_t>(i);  // independent noise per frame
        frames.push_back(render_depth(spec, default_intrinsics(), pose, range, i, 0.05 * i));
    }
    return frames;
}

void write_synthetic_stream(const fs::path& dir, const NamedScene& scene, const std::vector<RenderedFrame>& frames) {
    std::vector<DepthFrame> depth;
    depth.reserve(frames.size());
    for (const RenderedFrame& f : frames) depth.push_back(f.frame);
    write_frame_stream(dir, depth);

    nlohmann::json meta = to_json(scene.spec);
    meta["name"] = scene.name;
    meta["focus_m"] = {scene.focus.x(), scene.focus.y(), scene.focus.z()};
    write_json_file(dir / "scene.json", meta);

    for (const RenderedFrame& f : frames) {
        const std::string stem = frame_stem(f.frame.frame_id);
        write_pgm(dir / (stem + "_safe.pgm"), to_pgm(f.truth.safe));
        write_pgm(dir / (stem + "_boundary.pgm"), to_pgm(surface_boundary_mask(f.truth)));
        Grid<float> exact(f.truth.exact_depth.width(), f.truth.exact_depth.height());
        for (std::size_t i = 0; i < exact.size(); ++i) exact[i] = static_cast<float>(f.truth.exact_depth[i]);
        write_pfm(dir / (stem + "_exact.pfm"), exact);
    }
}

}  // namespace landsite
