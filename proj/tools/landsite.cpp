// landsite: command line front end for landing-site detection on depth streams.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "landsite/errors.hpp"
#include "landsite/frame_io.hpp"
#include "landsite/pipeline.hpp"
#include "landsite/run.hpp"
#include "landsite/scene_synth.hpp"

namespace fs = std::filesystem;
using namespace landsite;

namespace {

struct ConfigArgs {
    std::string config_path;
    std::string profile;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file");
    cmd->add_option("--profile", args.profile, "Parameter profile")->check(CLI::IsMember({"sim", "real"}));
}

PipelineConfig resolve_config(const ConfigArgs& args) {
    if (args.config_path.empty()) return PipelineConfig::named(args.profile.empty() ? "sim" : args.profile);
    nlohmann::json j;
    {
        std::ifstream in(args.config_path);
        if (!in) throw IoError("cannot open config " + args.config_path);
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(args.config_path + ": " + e.what());
        }
    }
    if (!args.profile.empty() && j.is_object()) {
        if (j.contains("profile") && j["profile"] != args.profile) {
            throw ConfigError("--profile " + args.profile + " conflicts with profile in " + args.config_path);
        }
        j["profile"] = args.profile;
    }
    return config_from_json(j);
}

std::vector<std::string> scene_names() {
    std::vector<std::string> names;
    for (const NamedScene& s : canonical_scenes()) names.push_back(s.name);
    return names;
}

std::vector<DepthFrame> load_stream(const fs::path& dir, const DepthRange& range) {
    const CameraIntrinsics k = read_intrinsics(dir);
    std::vector<DepthFrame> frames;
    for (const PoseRecord& rec : read_pose_records(dir)) {
        try {
            frames.push_back(load_frame(dir, rec, k, range));
        } catch (const IoError& e) {
            std::cerr << "skipping frame " << rec.frame_id << ": " << e.what() << '\n';
        }
    }
    return frames;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Landing-site detection from depth images"};
    app.require_subcommand(1);

    // detect
    ConfigArgs detect_cfg;
    RunOptions detect_opts;
    std::string detect_dump;
    auto* detect = app.add_subcommand("detect", "Run the pipeline over a frame stream directory");
    add_config_options(detect, detect_cfg);
    detect->add_option("--frames", detect_opts.frames_dir, "Frame stream directory")->required();
    detect->add_option("--out", detect_opts.out_dir, "Output directory")->required();
    detect->add_option("--dump-costmaps", detect_dump, "Write per-frame costmaps to this directory");

    // costmap
    ConfigArgs costmap_cfg;
    std::string costmap_frames, costmap_scene, costmap_dump;
    std::int64_t costmap_frame_id = -1;
    std::uint64_t costmap_seed = 0;
    bool costmap_seed_set = false;
    auto* costmap = app.add_subcommand("costmap", "Compute and dump the costmaps of a single frame");
    add_config_options(costmap, costmap_cfg);
    auto* cm_frames = costmap->add_option("--frames", costmap_frames, "Frame stream directory");
    costmap->add_option("--frame-id", costmap_frame_id, "Frame to use (default: first)")->needs(cm_frames);
    auto* cm_scene =
        costmap->add_option("--scene", costmap_scene, "Render a canonical scene instead")->check(CLI::IsMember(scene_names()));
    costmap->add_option("--seed", costmap_seed, "Scene seed")->needs(cm_scene)->each([&](const std::string&) {
        costmap_seed_set = true;
    });
    cm_frames->excludes(cm_scene);
    costmap->add_option("--dump-costmaps,--out", costmap_dump, "Output directory")->required();

    // synth
    std::string synth_out;
    std::vector<std::string> synth_scenes;
    int synth_count = 1;
    double synth_noise = 0.0;
    double synth_step = 0.25;
    std::uint64_t synth_seed = 0;
    bool synth_seed_set = false;
    auto* synth = app.add_subcommand("synth", "Write canonical synthetic scenes as frame streams");
    synth->add_option("--out", synth_out, "Output directory (one subdirectory per scene)")->required();
    synth->add_option("--scene", synth_scenes, "Scene name (repeatable, default: all)")->check(CLI::IsMember(scene_names()));
    synth->add_option("--frames", synth_count, "Frames per scene")->check(CLI::PositiveNumber);
    synth->add_option("--step", synth_step, "Camera step along world x per frame, meters");
    synth->add_option("--noise", synth_noise, "Gaussian depth noise sigma, meters")->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", synth_seed, "Scene seed")->each([&](const std::string&) { synth_seed_set = true; });

    // bench
    ConfigArgs bench_cfg;
    std::string bench_frames, bench_scene = "RUBBLE", bench_out;
    int bench_count = 10, bench_reps = 3;
    std::uint64_t bench_seed = 1;
    auto* bench_cmd = app.add_subcommand("bench", "Per-stage timing over a frame set");
    add_config_options(bench_cmd, bench_cfg);
    auto* b_frames = bench_cmd->add_option("--frames", bench_frames, "Frame stream directory");
    bench_cmd->add_option("--scene", bench_scene, "Canonical scene to render when --frames is absent")
        ->check(CLI::IsMember(scene_names()))
        ->excludes(b_frames);
    bench_cmd->add_option("--count", bench_count, "Rendered frames (seeds seed .. seed+count-1)")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--reps", bench_reps, "Repetitions")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench_seed, "First scene seed");
    bench_cmd->add_option("--out", bench_out, "Write timing.json to this directory");

    // cluster
    ConfigArgs cluster_cfg;
    std::string cluster_sites_path, cluster_out;
    auto* cluster = app.add_subcommand("cluster", "Re-cluster a registry snapshot (sites.json)");
    add_config_options(cluster, cluster_cfg);
    cluster->add_option("--sites", cluster_sites_path, "sites.json from detect")->required();
    cluster->add_option("--out", cluster_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*detect) {
            const PipelineConfig config = resolve_config(detect_cfg);
            if (!detect_dump.empty()) detect_opts.dump_dir = detect_dump;
            const RunSummary s = run_pipeline(config, detect_opts, &std::cerr);
            std::cout << "frames " << s.frames_processed << " (skipped " << s.frames_skipped << "), candidates "
                      << s.candidates << ", sites " << s.registry_size << ", clusters " << s.clusters << '\n';
        } else if (*costmap) {
            const PipelineConfig config = resolve_config(costmap_cfg);
            DepthFrame frame;
            if (!costmap_frames.empty()) {
                const CameraIntrinsics k = read_intrinsics(costmap_frames);
                const auto records = read_pose_records(costmap_frames);
                if (records.empty()) throw IoError("no frames in " + costmap_frames);
                const PoseRecord* pick = &records.front();
                if (costmap_frame_id >= 0) {
                    pick = nullptr;
                    for (const PoseRecord& r : records)
                        if (r.frame_id == costmap_frame_id) pick = &r;
                    if (!pick) throw IoError("frame " + std::to_string(costmap_frame_id) + " not in stream");
                }
                frame = load_frame(costmap_frames, *pick, k, config.depth_range);
            } else if (!costmap_scene.empty()) {
                const NamedScene scene =
                    costmap_seed_set ? canonical_scene(costmap_scene, costmap_seed) : canonical_scene(costmap_scene);
                frame = render_depth(scene.spec, default_intrinsics(), scene.camera, config.depth_range).frame;
            } else {
                throw ConfigError("costmap needs --frames or --scene");
            }
            const FrameResult r = evaluate_frame(frame, config);
            char stem[32];
            std::snprintf(stem, sizeof stem, "%06lld", static_cast<long long>(frame.frame_id));
            dump_costmaps(costmap_dump, stem, r);
            write_candidates_jsonl(fs::path(costmap_dump) / (std::string(stem) + "_candidates.jsonl"), r.candidates);
            std::cout << "frame " << frame.frame_id << ": " << r.candidates.size() << " candidates, "
                      << r.times.total << " ms\n";
        } else if (*synth) {
            if (synth_scenes.empty()) synth_scenes = scene_names();
            for (const std::string& name : synth_scenes) {
                NamedScene scene = synth_seed_set ? canonical_scene(name, synth_seed) : canonical_scene(name);
                scene.spec.noise_sigma_m = synth_noise;
                const auto frames = render_sequence(scene, synth_count, synth_step);
                write_synthetic_stream(fs::path(synth_out) / name, scene, frames);
                std::cout << name << ": " << frames.size() << " frame(s) -> " << (fs::path(synth_out) / name).string()
                          << '\n';
            }
        } else if (*bench_cmd) {
            const PipelineConfig config = resolve_config(bench_cfg);
            std::vector<DepthFrame> frames;
            if (!bench_frames.empty()) {
                frames = load_stream(bench_frames, config.depth_range);
            } else {
                for (int i = 0; i < bench_count; ++i) {
                    const NamedScene scene = canonical_scene(bench_scene, bench_seed + static_cast<std::uint64_t>(i));
                    frames.push_back(
                        render_depth(scene.spec, default_intrinsics(), scene.camera, config.depth_range, i, 0.05 * i)
                            .frame);
                }
            }
            if (frames.empty()) throw IoError("no frames to benchmark");
            const TimingReport report = bench(config, frames, bench_reps);
            std::cout << report.table();
            if (!bench_out.empty()) {
                fs::create_directories(bench_out);
                write_json_file(fs::path(bench_out) / "timing.json", to_json(report));
            }
        } else if (*cluster) {
            const PipelineConfig config = resolve_config(cluster_cfg);
            const std::vector<LandingSite> sites = sites_from_json(read_json_file(cluster_sites_path));
            const auto clusters = cluster_sites(sites, config.cluster);
            fs::create_directories(cluster_out);
            write_json_file(fs::path(cluster_out) / "clusters.json", clusters_to_json(clusters, config.cluster));
            std::cout << sites.size() << " sites -> " << clusters.size() << " clusters\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
