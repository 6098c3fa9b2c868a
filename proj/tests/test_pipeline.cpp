#include "doctest.h"

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "landsite/errors.hpp"
#include "landsite/frame_io.hpp"
#include "landsite/image_io.hpp"
#include "landsite/pipeline.hpp"
#include "landsite/run.hpp"
#include "landsite/scene_synth.hpp"

using namespace landsite;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "landsite_test_pipeline" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

DepthFrame rubble_frame(std::uint64_t seed) {
    const NamedScene s = rubble_scene(seed);
    return render_depth(s.spec, default_intrinsics(), s.camera).frame;
}

}  // namespace

TEST_CASE("profiles") {
    const PipelineConfig sim = PipelineConfig::sim();
    CHECK(sim.weights.c1_depth == 0.05);
    CHECK(sim.weights.c2_flatness == 0.4);
    CHECK(sim.weights.c3_steepness == 0.4);
    CHECK(sim.weights.c4_energy == 0.15);
    CHECK(sim.weights.decision_threshold == 0.72);
    CHECK(sim.cluster.z_th_m == 0.01);
    const PipelineConfig real = PipelineConfig::real();
    CHECK(real.weights.c1_depth == 0.15);
    CHECK(real.weights.c2_flatness == 0.35);
    CHECK(real.weights.c3_steepness == 0.4);
    CHECK(real.weights.c4_energy == 0.1);
    CHECK(real.weights.decision_threshold == 0.7);
    CHECK(real.cluster.z_th_m == 0.05);
    for (const PipelineConfig& c : {sim, real}) {
        CHECK(c.cluster.dist_th_m == 0.5);
        CHECK(c.dedup_radius_m == 0.5);
        CHECK(c.footprint.uav_radius_m == 0.13);
        CHECK(c.footprint.safety_factor == 1.0);
        CHECK_NOTHROW(c.validate());
    }
    CHECK_THROWS_AS(PipelineConfig::named("indoor"), ConfigError);
}

TEST_CASE("config json round trip and errors") {
    for (const PipelineConfig& c : {PipelineConfig::sim(), PipelineConfig::real()}) {
        CHECK(config_from_json(to_json(c)) == c);
        CHECK(config_from_json(nlohmann::json::parse(to_json(c).dump())) == c);
    }
    CHECK(config_from_json(nlohmann::json::object()) == PipelineConfig::sim());
    CHECK(config_from_json({{"profile", "real"}}) == PipelineConfig::real());
    const PipelineConfig tweaked = config_from_json({{"profile", "real"}, {"safety_factor", 1.5}});
    CHECK(tweaked.footprint.safety_factor == 1.5);
    CHECK(tweaked.weights.c1_depth == 0.15);

    CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"profile", "moon"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"weights", {{"c1_depth_confidence", 0.5}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"decision_threshold", "high"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"smoothing_window_px", 4}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"canny_low_m", 0.3}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"cluster_metric", "manhattan"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"d_min_m", 30.0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"dedup_radius_m", -1.0}}), ConfigError);
}

TEST_CASE("frame stream round trip") {
    const fs::path dir = fresh_dir("stream");
    std::vector<DepthFrame> frames;
    for (int i = 0; i < 3; ++i) {
        const NamedScene s = rubble_scene(1);
        DepthFrame f = render_depth(s.spec, default_intrinsics(),
                                    tilted_nadir_pose({0.1 * i, -0.2, 12.0}, 0.05 * i, -0.03, 0.2), {}, 10 + i, 0.05 * i)
                           .frame;
        frames.push_back(std::move(f));
    }
    write_frame_stream(dir, frames);
    const CameraIntrinsics k = read_intrinsics(dir);
    CHECK(to_json(k) == to_json(frames[0].intrinsics));
    const auto records = read_pose_records(dir);
    REQUIRE(records.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(records[i].frame_id == frames[i].frame_id);
        CHECK(records[i].t_sec == frames[i].timestamp);
        CHECK((records[i].pose.rotation - frames[i].pose_world_from_camera.rotation).norm() < 1e-12);
        CHECK(records[i].pose.translation == frames[i].pose_world_from_camera.translation);
        const DepthFrame back = load_frame(dir, records[i], k, {});
        REQUIRE(back.valid == frames[i].valid);
        for (std::size_t p = 0; p < back.depth.size(); ++p) {
            if (!back.valid[p]) continue;
            REQUIRE(back.depth[p] == static_cast<double>(static_cast<float>(frames[i].depth[p])));
        }
    }
    fs::remove(dir / depth_file_name(11));
    CHECK_THROWS_AS(load_frame(dir, records[1], k, {}), IoError);
    CHECK(depth_file_name(7) == "000007.pfm");
}

TEST_CASE("costmap dumps match the in-memory maps and support re-checking candidates") {
    const fs::path dir = fresh_dir("dump");
    const DepthFrame f = rubble_frame(1);
    const PipelineConfig cfg = PipelineConfig::sim();
    const FrameResult r = evaluate_frame(f, cfg);
    dump_costmaps(dir, "000000", r);

    const std::pair<const char*, const Costmap*> maps[] = {
        {"depth_confidence_raw", &r.depth_confidence_raw}, {"flatness_raw", &r.flatness_raw},
        {"energy_raw", &r.energy_raw},                     {"depth_confidence", &r.depth_confidence},
        {"flatness", &r.flatness},                         {"steepness", &r.steepness},
        {"energy", &r.energy},                             {"decision", &r.decision},
    };
    for (const auto& [name, map] : maps) {
        const Grid<float> img = read_pfm(dir / (std::string("000000_") + name + ".pfm"));
        const Grid<float> expected = to_float_image(*map);
        REQUIRE(img.same_shape(expected));
        for (std::size_t i = 0; i < img.size(); ++i) {
            if (map->valid[i]) {
                REQUIRE(img[i] == static_cast<float>(map->values[i]));
            } else {
                REQUIRE(std::isnan(img[i]));
            }
        }
        CHECK(fs::exists(dir / (std::string("000000_") + name + ".pgm")));
    }
    CHECK(read_pgm(dir / "000000_edges.pgm").same_shape(r.edges));

    const Grid<float> decision = read_pfm(dir / "000000_decision.pfm");
    const Grid<float> flat = read_pfm(dir / "000000_flatness_raw.pfm");
    REQUIRE(!r.candidates.empty());
    for (const CandidateSite& c : r.candidates) {
        REQUIRE(decision(c.px, c.py) >= static_cast<float>(cfg.weights.decision_threshold));
        REQUIRE(flat(c.px, c.py) >=
                static_cast<float>(project_uav_radius(cfg.footprint.uav_radius_m, c.depth_m, f.intrinsics)));
    }
}

TEST_CASE("pipeline registry behaviour") {
    SUBCASE("replaying a frame adds nothing") {
        Pipeline p(PipelineConfig::sim());
        const DepthFrame f = rubble_frame(3);
        const FrameResult a = p.process(f);
        const std::size_t n = p.registry().size();
        CHECK(n > 0);
        CHECK(a.sites_inserted == n);
        const FrameResult b = p.process(f);
        CHECK(p.registry().size() == n);
        CHECK(b.sites_inserted == 0);
    }
    SUBCASE("best candidate is inserted first") {
        Pipeline p(PipelineConfig::sim());
        const FrameResult r = p.process(rubble_frame(1));
        double best = 0.0;
        for (const CandidateSite& c : r.candidates) best = std::max(best, c.score);
        REQUIRE(p.registry().size() > 0);
        CHECK(p.registry().sites()[0].score == best);
    }
    SUBCASE("steep wall yields no sites") {
        Pipeline p(PipelineConfig::sim());
        const NamedScene s = steep_wall_scene();
        const FrameResult r = p.process(render_depth(s.spec, default_intrinsics(), s.camera).frame);
        CHECK(r.candidates.empty());
        CHECK(p.registry().size() == 0);
        CHECK(p.cluster().empty());
    }
    SUBCASE("invalid config is rejected at construction") {
        PipelineConfig c = PipelineConfig::sim();
        c.weights.c4_energy = 0.5;
        CHECK_THROWS_AS(Pipeline{c}, ConfigError);
    }
}

TEST_CASE("run_pipeline is deterministic and skips unreadable frames") {
    const fs::path frames_dir = fresh_dir("run_frames");
    NamedScene scene = rubble_scene(2);
    scene.spec.noise_sigma_m = 0.005;
    write_synthetic_stream(frames_dir, scene, render_sequence(scene, 3));
    CHECK(fs::exists(frames_dir / "scene.json"));
    CHECK(fs::exists(frames_dir / "000001_safe.pgm"));

    const fs::path out1 = fresh_dir("run_out1"), out2 = fresh_dir("run_out2");
    const RunSummary s1 = run_pipeline(PipelineConfig::sim(), {frames_dir, out1, std::nullopt});
    const RunSummary s2 = run_pipeline(PipelineConfig::sim(), {frames_dir, out2, std::nullopt});
    CHECK(s1.frames_processed == 3);
    CHECK(s1.registry_size > 0);
    CHECK(s1.registry_size == s2.registry_size);
    for (const char* name : {"candidates.jsonl", "sites.json", "clusters.json"}) {
        CHECK(slurp(out1 / name) == slurp(out2 / name));
    }
    CHECK(fs::exists(out1 / "timing.json"));
    const nlohmann::json sites = read_json_file(out1 / "sites.json");
    CHECK(sites.at("sites").size() == s1.registry_size);
    CHECK(sites_from_json(sites).size() == s1.registry_size);

    std::ofstream(frames_dir / depth_file_name(1), std::ios::trunc) << "garbage";
    std::ostringstream log;
    const RunSummary s3 = run_pipeline(PipelineConfig::sim(), {frames_dir, fresh_dir("run_out3"), std::nullopt}, &log);
    CHECK(s3.frames_processed == 2);
    CHECK(s3.frames_skipped == 1);
    CHECK(log.str().find("skipping") != std::string::npos);

    CHECK_THROWS_AS(run_pipeline(PipelineConfig::sim(), {frames_dir / "missing", fresh_dir("run_out4"), std::nullopt}),
                    IoError);
    PipelineConfig bad = PipelineConfig::sim();
    bad.canny.low = -1.0;
    CHECK_THROWS_AS(run_pipeline(bad, {frames_dir / "missing", fresh_dir("run_out5"), std::nullopt}), ConfigError);
}

TEST_CASE("render_sequence") {
    const NamedScene s = flat_pad_scene();
    const auto frames = render_sequence(s, 4, 0.5);
    REQUIRE(frames.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(frames[i].frame.frame_id == static_cast<std::int64_t>(i));
        CHECK(frames[i].frame.timestamp == doctest::Approx(0.05 * i));
        CHECK(frames[i].frame.pose_world_from_camera.translation.x() ==
              doctest::Approx(s.camera.translation.x() + 0.5 * i));
    }
}

TEST_CASE("timing report") {
    std::vector<StageTimes> samples(2);
    samples[0].flatness = 1.0;
    samples[1].flatness = 3.0;
    samples[0].total = samples[1].total = 5.0;
    const TimingReport r = summarize(samples);
    CHECK(r.samples == 2);
    CHECK(r.stage("Flatness").mean_ms == 2.0);
    CHECK(r.stage("Flatness").stddev_ms == doctest::Approx(std::sqrt(2.0)));
    CHECK(r.stage("Total Time").stddev_ms == 0.0);
    CHECK_THROWS_AS(r.stage("Nope"), std::out_of_range);

    const char* names[] = {"Depth Accuracy", "Flatness", "Steepness", "Energy", "Final", "Dense Detection",
                           "Clustering", "Total Time"};
    REQUIRE(r.stages.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) CHECK(r.stages[i].name == names[i]);
    CHECK(r.table().find("Dense Detection") != std::string::npos);

    std::vector<DepthFrame> frames{rubble_frame(1), rubble_frame(2)};
    const TimingReport b = bench(PipelineConfig::sim(), frames, 2);
    CHECK(b.samples == 4);
    double parts = 0.0;
    for (std::size_t i = 0; i + 1 < b.stages.size(); ++i) {
        CHECK(b.stages[i].mean_ms >= 0.0);
        parts += b.stages[i].mean_ms;
    }
    CHECK(b.stage("Total Time").mean_ms >= 0.95 * parts);
    CHECK(b.stage("Total Time").mean_ms <= 1.5 * parts + 1.0);
    CHECK_THROWS_AS(bench(PipelineConfig::sim(), frames, 0), ConfigError);
    const nlohmann::json j = to_json(b);
    CHECK(j.at("stages").size() == 8);
    CHECK(j.at("samples") == 4);
}
