#include "landsite/frame_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "landsite/errors.hpp"
#include "landsite/image_io.hpp"

namespace landsite {

namespace fs = std::filesystem;

nlohmann::json to_json(const CameraIntrinsics& k) {
    return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

CameraIntrinsics intrinsics_from_json(const nlohmann::json& j) {
    CameraIntrinsics k;
    try {
        k = {j.at("fx").get<double>(), j.at("fy").get<double>(), j.at("cx").get<double>(),
             j.at("cy").get<double>(), j.at("width").get<int>(),  j.at("height").get<int>()};
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("intrinsics: ") + e.what());
    }
    try {
        k.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return k;
}

nlohmann::json to_json(const PoseRecord& r) {
    const Eigen::Quaterniond q = r.pose.quaternion();
    const Eigen::Vector3d& t = r.pose.translation;
    return {{"frame_id", r.frame_id}, {"t_sec", r.t_sec}, {"qw", q.w()}, {"qx", q.x()}, {"qy", q.y()},
            {"qz", q.z()},           {"tx", t.x()},       {"ty", t.y()}, {"tz", t.z()}};
}

PoseRecord pose_record_from_json(const nlohmann::json& j) {
    try {
        PoseRecord r;
        r.frame_id = j.at("frame_id").get<std::int64_t>();
        r.t_sec = j.at("t_sec").get<double>();
        r.pose = Pose::from_quaternion(j.at("qw").get<double>(), j.at("qx").get<double>(), j.at("qy").get<double>(),
                                       j.at("qz").get<double>(),
                                       {j.at("tx").get<double>(), j.at("ty").get<double>(), j.at("tz").get<double>()});
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("pose record: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("pose record: ") + e.what());
    }
}

nlohmann::json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

std::string depth_file_name(std::int64_t frame_id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06lld.pfm", static_cast<long long>(frame_id));
    return buf;
}

CameraIntrinsics read_intrinsics(const fs::path& dir) { return intrinsics_from_json(read_json_file(dir / "intrinsics.json")); }

std::vector<PoseRecord> read_pose_records(const fs::path& dir) {
    const fs::path path = dir / "frames.jsonl";
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<PoseRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            records.push_back(pose_record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw IoError(path.string() + ": " + e.what());
        }
    }
    return records;
}

DepthFrame load_frame(const fs::path& dir, const PoseRecord& record, const CameraIntrinsics& k,
                      const DepthRange& range) {
    const Grid<float> raw = read_pfm(dir / depth_file_name(record.frame_id));
    if (raw.width() != k.width || raw.height() != k.height) {
        throw IoError(depth_file_name(record.frame_id) + ": size does not match intrinsics");
    }
    Grid<double> depth(raw.width(), raw.height());
    for (std::size_t i = 0; i < raw.size(); ++i) depth[i] = static_cast<double>(raw[i]);
    return DepthFrame::from_depth(std::move(depth), k, record.pose, range, record.frame_id, record.t_sec);
}

void write_frame_stream(const fs::path& dir, const std::vector<DepthFrame>& frames) {
    fs::create_directories(dir);
    if (frames.empty()) return;
    write_json_file(dir / "intrinsics.json", to_json(frames.front().intrinsics));
    std::ofstream poses(dir / "frames.jsonl");
    if (!poses) throw IoError("cannot write " + (dir / "frames.jsonl").string());
    for (const DepthFrame& f : frames) {
        poses << to_json(PoseRecord{f.frame_id, f.timestamp, f.pose_world_from_camera}).dump() << '\n';
        Grid<float> img(f.width(), f.height(), std::numeric_limits<float>::quiet_NaN());
        for (std::size_t i = 0; i < img.size(); ++i) {
            if (f.valid[i]) img[i] = static_cast<float>(f.depth[i]);
        }
        write_pfm(dir / depth_file_name(f.frame_id), img);
    }
}

nlohmann::json to_json(const CandidateSite& c) {
    return {{"frame_id", c.frame_id}, {"px", c.px},           {"py", c.py},
            {"depth_m", c.depth_m},   {"score", c.score},     {"flat_radius_px", c.flat_radius_px}};
}

void write_candidates_jsonl(const fs::path& path, const std::vector<CandidateSite>& candidates) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const CandidateSite& c : candidates) out << to_json(c).dump() << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

nlohmann::json registry_to_json(const SiteRegistry& reg) {
    nlohmann::json sites = nlohmann::json::array();
    for (const LandingSite& s : reg.sites()) {
        sites.push_back({{"x", s.position.x()},
                         {"y", s.position.y()},
                         {"z", s.position.z()},
                         {"score", s.score},
                         {"frame_id", s.frame_id},
                         {"timestamp", s.timestamp}});
    }
    return {{"dedup_radius_m", reg.dedup_radius()}, {"sites", sites}};
}

std::vector<LandingSite> sites_from_json(const nlohmann::json& j) {
    std::vector<LandingSite> out;
    try {
        for (const auto& s : j.at("sites")) {
            LandingSite site;
            site.position = {s.at("x").get<double>(), s.at("y").get<double>(), s.at("z").get<double>()};
            site.score = s.at("score").get<double>();
            site.frame_id = s.value("frame_id", std::int64_t{0});
            site.timestamp = s.value("timestamp", 0.0);
            out.push_back(site);
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("sites: ") + e.what());
    }
    return out;
}

nlohmann::json clusters_to_json(const std::vector<ClusterSite>& clusters, const ClusterParams& params) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ClusterSite& c : clusters) {
        arr.push_back({{"cx", c.centroid.x()},
                       {"cy", c.centroid.y()},
                       {"cz", c.centroid.z()},
                       {"mean_score", c.mean_score},
                       {"members", c.member_count}});
    }
    return {{"dist_th_m", params.dist_th_m},
            {"z_th_m", params.z_th_m},
            {"metric", std::string(to_string(params.metric))},
            {"clusters", arr}};
}

Grid<float> to_float_image(const Costmap& map) {
    Grid<float> img(map.width(), map.height(), std::numeric_limits<float>::quiet_NaN());
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (map.valid[i]) img[i] = static_cast<float>(map.values[i]);
    }
    return img;
}

void dump_costmaps(const fs::path& dir, const std::string& prefix, const FrameResult& r) {
    fs::create_directories(dir);
    const std::pair<const char*, const Costmap*> maps[] = {
        {"depth_confidence_raw", &r.depth_confidence_raw},
        {"flatness_raw", &r.flatness_raw},
        {"energy_raw", &r.energy_raw},
        {"depth_confidence", &r.depth_confidence},
        {"flatness", &r.flatness},
        {"steepness", &r.steepness},
        {"energy", &r.energy},
        {"decision", &r.decision},
    };
    for (const auto& [name, map] : maps) {
        const std::string stem = prefix + "_" + name;
        write_pfm(dir / (stem + ".pfm"), to_float_image(*map));
        write_pgm(dir / (stem + ".pgm"), preview_8bit(map->values, map->valid));
    }
    Grid<std::uint8_t> edges(r.edges.width(), r.edges.height(), 0);
    for (std::size_t i = 0; i < edges.size(); ++i) edges[i] = r.edges[i] ? 255 : 0;
    write_pgm(dir / (prefix + "_edges.pgm"), edges);
}

}  // namespace landsite
