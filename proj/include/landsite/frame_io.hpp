#pragma once

// On-disk formats.
//
// Frame stream directory:
//   intrinsics.json   {fx, fy, cx, cy, width, height}
//   frames.jsonl      one {frame_id, t_sec, qw, qx, qy, qz, tx, ty, tz} per line
//   NNNNNN.pfm        depth in meters for frame_id NNNNNN (NaN or 0 = no return)
//
// Outputs: candidates.jsonl, sites.json, clusters.json, timing.json.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "landsite/costmaps.hpp"
#include "landsite/detection.hpp"
#include "landsite/geometry.hpp"
#include "landsite/pipeline.hpp"
#include "landsite/registry.hpp"

namespace landsite {

struct PoseRecord {
    std::int64_t frame_id = 0;
    double t_sec = 0.0;
    Pose pose;
};

nlohmann::json to_json(const CameraIntrinsics& k);
CameraIntrinsics intrinsics_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PoseRecord& r);
PoseRecord pose_record_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

std::string depth_file_name(std::int64_t frame_id);

CameraIntrinsics read_intrinsics(const std::filesystem::path& dir);
std::vector<PoseRecord> read_pose_records(const std::filesystem::path& dir);

/// Loads NNNNNN.pfm for the record. Throws IoError when missing or malformed.
DepthFrame load_frame(const std::filesystem::path& dir, const PoseRecord& record, const CameraIntrinsics& k,
                      const DepthRange& range);

/// Writes intrinsics.json, frames.jsonl and one PFM per frame (invalid pixels as NaN).
void write_frame_stream(const std::filesystem::path& dir, const std::vector<DepthFrame>& frames);

nlohmann::json to_json(const CandidateSite& c);
void write_candidates_jsonl(const std::filesystem::path& path, const std::vector<CandidateSite>& candidates);

nlohmann::json registry_to_json(const SiteRegistry& reg);
std::vector<LandingSite> sites_from_json(const nlohmann::json& j);

nlohmann::json clusters_to_json(const std::vector<ClusterSite>& clusters, const ClusterParams& params);

/// Float32 copy of the costmap with NaN at invalid pixels.
Grid<float> to_float_image(const Costmap& map);

/// Writes <prefix>_<name>.pfm and an 8-bit <prefix>_<name>.pgm preview for every
/// costmap of the frame, plus <prefix>_edges.pgm.
void dump_costmaps(const std::filesystem::path& dir, const std::string& prefix, const FrameResult& result);

}  // namespace landsite
