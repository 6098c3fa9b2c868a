#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "landsite/costmaps.hpp"
#include "landsite/geometry.hpp"

namespace landsite {

/// Pixel-level landing candidate from a single frame.
struct CandidateSite {
    int px = 0;
    int py = 0;
    double depth_m = 0.0;
    double score = 0.0;
    double flat_radius_px = 0.0;
    std::int64_t frame_id = 0;

    friend bool operator==(const CandidateSite&, const CandidateSite&) = default;
};

/// World-frame landing site.
struct LandingSite {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    double score = 0.0;
    std::int64_t frame_id = 0;
    double timestamp = 0.0;
};

struct FootprintParams {
    double uav_radius_m = 0.13;  // half of the 0.26 m frame
    double safety_factor = 1.0;
};

/// Every valid pixel with J >= decision_threshold whose inscribed-circle radius
/// `flat_raw` (pixels, un-normalized) is at least safety_factor times the projected
/// UAV radius at that depth. Row-major order. Throws std::invalid_argument when the
/// grids are not aligned with the frame.
std::vector<CandidateSite> dense_candidates(const Costmap& decision, const Costmap& flat_raw,
                                            const DepthFrame& frame, const FusionWeights& weights,
                                            const FootprintParams& footprint);

struct WorldSites {
    std::vector<LandingSite> sites;
    std::size_t skipped = 0;  // candidates whose pixel was invalid in the frame
};

WorldSites candidates_to_world(const std::vector<CandidateSite>& candidates, const DepthFrame& frame);

}  // namespace landsite
