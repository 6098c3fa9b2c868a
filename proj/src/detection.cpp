#include "landsite/detection.hpp"

#include <stdexcept>

namespace landsite {

std::vector<CandidateSite> dense_candidates(const Costmap& decision, const Costmap& flat_raw,
                                            const DepthFrame& frame, const FusionWeights& weights,
                                            const FootprintParams& footprint) {
    if (!decision.values.same_shape(frame.depth) || !flat_raw.values.same_shape(frame.depth) ||
        !decision.valid.same_shape(frame.depth) || !flat_raw.valid.same_shape(frame.depth)) {
        throw std::invalid_argument("dense_candidates: costmaps are not aligned with the depth frame");
    }
    std::vector<CandidateSite> out;
    for (int y = 0; y < frame.height(); ++y) {
        for (int x = 0; x < frame.width(); ++x) {
            if (!frame.valid(x, y) || !decision.valid(x, y) || !flat_raw.valid(x, y)) continue;
            const double score = decision.values(x, y);
            if (!(score >= weights.decision_threshold)) continue;
            const double depth = frame.depth(x, y);
            const double needed =
                footprint.safety_factor * project_uav_radius(footprint.uav_radius_m, depth, frame.intrinsics);
            const double radius = flat_raw.values(x, y);
            if (!(radius >= needed)) continue;
            out.push_back({x, y, depth, score, radius, frame.frame_id});
        }
    }
    return out;
}

WorldSites candidates_to_world(const std::vector<CandidateSite>& candidates, const DepthFrame& frame) {
    WorldSites out;
    out.sites.reserve(candidates.size());
    for (const CandidateSite& c : candidates) {
        if (!frame.is_valid(c.px, c.py)) {
            ++out.skipped;
            continue;
        }
        out.sites.push_back({pixel_to_world(c.px, c.py, frame), c.score, c.frame_id, frame.timestamp});
    }
    return out;
}

}  // namespace landsite
