#include "landsite/costmaps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace landsite {

std::string_view to_string(CostmapKind kind) {
    switch (kind) {
        case CostmapKind::DepthConfidence: return "depth_confidence";
        case CostmapKind::Flatness: return "flatness";
        case CostmapKind::Steepness: return "steepness";
        case CostmapKind::Energy: return "energy";
        case CostmapKind::Decision: return "decision";
    }
    return "unknown";
}

void FusionWeights::validate() const {
    const double c[] = {c1_depth, c2_flatness, c3_steepness, c4_energy};
    double sum = 0.0;
    for (double ci : c) {
        if (!(ci >= 0.0 && ci <= 1.0)) throw ConfigError("fusion weights must lie in [0, 1]");
        sum += ci;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        throw ConfigError("fusion weights must sum to 1 (got " + std::to_string(sum) + ")");
    }
    if (!(theta_th_rad > 0.0)) throw ConfigError("theta_th must be positive");
    if (!std::isfinite(decision_threshold)) throw ConfigError("decision threshold must be finite");
}

Costmap depth_confidence_map(const DepthFrame& frame) {
    Costmap out{Grid<double>(frame.width(), frame.height(), 0.0), frame.valid, CostmapKind::DepthConfidence};
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (out.valid[i]) out.values[i] = -frame.depth[i] * frame.depth[i];
    }
    return out;
}

NormalMap surface_normals(const DepthFrame& frame, int smoothing_window) {
    if (smoothing_window < 1 || smoothing_window % 2 == 0) {
        throw ConfigError("normal smoothing window must be odd and >= 1");
    }
    const int w = frame.width();
    const int h = frame.height();
    const int r = smoothing_window / 2;
    const int span = 2 * r + 1;
    const CameraIntrinsics& k = frame.intrinsics;
    std::vector<double> rx(static_cast<std::size_t>(w)), ry(static_cast<std::size_t>(h));
    for (int x = 0; x < w; ++x) rx[x] = (x - k.cx) / k.fx;
    for (int y = 0; y < h; ++y) ry[y] = (y - k.cy) / k.fy;
    auto point = [&](int x, int y) {
        const double d = frame.depth(x, y);
        return Eigen::Vector3d(d * rx[x], d * ry[y], d);
    };

    // Row y of the horizontal box sums of the central-difference tangents goes to ring
    // slot y % span. A tangent exists only where both stencil ends are valid.
    const std::size_t ws = static_cast<std::size_t>(w);
    std::vector<Eigen::Vector3d> sh(ws * span, Eigen::Vector3d::Zero()), sv(ws * span, Eigen::Vector3d::Zero());
    std::vector<int> cnt(ws * span, 0);
    std::vector<Eigen::Vector3d> th(ws), tv(ws);
    std::vector<int> ok(ws);
    auto fill_row = [&](int y) {
        const std::size_t base = static_cast<std::size_t>(y % span) * ws;
        std::fill(ok.begin(), ok.end(), 0);
        if (y >= 1 && y + 1 < h) {
            for (int x = 1; x + 1 < w; ++x) {
                if (!frame.valid(x, y) || !frame.valid(x - 1, y) || !frame.valid(x + 1, y) ||
                    !frame.valid(x, y - 1) || !frame.valid(x, y + 1)) {
                    continue;
                }
                th[x] = point(x + 1, y) - point(x - 1, y);
                tv[x] = point(x, y + 1) - point(x, y - 1);
                ok[x] = 1;
            }
        }
        for (int x = r; x + r < w; ++x) {
            Eigen::Vector3d a = Eigen::Vector3d::Zero(), b = Eigen::Vector3d::Zero();
            int c = 0;
            for (int j = -r; j <= r; ++j) {
                if (!ok[x + j]) continue;
                a += th[x + j];
                b += tv[x + j];
                ++c;
            }
            sh[base + x] = a;
            sv[base + x] = b;
            cnt[base + x] = c;
        }
    };

    NormalMap out{Grid<Eigen::Vector3d>(w, h, Eigen::Vector3d::Zero()), Mask(w, h, 0)};
    const int full = span * span;
    const Eigen::Matrix3d& rot = frame.pose_world_from_camera.rotation;
    for (int y = 0; y < std::min(2 * r, h); ++y) fill_row(y);
    std::vector<std::size_t> rows(static_cast<std::size_t>(span));
    for (int y = r; y + r < h; ++y) {
        fill_row(y + r);
        for (int j = -r; j <= r; ++j) rows[j + r] = static_cast<std::size_t>((y + j) % span) * ws;
        for (int x = r; x + r < w; ++x) {
            if (!frame.valid(x, y)) continue;
            int c = 0;
            for (int j = 0; j < span; ++j) c += cnt[rows[j] + x];
            if (c != full) continue;
            // Window sums; the 1/full averaging factor cancels in the normalization.
            Eigen::Vector3d a = Eigen::Vector3d::Zero(), b = Eigen::Vector3d::Zero();
            for (int j = 0; j < span; ++j) {
                a += sh[rows[j] + x];
                b += sv[rows[j] + x];
            }
            Eigen::Vector3d n = a.cross(b);
            const double len2 = n.squaredNorm();
            if (!(len2 > 1e-24 * a.squaredNorm() * b.squaredNorm()) || !(len2 > 0.0)) continue;
            n /= std::sqrt(len2);
            if (n.dot(point(x, y)) > 0.0) n = -n;
            out.normals(x, y) = rot * n;
            out.valid(x, y) = 1;
        }
    }
    return out;
}

double slope_angle(const Eigen::Vector3d& normal) {
    return std::acos(std::min(1.0, std::abs(normal.z())));
}

double steepness_score(double theta_rad, double theta_th_rad) {
    return std::exp(-(theta_rad * theta_rad) / (2.0 * theta_th_rad * theta_th_rad));
}

Costmap steepness_map(const NormalMap& normals, double theta_th_rad) {
    if (!(theta_th_rad > 0.0)) throw ConfigError("theta_th must be positive");
    const int w = normals.normals.width();
    const int h = normals.normals.height();
    Costmap out{Grid<double>(w, h, 0.0), normals.valid, CostmapKind::Steepness};
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (out.valid[i]) out.values[i] = steepness_score(slope_angle(normals.normals[i]), theta_th_rad);
    }
    return out;
}

Costmap energy_map(const DepthFrame& frame) {
    // |world_point - camera_position| = |R p_cam| = |p_cam|
    Costmap out{Grid<double>(frame.width(), frame.height(), 0.0), frame.valid, CostmapKind::Energy};
    for (int y = 0; y < frame.height(); ++y) {
        for (int x = 0; x < frame.width(); ++x) {
            if (!frame.valid(x, y)) continue;
            out.values(x, y) = backproject_pixel(x, y, frame.depth(x, y), frame.intrinsics).norm();
        }
    }
    return out;
}

Costmap minmax_normalize(const Costmap& map, Orientation orientation) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (!map.valid[i]) continue;
        lo = std::min(lo, map.values[i]);
        hi = std::max(hi, map.values[i]);
    }
    Costmap out{Grid<double>(map.width(), map.height(), 0.0), map.valid, map.kind};
    const double range = hi - lo;
    const bool degenerate = !(range >= 1e-12);
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (!map.valid[i]) continue;
        if (degenerate) {
            out.values[i] = 0.5;
        } else if (orientation == Orientation::HigherIsBetter) {
            out.values[i] = (map.values[i] - lo) / range;
        } else {
            out.values[i] = (hi - map.values[i]) / range;
        }
    }
    return out;
}

Costmap decision_map(const Costmap& jde, const Costmap& jfl, const Costmap& jn, const Costmap& jec,
                     const FusionWeights& weights) {
    weights.validate();
    if (!jde.values.same_shape(jfl.values) || !jde.values.same_shape(jn.values) ||
        !jde.values.same_shape(jec.values)) {
        throw std::invalid_argument("decision_map: costmaps have different shapes");
    }
    Costmap out{Grid<double>(jde.width(), jde.height(), 0.0), Mask(jde.width(), jde.height(), 0),
                CostmapKind::Decision};
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (!(jde.valid[i] && jfl.valid[i] && jn.valid[i] && jec.valid[i])) continue;
        const double j = weights.c1_depth * jde.values[i] + weights.c2_flatness * jfl.values[i] +
                         weights.c3_steepness * jn.values[i] + weights.c4_energy * jec.values[i];
        out.values[i] = std::clamp(j, 0.0, 1.0);
        out.valid[i] = 1;
    }
    return out;
}

}  // namespace landsite
