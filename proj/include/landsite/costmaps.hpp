#pragma once

// Per-pixel hazard costmaps and their fusion into the decision map.
//
//   depth confidence  J_DE = -D^2
//   flatness          J_FL = distance to the nearest depth edge (pixels)
//   steepness         J_N  = exp(-theta^2 / (2 theta_th^2)), theta = slope to world up
//   energy            J_EC = metric distance from the camera to the surface point
//   decision          J    = c1 J_DE + c2 J_FL + c3 J_N + c4 J_EC   (normalized inputs)

#include <Eigen/Core>

#include <cstdint>
#include <numbers>
#include <string_view>

#include "landsite/errors.hpp"
#include "landsite/geometry.hpp"
#include "landsite/grid.hpp"

namespace landsite {

enum class CostmapKind { DepthConfidence, Flatness, Steepness, Energy, Decision };

std::string_view to_string(CostmapKind kind);

struct Costmap {
    Grid<double> values;
    Mask valid;
    CostmapKind kind = CostmapKind::Decision;

    int width() const { return values.width(); }
    int height() const { return values.height(); }
    bool is_valid(int x, int y) const { return valid(x, y) != 0; }
};

/// 1 marks a depth-discontinuity edge.
using BinaryMap = Grid<std::uint8_t>;

struct NormalMap {
    Grid<Eigen::Vector3d> normals;  // world frame, unit length where valid
    Mask valid;
};

struct FusionWeights {
    double c1_depth = 0.05;
    double c2_flatness = 0.4;
    double c3_steepness = 0.4;
    double c4_energy = 0.15;
    double decision_threshold = 0.72;
    double theta_th_rad = 15.0 * std::numbers::pi / 180.0;

    /// Throws ConfigError: each weight in [0, 1], sum 1 within 1e-6, theta_th > 0.
    void validate() const;
};

struct CannyThresholds {
    double low = 0.05;   // meters of depth per pixel
    double high = 0.20;

    void validate() const;  // 0 < low <= high, else ConfigError
};

enum class Orientation { HigherIsBetter, LowerIsBetter };

Costmap depth_confidence_map(const DepthFrame& frame);

/// Canny on the metric depth image: Gaussian (sigma 1, 7 taps) computed as a
/// normalized convolution over valid pixels, Sobel gradients scaled to meters per
/// pixel, non-maximum suppression, 8-connected hysteresis. Invalid pixels and their
/// 8-neighbours are always edges.
BinaryMap canny_edges(const DepthFrame& frame, const CannyThresholds& thresholds);

/// Exact squared Euclidean distance (pixels^2) to the nearest set pixel, with a
/// virtual ring of set pixels just outside the image.
Grid<std::int64_t> squared_distance_transform(const BinaryMap& edges);

/// sqrt of squared_distance_transform. Every pixel is valid.
Costmap distance_transform(const BinaryMap& edges);

/// Inscribed-circle radius in pixels: distance_transform(canny_edges(frame)),
/// masked by depth validity.
Costmap flatness_map(const DepthFrame& frame, const CannyThresholds& thresholds);

/// Averaged 3D gradient normals in the world frame. `smoothing_window` must be odd
/// and >= 1 (ConfigError otherwise).
NormalMap surface_normals(const DepthFrame& frame, int smoothing_window);

/// Slope angle between a unit normal and world up, orientation-free.
double slope_angle(const Eigen::Vector3d& normal);

double steepness_score(double theta_rad, double theta_th_rad);

Costmap steepness_map(const NormalMap& normals, double theta_th_rad);

Costmap energy_map(const DepthFrame& frame);

Costmap minmax_normalize(const Costmap& map, Orientation orientation);

/// Weighted sum of normalized maps. Throws ConfigError on invalid weights and
/// std::invalid_argument on mismatched shapes.
Costmap decision_map(const Costmap& jde, const Costmap& jfl, const Costmap& jn, const Costmap& jec,
                     const FusionWeights& weights);

}  // namespace landsite
