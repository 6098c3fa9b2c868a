#pragma once

// Pinhole camera model, rigid poses and the per-pixel geometry shared by every
// pipeline stage.
//
// Conventions:
//   - camera frame: x right, y down, z along the optical axis
//   - world frame:  z up (parallel to gravity, pointing away from it)
//   - depth is z-depth, not ray length
//   - pixel coordinates refer to pixel centers

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <optional>

#include "landsite/grid.hpp"

namespace landsite {

/// Valid depth range of the sensor, meters.
struct DepthRange {
    double min_m = 0.05;
    double max_m = 20.0;

    bool contains(double d) const { return d >= min_m && d <= max_m; }
};

struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;

    /// Throws std::invalid_argument when the invariants do not hold.
    void validate() const;

    /// Square pixels with the principal point at the image center.
    static CameraIntrinsics centered(int width, int height, double fx);
};

/// Rigid transform target_from_source: p_target = rotation * p_source + translation.
struct Pose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    static Pose identity() { return {}; }

    /// Normalizes the quaternion. Throws if its norm deviates from 1 by more than
    /// `tolerance` (the input is expected to already be a unit quaternion).
    static Pose from_quaternion(double qw, double qx, double qy, double qz,
                                const Eigen::Vector3d& translation, double tolerance = 1e-6);

    /// Throws std::invalid_argument unless the rotation is orthonormal with det +1 (to 1e-9).
    void validate() const;

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
    Pose inverse() const;
    Pose compose(const Pose& rhs) const;  // this ∘ rhs
    Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(rotation); }
};

/// World-from-camera pose of a camera at `position` looking straight down (optical
/// axis along world −z), image x along world +x.
Pose nadir_pose(const Eigen::Vector3d& position);

/// Nadir pose with the camera tilted by roll (about camera y) and pitch (about
/// camera x), then yawed about world z. Angles in radians.
Pose tilted_nadir_pose(const Eigen::Vector3d& position, double roll, double pitch, double yaw = 0.0);

struct DepthFrame {
    Grid<double> depth;  // meters
    Mask valid;
    CameraIntrinsics intrinsics;
    Pose pose_world_from_camera;
    std::int64_t frame_id = 0;
    double timestamp = 0.0;

    int width() const { return depth.width(); }
    int height() const { return depth.height(); }
    bool is_valid(int x, int y) const { return valid.contains(x, y) && valid(x, y) != 0; }

    /// Builds a frame from raw depth, marking non-finite or out-of-range pixels invalid.
    static DepthFrame from_depth(Grid<double> depth, const CameraIntrinsics& intrinsics,
                                 const Pose& pose, const DepthRange& range = {},
                                 std::int64_t frame_id = 0, double timestamp = 0.0);
};

struct PointGrid {
    Grid<Eigen::Vector3d> points;
    Mask valid;
};

PointGrid backproject(const DepthFrame& frame);

/// Camera-frame point for a single pixel center at the given depth.
Eigen::Vector3d backproject_pixel(double x, double y, double depth, const CameraIntrinsics& k);

/// Pixel coordinates of a camera-frame point. Empty when the point is not in front
/// of the camera.
std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& p, const CameraIntrinsics& k);

PointGrid transform_points(const PointGrid& points, const Pose& pose);

/// Radius in pixels of a disc of `uav_radius_m` seen at `depth_m`. Throws
/// std::invalid_argument for non-positive depth.
double project_uav_radius(double uav_radius_m, double depth_m, const CameraIntrinsics& k);

/// Throws std::out_of_range if the pixel is outside the frame or invalid.
Eigen::Vector3d pixel_to_world(int x, int y, const DepthFrame& frame);

}  // namespace landsite
