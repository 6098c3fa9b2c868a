#include "landsite/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace landsite {

void CameraIntrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("intrinsics: focal lengths must be positive");
    if (width <= 0 || height <= 0) throw std::invalid_argument("intrinsics: image size must be positive");
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
        throw std::invalid_argument("intrinsics: principal point outside the image");
    }
}

CameraIntrinsics CameraIntrinsics::centered(int width, int height, double fx) {
    return {fx, fx, (width - 1) / 2.0, (height - 1) / 2.0, width, height};
}

Pose Pose::from_quaternion(double qw, double qx, double qy, double qz,
                           const Eigen::Vector3d& translation, double tolerance) {
    Eigen::Quaterniond q(qw, qx, qy, qz);
    const double n = q.norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > tolerance) {
        throw std::invalid_argument("pose: quaternion norm " + std::to_string(n) + " is not unit");
    }
    q.normalize();
    Pose pose;
    pose.rotation = q.toRotationMatrix();
    pose.translation = translation;
    return pose;
}

void Pose::validate() const {
    if (!rotation.allFinite() || !translation.allFinite()) throw std::invalid_argument("pose: non-finite entries");
    const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (ortho > 1e-9 || std::abs(rotation.determinant() - 1.0) > 1e-9) {
        throw std::invalid_argument("pose: rotation is not a proper orthonormal matrix");
    }
}

Pose Pose::inverse() const {
    Pose inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(inv.rotation * translation);
    return inv;
}

Pose Pose::compose(const Pose& rhs) const {
    Pose out;
    out.rotation = rotation * rhs.rotation;
    out.translation = rotation * rhs.translation + translation;
    return out;
}

Pose nadir_pose(const Eigen::Vector3d& position) {
    Pose pose;
    pose.rotation = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
    pose.translation = position;
    return pose;
}

Pose tilted_nadir_pose(const Eigen::Vector3d& position, double roll, double pitch, double yaw) {
    Pose pose = nadir_pose(position);
    const Eigen::Matrix3d cam_tilt =
        (Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitX()) * Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitY()))
            .toRotationMatrix();
    pose.rotation = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix() * pose.rotation * cam_tilt;
    return pose;
}

DepthFrame DepthFrame::from_depth(Grid<double> depth, const CameraIntrinsics& intrinsics, const Pose& pose,
                                  const DepthRange& range, std::int64_t frame_id, double timestamp) {
    if (depth.width() != intrinsics.width || depth.height() != intrinsics.height) {
        throw std::invalid_argument("depth frame: grid size does not match intrinsics");
    }
    DepthFrame frame;
    frame.valid = Mask(depth.width(), depth.height(), 0);
    for (std::size_t i = 0; i < depth.size(); ++i) {
        const double d = depth[i];
        frame.valid[i] = (std::isfinite(d) && range.contains(d)) ? 1 : 0;
    }
    frame.depth = std::move(depth);
    frame.intrinsics = intrinsics;
    frame.pose_world_from_camera = pose;
    frame.frame_id = frame_id;
    frame.timestamp = timestamp;
    return frame;
}

Eigen::Vector3d backproject_pixel(double x, double y, double depth, const CameraIntrinsics& k) {
    return {depth * (x - k.cx) / k.fx, depth * (y - k.cy) / k.fy, depth};
}

std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& p, const CameraIntrinsics& k) {
    if (!(p.z() > 0.0)) return std::nullopt;
    return Eigen::Vector2d(k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy);
}

PointGrid backproject(const DepthFrame& frame) {
    const int w = frame.width();
    const int h = frame.height();
    PointGrid out{Grid<Eigen::Vector3d>(w, h, Eigen::Vector3d::Zero()), frame.valid};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (frame.valid(x, y)) out.points(x, y) = backproject_pixel(x, y, frame.depth(x, y), frame.intrinsics);
        }
    }
    return out;
}

PointGrid transform_points(const PointGrid& points, const Pose& pose) {
    PointGrid out = points;
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        if (out.valid[i]) out.points[i] = pose.apply(points.points[i]);
    }
    return out;
}

double project_uav_radius(double uav_radius_m, double depth_m, const CameraIntrinsics& k) {
    if (!(depth_m > 0.0)) throw std::invalid_argument("project_uav_radius: depth must be positive");
    return k.fx * uav_radius_m / depth_m;
}

Eigen::Vector3d pixel_to_world(int x, int y, const DepthFrame& frame) {
    if (!frame.is_valid(x, y)) {
        throw std::out_of_range("pixel_to_world: pixel (" + std::to_string(x) + ", " + std::to_string(y) +
                                ") is not a valid depth pixel");
    }
    return frame.pose_world_from_camera.apply(backproject_pixel(x, y, frame.depth(x, y), frame.intrinsics));
}

}  // namespace landsite
