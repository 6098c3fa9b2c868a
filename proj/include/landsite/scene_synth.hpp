#pragma once

// Analytic ray-cast scenes with exact ground truth, used as test oracles and as a
// deterministic benchmark workload.

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "landsite/geometry.hpp"
#include "landsite/grid.hpp"

namespace landsite {

struct GroundPlane {
    double z = 0.0;
};

struct TiltedPlane {
    Eigen::Vector3d point = Eigen::Vector3d::Zero();
    Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
};

/// Oriented box. Rotation is roll (x), pitch (y), yaw (z) in degrees, applied as
/// Rz(yaw) * Ry(pitch) * Rx(roll).
struct Box {
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    Eigen::Vector3d half_extents = Eigen::Vector3d::Ones();
    Eigen::Vector3d rpy_deg = Eigen::Vector3d::Zero();

    Eigen::Matrix3d rotation() const;
};

struct Sphere {
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    double radius = 1.0;
};

struct Primitive {
    std::variant<GroundPlane, TiltedPlane, Box, Sphere> shape;
    bool safe_pad = false;
};

struct SceneSpec {
    std::vector<Primitive> primitives;
    double noise_sigma_m = 0.0;
    std::uint64_t seed = 0;

    /// Throws ConfigError: at least one primitive, sigma >= 0, positive sizes.
    void validate() const;
};

struct GroundTruth {
    Grid<Eigen::Vector3d> normals;  // world frame, facing the camera
    Grid<std::int32_t> primitive_id;  // -1 where nothing was hit within range
    Grid<std::int32_t> surface_id;    // primitive_id * 8 + face, -1 for no hit
    Grid<double> exact_depth;         // noise-free z-depth; NaN for no hit
    Mask safe;                        // hits on safe-pad primitives with slope <= kSafeSlopeDeg
};

/// Maximum slope of a ground-truth safe pixel.
inline constexpr double kSafeSlopeDeg = 15.0;

struct RenderedFrame {
    DepthFrame frame;
    GroundTruth truth;
};

/// Ray casts every pixel center; nearest hit wins, ties to the lower primitive
/// index. Hits outside `range` (after optional noise) are invalid.
RenderedFrame render_depth(const SceneSpec& scene, const CameraIntrinsics& intrinsics, const Pose& pose,
                           const DepthRange& range = {}, std::int64_t frame_id = 0, double timestamp = 0.0);

/// Pixels with a 4-neighbour on a different surface (or with no hit).
Mask surface_boundary_mask(const GroundTruth& truth);

struct NamedScene {
    std::string name;
    SceneSpec spec;
    Pose camera;                    // default viewpoint
    Eigen::Vector3d focus;          // pad center for FLAT_PAD, scene center otherwise
};

/// 640x480, fx = fy = 400, principal point at the image center.
CameraIntrinsics default_intrinsics();

NamedScene flat_pad_scene();
NamedScene steep_wall_scene();
NamedScene tree_scene(std::uint64_t seed = 7);
NamedScene roof_edge_scene();
/// Primitive 0 is the ground, 1 a safe pad box, 2 a box tilted 25 degrees about y,
/// then a foliage patch of spheres, then randomly tilted debris boxes.
NamedScene rubble_scene(std::uint64_t seed = 1);

/// FLAT_PAD, STEEP_WALL, TREE, ROOF_EDGE, RUBBLE.
std::vector<NamedScene> canonical_scenes();

/// Looks up a canonical scene by name (case-sensitive); throws ConfigError.
NamedScene canonical_scene(const std::string& name);

/// Same, with the seed driving the layout of TREE and RUBBLE and the depth noise of
/// every scene.
NamedScene canonical_scene(const std::string& name, std::uint64_t seed);

nlohmann::json to_json(const SceneSpec& scene);
SceneSpec scene_from_json(const nlohmann::json& j);

/// Deterministic [0, 1) uniform and standard normal draws from a 64-bit Mersenne
/// twister, independent of the standard library's distribution implementations.
class SceneRng {
public:
    explicit SceneRng(std::uint64_t seed);
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace landsite
