#include "landsite/scene_synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "landsite/errors.hpp"

namespace landsite {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kEps = 1e-9;

struct Hit {
    double t = std::numeric_limits<double>::infinity();
    Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
    int face = 0;
};

// Rays are o + t d with d = R (u, v, 1), so t is the camera z-depth.
std::optional<Hit> intersect_plane(const Eigen::Vector3d& p0, const Eigen::Vector3d& n, const Eigen::Vector3d& o,
                                   const Eigen::Vector3d& d) {
    const double denom = d.dot(n);
    if (std::abs(denom) < 1e-15) return std::nullopt;
    const double t = (p0 - o).dot(n) / denom;
    if (!(t > kEps)) return std::nullopt;
    return Hit{t, n, 0};
}

std::optional<Hit> intersect(const GroundPlane& g, const Eigen::Vector3d& o, const Eigen::Vector3d& d) {
    return intersect_plane(Eigen::Vector3d(0.0, 0.0, g.z), Eigen::Vector3d::UnitZ(), o, d);
}

std::optional<Hit> intersect(const TiltedPlane& p, const Eigen::Vector3d& o, const Eigen::Vector3d& d) {
    return intersect_plane(p.point, p.normal.normalized(), o, d);
}

std::optional<Hit> intersect_box(const Box& b, const Eigen::Matrix3d& rot, const Eigen::Vector3d& o,
                                 const Eigen::Vector3d& d) {
    const Eigen::Vector3d ol = rot.transpose() * (o - b.center);
    const Eigen::Vector3d dl = rot.transpose() * d;
    double t_near = -std::numeric_limits<double>::infinity();
    double t_far = std::numeric_limits<double>::infinity();
    int near_axis = -1;
    double near_sign = 0.0;
    for (int a = 0; a < 3; ++a) {
        const double h = b.half_extents[a];
        if (std::abs(dl[a]) < 1e-15) {
            if (ol[a] < -h || ol[a] > h) return std::nullopt;
            continue;
        }
        double t1 = (-h - ol[a]) / dl[a];
        double t2 = (h - ol[a]) / dl[a];
        double sign = -1.0;  // entering through the -h face
        if (t1 > t2) {
            std::swap(t1, t2);
            sign = 1.0;
        }
        if (t1 > t_near) {
            t_near = t1;
            near_axis = a;
            near_sign = sign;
        }
        t_far = std::min(t_far, t2);
    }
    if (near_axis < 0 || t_near > t_far || !(t_near > kEps)) return std::nullopt;
    Eigen::Vector3d nl = Eigen::Vector3d::Zero();
    nl[near_axis] = near_sign;
    return Hit{t_near, rot * nl, near_axis * 2 + (near_sign > 0.0 ? 1 : 0)};
}

std::optional<Hit> intersect(const Sphere& s, const Eigen::Vector3d& o, const Eigen::Vector3d& d) {
    const Eigen::Vector3d oc = o - s.center;
    const double a = d.squaredNorm();
    const double half_b = oc.dot(d);
    const double c = oc.squaredNorm() - s.radius * s.radius;
    const double disc = half_b * half_b - a * c;
    if (disc < 0.0) return std::nullopt;
    const double t = (-half_b - std::sqrt(disc)) / a;
    if (!(t > kEps)) return std::nullopt;
    return Hit{t, (o + t * d - s.center) / s.radius, 0};
}

struct PixelRect {
    int x0, y0, x1, y1;  // inclusive
};

// Conservative pixel rectangle covering the projection of a set of world corners.
PixelRect project_bounds(const std::vector<Eigen::Vector3d>& corners, const Pose& cam_from_world,
                         const CameraIntrinsics& k) {
    const PixelRect full{0, 0, k.width - 1, k.height - 1};
    double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
    double xmax = -xmin, ymax = -xmin;
    for (const Eigen::Vector3d& c : corners) {
        const Eigen::Vector3d p = cam_from_world.apply(c);
        if (p.z() < 1e-6) return full;
        const auto px = project(p, k);
        xmin = std::min(xmin, px->x());
        xmax = std::max(xmax, px->x());
        ymin = std::min(ymin, px->y());
        ymax = std::max(ymax, px->y());
    }
    PixelRect r{static_cast<int>(std::floor(xmin)) - 1, static_cast<int>(std::floor(ymin)) - 1,
                static_cast<int>(std::ceil(xmax)) + 1, static_cast<int>(std::ceil(ymax)) + 1};
    r.x0 = std::max(r.x0, 0);
    r.y0 = std::max(r.y0, 0);
    r.x1 = std::min(r.x1, k.width - 1);
    r.y1 = std::min(r.y1, k.height - 1);
    return r;
}

std::vector<Eigen::Vector3d> box_corners(const Eigen::Vector3d& center, const Eigen::Matrix3d& rot,
                                         const Eigen::Vector3d& half) {
    std::vector<Eigen::Vector3d> out;
    for (int i = 0; i < 8; ++i) {
        const Eigen::Vector3d s((i & 1) ? 1.0 : -1.0, (i & 2) ? 1.0 : -1.0, (i & 4) ? 1.0 : -1.0);
        out.push_back(center + rot * half.cwiseProduct(s));
    }
    return out;
}

Eigen::Vector3d vec3(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) throw ConfigError("scene: expected a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json arr(const Eigen::Vector3d& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

}  // namespace

Eigen::Matrix3d Box::rotation() const {
    return (Eigen::AngleAxisd(rpy_deg.z() * kDeg, Eigen::Vector3d::UnitZ()) *
            Eigen::AngleAxisd(rpy_deg.y() * kDeg, Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(rpy_deg.x() * kDeg, Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
}

void SceneSpec::validate() const {
    if (primitives.empty()) throw ConfigError("scene: at least one primitive is required");
    if (!(noise_sigma_m >= 0.0)) throw ConfigError("scene: noise sigma must be non-negative");
    for (const Primitive& p : primitives) {
        if (const auto* b = std::get_if<Box>(&p.shape); b && !(b->half_extents.minCoeff() > 0.0)) {
            throw ConfigError("scene: box half extents must be positive");
        }
        if (const auto* s = std::get_if<Sphere>(&p.shape); s && !(s->radius > 0.0)) {
            throw ConfigError("scene: sphere radius must be positive");
        }
        if (const auto* t = std::get_if<TiltedPlane>(&p.shape); t && !(t->normal.norm() > 0.0)) {
            throw ConfigError("scene: plane normal must be non-zero");
        }
    }
}

SceneRng::SceneRng(std::uint64_t seed) : engine_(seed) {}

double SceneRng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SceneRng::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RenderedFrame render_depth(const SceneSpec& scene, const CameraIntrinsics& k, const Pose& pose,
                           const DepthRange& range, std::int64_t frame_id, double timestamp) {
    scene.validate();
    k.validate();
    pose.validate();
    const int w = k.width;
    const int h = k.height;
    const Pose cam_from_world = pose.inverse();
    const Eigen::Vector3d origin = pose.translation;

    Grid<double> best_t(w, h, std::numeric_limits<double>::infinity());
    GroundTruth truth{Grid<Eigen::Vector3d>(w, h, Eigen::Vector3d::Zero()), Grid<std::int32_t>(w, h, -1),
                      Grid<std::int32_t>(w, h, -1), Grid<double>(w, h, std::numeric_limits<double>::quiet_NaN()),
                      Mask(w, h, 0)};

    for (std::size_t pi = 0; pi < scene.primitives.size(); ++pi) {
        const Primitive& prim = scene.primitives[pi];
        PixelRect rect{0, 0, w - 1, h - 1};
        Eigen::Matrix3d box_rot = Eigen::Matrix3d::Identity();
        if (const auto* b = std::get_if<Box>(&prim.shape)) {
            box_rot = b->rotation();
            rect = project_bounds(box_corners(b->center, box_rot, b->half_extents), cam_from_world, k);
        } else if (const auto* s = std::get_if<Sphere>(&prim.shape)) {
            rect = project_bounds(box_corners(s->center, Eigen::Matrix3d::Identity(), Eigen::Vector3d::Constant(s->radius)),
                                  cam_from_world, k);
        }
        for (int y = rect.y0; y <= rect.y1; ++y) {
            for (int x = rect.x0; x <= rect.x1; ++x) {
                const Eigen::Vector3d d = pose.rotation * Eigen::Vector3d((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
                std::optional<Hit> hit;
                if (const auto* b = std::get_if<Box>(&prim.shape)) {
                    hit = intersect_box(*b, box_rot, origin, d);
                } else {
                    hit = std::visit(
                        [&](const auto& shape) -> std::optional<Hit> {
                            if constexpr (std::is_same_v<std::decay_t<decltype(shape)>, Box>) {
                                return std::nullopt;
                            } else {
                                return intersect(shape, origin, d);
                            }
                        },
                        prim.shape);
                }
                if (!hit || !(hit->t < best_t(x, y))) continue;
                best_t(x, y) = hit->t;
                Eigen::Vector3d n = hit->normal;
                if (n.dot(d) > 0.0) n = -n;
                truth.normals(x, y) = n;
                truth.primitive_id(x, y) = static_cast<std::int32_t>(pi);
                truth.surface_id(x, y) = static_cast<std::int32_t>(pi) * 8 + hit->face;
            }
        }
    }

    Grid<double> depth(w, h, std::numeric_limits<double>::quiet_NaN());
    SceneRng rng(scene.seed);
    const double safe_cos = std::cos(kSafeSlopeDeg * kDeg);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double t = best_t(x, y);
            if (!std::isfinite(t)) continue;
            double measured = t;
            if (scene.noise_sigma_m > 0.0) measured += scene.noise_sigma_m * rng.normal();
            if (!range.contains(t)) {
                // Out-of-range surfaces are unobservable; keep only the label-free truth.
                truth.primitive_id(x, y) = -1;
                truth.surface_id(x, y) = -1;
                continue;
            }
            truth.exact_depth(x, y) = t;
            depth(x, y) = measured;
            const int pid = truth.primitive_id(x, y);
            if (scene.primitives[static_cast<std::size_t>(pid)].safe_pad &&
                std::abs(truth.normals(x, y).z()) >= safe_cos) {
                truth.safe(x, y) = 1;
            }
        }
    }

    RenderedFrame out{DepthFrame::from_depth(std::move(depth), k, pose, range, frame_id, timestamp), std::move(truth)};
    return out;
}

Mask surface_boundary_mask(const GroundTruth& truth) {
    const auto& sid = truth.surface_id;
    Mask out(sid.width(), sid.height(), 0);
    for (int y = 0; y < sid.height(); ++y) {
        for (int x = 0; x < sid.width(); ++x) {
            const int here = sid(x, y);
            if (here < 0) {
                out(x, y) = 1;
                continue;
            }
            const int nx[] = {x - 1, x + 1, x, x};
            const int ny[] = {y, y, y - 1, y + 1};
            for (int i = 0; i < 4; ++i) {
                if (sid.contains(nx[i], ny[i]) && sid(nx[i], ny[i]) != here) {
                    out(x, y) = 1;
                    break;
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Canonical scenes

CameraIntrinsics default_intrinsics() { return CameraIntrinsics::centered(640, 480, 400.0); }

NamedScene flat_pad_scene() {
    SceneSpec s;
    s.primitives.push_back({GroundPlane{0.0}, false});
    s.primitives.push_back({Box{{0.0, 0.0, 1.0}, {4.0, 4.0, 1.0}, Eigen::Vector3d::Zero()}, true});
    return {"FLAT_PAD", s, nadir_pose({0.0, 0.0, 12.0}), {0.0, 0.0, 2.0}};
}

NamedScene steep_wall_scene() {
    SceneSpec s;
    const double tilt = 25.0 * kDeg;
    s.primitives.push_back({TiltedPlane{Eigen::Vector3d::Zero(), {0.0, -std::sin(tilt), std::cos(tilt)}}, false});
    return {"STEEP_WALL", s, nadir_pose({0.0, 0.0, 8.0}), Eigen::Vector3d::Zero()};
}

NamedScene tree_scene(std::uint64_t seed) {
    SceneSpec s;
    s.seed = seed;
    s.primitives.push_back({GroundPlane{0.0}, false});
    // Foliage: small clumps spread through a 3 m deep canopy layer.
    SceneRng rng(seed);
    const double spacing = 0.08;
    for (double y = -5.5; y <= 5.5; y += spacing) {
        for (double x = -7.0; x <= 7.0; x += spacing) {
            const Eigen::Vector3d c(x + rng.uniform(-0.3, 0.3) * spacing, y + rng.uniform(-0.3, 0.3) * spacing,
                                    rng.uniform(2.0, 5.0));
            s.primitives.push_back({Sphere{c, 0.065}, false});
        }
    }
    return {"TREE", s, nadir_pose({0.0, 0.0, 10.0}), {0.0, 0.0, 3.5}};
}

NamedScene roof_edge_scene() {
    SceneSpec s;
    s.primitives.push_back({GroundPlane{0.0}, false});
    s.primitives.push_back({Box{{-5.0, 0.0, 3.0}, {5.0, 8.0, 3.0}, Eigen::Vector3d::Zero()}, true});
    return {"ROOF_EDGE", s, nadir_pose({-1.5, 0.0, 12.0}), {-1.5, 0.0, 6.0}};
}

NamedScene rubble_scene(std::uint64_t seed) {
    SceneSpec s;
    s.seed = seed;
    s.primitives.push_back({GroundPlane{0.0}, false});
    // Fixed features in the upper half of the view: a landable slab, a 25 degree
    // ramp and a patch of foliage. Random debris stays in the lower half.
    s.primitives.push_back({Box{{-5.5, 3.5, 0.4}, {1.5, 1.5, 0.4}, Eigen::Vector3d::Zero()}, true});
    s.primitives.push_back({Box{{5.5, 3.5, 0.6}, {1.8, 1.8, 0.2}, {0.0, 25.0, 0.0}}, false});
    SceneRng rng(seed);
    const double spacing = 0.08;
    for (double y = 2.5; y <= 6.0; y += spacing) {
        for (double x = -2.0; x <= 2.0; x += spacing) {
            const Eigen::Vector3d c(x + rng.uniform(-0.3, 0.3) * spacing, y + rng.uniform(-0.3, 0.3) * spacing,
                                    rng.uniform(2.0, 5.0));
            s.primitives.push_back({Sphere{c, 0.065}, false});
        }
    }
    const int count = 30 + static_cast<int>(rng.uniform() * 30.0);
    for (int i = 0; i < count; ++i) {
        Box b;
        b.half_extents = {rng.uniform(0.3, 1.6), rng.uniform(0.3, 1.6), rng.uniform(0.15, 0.9)};
        b.center = {rng.uniform(-8.0, 8.0), rng.uniform(-6.5, -0.8), rng.uniform(0.0, 1.2) * b.half_extents.z()};
        b.rpy_deg = {rng.uniform(-35.0, 35.0), rng.uniform(-35.0, 35.0), rng.uniform(0.0, 180.0)};
        s.primitives.push_back({b, false});
    }
    return {"RUBBLE", s, nadir_pose({0.0, 0.0, 12.0}), {-5.5, 3.5, 0.8}};
}

std::vector<NamedScene> canonical_scenes() {
    return {flat_pad_scene(), steep_wall_scene(), tree_scene(), roof_edge_scene(), rubble_scene()};
}

NamedScene canonical_scene(const std::string& name) {
    for (NamedScene& s : canonical_scenes()) {
        if (s.name == name) return s;
    }
    throw ConfigError("unknown scene '" + name + "'");
}

NamedScene canonical_scene(const std::string& name, std::uint64_t seed) {
    if (name == "TREE") return tree_scene(seed);
    if (name == "RUBBLE") return rubble_scene(seed);
    NamedScene s = canonical_scene(name);
    s.spec.seed = seed;
    return s;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const SceneSpec& scene) {
    nlohmann::json prims = nlohmann::json::array();
    for (const Primitive& p : scene.primitives) {
        nlohmann::json j = std::visit(
            [](const auto& shape) -> nlohmann::json {
                using T = std::decay_t<decltype(shape)>;
                if constexpr (std::is_same_v<T, GroundPlane>) {
                    return {{"type", "ground"}, {"z_m", shape.z}};
                } else if constexpr (std::is_same_v<T, TiltedPlane>) {
                    return {{"type", "plane"}, {"point_m", arr(shape.point)}, {"normal", arr(shape.normal)}};
                } else if constexpr (std::is_same_v<T, Box>) {
                    return {{"type", "box"},
                            {"center_m", arr(shape.center)},
                            {"half_extents_m", arr(shape.half_extents)},
                            {"rpy_deg", arr(shape.rpy_deg)}};
                } else {
                    return {{"type", "sphere"}, {"center_m", arr(shape.center)}, {"radius_m", shape.radius}};
                }
            },
            p.shape);
        j["safe_pad"] = p.safe_pad;
        prims.push_back(std::move(j));
    }
    return {{"primitives", prims}, {"noise_sigma_m", scene.noise_sigma_m}, {"seed", scene.seed}};
}

SceneSpec scene_from_json(const nlohmann::json& j) {
    SceneSpec s;
    try {
        for (const auto& p : j.at("primitives")) {
            const std::string type = p.at("type").get<std::string>();
            Primitive prim;
            prim.safe_pad = p.value("safe_pad", false);
            if (type == "ground") {
                prim.shape = GroundPlane{p.at("z_m").get<double>()};
            } else if (type == "plane") {
                prim.shape = TiltedPlane{vec3(p.at("point_m")), vec3(p.at("normal"))};
            } else if (type == "box") {
                prim.shape = Box{vec3(p.at("center_m")), vec3(p.at("half_extents_m")),
                                 p.contains("rpy_deg") ? vec3(p.at("rpy_deg")) : Eigen::Vector3d::Zero()};
            } else if (type == "sphere") {
                prim.shape = Sphere{vec3(p.at("center_m")), p.at("radius_m").get<double>()};
            } else {
                throw ConfigError("scene: unknown primitive type '" + type + "'");
            }
            s.primitives.push_back(std::move(prim));
        }
        s.noise_sigma_m = j.value("noise_sigma_m", 0.0);
        s.seed = j.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scene: ") + e.what());
    }
    s.validate();
    return s;
}

}  // namespace landsite
