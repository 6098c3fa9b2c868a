#pragma once

// Test-only reference implementations. None of these share code with the library
// paths they check.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <vector>

#include "landsite/costmaps.hpp"
#include "landsite/detection.hpp"
#include "landsite/registry.hpp"

namespace oracle {

/// O(N * M) squared EDT: every pixel against every set pixel and every pixel of the
/// one-pixel ring around the image.
inline std::vector<std::int64_t> brute_force_sq_edt(const landsite::BinaryMap& b) {
    const int w = b.width(), h = b.height();
    std::vector<std::pair<int, int>> sites;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (b(x, y)) sites.emplace_back(x, y);
    for (int x = -1; x <= w; ++x) {
        sites.emplace_back(x, -1);
        sites.emplace_back(x, h);
    }
    for (int y = 0; y < h; ++y) {
        sites.emplace_back(-1, y);
        sites.emplace_back(w, y);
    }
    std::vector<std::int64_t> out(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::int64_t best = std::numeric_limits<std::int64_t>::max();
            for (const auto& [sx, sy] : sites) {
                const std::int64_t dx = x - sx, dy = y - sy;
                best = std::min(best, dx * dx + dy * dy);
            }
            out[static_cast<std::size_t>(y) * w + x] = best;
        }
    }
    return out;
}

/// Straightforward Canny on a replicate-padded copy of the depth image: the same
/// arithmetic as the definition (normalized 7-tap Gaussian over valid pixels, Sobel/8,
/// 4-sector NMS with (>, >=), 8-connected hysteresis by BFS, invalid pixels and
/// their neighbours forced on).
inline std::vector<std::uint8_t> naive_canny(const landsite::DepthFrame& f, double low, double high) {
    const int w = f.width(), h = f.height();
    const int pad = 3;
    const int pw = w + 2 * pad, ph = h + 2 * pad;
    auto src = [&](int px, int py) { return std::pair{std::clamp(px - pad, 0, w - 1), std::clamp(py - pad, 0, h - 1)}; };

    double kernel[7];
    double ksum = 0.0;
    for (int j = -3; j <= 3; ++j) {
        kernel[j + 3] = std::exp(-0.5 * j * j);
        ksum += kernel[j + 3];
    }
    for (double& k : kernel) k /= ksum;

    // Padded valid-weighted depth and weights.
    std::vector<double> d(static_cast<std::size_t>(pw) * ph), v(d.size());
    for (int py = 0; py < ph; ++py) {
        for (int px = 0; px < pw; ++px) {
            const auto [x, y] = src(px, py);
            const bool ok = f.valid(x, y) != 0;
            d[py * pw + px] = ok ? f.depth(x, y) : 0.0;
            v[py * pw + px] = ok ? 1.0 : 0.0;
        }
    }
    // Horizontal pass on every padded row (rows are already replicated).
    std::vector<double> nh(d.size(), 0.0), dh(d.size(), 0.0);
    for (int py = 0; py < ph; ++py) {
        for (int x = 0; x < w; ++x) {
            double num = 0.0, den = 0.0;
            for (int j = -3; j <= 3; ++j) {
                const int i = py * pw + (x + pad + j);
                if (v[i] == 0.0) continue;
                num += kernel[j + 3] * d[i];
                den += kernel[j + 3];
            }
            nh[py * pw + x + pad] = num;
            dh[py * pw + x + pad] = den;
        }
    }
    std::vector<double> s(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double num = 0.0, den = 0.0;
            for (int j = -3; j <= 3; ++j) {
                const int i = (y + pad + j) * pw + x + pad;
                num += kernel[j + 3] * nh[i];
                den += kernel[j + 3] * dh[i];
            }
            s[y * w + x] = den > 0.0 ? num / den : 0.0;
        }
    }
    // Replicate-pad the smoothed image by one pixel for Sobel.
    const int sw = w + 2;
    std::vector<double> sp(static_cast<std::size_t>(sw) * (h + 2));
    for (int y = -1; y <= h; ++y)
        for (int x = -1; x <= w; ++x)
            sp[(y + 1) * sw + (x + 1)] = s[std::clamp(y, 0, h - 1) * w + std::clamp(x, 0, w - 1)];
    auto S = [&](int x, int y) { return sp[(y + 1) * sw + (x + 1)]; };

    std::vector<double> mag(s.size());
    std::vector<int> sector(s.size());
    const double t22 = std::tan(M_PI / 8.0), t67 = std::tan(3.0 * M_PI / 8.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = ((S(x + 1, y - 1) - S(x - 1, y - 1)) + 2.0 * (S(x + 1, y) - S(x - 1, y)) +
                               (S(x + 1, y + 1) - S(x - 1, y + 1))) / 8.0;
            const double gy = ((S(x - 1, y + 1) - S(x - 1, y - 1)) + 2.0 * (S(x, y + 1) - S(x, y - 1)) +
                               (S(x + 1, y + 1) - S(x + 1, y - 1))) / 8.0;
            mag[y * w + x] = std::hypot(gx, gy);
            const double ax = std::fabs(gx), ay = std::fabs(gy);
            sector[y * w + x] = ay <= ax * t22 ? 0 : ay >= ax * t67 ? 1 : (gx * gy > 0.0 ? 2 : 3);
        }
    }
    auto M = [&](int x, int y) { return (x < 0 || y < 0 || x >= w || y >= h) ? 0.0 : mag[y * w + x]; };
    static const int off[4][4] = {{-1, 0, 1, 0}, {0, -1, 0, 1}, {-1, -1, 1, 1}, {1, -1, -1, 1}};

    std::vector<int> state(s.size(), 0);  // 1 weak, 2 strong
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double m = mag[y * w + x];
            if (m < low) continue;
            const int* o = off[sector[y * w + x]];
            if (m > M(x + o[0], y + o[1]) && m >= M(x + o[2], y + o[3])) state[y * w + x] = m >= high ? 2 : 1;
        }
    }
    std::vector<std::uint8_t> out(s.size(), 0);
    std::deque<int> queue;
    for (int i = 0; i < w * h; ++i)
        if (state[i] == 2) queue.push_back(i);
    while (!queue.empty()) {
        const int i = queue.front();
        queue.pop_front();
        if (out[i]) continue;
        out[i] = 1;
        const int x = i % w, y = i / w;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = x + dx, ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                if (state[ny * w + nx] >= 1 && !out[ny * w + nx]) queue.push_back(ny * w + nx);
            }
    }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            bool near_invalid = false;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx >= 0 && ny >= 0 && nx < w && ny < h && !f.valid(nx, ny)) near_invalid = true;
                }
            if (near_invalid) out[y * w + x] = 1;
        }
    return out;
}

/// Linear-scan nearest neighbour; ties to the lowest index.
inline std::pair<std::size_t, double> linear_nearest(const std::vector<Eigen::Vector3d>& pts, const Eigen::Vector3d& q) {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d2 = (pts[i] - q).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return {best, std::sqrt(best_d2)};
}

/// Linear-scan dedup registry.
inline std::vector<Eigen::Vector3d> linear_dedup(const std::vector<Eigen::Vector3d>& inputs, double radius) {
    std::vector<Eigen::Vector3d> kept;
    for (const auto& p : inputs) {
        bool close = false;
        for (const auto& k : kept) {
            if ((k - p).norm() < radius) {
                close = true;
                break;
            }
        }
        if (!close) kept.push_back(p);
    }
    return kept;
}

/// O(N^2) union-find over all linkable pairs. Returns a component label per site,
/// labelled by the smallest member index.
inline std::vector<std::size_t> brute_force_components(const std::vector<Eigen::Vector3d>& pts, double dist_th,
                                                       double z_th, bool horizontal) {
    std::vector<std::size_t> parent(pts.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i];
        return i;
    };
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const Eigen::Vector3d d = pts[i] - pts[j];
            const double planar = horizontal ? std::sqrt(d.x() * d.x() + d.y() * d.y()) : d.norm();
            if (planar <= dist_th && std::fabs(d.z()) <= z_th) {
                const std::size_t a = find(i), b = find(j);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
        }
    }
    std::vector<std::size_t> label(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) label[i] = find(i);
    return label;
}

/// Component label per site from library clusters, labelled by smallest member.
inline std::vector<std::size_t> labels_from_clusters(const std::vector<landsite::ClusterSite>& clusters, std::size_t n) {
    std::vector<std::size_t> label(n, std::numeric_limits<std::size_t>::max());
    for (const auto& c : clusters) {
        const std::size_t root = *std::min_element(c.members.begin(), c.members.end());
        for (std::size_t m : c.members) label[m] = root;
    }
    return label;
}

}  // namespace oracle
