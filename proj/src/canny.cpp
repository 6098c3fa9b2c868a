#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "landsite/costmaps.hpp"

namespace landsite {
namespace {

constexpr int kGaussRadius = 3;

std::array<double, 2 * kGaussRadius + 1> gaussian_kernel() {
    std::array<double, 2 * kGaussRadius + 1> k{};
    double sum = 0.0;
    for (int j = -kGaussRadius; j <= kGaussRadius; ++j) {
        k[j + kGaussRadius] = std::exp(-0.5 * j * j);
        sum += k[j + kGaussRadius];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Gaussian smoothing restricted to valid pixels, border replicated.
Grid<double> smooth_valid(const DepthFrame& frame) {
    const int w = frame.width();
    const int h = frame.height();
    const auto kernel = gaussian_kernel();

    Grid<double> num_h(w, h), den_h(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double num = 0.0, den = 0.0;
            for (int j = -kGaussRadius; j <= kGaussRadius; ++j) {
                const int xc = std::clamp(x + j, 0, w - 1);
                if (!frame.valid(xc, y)) continue;
                num += kernel[j + kGaussRadius] * frame.depth(xc, y);
                den += kernel[j + kGaussRadius];
            }
            num_h(x, y) = num;
            den_h(x, y) = den;
        }
    }

    Grid<double> smoothed(w, h, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double num = 0.0, den = 0.0;
            for (int j = -kGaussRadius; j <= kGaussRadius; ++j) {
                const int yc = std::clamp(y + j, 0, h - 1);
                num += kernel[j + kGaussRadius] * num_h(x, yc);
                den += kernel[j + kGaussRadius] * den_h(x, yc);
            }
            smoothed(x, y) = den > 0.0 ? num / den : 0.0;
        }
    }
    return smoothed;
}

enum class Direction : std::uint8_t { Horizontal, Vertical, Diagonal, AntiDiagonal };

}  // namespace

void CannyThresholds::validate() const {
    if (!(low > 0.0) || !(high > 0.0)) throw ConfigError("canny thresholds must be positive");
    if (low > high) throw ConfigError("canny low threshold exceeds high threshold");
}

BinaryMap canny_edges(const DepthFrame& frame, const CannyThresholds& thresholds) {
    thresholds.validate();
    const int w = frame.width();
    const int h = frame.height();
    BinaryMap edges(w, h, 0);
    if (w == 0 || h == 0) return edges;

    const Grid<double> s = smooth_valid(frame);
    auto at = [&](int x, int y) { return s(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };

    Grid<double> mag(w, h, 0.0);
    Grid<Direction> dir(w, h, Direction::Horizontal);
    const double tan22 = std::tan(std::numbers::pi / 8.0);
    const double tan67 = std::tan(3.0 * std::numbers::pi / 8.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = ((at(x + 1, y - 1) - at(x - 1, y - 1)) + 2.0 * (at(x + 1, y) - at(x - 1, y)) +
                               (at(x + 1, y + 1) - at(x - 1, y + 1))) / 8.0;
            const double gy = ((at(x - 1, y + 1) - at(x - 1, y - 1)) + 2.0 * (at(x, y + 1) - at(x, y - 1)) +
                               (at(x + 1, y + 1) - at(x + 1, y - 1))) / 8.0;
            mag(x, y) = std::hypot(gx, gy);
            const double ax = std::abs(gx);
            const double ay = std::abs(gy);
            if (ay <= ax * tan22) {
                dir(x, y) = Direction::Horizontal;
            } else if (ay >= ax * tan67) {
                dir(x, y) = Direction::Vertical;
            } else {
                dir(x, y) = (gx * gy > 0.0) ? Direction::Diagonal : Direction::AntiDiagonal;
            }
        }
    }

    auto m = [&](int x, int y) { return mag.contains(x, y) ? mag(x, y) : 0.0; };

    // 0 = suppressed, 1 = weak, 2 = strong
    Grid<std::uint8_t> label(w, h, 0);
    std::vector<std::size_t> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = mag(x, y);
            if (v < thresholds.low) continue;
            double prev = 0.0, next = 0.0;
            switch (dir(x, y)) {
                case Direction::Horizontal: prev = m(x - 1, y); next = m(x + 1, y); break;
                case Direction::Vertical: prev = m(x, y - 1); next = m(x, y + 1); break;
                case Direction::Diagonal: prev = m(x - 1, y - 1); next = m(x + 1, y + 1); break;
                case Direction::AntiDiagonal: prev = m(x + 1, y - 1); next = m(x - 1, y + 1); break;
            }
            if (!(v > prev && v >= next)) continue;
            if (v >= thresholds.high) {
                label(x, y) = 2;
                stack.push_back(label.index(x, y));
            } else {
                label(x, y) = 1;
            }
        }
    }

    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        edges[i] = 1;
        const int x = static_cast<int>(i % static_cast<std::size_t>(w));
        const int y = static_cast<int>(i / static_cast<std::size_t>(w));
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = x + dx, ny = y + dy;
                if (!label.contains(nx, ny) || label(nx, ny) != 1) continue;
                label(nx, ny) = 2;
                stack.push_back(label.index(nx, ny));
            }
        }
    }

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (frame.valid(x, y)) continue;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (edges.contains(x + dx, y + dy)) edges(x + dx, y + dy) = 1;
                }
            }
        }
    }
    return edges;
}

}  // namespace landsite
