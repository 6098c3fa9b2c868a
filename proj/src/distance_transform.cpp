#include <cmath>
#include <vector>

#include "landsite/costmaps.hpp"

// Exact two-pass squared EDT (Meijster / Felzenszwalb lower envelope). The row pass
// computes 1D distances to the nearest set pixel; the column pass takes the lower
// envelope of parabolas (y - i)^2 + g(i)^2. Integer arithmetic throughout, so the
// result is exact.

namespace landsite {
namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

Grid<std::int64_t> squared_distance_transform(const BinaryMap& edges) {
    const int w = edges.width();
    const int h = edges.height();
    Grid<std::int64_t> out(w, h, 0);
    if (w == 0 || h == 0) return out;

    // Row pass; the virtual border pixels sit at x = -1 and x = w.
    Grid<std::int64_t> g(w, h, 0);
    for (int y = 0; y < h; ++y) {
        std::int64_t run = 0;
        for (int x = 0; x < w; ++x) {
            run = edges(x, y) ? 0 : run + 1;
            g(x, y) = run;
        }
        run = 0;
        for (int x = w - 1; x >= 0; --x) {
            run = edges(x, y) ? 0 : run + 1;
            if (run < g(x, y)) g(x, y) = run;
        }
    }

    // Column pass over sites i = -1 .. h (the outer two with g = 0).
    const int n_sites = h + 2;
    std::vector<std::int64_t> f(static_cast<std::size_t>(n_sites));
    std::vector<std::int64_t> site(static_cast<std::size_t>(n_sites));
    std::vector<std::int64_t> start(static_cast<std::size_t>(n_sites));
    auto fsite = [&](std::int64_t i) { return f[static_cast<std::size_t>(i + 1)]; };
    auto parabola = [&](std::int64_t y, std::int64_t i) { return (y - i) * (y - i) + fsite(i); };
    auto sep = [&](std::int64_t i, std::int64_t u) {
        return floor_div(u * u - i * i + fsite(u) - fsite(i), 2 * (u - i));
    };

    for (int x = 0; x < w; ++x) {
        f.front() = 0;
        f.back() = 0;
        for (int y = 0; y < h; ++y) f[static_cast<std::size_t>(y + 1)] = g(x, y) * g(x, y);

        int q = 0;
        site[0] = -1;
        start[0] = 0;
        for (std::int64_t u = 0; u <= h; ++u) {
            while (q >= 0 && parabola(start[q], site[q]) > parabola(start[q], u)) --q;
            if (q < 0) {
                q = 0;
                site[0] = u;
                start[0] = 0;
            } else {
                const std::int64_t bound = 1 + sep(site[q], u);
                if (bound < h) {
                    ++q;
                    site[q] = u;
                    start[q] = bound;
                }
            }
        }
        for (int y = h - 1; y >= 0; --y) {
            out(x, y) = parabola(y, site[q]);
            if (y == start[q]) --q;
        }
    }
    return out;
}

Costmap distance_transform(const BinaryMap& edges) {
    const Grid<std::int64_t> sq = squared_distance_transform(edges);
    Costmap out{Grid<double>(edges.width(), edges.height(), 0.0), Mask(edges.width(), edges.height(), 1),
                CostmapKind::Flatness};
    for (std::size_t i = 0; i < sq.size(); ++i) out.values[i] = std::sqrt(static_cast<double>(sq[i]));
    return out;
}

Costmap flatness_map(const DepthFrame& frame, const CannyThresholds& thresholds) {
    Costmap out = distance_transform(canny_edges(frame, thresholds));
    out.valid = frame.valid;
    return out;
}

}  // namespace landsite
