#include "landsite/registry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "landsite/errors.hpp"

namespace landsite {

// ---------------------------------------------------------------------------
// KdTree

std::size_t KdTree::insert(const Eigen::Vector3d& p) {
    points_.push_back(p);
    const std::size_t pending = points_.size() - built_;
    if (pending > std::max<std::size_t>(16, built_ / 2)) rebuild();
    return points_.size() - 1;
}

void KdTree::rebuild() {
    built_ = points_.size();
    order_.resize(built_);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    axis_.assign(built_, 0);
    build(0, built_, 0);
}

void KdTree::build(std::size_t lo, std::size_t hi, int depth) {
    if (hi - lo <= 1) return;
    const int axis = depth % 3;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(lo), order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::size_t a, std::size_t b) {
                         const double pa = points_[a][axis], pb = points_[b][axis];
                         return pa < pb || (pa == pb && a < b);
                     });
    axis_[mid] = axis;
    build(lo, mid, depth + 1);
    build(mid + 1, hi, depth + 1);
}

void KdTree::search(std::size_t lo, std::size_t hi, const Eigen::Vector3d& q, double& best_d2,
                    std::size_t& best) const {
    if (lo >= hi) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::size_t idx = order_[mid];
    const double d2 = (points_[idx] - q).squaredNorm();
    if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
        best_d2 = d2;
        best = idx;
    }
    if (hi - lo == 1) return;
    const int axis = axis_[mid];
    const double diff = q[axis] - points_[idx][axis];
    const bool left_first = diff <= 0.0;
    if (left_first) {
        search(lo, mid, q, best_d2, best);
        if (diff * diff <= best_d2) search(mid + 1, hi, q, best_d2, best);
    } else {
        search(mid + 1, hi, q, best_d2, best);
        if (diff * diff <= best_d2) search(lo, mid, q, best_d2, best);
    }
}

std::optional<KdTree::Hit> KdTree::nearest(const Eigen::Vector3d& q) const {
    if (points_.empty()) return std::nullopt;
    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t best = std::numeric_limits<std::size_t>::max();
    search(0, built_, q, best_d2, best);
    for (std::size_t i = built_; i < points_.size(); ++i) {
        const double d2 = (points_[i] - q).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
            best_d2 = d2;
            best = i;
        }
    }
    return Hit{best, std::sqrt(best_d2)};
}

// ---------------------------------------------------------------------------
// SiteRegistry

SiteRegistry::SiteRegistry(double dedup_radius_m) : dedup_radius_(dedup_radius_m) {
    if (!(dedup_radius_m >= 0.0) || !std::isfinite(dedup_radius_m)) {
        throw ConfigError("dedup radius must be finite and non-negative");
    }
}

bool SiteRegistry::insert_site(const LandingSite& site) {
    if (!site.position.allFinite()) throw std::invalid_argument("insert_site: non-finite site position");
    if (!(site.score >= 0.0 && site.score <= 1.0)) throw std::invalid_argument("insert_site: score outside [0, 1]");
    if (const auto hit = tree_.nearest(site.position); hit && hit->distance < dedup_radius_) return false;
    sites_.push_back(site);
    tree_.insert(site.position);
    return true;
}

// ---------------------------------------------------------------------------
// Clustering

std::string_view to_string(ClusterMetric metric) {
    return metric == ClusterMetric::Horizontal ? "xy" : "xyz";
}

ClusterMetric cluster_metric_from_string(std::string_view s) {
    if (s == "xy") return ClusterMetric::Horizontal;
    if (s == "xyz") return ClusterMetric::Full3d;
    throw ConfigError("cluster metric must be 'xy' or 'xyz', got '" + std::string(s) + "'");
}

bool linkable(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const ClusterParams& params) {
    const Eigen::Vector3d d = a - b;
    if (std::abs(d.z()) > params.z_th_m) return false;
    const double dist2 = params.metric == ClusterMetric::Horizontal ? d.head<2>().squaredNorm() : d.squaredNorm();
    return dist2 <= params.dist_th_m * params.dist_th_m;
}

namespace {

struct DisjointSets {
    std::vector<std::size_t> parent;

    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }

    std::size_t find(std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent[b] = a;
    }
};

struct CellHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& c) const {
        return std::hash<std::int64_t>{}(c.first * 73856093LL ^ c.second * 19349663LL);
    }
};

}  // namespace

std::vector<ClusterSite> cluster_sites(std::span<const LandingSite> sites, const ClusterParams& params) {
    if (!(params.dist_th_m > 0.0) || !(params.z_th_m > 0.0)) {
        throw ConfigError("cluster thresholds must be positive");
    }
    const std::size_t n = sites.size();

    // Bucket by planar cell of side dist_th; linkable pairs are always in adjacent cells.
    using Cell = std::pair<std::int64_t, std::int64_t>;
    auto cell_of = [&](const Eigen::Vector3d& p) {
        return Cell{static_cast<std::int64_t>(std::floor(p.x() / params.dist_th_m)),
                    static_cast<std::int64_t>(std::floor(p.y() / params.dist_th_m))};
    };
    std::unordered_map<Cell, std::vector<std::size_t>, CellHash> cells;
    for (std::size_t i = 0; i < n; ++i) cells[cell_of(sites[i].position)].push_back(i);

    DisjointSets sets(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Cell c = cell_of(sites[i].position);
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                const auto it = cells.find({c.first + dx, c.second + dy});
                if (it == cells.end()) continue;
                for (std::size_t j : it->second) {
                    if (j > i && linkable(sites[i].position, sites[j].position, params)) sets.unite(i, j);
                }
            }
        }
    }

    std::vector<ClusterSite> clusters;
    std::vector<std::size_t> slot(n, std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = sets.find(i);
        if (slot[root] == std::numeric_limits<std::size_t>::max()) {
            slot[root] = clusters.size();
            clusters.emplace_back();
        }
        clusters[slot[root]].members.push_back(i);
    }
    for (ClusterSite& c : clusters) {
        Eigen::Vector3d sum = Eigen::Vector3d::Zero();
        double score = 0.0;
        for (std::size_t i : c.members) {
            sum += sites[i].position;
            score += sites[i].score;
        }
        c.member_count = c.members.size();
        c.centroid = sum / static_cast<double>(c.member_count);
        c.mean_score = score / static_cast<double>(c.member_count);
    }

    std::sort(clusters.begin(), clusters.end(), [](const ClusterSite& a, const ClusterSite& b) {
        if (a.mean_score != b.mean_score) return a.mean_score > b.mean_score;
        if (a.member_count != b.member_count) return a.member_count > b.member_count;
        return std::lexicographical_compare(a.centroid.data(), a.centroid.data() + 3, b.centroid.data(),
                                            b.centroid.data() + 3);
    });
    return clusters;
}

}  // namespace landsite
