#pragma once

// Global landing-site list: a k-d tree backed registry that rejects near-duplicate
// sites, and single-linkage clustering of the registered sites.

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "landsite/detection.hpp"

namespace landsite {

/// Exact nearest-neighbour index over 3D points, insert-only. Points keep their
/// insertion index; equidistant points resolve to the lowest index.
///
/// Internally a balanced tree over a prefix of the points plus a small unsorted
/// tail that is folded into the tree once it grows past half the tree size.
class KdTree {
public:
    struct Hit {
        std::size_t index = 0;
        double distance = 0.0;
    };

    std::size_t insert(const Eigen::Vector3d& p);
    std::optional<Hit> nearest(const Eigen::Vector3d& q) const;

    std::size_t size() const { return points_.size(); }
    const Eigen::Vector3d& point(std::size_t i) const { return points_[i]; }

private:
    void rebuild();
    void build(std::size_t lo, std::size_t hi, int depth);
    void search(std::size_t lo, std::size_t hi, const Eigen::Vector3d& q, double& best_d2,
                std::size_t& best) const;

    std::vector<Eigen::Vector3d> points_;
    std::vector<std::size_t> order_;  // tree layout over points_[0, built_)
    std::vector<int> axis_;           // split axis of the node whose median sits at order_[k]
    std::size_t built_ = 0;
};

class SiteRegistry {
public:
    explicit SiteRegistry(double dedup_radius_m = 0.5);

    /// Inserts iff the nearest stored site is at least dedup_radius away. Throws
    /// std::invalid_argument for non-finite positions or scores outside [0, 1].
    bool insert_site(const LandingSite& site);

    std::optional<KdTree::Hit> nearest(const Eigen::Vector3d& q) const { return tree_.nearest(q); }

    std::span<const LandingSite> sites() const { return sites_; }
    std::size_t size() const { return sites_.size(); }
    double dedup_radius() const { return dedup_radius_; }

private:
    double dedup_radius_;
    std::vector<LandingSite> sites_;
    KdTree tree_;
};

enum class ClusterMetric { Horizontal, Full3d };

std::string_view to_string(ClusterMetric metric);
ClusterMetric cluster_metric_from_string(std::string_view s);  // "xy" | "xyz", ConfigError otherwise

struct ClusterParams {
    double dist_th_m = 0.5;
    double z_th_m = 0.01;
    ClusterMetric metric = ClusterMetric::Horizontal;
};

struct ClusterSite {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    double mean_score = 0.0;
    std::size_t member_count = 0;
    std::vector<std::size_t> members;  // indices into the clustered site list, ascending
};

/// True when two sites may share a cluster: planar (or 3D) distance <= dist_th and
/// |dz| <= z_th.
bool linkable(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const ClusterParams& params);

/// Connected components of the linkability graph, sorted by mean score (desc),
/// member count (desc), then centroid (lexicographic asc). Throws ConfigError for
/// non-positive thresholds.
std::vector<ClusterSite> cluster_sites(std::span<const LandingSite> sites, const ClusterParams& params);

inline std::vector<ClusterSite> cluster_sites(const SiteRegistry& reg, const ClusterParams& params) {
    return cluster_sites(reg.sites(), params);
}

}  // namespace landsite
