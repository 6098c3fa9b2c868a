#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "landsite/errors.hpp"
#include "landsite/registry.hpp"
#include "oracles.hpp"

using namespace landsite;

namespace {

LandingSite site(double x, double y, double z, double score = 0.8) {
    LandingSite s;
    s.position = {x, y, z};
    s.score = score;
    return s;
}

std::vector<Eigen::Vector3d> random_points(std::mt19937_64& rng, std::size_t n, double extent, double z_extent) {
    std::uniform_real_distribution<double> u(-extent, extent), uz(-z_extent, z_extent);
    std::vector<Eigen::Vector3d> p(n);
    for (auto& v : p) v = {u(rng), u(rng), uz(rng)};
    return p;
}

}  // namespace

TEST_CASE("registry insertion and deduplication") {
    SiteRegistry reg(0.5);
    CHECK(reg.insert_site(site(0, 0, 0)));
    CHECK_FALSE(reg.insert_site(site(0.4, 0, 0)));
    CHECK(reg.insert_site(site(0.5, 0, 0)));
    CHECK(reg.size() == 2);
    CHECK(reg.sites()[1].position.x() == 0.5);
}

TEST_CASE("registry rejects bad sites") {
    SiteRegistry reg;
    CHECK_THROWS_AS(reg.insert_site(site(std::numeric_limits<double>::quiet_NaN(), 0, 0)), std::invalid_argument);
    CHECK_THROWS_AS(reg.insert_site(site(0, std::numeric_limits<double>::infinity(), 0)), std::invalid_argument);
    CHECK_THROWS_AS(reg.insert_site(site(0, 0, 0, 1.5)), std::invalid_argument);
    CHECK_THROWS_AS(reg.insert_site(site(0, 0, 0, -0.1)), std::invalid_argument);
    CHECK(reg.size() == 0);
    CHECK(reg.insert_site(site(0, 0, 0, 0.0)));
    CHECK(reg.insert_site(site(1, 0, 0, 1.0)));
}

TEST_CASE("registry matches linear-scan deduplication over 10k insertions") {
    std::mt19937_64 rng(11);
    const auto pts = random_points(rng, 10000, 20.0, 2.0);
    SiteRegistry reg(0.5);
    for (const auto& p : pts) reg.insert_site(site(p.x(), p.y(), p.z()));
    const auto expected = oracle::linear_dedup(pts, 0.5);
    REQUIRE(reg.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) REQUIRE(reg.sites()[i].position == expected[i]);

    // Pairwise separation of everything stored.
    double min_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < reg.size(); ++i)
        for (std::size_t j = i + 1; j < reg.size(); ++j)
            min_d = std::min(min_d, (reg.sites()[i].position - reg.sites()[j].position).norm());
    CHECK(min_d >= 0.5);
}

TEST_CASE("nearest neighbour") {
    KdTree tree;
    CHECK_FALSE(tree.nearest({0, 0, 0}).has_value());
    tree.insert({1, 1, 1});
    tree.insert({5, 5, 5});
    const auto hit = tree.nearest({0, 0, 0});
    REQUIRE(hit);
    CHECK(hit->index == 0);
    CHECK(hit->distance == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));

    SUBCASE("ties resolve to the lowest index") {
        KdTree t;
        for (int i = 0; i < 50; ++i) t.insert({static_cast<double>(i % 5), 0, 0});
        const auto h = t.nearest({2, 0, 0});
        REQUIRE(h);
        CHECK(h->index == 2);
        const auto mid = t.nearest({2.5, 0, 0});
        CHECK(mid->index == 2);
    }

    SUBCASE("random queries agree with a linear scan") {
        std::mt19937_64 rng(5);
        const auto pts = random_points(rng, 3000, 10.0, 10.0);
        KdTree t;
        std::vector<Eigen::Vector3d> inserted;
        std::uniform_real_distribution<double> u(-12.0, 12.0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            t.insert(pts[i]);
            inserted.push_back(pts[i]);
            if (i % 3 == 0) {
                const Eigen::Vector3d q(u(rng), u(rng), u(rng));
                const auto h = t.nearest(q);
                const auto [idx, d] = oracle::linear_nearest(inserted, q);
                REQUIRE(h->index == idx);
                REQUIRE(h->distance == doctest::Approx(d).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("clustering examples") {
    const ClusterParams p{0.5, 0.01, ClusterMetric::Horizontal};
    SUBCASE("two close sites join") {
        const std::vector<LandingSite> s{site(0, 0, 0), site(0.3, 0, 0.005)};
        const auto c = cluster_sites(s, p);
        REQUIRE(c.size() == 1);
        CHECK(c[0].member_count == 2);
        CHECK(c[0].centroid.x() == doctest::Approx(0.15));
        CHECK(c[0].centroid.y() == doctest::Approx(0.0));
        CHECK(c[0].centroid.z() == doctest::Approx(0.0025));
        CHECK(c[0].mean_score == doctest::Approx(0.8));
    }
    SUBCASE("height step splits") {
        const std::vector<LandingSite> s{site(0, 0, 0), site(0.3, 0, 0.02)};
        CHECK(cluster_sites(s, p).size() == 2);
    }
    SUBCASE("singleton centroid is the site") {
        const std::vector<LandingSite> s{site(1.25, -3.5, 0.75, 0.9)};
        const auto c = cluster_sites(s, p);
        REQUIRE(c.size() == 1);
        CHECK(c[0].centroid == s[0].position);
        CHECK(c[0].mean_score == 0.9);
        CHECK(c[0].members == std::vector<std::size_t>{0});
    }
    SUBCASE("chains link transitively") {
        const std::vector<LandingSite> s{site(0, 0, 0), site(0.45, 0, 0), site(0.9, 0, 0), site(5, 0, 0)};
        const auto c = cluster_sites(s, p);
        REQUIRE(c.size() == 2);
        CHECK(c[0].member_count + c[1].member_count == 4);
    }
    SUBCASE("empty input") { CHECK(cluster_sites(std::vector<LandingSite>{}, p).empty()); }
}

TEST_CASE("clustering equals brute-force connected components") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    for (ClusterMetric metric : {ClusterMetric::Horizontal, ClusterMetric::Full3d}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto pts = random_points(rng, 200, 3.0, 0.03);
            std::vector<LandingSite> sites;
            for (const auto& q : pts) sites.push_back(site(q.x(), q.y(), q.z(), score(rng)));
            const ClusterParams p{0.5, 0.01, metric};
            const auto clusters = cluster_sites(sites, p);

            const auto expected = oracle::brute_force_components(pts, 0.5, 0.01, metric == ClusterMetric::Horizontal);
            REQUIRE(oracle::labels_from_clusters(clusters, pts.size()) == expected);

            std::size_t total = 0;
            for (std::size_t k = 0; k < clusters.size(); ++k) {
                const ClusterSite& c = clusters[k];
                total += c.member_count;
                REQUIRE(c.member_count == c.members.size());
                REQUIRE(std::is_sorted(c.members.begin(), c.members.end()));
                Eigen::Vector3d mean = Eigen::Vector3d::Zero();
                double s = 0.0;
                for (std::size_t m : c.members) mean += sites[m].position, s += sites[m].score;
                REQUIRE((mean / c.member_count - c.centroid).norm() < 1e-12);
                REQUIRE(std::abs(s / c.member_count - c.mean_score) < 1e-12);
                if (k > 0) {
                    const ClusterSite& a = clusters[k - 1];
                    const bool ordered =
                        a.mean_score > c.mean_score ||
                        (a.mean_score == c.mean_score &&
                         (a.member_count > c.member_count ||
                          (a.member_count == c.member_count &&
                           std::lexicographical_compare(a.centroid.data(), a.centroid.data() + 3, c.centroid.data(),
                                                        c.centroid.data() + 3))));
                    REQUIRE(ordered);
                }
            }
            REQUIRE(total == sites.size());
        }
    }
}

TEST_CASE("clustering is invariant to input order") {
    std::mt19937_64 rng(8);
    const auto pts = random_points(rng, 300, 3.0, 0.02);
    std::vector<LandingSite> sites;
    for (std::size_t i = 0; i < pts.size(); ++i) sites.push_back(site(pts[i].x(), pts[i].y(), pts[i].z(), 0.5));
    const ClusterParams p{0.5, 0.01, ClusterMetric::Horizontal};
    const auto a = cluster_sites(sites, p);

    std::vector<std::size_t> perm(sites.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<LandingSite> shuffled;
    for (std::size_t i : perm) shuffled.push_back(sites[i]);
    const auto b = cluster_sites(shuffled, p);

    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].member_count == b[k].member_count);
        CHECK((a[k].centroid - b[k].centroid).norm() < 1e-12);
        std::vector<std::size_t> mapped;
        for (std::size_t m : b[k].members) mapped.push_back(perm[m]);
        std::sort(mapped.begin(), mapped.end());
        CHECK(mapped == a[k].members);
    }
}

TEST_CASE("cluster parameters") {
    CHECK(cluster_metric_from_string("xy") == ClusterMetric::Horizontal);
    CHECK(cluster_metric_from_string("xyz") == ClusterMetric::Full3d);
    CHECK(to_string(ClusterMetric::Full3d) == "xyz");
    CHECK_THROWS_AS(cluster_metric_from_string("XY"), ConfigError);
    const std::vector<LandingSite> s{site(0, 0, 0)};
    CHECK_THROWS_AS(cluster_sites(s, ClusterParams{0.0, 0.01}), ConfigError);
    CHECK_THROWS_AS(cluster_sites(s, ClusterParams{0.5, -1.0}), ConfigError);

    CHECK(linkable({0, 0, 0}, {0.5, 0, 0.01}, ClusterParams{0.5, 0.01}));
    CHECK_FALSE(linkable({0, 0, 0}, {0.4, 0.4, 0}, ClusterParams{0.5, 0.01}));
    CHECK(linkable({0, 0, 0}, {0.3, 0, 0.01}, ClusterParams{0.5, 0.01, ClusterMetric::Full3d}));
    CHECK_FALSE(linkable({0, 0, 0}, {0.5, 0, 0.01}, ClusterParams{0.5, 0.01, ClusterMetric::Full3d}));
}
