#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <unordered_map>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "hgr/norm.hpp"

namespace hgr {

/// R-tree over a Euclidean shadow of a point set: up to three coordinates, scaled so that
/// shadow distance never exceeds the metric distance. A box query of half-width r around
/// the shadow of x therefore returns a superset of the metric ball B(x, r).
class SpatialIndex {
public:
    static constexpr int kShadowDim = 3;
    using Shadow = std::array<double, kShadowDim>;

    SpatialIndex() = default;
    explicit SpatialIndex(std::vector<Shadow> shadows) : shadows_(std::move(shadows))
    {
        std::vector<Value> values;
        values.reserve(shadows_.size());
        for (std::size_t i = 0; i < shadows_.size(); ++i) values.push_back({to_point(shadows_[i]), static_cast<int>(i)});
        tree_ = Tree(values.begin(), values.end());
    }

    std::size_t size() const { return shadows_.size(); }
    const Shadow& shadow(int i) const { return shadows_[static_cast<std::size_t>(i)]; }

    /// Indices whose shadow lies in the box of half-width r around c, in increasing order.
    std::vector<int> candidates(const Shadow& c, double r) const
    {
        std::vector<int> out;
        candidates(c, r, out);
        return out;
    }

    void candidates(const Shadow& c, double r, std::vector<int>& out) const
    {
        out.clear();
        Shadow lo = c, hi = c;
        for (int d = 0; d < kShadowDim; ++d) {
            lo[static_cast<std::size_t>(d)] -= r;
            hi[static_cast<std::size_t>(d)] += r;
        }
        std::vector<Value> hits;
        tree_.query(boost::geometry::index::intersects(Box(to_point(lo), to_point(hi))), std::back_inserter(hits));
        for (const auto& h : hits) out.push_back(h.second);
        std::sort(out.begin(), out.end());
    }

    /// The m indices with the nearest shadows to c.
    std::vector<int> nearest(const Shadow& c, int m) const
    {
        std::vector<Value> hits;
        tree_.query(boost::geometry::index::nearest(to_point(c), static_cast<unsigned>(m)), std::back_inserter(hits));
        std::vector<int> out;
        for (const auto& h : hits) out.push_back(h.second);
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    using Point = boost::geometry::model::point<double, kShadowDim, boost::geometry::cs::cartesian>;
    using Box = boost::geometry::model::box<Point>;
    using Value = std::pair<Point, int>;
    using Tree = boost::geometry::index::rtree<Value, boost::geometry::index::quadratic<16>>;

    static Point to_point(const Shadow& s) { return Point(s[0], s[1], s[2]); }

    std::vector<Shadow> shadows_;
    Tree tree_;
};

/// Uniform hash grid over shadows, for scans that stop at the first hit. Cells are cubes of
/// side `cell`; a visit of the box of half-width r around c walks the covering cells in a
/// fixed order, so results are deterministic.
class ShadowGrid {
public:
    ShadowGrid(const std::vector<SpatialIndex::Shadow>& shadows, double cell) : cell_(cell)
    {
        std::vector<std::pair<Key, int>> keyed;
        keyed.reserve(shadows.size());
        for (std::size_t i = 0; i < shadows.size(); ++i) keyed.push_back({key_of(shadows[i]), static_cast<int>(i)});
        std::sort(keyed.begin(), keyed.end());
        order_.reserve(keyed.size());
        for (std::size_t i = 0; i < keyed.size(); ++i) {
            if (i == 0 || keyed[i].first != keyed[i - 1].first) ranges_[keyed[i].first] = {static_cast<int>(i), static_cast<int>(i)};
            ranges_[keyed[i].first].second = static_cast<int>(i) + 1;
            order_.push_back(keyed[i].second);
        }
    }

    /// Calls f(j) for every j whose cell meets the box; stops early when f returns false.
    /// Returns false if stopped.
    template <class F>
    bool visit(const SpatialIndex::Shadow& c, double r, const F& f) const
    {
        const Key lo = key_of({c[0] - r, c[1] - r, c[2] - r});
        const Key hi = key_of({c[0] + r, c[1] + r, c[2] + r});
        for (long a = lo[0]; a <= hi[0]; ++a)
            for (long b = lo[1]; b <= hi[1]; ++b)
                for (long d = lo[2]; d <= hi[2]; ++d) {
                    const auto it = ranges_.find(Key{a, b, d});
                    if (it == ranges_.end()) continue;
                    for (int n = it->second.first; n < it->second.second; ++n)
                        if (!f(order_[static_cast<std::size_t>(n)])) return false;
                }
        return true;
    }

private:
    using Key = std::array<long, 3>;
    struct KeyHash {
        std::size_t operator()(const Key& k) const
        {
            return static_cast<std::size_t>(k[0] * 73856093L) ^ static_cast<std::size_t>(k[1] * 19349663L) ^
                   static_cast<std::size_t>(k[2] * 83492791L);
        }
    };

    Key key_of(const SpatialIndex::Shadow& s) const
    {
        return {static_cast<long>(std::floor(s[0] / cell_)), static_cast<long>(std::floor(s[1] / cell_)),
                static_cast<long>(std::floor(s[2] / cell_))};
    }

    double cell_;
    std::vector<int> order_;
    std::unordered_map<Key, std::pair<int, int>, KeyHash> ranges_;
};

/// Shadow of a group element: the first (up to three) first-layer coordinates times the
/// norm's first-layer factor, a 1-Lipschitz map from (G, d) to Euclidean space.
inline SpatialIndex::Shadow group_shadow(const HomogeneousNorm& norm, const GroupElement& x)
{
    SpatialIndex::Shadow s{0.0, 0.0, 0.0};
    const int h1 = std::min(norm.law().algebra().layer_dim(1), SpatialIndex::kShadowDim);
    for (int i = 0; i < h1; ++i) s[static_cast<std::size_t>(i)] = norm.first_layer_factor() * x[i];
    return s;
}

inline SpatialIndex build_group_index(const HomogeneousNorm& norm, const std::vector<GroupElement>& points)
{
    std::vector<SpatialIndex::Shadow> sh;
    sh.reserve(points.size());
    for (const auto& p : points) sh.push_back(group_shadow(norm, p));
    return SpatialIndex(std::move(sh));
}

/// Indices i with d(c, points[i]) <= r, in increasing order.
inline std::vector<int> ball_query(const HomogeneousNorm& norm, const SpatialIndex& index,
                                   const std::vector<GroupElement>& points, const GroupElement& c, double r)
{
    std::vector<int> out;
    for (int i : index.candidates(group_shadow(norm, c), r))
        if (norm.dist(c, points[static_cast<std::size_t>(i)]) <= r) out.push_back(i);
    return out;
}

/// Median over points of the distance to the nearest other point (metric distance among
/// the 8 nearest shadows). Returns 0 for fewer than two points.
inline double nearest_neighbor_spacing(const HomogeneousNorm& norm, const SpatialIndex& index,
                                       const std::vector<GroupElement>& points)
{
    if (points.size() < 2) return 0.0;
    std::vector<double> nn;
    nn.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j : index.nearest(index.shadow(static_cast<int>(i)), 9))
            if (j != static_cast<int>(i)) best = std::min(best, norm.dist(points[i], points[static_cast<std::size_t>(j)]));
        nn.push_back(best);
    }
    std::nth_element(nn.begin(), nn.begin() + static_cast<long>(nn.size() / 2), nn.end());
    return nn[nn.size() / 2];
}

} // namespace hgr
