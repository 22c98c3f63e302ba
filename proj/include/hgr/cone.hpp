#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "hgr/point_measure.hpp"
#include "hgr/spatial_index.hpp"
#include "hgr/subgroup_distance.hpp"

namespace hgr {

/// T_{p,r}(q) = delta_{1/r}(p^{-1} q).
inline GroupElement magnify(const GroupLaw& law, const GroupElement& p, double r, const GroupElement& q)
{
    if (!(r > 0.0)) throw Error(ErrorKind::NonpositiveScale, "magnification scale must be positive");
    return law.dilate(1.0 / r, law.product(law.inverse(p), q));
}

/// Intrinsic cone X(p, T, s), optionally truncated to B(p, r). With `vertical` set the axis
/// is the vertical complement of `axis` rather than `axis` itself.
struct ConeSpec {
    GroupElement vertex;
    HorizontalSubgroup axis;
    double opening = 0.5;
    std::optional<double> radius;
    bool vertical = false;

    void validate() const
    {
        if (!(opening > 0.0 && opening < 1.0)) throw Error(ErrorKind::ParseError, "cone opening must lie in (0, 1)");
        if (radius && !(*radius > 0.0)) throw Error(ErrorKind::NonpositiveScale, "cone radius must be positive");
        if (vertex.size() != axis.dim()) throw Error(ErrorKind::DimensionMismatch, "cone vertex does not match its axis");
    }
};

struct ConeOptions {
    /// Constant of the distance estimates; enables the lower bound c d(x, pi_T x) <= d(x, T).
    /// Zero disables it and leaves only the first-layer bound.
    double c_lower = 0.0;
    /// Resolve the exact distance even when the bounds already decide membership.
    bool exact_margin = true;
    SolverOptions solver{};
};

struct ConeMembership {
    bool contained = false;
    double margin = 0.0;   // d(p^{-1} q, T) - s d(p, q), exact or a bound with the right sign
    bool by_bounds = false; // decided without the solver
};

namespace detail {

/// Lower and upper bounds for d(x, S) where S is T or its vertical complement.
inline std::pair<double, double> subgroup_distance_bounds(const HomogeneousNorm& norm, const HorizontalSubgroup& t,
                                                          bool vertical, const GroupElement& x, double c_lower)
{
    const double f = norm.first_layer_factor();
    const GroupElement ph = project_h(t, x);
    double along = 0.0, across = 0.0;
    for (int i = 0; i < t.h1(); ++i) {
        along += ph[i] * ph[i];
        across += (x[i] - ph[i]) * (x[i] - ph[i]);
    }
    if (vertical) {
        // Any delta in T^perp has first layer orthogonal to T, so |(delta^{-1} x)^(1)| >= |P_T x^(1)|;
        // delta = pi_{T^perp}(x) reaches ||pi_T x||.
        return {f * std::sqrt(along), norm(ph)};
    }
    const double to_projection = norm(norm.law().product(norm.law().inverse(ph), x));
    double lower = f * std::sqrt(across);
    if (c_lower > 0.0) lower = std::max(lower, c_lower * to_projection);
    return {lower, std::min(norm(x), to_projection)};
}

} // namespace detail

/// d(x, S) for S = T or T^perp, with the bounds used when they pin the value down.
inline double cone_axis_distance(const HomogeneousNorm& norm, const HorizontalSubgroup& t, bool vertical,
                                 const GroupElement& x, const SolverOptions& opt = {})
{
    const auto [lo, hi] = detail::subgroup_distance_bounds(norm, t, vertical, x, 0.0);
    if (hi - lo <= 1e-13 * (1.0 + hi)) return hi;
    return vertical ? dist_to_subgroup(norm, x, vertical_complement(t), opt) : dist_to_subgroup(norm, x, t, opt);
}

/// Membership of q in X(p, T, s) (strict inequality), ignoring the radius.
inline ConeMembership cone_contains(const HomogeneousNorm& norm, const ConeSpec& cone, const GroupElement& q,
                                    const ConeOptions& opt = {})
{
    const auto& law = norm.law();
    const GroupElement x = law.product(law.inverse(cone.vertex), q);
    const double threshold = cone.opening * norm(x);
    ConeMembership out;
    if (threshold == 0.0) {
        out.margin = 0.0;
        out.by_bounds = true;
        return out;
    }
    const auto [lo, hi] = detail::subgroup_distance_bounds(norm, cone.axis, cone.vertical, x, opt.c_lower);
    const bool pinned = hi - lo <= 1e-13 * (1.0 + hi);
    if (pinned || (!opt.exact_margin && (hi < threshold || lo >= threshold))) {
        out.contained = hi < threshold;
        out.margin = (out.contained ? hi : lo) - threshold;
        out.by_bounds = true;
        return out;
    }
    SolverOptions so = opt.solver;
    if (!opt.exact_margin) so.stop_below = threshold;
    const double d = cone.vertical ? dist_to_subgroup(norm, x, vertical_complement(cone.axis), so)
                                   : dist_to_subgroup(norm, x, cone.axis, so);
    const double dd = std::min(d, hi);
    out.contained = dd < threshold;
    out.margin = dd - threshold;
    return out;
}

/// q in B(w, t) with d(pi_V w, pi_V q) <= rho_t.
inline bool tube_contains(const HomogeneousNorm& norm, const GroupElement& w, double t, double rho_t,
                          const HorizontalSubgroup& v, const GroupElement& q)
{
    if (!(t > 0.0) || !(rho_t > 0.0)) throw Error(ErrorKind::NonpositiveScale, "tube radii must be positive");
    return norm.dist(w, q) <= t && norm.dist(project_h(v, w), project_h(v, q)) <= rho_t;
}

/// Cone membership of selected points, decided with early exits (margins are bounds).
inline std::vector<char> cone_memberships(const HomogeneousNorm& norm, const ConeSpec& cone,
                                          const std::vector<GroupElement>& points, const std::vector<int>& indices,
                                          const ConeOptions& opt = {})
{
    ConeOptions fast = opt;
    fast.exact_margin = false;
    std::vector<char> out(indices.size(), 0);
    for (std::size_t n = 0; n < indices.size(); ++n)
        out[n] = cone_contains(norm, cone, points[static_cast<std::size_t>(indices[n])], fast).contained ? 1 : 0;
    return out;
}

/// mu(B(p, r) \ X(p, T, s)) / r^k. The vertex itself (d(p, q) = 0) is not counted: it lies
/// outside the open cone only through the strict inequality, and a single atom there would
/// otherwise keep the ratio from decaying on any point sample.
inline double cone_excess(const HomogeneousNorm& norm, const PointMeasure& mu, const SpatialIndex& index,
                          const ConeSpec& cone, double k, const ConeOptions& opt = {})
{
    cone.validate();
    if (!cone.radius) throw Error(ErrorKind::ParseError, "cone_excess needs a cone radius");
    const double r = *cone.radius;
    double mass = 0.0;
    const auto ball = ball_query(norm, index, mu.points, cone.vertex, r);
    const auto in = cone_memberships(norm, cone, mu.points, ball, opt);
    for (std::size_t n = 0; n < ball.size(); ++n) {
        const auto i = static_cast<std::size_t>(ball[n]);
        if (!in[n] && norm.dist(cone.vertex, mu.points[i]) > 0.0) mass += mu.weights[i];
    }
    return mass / std::pow(r, k);
}

inline double cone_excess(const HomogeneousNorm& norm, const PointMeasure& mu, const ConeSpec& cone, double k,
                          const ConeOptions& opt = {})
{
    return cone_excess(norm, mu, build_group_index(norm, mu.points), cone, k, opt);
}

} // namespace hgr
