#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "hgr/point_measure.hpp"
#include "hgr/spatial_index.hpp"
#include "hgr/subgroup.hpp"

namespace hgr {

enum class MeasureVariant { Hausdorff, Spherical };

inline std::string to_string(MeasureVariant v) { return v == MeasureVariant::Hausdorff ? "hausdorff" : "spherical"; }

inline MeasureVariant parse_measure_variant(const std::string& s)
{
    if (s == "hausdorff") return MeasureVariant::Hausdorff;
    if (s == "spherical") return MeasureVariant::Spherical;
    throw Error(ErrorKind::ParseError, "unknown measure variant '" + s + "'");
}

/// Volume of the Euclidean unit ball in R^k, extended to real k.
inline double unit_ball_volume(double k) { return std::pow(M_PI, k / 2.0) / std::tgamma(k / 2.0 + 1.0); }

struct CoverRun {
    double delta = 0.0;
    double value = 0.0;
    int pieces = 0;
    int leftover = 0;
};

struct HausdorffEstimate {
    MeasureVariant variant = MeasureVariant::Hausdorff;
    double k = 1.0;
    double resolution = 0.0;
    std::vector<CoverRun> runs; // in the order of the supplied (decreasing) meshes
    double value = 0.0;         // extrapolated to mesh 0
    double lower = 0.0;
    double upper = 0.0;
    /// Whether the per-mesh values move in one direction as the mesh shrinks. H^k_delta is
    /// nondecreasing as delta decreases; a cover heuristic need not be, so this is reported
    /// rather than enforced.
    bool monotone = true;
};

/// Geometric radius levels of the cover, starting at delta/2.
inline constexpr double kCoverLevelRatio = 0.70710678118654752;

/// One greedy cover at mesh delta.
///
/// Radii run down from delta/2 by the ratio 1/sqrt(2) until they reach the sample
/// resolution. At each level the samples are scanned in index order; a sample that is
/// still uncovered and has no covered sample within r opens a piece made of every sample
/// within r. A piece costs what the measure normalization assigns to a set of its
/// diameter: the observed diameter is widened by the resolution (the piece of the
/// underlying set stands out by half a cell on each side) and, for k > 1, capped at the
/// ball diameter 2r. Samples left at the end cost one resolution cell each for k <= 1; for
/// k > 1 they cost the mean cost per covered sample, since a resolution cell overstates
/// the share of a sample in a k-dimensional lattice.
///
/// `dist(i, j)` is the metric and `shadows` a 1-Lipschitz image of the samples.
template <class Dist>
CoverRun cover_once(const std::vector<SpatialIndex::Shadow>& shadows, const Dist& dist, double k, double delta,
                    double resolution, MeasureVariant variant)
{
    CoverRun run;
    run.delta = delta;
    const std::size_t n = shadows.size();
    const double alpha = unit_ball_volume(k);
    const double half_k = std::pow(2.0, -k);
    const ShadowGrid grid(shadows, std::max(2.0 * resolution, delta / 8.0));
    std::vector<char> covered(n, 0);
    std::vector<int> piece;
    double total = 0.0;
    for (double r = delta / 2.0; r >= 1.5 * resolution; r *= kCoverLevelRatio) {
        for (std::size_t i = 0; i < n; ++i) {
            if (covered[i]) continue;
            piece.clear();
            double reach = 0.0;
            const bool free = grid.visit(shadows[i], r, [&](int j) {
                const double dij = dist(static_cast<int>(i), j);
                if (dij > r) return true;
                if (covered[static_cast<std::size_t>(j)]) return false;
                piece.push_back(j);
                reach = std::max(reach, dij);
                return true;
            });
            if (!free) continue;
            // Diameter by repeated farthest-point sweeps.
            int a = piece.front();
            double dm = 0.0;
            for (int sweep = 0; sweep < 3; ++sweep) {
                int b = a;
                double far = -1.0;
                for (int j : piece) {
                    const double t = dist(a, j);
                    if (t > far) {
                        far = t;
                        b = j;
                    }
                }
                dm = std::max(dm, far);
                a = b;
            }
            for (int j : piece) covered[static_cast<std::size_t>(j)] = 1;
            double cost;
            if (variant == MeasureVariant::Hausdorff) {
                const double d = k <= 1.0 ? dm + resolution : std::min(dm + resolution, 2.0 * r);
                cost = alpha * half_k * std::pow(d, k);
            } else {
                const double rr = k <= 1.0 ? reach + resolution / 2.0 : std::min(reach + resolution / 2.0, r);
                cost = alpha * std::pow(rr, k);
            }
            total += cost;
            ++run.pieces;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!covered[i]) ++run.leftover;
    const std::size_t placed = n - run.leftover;
    if (k > 1.0 && placed > 0)
        total += static_cast<double>(run.leftover) * total / static_cast<double>(placed);
    else
        total += run.leftover * alpha * half_k * std::pow(resolution, k);
    run.value = total;
    return run;
}

/// Richardson extrapolation of the two finest meshes, linear in delta; the interval
/// half-width is the size of the correction.
inline void extrapolate(HausdorffEstimate& est)
{
    const auto& rs = est.runs;
    if (rs.size() == 1) {
        est.value = est.lower = est.upper = rs[0].value;
        return;
    }
    const auto& c = rs[rs.size() - 2];
    const auto& f = rs[rs.size() - 1];
    est.value = f.value + (f.value - c.value) * f.delta / (c.delta - f.delta);
    const double half = std::abs(est.value - f.value);
    est.lower = std::max(0.0, est.value - half);
    est.upper = est.value + half;
    int sign = 0;
    for (std::size_t i = 1; i < rs.size(); ++i) {
        const double d = rs[i].value - rs[i - 1].value;
        const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
        if (s != 0 && sign != 0 && s != sign) est.monotone = false;
        if (s != 0) sign = s;
    }
}

inline void check_deltas(const std::vector<double>& deltas)
{
    if (deltas.empty()) throw Error(ErrorKind::ParseError, "at least one mesh is required");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0)) throw Error(ErrorKind::NonpositiveScale, "mesh must be positive");
        if (i > 0 && !(deltas[i] < deltas[i - 1])) throw Error(ErrorKind::ParseError, "meshes must be strictly decreasing");
    }
}

/// Covering estimate over an arbitrary metric on n samples.
template <class Dist>
HausdorffEstimate cover_estimate(const std::vector<SpatialIndex::Shadow>& shadows, const Dist& dist, double k,
                                 const std::vector<double>& deltas, double resolution, MeasureVariant variant)
{
    check_deltas(deltas);
    if (shadows.empty()) throw Error(ErrorKind::EmptyInput, "no samples to cover");
    if (!(resolution > 0.0)) throw Error(ErrorKind::NonpositiveScale, "sample resolution must be positive");
    HausdorffEstimate est;
    est.variant = variant;
    est.k = k;
    est.resolution = resolution;
    for (double d : deltas) est.runs.push_back(cover_once(shadows, dist, k, d, resolution, variant));
    extrapolate(est);
    return est;
}

/// Default meshes: for k <= 1 the calculus-module sequence; for larger k two meshes coarse
/// enough that the finest still spans twenty sample cells.
inline std::vector<double> default_meshes(double k)
{
    if (k <= 1.0) return {4e-2, 2e-2, 1e-2};
    return {0.16, 0.08};
}

/// H^k (or S^k) of the set sampled by `points` in (G, d). A nonpositive resolution means
/// unknown and is replaced by the nearest-neighbour spacing.
inline HausdorffEstimate hausdorff_estimate(const HomogeneousNorm& norm, const std::vector<GroupElement>& points, double k,
                                            const std::vector<double>& deltas, MeasureVariant variant = MeasureVariant::Hausdorff,
                                            double resolution = 0.0)
{
    if (points.empty()) throw Error(ErrorKind::EmptyInput, "no samples to cover");
    if (!(resolution > 0.0)) resolution = nearest_neighbor_spacing(norm, build_group_index(norm, points), points);
    if (!(resolution > 0.0)) resolution = 1e-12;
    std::vector<SpatialIndex::Shadow> shadows;
    shadows.reserve(points.size());
    for (const auto& p : points) shadows.push_back(group_shadow(norm, p));
    auto dist = [&](int i, int j) { return norm.dist(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]); };
    return cover_estimate(shadows, dist, k, deltas, resolution, variant);
}

inline HausdorffEstimate hausdorff_estimate(const HomogeneousNorm& norm, const PointMeasure& mu, const std::vector<double>& deltas,
                                            MeasureVariant variant = MeasureVariant::Hausdorff)
{
    return hausdorff_estimate(norm, mu.points, mu.k, deltas, variant, mu.resolution);
}

/// A norm on R^k given by a callable; `floor` is a constant with norm(a) >= floor |a|.
struct FiniteNorm {
    int k = 1;
    std::function<double(const double*)> eval;
    double floor = 1.0;
};

/// Samples of {a : |a|_E <= 1} on a lattice of spacing h (optionally jittered).
inline std::vector<std::vector<double>> euclidean_ball_lattice(int k, double h, std::uint64_t jitter_seed = 0)
{
    std::vector<std::vector<double>> out;
    const int m = static_cast<int>(std::ceil(1.0 / h));
    std::mt19937_64 rng(jitter_seed);
    std::uniform_real_distribution<double> u(-0.25, 0.25);
    std::vector<int> idx(static_cast<std::size_t>(k), -m);
    while (true) {
        std::vector<double> a(static_cast<std::size_t>(k));
        double r2 = 0.0;
        for (int i = 0; i < k; ++i) {
            a[static_cast<std::size_t>(i)] = (idx[static_cast<std::size_t>(i)] + (jitter_seed ? u(rng) : 0.0)) * h;
            r2 += a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)];
        }
        if (r2 <= 1.0) out.push_back(std::move(a));
        int d = 0;
        while (d < k && ++idx[static_cast<std::size_t>(d)] > m) idx[static_cast<std::size_t>(d++)] = -m;
        if (d == k) break;
    }
    return out;
}

/// Covering estimate of the measure of `coords` (points of R^k) under a norm on R^k.
inline HausdorffEstimate normed_space_estimate(const FiniteNorm& nrm, const std::vector<std::vector<double>>& coords,
                                               double k, const std::vector<double>& deltas, double resolution,
                                               MeasureVariant variant = MeasureVariant::Hausdorff)
{
    std::vector<SpatialIndex::Shadow> sh;
    sh.reserve(coords.size());
    for (const auto& a : coords) {
        SpatialIndex::Shadow s{0.0, 0.0, 0.0};
        // Projections onto the first three axes are floor-Lipschitz, hence a valid shadow.
        for (int i = 0; i < std::min(nrm.k, SpatialIndex::kShadowDim); ++i) s[static_cast<std::size_t>(i)] = nrm.floor * a[static_cast<std::size_t>(i)];
        sh.push_back(s);
    }
    std::vector<double> diff(static_cast<std::size_t>(nrm.k));
    auto dist = [&](int i, int j) {
        for (int d = 0; d < nrm.k; ++d)
            diff[static_cast<std::size_t>(d)] = coords[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] -
                                                coords[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
        return nrm.eval(diff.data());
    };
    return cover_estimate(sh, dist, k, deltas, resolution, variant);
}

/// Largest norm of a unit coordinate vector: a lattice of spacing h has cells of norm
/// diameter at most h times this (used as the sample resolution of lattice inputs).
inline double lattice_cell_scale(const FiniteNorm& nrm)
{
    double m = 0.0;
    std::vector<double> e(static_cast<std::size_t>(nrm.k), 0.0);
    for (int i = 0; i < nrm.k; ++i) {
        e[static_cast<std::size_t>(i)] = 1.0;
        m = std::max(m, nrm.eval(e.data()));
        e[static_cast<std::size_t>(i)] = 0.0;
    }
    return m;
}

/// Lebesgue measure of {a in R^k : norm(a) <= 1} by the midpoint rule on a 64^k grid over
/// the box |a_i| <= 1/floor.
inline double unit_ball_lebesgue(const FiniteNorm& nrm, int grid = 64)
{
    const double half = 1.0 / nrm.floor;
    const double h = 2.0 * half / grid;
    std::vector<int> idx(static_cast<std::size_t>(nrm.k), 0);
    std::vector<double> a(static_cast<std::size_t>(nrm.k));
    long inside = 0;
    while (true) {
        for (int i = 0; i < nrm.k; ++i) a[static_cast<std::size_t>(i)] = -half + (idx[static_cast<std::size_t>(i)] + 0.5) * h;
        if (nrm.eval(a.data()) <= 1.0) ++inside;
        int d = 0;
        while (d < nrm.k && ++idx[static_cast<std::size_t>(d)] >= grid) idx[static_cast<std::size_t>(d++)] = 0;
        if (d == nrm.k) break;
    }
    return static_cast<double>(inside) * std::pow(h, nrm.k);
}

/// The homogeneous norm restricted to a horizontal subgroup, in frame coordinates.
inline FiniteNorm restricted_norm(const HomogeneousNorm& norm, const HorizontalSubgroup& v)
{
    FiniteNorm out;
    out.k = v.k();
    out.floor = norm.first_layer_factor();
    out.eval = [norm, v](const double* a) { return norm(v.point(a)); };
    return out;
}

struct HaarConstant {
    double gamma = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double slice_volume = 0.0; // Lebesgue measure of {a : ||V(a)|| <= 1}
    HausdorffEstimate ball;    // covering estimate of V cap B(0, 1)
};

/// Samples of V cap B(0, t) in frame coordinates: the lattice of spacing h (jittered when
/// jitter_seed != 0) clipped to the ball.
inline std::vector<std::vector<double>> subgroup_ball_lattice(const FiniteNorm& nrm, double t, double h,
                                                              std::uint64_t jitter_seed = 0)
{
    const double reach = t / nrm.floor;
    std::vector<std::vector<double>> out;
    for (auto& a : euclidean_ball_lattice(nrm.k, h / reach, jitter_seed)) {
        for (double& x : a) x *= reach;
        if (nrm.eval(a.data()) <= t) out.push_back(std::move(a));
    }
    return out;
}

/// gamma_V with H^k on V equal to gamma_V times Lebesgue measure in frame coordinates.
/// The lattice spacing is one twentieth of the finest mesh.
inline HaarConstant haar_constant(const HomogeneousNorm& norm, const HorizontalSubgroup& v, double k,
                                  std::vector<double> deltas = {}, std::uint64_t jitter_seed = 0, double radius = 1.0)
{
    if (std::abs(k - v.k()) > 1e-12) throw Error(ErrorKind::DimensionMismatch, "haar constant needs k = dim V");
    if (deltas.empty()) deltas = default_meshes(k);
    check_deltas(deltas);
    const FiniteNorm nrm = restricted_norm(norm, v);
    const double h = deltas.back() / 20.0;
    const auto lattice = subgroup_ball_lattice(nrm, radius, h, jitter_seed);
    HaarConstant out;
    out.ball = normed_space_estimate(nrm, lattice, k, deltas, h * lattice_cell_scale(nrm));
    out.slice_volume = unit_ball_lebesgue(nrm) * std::pow(radius, k);
    out.gamma = out.ball.value / out.slice_volume;
    out.lower = out.ball.lower / out.slice_volume;
    out.upper = out.ball.upper / out.slice_volume;
    return out;
}

struct HaarScaling {
    std::vector<double> radii;
    std::vector<double> normalized; // H^k(V cap B(0, t)) / t^k
    double spread = 0.0;            // (max - min) / mean
};

/// H^k(V cap B(0, t)) / t^k at several radii. Meshes and lattice spacing scale with t, and
/// each radius gets its own jittered lattice so the ratios do not agree by construction.
inline HaarScaling haar_scaling(const HomogeneousNorm& norm, const HorizontalSubgroup& v, const std::vector<double>& radii,
                                std::vector<double> deltas = {}, std::uint64_t seed = 1)
{
    if (deltas.empty()) deltas = default_meshes(v.k());
    HaarScaling out;
    out.radii = radii;
    const FiniteNorm nrm = restricted_norm(norm, v);
    double lo = 1e300, hi = -1e300, sum = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double t = radii[i];
        if (!(t > 0.0)) throw Error(ErrorKind::NonpositiveScale, "radius must be positive");
        std::vector<double> ds = deltas;
        for (double& d : ds) d *= t;
        const double h = ds.back() / 20.0;
        const auto lattice = subgroup_ball_lattice(nrm, t, h, seed + 7919 * (i + 1));
        const auto est = normed_space_estimate(nrm, lattice, v.k(), ds, h * lattice_cell_scale(nrm));
        const double val = est.value / std::pow(t, v.k());
        out.normalized.push_back(val);
        lo = std::min(lo, val);
        hi = std::max(hi, val);
        sum += val;
    }
    if (!radii.empty()) out.spread = (hi - lo) / (sum / static_cast<double>(radii.size()));
    return out;
}

inline nlohmann::json to_json(const HausdorffEstimate& e)
{
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : e.runs) runs.push_back({{"delta", r.delta}, {"value", r.value}, {"pieces", r.pieces}, {"leftover", r.leftover}});
    return {{"variant", to_string(e.variant)}, {"k", e.k}, {"resolution", e.resolution}, {"runs", runs},
            {"value", e.value}, {"interval", {e.lower, e.upper}}, {"monotone", e.monotone}};
}

inline nlohmann::json to_json(const HaarConstant& g)
{
    return {{"gamma", g.gamma}, {"interval", {g.lower, g.upper}}, {"slice_volume", g.slice_volume}, {"ball", to_json(g.ball)}};
}

} // namespace hgr
