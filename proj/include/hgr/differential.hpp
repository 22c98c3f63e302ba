#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <json.hpp>

#include "hgr/hausdorff.hpp"
#include "hgr/lipschitz_map.hpp"

namespace hgr {

inline std::vector<double> default_diff_scales() { return {1e-2, 5e-3, 2.5e-3}; }

/// Convergence tolerance on the last change of a differential estimate, relative to its size.
inline constexpr double kDiffTolerance = 1e-3;

/// A seminorm whose refined minimum over unit directions is at most this fraction of its
/// maximum is treated as having a kernel.
inline constexpr double kDegenerateRatio = 1e-6;

namespace detail {

inline void require_interior(const LipschitzMap& f, const std::vector<double>& x, const std::vector<double>& scales)
{
    f.domain.validate();
    if (static_cast<int>(x.size()) != f.k()) throw Error(ErrorKind::DimensionMismatch, "point has the wrong dimension");
    if (scales.empty()) throw Error(ErrorKind::EmptyInput, "no differentiation scales");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > 0.0)) throw Error(ErrorKind::NonpositiveScale, "differentiation scales must be positive");
        if (i > 0 && !(scales[i] < scales[i - 1])) throw Error(ErrorKind::ParseError, "differentiation scales must decrease");
    }
    if (!f.domain.interior(x, scales.front()))
        throw Error(ErrorKind::PreconditionFailed, "point is within the largest scale of the domain boundary");
}

inline std::vector<double> shifted(const std::vector<double>& x, const std::vector<double>& h, double t)
{
    std::vector<double> y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += t * h[i];
    return y;
}

/// Nearest tuple of pairwise commuting first-layer vectors: the columns of m projected on
/// the largest leading singular subspace that is abelian.
inline Eigen::MatrixXd abelian_projection(const GradedAlgebra& alg, const Eigen::MatrixXd& m)
{
    const int h1 = static_cast<int>(m.rows());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    const double scale = sv.size() ? sv(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-12 * std::max(1.0, scale)) ++rank;
    for (int r = rank; r >= 1; --r) {
        const Eigen::MatrixXd u = svd.matrixU().leftCols(r);
        double residual = 0.0;
        for (int a = 0; a < r; ++a)
            for (int b = a + 1; b < r; ++b) {
                GroupElement x(alg.dim()), y(alg.dim());
                for (int i = 0; i < h1; ++i) {
                    x[i] = u(i, a);
                    y[i] = u(i, b);
                }
                residual = std::max(residual, euclidean_norm(alg.bracket(x, y)));
            }
        if (residual <= kBracketTolerance) return u * (u.transpose() * m);
    }
    return Eigen::MatrixXd::Zero(m.rows(), m.cols());
}

} // namespace detail

/// Pansu differential estimate: image vectors, the distance residual at each scale and the
/// size of the projection onto commuting tuples.
struct PansuDifferential {
    HHomomorphism map;
    std::vector<double> scales;
    /// max over +-e_i of d(f(x)^{-1} f(x + t h), L(t h)) / t.
    std::vector<double> residuals;
    /// Frobenius change of the fitted image matrix between the last two scales.
    double last_change = 0.0;
    double projection_residual = 0.0;
};

/// Fits L with d(f(x)^{-1} f(x + z), L(z)) = o(|z|) from central first-layer differences.
/// Converged when the residuals do not increase and the image matrix changes by at most
/// 1e-3 of its size between the two finest scales; otherwise NonconvergentResidual.
inline PansuDifferential pansu_diff(const HomogeneousNorm& norm, const LipschitzMap& f, const std::vector<double>& x,
                                    const std::vector<double>& scales = default_diff_scales())
{
    detail::require_interior(f, x, scales);
    const auto& law = norm.law();
    const auto& alg = law.algebra();
    const int h1 = alg.layer_dim(1);
    const int k = f.k();
    const GroupElement fx = f(x);
    const GroupElement fx_inv = law.inverse(fx);

    PansuDifferential out;
    out.scales = scales;
    Eigen::MatrixXd prev, m(h1, k);
    for (double t : scales) {
        std::vector<GroupElement> plus(static_cast<std::size_t>(k)), minus(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            std::vector<double> e(static_cast<std::size_t>(k), 0.0);
            e[static_cast<std::size_t>(i)] = 1.0;
            plus[static_cast<std::size_t>(i)] = law.product(fx_inv, f(detail::shifted(x, e, t)));
            minus[static_cast<std::size_t>(i)] = law.product(fx_inv, f(detail::shifted(x, e, -t)));
            for (int r = 0; r < h1; ++r)
                m(r, i) = (plus[static_cast<std::size_t>(i)][r] - minus[static_cast<std::size_t>(i)][r]) / (2.0 * t);
        }
        const Eigen::MatrixXd proj = detail::abelian_projection(alg, m);
        out.projection_residual = (proj - m).norm();
        std::vector<GroupElement> images(static_cast<std::size_t>(k), GroupElement(alg.dim()));
        for (int i = 0; i < k; ++i)
            for (int r = 0; r < h1; ++r) images[static_cast<std::size_t>(i)][r] = proj(r, i);
        double res = 0.0;
        for (int i = 0; i < k; ++i) {
            const auto& v = images[static_cast<std::size_t>(i)];
            res = std::max(res, norm.dist(plus[static_cast<std::size_t>(i)], t * v) / t);
            res = std::max(res, norm.dist(minus[static_cast<std::size_t>(i)], (-t) * v) / t);
        }
        out.residuals.push_back(res);
        if (prev.size()) out.last_change = (proj - prev).norm();
        prev = proj;
        out.map = HHomomorphism(norm.law_ptr(), std::move(images));
    }
    const double tol = 1e-12;
    for (std::size_t i = 1; i < out.residuals.size(); ++i)
        if (out.residuals[i] > out.residuals[i - 1] + tol)
            throw Error(ErrorKind::NonconvergentResidual, "Pansu residual increases from scale " + std::to_string(scales[i - 1]) +
                                                               " to " + std::to_string(scales[i]));
    if (out.last_change > kDiffTolerance * prev.norm() + tol)
        throw Error(ErrorKind::NonconvergentResidual, "Pansu difference quotients still moving at the finest scale");
    return out;
}

/// Positively homogeneous function on R^k sampled on unit directions. k = 1 uses {+1, -1};
/// k = 2 uses equally spaced angles with the polygonal gauge in between.
struct SeminormSample {
    int k = 1;
    std::vector<std::vector<double>> directions;
    std::vector<double> values;
    bool degenerate = false;
    /// Smallest value over all unit directions, refined between grid angles, over max_value().
    double min_ratio = 0.0;
    /// max over grid pairs of s(h_i + h_j) - s(h_i) - s(h_j), as a (nonpositive) negated slack.
    double subadditivity_slack = 0.0;

    double max_value() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }
    double min_value() const { return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end()); }

    double operator()(const double* h) const
    {
        if (k == 1) return h[0] >= 0.0 ? h[0] * values[0] : -h[0] * values[1];
        const double r = std::hypot(h[0], h[1]);
        if (r == 0.0) return 0.0;
        const int n = static_cast<int>(values.size());
        double th = std::atan2(h[1], h[0]);
        if (th < 0.0) th += 2.0 * M_PI;
        const double step = 2.0 * M_PI / n;
        const int j = std::min(n - 1, static_cast<int>(std::floor(th / step)));
        const int j1 = (j + 1) % n;
        // h = a u_j + b u_{j+1} with a, b >= 0; the gauge is linear on that sector.
        const auto& u = directions[static_cast<std::size_t>(j)];
        const auto& w = directions[static_cast<std::size_t>(j1)];
        const double det = u[0] * w[1] - u[1] * w[0];
        const double a = (h[0] * w[1] - h[1] * w[0]) / det;
        const double b = (u[0] * h[1] - u[1] * h[0]) / det;
        return a * values[static_cast<std::size_t>(j)] + b * values[static_cast<std::size_t>(j1)];
    }

    double operator()(const std::vector<double>& h) const { return (*this)(h.data()); }
};

inline std::vector<std::vector<double>> direction_grid(int k, int angles = 64)
{
    if (k == 1) return {{1.0}, {-1.0}};
    if (k == 2) {
        std::vector<std::vector<double>> out;
        for (int i = 0; i < angles; ++i) out.push_back({std::cos(2.0 * M_PI * i / angles), std::sin(2.0 * M_PI * i / angles)});
        return out;
    }
    throw Error(ErrorKind::DimensionMismatch, "direction grids are implemented for k = 1 and k = 2");
}

/// Metric differential: s(h) from d(f(x), f(x + t h)) / t per direction, Richardson
/// extrapolated over the two finest scales (2 s(t/2) - s(t) for halving scales).
/// NonconvergentResidual when the change between consecutive scales grows, or when the last
/// change exceeds 1e-3 of the largest value. For k = 2 the smallest grid value is refined by
/// a Brent search in angle before the degeneracy test.
inline SeminormSample metric_diff(const HomogeneousNorm& norm, const LipschitzMap& f, const std::vector<double>& x,
                                  const std::vector<double>& scales = default_diff_scales(), int angles = 64)
{
    detail::require_interior(f, x, scales);
    SeminormSample s;
    s.k = f.k();
    s.directions = direction_grid(s.k, angles);
    const GroupElement fx = f(x);
    std::vector<std::vector<double>> q(s.directions.size());
    for (std::size_t d = 0; d < s.directions.size(); ++d)
        for (double t : scales) q[d].push_back(norm.dist(fx, f(detail::shifted(x, s.directions[d], t))) / t);

    const double tol = 1e-12;
    double top = 0.0;
    std::vector<double> change(scales.size() > 1 ? scales.size() - 1 : 0, 0.0);
    for (std::size_t d = 0; d < q.size(); ++d) {
        for (std::size_t i = 0; i + 1 < scales.size(); ++i) change[i] = std::max(change[i], std::abs(q[d][i + 1] - q[d][i]));
        top = std::max(top, q[d].back());
    }
    for (std::size_t i = 1; i < change.size(); ++i)
        if (change[i] > change[i - 1] + tol)
            throw Error(ErrorKind::NonconvergentResidual, "metric difference quotients diverge at scale " + std::to_string(scales[i + 1]));
    if (!change.empty() && change.back() > kDiffTolerance * top + tol)
        throw Error(ErrorKind::NonconvergentResidual, "metric difference quotients still moving at the finest scale");

    for (std::size_t d = 0; d < q.size(); ++d) {
        double v = q[d].back();
        if (scales.size() > 1) {
            const double ratio = scales[scales.size() - 2] / scales.back();
            v = (ratio * q[d].back() - q[d][q[d].size() - 2]) / (ratio - 1.0);
        }
        s.values.push_back(std::max(0.0, v));
    }
    const double mx = s.max_value();
    double mn = s.min_value();
    if (s.k == 2 && mx > 0.0) {
        // A kernel direction between grid angles would hide from the grid; refine the minimum.
        const auto at = [&](double th) {
            const std::vector<double> h{std::cos(th), std::sin(th)};
            std::vector<double> qs;
            for (double t : scales) qs.push_back(norm.dist(fx, f(detail::shifted(x, h, t))) / t);
            if (qs.size() < 2) return qs.back();
            const double ratio = scales[scales.size() - 2] / scales.back();
            return std::max(0.0, (ratio * qs.back() - qs[qs.size() - 2]) / (ratio - 1.0));
        };
        const auto it = std::min_element(s.values.begin(), s.values.end());
        const double step = 2.0 * M_PI / static_cast<double>(s.values.size());
        const double th0 = step * static_cast<double>(it - s.values.begin());
        const auto best = boost::math::tools::brent_find_minima(at, th0 - step, th0 + step, 40);
        mn = std::min(mn, best.second);
    }
    s.min_ratio = mx > 0.0 ? mn / mx : 0.0;
    s.degenerate = !(mx > 0.0) || s.min_ratio <= kDegenerateRatio;

    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.directions.size(); ++i)
        for (std::size_t j = 0; j < s.directions.size(); ++j) {
            std::vector<double> h(static_cast<std::size_t>(s.k));
            for (int c = 0; c < s.k; ++c) h[static_cast<std::size_t>(c)] = s.directions[i][static_cast<std::size_t>(c)] + s.directions[j][static_cast<std::size_t>(c)];
            worst = std::max(worst, s(h) - s.values[i] - s.values[j]);
        }
    s.subadditivity_slack = -worst;
    return s;
}

inline nlohmann::json to_json(const SeminormSample& s)
{
    return {{"k", s.k}, {"directions", s.directions}, {"values", s.values}, {"degenerate", s.degenerate}, {"min_ratio", s.min_ratio},
            {"subadditivity_slack", s.subadditivity_slack}};
}

struct JacobianOptions {
    std::vector<double> scales = default_diff_scales();
    int angles = 64;
    std::vector<double> meshes;     // covering meshes; empty uses the defaults for k
    std::uint64_t jitter_seed = 1;
    bool cross_check = true;
    double tolerance = 0.05;        // OracleDisagreement threshold
};

struct MetricJacobian {
    double value = 0.0;
    SeminormSample seminorm;
    double numerator = 0.0;    // H^k of the Euclidean unit ball under s
    double denominator = 0.0;  // H^k of the Euclidean unit ball under |.|
    std::optional<double> linearization; // H^k(L(B)) / denominator from the Pansu differential
    std::optional<bool> injective;
    std::string denominator_reading = "euclidean Hausdorff measure of the euclidean unit ball";
};

namespace detail {

/// Euclidean-lattice covering ratio H_s^k(B) / H_{|.|}^k(B) with s normalized to max 1 and
/// rescaled by max^k. Shares the lattice and meshes between numerator and denominator so
/// the oracle's bias cancels.
struct SeminormVolume {
    double numerator = 0.0, denominator = 0.0;
};

inline std::vector<double> jacobian_meshes(int k, const std::vector<double>& meshes)
{
    return meshes.empty() ? default_meshes(k) : meshes;
}

inline double euclidean_ball_measure(int k, const std::vector<double>& meshes, std::uint64_t seed)
{
    static std::map<std::tuple<int, std::vector<double>, std::uint64_t>, double> cache;
    const auto key = std::make_tuple(k, meshes, seed);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const double h = *std::min_element(meshes.begin(), meshes.end()) / 20.0;
    const auto lattice = euclidean_ball_lattice(k, h, seed);
    FiniteNorm e{k, [k](const double* a) {
                     double r = 0.0;
                     for (int i = 0; i < k; ++i) r += a[i] * a[i];
                     return std::sqrt(r);
                 },
                 1.0};
    const double v = normed_space_estimate(e, lattice, k, meshes, h * lattice_cell_scale(e)).value;
    cache.emplace(key, v);
    return v;
}

inline double seminorm_ball_measure(const SeminormSample& s, const std::vector<double>& meshes, std::uint64_t seed)
{
    const double mx = s.max_value();
    SeminormSample unit = s;
    for (double& v : unit.values) v /= mx;
    const double h = *std::min_element(meshes.begin(), meshes.end()) / 20.0;
    const auto lattice = euclidean_ball_lattice(s.k, h, seed);
    FiniteNorm n{s.k, [&unit](const double* a) { return unit(a); }, unit.min_value()};
    return std::pow(mx, s.k) * normed_space_estimate(n, lattice, s.k, meshes, h * lattice_cell_scale(n)).value;
}

inline double linear_image_measure(const HomogeneousNorm& norm, const HHomomorphism& l, const std::vector<double>& meshes,
                                   std::uint64_t seed)
{
    const int k = l.k();
    double mx = 0.0;
    for (const auto& d : direction_grid(k)) mx = std::max(mx, norm(l(d)));
    const double h = *std::min_element(meshes.begin(), meshes.end()) / 20.0;
    std::vector<GroupElement> pts;
    for (auto a : euclidean_ball_lattice(k, h, seed)) {
        for (double& c : a) c /= mx;
        pts.push_back(l(a));
    }
    return std::pow(mx, k) * hausdorff_estimate(norm, pts, k, meshes, MeasureVariant::Hausdorff, h).value;
}

} // namespace detail

/// Metric Jacobian H_s^k(B_E) / H^k(B_E) of the metric differential s at x, both by the
/// covering oracle on one Euclidean lattice. Where the Pansu differential L converges, the
/// group-side value H^k(L(B_E)) / H^k(B_E) is compared and a gap above 5% raises
/// OracleDisagreement.
inline MetricJacobian metric_jacobian(const HomogeneousNorm& norm, const LipschitzMap& f, const std::vector<double>& x,
                                      const JacobianOptions& opt = {})
{
    MetricJacobian out;
    out.seminorm = metric_diff(norm, f, x, opt.scales, opt.angles);
    const int k = f.k();
    const auto meshes = detail::jacobian_meshes(k, opt.meshes);
    out.denominator = detail::euclidean_ball_measure(k, meshes, opt.jitter_seed);
    if (!out.seminorm.degenerate) {
        out.numerator = detail::seminorm_ball_measure(out.seminorm, meshes, opt.jitter_seed);
        out.value = out.numerator / out.denominator;
    }
    if (!opt.cross_check) return out;
    std::optional<PansuDifferential> pd;
    try {
        pd = pansu_diff(norm, f, x, opt.scales);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonconvergentResidual) throw;
    }
    if (!pd) return out;
    out.injective = pd->map.injective();
    out.linearization = *out.injective ? detail::linear_image_measure(norm, pd->map, meshes, opt.jitter_seed) / out.denominator : 0.0;
    const double gap = std::abs(*out.linearization - out.value);
    if (gap > opt.tolerance * std::max(out.value, *out.linearization))
        throw Error(ErrorKind::OracleDisagreement, "metric Jacobian " + std::to_string(out.value) +
                                                       " disagrees with the linearization value " +
                                                       std::to_string(*out.linearization));
    return out;
}

inline nlohmann::json to_json(const MetricJacobian& j)
{
    nlohmann::json out = {{"value", j.value},
                          {"numerator", j.numerator},
                          {"denominator", j.denominator},
                          {"denominator_reading", j.denominator_reading},
                          {"seminorm", to_json(j.seminorm)}};
    out["linearization"] = j.linearization ? nlohmann::json(*j.linearization) : nlohmann::json(nullptr);
    out["injective"] = j.injective ? nlohmann::json(*j.injective) : nlohmann::json(nullptr);
    return out;
}

struct AreaCheckOptions {
    int quadrature = 0;   // cells per axis; 0 picks 16 for k = 1 and 4 otherwise
    JacobianOptions jacobian;
    std::uint64_t seed = 1;
};

struct AreaCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    std::optional<double> ratio;   // absent when both sides vanish
    double lipschitz = 0.0;
    double domain_spacing = 0.0;
    std::vector<double> meshes;
    std::size_t image_samples = 0;
    std::vector<double> jacobians;  // at the quadrature midpoints
    double max_cross_gap = 0.0;     // max relative gap to the linearization value
    HausdorffEstimate image;
};

/// Area formula on a box: lhs is the midpoint quadrature of the metric Jacobian, rhs the
/// covering estimate of f(A) with meshes {4, 2, 1} delta (k = 1) or {16, 8} delta (k > 1)
/// from a domain grid of spacing min mesh / (20 Lip f).
inline AreaCheck area_check(const HomogeneousNorm& norm, const LipschitzMap& f, double delta, const AreaCheckOptions& opt = {})
{
    if (!(delta > 0.0)) throw Error(ErrorKind::NonpositiveScale, "delta must be positive");
    f.domain.validate();
    const int k = f.k();
    AreaCheck out;
    out.meshes = k == 1 ? std::vector<double>{4.0 * delta, 2.0 * delta, delta} : std::vector<double>{16.0 * delta, 8.0 * delta};
    out.lipschitz = f.lipschitz ? *f.lipschitz : sampled_lipschitz(norm, f, 4000, opt.seed);

    // lhs: midpoint rule, one Jacobian per distinct normalized seminorm.
    const int q = opt.quadrature > 0 ? opt.quadrature : (k == 1 ? 16 : 4);
    std::vector<double> cell(static_cast<std::size_t>(k));
    double cell_volume = 1.0;
    for (int i = 0; i < k; ++i) {
        cell[static_cast<std::size_t>(i)] = (f.domain.hi[static_cast<std::size_t>(i)] - f.domain.lo[static_cast<std::size_t>(i)]) / q;
        cell_volume *= cell[static_cast<std::size_t>(i)];
    }
    JacobianOptions jo = opt.jacobian;
    if (jo.meshes.empty()) jo.meshes = default_meshes(k);
    const double denominator = detail::euclidean_ball_measure(k, jo.meshes, jo.jitter_seed);
    std::map<std::vector<long long>, double> unit_cache, linear_cache;
    std::vector<int> idx(static_cast<std::size_t>(k), 0);
    while (true) {
        std::vector<double> x(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i)
            x[static_cast<std::size_t>(i)] = f.domain.lo[static_cast<std::size_t>(i)] + (idx[static_cast<std::size_t>(i)] + 0.5) * cell[static_cast<std::size_t>(i)];
        const auto s = metric_diff(norm, f, x, jo.scales, jo.angles);
        double j = 0.0;
        if (!s.degenerate) {
            // J(c s) = c^k J(s): cache on s / max s, rounded.
            const double mx = s.max_value();
            std::vector<long long> key;
            for (double v : s.values) key.push_back(std::llround(v / mx * 1e9));
            auto it = unit_cache.find(key);
            if (it == unit_cache.end()) {
                SeminormSample unit = s;
                for (double& v : unit.values) v /= mx;
                it = unit_cache.emplace(key, detail::seminorm_ball_measure(unit, jo.meshes, jo.jitter_seed) / denominator).first;
            }
            j = std::pow(mx, k) * it->second;
        }
        if (jo.cross_check) {
            try {
                const auto pd = pansu_diff(norm, f, x, jo.scales);
                double lin = 0.0;
                if (pd.map.injective()) {
                    // H^k(L(B)) only depends on the seminorm h -> ||L h||; cache on its normalization.
                    const auto grid = direction_grid(k, jo.angles);
                    std::vector<double> vals;
                    for (const auto& d : grid) vals.push_back(norm(pd.map(d)));
                    const double mx = *std::max_element(vals.begin(), vals.end());
                    std::vector<long long> key;
                    for (double v : vals) key.push_back(std::llround(v / mx * 1e9));
                    auto it = linear_cache.find(key);
                    if (it == linear_cache.end())
                        it = linear_cache.emplace(key, detail::linear_image_measure(norm, pd.map, jo.meshes, jo.jitter_seed) /
                                                           (std::pow(mx, k) * denominator)).first;
                    lin = std::pow(mx, k) * it->second;
                }
                const double gap = std::max(j, lin) > 0.0 ? std::abs(lin - j) / std::max(j, lin) : 0.0;
                out.max_cross_gap = std::max(out.max_cross_gap, gap);
                if (gap > jo.tolerance)
                    throw Error(ErrorKind::OracleDisagreement, "metric Jacobian " + std::to_string(j) +
                                                                   " disagrees with the linearization value " + std::to_string(lin));
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NonconvergentResidual) throw;
            }
        }
        out.jacobians.push_back(j);
        out.lhs += j * cell_volume;
        int d = 0;
        while (d < k && ++idx[static_cast<std::size_t>(d)] >= q) idx[static_cast<std::size_t>(d++)] = 0;
        if (d == k) break;
    }

    // rhs: covering estimate of the image of a fine domain grid.
    if (!(out.lipschitz > 0.0)) {
        out.rhs = 0.0;
        if (out.lhs > 0.0) out.ratio = std::numeric_limits<double>::infinity();
        return out;
    }
    const double h = *std::min_element(out.meshes.begin(), out.meshes.end()) / (20.0 * out.lipschitz);
    out.domain_spacing = h;
    std::vector<long> n(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        n[static_cast<std::size_t>(i)] = std::max(1L, std::lround((f.domain.hi[static_cast<std::size_t>(i)] - f.domain.lo[static_cast<std::size_t>(i)]) / h));
    std::vector<GroupElement> pts;
    std::vector<long> id(static_cast<std::size_t>(k), 0);
    double cell_diam = 0.0;
    for (int i = 0; i < k; ++i) {
        const double w = (f.domain.hi[static_cast<std::size_t>(i)] - f.domain.lo[static_cast<std::size_t>(i)]) / static_cast<double>(n[static_cast<std::size_t>(i)]);
        cell_diam += w * w;
    }
    while (true) {
        std::vector<double> a(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            const double w = (f.domain.hi[static_cast<std::size_t>(i)] - f.domain.lo[static_cast<std::size_t>(i)]) / static_cast<double>(n[static_cast<std::size_t>(i)]);
            a[static_cast<std::size_t>(i)] = f.domain.lo[static_cast<std::size_t>(i)] + (static_cast<double>(id[static_cast<std::size_t>(i)]) + 0.5) * w;
        }
        pts.push_back(f(a));
        int d = 0;
        while (d < k && ++id[static_cast<std::size_t>(d)] >= n[static_cast<std::size_t>(d)]) id[static_cast<std::size_t>(d++)] = 0;
        if (d == k) break;
    }
    out.image_samples = pts.size();
    out.image = hausdorff_estimate(norm, pts, k, out.meshes, MeasureVariant::Hausdorff, out.lipschitz * std::sqrt(cell_diam));
    out.rhs = out.image.value;
    if (out.lhs > 0.0 || out.rhs > 0.0) out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : std::numeric_limits<double>::infinity();
    return out;
}

inline nlohmann::json to_json(const AreaCheck& a)
{
    nlohmann::json out = {{"lhs", a.lhs},
                          {"rhs", a.rhs},
                          {"lipschitz", a.lipschitz},
                          {"domain_spacing", a.domain_spacing},
                          {"meshes", a.meshes},
                          {"image_samples", a.image_samples},
                          {"jacobians", a.jacobians},
                          {"max_cross_gap", a.max_cross_gap},
                          {"image", to_json(a.image)}};
    out["ratio"] = a.ratio ? nlohmann::json(*a.ratio) : nlohmann::json(nullptr);
    return out;
}

} // namespace hgr
