#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "hgr/cone.hpp"
#include "hgr/grassmannian.hpp"
#include "hgr/hausdorff.hpp"

namespace hgr {

/// A point measure with its range index and sample spacing, built once and shared by the
/// profile estimators. Holds references: the norm and the measure must outlive it.
struct IndexedMeasure {
    const HomogeneousNorm& norm;
    const PointMeasure& mu;
    SpatialIndex index;
    double spacing = 0.0; // median nearest-neighbour distance

    IndexedMeasure(const HomogeneousNorm& n, const PointMeasure& m)
        : norm(n), mu(m), index(build_group_index(n, m.points)), spacing(nearest_neighbor_spacing(n, index, m.points))
    {
    }
};

/// Smallest admissible scale relative to the sample spacing.
inline constexpr double kResolutionFactor = 5.0;

inline void require_resolution(const IndexedMeasure& im, const std::vector<double>& scales)
{
    if (scales.empty()) throw Error(ErrorKind::ParseError, "at least one scale is required");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > 0.0)) throw Error(ErrorKind::NonpositiveScale, "scales must be positive");
        if (i > 0 && !(scales[i] < scales[i - 1])) throw Error(ErrorKind::ParseError, "scales must be strictly decreasing");
    }
    const double floor = kResolutionFactor * im.spacing;
    if (scales.back() < floor)
        throw Error(ErrorKind::ResolutionExceeded, "smallest scale " + std::to_string(scales.back()) + " is below " +
                                                       std::to_string(kResolutionFactor) + " x sample spacing (" +
                                                       std::to_string(im.spacing) + ")");
}

/// r0, r0 ratio, r0 ratio^2, ... (count values).
inline std::vector<double> geometric_scales(double r0, int count, double ratio = 0.5)
{
    if (!(r0 > 0.0) || !(ratio > 0.0 && ratio < 1.0) || count < 1)
        throw Error(ErrorKind::ParseError, "geometric scales need r0 > 0, ratio in (0, 1) and count >= 1");
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(r0 * std::pow(ratio, i));
    return out;
}

/// Per-scale statistics at one point. A statistic that was not computed is left empty.
struct DecayProfile {
    std::vector<double> scales;
    std::vector<double> excess;
    std::vector<double> density;
    std::vector<double> blowup;
    std::optional<HorizontalSubgroup> subgroup;

    bool empty() const { return scales.empty(); }

    void validate() const
    {
        for (std::size_t i = 1; i < scales.size(); ++i)
            if (!(scales[i] < scales[i - 1])) throw Error(ErrorKind::ParseError, "profile scales must be strictly decreasing");
        for (const auto* v : {&excess, &density, &blowup}) {
            if (!v->empty() && v->size() != scales.size())
                throw Error(ErrorKind::DimensionMismatch, "profile statistic does not match its scales");
            for (double x : *v)
                if (!(x >= 0.0)) throw Error(ErrorKind::ParseError, "profile statistics must be nonnegative");
        }
    }

    /// Max and min of the density over the scale window; these stand in for the upper and
    /// lower densities, which finite data cannot reach.
    double window_sup() const { return density.empty() ? 0.0 : *std::max_element(density.begin(), density.end()); }
    double window_inf() const { return density.empty() ? 0.0 : *std::min_element(density.begin(), density.end()); }
};

inline nlohmann::json to_json(const DecayProfile& p)
{
    nlohmann::json j = {{"scales", p.scales}, {"excess", p.excess}, {"density", p.density}, {"blowup_discrepancy", p.blowup}};
    if (!p.density.empty()) {
        j["density_window_sup"] = p.window_sup();
        j["density_window_inf"] = p.window_inf();
    }
    if (p.subgroup) j["subgroup"] = to_json(*p.subgroup);
    return j;
}

/// mu(B(p, r)) / (alpha(k) r^k) at every scale: the density in the normalization where a
/// k-plane through p has density 1.
inline std::vector<double> density_ratios(const IndexedMeasure& im, const GroupElement& p, double k,
                                          const std::vector<double>& scales)
{
    std::vector<double> out;
    const double alpha = unit_ball_volume(k);
    for (double r : scales) {
        double m = 0.0;
        for (int i : ball_query(im.norm, im.index, im.mu.points, p, r)) m += im.mu.weights[static_cast<std::size_t>(i)];
        out.push_back(m / (alpha * std::pow(r, k)));
    }
    return out;
}

inline DecayProfile density_profile(const IndexedMeasure& im, const GroupElement& p, double k, const std::vector<double>& scales)
{
    require_resolution(im, scales);
    DecayProfile out;
    out.scales = scales;
    out.density = density_ratios(im, p, k, scales);
    return out;
}

/// Bumps psi(d(c, x) / width) with psi(t) = exp(1 - 1/(1 - t^2)) on [0, 1), centred on a
/// square grid of the first two first-layer coordinates (a line grid when the first layer
/// is one-dimensional). The default grid pitch 0.3 is below sqrt(2) times the width, so the supports
/// cover the grid square and every line through the origin meets several bumps.
class TestDictionary {
public:
    TestDictionary() = default;
    TestDictionary(const HomogeneousNorm& norm, int per_side = 7, double extent = 0.9, double width = 0.25)
        : width_(width)
    {
        const int dim = norm.law().dim();
        const int h1 = norm.law().algebra().layer_dim(1);
        const auto coord = [&](int i) { return per_side == 1 ? 0.0 : -extent + 2.0 * extent * i / (per_side - 1); };
        for (int i = 0; i < per_side; ++i) {
            if (h1 == 1) {
                GroupElement c(dim);
                c[0] = coord(i);
                centers_.push_back(c);
                continue;
            }
            for (int j = 0; j < per_side; ++j) {
                GroupElement c(dim);
                c[0] = coord(i);
                c[1] = coord(j);
                centers_.push_back(c);
            }
        }
        for (const auto& c : centers_) reach_ = std::max(reach_, norm(c) + width_);
    }

    std::size_t size() const { return centers_.size(); }
    const GroupElement& center(std::size_t i) const { return centers_[i]; }
    double width() const { return width_; }
    /// Every bump vanishes outside B(0, reach).
    double reach() const { return reach_; }

    static double profile(double t) { return t >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - t * t)); }

    double eval(const HomogeneousNorm& norm, std::size_t i, const GroupElement& x) const
    {
        // First-layer prefilter: d(c, x) >= f |x^(1) - c^(1)|.
        const int h1 = norm.law().algebra().layer_dim(1);
        double e2 = 0.0;
        for (int a = 0; a < h1; ++a) e2 += (x[a] - centers_[i][a]) * (x[a] - centers_[i][a]);
        const double f = norm.first_layer_factor();
        if (f * f * e2 >= width_ * width_) return 0.0;
        return profile(norm.dist(centers_[i], x) / width_);
    }

private:
    std::vector<GroupElement> centers_;
    double width_ = 0.25;
    double reach_ = 0.0;
};

/// gamma_V times the Lebesgue integral over V of each bump, by the midpoint rule on a grid
/// of 64^k cells over the box that contains the bump's trace on V.
inline std::vector<double> reference_integrals(const HomogeneousNorm& norm, const HorizontalSubgroup& v, double gamma,
                                               const TestDictionary& dict, int grid = 64)
{
    std::vector<double> out;
    const int k = v.k();
    const double half = dict.width() / norm.first_layer_factor();
    std::vector<double> a(static_cast<std::size_t>(k));
    for (std::size_t n = 0; n < dict.size(); ++n) {
        const Eigen::VectorXd mid = v.coordinates(dict.center(n));
        const double h = 2.0 * half / grid;
        std::vector<int> idx(static_cast<std::size_t>(k), 0);
        double sum = 0.0;
        while (true) {
            for (int i = 0; i < k; ++i) a[static_cast<std::size_t>(i)] = mid(i) - half + (idx[static_cast<std::size_t>(i)] + 0.5) * h;
            sum += dict.eval(norm, n, v.point(a.data()));
            int d = 0;
            while (d < k && ++idx[static_cast<std::size_t>(d)] >= grid) idx[static_cast<std::size_t>(d++)] = 0;
            if (d == k) break;
        }
        out.push_back(gamma * sum * std::pow(h, k));
    }
    return out;
}

struct BlowupOptions {
    /// Divide by mu(B(p, r)) / r^k and compare against the reference measure normalized to
    /// unit mass on B(0, 1), instead of comparing raw r^{-k} pushforwards.
    bool normalized = false;
    int quadrature_grid = 64;
};

/// Test-dictionary discrepancy between r^{-k} (T_{p,r})_# mu and gamma_V H^k on V.
inline DecayProfile blowup_test(const IndexedMeasure& im, const GroupElement& p, double k, const HorizontalSubgroup& v,
                                double gamma, const std::vector<double>& scales, const TestDictionary& dict,
                                const BlowupOptions& opt = {})
{
    require_resolution(im, scales);
    if (std::abs(k - v.k()) > 1e-12) throw Error(ErrorKind::DimensionMismatch, "blow-up needs k = dim V");
    const auto& law = im.norm.law();
    std::vector<double> ref = reference_integrals(im.norm, v, gamma, dict, opt.quadrature_grid);
    if (opt.normalized) {
        // Reference mass of B(0, 1): gamma times the Lebesgue measure of the norm-ball slice.
        const double unit = gamma * unit_ball_lebesgue(restricted_norm(im.norm, v));
        for (double& x : ref) x /= unit;
    }
    DecayProfile out;
    out.scales = scales;
    out.subgroup = v;
    out.density = density_ratios(im, p, k, scales);
    const double alpha = unit_ball_volume(k);
    for (std::size_t s = 0; s < scales.size(); ++s) {
        const double r = scales[s];
        std::vector<double> val(dict.size(), 0.0);
        for (int i : ball_query(im.norm, im.index, im.mu.points, p, r * dict.reach())) {
            const GroupElement y = magnify(law, p, r, im.mu.points[static_cast<std::size_t>(i)]);
            for (std::size_t n = 0; n < dict.size(); ++n) val[n] += im.mu.weights[static_cast<std::size_t>(i)] * dict.eval(im.norm, n, y);
        }
        const double scale_mass = opt.normalized ? out.density[s] * alpha : 1.0;
        double worst = 0.0;
        for (std::size_t n = 0; n < dict.size(); ++n) {
            double x = val[n] / std::pow(r, k);
            if (opt.normalized) x = scale_mass > 0.0 ? x / scale_mass : 0.0;
            worst = std::max(worst, std::abs(x - ref[n]));
        }
        out.blowup.push_back(worst);
    }
    return out;
}

/// Cone excess of mu at p around T at every scale, from one membership pass over B(p, r_max).
/// With `subsample` > 0 each annulus between consecutive scales is thinned by a stride to at
/// most that many points, each standing for the weight of its stride block.
inline std::vector<double> excess_profile(const IndexedMeasure& im, const GroupElement& p, const HorizontalSubgroup& t,
                                          bool vertical, double s, double k, const std::vector<double>& scales,
                                          const ConeOptions& opt = {}, int subsample = 0)
{
    const auto ball = ball_query(im.norm, im.index, im.mu.points, p, scales.front());
    // Bucket by annulus: bucket j holds points with r_{j+1} < d <= r_j (the last bucket goes
    // down to the vertex, which is excluded).
    std::vector<std::vector<std::pair<int, double>>> buckets(scales.size());
    for (int i : ball) {
        const double d = im.norm.dist(p, im.mu.points[static_cast<std::size_t>(i)]);
        if (d == 0.0) continue;
        std::size_t j = 0;
        while (j + 1 < scales.size() && d <= scales[j + 1]) ++j;
        buckets[j].push_back({i, im.mu.weights[static_cast<std::size_t>(i)]});
    }
    ConeSpec cone{p, t, s, std::nullopt, vertical};
    cone.validate();
    ConeOptions fast = opt;
    fast.exact_margin = false;
    std::vector<double> outside(scales.size(), 0.0);
    for (std::size_t j = 0; j < buckets.size(); ++j) {
        auto& b = buckets[j];
        const std::size_t n = b.size();
        const std::size_t stride = (subsample > 0 && n > static_cast<std::size_t>(subsample))
                                       ? (n + static_cast<std::size_t>(subsample) - 1) / static_cast<std::size_t>(subsample)
                                       : 1;
        for (std::size_t a = 0; a < n; a += stride) {
            double w = 0.0;
            for (std::size_t c = a; c < std::min(n, a + stride); ++c) w += b[c].second;
            if (!cone_contains(im.norm, cone, im.mu.points[static_cast<std::size_t>(b[a].first)], fast).contained) outside[j] += w;
        }
    }
    std::vector<double> out(scales.size());
    double acc = 0.0;
    for (std::size_t j = scales.size(); j-- > 0;) {
        acc += outside[j];
        out[j] = acc / std::pow(scales[j], k);
    }
    return out;
}

struct TangentFitOptions {
    double opening = 0.2;
    std::vector<double> scales;
    /// Points per annulus in the net scan; 0 uses every point.
    int annulus_samples = 512;
    /// Score net elements on the finest `window` scales only (0: all scales). The profile
    /// still reports every scale.
    int window = 0;
    bool refine = true;
    ConeOptions cone{};
};

struct TangentFit {
    HorizontalSubgroup subgroup;
    int net_index = -1;
    double net_worst = 0.0; // worst windowed excess of the net winner (scan estimate)
    double worst = 0.0;     // worst windowed excess of the returned subgroup (exact)
    bool refined = false;
    std::vector<double> net_scores; // worst scan excess per net element
    DecayProfile profile;
};

namespace detail {

/// Top-k eigenspace of sum w |y|^{-2} y^(1) y^(1)^T over the points of B(p, r), p excluded:
/// the k-plane that minimizes the weighted squared sine of the angle to the samples.
inline std::optional<HorizontalSubgroup> principal_subgroup(const IndexedMeasure& im, const GroupElement& p, int k, double r)
{
    const auto& alg = im.norm.law().algebra();
    const int h1 = alg.layer_dim(1);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(h1, h1);
    int used = 0;
    for (int i : ball_query(im.norm, im.index, im.mu.points, p, r)) {
        const auto& x = im.mu.points[static_cast<std::size_t>(i)];
        Eigen::VectorXd u(h1);
        for (int a = 0; a < h1; ++a) u(a) = x[a] - p[a];
        const double n2 = u.squaredNorm();
        if (n2 == 0.0) continue;
        m += im.mu.weights[static_cast<std::size_t>(i)] / n2 * u * u.transpose();
        ++used;
    }
    if (used < k) return std::nullopt;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    std::vector<GroupElement> vecs;
    for (int c = 0; c < k; ++c) {
        GroupElement v(alg.dim());
        for (int a = 0; a < h1; ++a) v[a] = es.eigenvectors()(a, h1 - 1 - c);
        vecs.push_back(v);
    }
    try {
        return make_horizontal(alg, vecs);
    } catch (const Error&) {
        return std::nullopt; // the eigenspace is not isotropic
    }
}

inline double worst_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

} // namespace detail

/// Net element minimizing the worst cone excess over the scales (lowest index on ties),
/// then refined to the principal k-plane of the finest ball when that plane is horizontal
/// and does no worse on the exact excess.
inline TangentFit fit_tangent(const IndexedMeasure& im, const GroupElement& p, double k, const GrassmannianNet& net,
                              const TangentFitOptions& opt)
{
    if (net.elements.empty()) throw Error(ErrorKind::EmptyNet, "the Grassmannian net has no elements");
    if (std::abs(k - net.k) > 1e-12) throw Error(ErrorKind::DimensionMismatch, "net dimension does not match k");
    require_resolution(im, opt.scales);
    const std::size_t window = opt.window > 0 ? std::min(opt.scales.size(), static_cast<std::size_t>(opt.window)) : opt.scales.size();
    const std::vector<double> scored(opt.scales.end() - static_cast<long>(window), opt.scales.end());
    const auto score = [&](const std::vector<double>& full) {
        return detail::worst_of(std::vector<double>(full.end() - static_cast<long>(window), full.end()));
    };
    TangentFit out;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < net.elements.size(); ++e) {
        const double w = detail::worst_of(
            excess_profile(im, p, net.elements[e], false, opt.opening, k, scored, opt.cone, opt.annulus_samples));
        out.net_scores.push_back(w);
        if (w < best) {
            best = w;
            out.net_index = static_cast<int>(e);
        }
    }
    out.net_worst = best;
    out.subgroup = net.elements[static_cast<std::size_t>(out.net_index)];
    auto exact = excess_profile(im, p, out.subgroup, false, opt.opening, k, opt.scales, opt.cone);
    out.worst = score(exact);
    if (opt.refine) {
        if (auto pc = detail::principal_subgroup(im, p, static_cast<int>(k), opt.scales.back())) {
            auto pe = excess_profile(im, p, *pc, false, opt.opening, k, opt.scales, opt.cone);
            if (score(pe) <= out.worst) {
                out.subgroup = *pc;
                out.worst = score(pe);
                exact = std::move(pe);
                out.refined = true;
            }
        }
    }
    out.profile.scales = opt.scales;
    out.profile.excess = std::move(exact);
    out.profile.density = density_ratios(im, p, k, opt.scales);
    out.profile.subgroup = out.subgroup;
    return out;
}

inline nlohmann::json to_json(const TangentFit& f)
{
    return {{"subgroup", to_json(f.subgroup)}, {"net_index", f.net_index}, {"net_worst_excess", f.net_worst},
            {"worst_excess", f.worst}, {"refined", f.refined}, {"profile", to_json(f.profile)}};
}

} // namespace hgr
