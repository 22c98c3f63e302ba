#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <json.hpp>

#include "hgr/profile.hpp"

namespace hgr {

struct TubeCheckOptions {
    double opening = 0.02;          // s, must be below c_G^3
    std::optional<double> lambda;   // hypothesis constant; empirical when absent
    double delta = 0.25;            // hypothesis scale bound
    int tubes = 1000;
    int hypothesis_points = 0;      // 0: every sample is a cone vertex
    int hypothesis_scales = 8;      // geometric, from delta down
    std::uint64_t seed = 1;
};

struct TubeCheckReport {
    double opening = 0.0;
    double c_g = 0.0;
    double tube_ratio = 0.0;        // rho / t = s / (4 c_G)
    double lambda = 0.0;            // constant the conclusions are checked against
    double lambda_empirical = 0.0;  // max sampled mu(X(p, r, V^perp, s)) / (r^k s^k)
    GroupElement worst_vertex;
    double worst_radius = 0.0;
    int tubes = 0;
    double min_slack = 0.0;         // min over tubes of 2 lambda 21^k t^k - mu(tube)
    double min_relative_slack = 0.0;
    GroupElement worst_center;
    double worst_t = 0.0;
    double worst_mass = 0.0;
    double density_max = 0.0;       // max window-sup of mu(B(w, r)) / r^k over tube centres
    double density_bound = 0.0;     // 2 21^k lambda
    double min_scale = 0.0;         // resolution floor of sampled radii
    bool passed = true;
};

/// Checks the tube estimate for purely unrectifiable sets on a sample.
///
/// Hypothesis: mu(X(p, r, V^perp, s)) <= lambda r^k s^k at sampled vertices p and radii
/// r in [r_min, delta]. Conclusion, for t in [r_min, delta/6] and rho = s t / (4 c_G):
/// mu(B(w, t) cap pi_V^{-1}(B(pi_V(w), rho))) <= 2 lambda 21^k t^k, and the density bound
/// 2 21^k lambda. r_min is 5 sample spacings, below which the sample is not a measure
/// of the set. Masses are raw (mu(.) / r^k), which keeps both sides in one normalization.
inline TubeCheckReport tube_bound_check(const IndexedMeasure& im, const HorizontalSubgroup& v, double c_g,
                                        const TubeCheckOptions& opt)
{
    const auto& norm = im.norm;
    const auto& mu = im.mu;
    const double k = mu.k;
    TubeCheckReport rep;
    rep.opening = opt.opening;
    rep.c_g = c_g;
    if (!(c_g > 0.0 && c_g < 1.0)) throw Error(ErrorKind::PreconditionFailed, "c_G must lie in (0, 1)");
    if (!(opt.opening > 0.0 && opt.opening < c_g * c_g * c_g))
        throw Error(ErrorKind::PreconditionFailed, "the opening s must satisfy 0 < s < c_G^3 = " + std::to_string(c_g * c_g * c_g));
    if (!mu.empty() && !mu.purely_unrectifiable)
        throw Error(ErrorKind::PreconditionFailed, "the measure is not flagged purely unrectifiable");
    if (std::abs(k - v.k()) > 1e-12) throw Error(ErrorKind::DimensionMismatch, "tube check needs k = dim V");
    rep.tube_ratio = opt.opening / (4.0 * c_g);
    rep.density_bound = 0.0;
    if (mu.empty()) return rep; // every bound holds with zero mass

    rep.min_scale = kResolutionFactor * im.spacing;
    if (!(opt.delta / 6.0 > rep.min_scale))
        throw Error(ErrorKind::ResolutionExceeded, "delta/6 is below the resolution floor of the sample");
    const double lo = std::log(rep.min_scale), hi = std::log(opt.delta);
    std::vector<double> radii;
    for (int i = 0; i < opt.hypothesis_scales; ++i)
        radii.push_back(std::exp(hi - (hi - lo) * i / std::max(1, opt.hypothesis_scales - 1)));

    // Hypothesis: vertical cones at the sampled vertices, all radii from one pass.
    std::mt19937_64 rng(opt.seed);
    std::vector<std::size_t> vertices(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) vertices[i] = i;
    if (opt.hypothesis_points > 0 && static_cast<std::size_t>(opt.hypothesis_points) < mu.size()) {
        std::shuffle(vertices.begin(), vertices.end(), rng);
        vertices.resize(static_cast<std::size_t>(opt.hypothesis_points));
        std::sort(vertices.begin(), vertices.end());
    }
    const double sk = std::pow(opt.opening, k);
    ConeOptions fast;
    fast.exact_margin = false;
    std::vector<double> cone_mass(radii.size());
    for (std::size_t p : vertices) {
        const ConeSpec cone{mu.points[p], v, opt.opening, std::nullopt, true};
        std::fill(cone_mass.begin(), cone_mass.end(), 0.0);
        for (int i : ball_query(norm, im.index, mu.points, mu.points[p], radii.front())) {
            const auto& q = mu.points[static_cast<std::size_t>(i)];
            const double d = norm.dist(mu.points[p], q);
            if (d == 0.0 || !cone_contains(norm, cone, q, fast).contained) continue;
            for (std::size_t j = 0; j < radii.size() && d <= radii[j]; ++j) cone_mass[j] += mu.weights[static_cast<std::size_t>(i)];
        }
        for (std::size_t j = 0; j < radii.size(); ++j) {
            const double ratio = cone_mass[j] / (std::pow(radii[j], k) * sk);
            if (ratio > rep.lambda_empirical) {
                rep.lambda_empirical = ratio;
                rep.worst_vertex = mu.points[p];
                rep.worst_radius = radii[j];
            }
        }
    }
    if (opt.lambda) {
        if (rep.lambda_empirical > *opt.lambda * (1.0 + 1e-12)) {
            nlohmann::json where = {{"p", rep.worst_vertex.to_vector()}, {"r", rep.worst_radius}, {"ratio", rep.lambda_empirical}};
            throw Error(ErrorKind::HypothesisUnmet, "cone mass exceeds lambda r^k s^k at " + where.dump());
        }
        rep.lambda = *opt.lambda;
    } else {
        rep.lambda = rep.lambda_empirical;
    }

    // Conclusion on sampled tubes centred at sample points, log-uniform t.
    const double factor = 2.0 * std::pow(21.0, k);
    rep.density_bound = factor * rep.lambda;
    std::uniform_int_distribution<std::size_t> pick(0, mu.size() - 1);
    std::uniform_real_distribution<double> logt(std::log(rep.min_scale), std::log(opt.delta / 6.0));
    rep.min_slack = std::numeric_limits<double>::infinity();
    rep.min_relative_slack = std::numeric_limits<double>::infinity();
    const auto density_scales = geometric_scales(opt.delta / 6.0, std::max(1, static_cast<int>(std::floor(std::log2(opt.delta / 6.0 / rep.min_scale))) + 1));
    for (int n = 0; n < opt.tubes; ++n) {
        const GroupElement& w = mu.points[pick(rng)];
        const double t = std::exp(logt(rng));
        const double rho = rep.tube_ratio * t;
        const GroupElement pw = project_h(v, w);
        double mass = 0.0;
        for (int i : ball_query(norm, im.index, mu.points, w, t))
            if (norm.dist(pw, project_h(v, mu.points[static_cast<std::size_t>(i)])) <= rho) mass += mu.weights[static_cast<std::size_t>(i)];
        const double bound = factor * rep.lambda * std::pow(t, k);
        const double slack = bound - mass;
        const double rel = bound > 0.0 ? slack / bound : (mass > 0.0 ? -1.0 : 0.0);
        if (slack < rep.min_slack) {
            rep.min_slack = slack;
            rep.worst_center = w;
            rep.worst_t = t;
            rep.worst_mass = mass;
        }
        rep.min_relative_slack = std::min(rep.min_relative_slack, rel);
        ++rep.tubes;
        if (n < 200) {
            const auto d = density_ratios(im, w, k, density_scales);
            rep.density_max = std::max(rep.density_max, *std::max_element(d.begin(), d.end()) * unit_ball_volume(k));
        }
    }
    rep.passed = rep.min_slack >= 0.0 && rep.density_max <= rep.density_bound;
    return rep;
}

inline nlohmann::json to_json(const TubeCheckReport& r)
{
    return {{"opening", r.opening},
            {"c_G", r.c_g},
            {"tube_ratio", r.tube_ratio},
            {"lambda", r.lambda},
            {"lambda_empirical", r.lambda_empirical},
            {"hypothesis_worst", {{"p", r.worst_vertex.to_vector()}, {"r", r.worst_radius}}},
            {"tubes", r.tubes},
            {"min_slack", r.min_slack},
            {"min_relative_slack", r.min_relative_slack},
            {"worst_tube", {{"w", r.worst_center.to_vector()}, {"t", r.worst_t}, {"mass", r.worst_mass}}},
            {"density_max", r.density_max},
            {"density_bound", r.density_bound},
            {"min_scale", r.min_scale},
            {"passed", r.passed}};
}

} // namespace hgr
