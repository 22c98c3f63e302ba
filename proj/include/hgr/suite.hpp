#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "hgr/compiled_law.hpp"
#include "hgr/differential.hpp"
#include "hgr/fixtures.hpp"
#include "hgr/grassmannian.hpp"
#include "hgr/group.hpp"
#include "hgr/lipschitz_cover.hpp"
#include "hgr/report.hpp"
#include "hgr/tube_bound.hpp"

#ifndef HGR_DATA_DIR
#define HGR_DATA_DIR "data"
#endif

namespace hgr {

struct SuiteConfig {
    std::string data_dir = HGR_DATA_DIR;
    std::uint64_t seed = 1;
    std::vector<int> criteria;          // empty: all
    long calibration_samples = 100000;  // triangle certification of the shipped norms
};

inline nlohmann::json to_json(const SuiteConfig& c)
{
    return {{"data_dir", c.data_dir}, {"seed", c.seed}, {"criteria", c.criteria}, {"calibration_samples", c.calibration_samples}};
}

struct CriterionInfo {
    int id;
    const char* key;
    const char* title;
};

inline const std::vector<CriterionInfo>& criteria_catalogue()
{
    static const std::vector<CriterionInfo> all{
        {1, "group-algebra", "associativity, inverse and dilation residuals; compiled law agreement"},
        {2, "homogeneous-distance", "homogeneity, left invariance and triangle inequality of the shipped norms"},
        {3, "projection-algebra", "exact factorization and h-homomorphism residual of pi_V"},
        {4, "distance-sandwich", "certified c_G and both distance-estimate chains"},
        {5, "haar-scaling", "H^k(V cap B(0,t)) / t^k constant over a decade for net subgroups"},
        {6, "density-bounds", "window upper density in [0.9 * 2^-k, 1.1] on finite-mass fixtures"},
        {7, "blowup", "blow-up discrepancy decays on the lifted curve"},
        {8, "tangent-fit", "fitted tangent within rho 1e-2 and cone excess below 1e-3"},
        {9, "pure-unrectifiability", "Cantor set: no net element has small excess; tube bound holds"},
        {10, "graph-lipschitz", "graph map over T has Lipschitz constant at most 1/s"},
        {11, "area-formula", "area formula ratio within 10% and Jacobian cross-check within 5%"},
        {12, "determinism", "two suite runs give byte-identical reports apart from timestamps"},
    };
    return all;
}

struct CriterionResult {
    int id = 0;
    std::string key;
    nlohmann::json details = nlohmann::json::object();
    std::vector<Verdict> verdicts;

    bool passed() const
    {
        return !verdicts.empty() && std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
    }
};

inline nlohmann::json to_json(const CriterionResult& c)
{
    nlohmann::json v = nlohmann::json::array();
    for (const auto& x : c.verdicts) v.push_back(to_json(x));
    return {{"id", c.id}, {"key", c.key}, {"passed", c.passed()}, {"verdicts", v}, {"details", c.details}};
}

/// Shared state of one battery run: groups from the data directory and fixtures, each
/// built on first use.
class SuiteContext {
public:
    explicit SuiteContext(SuiteConfig cfg) : cfg_(std::move(cfg)) {}

    const SuiteConfig& config() const { return cfg_; }
    std::uint64_t seed(std::uint64_t offset) const { return cfg_.seed * 1000003ULL + offset; }

    /// Group from <data_dir>/groups/<name>.json with the norm the file selects.
    const HomogeneousGroup& group(const std::string& name)
    {
        auto& slot = groups_[name];
        if (!slot) {
            const std::string path = cfg_.data_dir + "/groups/" + name + ".json";
            const GroupSpec spec = load_group_spec(path);
            try {
                slot = std::make_unique<HomogeneousGroup>(spec.algebra, spec.norm.value_or(NormSpec{}), cfg_.calibration_samples, cfg_.seed);
            } catch (const Error& e) {
                throw Error(e.kind(), path + ": " + e.what());
            }
        }
        return *slot;
    }

    const Fixture& fixture(const std::string& group_name, const std::string& name, const nlohmann::json& params)
    {
        const std::string key = group_name + "|" + name + "|" + params.dump();
        auto& slot = fixtures_[key];
        if (!slot) slot = std::make_unique<Fixture>(gen_fixture(name, params, cfg_.seed, group(group_name).norm()));
        return *slot;
    }

private:
    SuiteConfig cfg_;
    std::map<std::string, std::unique_ptr<HomogeneousGroup>> groups_;
    std::map<std::string, std::unique_ptr<Fixture>> fixtures_;
};

namespace suite_detail {

inline GroupElement gaussian(int dim, std::mt19937_64& rng, double scale = 1.0)
{
    std::normal_distribution<double> g(0.0, scale);
    GroupElement x(dim);
    for (int i = 0; i < dim; ++i) x[i] = g(rng);
    return x;
}

inline double rel_residual(const GroupElement& a, const GroupElement& b)
{
    return max_abs(a - b) / std::max(1.0, std::max(max_abs(a), max_abs(b)));
}

/// Indices of `count` sample points drawn from [lo, hi) of the index range, sorted.
inline std::vector<std::size_t> sample_indices(std::size_t lo, std::size_t hi, int count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(lo, hi - 1);
    std::vector<std::size_t> out;
    for (int i = 0; i < count; ++i) out.push_back(pick(rng));
    std::sort(out.begin(), out.end());
    return out;
}

inline HorizontalSubgroup line(const GradedAlgebra& alg, double angle)
{
    GroupElement v(alg.dim());
    v[0] = std::cos(angle);
    v[1] = std::sin(angle);
    return make_horizontal(alg, {v});
}

/// Lifted circle at the resolution the blow-up and tangent criteria share.
/// The lifted circle at two resolutions. Blow-ups down to r = 2.4e-4 need about a hundred
/// samples per radius to stay above the quadrature floor. Tangent fitting needs far fewer.
inline constexpr double kBlowupSpacing = 2.5e-6;
inline constexpr double kTangentSpacing = 1e-4;
inline const Fixture& fine_curve(SuiteContext& ctx, double spacing)
{
    return ctx.fixture("heisenberg", "lifted-curve", {{"spacing", spacing}});
}

/// Indices of points whose parameter lies at least `margin` from both curve ends.
inline std::vector<std::size_t> smooth_points(const PointMeasure& mu, double margin, int count, std::uint64_t seed)
{
    const double du = mu.metadata.at("du").get<double>();
    const auto lo = static_cast<std::size_t>(std::ceil(margin / du));
    const std::size_t hi = mu.size() - lo;
    return sample_indices(lo, hi, count, seed);
}

} // namespace suite_detail

inline CriterionResult criterion_group_algebra(SuiteContext& ctx)
{
    using namespace suite_detail;
    CriterionResult out;
    for (const char* name : {"heisenberg", "engel", "abelian2"}) {
        const auto& g = ctx.group(name);
        const auto& law = g.law();
        std::mt19937_64 rng(ctx.seed(1));
        std::uniform_real_distribution<double> lr(-1.0, 1.0);
        double assoc = 0.0, inv = 0.0, dil = 0.0;
        const int triples = 10000;
        for (int n = 0; n < triples; ++n) {
            const auto x = gaussian(g.dim(), rng), y = gaussian(g.dim(), rng), z = gaussian(g.dim(), rng);
            assoc = std::max(assoc, rel_residual(law.product(law.product(x, y), z), law.product(x, law.product(y, z))));
            inv = std::max(inv, max_abs(law.product(x, law.inverse(x))));
            inv = std::max(inv, max_abs(law.product(law.inverse(x), x)));
            const double r = std::pow(10.0, lr(rng));
            dil = std::max(dil, rel_residual(law.dilate(r, law.product(x, y)), law.product(law.dilate(r, x), law.dilate(r, y))));
        }
        const CompiledGroupLaw compiled(law);
        const double comp = compiled.max_disagreement(law, triples, ctx.seed(2));
        out.details[name] = {{"triples", triples},          {"associativity", assoc}, {"inverse", inv},
                             {"dilation_automorphism", dil}, {"compiled_vs_dynkin", comp},
                             {"residual_scale", "max |a - b| / max(1, |a|, |b|), sup norm of coordinates"}};
        const std::string p = std::string(name) + ".";
        out.verdicts.push_back(at_most(p + "associativity", assoc, 1e-9));
        out.verdicts.push_back(at_most(p + "inverse", inv, 1e-9));
        out.verdicts.push_back(at_most(p + "dilation_automorphism", dil, 1e-9));
        out.verdicts.push_back(at_most(p + "compiled_vs_dynkin", comp, 1e-12));
    }
    return out;
}

inline CriterionResult criterion_homogeneous_distance(SuiteContext& ctx)
{
    using namespace suite_detail;
    CriterionResult out;
    for (const char* name : {"heisenberg", "heisenberg-max", "engel"}) {
        const auto& g = ctx.group(name);
        std::mt19937_64 rng(ctx.seed(3));
        std::normal_distribution<double> lg;
        double homog = 0.0, inv = 0.0, tri = -1.0;
        long violations = 0;
        const long triples = 100000;
        for (long n = 0; n < triples; ++n) {
            const auto x = gaussian(g.dim(), rng), y = gaussian(g.dim(), rng, 0.3), z = gaussian(g.dim(), rng, 3.0);
            const double dxy = g.dist(x, y), dyz = g.dist(y, z), dxz = g.dist(x, z);
            const double excess = (dxz - dxy - dyz) / (dxy + dyz);
            tri = std::max(tri, excess);
            if (excess > kTriangleTolerance) ++violations;
            if (n < 10000) {
                const double r = std::exp(lg(rng));
                homog = std::max(homog, std::abs(g.norm_of(g.dilate(r, x)) - r * g.norm_of(x)) / (r * g.norm_of(x)));
                inv = std::max(inv, std::abs(g.dist(g.mul(z, x), g.mul(z, y)) - dxy) / (1.0 + dxy));
            }
        }
        out.details[name] = {{"norm", to_json(g.norm())},
                             {"homogeneity_relative", homog},
                             {"left_invariance", inv},
                             {"triangle_max_relative_excess", tri},
                             {"triangle_violations", violations},
                             {"triples", triples},
                             {"pairs", 10000}};
        const std::string p = std::string(name) + ".";
        out.verdicts.push_back(at_most(p + "homogeneity", homog, 1e-12));
        out.verdicts.push_back(at_most(p + "left_invariance", inv, 1e-10));
        out.verdicts.push_back(at_most(p + "triangle_violations", static_cast<double>(violations), 0.0));
    }
    return out;
}

inline CriterionResult criterion_projection_algebra(SuiteContext& ctx)
{
    using namespace suite_detail;
    CriterionResult out;
    for (const char* name : {"heisenberg", "engel"}) {
        const auto& g = ctx.group(name);
        const auto& alg = g.algebra();
        // Exact: rational directions ((1-t^2)/(1+t^2), 2t/(1+t^2)) give rational projectors.
        std::mt19937_64 rng(ctx.seed(4));
        std::uniform_int_distribution<int> u(-9, 9);
        long exact_fail = 0;
        const int exact_samples = 500;
        for (int n = 0; n < exact_samples; ++n) {
            const Rational t(u(rng), 7);
            const Rational c = (Rational(1) - t * t) / (Rational(1) + t * t), s = Rational(2) * t / (Rational(1) + t * t);
            const std::vector<std::vector<Rational>> proj{{c * c, c * s}, {s * c, s * s}};
            BasicElement<Rational> p(alg.dim());
            for (int i = 0; i < alg.dim(); ++i) p[i] = Rational(u(rng), 5);
            const auto h = project_first_layer(proj, p);
            const auto w = g.law().product(p, -h);
            if (!(g.law().product(w, h) == p) || !(w[0] * c + w[1] * s == Rational(0))) ++exact_fail;
        }
        double hom = 0.0, fact = 0.0;
        const int pairs = 10000;
        for (int n = 0; n < pairs; ++n) {
            const auto v = sample_horizontal(alg, 1, rng);
            const auto p = gaussian(g.dim(), rng), q = gaussian(g.dim(), rng);
            hom = std::max(hom, max_abs(project_h(v, g.mul(p, q)) - g.mul(project_h(v, p), project_h(v, q))));
            fact = std::max(fact, rel_residual(g.mul(project_v(g.law(), v, p), project_h(v, p)), p));
        }
        out.details[name] = {{"exact_samples", exact_samples}, {"exact_failures", exact_fail}, {"pairs", pairs},
                             {"h_homomorphism_residual", hom}, {"float_factorization_residual", fact}};
        const std::string p = std::string(name) + ".";
        out.verdicts.push_back(at_most(p + "exact_factorization_failures", static_cast<double>(exact_fail), 0.0));
        out.verdicts.push_back(at_most(p + "h_homomorphism_residual", hom, 1e-10));
    }
    return out;
}

inline CriterionResult criterion_distance_sandwich(SuiteContext& ctx)
{
    CriterionResult out;
    const double tol = 1e-6;
    for (const char* name : {"heisenberg", "engel"}) {
        const auto& g = ctx.group(name);
        const auto net = grass_net(g.norm(), 1, 0.2, ctx.seed(5));
        const auto c = estimate_cG(g.norm(), {net}, 200, 1.1, ctx.seed(6), 100000);
        const auto& v = c.validation;
        out.details[name] = {{"net_size", net.elements.size()}, {"constants", to_json(c)}, {"tolerance", tol}};
        const std::string p = std::string(name) + ".";
        out.verdicts.push_back(at_least(p + "c_G_above_zero", c.c_G_hat, 1e-12));
        out.verdicts.push_back(at_most(p + "c_G_below_one", c.c_G_hat, 1.0 - 1e-12));
        out.verdicts.push_back(at_least(p + "samples", static_cast<double>(v.samples), 1e5));
        out.verdicts.push_back(at_least(p + "perp_lower_slack", v.min_slack_perp_lower, -tol));
        out.verdicts.push_back(at_least(p + "perp_upper_slack", v.min_slack_perp_upper, -tol));
        out.verdicts.push_back(at_least(p + "v_lower_slack", v.min_slack_v_lower, -tol));
        out.verdicts.push_back(at_least(p + "v_upper_slack", v.min_slack_v_upper, -tol));
        out.verdicts.push_back(at_least(p + "projection_slack", v.min_slack_projection, -tol));
    }
    return out;
}

inline CriterionResult criterion_haar_scaling(SuiteContext& ctx)
{
    CriterionResult out;
    const std::vector<double> radii{1.0, std::sqrt(0.1), 0.1};
    struct Case {
        const char* group;
        int k;
        double eps;
    };
    for (const Case& c : {Case{"heisenberg", 1, 0.2}, Case{"engel", 1, 0.2}, Case{"abelian2", 2, 0.2}, Case{"abelian2", 1, 0.2}}) {
        const auto& g = ctx.group(c.group);
        const auto net = grass_net(g.norm(), c.k, c.eps, ctx.seed(7));
        double worst = 0.0;
        std::size_t worst_index = 0;
        nlohmann::json per = nlohmann::json::array();
        for (std::size_t i = 0; i < net.elements.size(); ++i) {
            const auto s = haar_scaling(g.norm(), net.elements[i], radii, {}, ctx.seed(8 + i));
            per.push_back(s.normalized);
            if (s.spread > worst) {
                worst = s.spread;
                worst_index = i;
            }
        }
        const std::string key = std::string(c.group) + ".k" + std::to_string(c.k);
        out.details[key] = {{"radii", radii}, {"net_size", net.elements.size()}, {"normalized", per},
                            {"worst_spread", worst}, {"worst_element", worst_index}};
        out.verdicts.push_back(at_most(key + ".spread", worst, 0.05));
    }
    return out;
}

inline CriterionResult criterion_density_bounds(SuiteContext& ctx)
{
    using namespace suite_detail;
    CriterionResult out;
    struct Case {
        const char* group;
        const char* fixture;
        nlohmann::json params;
        double r0;
        int scales;
    };
    const std::vector<Case> cases{
        {"heisenberg", "horizontal-segment", {{"spacing", 1e-4}}, 0.25, 6},
        {"heisenberg", "lifted-curve", {{"spacing", 1e-4}}, 0.25, 6},
        {"heisenberg", "tilted-graph", {{"spacing", 1e-4}}, 0.25, 6},
        {"abelian2", "grassmann-reference", {{"angle", 0.5}, {"spacing", 2e-4}, {"gamma", 1.0}}, 0.5, 6},
        {"abelian2", "four-corner-cantor", {{"generations", 6}, {"normalization", "hausdorff"}}, 0.25, 5},
    };
    for (const auto& c : cases) {
        const auto& fx = ctx.fixture(c.group, c.fixture, c.params);
        const auto& mu = fx.measure;
        IndexedMeasure im(ctx.group(c.group).norm(), mu);
        const auto scales = geometric_scales(c.r0, c.scales);
        const double lo = 0.9 * std::pow(2.0, -mu.k), hi = 1.1;
        int inside = 0;
        const int samples = 100;
        double wmin = 1e300, wmax = 0.0;
        for (std::size_t i : sample_indices(0, mu.size(), samples, ctx.seed(9))) {
            const double w = density_profile(im, mu.points[i], mu.k, scales).window_sup();
            wmin = std::min(wmin, w);
            wmax = std::max(wmax, w);
            inside += (w >= lo && w <= hi);
        }
        const double frac = static_cast<double>(inside) / samples;
        const std::string key = std::string(c.fixture) + "@" + c.group;
        out.details[key] = {{"params", c.params}, {"scales", scales}, {"samples", samples}, {"band", {lo, hi}},
                            {"fraction_inside", frac}, {"window_sup_min", wmin}, {"window_sup_max", wmax}};
        out.verdicts.push_back(at_least(key + ".fraction_inside", frac, 0.9));
    }
    return out;
}

inline CriterionResult criterion_blowup(SuiteContext& ctx)
{
    using namespace suite_detail;
    CriterionResult out;
    const auto& norm = ctx.group("heisenberg").norm();
    const auto& mu = fine_curve(ctx, kBlowupSpacing).measure;
    IndexedMeasure im(norm, mu);
    TestDictionary dict(norm);
    const double r0 = 0.03125;
    const auto scales = geometric_scales(r0, 8);
    double worst_growth = 0.0, worst_final = 0.0;
    nlohmann::json points = nlohmann::json::array();
    for (std::size_t i : smooth_points(mu, 0.25, 20, ctx.seed(10))) {
        const auto prof = blowup_test(im, mu.points[i], 1.0, fixture_tangent(mu, i), 1.0, scales, dict);
        // Noise is measured against the initial discrepancy, so rises at the quadrature
        // floor do not count as growth.
        double growth = 0.0;
        for (std::size_t s = 1; s < prof.blowup.size(); ++s)
            growth = std::max(growth, (prof.blowup[s] - prof.blowup[s - 1]) / prof.blowup.front());
        const double final_ratio = prof.blowup.back() / prof.blowup.front();
        worst_growth = std::max(worst_growth, growth);
        worst_final = std::max(worst_final, final_ratio);
        points.push_back({{"index", i}, {"parameter", fixture_parameter(mu, i)}, {"blowup", prof.blowup},
                          {"max_relative_rise", growth}, {"final_over_initial", final_ratio}});
    }
    out.details = {{"fixture", "lifted-curve"}, {"spacing", kBlowupSpacing}, {"scales", scales}, {"points", points}};
    out.verdicts.push_back(at_most("max_relative_rise", worst_growth, 0.1));
    out.verdicts.push_back(at_most("final_over_initial", worst_final, 0.05));
    return out;
}

inline CriterionResult criterion_tangent_fit(SuiteContext& ctx)
{
    using namespace suite_detail;
    CriterionResult out;
    const auto& norm = ctx.group("heisenberg").norm();
    const auto& mu = fine_curve(ctx, kTangentSpacing).measure;
    IndexedMeasure im(norm, mu);
    const auto net = grass_net(norm, 1, 0.2, ctx.seed(11));
    TangentFitOptions opt;
    opt.opening = 0.2;
    opt.scales = geometric_scales(0.5, 8);
    opt.window = 5;
    int close = 0, small = 0;
    double worst_rho = 0.0, worst_excess = 0.0;
    nlohmann::json points = nlohmann::json::array();
    const auto idx = smooth_points(mu, 0.6, 20, ctx.seed(12));
    for (std::size_t i : idx) {
        const auto fit = fit_tangent(im, mu.points[i], 1.0, net, opt);
        const double r = rho(norm, fit.subgroup, fixture_tangent(mu, i));
        const double e = fit.profile.excess.back();
        close += r <= 1e-2;
        small += e < 1e-3;
        worst_rho = std::max(worst_rho, r);
        worst_excess = std::max(worst_excess, e);
        points.push_back({{"index", i}, {"rho", r}, {"final_excess", e}, {"net_index", fit.net_index}, {"refined", fit.refined}});
    }
    const double n = static_cast<double>(idx.size());
    out.details = {{"fixture", "lifted-curve"}, {"spacing", kTangentSpacing}, {"opening", opt.opening}, {"scales", opt.scales}, {"net_size", net.elements.size()},
                   {"points", points}, {"worst_rho", worst_rho}, {"worst_final_excess", worst_excess}};
    out.verdicts.push_back(at_least("fraction_rho_within_1e-2", close / n, 0.95));
    out.verdicts.push_back(at_least("fraction_final_excess_below_1e-3", small / n, 1.0));
    return out;
}

inline CriterionResult criterion_pure_unrectifiability(SuiteContext& ctx)
{
    using namespace suite_detail;
    CriterionResult out;
    const auto& g = ctx.group("abelian2");
    const auto& norm = g.norm();
    const auto& mu = ctx.fixture("abelian2", "four-corner-cantor", {{"generations", 6}, {"normalization", "hausdorff"}}).measure;
    IndexedMeasure im(norm, mu);
    const auto net = grass_net(norm, 1, 0.05, ctx.seed(13));
    const auto scales = geometric_scales(0.25, 5);
    double min_excess = 1e300;
    nlohmann::json per_point = nlohmann::json::array();
    for (std::size_t i : sample_indices(0, mu.size(), 20, ctx.seed(14))) {
        double m = 1e300;
        for (const auto& v : net.elements)
            for (double e : excess_profile(im, mu.points[i], v, false, 0.2, 1.0, scales)) m = std::min(m, e);
        per_point.push_back({{"index", i}, {"min_excess", m}});
        min_excess = std::min(min_excess, m);
    }
    const auto cg = estimate_cG(norm, {net}, 200, 1.1, ctx.seed(15), 10000);
    TubeCheckOptions topt;
    topt.opening = 0.02;
    topt.tubes = 1000;
    topt.seed = ctx.seed(16);
    nlohmann::json tubes = nlohmann::json::array();
    double min_slack = 1e300, density_gap = 1e300;
    for (double angle : {0.0, 0.3, 1.1}) {
        const auto r = tube_bound_check(im, line(g.algebra(), angle), cg.c_G_hat, topt);
        tubes.push_back({{"angle", angle}, {"report", to_json(r)}});
        min_slack = std::min(min_slack, r.min_slack);
        density_gap = std::min(density_gap, r.density_bound - r.density_max);
    }
    out.details = {{"fixture", "four-corner-cantor"}, {"generations", 6}, {"net_size", net.elements.size()},
                   {"opening", 0.2}, {"scales", scales}, {"points", per_point}, {"c_G", to_json(cg)}, {"tube_checks", tubes}};
    out.verdicts.push_back(at_least("min_excess_over_net_and_scales", min_excess, 0.05));
    out.verdicts.push_back(at_least("tube_min_slack", min_slack, 0.0));
    out.verdicts.push_back(at_least("density_bound_slack", density_gap, 0.0));
    return out;
}

inline CriterionResult criterion_graph_lipschitz(SuiteContext& ctx)
{
    using namespace suite_detail;
    CriterionResult out;
    const double s = 0.5;
    struct Case {
        const char* group;
        const char* fixture;
        nlohmann::json params;
        double t_angle;
    };
    const std::vector<Case> cases{
        {"heisenberg", "horizontal-segment", {{"spacing", 1e-3}, {"angle", 0.9}}, 0.0},
        {"heisenberg", "tilted-graph", {{"spacing", 1.5e-3}}, 0.0},
        {"abelian2", "grassmann-reference", {{"spacing", 1e-3}, {"angle", 0.4}}, 1.2},
        {"heisenberg-max", "horizontal-segment", {{"spacing", 1e-3}, {"angle", 0.5}}, 0.0},
    };
    for (const auto& c : cases) {
        const auto& g = ctx.group(c.group);
        const auto& fx = ctx.fixture(c.group, c.fixture, c.params);
        const auto rep = lipschitz_cover(g.norm(), fx.measure.points, line(g.algebra(), c.t_angle), s);
        const std::string key = std::string(c.fixture) + "@" + c.group;
        out.details[key] = {{"params", c.params}, {"T_angle", c.t_angle}, {"report", to_json(rep)}};
        out.verdicts.push_back(at_most(key + ".lipschitz", rep.constant, 1.0 / s + 1e-6));
    }
    return out;
}

inline CriterionResult criterion_area_formula(SuiteContext& ctx)
{
    CriterionResult out;
    const auto run = [&](const std::string& key, const HomogeneousNorm& norm, const LipschitzMap& f, double delta) {
        const auto a = area_check(norm, f, delta);
        const double ratio = a.ratio.value_or(0.0);
        out.details[key] = to_json(a);
        out.verdicts.push_back(at_least(key + ".ratio_low", ratio, 0.9));
        out.verdicts.push_back(at_most(key + ".ratio_high", ratio, 1.1));
        out.verdicts.push_back(at_most(key + ".jacobian_cross_gap", a.max_cross_gap, 0.05));
    };
    const auto& plane = ctx.group("abelian2");
    LipschitzMap lin;
    lin.law = plane.norm().law_ptr();
    lin.domain = {{0.0, 0.0}, {1.0, 1.0}};
    lin.eval = [](const std::vector<double>& x) { return GroupElement{2.0 * x[0] + 0.5 * x[1], 0.3 * x[0] + 1.075 * x[1]}; };
    run("abelian-linear-map", plane.norm(), lin, 1e-2);
    const auto& heis = ctx.group("heisenberg");
    run("horizontal-segment", heis.norm(), *ctx.fixture("heisenberg", "horizontal-segment", {{"spacing", 1e-3}}).map, 1e-2);
    run("lifted-curve", heis.norm(), *ctx.fixture("heisenberg", "lifted-curve", {{"spacing", 1e-2}}).map, 1e-2);
    out.details["denominator_reading"] = "H^k(B_E(0,1)) read as the Euclidean Hausdorff measure of the Euclidean unit ball";
    return out;
}

using CriterionFn = CriterionResult (*)(SuiteContext&);

inline CriterionFn criterion_function(int id)
{
    switch (id) {
    case 1: return criterion_group_algebra;
    case 2: return criterion_homogeneous_distance;
    case 3: return criterion_projection_algebra;
    case 4: return criterion_distance_sandwich;
    case 5: return criterion_haar_scaling;
    case 6: return criterion_density_bounds;
    case 7: return criterion_blowup;
    case 8: return criterion_tangent_fit;
    case 9: return criterion_pure_unrectifiability;
    case 10: return criterion_graph_lipschitz;
    case 11: return criterion_area_formula;
    default: return nullptr;
    }
}

inline std::vector<int> selected_criteria(const SuiteConfig& cfg)
{
    std::vector<int> ids = cfg.criteria;
    if (ids.empty())
        for (const auto& c : criteria_catalogue()) ids.push_back(c.id);
    for (int id : ids)
        if (id < 1 || id > static_cast<int>(criteria_catalogue().size()))
            throw Error(ErrorKind::ParseError, "unknown criterion " + std::to_string(id));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

/// Runs the selected criteria other than determinism once. Input errors propagate.
inline Report run_battery(const SuiteConfig& cfg, const std::function<void(const CriterionResult&, double)>& on_done = {})
{
    SuiteContext ctx(cfg);
    Report rep;
    rep.command = "battery";
    rep.config = to_json(cfg);
    rep.results["criteria"] = nlohmann::json::array();
    Stopwatch total;
    for (int id : selected_criteria(cfg)) {
        const auto fn = criterion_function(id);
        if (!fn) continue;
        Stopwatch w;
        CriterionResult c = fn(ctx);
        c.id = id;
        c.key = criteria_catalogue()[static_cast<std::size_t>(id - 1)].key;
        for (auto v : c.verdicts) {
            v.name = std::to_string(id) + "." + v.name;
            rep.verdicts.push_back(v);
        }
        rep.results["criteria"].push_back(to_json(c));
        rep.timestamps[std::to_string(id)] = w.stamp();
        if (on_done) on_done(c, w.seconds());
    }
    rep.timestamps["total"] = total.stamp();
    return rep;
}

/// The acceptance battery. Determinism runs the battery a second time with the same config
/// and compares the two reports without their timestamps.
inline Report run_suite(const SuiteConfig& cfg, const std::function<void(const CriterionResult&, double)>& on_done = {})
{
    const auto ids = selected_criteria(cfg);
    const bool determinism = std::find(ids.begin(), ids.end(), 12) != ids.end();
    Report rep = run_battery(cfg, on_done);
    const std::string a = deterministic_dump(to_json(rep));
    rep.command = "suite";
    if (!determinism) return rep;
    Stopwatch w;
    const std::string b = deterministic_dump(to_json(run_battery(cfg)));
    CriterionResult c;
    c.id = 12;
    c.key = "determinism";
    std::size_t first_diff = 0;
    while (first_diff < std::min(a.size(), b.size()) && a[first_diff] == b[first_diff]) ++first_diff;
    c.details = {{"bytes_first", a.size()}, {"bytes_second", b.size()}, {"identical", a == b},
                 {"first_difference", a == b ? nlohmann::json(nullptr) : nlohmann::json(first_diff)}};
    c.verdicts.push_back(at_most("differing_reports", a == b ? 0.0 : 1.0, 0.0));
    for (auto v : c.verdicts) {
        v.name = "12." + v.name;
        rep.verdicts.push_back(v);
    }
    rep.results["criteria"].push_back(to_json(c));
    rep.timestamps["12"] = w.stamp();
    if (on_done) on_done(c, w.seconds());
    return rep;
}

} // namespace hgr
