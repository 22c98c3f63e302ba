#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <json.hpp>

#include "hgr/subgroup_distance.hpp"

namespace hgr {

namespace detail {

/// u -> d(P1 u, P2 u) on the first layer, without heap traffic.
class ProjectionGap {
public:
    ProjectionGap(const HomogeneousNorm& norm, const HorizontalSubgroup& a, const HorizontalSubgroup& b)
        : norm_(norm), q_(a.dim()), h1_(a.h1()), pa_(a.projector()), pb_(b.projector())
    {
    }
    double operator()(const double* u) const
    {
        GroupElement x(q_), y(q_);
        for (int r = 0; r < h1_; ++r) {
            double sa = 0.0, sb = 0.0;
            for (int c = 0; c < h1_; ++c) {
                sa += pa_(r, c) * u[c];
                sb += pb_(r, c) * u[c];
            }
            x[r] = sa;
            y[r] = sb;
        }
        return norm_.dist(x, y);
    }

private:
    const HomogeneousNorm& norm_;
    int q_, h1_;
    const Eigen::MatrixXd& pa_;
    const Eigen::MatrixXd& pb_;
};

} // namespace detail

/// rho(V1, V2) = max over ||x|| = 1 of d(pi_V1 x, pi_V2 x).
///
/// Both projections only see the first-layer part of x, and for the shipped norms
/// ||x|| >= |x_1| with equality on H^1, so the maximum is attained on the Euclidean unit
/// sphere of H^1. That sphere is searched by a dense sample followed by local ascent.
inline double rho(const HomogeneousNorm& norm, const HorizontalSubgroup& v1, const HorizontalSubgroup& v2,
                  int samples = 256, std::uint64_t seed = 0)
{
    if (v1.k() != v2.k() || v1.dim() != v2.dim())
        throw Error(ErrorKind::DimensionMismatch, "rho needs two subgroups of equal dimension in one group");
    const int h1 = v1.h1();
    const detail::ProjectionGap gap(norm, v1, v2);
    auto f = [&](const Eigen::VectorXd& u) { return gap(u.data()); };
    if (h1 == 1) {
        const double one = 1.0;
        return gap(&one);
    }
    constexpr double pi = 3.14159265358979323846;
    if (h1 == 2) {
        auto at = [&](double t) {
            const double u[2] = {std::cos(t), std::sin(t)};
            return gap(u);
        };
        double best = -1.0, best_t = 0.0;
        for (int i = 0; i < samples; ++i) {
            const double t = 2.0 * pi * i / samples;
            const double v = at(t);
            if (v > best) {
                best = v;
                best_t = t;
            }
        }
        // Golden-section refinement around the best grid angle.
        double lo = best_t - 2.0 * pi / samples, hi = best_t + 2.0 * pi / samples;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
        double fa = at(a), fb = at(b);
        for (int it = 0; it < 40; ++it) {
            if (fa > fb) {
                hi = b;
                b = a;
                fb = fa;
                a = hi - gr * (hi - lo);
                fa = at(a);
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + gr * (hi - lo);
                fb = at(b);
            }
        }
        return std::max({best, fa, fb});
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<Eigen::VectorXd> starts;
    for (int i = 0; i < v1.k(); ++i) {
        starts.push_back(v1.frame().col(i));
        starts.push_back(v2.frame().col(i));
    }
    for (int i = 0; i < samples; ++i) {
        Eigen::VectorXd u(h1);
        for (int r = 0; r < h1; ++r) u[r] = g(rng);
        starts.push_back(u.normalized());
    }
    std::vector<std::pair<double, int>> ranked;
    for (std::size_t i = 0; i < starts.size(); ++i) ranked.push_back({f(starts[i]), static_cast<int>(i)});
    std::sort(ranked.begin(), ranked.end(), [](auto& x, auto& y) { return x.first > y.first; });
    double best = ranked.front().first;
    for (int s = 0; s < std::min<int>(4, static_cast<int>(ranked.size())); ++s) {
        Eigen::VectorXd u = starts[static_cast<std::size_t>(ranked[static_cast<std::size_t>(s)].second)];
        double fu = ranked[static_cast<std::size_t>(s)].first;
        double step = 0.5;
        while (step > 1e-9) {
            bool moved = false;
            for (int r = 0; r < h1 && !moved; ++r)
                for (double dir : {1.0, -1.0}) {
                    Eigen::VectorXd w = u;
                    w[r] += dir * step;
                    w.normalize();
                    const double fw = f(w);
                    if (fw > fu) {
                        u = w;
                        fu = fw;
                        moved = true;
                        break;
                    }
                }
            if (!moved) step *= 0.5;
        }
        best = std::max(best, fu);
    }
    return best;
}

struct GrassmannianNet {
    int k = 0;
    double epsilon = 0.0;
    double achieved_radius = 0.0;
    std::uint64_t seed = 0;
    int validation_samples = 0;
    std::vector<HorizontalSubgroup> elements;
};

/// Index of the net element closest in rho to v and the distance. Only the `shortlist`
/// elements nearest in projector (Frobenius) distance are scored with rho, so the returned
/// distance is an upper bound for the true minimum. Ties go to the lowest index.
inline std::pair<int, double> nearest_in_net(const HomogeneousNorm& norm, const GrassmannianNet& net,
                                             const HorizontalSubgroup& v, int rho_samples = 64, int shortlist = 4)
{
    std::vector<std::pair<double, int>> order;
    order.reserve(net.elements.size());
    for (std::size_t i = 0; i < net.elements.size(); ++i)
        order.push_back({(net.elements[i].projector() - v.projector()).squaredNorm(), static_cast<int>(i)});
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(shortlist), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<long>(m), order.end());
    std::sort(order.begin(), order.begin() + static_cast<long>(m),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
        const double d = rho(norm, net.elements[static_cast<std::size_t>(order[j].second)], v, rho_samples);
        if (d < bd) {
            bd = d;
            best = order[j].second;
        }
    }
    return {best, bd};
}

/// Greedy rho-net of the horizontal k-Grassmannian with covering radius epsilon,
/// validated on `validation` fresh random subgroups. Elements are added until the
/// sampled covering radius is within 1.05 epsilon.
inline GrassmannianNet grass_net(const HomogeneousNorm& norm, int k, double epsilon, std::uint64_t seed,
                                 int candidates = 400, int validation = 1000)
{
    const auto& alg = norm.law().algebra();
    std::mt19937_64 rng(seed);
    GrassmannianNet net;
    net.k = k;
    net.epsilon = epsilon;
    net.seed = seed;
    net.validation_samples = validation;
    const int rs = 64;
    auto try_add = [&](const HorizontalSubgroup& c) {
        if (net.elements.empty() || nearest_in_net(norm, net, c, rs).second > epsilon) net.elements.push_back(c);
    };
    for (int i = 0; i < candidates; ++i) try_add(sample_horizontal(alg, k, rng));
    for (int round = 0; round < 20; ++round) {
        double worst = 0.0;
        std::vector<HorizontalSubgroup> misses;
        for (int i = 0; i < validation; ++i) {
            auto s = sample_horizontal(alg, k, rng);
            const double d = nearest_in_net(norm, net, s, rs).second;
            worst = std::max(worst, d);
            if (d > epsilon) misses.push_back(s);
        }
        net.achieved_radius = worst;
        if (worst <= 1.05 * epsilon) return net;
        for (const auto& m : misses) try_add(m);
    }
    throw Error(ErrorKind::ValidationFailure, "net covering radius did not reach 1.05 epsilon");
}

struct SandwichStats {
    long samples = 0;
    double min_slack_perp_lower = std::numeric_limits<double>::infinity(); // d(p,V^perp) - c |pi_V p|
    double min_slack_perp_upper = std::numeric_limits<double>::infinity(); // |pi_V p| - d(p,V^perp)
    double min_slack_v_lower = std::numeric_limits<double>::infinity();    // d(p,V) - c |conj|
    double min_slack_v_upper = std::numeric_limits<double>::infinity();    // |conj| - d(p,V)
    double min_slack_projection = std::numeric_limits<double>::infinity(); // d(p,V)/c - d(p, pi_V p)
    long violations = 0;
};

struct GrassmannianConstants {
    double c1_hat = 0.0;
    double safety = 1.1;
    double c_G_hat = 0.0;
    long samples = 0;
    std::uint64_t seed = 0;
    SandwichStats validation;
};

/// Checks both chains of the distance estimates and d(p, pi_V p) <= d(p, V)/c on random
/// (p, V) pairs. Slacks are relative to ||p||; `tol` absorbs solver error.
inline SandwichStats validate_sandwich(const HomogeneousNorm& norm, double c, int max_k, long samples, std::uint64_t seed,
                                       double tol = 1e-6, const SolverOptions& opt = {})
{
    const auto& law = norm.law();
    const auto& alg = law.algebra();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_k(1, std::max(1, max_k));
    std::uniform_real_distribution<double> lg(-1.0, 1.0);
    SandwichStats st;
    st.samples = samples;
    for (long n = 0; n < samples; ++n) {
        const auto v = sample_horizontal(alg, pick_k(rng), rng);
        GroupElement p = detail::stratified_element(alg, rng);
        p = law.dilate(std::pow(10.0, lg(rng)) / norm(p), p);
        const double np = norm(p);
        const double pv = norm(project_h(v, p));
        const double conj = norm(conjugated_vertical(law, v, p));

        SolverOptions o = opt;
        o.stop_below = c * pv - tol * np;
        const double dperp = dist_to_subgroup(norm, p, vertical_complement(v), o);
        o.stop_below = c * conj - tol * np;
        const double dv = dist_to_subgroup(norm, p, v, o);
        const double dproj = norm.dist(p, project_h(v, p));

        const double s1 = (dperp - c * pv) / np, s2 = (pv - dperp) / np;
        const double s3 = (dv - c * conj) / np, s4 = (conj - dv) / np;
        const double s5 = (dv / c - dproj) / np;
        st.min_slack_perp_lower = std::min(st.min_slack_perp_lower, s1);
        st.min_slack_perp_upper = std::min(st.min_slack_perp_upper, s2);
        st.min_slack_v_lower = std::min(st.min_slack_v_lower, s3);
        st.min_slack_v_upper = std::min(st.min_slack_v_upper, s4);
        st.min_slack_projection = std::min(st.min_slack_projection, s5);
        if (std::min({s1, s2, s3, s4, s5}) < -tol) ++st.violations;
    }
    return st;
}

/// c1_hat = sampled max of ||pi_V z|| over net elements and unit-sphere z;
/// c_G_hat = 1 / (1 + 2 safety c1_hat), then validated on fresh (p, V) pairs.
inline GrassmannianConstants estimate_cG(const HomogeneousNorm& norm, const std::vector<GrassmannianNet>& nets, long samples,
                                         double safety, std::uint64_t seed, long validation_samples = 100000,
                                         const SolverOptions& opt = {})
{
    if (safety < 1.0) throw Error(ErrorKind::ParseError, "safety factor must be at least 1");
    const auto& law = norm.law();
    const auto& alg = law.algebra();
    std::mt19937_64 rng(seed);
    GrassmannianConstants out;
    out.safety = safety;
    out.samples = samples;
    out.seed = seed;
    int max_k = 0;
    for (const auto& net : nets) {
        max_k = std::max(max_k, net.k);
        for (const auto& v : net.elements) {
            for (int i = 0; i < v.k(); ++i) out.c1_hat = std::max(out.c1_hat, norm(project_h(v, v.vector(i))));
            for (long n = 0; n < samples; ++n) {
                GroupElement z = detail::stratified_element(alg, rng);
                z = law.dilate(1.0 / norm(z), z);
                out.c1_hat = std::max(out.c1_hat, norm(project_h(v, z)));
            }
        }
    }
    if (max_k == 0) throw Error(ErrorKind::EmptyNet, "estimate_cG needs at least one nonempty net");
    out.c_G_hat = 1.0 / (1.0 + 2.0 * safety * out.c1_hat);
    out.validation = validate_sandwich(norm, out.c_G_hat, max_k, validation_samples, seed + 1, 1e-6, opt);
    if (out.validation.violations > 0)
        throw Error(ErrorKind::ValidationFailure, std::to_string(out.validation.violations) +
                                                      " sandwich violations; increase the safety factor");
    return out;
}

inline nlohmann::json to_json(const HorizontalSubgroup& v)
{
    nlohmann::json frame = nlohmann::json::array();
    for (int i = 0; i < v.k(); ++i) frame.push_back(v.vector(i).to_vector());
    return {{"k", v.k()}, {"frame", frame}, {"bracket_residual", v.bracket_residual()}};
}

inline nlohmann::json to_json(const GrassmannianNet& net)
{
    nlohmann::json el = nlohmann::json::array();
    for (const auto& v : net.elements) el.push_back(to_json(v));
    return {{"k", net.k},
            {"epsilon", net.epsilon},
            {"achieved_radius", net.achieved_radius},
            {"seed", net.seed},
            {"validation_samples", net.validation_samples},
            {"size", net.elements.size()},
            {"elements", el}};
}

inline nlohmann::json to_json(const SandwichStats& s)
{
    return {{"samples", s.samples},
            {"min_slack_perp_lower", s.min_slack_perp_lower},
            {"min_slack_perp_upper", s.min_slack_perp_upper},
            {"min_slack_v_lower", s.min_slack_v_lower},
            {"min_slack_v_upper", s.min_slack_v_upper},
            {"min_slack_projection", s.min_slack_projection},
            {"violations", s.violations}};
}

inline nlohmann::json to_json(const GrassmannianConstants& c)
{
    return {{"c1_hat", c.c1_hat}, {"safety", c.safety},   {"c_G_hat", c.c_G_hat},
            {"samples", c.samples}, {"seed", c.seed}, {"validation", to_json(c.validation)}};
}

} // namespace hgr
