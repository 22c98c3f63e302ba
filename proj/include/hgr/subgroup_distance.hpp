#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "hgr/norm.hpp"
#include "hgr/subgroup.hpp"

namespace hgr {

enum class DistanceMethod {
    MultiStart, // 17 starts, the canonical projection start among them (a scan for lines)
    Local,      // canonical start only
};

struct SolverOptions {
    DistanceMethod method = DistanceMethod::MultiStart;
    int starts = 17;
    double rel_tol = 1e-8;
    /// Stop as soon as the objective drops below this value (used by threshold tests).
    double stop_below = -1.0;
};

namespace detail {

/// Pattern search with geometric step shrink. Steps are per coordinate so that
/// coordinates of different weights are explored at matching homogeneous scales.
template <class F>
double pattern_search(const F& f, std::vector<double>& x, std::vector<double> step, double min_step_ratio,
                      double stop_below)
{
    const std::size_t n = x.size();
    double best = f(x.data());
    std::vector<double> initial = step;
    std::vector<double> trial(n);
    for (int iter = 0; iter < 4000; ++iter) {
        if (best < stop_below) return best;
        bool improved = false;
        for (std::size_t i = 0; i < n; ++i) {
            for (double dir : {1.0, -1.0}) {
                trial = x;
                trial[i] += dir * step[i];
                const double v = f(trial.data());
                if (v < best) {
                    best = v;
                    x = trial;
                    // Try an accelerated move in the same direction.
                    trial[i] += dir * step[i];
                    const double v2 = f(trial.data());
                    if (v2 < best) {
                        best = v2;
                        x = trial;
                        step[i] *= 2.0;
                    }
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) {
            bool done = true;
            for (std::size_t i = 0; i < n; ++i) {
                step[i] *= 0.5;
                if (step[i] > initial[i] * min_step_ratio) done = false;
            }
            if (done) break;
        }
    }
    return best;
}

} // namespace detail

/// inf over s in S of ||s^{-1} x0||, searched in S-coordinates starting from s = 0.
///
/// Callers recenter before calling: for V^perp, x0 = pi_V(p) because w = pi_{V^perp}(p) delta
/// gives w^{-1} p = delta^{-1} pi_V(p); for V, x0 = pi_V(p)^{-1} p. This avoids forming
/// w^{-1} p from large cancelling terms, whose roundoff the homogeneous norm would amplify
/// through its fractional powers.
template <class Embed>
double minimize_over_subgroup(const HomogeneousNorm& norm, const GroupElement& x0, int n, const Embed& embed,
                              const std::vector<int>& weights, const SolverOptions& opt)
{
    const auto& law = norm.law();
    const double scale = norm(x0);
    if (n == 0 || scale == 0.0) return scale;
    auto objective = [&](const double* c) { return norm(law.product(law.inverse(embed(c)), x0)); };
    std::vector<double> step(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) step[static_cast<std::size_t>(i)] = 0.25 * std::pow(scale, weights[static_cast<std::size_t>(i)]);

    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    double best = detail::pattern_search(objective, x, step, opt.rel_tol, opt.stop_below);
    if (opt.method == DistanceMethod::Local || best < opt.stop_below) return best;

    if (n == 1 && weights[0] == 1) {
        // One horizontal parameter: a minimizer satisfies ||s|| <= 2 ||x0||, hence
        // |c| <= 2 ||x0|| / f. Scan that interval and polish the best cells.
        const double reach = 2.0 * scale / norm.first_layer_factor();
        constexpr int kCells = 64;
        std::vector<std::pair<double, double>> grid;
        for (int i = 0; i <= kCells; ++i) {
            const double c = -reach + 2.0 * reach * i / kCells;
            grid.push_back({objective(&c), c});
        }
        std::sort(grid.begin(), grid.end());
        std::vector<double> cell_step{2.0 * reach / kCells};
        for (int j = 0; j < 3 && best >= opt.stop_below; ++j) {
            std::vector<double> y{grid[static_cast<std::size_t>(j)].second};
            best = std::min(best, detail::pattern_search(objective, y, cell_step, opt.rel_tol * step[0] / cell_step[0], opt.stop_below));
        }
        return best;
    }

    // Deterministic extra starts around the canonical point at several magnitudes.
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> g;
    for (int s = 1; s < opt.starts; ++s) {
        std::vector<double> y(static_cast<std::size_t>(n));
        const double mag = std::pow(2.0, -static_cast<double>((s - 1) % 4));
        for (int i = 0; i < n; ++i)
            y[static_cast<std::size_t>(i)] = mag * g(rng) * std::pow(scale, weights[static_cast<std::size_t>(i)]);
        best = std::min(best, detail::pattern_search(objective, y, step, opt.rel_tol, opt.stop_below));
        if (best < opt.stop_below) break;
    }
    return best;
}

/// d(p, V) for a horizontal subgroup V.
inline double dist_to_subgroup(const HomogeneousNorm& norm, const GroupElement& p, const HorizontalSubgroup& v,
                               const SolverOptions& opt = {})
{
    if (p.size() != v.dim()) throw Error(ErrorKind::DimensionMismatch, "element does not match the subgroup's algebra");
    const GroupElement x0 = conjugated_vertical(norm.law(), v, p);
    std::vector<int> weights(static_cast<std::size_t>(v.k()), 1);
    const double d = minimize_over_subgroup(norm, x0, v.k(), [&](const double* c) { return v.point(c); }, weights, opt);
    if (!std::isfinite(d)) throw Error(ErrorKind::SolverFailure, "distance to subgroup did not converge");
    return d;
}

/// d(p, V^perp) for the vertical complement of V.
inline double dist_to_subgroup(const HomogeneousNorm& norm, const GroupElement& p, const VerticalComplement& w,
                               const SolverOptions& opt = {})
{
    const auto& v = *w.owner;
    if (p.size() != v.dim()) throw Error(ErrorKind::DimensionMismatch, "element does not match the subgroup's algebra");
    const auto& alg = norm.law().algebra();
    std::vector<int> weights;
    for (int i = 0; i < v.h1() - v.k(); ++i) weights.push_back(1);
    for (int i = v.h1(); i < v.dim(); ++i) weights.push_back(alg.weight(i));
    const double d = minimize_over_subgroup(norm, project_h(v, p), w.dim, [&](const double* c) { return w.point(c); },
                                            weights, opt);
    if (!std::isfinite(d)) throw Error(ErrorKind::SolverFailure, "distance to subgroup did not converge");
    return d;
}

} // namespace hgr
