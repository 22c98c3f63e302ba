#pragma once

#include <cmath>
#include <vector>

#include <json.hpp>

#include "hgr/cone.hpp"

namespace hgr {

struct LipschitzCoverReport {
    std::size_t samples = 0;
    double opening = 0.0;
    double bound = 0.0;     // 1 / s
    double constant = 0.0;  // max d(x_i, x_j) / |a_i - a_j| over sample pairs
    std::size_t worst_i = 0, worst_j = 0;
    bool passed = true;
};

/// Graph parametrization over T of a sample that avoids its vertical cones.
///
/// Precondition: no sample lies in X(x_i, T^perp, s) for another sample x_i; otherwise
/// ConeNotEmpty names the first pair found. The map f(a_i) = x_i, with a_i the frame
/// coordinates of pi_T(x_i), is then checked on every pair against the constant 1/s.
inline LipschitzCoverReport lipschitz_cover(const HomogeneousNorm& norm, const std::vector<GroupElement>& points,
                                            const HorizontalSubgroup& t, double s)
{
    if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::ParseError, "cone opening must lie in (0, 1)");
    LipschitzCoverReport rep;
    rep.samples = points.size();
    rep.opening = s;
    rep.bound = 1.0 / s;
    std::vector<Eigen::VectorXd> coords;
    coords.reserve(points.size());
    for (const auto& x : points) coords.push_back(t.coordinates(x));
    ConeOptions co;
    co.exact_margin = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        ConeSpec cone{points[i], t, s, std::nullopt, true};
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (i == j) continue;
            if (cone_contains(norm, cone, points[j], co).contained)
                throw Error(ErrorKind::ConeNotEmpty, "sample " + std::to_string(j) + " lies in the vertical cone at sample " +
                                                         std::to_string(i));
            if (j < i) continue;
            const double da = (coords[i] - coords[j]).norm();
            const double ratio = norm.dist(points[i], points[j]) / da;
            if (ratio > rep.constant) {
                rep.constant = ratio;
                rep.worst_i = i;
                rep.worst_j = j;
            }
        }
    }
    rep.passed = rep.constant <= rep.bound * (1.0 + 1e-9);
    return rep;
}

inline nlohmann::json to_json(const LipschitzCoverReport& r)
{
    return {{"samples", r.samples}, {"opening", r.opening}, {"bound", r.bound}, {"constant", r.constant},
            {"worst_pair", {r.worst_i, r.worst_j}}, {"passed", r.passed}};
}

} // namespace hgr
