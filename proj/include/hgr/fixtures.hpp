#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <json.hpp>

#include "hgr/grassmannian.hpp"
#include "hgr/hausdorff.hpp"
#include "hgr/lipschitz_map.hpp"
#include "hgr/point_measure.hpp"

namespace hgr {

inline const std::vector<std::string>& fixture_names()
{
    static const std::vector<std::string> names{"horizontal-segment", "lifted-curve", "grassmann-reference",
                                                "four-corner-cantor", "tilted-graph"};
    return names;
}

/// A plane curve u -> (x(u), y(u)) on [u0, u1] with its signed-area integral
/// A(u) = int_{u0}^{u} (x y' - y x') / 2, in closed form.
struct PlaneCurve {
    std::string name;
    double u0 = 0.0, u1 = 1.0;
    std::function<std::array<double, 2>(double)> point;
    std::function<std::array<double, 2>(double)> velocity;
    std::function<double(double)> area;
};

inline PlaneCurve segment_curve(double length, double angle)
{
    const double c = std::cos(angle), s = std::sin(angle);
    return {"segment", 0.0, length, [=](double u) { return std::array<double, 2>{u * c, u * s}; },
            [=](double) { return std::array<double, 2>{c, s}; }, [](double) { return 0.0; }};
}

inline PlaneCurve circle_curve(double radius)
{
    return {"circle", 0.0, 2.0 * M_PI,
            [=](double u) { return std::array<double, 2>{radius * std::cos(u), radius * std::sin(u)}; },
            [=](double u) { return std::array<double, 2>{-radius * std::sin(u), radius * std::cos(u)}; },
            [=](double u) { return radius * radius * u / 2.0; }};
}

/// (u, a u + b sin(w u)) on [-1, 1]; the area integral is taken from u = 0.
inline PlaneCurve tilted_graph_curve(double a, double b, double w)
{
    return {"tilted-graph", -1.0, 1.0,
            [=](double u) { return std::array<double, 2>{u, a * u + b * std::sin(w * u)}; },
            [=](double u) { return std::array<double, 2>{1.0, a + b * w * std::cos(w * u)}; },
            [=](double u) { return b / 2.0 * (u * std::sin(w * u) + 2.0 * (std::cos(w * u) - 1.0) / w); }};
}

namespace detail {

/// Vertical layer of a step-2 group whose first two basis vectors bracket into it.
inline GroupElement plane_bracket(const GradedAlgebra& alg)
{
    if (alg.step() != 2 || alg.layer_dim(1) < 2)
        throw Error(ErrorKind::PreconditionFailed, "curve fixtures need a step-2 group with at least two horizontal directions");
    GroupElement e1(alg.dim()), e2(alg.dim());
    e1[0] = 1.0;
    e2[1] = 1.0;
    GroupElement b = alg.bracket(e1, e2);
    if (euclidean_norm(b) == 0.0) throw Error(ErrorKind::PreconditionFailed, "[e1, e2] vanishes; the plane is not contact");
    return b;
}

/// Horizontal lift in exponential coordinates of a step-2 group: the vertical part is
/// A(u) [e1, e2] since x2' = [x1, x1'] / 2.
inline GroupElement lift_point(const GroupElement& bracket, const std::array<double, 2>& xy, double area)
{
    GroupElement p = area * bracket;
    p[0] = xy[0];
    p[1] = xy[1];
    return p;
}

inline double jparam(const nlohmann::json& p, const char* key, double def)
{
    if (!p.contains(key)) return def;
    if (!p.at(key).is_number()) throw Error(ErrorKind::ParseError, std::string("fixture parameter '") + key + "' must be a number");
    return p.at(key).get<double>();
}

} // namespace detail

struct Fixture {
    PointMeasure measure;
    std::optional<LipschitzMap> map; // parametrization, for parametrized fixtures
};

/// Samples a lifted plane curve at cell midpoints u_i = u0 + (i + 1/2) du. The vertical
/// coordinate comes from integrating the lift ODE c' = (x y' - y x') / 2 with an adaptive
/// Dormand-Prince stepper; the closed-form area is kept as the oracle for that integration.
/// Weights are the metric derivative times du (the k = 1 area formula).
inline Fixture curve_fixture(const HomogeneousNorm& norm, const PlaneCurve& curve, double spacing, const std::string& fixture,
                             const nlohmann::json& params)
{
    if (!(spacing > 0.0)) throw Error(ErrorKind::NonpositiveScale, "fixture spacing must be positive");
    const auto& alg = norm.law().algebra();
    const GroupElement bracket = detail::plane_bracket(alg);
    const long count = std::max(1L, std::lround((curve.u1 - curve.u0) / spacing));
    const double du = (curve.u1 - curve.u0) / static_cast<double>(count);

    std::vector<double> times{curve.u0};
    for (long i = 0; i < count; ++i) times.push_back(curve.u0 + (static_cast<double>(i) + 0.5) * du);
    std::vector<double> lift;
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, 1>;
    State c{curve.area(curve.u0)};
    auto rhs = [&](const State&, State& dc, double u) {
        const auto p = curve.point(u);
        const auto v = curve.velocity(u);
        dc[0] = 0.5 * (p[0] * v[1] - p[1] * v[0]);
    };
    odeint::integrate_times(odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>()), rhs, c,
                            times.begin(), times.end(), du / 4.0,
                            [&](const State& x, double) { lift.push_back(x[0]); });

    Fixture out;
    auto& m = out.measure;
    m.law = norm.law_ptr();
    m.k = 1.0;
    m.provenance = Provenance::Parametrized;
    double lift_error = 0.0, horizontality = 0.0, resolution = 0.0;
    for (long i = 0; i < count; ++i) {
        const double u = times[static_cast<std::size_t>(i + 1)];
        const double a = lift[static_cast<std::size_t>(i + 1)];
        lift_error = std::max(lift_error, std::abs(a - curve.area(u)));
        m.points.push_back(detail::lift_point(bracket, curve.point(u), a));
        const auto v = curve.velocity(u);
        GroupElement vel(alg.dim());
        vel[0] = v[0];
        vel[1] = v[1];
        const double speed = norm(vel);
        m.weights.push_back(speed * du);
        resolution = std::max(resolution, speed * du);
    }
    // Vertical part of consecutive increments relative to their squared horizontal length:
    // O(du) for a horizontal curve, unbounded as du -> 0 otherwise.
    const auto& law = norm.law();
    for (std::size_t i = 0; i + 1 < m.points.size(); ++i) {
        const GroupElement step = law.product(law.inverse(m.points[i]), m.points[i + 1]);
        double h2 = 0.0, v2 = 0.0;
        for (int j = 0; j < alg.dim(); ++j) (j < alg.layer_dim(1) ? h2 : v2) += step[j] * step[j];
        if (h2 > 0.0) horizontality = std::max(horizontality, std::sqrt(v2) / h2);
    }
    m.resolution = resolution;
    m.metadata = {{"fixture", fixture},   {"params", params},        {"curve", curve.name}, {"u0", curve.u0},
                  {"du", du},             {"count", count},          {"lift_error", lift_error},
                  {"horizontality", horizontality}, {"tangent", "velocity of the plane curve at u_i, first layer"}};

    LipschitzMap f;
    f.law = norm.law_ptr();
    f.domain = {{curve.u0}, {curve.u1}};
    f.eval = [curve, bracket](const std::vector<double>& u) { return detail::lift_point(bracket, curve.point(u[0]), curve.area(u[0])); };
    out.map = std::move(f);
    return out;
}

/// Curve behind a curve fixture, reconstructed from its metadata.
inline PlaneCurve fixture_curve(const PointMeasure& m)
{
    const auto& md = m.metadata;
    if (!md.contains("fixture")) throw Error(ErrorKind::PreconditionFailed, "measure carries no fixture metadata");
    const std::string name = md.at("fixture").get<std::string>();
    const auto& p = md.at("params");
    if (name == "horizontal-segment") return segment_curve(detail::jparam(p, "length", 1.0), detail::jparam(p, "angle", 0.0));
    if (name == "lifted-curve") return circle_curve(detail::jparam(p, "radius", 1.0));
    if (name == "tilted-graph")
        return tilted_graph_curve(detail::jparam(p, "a", 0.3), detail::jparam(p, "b", 0.1), detail::jparam(p, "omega", 3.0));
    throw Error(ErrorKind::PreconditionFailed, "fixture '" + name + "' is not a curve");
}

/// Parameter value of sample i of a curve fixture.
inline double fixture_parameter(const PointMeasure& m, std::size_t i)
{
    return m.metadata.at("u0").get<double>() + (static_cast<double>(i) + 0.5) * m.metadata.at("du").get<double>();
}

/// Analytic tangent line at sample i of a curve fixture.
inline HorizontalSubgroup fixture_tangent(const PointMeasure& m, std::size_t i)
{
    const auto v = fixture_curve(m).velocity(fixture_parameter(m, i));
    GroupElement t(m.law->dim());
    t[0] = v[0];
    t[1] = v[1];
    return make_horizontal(m.law->algebra(), {t});
}

/// Four-corner Cantor set: the unit square replaced, generation after generation, by its
/// four corner squares of a quarter the side. Samples are the centres of the 4^g cells.
inline Fixture cantor_fixture(const HomogeneousNorm& norm, int generations, const std::string& normalization,
                              const nlohmann::json& params)
{
    const auto& alg = norm.law().algebra();
    if (alg.dim() != 2 || alg.step() != 1)
        throw Error(ErrorKind::PreconditionFailed, "the four-corner Cantor fixture lives in the abelian plane");
    if (generations < 1 || generations > 10) throw Error(ErrorKind::ParseError, "generations must be in [1, 10]");
    if (normalization != "probability" && normalization != "hausdorff")
        throw Error(ErrorKind::ParseError, "normalization must be 'probability' or 'hausdorff'");
    std::vector<std::array<double, 2>> cells{{0.0, 0.0}};
    double side = 1.0;
    for (int g = 0; g < generations; ++g) {
        std::vector<std::array<double, 2>> next;
        next.reserve(cells.size() * 4);
        const double q = side / 4.0;
        for (const auto& c : cells)
            for (int dx : {0, 1})
                for (int dy : {0, 1}) next.push_back({c[0] + dx * 3.0 * q, c[1] + dy * 3.0 * q});
        cells = std::move(next);
        side = q;
    }
    Fixture out;
    auto& m = out.measure;
    m.law = norm.law_ptr();
    m.k = 1.0;
    m.provenance = Provenance::SelfSimilar;
    m.purely_unrectifiable = true;
    m.resolution = std::sqrt(2.0) * side * norm.first_layer_factor();
    for (const auto& c : cells) m.points.push_back(GroupElement{c[0] + side / 2.0, c[1] + side / 2.0});
    double total = 1.0;
    nlohmann::json oracle = nullptr;
    if (normalization == "hausdorff") {
        const auto est = hausdorff_estimate(norm, m.points, 1.0, default_meshes(1.0), MeasureVariant::Hausdorff, m.resolution);
        total = est.value;
        oracle = to_json(est);
    }
    m.weights.assign(m.points.size(), total / static_cast<double>(m.points.size()));
    // H^1 of the limit set lies between the length of its projection in direction (1, 2),
    // an interval of length 3/sqrt(5), and sqrt(2), the cost of the generation covers.
    m.metadata = {{"fixture", "four-corner-cantor"}, {"params", params},         {"generations", generations},
                  {"normalization", normalization},  {"total_mass", total},      {"hausdorff_oracle", oracle},
                  {"hausdorff_bounds", {3.0 / std::sqrt(5.0), std::sqrt(2.0)}}};
    return out;
}

/// H^k on a horizontal subgroup V restricted to V cap B(0, radius), as gamma_V times the
/// Lebesgue measure of lattice cells in frame coordinates.
inline Fixture reference_fixture(const HomogeneousNorm& norm, const HorizontalSubgroup& v, double radius, double spacing,
                                 std::optional<double> gamma, const nlohmann::json& params)
{
    if (!(radius > 0.0) || !(spacing > 0.0)) throw Error(ErrorKind::NonpositiveScale, "radius and spacing must be positive");
    const FiniteNorm nrm = restricted_norm(norm, v);
    HaarConstant hc;
    if (!gamma) {
        hc = haar_constant(norm, v, v.k());
        gamma = hc.gamma;
    }
    Fixture out;
    auto& m = out.measure;
    m.law = norm.law_ptr();
    m.k = v.k();
    m.provenance = Provenance::Parametrized;
    m.resolution = spacing * lattice_cell_scale(nrm);
    const int k = v.k();
    const int n = static_cast<int>(std::ceil(radius / nrm.floor / spacing));
    std::vector<int> idx(static_cast<std::size_t>(k), -n);
    std::vector<double> a(static_cast<std::size_t>(k));
    while (true) {
        for (int i = 0; i < k; ++i) a[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i)] * spacing;
        if (nrm.eval(a.data()) <= radius) {
            m.points.push_back(v.point(a.data()));
            m.weights.push_back(*gamma * std::pow(spacing, k));
        }
        int d = 0;
        while (d < k && ++idx[static_cast<std::size_t>(d)] > n) idx[static_cast<std::size_t>(d++)] = -n;
        if (d == k) break;
    }
    m.metadata = {{"fixture", "grassmann-reference"}, {"params", params}, {"gamma", *gamma},
                  {"subgroup", to_json(v)}, {"radius", radius}, {"spacing", spacing}};
    if (!hc.ball.runs.empty()) m.metadata["haar"] = to_json(hc);
    LipschitzMap f;
    f.law = norm.law_ptr();
    f.domain.lo.assign(static_cast<std::size_t>(k), -radius / nrm.floor);
    f.domain.hi.assign(static_cast<std::size_t>(k), radius / nrm.floor);
    f.eval = [v](const std::vector<double>& x) { return v.point(x.data()); };
    out.map = std::move(f);
    return out;
}

/// The fixture catalogue. Parameters (all optional):
///   horizontal-segment   length = 1, angle = 0, spacing = 1e-3
///   lifted-curve         radius = 1, spacing = 1e-4 (the lifted circle)
///   tilted-graph         a = 0.3, b = 0.1, omega = 3, spacing = 1e-3 (graph over [-1, 1])
///   grassmann-reference  angle = 0 (k = 1) or vectors = [[...], ...]; radius = 1,
///                        spacing = 1e-3 (k = 1) or 1e-2, gamma = haar constant
///   four-corner-cantor   generations = 5, normalization = probability | hausdorff
/// The seed is accepted for interface uniformity; every fixture is deterministic.
inline Fixture gen_fixture(const std::string& name, const nlohmann::json& params, std::uint64_t seed,
                           const HomogeneousNorm& norm)
{
    (void)seed;
    const nlohmann::json p = params.is_null() ? nlohmann::json::object() : params;
    if (!p.is_object()) throw Error(ErrorKind::ParseError, "fixture parameters must be an object");
    using detail::jparam;
    if (name == "horizontal-segment")
        return curve_fixture(norm, segment_curve(jparam(p, "length", 1.0), jparam(p, "angle", 0.0)), jparam(p, "spacing", 1e-3), name, p);
    if (name == "lifted-curve")
        return curve_fixture(norm, circle_curve(jparam(p, "radius", 1.0)), jparam(p, "spacing", 1e-4), name, p);
    if (name == "tilted-graph")
        return curve_fixture(norm, tilted_graph_curve(jparam(p, "a", 0.3), jparam(p, "b", 0.1), jparam(p, "omega", 3.0)),
                             jparam(p, "spacing", 1e-3), name, p);
    if (name == "four-corner-cantor")
        return cantor_fixture(norm, static_cast<int>(jparam(p, "generations", 5)), p.value("normalization", std::string("probability")), p);
    if (name == "grassmann-reference") {
        const auto& alg = norm.law().algebra();
        std::vector<GroupElement> vecs;
        if (p.contains("vectors")) {
            for (const auto& row : p.at("vectors")) {
                const auto c = row.get<std::vector<double>>();
                if (static_cast<int>(c.size()) != alg.layer_dim(1))
                    throw Error(ErrorKind::DimensionMismatch, "subgroup vectors must have one entry per first-layer coordinate");
                GroupElement e(alg.dim());
                for (std::size_t i = 0; i < c.size(); ++i) e[static_cast<int>(i)] = c[i];
                vecs.push_back(e);
            }
        } else {
            const double a = jparam(p, "angle", 0.0);
            GroupElement e(alg.dim());
            e[0] = std::cos(a);
            if (alg.layer_dim(1) > 1) e[1] = std::sin(a);
            vecs.push_back(e);
        }
        const HorizontalSubgroup v = make_horizontal(alg, vecs);
        std::optional<double> gamma;
        if (p.contains("gamma")) gamma = jparam(p, "gamma", 1.0);
        return reference_fixture(norm, v, jparam(p, "radius", 1.0), jparam(p, "spacing", v.k() == 1 ? 1e-3 : 1e-2), gamma, p);
    }
    throw Error(ErrorKind::UnknownFixture, "unknown fixture '" + name + "'");
}

} // namespace hgr
