#include <gtest/gtest.h>

#include <cmath>

#include "hgr/differential.hpp"
#include "hgr/fixtures.hpp"
#include "hgr/group.hpp"

using namespace hgr;

namespace {

const HomogeneousGroup& heis()
{
    static HomogeneousGroup g(groups::heisenberg(), {NormKind::HeisenbergKoranyi, {}}, 100000, 1);
    return g;
}

const HomogeneousGroup& heis5()
{
    static HomogeneousGroup g(groups::heisenberg5(), {NormKind::HeisenbergKoranyi, {}}, 100000, 1);
    return g;
}

const HomogeneousGroup& plane()
{
    static HomogeneousGroup g(groups::abelian(2), {NormKind::WeightedMax, {}}, 10000, 1);
    return g;
}

template <class F>
ErrorKind kind_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::ParseError;
}

LipschitzMap map1(const HomogeneousGroup& g, std::function<GroupElement(double)> f, double lo = -1.0, double hi = 1.0)
{
    LipschitzMap m;
    m.law = g.norm().law_ptr();
    m.domain = {{lo}, {hi}};
    m.eval = [f](const std::vector<double>& a) { return f(a[0]); };
    return m;
}

/// Linear map of the unit square into the plane, a |-> M a.
LipschitzMap plane_linear(double a, double b, double c, double d)
{
    LipschitzMap m;
    m.law = plane().norm().law_ptr();
    m.domain = {{0.0, 0.0}, {1.0, 1.0}};
    m.eval = [=](const std::vector<double>& x) { return GroupElement{a * x[0] + b * x[1], c * x[0] + d * x[1]}; };
    return m;
}

JacobianOptions coarse()
{
    JacobianOptions o;
    o.meshes = {0.32, 0.16};
    return o;
}

} // namespace

TEST(PansuDiff, ConstantIsZero)
{
    const auto f = map1(heis(), [](double) { return GroupElement{0.3, -0.1, 2.0}; });
    const auto d = pansu_diff(heis().norm(), f, {0.2});
    EXPECT_EQ(euclidean_norm(d.map.images()[0]), 0.0);
    EXPECT_FALSE(d.map.injective());
    for (double r : d.residuals) EXPECT_EQ(r, 0.0);
}

TEST(PansuDiff, HomomorphismIsItsOwnDifferential)
{
    const auto f = map1(heis(), [](double u) { return GroupElement{u, 0.0, 0.0}; });
    const auto d = pansu_diff(heis().norm(), f, {0.4});
    const auto& v = d.map.images()[0];
    EXPECT_NEAR(v[0], 1.0, 1e-12);
    EXPECT_NEAR(v[1], 0.0, 1e-15);
    EXPECT_EQ(v[2], 0.0);
    for (double r : d.residuals) EXPECT_LT(r, 1e-9);
    EXPECT_TRUE(d.map.injective());
}

TEST(PansuDiff, LiftedCircleMatchesLiftDerivative)
{
    const auto& fx = gen_fixture("lifted-curve", {{"spacing", 1e-2}}, 1, heis().norm());
    const auto& f = *fx.map;
    for (double u : {0.5, 2.0, 4.0}) {
        const auto d = pansu_diff(heis().norm(), f, {u});
        const auto& v = d.map.images()[0];
        // The lift of (cos u, sin u) has first-layer velocity (-sin u, cos u).
        EXPECT_NEAR(v[0], -std::sin(u), 1e-4);
        EXPECT_NEAR(v[1], std::cos(u), 1e-4);
        EXPECT_EQ(v[2], 0.0);
        ASSERT_EQ(d.residuals.size(), 3u);
        EXPECT_LT(d.residuals[2], d.residuals[0]);
        EXPECT_LT(d.residuals[0], 0.2);
    }
}

TEST(PansuDiff, Errors)
{
    // Difference quotients sin(log t) never settle.
    const auto osc = map1(heis(), [](double u) { return GroupElement{u == 0.0 ? 0.0 : u * std::sin(std::log(std::abs(u))), 0.0, 0.0}; });
    EXPECT_EQ(kind_of([&] { pansu_diff(heis().norm(), osc, {0.0}); }), ErrorKind::NonconvergentResidual);
    // The identity chart of the first layer is not Lipschitz into the group: residuals grow.
    LipschitzMap chart;
    chart.law = heis().norm().law_ptr();
    chart.domain = {{-1.0, -1.0}, {1.0, 1.0}};
    chart.eval = [](const std::vector<double>& a) { return GroupElement{a[0], a[1], 0.0}; };
    EXPECT_EQ(kind_of([&] { pansu_diff(heis().norm(), chart, {0.3, 0.2}); }), ErrorKind::NonconvergentResidual);
    const auto id = map1(heis(), [](double u) { return GroupElement{u, 0.0, 0.0}; });
    EXPECT_EQ(kind_of([&] { pansu_diff(heis().norm(), id, {0.995}); }), ErrorKind::PreconditionFailed);
    EXPECT_EQ(kind_of([&] { pansu_diff(heis().norm(), id, {0.0}, {1e-2, 2e-2}); }), ErrorKind::ParseError);
    EXPECT_EQ(kind_of([&] { pansu_diff(heis().norm(), id, {0.0, 0.0}); }), ErrorKind::DimensionMismatch);
}

TEST(PansuDiff, AbelianProjection)
{
    // Columns e1 and e2 + 0.01 e1 do not commute; the projection keeps the dominant direction.
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.01, 0.0, 1e-3;
    const auto p = detail::abelian_projection(heis().algebra(), m);
    EXPECT_NEAR(p(1, 0) * p(0, 1) - p(0, 0) * p(1, 1), 0.0, 1e-15);
    EXPECT_LT((p - m).norm(), 2e-3);
    Eigen::MatrixXd c(4, 2);
    c << 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0;
    EXPECT_LT((detail::abelian_projection(heis5().algebra(), c) - c).norm(), 1e-15);
}

TEST(MetricDiff, Examples)
{
    const auto c = map1(heis(), [](double) { return GroupElement{1.0, 1.0, 1.0}; });
    const auto zero = metric_diff(heis().norm(), c, {0.0});
    EXPECT_EQ(zero.min_ratio, 0.0);
    EXPECT_TRUE(zero.degenerate);
    for (double v : zero.values) EXPECT_EQ(v, 0.0);

    const auto two = map1(heis(), [](double u) { return GroupElement{2.0 * u, 0.0, 0.0}; });
    const auto s = metric_diff(heis().norm(), two, {0.1});
    EXPECT_FALSE(s.degenerate);
    EXPECT_NEAR(s.values[0], 2.0, 1e-12);
    EXPECT_NEAR(s.values[1], 2.0, 1e-12);
    const double h = -0.7;
    EXPECT_NEAR(s(&h), 1.4, 1e-12);
}

TEST(MetricDiff, MatchesPansuWhereDifferentiable)
{
    const auto& norm = heis().norm();
    const auto& fx = gen_fixture("lifted-curve", {{"spacing", 1e-2}}, 1, norm);
    for (double u : {0.3, 1.7, 3.3, 5.9}) {
        const auto d = pansu_diff(norm, *fx.map, {u});
        const auto s = metric_diff(norm, *fx.map, {u});
        EXPECT_NEAR(s.values[0], norm(d.map({1.0})), 1e-3);
        EXPECT_NEAR(s.values[1], norm(d.map({-1.0})), 1e-3);
    }
    const auto lin = plane_linear(2.0, 0.5, 0.3, 1.075);
    const auto d = pansu_diff(plane().norm(), lin, {0.5, 0.5});
    const auto s = metric_diff(plane().norm(), lin, {0.5, 0.5});
    for (std::size_t i = 0; i < s.directions.size(); ++i) EXPECT_NEAR(s.values[i], plane().norm()(d.map(s.directions[i])), 1e-3);
    // In between grid directions the polygonal gauge stays within the chord error.
    for (double a = 0.01; a < 6.28; a += 0.1) {
        const std::vector<double> h{std::cos(a), std::sin(a)};
        EXPECT_NEAR(s(h), plane().norm()(d.map(h)), 5e-3 * s.max_value());
    }
}

TEST(MetricDiff, KernelBetweenGridAngles)
{
    // Kernel along (2, -1), which is not one of the 64 grid directions.
    const auto s = metric_diff(plane().norm(), plane_linear(1.0, 2.0, 0.5, 1.0), {0.5, 0.5});
    EXPECT_GT(s.min_value(), 1e-3 * s.max_value());
    EXPECT_TRUE(s.degenerate);
    EXPECT_LE(s.min_ratio, kDegenerateRatio);
    const auto t = metric_diff(plane().norm(), plane_linear(1.0, 2.0, 0.5, 1.001), {0.5, 0.5});
    EXPECT_FALSE(t.degenerate);
}

TEST(MetricDiff, Subadditive)
{
    for (const auto& m : {plane_linear(2.0, 0.5, 0.3, 1.075), plane_linear(1.0, 3.0, 0.0, 0.2), plane_linear(1.0, 2.0, 0.5, 1.0)}) {
        const auto s = metric_diff(plane().norm(), m, {0.4, 0.6});
        EXPECT_GE(s.subadditivity_slack, -1e-9);
    }
    const auto& fx = gen_fixture("lifted-curve", {{"spacing", 1e-2}}, 1, heis().norm());
    EXPECT_GE(metric_diff(heis().norm(), *fx.map, {1.0}).subadditivity_slack, -1e-9);
}

TEST(MetricJacobian, Examples)
{
    const auto c = map1(heis(), [](double) { return GroupElement{1.0, 1.0, 1.0}; });
    const auto zero = metric_jacobian(heis().norm(), c, {0.0});
    EXPECT_EQ(zero.value, 0.0);
    ASSERT_TRUE(zero.injective.has_value());
    EXPECT_FALSE(*zero.injective);

    const auto id = plane_linear(1.0, 0.0, 0.0, 1.0);
    const auto j = metric_jacobian(plane().norm(), id, {0.5, 0.5}, coarse());
    // Numerator and denominator share the lattice; on two coarse meshes they agree to a few percent.
    EXPECT_NEAR(j.value, 1.0, 0.05);

    const auto unit = map1(heis(), [](double u) { return GroupElement{u, 0.0, 0.0}; });
    const double j0 = metric_jacobian(heis().norm(), unit, {0.0}).value;
    EXPECT_NEAR(j0, 1.0, 0.05);
    for (double a : {0.5, 3.0}) {
        const auto f = map1(heis(), [a](double u) { return GroupElement{a * u, 0.0, 0.0}; });
        EXPECT_NEAR(metric_jacobian(heis().norm(), f, {0.0}).value, a * j0, 1e-9 * a);
    }
}

TEST(MetricJacobian, LinearMapCrossCheck)
{
    const auto lin = plane_linear(2.0, 0.5, 0.3, 1.075);
    const auto j = metric_jacobian(plane().norm(), lin, {0.5, 0.5}, coarse());
    EXPECT_NEAR(j.value, 2.0, 0.1);
    ASSERT_TRUE(j.linearization.has_value());
    EXPECT_NEAR(*j.linearization / j.value, 1.0, 0.05);

    // Horizontal plane in the five-dimensional Heisenberg group.
    LipschitzMap h;
    h.law = heis5().norm().law_ptr();
    h.domain = {{-1.0, -1.0}, {1.0, 1.0}};
    h.eval = [](const std::vector<double>& a) { return GroupElement{2.0 * a[0] + 0.5 * a[1], 0.0, 0.3 * a[0] + 1.075 * a[1], 0.0, 0.0}; };
    const auto k = metric_jacobian(heis5().norm(), h, {0.0, 0.0}, coarse());
    EXPECT_NEAR(k.value, 2.0, 0.1);
    EXPECT_NEAR(*k.linearization / k.value, 1.0, 0.05);
    EXPECT_TRUE(*k.injective);
}

TEST(MetricJacobian, PositiveExactlyWhenInjective)
{
    // Rank one with an oblique kernel, rank one along an axis, zero, and rank two.
    for (const auto& m : {plane_linear(1.0, 2.0, 0.5, 1.0), plane_linear(1.0, 0.0, 0.0, 0.0), plane_linear(0.0, 0.0, 0.0, 0.0),
                          plane_linear(1.0, 0.2, 0.1, 1.2)}) {
        const auto j = metric_jacobian(plane().norm(), m, {0.5, 0.5}, coarse());
        ASSERT_TRUE(j.injective.has_value());
        EXPECT_EQ(j.value > 0.0, *j.injective);
    }
    const auto& fx = gen_fixture("tilted-graph", {{"spacing", 1e-2}}, 1, heis().norm());
    const auto j = metric_jacobian(heis().norm(), *fx.map, {0.2});
    EXPECT_GT(j.value, 0.0);
    EXPECT_TRUE(*j.injective);
}

TEST(MetricJacobian, DisagreementIsReported)
{
    const auto& fx = gen_fixture("lifted-curve", {{"spacing", 1e-2}}, 1, heis().norm());
    JacobianOptions strict;
    strict.tolerance = 0.0;
    EXPECT_EQ(kind_of([&] { metric_jacobian(heis().norm(), *fx.map, {1.0}, strict); }), ErrorKind::OracleDisagreement);
}

TEST(AreaCheck, ConstantMap)
{
    const auto c = map1(heis(), [](double) { return GroupElement{1.0, 1.0, 1.0}; });
    const auto a = area_check(heis().norm(), c, 1e-2);
    EXPECT_EQ(a.lhs, 0.0);
    EXPECT_EQ(a.rhs, 0.0);
    EXPECT_FALSE(a.ratio.has_value());
}

TEST(AreaCheck, HeisenbergSegment)
{
    const auto& fx = gen_fixture("horizontal-segment", {}, 1, heis().norm());
    const auto a = area_check(heis().norm(), *fx.map, 1e-2);
    ASSERT_TRUE(a.ratio.has_value());
    EXPECT_NEAR(*a.ratio, 1.0, 0.1);
    EXPECT_NEAR(a.lhs, 1.0, 0.05);
}

TEST(AreaCheck, LiftedCurveAndGraph)
{
    for (const char* name : {"lifted-curve", "tilted-graph"}) {
        const auto& fx = gen_fixture(name, {{"spacing", 1e-2}}, 1, heis().norm());
        const auto a = area_check(heis().norm(), *fx.map, 1e-2);
        ASSERT_TRUE(a.ratio.has_value());
        EXPECT_NEAR(*a.ratio, 1.0, 0.1) << name;
        EXPECT_LE(a.max_cross_gap, 0.05) << name;
    }
}

TEST(AreaCheck, AbelianDeterminantTwo)
{
    const auto lin = plane_linear(2.0, 0.5, 0.3, 1.075);
    AreaCheckOptions opt;
    opt.jacobian = coarse();
    const auto a = area_check(plane().norm(), lin, 2e-2, opt);
    EXPECT_NEAR(a.lhs, 2.0, 0.1);
    EXPECT_NEAR(a.rhs, 2.0, 0.1);
    ASSERT_TRUE(a.ratio.has_value());
    EXPECT_NEAR(*a.ratio, 1.0, 0.05);
    EXPECT_LE(a.max_cross_gap, 0.05);
    EXPECT_EQ(kind_of([&] { area_check(plane().norm(), lin, 0.0); }), ErrorKind::NonpositiveScale);
}

TEST(HHomomorphismType, Invariants)
{
    const auto& law = heis().norm().law_ptr();
    const HHomomorphism l(law, {GroupElement{1.0, 2.0, 0.0}});
    const auto x = l({0.3}), y = l({-1.1});
    const auto sum = l({0.3 - 1.1});
    const auto prod = heis().law().product(x, y);
    EXPECT_LT(max_abs(prod - sum), 1e-15);
    EXPECT_EQ(kind_of([&] { HHomomorphism(law, {GroupElement{1.0, 0.0, 1.0}}); }), ErrorKind::NotInFirstLayer);
    EXPECT_EQ(kind_of([&] { HHomomorphism(law, {GroupElement{1.0, 0.0, 0.0}, GroupElement{0.0, 1.0, 0.0}}); }), ErrorKind::NotAbelian);
}

TEST(LipschitzMapType, SampledConstant)
{
    const auto f = map1(heis(), [](double u) { return GroupElement{3.0 * u, 0.0, 0.0}; });
    EXPECT_NEAR(sampled_lipschitz(heis().norm(), f, 100, 1), 3.0, 1e-12);
    const auto& fx = gen_fixture("lifted-curve", {{"spacing", 1e-2}}, 1, heis().norm());
    EXPECT_LE(sampled_lipschitz(heis().norm(), *fx.map, 2000, 1), 1.0 + 1e-6);
}
