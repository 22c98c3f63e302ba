#include <gtest/gtest.h>

#include <random>

#include "hgr/grassmannian.hpp"
#include "hgr/group.hpp"

using namespace hgr;

namespace {

const HomogeneousGroup& heis()
{
    static HomogeneousGroup g(groups::heisenberg(), {NormKind::HeisenbergKoranyi, {}}, 100000, 1);
    return g;
}

const HomogeneousGroup& engel()
{
    static HomogeneousGroup g(groups::engel(), {NormKind::WeightedMax, {}}, 100000, 1);
    return g;
}

const HomogeneousGroup& plane()
{
    static HomogeneousGroup g(groups::abelian(2), {NormKind::WeightedMax, {}}, 10000, 1);
    return g;
}

HorizontalSubgroup line(const GradedAlgebra& alg, double angle)
{
    GroupElement v(alg.dim());
    v[0] = std::cos(angle);
    v[1] = std::sin(angle);
    return make_horizontal(alg, {v});
}

GroupElement gaussian(int dim, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    GroupElement x(dim);
    for (int i = 0; i < dim; ++i) x[i] = g(rng);
    return x;
}

} // namespace

TEST(MakeHorizontal, Cases)
{
    auto h = groups::heisenberg();
    auto v = make_horizontal(h, {GroupElement{2, 0, 0}});
    EXPECT_EQ(v.k(), 1);
    EXPECT_NEAR(v.frame()(0, 0), 1.0, 1e-15);
    try {
        make_horizontal(h, {GroupElement{1, 0, 0}, GroupElement{0, 1, 0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotAbelian);
    }
    try {
        make_horizontal(h, {GroupElement{1, 0, 1}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotInFirstLayer);
    }
    auto p = make_horizontal(groups::abelian(2), {GroupElement{1, 1}, GroupElement{0, 1}});
    EXPECT_EQ(p.k(), 2);
    EXPECT_LE((p.frame().transpose() * p.frame() - Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-12);
}

TEST(Upsilon, KnownAlgebras)
{
    EXPECT_EQ(upsilon_lower_bound(groups::abelian(2), 10), 2);
    EXPECT_EQ(upsilon_lower_bound(groups::heisenberg(), 50), 1);
    EXPECT_EQ(upsilon_lower_bound(groups::engel(), 50), 1);
    EXPECT_EQ(upsilon_lower_bound(groups::heisenberg5(), 50), 2);
}

TEST(Upsilon, ExhaustivePlaneCheckInHeisenberg)
{
    // Every 2-plane in H^1 of the Heisenberg algebra is all of H^1, and [e1,e2] != 0.
    auto h = groups::heisenberg();
    for (int i = 0; i < 36; ++i) {
        const double t = 3.14159265358979 * i / 36;
        GroupElement a{std::cos(t), std::sin(t), 0}, b{-std::sin(t), std::cos(t), 0};
        EXPECT_GT(euclidean_norm(h.bracket(a, b)), 0.5);
    }
}

TEST(Projection, ExamplesAndFactorization)
{
    const auto& g = heis();
    auto v = line(g.algebra(), 0.0);
    EXPECT_EQ(project_h(v, GroupElement{1, 2, 3}), (GroupElement{1, 0, 0}));
    auto pv = project_v(g.law(), v, GroupElement{1, 2, 3});
    EXPECT_NEAR(pv[0], 0.0, 1e-15);
    EXPECT_NEAR(pv[1], 2.0, 1e-15);
    EXPECT_NEAR(pv[2], 4.0, 1e-15);
    EXPECT_TRUE(project_v(g.law(), v, GroupElement{2.5, 0, 0}).is_zero());
    EXPECT_EQ(project_h(v, GroupElement{-3, 0, 0}), (GroupElement{-3, 0, 0}));
    try {
        project_h(v, GroupElement{1, 2});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(Projection, FactorizationExactInRationals)
{
    // Rational unit direction ((1-t^2)/(1+t^2), 2t/(1+t^2)) gives an exact projector.
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> u(-9, 9);
    for (const auto& alg : {groups::heisenberg(), groups::engel()}) {
        GroupLaw law(alg);
        for (int n = 0; n < 100; ++n) {
            Rational t(u(rng), 7);
            Rational c = (Rational(1) - t * t) / (Rational(1) + t * t), s = Rational(2) * t / (Rational(1) + t * t);
            std::vector<std::vector<Rational>> proj{{c * c, c * s}, {s * c, s * s}};
            BasicElement<Rational> p(alg.dim());
            for (int i = 0; i < alg.dim(); ++i) p[i] = Rational(u(rng), 5);
            auto h = project_first_layer(proj, p);
            auto w = law.product(p, -h);
            EXPECT_EQ(law.product(w, h), p);
            EXPECT_EQ(w[0] * c + w[1] * s, Rational(0)); // w lies in V^perp
        }
    }
}

TEST(Projection, IsAnHHomomorphism)
{
    std::mt19937_64 rng(4);
    for (const HomogeneousGroup* g : {&heis(), &engel()}) {
        for (int n = 0; n < 2000; ++n) {
            auto v = sample_horizontal(g->algebra(), 1, rng);
            auto p = gaussian(g->dim(), rng), q = gaussian(g->dim(), rng);
            auto lhs = project_h(v, g->mul(p, q));
            auto rhs = g->mul(project_h(v, p), project_h(v, q));
            EXPECT_LE(max_abs(lhs - rhs), 1e-10);
            const double r = 0.37;
            EXPECT_LE(max_abs(project_h(v, g->dilate(r, p)) - g->dilate(r, project_h(v, p))), 1e-14);
            auto f = g->mul(project_v(g->law(), v, p), project_h(v, p));
            EXPECT_LE(max_abs(f - p), 1e-12 * (1 + max_abs(p)));
        }
    }
}

TEST(Rho, Examples)
{
    const auto& p = plane();
    auto x = line(p.algebra(), 0.0), y = line(p.algebra(), 1.5707963267948966);
    EXPECT_NEAR(rho(p.norm(), x, y), 1.0, 1e-9);
    EXPECT_EQ(rho(p.norm(), x, x), 0.0);
    std::mt19937_64 rng(2);
    for (const HomogeneousGroup* g : {&heis(), &engel()}) {
        for (int n = 0; n < 30; ++n) {
            auto a = sample_horizontal(g->algebra(), 1, rng), b = sample_horizontal(g->algebra(), 1, rng),
                 c = sample_horizontal(g->algebra(), 1, rng);
            const double ab = rho(g->norm(), a, b), ba = rho(g->norm(), b, a);
            EXPECT_NEAR(ab, ba, 1e-9);
            EXPECT_LE(rho(g->norm(), a, c), ab + rho(g->norm(), b, c) + 1e-9);
        }
    }
}

TEST(Rho, HigherRankSearch)
{
    HomogeneousGroup g(groups::heisenberg5(), {NormKind::HeisenbergKoranyi, {}}, 50000, 1);
    std::mt19937_64 rng(6);
    auto a = sample_horizontal(g.algebra(), 2, rng), b = sample_horizontal(g.algebra(), 2, rng);
    const double d = rho(g.norm(), a, b, 128);
    EXPECT_GT(d, 0.0);
    EXPECT_NEAR(d, rho(g.norm(), b, a, 128), 1e-6);
    EXPECT_EQ(rho(g.norm(), a, a, 16), 0.0);
}

TEST(GrassNet, HeisenbergLines)
{
    const auto& g = heis();
    auto net = grass_net(g.norm(), 1, 0.1, 5, 300, 1000);
    EXPECT_LE(net.achieved_radius, 1.05 * 0.1);
    EXPECT_GT(net.elements.size(), 3u);
    // Independent angular-grid oracle: every line is near some net element.
    double worst = 0.0;
    for (int i = 0; i < 180; ++i) worst = std::max(worst, nearest_in_net(g.norm(), net, line(g.algebra(), 3.14159265358979 * i / 180)).second);
    EXPECT_LE(worst, 1.05 * 0.1);
}

TEST(GrassNet, SingleElementCases)
{
    auto net = grass_net(plane().norm(), 2, 0.1, 1, 20, 100);
    EXPECT_EQ(net.elements.size(), 1u);
    auto wide = grass_net(heis().norm(), 1, 10.0, 1, 50, 100);
    EXPECT_EQ(wide.elements.size(), 1u);
    EXPECT_THROW(grass_net(heis().norm(), 2, 0.1, 1), Error);
}

TEST(EstimateCG, AbelianIsOneThird)
{
    const auto& p = plane();
    auto net = grass_net(p.norm(), 1, 0.2, 3, 100, 200);
    auto c = estimate_cG(p.norm(), {net}, 200, 1.0, 3, 500);
    EXPECT_NEAR(c.c1_hat, 1.0, 1e-12);
    EXPECT_NEAR(c.c_G_hat, 1.0 / 3.0, 1e-12);
}

TEST(EstimateCG, HeisenbergAndEngelPassSandwich)
{
    for (const HomogeneousGroup* g : {&heis(), &engel()}) {
        auto net = grass_net(g->norm(), 1, 0.2, 3, 100, 200);
        auto c = estimate_cG(g->norm(), {net}, 200, 1.1, 3, 2000);
        EXPECT_GT(c.c_G_hat, 0.0);
        EXPECT_LT(c.c_G_hat, 1.0);
        EXPECT_EQ(c.validation.violations, 0);
        EXPECT_GE(c.validation.min_slack_perp_upper, -1e-12);
        EXPECT_GE(c.validation.min_slack_v_upper, -1e-12);
    }
}

TEST(DistToSubgroup, Examples)
{
    const auto& g = heis();
    auto v = line(g.algebra(), 0.0);
    EXPECT_NEAR(dist_to_subgroup(g.norm(), GroupElement{1.5, 0, 0}, v), 0.0, 1e-12);
    // d((0,0,1), span e1) = min_a ||(-a,0,1)|| = 2 at a = 0.
    EXPECT_NEAR(dist_to_subgroup(g.norm(), GroupElement{0, 0, 1}, v), 2.0, 1e-8);
    EXPECT_NEAR(dist_to_subgroup(g.norm(), GroupElement{0, 2, 3}, vertical_complement(v)), 0.0, 1e-12);
}
