#include <gtest/gtest.h>

#include <random>

#include "hgr/group.hpp"

using namespace hgr;

namespace {

GroupElement gaussian(int dim, std::mt19937_64& rng, double scale = 1.0)
{
    std::normal_distribution<double> g(0.0, scale);
    GroupElement x(dim);
    for (int i = 0; i < dim; ++i) x[i] = g(rng);
    return x;
}

const HomogeneousGroup& heisenberg_koranyi()
{
    static HomogeneousGroup g(groups::heisenberg(), {NormKind::HeisenbergKoranyi, {}}, 200000, 1);
    return g;
}

const HomogeneousGroup& engel_max()
{
    static HomogeneousGroup g(groups::engel(), {NormKind::WeightedMax, {}}, 200000, 1);
    return g;
}

} // namespace

TEST(Norm, KoranyiVerticalUnitHasNormTwo)
{
    const auto& g = heisenberg_koranyi();
    EXPECT_DOUBLE_EQ(hnorm(g.norm(), GroupElement{0, 0, 1}), 2.0);
    EXPECT_DOUBLE_EQ(hdist(g.norm(), GroupElement{0, 0, 0}, GroupElement{1, 0, 0}), 1.0);
    EXPECT_EQ(hnorm(g.norm(), GroupElement{0, 0, 0}), 0.0);
    EXPECT_GE(g.norm().certified_margin(), -kTriangleTolerance);
}

TEST(Norm, UncalibratedNormThrows)
{
    auto law = std::make_shared<const GroupLaw>(groups::heisenberg());
    HomogeneousNorm n(law, NormKind::WeightedMax, {1.0, 1.0});
    try {
        n(GroupElement{1, 0, 0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UncalibratedNorm);
    }
}

TEST(Norm, KoranyiRejectsNonHeisenbergAlgebra)
{
    auto law = std::make_shared<const GroupLaw>(groups::engel());
    EXPECT_THROW(HomogeneousNorm(law, NormKind::HeisenbergKoranyi, {1, 16, 1}), Error);
}

TEST(Norm, WeightedMaxTooLargeVerticalConstantFailsCertification)
{
    auto law = std::make_shared<const GroupLaw>(groups::heisenberg());
    try {
        certify_norm(HomogeneousNorm(law, NormKind::WeightedMax, {1.0, 64.0}), 20000, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CalibrationFailure);
    }
}

TEST(Norm, AbelianWeightedMaxIsEuclidean)
{
    HomogeneousGroup g(groups::abelian(2), {NormKind::WeightedMax, {}}, 10000, 1);
    EXPECT_DOUBLE_EQ(g.norm_of(GroupElement{3, 4}), 5.0);
}

TEST(Norm, HomogeneityLeftInvarianceSymmetry)
{
    std::mt19937_64 rng(9);
    for (const HomogeneousGroup* g : {&heisenberg_koranyi(), &engel_max()}) {
        for (int n = 0; n < 2000; ++n) {
            auto x = gaussian(g->dim(), rng), y = gaussian(g->dim(), rng), z = gaussian(g->dim(), rng);
            const double r = std::exp(std::normal_distribution<double>()(rng));
            EXPECT_NEAR(g->norm_of(g->dilate(r, x)), r * g->norm_of(x), 1e-12 * r * g->norm_of(x));
            EXPECT_NEAR(g->dist(g->mul(z, x), g->mul(z, y)), g->dist(x, y), 1e-10 * (1 + g->dist(x, y)));
            EXPECT_NEAR(g->dist(x, y), g->dist(y, x), 1e-12 * (1 + g->dist(x, y)));
            EXPECT_EQ(g->dist(x, x), 0.0);
            EXPECT_GT(g->norm_of(x), 0.0);
        }
    }
}

TEST(Norm, TriangleInequalityOnRandomTriples)
{
    std::mt19937_64 rng(21);
    for (const HomogeneousGroup* g : {&heisenberg_koranyi(), &engel_max()}) {
        double worst = 0.0;
        for (int n = 0; n < 20000; ++n) {
            auto x = gaussian(g->dim(), rng), y = gaussian(g->dim(), rng, 0.3), z = gaussian(g->dim(), rng, 3.0);
            worst = std::max(worst, g->dist(x, z) - g->dist(x, y) - g->dist(y, z));
        }
        EXPECT_LE(worst, 1e-9);
    }
}

TEST(Norm, NormDominatesHorizontalPart)
{
    std::mt19937_64 rng(4);
    for (const HomogeneousGroup* g : {&heisenberg_koranyi(), &engel_max()}) {
        for (int n = 0; n < 1000; ++n) {
            auto x = gaussian(g->dim(), rng);
            EXPECT_GE(g->norm_of(x), std::hypot(x[0], x[1]) - 1e-15);
        }
    }
}
