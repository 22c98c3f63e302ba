#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hgr/norm.hpp"

namespace hgr {

/// Axis-parallel box in R^k.
struct BoxDomain {
    std::vector<double> lo, hi;

    int k() const { return static_cast<int>(lo.size()); }

    void validate() const
    {
        if (lo.empty() || lo.size() != hi.size()) throw Error(ErrorKind::DimensionMismatch, "box bounds must have equal, positive length");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i])) throw Error(ErrorKind::ParseError, "box must have positive width in every axis");
    }

    double volume() const
    {
        double v = 1.0;
        for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
        return v;
    }

    /// Interior in the sense used for differentiation: at least `margin` from the boundary.
    bool interior(const std::vector<double>& x, double margin) const
    {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] + margin || x[i] > hi[i] - margin) return false;
        return true;
    }
};

/// f : A subset R^k -> G given by an evaluator.
struct LipschitzMap {
    std::shared_ptr<const GroupLaw> law;
    BoxDomain domain;
    std::function<GroupElement(const std::vector<double>&)> eval;
    std::optional<double> lipschitz; // declared constant, if any

    int k() const { return domain.k(); }
    GroupElement operator()(const std::vector<double>& a) const { return eval(a); }
};

/// Largest sampled quotient d(f(a), f(b)) / |a - b| over random pairs of the domain.
inline double sampled_lipschitz(const HomogeneousNorm& norm, const LipschitzMap& f, int pairs, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const int k = f.k();
    double worst = 0.0;
    std::vector<double> a(static_cast<std::size_t>(k)), b(static_cast<std::size_t>(k));
    for (int n = 0; n < pairs; ++n) {
        double e2 = 0.0;
        for (int i = 0; i < k; ++i) {
            std::uniform_real_distribution<double> u(f.domain.lo[static_cast<std::size_t>(i)], f.domain.hi[static_cast<std::size_t>(i)]);
            a[static_cast<std::size_t>(i)] = u(rng);
            b[static_cast<std::size_t>(i)] = u(rng);
            e2 += (a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]) * (a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]);
        }
        if (e2 == 0.0) continue;
        worst = std::max(worst, norm.dist(f(a), f(b)) / std::sqrt(e2));
    }
    return worst;
}

/// Checks the declared Lipschitz constant, if any, against sampled quotients.
inline void check_declared_lipschitz(const HomogeneousNorm& norm, const LipschitzMap& f, int pairs = 2000, std::uint64_t seed = 1)
{
    if (!f.lipschitz) return;
    const double q = sampled_lipschitz(norm, f, pairs, seed);
    if (q > *f.lipschitz * (1.0 + 1e-6))
        throw Error(ErrorKind::PreconditionFailed,
                    "sampled Lipschitz quotient " + std::to_string(q) + " exceeds the declared " + std::to_string(*f.lipschitz));
}

/// h-homomorphism R^k -> G: h -> sum h_i v_i with pairwise commuting first-layer images.
/// Since the images commute, the BCH product of images is their sum, so L is additive.
class HHomomorphism {
public:
    HHomomorphism() = default;
    HHomomorphism(std::shared_ptr<const GroupLaw> law, std::vector<GroupElement> images)
        : law_(std::move(law)), images_(std::move(images))
    {
        const auto& alg = law_->algebra();
        const int h1 = alg.layer_dim(1);
        for (const auto& v : images_) {
            if (v.size() != alg.dim()) throw Error(ErrorKind::DimensionMismatch, "image vector has the wrong dimension");
            for (int i = h1; i < alg.dim(); ++i)
                if (v[i] != 0.0) throw Error(ErrorKind::NotInFirstLayer, "image vectors must lie in the first layer");
        }
        double scale = 0.0;
        for (const auto& v : images_) scale = std::max(scale, euclidean_norm(v));
        for (std::size_t i = 0; i < images_.size(); ++i)
            for (std::size_t j = i + 1; j < images_.size(); ++j)
                residual_ = std::max(residual_, euclidean_norm(alg.bracket(images_[i], images_[j])));
        if (residual_ > 1e-10 * std::max(1.0, scale * scale))
            throw Error(ErrorKind::NotAbelian, "image vectors of an h-homomorphism must commute");
    }

    int k() const { return static_cast<int>(images_.size()); }
    const std::vector<GroupElement>& images() const { return images_; }
    double bracket_residual() const { return residual_; }

    GroupElement operator()(const std::vector<double>& h) const
    {
        GroupElement out(law_->dim());
        for (std::size_t i = 0; i < images_.size(); ++i) out += h[i] * images_[i];
        return out;
    }

    /// Rank of the image matrix equals k.
    bool injective(double tol = 1e-9) const
    {
        if (images_.empty()) return false;
        const int h1 = law_->algebra().layer_dim(1);
        Eigen::MatrixXd m(h1, k());
        double scale = 0.0;
        for (int c = 0; c < k(); ++c)
            for (int r = 0; r < h1; ++r) {
                m(r, c) = images_[static_cast<std::size_t>(c)][r];
                scale = std::max(scale, std::abs(m(r, c)));
            }
        if (scale == 0.0) return false;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        return svd.singularValues()(k() - 1) > tol * scale;
    }

private:
    std::shared_ptr<const GroupLaw> law_;
    std::vector<GroupElement> images_;
    double residual_ = 0.0;
};

} // namespace hgr
