#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "hgr/group_law.hpp"

namespace hgr {

enum class NormKind { WeightedMax, HeisenbergKoranyi };

inline std::string to_string(NormKind k) { return k == NormKind::WeightedMax ? "weighted-max" : "heisenberg-koranyi"; }

inline NormKind parse_norm_kind(const std::string& s)
{
    if (s == "weighted-max") return NormKind::WeightedMax;
    if (s == "heisenberg-koranyi" || s == "koranyi") return NormKind::HeisenbergKoranyi;
    throw Error(ErrorKind::ParseError, "unknown norm kind '" + s + "'");
}

/// Homogeneous norm on a graded group.
///
/// weighted-max:       ||x|| = max_j (eps_j |x^(j)|)^(1/j), eps_1 = 1.
/// heisenberg-koranyi: ||x|| = (|x^(1)|^4 + eps_2 |x^(2)|^2)^(1/4); requires step 2 with
///                     a one-dimensional second layer whose bracket form is orthogonal.
///
/// A norm is usable only after its triangle inequality has been checked on a sample
/// (see calibrate_norm / certify_norm); evaluating an unchecked norm throws UncalibratedNorm.
class HomogeneousNorm {
public:
    HomogeneousNorm() = default;
    HomogeneousNorm(std::shared_ptr<const GroupLaw> law, NormKind kind, std::vector<double> params)
        : law_(std::move(law)), kind_(kind), params_(std::move(params))
    {
        const auto& alg = law_->algebra();
        if (static_cast<int>(params_.size()) != alg.step())
            throw Error(ErrorKind::ParseError, "norm needs one parameter per layer (" + std::to_string(alg.step()) + ")");
        for (double e : params_)
            if (!(e > 0.0) || !std::isfinite(e)) throw Error(ErrorKind::ParseError, "norm parameters must be positive");
        if (kind_ == NormKind::HeisenbergKoranyi) check_heisenberg_type(alg);
        for (int j = 1; j <= alg.step(); ++j) {
            begin_.push_back(alg.layer_offset(j));
            end_.push_back(alg.layer_offset(j) + alg.layer_dim(j));
        }
    }

    NormKind kind() const { return kind_; }
    const std::vector<double>& params() const { return params_; }
    const GroupLaw& law() const { return *law_; }
    std::shared_ptr<const GroupLaw> law_ptr() const { return law_; }
    bool calibrated() const { return calibrated_; }
    double certified_margin() const { return margin_; }
    long certified_samples() const { return samples_; }

    /// Factor f with ||x|| >= f |x^(1)| for every x, with equality on the first layer.
    /// Left invariance turns this into d(x, y) >= f |y^(1) - x^(1)|, which range queries use.
    double first_layer_factor() const { return kind_ == NormKind::WeightedMax ? params_[0] : 1.0; }

    void mark_certified(double margin, long samples)
    {
        margin_ = margin;
        samples_ = samples;
        calibrated_ = true;
    }

    double operator()(const GroupElement& x) const
    {
        if (!calibrated_) throw Error(ErrorKind::UncalibratedNorm, "norm has not been calibrated for this algebra");
        return raw(x);
    }

    /// Evaluation without the calibration guard.
    double raw(const GroupElement& x) const
    {
        if (!law_ || x.size() != law_->dim())
            throw Error(ErrorKind::DimensionMismatch, "element does not match the norm's algebra");
        const int step = static_cast<int>(begin_.size());
        if (kind_ == NormKind::HeisenbergKoranyi) {
            const double h = layer_sq(x, 0);
            const double v = layer_sq(x, 1);
            return std::pow(h * h + params_[1] * v, 0.25);
        }
        double best = std::sqrt(layer_sq(x, 0)) * params_[0];
        for (int j = 1; j < step; ++j) {
            const double a = params_[static_cast<std::size_t>(j)] * std::sqrt(layer_sq(x, j));
            double r;
            if (j == 1)
                r = std::sqrt(a);
            else if (j == 2)
                r = std::cbrt(a);
            else
                r = std::pow(a, 1.0 / (j + 1));
            best = std::max(best, r);
        }
        return best;
    }

    /// d(x, y) = ||x^{-1} y||.
    double dist(const GroupElement& x, const GroupElement& y) const { return (*this)(law_->product(-x, y)); }

private:
    double layer_sq(const GroupElement& x, int j) const
    {
        double s = 0.0;
        for (int i = begin_[static_cast<std::size_t>(j)]; i < end_[static_cast<std::size_t>(j)]; ++i) s += x[i] * x[i];
        return s;
    }

    static void check_heisenberg_type(const GradedAlgebra& alg)
    {
        if (alg.step() != 2 || alg.layer_dim(2) != 1)
            throw Error(ErrorKind::ParseError, "heisenberg-koranyi needs step 2 and a one-dimensional second layer");
        const int h = alg.layer_dim(1);
        std::vector<double> b(static_cast<std::size_t>(h * h), 0.0);
        for (const auto& e : alg.brackets()) {
            b[static_cast<std::size_t>(e.i * h + e.j)] = e.coef.to_double();
            b[static_cast<std::size_t>(e.j * h + e.i)] = -e.coef.to_double();
        }
        for (int i = 0; i < h; ++i)
            for (int k = 0; k < h; ++k) {
                double s = 0.0;
                for (int j = 0; j < h; ++j) s += b[static_cast<std::size_t>(j * h + i)] * b[static_cast<std::size_t>(j * h + k)];
                if (std::abs(s - (i == k ? 1.0 : 0.0)) > 1e-12)
                    throw Error(ErrorKind::ParseError, "heisenberg-koranyi needs an orthogonal bracket form on the first layer");
            }
    }

    std::shared_ptr<const GroupLaw> law_;
    NormKind kind_ = NormKind::WeightedMax;
    std::vector<double> params_;
    std::vector<int> begin_, end_;
    bool calibrated_ = false;
    double margin_ = 0.0;
    long samples_ = 0;
};

inline double hnorm(const HomogeneousNorm& norm, const GroupElement& x) { return norm(x); }
inline double hdist(const HomogeneousNorm& norm, const GroupElement& x, const GroupElement& y) { return norm.dist(x, y); }

namespace detail {

/// Random element with layer magnitudes drawn independently on a log scale, so that
/// both horizontal-dominated and vertical-dominated directions are well represented.
inline GroupElement stratified_element(const GradedAlgebra& alg, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GroupElement x(alg.dim());
    for (int j = 1; j <= alg.step(); ++j) {
        const double pick = u(rng);
        double mag = pick < 0.15 ? 0.0 : std::pow(10.0, -3.0 * u(rng));
        double s = 0.0;
        const int b = alg.layer_offset(j), e = b + alg.layer_dim(j);
        for (int i = b; i < e; ++i) {
            x[i] = g(rng);
            s += x[i] * x[i];
        }
        s = std::sqrt(s);
        for (int i = b; i < e; ++i) x[i] *= mag / s;
    }
    if (x.is_zero()) x[0] = 1.0;
    return x;
}

} // namespace detail

/// Smallest relative triangle slack (||a|| + ||b|| - ||ab||) / (||a|| + ||b||) over sampled pairs.
/// Pairs are normalized to the unit sphere and the second factor is dilated by a
/// log-uniform factor in [1e-2, 1e2].
inline double triangle_margin(const HomogeneousNorm& norm, long samples, std::uint64_t seed)
{
    const auto& law = norm.law();
    const auto& alg = law.algebra();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lg(-2.0, 2.0);
    double worst = 1.0;
    for (long n = 0; n < samples; ++n) {
        GroupElement a = detail::stratified_element(alg, rng);
        GroupElement b = detail::stratified_element(alg, rng);
        a = law.dilate(1.0 / norm.raw(a), a);
        b = law.dilate(std::pow(10.0, lg(rng)) / norm.raw(b), b);
        const double na = norm.raw(a), nb = norm.raw(b);
        const double slack = (na + nb - norm.raw(law.product(a, b))) / (na + nb);
        worst = std::min(worst, slack);
    }
    return worst;
}

/// Sampled triangle slack below this is treated as a violation (rounding on exact equality cases).
inline constexpr double kTriangleTolerance = 1e-12;

/// Checks the triangle inequality of a norm with fixed parameters; throws CalibrationFailure if violated.
inline HomogeneousNorm certify_norm(HomogeneousNorm norm, long samples, std::uint64_t seed)
{
    const double m = triangle_margin(norm, samples, seed);
    if (m < -kTriangleTolerance)
        throw Error(ErrorKind::CalibrationFailure,
                    to_string(norm.kind()) + " violates the triangle inequality (relative slack " + std::to_string(m) + ")");
    norm.mark_certified(m, samples);
    return norm;
}

/// Builds a norm of the given kind for `law` and certifies it. For weighted-max the
/// constants of all layers >= 2 share a factor that is halved until the sample passes.
/// For heisenberg-koranyi the vertical constant defaults to 16.
inline HomogeneousNorm calibrate_norm(std::shared_ptr<const GroupLaw> law, NormKind kind, long samples,
                                      std::uint64_t seed)
{
    const int step = law->algebra().step();
    if (kind == NormKind::HeisenbergKoranyi)
        return certify_norm(HomogeneousNorm(law, kind, {1.0, 16.0}), samples, seed);
    double kappa = 1.0;
    for (int attempt = 0; attempt < 30; ++attempt, kappa *= 0.5) {
        std::vector<double> eps(static_cast<std::size_t>(step), kappa);
        eps[0] = 1.0;
        HomogeneousNorm candidate(law, kind, eps);
        const double m = triangle_margin(candidate, samples, seed);
        if (m >= -kTriangleTolerance) {
            candidate.mark_certified(m, samples);
            return candidate;
        }
    }
    throw Error(ErrorKind::CalibrationFailure, "no weighted-max constants passed the triangle sample");
}

} // namespace hgr
