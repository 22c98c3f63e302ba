#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hgr/group_law.hpp"

namespace hgr {

/// Tolerance on |[v_i, v_j]| for a frame to count as spanning a subgroup.
inline constexpr double kBracketTolerance = 1e-12;

/// A k-dimensional horizontal subgroup: an abelian subspace of the first layer H^1,
/// stored as an orthonormal frame (h1 x k) in first-layer coordinates.
class HorizontalSubgroup {
public:
    HorizontalSubgroup() = default;

    int k() const { return static_cast<int>(frame_.cols()); }
    int h1() const { return static_cast<int>(frame_.rows()); }
    int dim() const { return q_; }
    const Eigen::MatrixXd& frame() const { return frame_; }
    /// Orthogonal projector onto V_1 inside H^1.
    const Eigen::MatrixXd& projector() const { return projector_; }
    /// Orthonormal basis of V_1^perp inside H^1 (h1 x (h1 - k)).
    const Eigen::MatrixXd& complement_frame() const { return perp_; }
    double bracket_residual() const { return residual_; }

    /// Frame vector i embedded in the group coordinates.
    GroupElement vector(int i) const
    {
        GroupElement v(q_);
        for (int r = 0; r < h1(); ++r) v[r] = frame_(r, i);
        return v;
    }

    /// The element sum_i a_i v_i.
    GroupElement point(const double* a) const
    {
        GroupElement v(q_);
        for (int r = 0; r < h1(); ++r) {
            double s = 0.0;
            for (int i = 0; i < k(); ++i) s += frame_(r, i) * a[i];
            v[r] = s;
        }
        return v;
    }

    /// Frame coordinates of the first-layer part of p, i.e. F^T p_1.
    Eigen::VectorXd coordinates(const GroupElement& p) const
    {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(k());
        for (int i = 0; i < k(); ++i)
            for (int r = 0; r < h1(); ++r) out[i] += frame_(r, i) * p[r];
        return out;
    }

    friend HorizontalSubgroup make_horizontal(const GradedAlgebra& algebra, const std::vector<GroupElement>& vectors);

private:
    int q_ = 0;
    Eigen::MatrixXd frame_;
    Eigen::MatrixXd projector_;
    Eigen::MatrixXd perp_;
    double residual_ = 0.0;
};

/// The vertical complement V^perp = V_1^perp (+) H^2 (+) ... (+) H^step, of dimension q - k.
struct VerticalComplement {
    const HorizontalSubgroup* owner = nullptr;
    int dim = 0;

    /// The element with V_1^perp coordinates c[0..h1-k) and higher-layer coordinates after that.
    GroupElement point(const double* c) const
    {
        const auto& perp = owner->complement_frame();
        const int h1 = owner->h1(), m = static_cast<int>(perp.cols());
        GroupElement w(owner->dim());
        for (int r = 0; r < h1; ++r) {
            double s = 0.0;
            for (int i = 0; i < m; ++i) s += perp(r, i) * c[i];
            w[r] = s;
        }
        for (int i = h1; i < owner->dim(); ++i) w[i] = c[m + i - h1];
        return w;
    }

    /// Inverse of point() for elements of V^perp.
    std::vector<double> coordinates(const GroupElement& w) const
    {
        const auto& perp = owner->complement_frame();
        const int h1 = owner->h1(), m = static_cast<int>(perp.cols());
        std::vector<double> c(static_cast<std::size_t>(dim), 0.0);
        for (int i = 0; i < m; ++i)
            for (int r = 0; r < h1; ++r) c[static_cast<std::size_t>(i)] += perp(r, i) * w[r];
        for (int i = h1; i < owner->dim(); ++i) c[static_cast<std::size_t>(m + i - h1)] = w[i];
        return c;
    }
};

inline VerticalComplement vertical_complement(const HorizontalSubgroup& v)
{
    return {&v, v.dim() - v.k()};
}

namespace detail {

/// Matrix of the linear map u -> [a, u] restricted to first-layer u, rows over all coordinates.
inline Eigen::MatrixXd bracket_matrix(const GradedAlgebra& alg, const Eigen::VectorXd& a)
{
    const int h1 = alg.layer_dim(1);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(alg.dim(), h1);
    for (const auto& e : alg.brackets()) {
        if (e.i >= h1 || e.j >= h1) continue;
        const double c = e.coef.to_double();
        m(e.m, e.j) += c * a[e.i];
        m(e.m, e.i) -= c * a[e.j];
    }
    return m;
}

inline double frame_bracket_residual(const GradedAlgebra& alg, const Eigen::MatrixXd& frame)
{
    const int h1 = static_cast<int>(frame.rows());
    double worst = 0.0;
    for (int i = 0; i < frame.cols(); ++i)
        for (int j = i + 1; j < frame.cols(); ++j) {
            GroupElement a(alg.dim()), b(alg.dim());
            for (int r = 0; r < h1; ++r) {
                a[r] = frame(r, i);
                b[r] = frame(r, j);
            }
            worst = std::max(worst, euclidean_norm(alg.bracket(a, b)));
        }
    return worst;
}

} // namespace detail

/// Builds a horizontal subgroup from spanning vectors given in full group coordinates.
/// Throws NotInFirstLayer, DegenerateFrame, or NotAbelian.
inline HorizontalSubgroup make_horizontal(const GradedAlgebra& algebra, const std::vector<GroupElement>& vectors)
{
    const int h1 = algebra.layer_dim(1);
    if (vectors.empty() || static_cast<int>(vectors.size()) > h1)
        throw Error(ErrorKind::DegenerateFrame, "a horizontal frame needs between 1 and h1 vectors");
    Eigen::MatrixXd a(h1, static_cast<int>(vectors.size()));
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        algebra.check_element(vectors[i]);
        for (int r = h1; r < algebra.dim(); ++r)
            if (std::abs(vectors[i][r]) > kBracketTolerance)
                throw Error(ErrorKind::NotInFirstLayer,
                            "frame vector " + std::to_string(i + 1) + " has a component on e" + std::to_string(r + 1));
        for (int r = 0; r < h1; ++r) a(r, static_cast<int>(i)) = vectors[i][r];
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    const double scale = a.norm();
    for (int i = 0; i < a.cols(); ++i)
        if (!(std::abs(r(i, i)) > 1e-10 * scale))
            throw Error(ErrorKind::DegenerateFrame, "frame vectors are linearly dependent");
    Eigen::MatrixXd q = qr.householderQ();
    HorizontalSubgroup v;
    v.q_ = algebra.dim();
    v.frame_ = q.leftCols(a.cols());
    // Fix signs so the frame is a continuous function of the input.
    for (int i = 0; i < a.cols(); ++i)
        if (r(i, i) < 0) v.frame_.col(i) *= -1.0;
    v.perp_ = q.rightCols(h1 - a.cols());
    v.projector_ = v.frame_ * v.frame_.transpose();
    v.residual_ = detail::frame_bracket_residual(algebra, v.frame_);
    if (v.residual_ > kBracketTolerance)
        throw Error(ErrorKind::NotAbelian, "span is not a subgroup: bracket residual " + std::to_string(v.residual_));
    return v;
}

/// Grows an isotropic frame greedily: each new vector is a random unit vector in the
/// common null space of the brackets with the current frame, orthogonal to it.
/// Stops at `target` vectors or when no further vector exists.
inline std::vector<Eigen::VectorXd> grow_isotropic_frame(const GradedAlgebra& alg, int target, std::mt19937_64& rng,
                                                         std::optional<Eigen::VectorXd> first = std::nullopt)
{
    const int h1 = alg.layer_dim(1);
    std::normal_distribution<double> g;
    std::vector<Eigen::VectorXd> frame;
    while (static_cast<int>(frame.size()) < target) {
        Eigen::MatrixXd basis; // columns span the admissible directions
        if (frame.empty()) {
            basis = Eigen::MatrixXd::Identity(h1, h1);
        } else {
            Eigen::MatrixXd c(0, h1);
            for (const auto& f : frame) {
                Eigen::MatrixXd b = detail::bracket_matrix(alg, f);
                Eigen::MatrixXd stacked(c.rows() + b.rows() + 1, h1);
                stacked << c, b, f.transpose();
                c = stacked;
            }
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
            const auto& sv = svd.singularValues();
            int rank = 0;
            for (int i = 0; i < sv.size(); ++i)
                if (sv[i] > 1e-10) ++rank;
            if (rank >= h1) break;
            basis = svd.matrixV().rightCols(h1 - rank);
        }
        Eigen::VectorXd v;
        if (frame.empty() && first) {
            v = *first;
        } else {
            Eigen::VectorXd coef(basis.cols());
            for (int i = 0; i < coef.size(); ++i) coef[i] = g(rng);
            v = basis * coef;
        }
        for (const auto& f : frame) v -= f.dot(v) * f;
        const double n = v.norm();
        if (!(n > 1e-12)) break;
        frame.push_back(v / n);
    }
    return frame;
}

inline std::vector<GroupElement> embed_frame(const GradedAlgebra& alg, const std::vector<Eigen::VectorXd>& frame)
{
    std::vector<GroupElement> out;
    for (const auto& f : frame) {
        GroupElement v(alg.dim());
        for (int r = 0; r < f.size(); ++r) v[r] = f[r];
        out.push_back(v);
    }
    return out;
}

/// Largest k for which the randomized isotropic search finds a horizontal k-subgroup.
/// Every returned value is witnessed by an explicit subgroup, so it is a lower bound for
/// the maximal dimension of a horizontal subgroup.
inline int upsilon_lower_bound(const GradedAlgebra& alg, int effort, std::uint64_t seed = 1)
{
    const int h1 = alg.layer_dim(1);
    std::mt19937_64 rng(seed);
    int best = 0;
    for (int t = 0; t < std::max(effort, 1) && best < h1; ++t) {
        std::optional<Eigen::VectorXd> first;
        if (t < h1) first = Eigen::VectorXd::Unit(h1, t);
        auto frame = grow_isotropic_frame(alg, h1, rng, first);
        if (static_cast<int>(frame.size()) > best) {
            make_horizontal(alg, embed_frame(alg, frame)); // witness check
            best = static_cast<int>(frame.size());
        }
    }
    return best;
}

/// A random horizontal k-subgroup; throws NoHorizontalSubgroup if none is found.
inline HorizontalSubgroup sample_horizontal(const GradedAlgebra& alg, int k, std::mt19937_64& rng, int effort = 64)
{
    if (k < 1 || k > alg.layer_dim(1))
        throw Error(ErrorKind::NoHorizontalSubgroup, "no horizontal subgroup of dimension " + std::to_string(k));
    for (int t = 0; t < effort; ++t) {
        auto frame = grow_isotropic_frame(alg, k, rng);
        if (static_cast<int>(frame.size()) == k) return make_horizontal(alg, embed_frame(alg, frame));
    }
    throw Error(ErrorKind::NoHorizontalSubgroup,
                "no horizontal subgroup of dimension " + std::to_string(k) + " found in '" + alg.name() + "'");
}

/// pi_V(p): orthogonal projection of the first-layer part onto V_1, zero elsewhere.
template <class T>
BasicElement<T> project_first_layer(const std::vector<std::vector<T>>& projector, const BasicElement<T>& p)
{
    const int h1 = static_cast<int>(projector.size());
    BasicElement<T> out(p.size());
    for (int r = 0; r < h1; ++r) {
        T s(0);
        for (int c = 0; c < h1; ++c) s += projector[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] * p[c];
        out[r] = s;
    }
    return out;
}

inline GroupElement project_h(const HorizontalSubgroup& v, const GroupElement& p)
{
    if (p.size() != v.dim()) throw Error(ErrorKind::DimensionMismatch, "element does not match the subgroup's algebra");
    GroupElement out(p.size());
    const auto& pr = v.projector();
    for (int r = 0; r < v.h1(); ++r) {
        double s = 0.0;
        for (int c = 0; c < v.h1(); ++c) s += pr(r, c) * p[c];
        out[r] = s;
    }
    return out;
}

/// pi_{V^perp}(p) = p * pi_V(p)^{-1}.
inline GroupElement project_v(const GroupLaw& law, const HorizontalSubgroup& v, const GroupElement& p)
{
    return law.product(p, law.inverse(project_h(v, p)));
}

/// pi_V(p)^{-1} pi_{V^perp}(p) pi_V(p), whose norm brackets d(p, V) in the distance estimates.
/// Since pi_{V^perp}(p) = p pi_V(p)^{-1}, this is pi_V(p)^{-1} p.
inline GroupElement conjugated_vertical(const GroupLaw& law, const HorizontalSubgroup& v, const GroupElement& p)
{
    return law.product(law.inverse(project_h(v, p)), p);
}

} // namespace hgr
