#pragma once

#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <type_traits>
#include <vector>

#include "hgr/element.hpp"
#include "hgr/error.hpp"
#include "hgr/rational.hpp"

namespace hgr {

/// One structure constant c^m_{ij}: [e_i, e_j] has coefficient `coef` on e_m. Indices are 0-based.
struct BracketEntry {
    int i = 0;
    int j = 0;
    int m = 0;
    Rational coef;
};

/// A graded nilpotent Lie algebra in a graded basis e_1..e_q.
///
/// Only entries with i < j are stored; the table is antisymmetric by construction once
/// validated. Weights are the layer index of each basis vector (1-based layers).
class GradedAlgebra {
public:
    GradedAlgebra() = default;

    /// Validates and builds the algebra. Entries may list (i,j) and/or (j,i); when both are
    /// present they must be negatives of each other.
    static GradedAlgebra create(std::string name, std::vector<int> layer_dims, const std::vector<BracketEntry>& entries);

    const std::string& name() const { return name_; }
    int step() const { return static_cast<int>(layers_.size()); }
    int dim() const { return dim_; }
    const std::vector<int>& layer_dims() const { return layers_; }
    int layer_dim(int layer) const { return layers_[static_cast<std::size_t>(layer - 1)]; }
    /// First basis index of layer `layer` (1-based layer, 0-based index).
    int layer_offset(int layer) const { return offsets_[static_cast<std::size_t>(layer - 1)]; }
    int weight(int index) const { return weights_[static_cast<std::size_t>(index)]; }
    const std::vector<int>& weights() const { return weights_; }
    int homogeneous_dim() const
    {
        int q = 0;
        for (std::size_t j = 0; j < layers_.size(); ++j) q += static_cast<int>(j + 1) * layers_[j];
        return q;
    }
    /// Upper-triangular (i < j) nonzero structure constants.
    const std::vector<BracketEntry>& brackets() const { return entries_; }
    bool is_abelian() const { return entries_.empty(); }

    GroupElement zero() const { return GroupElement(dim_); }

    /// Lie bracket [x, y] in coordinates, for any scalar type with ring operations.
    template <class T>
    BasicElement<T> bracket(const BasicElement<T>& x, const BasicElement<T>& y) const
    {
        BasicElement<T> r(dim_);
        for (std::size_t n = 0; n < entries_.size(); ++n) {
            const auto& e = entries_[n];
            r[e.m] += coef_as<T>(n) * (x[e.i] * y[e.j] - x[e.j] * y[e.i]);
        }
        return r;
    }

    /// Raw form of bracket() for the double-precision hot path: out = [x, y], length dim().
    void bracket_into(const double* x, const double* y, double* out) const
    {
        for (int m = 0; m < dim_; ++m) out[m] = 0.0;
        for (std::size_t n = 0; n < entries_.size(); ++n) {
            const auto& e = entries_[n];
            out[e.m] += coef_double_[n] * (x[e.i] * y[e.j] - x[e.j] * y[e.i]);
        }
    }

    void check_element(const GroupElement& x) const
    {
        if (x.size() != dim_)
            throw Error(ErrorKind::DimensionMismatch,
                        "element of dimension " + std::to_string(x.size()) + " used with algebra '" + name_ +
                            "' of dimension " + std::to_string(dim_));
    }

private:
    template <class T>
    T coef_as(std::size_t n) const
    {
        if constexpr (!std::is_floating_point_v<T>)
            return T(entries_[n].coef);
        else
            return static_cast<T>(coef_double_[n]);
    }

    std::string name_;
    std::vector<int> layers_;
    std::vector<int> offsets_;
    std::vector<int> weights_;
    std::vector<BracketEntry> entries_;
    std::vector<double> coef_double_;
    int dim_ = 0;
};

inline GradedAlgebra GradedAlgebra::create(std::string name, std::vector<int> layer_dims,
                                           const std::vector<BracketEntry>& entries)
{
    GradedAlgebra a;
    a.name_ = std::move(name);
    if (layer_dims.empty()) throw Error(ErrorKind::ParseError, "algebra needs at least one layer");
    for (int h : layer_dims)
        if (h <= 0) throw Error(ErrorKind::ParseError, "layer dimensions must be positive");
    a.layers_ = std::move(layer_dims);
    for (std::size_t j = 0; j < a.layers_.size(); ++j) {
        a.offsets_.push_back(a.dim_);
        for (int k = 0; k < a.layers_[j]; ++k) a.weights_.push_back(static_cast<int>(j + 1));
        a.dim_ += a.layers_[j];
    }
    if (a.dim_ > kMaxDim) throw Error(ErrorKind::ParseError, "dimension exceeds " + std::to_string(kMaxDim));

    const int q = a.dim_;
    auto label = [](int i, int j, int m) {
        return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," + std::to_string(m + 1) + ")";
    };

    // Collect the full antisymmetric table from whatever orientation was listed.
    std::map<std::tuple<int, int, int>, Rational> listed;
    for (const auto& e : entries) {
        if (e.i < 0 || e.j < 0 || e.m < 0 || e.i >= q || e.j >= q || e.m >= q)
            throw Error(ErrorKind::ParseError, "bracket index out of range at " + label(e.i, e.j, e.m));
        if (e.i == e.j) {
            if (!e.coef.is_zero())
                throw Error(ErrorKind::AntisymmetryViolation,
                            "[e" + std::to_string(e.i + 1) + ",e" + std::to_string(e.i + 1) + "] must vanish, entry " +
                                label(e.i, e.j, e.m));
            continue;
        }
        auto key = std::make_tuple(e.i, e.j, e.m);
        if (auto it = listed.find(key); it != listed.end() && !(it->second == e.coef))
            throw Error(ErrorKind::ParseError, "conflicting duplicate entry " + label(e.i, e.j, e.m));
        listed[key] = e.coef;
    }
    std::map<std::tuple<int, int, int>, Rational> upper;
    for (const auto& [key, c] : listed) {
        auto [i, j, m] = key;
        if (auto it = listed.find(std::make_tuple(j, i, m)); it != listed.end() && !(it->second == -c))
            throw Error(ErrorKind::AntisymmetryViolation,
                        "c" + label(i, j, m) + " = " + c.str() + " but c" + label(j, i, m) + " = " + it->second.str());
        if (i < j)
            upper[key] = c;
        else
            upper[std::make_tuple(j, i, m)] = -c;
    }

    for (const auto& [key, c] : upper) {
        if (c.is_zero()) continue;
        auto [i, j, m] = key;
        if (a.weights_[m] != a.weights_[i] + a.weights_[j])
            throw Error(ErrorKind::GradingViolation,
                        "[e" + std::to_string(i + 1) + ",e" + std::to_string(j + 1) + "] has a component on e" +
                            std::to_string(m + 1) + " of weight " + std::to_string(a.weights_[m]) + " != " +
                            std::to_string(a.weights_[i]) + "+" + std::to_string(a.weights_[j]));
        a.entries_.push_back({i, j, m, c});
        a.coef_double_.push_back(c.to_double());
    }

    // Jacobi identity, exactly, on every basis triple.
    auto basis = [&](int i) {
        BasicElement<Rational> e(q);
        e[i] = Rational(1);
        return e;
    };
    for (int i = 0; i < q; ++i)
        for (int j = i + 1; j < q; ++j)
            for (int k = j + 1; k < q; ++k) {
                auto ei = basis(i), ej = basis(j), ek = basis(k);
                auto jac = a.bracket(ei, a.bracket(ej, ek)) + a.bracket(ej, a.bracket(ek, ei)) +
                           a.bracket(ek, a.bracket(ei, ej));
                if (!jac.is_zero())
                    throw Error(ErrorKind::JacobiViolation, "Jacobi identity fails on basis triple (" +
                                                                std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                                                "," + std::to_string(k + 1) + ")");
            }
    return a;
}

} // namespace hgr
