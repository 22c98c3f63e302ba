#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "hgr/error.hpp"

namespace hgr {

/// Largest topological dimension supported by the fixed-capacity coordinate storage.
inline constexpr int kMaxDim = 16;

/// Coordinates of a group element in a fixed graded basis (exponential coordinates of
/// the first kind). Storage is inline so group arithmetic never allocates.
template <class T>
class BasicElement {
public:
    BasicElement() = default;
    explicit BasicElement(int dim) : dim_(dim)
    {
        if (dim < 0 || dim > kMaxDim)
            throw Error(ErrorKind::DimensionMismatch, "dimension " + std::to_string(dim) + " outside [0, 16]");
        std::fill(c_.begin(), c_.begin() + dim, T(0));
    }
    // Only the live prefix is copied; entries past dim_ are never read.
    BasicElement(const BasicElement& o) : dim_(o.dim_) { std::copy(o.c_.begin(), o.c_.begin() + o.dim_, c_.begin()); }
    BasicElement& operator=(const BasicElement& o)
    {
        dim_ = o.dim_;
        std::copy(o.c_.begin(), o.c_.begin() + o.dim_, c_.begin());
        return *this;
    }
    BasicElement(std::initializer_list<T> values) : BasicElement(static_cast<int>(values.size()))
    {
        std::copy(values.begin(), values.end(), c_.begin());
    }
    static BasicElement from(std::span<const T> values)
    {
        BasicElement e(static_cast<int>(values.size()));
        std::copy(values.begin(), values.end(), e.c_.begin());
        return e;
    }

    int size() const { return dim_; }
    T& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
    const T& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
    std::span<const T> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }
    std::span<T> coords() { return {c_.data(), static_cast<std::size_t>(dim_)}; }
    std::vector<T> to_vector() const { return {c_.begin(), c_.begin() + dim_}; }

    BasicElement& operator+=(const BasicElement& o)
    {
        for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
        return *this;
    }
    BasicElement& operator-=(const BasicElement& o)
    {
        for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    BasicElement& operator*=(const T& s)
    {
        for (int i = 0; i < dim_; ++i) c_[i] *= s;
        return *this;
    }
    friend BasicElement operator+(BasicElement a, const BasicElement& b) { return a += b; }
    friend BasicElement operator-(BasicElement a, const BasicElement& b) { return a -= b; }
    friend BasicElement operator*(const T& s, BasicElement a) { return a *= s; }
    BasicElement operator-() const
    {
        BasicElement r(dim_);
        for (int i = 0; i < dim_; ++i) r.c_[i] = -c_[i];
        return r;
    }
    friend bool operator==(const BasicElement& a, const BasicElement& b)
    {
        if (a.dim_ != b.dim_) return false;
        for (int i = 0; i < a.dim_; ++i)
            if (!(a.c_[i] == b.c_[i])) return false;
        return true;
    }

    bool is_zero() const
    {
        for (int i = 0; i < dim_; ++i)
            if (!(c_[i] == T(0))) return false;
        return true;
    }

private:
    std::array<T, kMaxDim> c_;
    int dim_ = 0;
};

using GroupElement = BasicElement<double>;

inline double euclidean_norm(const GroupElement& x)
{
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i) s += x[i] * x[i];
    return std::sqrt(s);
}

inline double max_abs(const GroupElement& x)
{
    double m = 0.0;
    for (int i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

inline bool all_finite(const GroupElement& x)
{
    for (int i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i])) return false;
    return true;
}

} // namespace hgr
