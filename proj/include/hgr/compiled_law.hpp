#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hgr/group_law.hpp"
#include "hgr/rational.hpp"

namespace hgr {

/// Sparse multivariate polynomial with exact rational coefficients.
/// Variables 0..q-1 are the x-coordinates, q..2q-1 the y-coordinates.
class Polynomial {
public:
    using Exponents = std::vector<std::uint8_t>;

    Polynomial() = default;
    Polynomial(std::int64_t c) : Polynomial(Rational(c)) {} // NOLINT(google-explicit-constructor)
    explicit Polynomial(const Rational& c)
    {
        if (!c.is_zero()) terms_[{}] = c;
    }
    static Polynomial variable(int index)
    {
        Polynomial p;
        Exponents e(static_cast<std::size_t>(index) + 1, 0);
        e[static_cast<std::size_t>(index)] = 1;
        p.terms_[e] = Rational(1);
        return p;
    }

    const std::map<Exponents, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Polynomial& operator+=(const Polynomial& o)
    {
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o)
    {
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    Polynomial operator-() const
    {
        Polynomial r;
        for (const auto& [e, c] : terms_) r.terms_[e] = -c;
        return r;
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        Polynomial r;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Exponents e(std::max(ea.size(), eb.size()), 0);
                for (std::size_t i = 0; i < ea.size(); ++i) e[i] += ea[i];
                for (std::size_t i = 0; i < eb.size(); ++i) e[i] += eb[i];
                r.add_term(e, ca * cb);
            }
        return r;
    }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

private:
    void add_term(Exponents e, const Rational& c)
    {
        while (!e.empty() && e.back() == 0) e.pop_back();
        auto& slot = terms_[e];
        slot += c;
        if (slot.is_zero()) terms_.erase(e);
    }

    std::map<Exponents, Rational> terms_;
};

/// The product x*y expanded once into one polynomial per output coordinate.
class CompiledGroupLaw {
public:
    CompiledGroupLaw() = default;

    explicit CompiledGroupLaw(const GroupLaw& law) : dim_(law.dim()), weights_(law.algebra().weights())
    {
        BasicElement<Polynomial> x(dim_), y(dim_);
        for (int i = 0; i < dim_; ++i) {
            x[i] = Polynomial::variable(i);
            y[i] = Polynomial::variable(dim_ + i);
        }
        auto xy = law.product(x, y);
        for (int m = 0; m < dim_; ++m) {
            polys_.push_back(xy[m]);
            Flat flat;
            for (const auto& [e, c] : xy[m].terms()) {
                flat.coef.push_back(c.to_double());
                std::vector<int> vars;
                for (std::size_t v = 0; v < e.size(); ++v)
                    for (int p = 0; p < e[v]; ++p) vars.push_back(static_cast<int>(v));
                flat.start.push_back(static_cast<int>(flat.vars.size()));
                flat.vars.insert(flat.vars.end(), vars.begin(), vars.end());
            }
            flat.start.push_back(static_cast<int>(flat.vars.size()));
            flat_.push_back(std::move(flat));
        }
    }

    int dim() const { return dim_; }
    const Polynomial& coordinate(int m) const { return polys_[static_cast<std::size_t>(m)]; }

    template <class T>
    BasicElement<T> eval(const BasicElement<T>& x, const BasicElement<T>& y) const
    {
        if (x.size() != dim_ || y.size() != dim_)
            throw Error(ErrorKind::DimensionMismatch, "operands do not match the compiled law");
        std::array<T, 2 * kMaxDim> v;
        for (int i = 0; i < dim_; ++i) {
            v[static_cast<std::size_t>(i)] = x[i];
            v[static_cast<std::size_t>(dim_ + i)] = y[i];
        }
        BasicElement<T> out(dim_);
        for (int m = 0; m < dim_; ++m) {
            const auto& f = flat_[static_cast<std::size_t>(m)];
            if constexpr (std::is_floating_point_v<T>) {
                T acc = 0;
                for (std::size_t t = 0; t < f.coef.size(); ++t) {
                    T term = static_cast<T>(f.coef[t]);
                    for (int k = f.start[t]; k < f.start[t + 1]; ++k) term *= v[static_cast<std::size_t>(f.vars[static_cast<std::size_t>(k)])];
                    acc += term;
                }
                out[m] = acc;
            } else {
                T acc(0);
                std::size_t t = 0;
                for (const auto& [e, c] : polys_[static_cast<std::size_t>(m)].terms()) {
                    T term(c);
                    for (int k = f.start[t]; k < f.start[t + 1]; ++k) term *= v[static_cast<std::size_t>(f.vars[static_cast<std::size_t>(k)])];
                    acc += term;
                    ++t;
                }
                out[m] = acc;
            }
        }
        return out;
    }

    /// Weighted degree of every monomial of coordinate m (variable i and q+i carry weight w_i).
    /// Returns -1 if the coordinate is zero, -2 if it mixes degrees.
    int weighted_degree(int m) const
    {
        int deg = -1;
        for (const auto& [e, c] : polys_[static_cast<std::size_t>(m)].terms()) {
            int d = 0;
            for (std::size_t v = 0; v < e.size(); ++v)
                d += e[v] * weights_[v % static_cast<std::size_t>(dim_)];
            if (deg == -1)
                deg = d;
            else if (deg != d)
                return -2;
        }
        return deg;
    }

    /// True when every output coordinate of weight w is homogeneous of weighted degree w.
    bool grading_consistent() const
    {
        for (int m = 0; m < dim_; ++m)
            if (weighted_degree(m) != weights_[static_cast<std::size_t>(m)]) return false;
        return true;
    }

    /// Substitutes y = -x symbolically; the product must vanish identically.
    bool inverse_identity_exact() const
    {
        for (int m = 0; m < dim_; ++m) {
            std::map<Polynomial::Exponents, Rational> acc;
            for (const auto& [e, c] : polys_[static_cast<std::size_t>(m)].terms()) {
                Polynomial::Exponents folded(static_cast<std::size_t>(dim_), 0);
                int sign = 1;
                for (std::size_t v = 0; v < e.size(); ++v) {
                    const std::size_t i = v % static_cast<std::size_t>(dim_);
                    folded[i] = static_cast<std::uint8_t>(folded[i] + e[v]);
                    if (v >= static_cast<std::size_t>(dim_) && e[v] % 2 == 1) sign = -sign;
                }
                acc[folded] += sign > 0 ? c : -c;
            }
            for (const auto& [e, c] : acc)
                if (!c.is_zero()) return false;
        }
        return true;
    }

    /// Max |compiled - direct| over random pairs with coordinates in [-scale, scale].
    double max_disagreement(const GroupLaw& law, int pairs, std::uint64_t seed, double scale = 1.0) const
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-scale, scale);
        double worst = 0.0;
        for (int n = 0; n < pairs; ++n) {
            GroupElement x(dim_), y(dim_);
            for (int i = 0; i < dim_; ++i) {
                x[i] = u(rng);
                y[i] = u(rng);
            }
            worst = std::max(worst, max_abs(eval(x, y) - law.product(x, y)));
        }
        return worst;
    }

    /// Human-readable form of coordinate m, e.g. "x3 + y3 + 1/2*x1*y2 - 1/2*x2*y1".
    std::string to_string(int m) const
    {
        std::vector<std::pair<Polynomial::Exponents, Rational>> terms(polys_[static_cast<std::size_t>(m)].terms().begin(),
                                                                     polys_[static_cast<std::size_t>(m)].terms().end());
        auto degree = [](const Polynomial::Exponents& e) {
            int d = 0;
            for (auto v : e) d += v;
            return d;
        };
        std::stable_sort(terms.begin(), terms.end(), [&](const auto& a, const auto& b) {
            if (degree(a.first) != degree(b.first)) return degree(a.first) < degree(b.first);
            return b.first < a.first;
        });
        std::string s;
        for (const auto& [e, c] : terms) {
            Rational mag = c < Rational(0) ? -c : c;
            s += s.empty() ? (c < Rational(0) ? "-" : "") : (c < Rational(0) ? " - " : " + ");
            std::string mono;
            for (std::size_t v = 0; v < e.size(); ++v)
                for (int p = 0; p < e[v]; ++p) {
                    if (!mono.empty()) mono += "*";
                    const bool is_y = v >= static_cast<std::size_t>(dim_);
                    mono += (is_y ? "y" : "x") + std::to_string(v % static_cast<std::size_t>(dim_) + 1);
                }
            if (mono.empty())
                s += mag.str();
            else if (mag == Rational(1))
                s += mono;
            else
                s += mag.str() + "*" + mono;
        }
        return s.empty() ? "0" : s;
    }

private:
    struct Flat {
        std::vector<double> coef;
        std::vector<int> start;
        std::vector<int> vars;
    };

    int dim_ = 0;
    std::vector<int> weights_;
    std::vector<Polynomial> polys_;
    std::vector<Flat> flat_;
};

inline CompiledGroupLaw compile_group_law(const GroupLaw& law) { return CompiledGroupLaw(law); }

} // namespace hgr
