#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <type_traits>
#include <vector>

#include "hgr/algebra.hpp"
#include "hgr/element.hpp"
#include "hgr/rational.hpp"

namespace hgr {

/// One term of the Dynkin series: coefficient times the right-nested bracket of `word`,
/// where word[0] is the outermost letter. Letters: 0 = x, 1 = y.
struct DynkinTerm {
    std::vector<int> word;
    Rational coef;
};

namespace detail {

inline Rational factorial(int n)
{
    Rational f(1);
    for (int i = 2; i <= n; ++i) f *= Rational(i);
    return f;
}

/// Dynkin's form of log(exp x exp y), truncated at total degree `order`, with words of
/// equal value merged. The innermost pair decides the sign convention: "..yx" is folded
/// into "..xy" with a sign flip, and words ending in a repeated letter are dropped.
inline std::vector<DynkinTerm> dynkin_series(int order)
{
    std::map<std::vector<int>, Rational> acc;
    // Enumerate n blocks (r_i, s_i), r_i + s_i >= 1, sum <= order.
    std::vector<std::pair<int, int>> blocks;
    std::function<void(int, int)> rec = [&](int n_left, int degree) {
        if (n_left == 0) {
            const int n = static_cast<int>(blocks.size());
            Rational c((n % 2 == 1) ? 1 : -1, n);
            Rational denom(degree);
            std::vector<int> word;
            for (auto [r, s] : blocks) {
                denom *= factorial(r) * factorial(s);
                word.insert(word.end(), static_cast<std::size_t>(r), 0);
                word.insert(word.end(), static_cast<std::size_t>(s), 1);
            }
            acc[word] += c / denom;
            return;
        }
        for (int r = 0; degree + r <= order; ++r)
            for (int s = 0; degree + r + s <= order; ++s) {
                if (r + s == 0) continue;
                blocks.emplace_back(r, s);
                rec(n_left - 1, degree + r + s);
                blocks.pop_back();
            }
    };
    for (int n = 1; n <= order; ++n) rec(n, 0);

    std::map<std::vector<int>, Rational> folded;
    for (const auto& [key, value] : acc) {
        std::vector<int> word = key;
        Rational c = value;
        const std::size_t len = word.size();
        if (len >= 2) {
            if (word[len - 1] == word[len - 2]) continue;
            if (word[len - 2] == 1) {
                std::swap(word[len - 1], word[len - 2]);
                c = -c;
            }
        }
        folded[word] += c;
    }
    std::vector<DynkinTerm> out;
    for (auto& [word, c] : folded)
        if (!c.is_zero()) out.push_back({word, c});
    return out;
}

} // namespace detail

/// The group law of a graded nilpotent algebra, realized by the Dynkin series truncated at
/// the step (exact by nilpotency). Terms sharing a bracket suffix are evaluated once through
/// a suffix trie.
class GroupLaw {
public:
    GroupLaw() = default;
    explicit GroupLaw(GradedAlgebra algebra) : algebra_(std::move(algebra))
    {
        terms_ = detail::dynkin_series(algebra_.step());
        build_trie();
    }

    const GradedAlgebra& algebra() const { return algebra_; }
    int dim() const { return algebra_.dim(); }
    const std::vector<DynkinTerm>& dynkin_terms() const { return terms_; }

    /// x * y in exponential coordinates.
    template <class T>
    BasicElement<T> product(const BasicElement<T>& x, const BasicElement<T>& y) const
    {
        if (x.size() != algebra_.dim() || y.size() != algebra_.dim())
            throw Error(ErrorKind::DimensionMismatch, "bch operands do not belong to algebra '" + algebra_.name() + "'");
        BasicElement<T> result = x + y;
        if (algebra_.is_abelian()) return result;
        if constexpr (std::is_same_v<T, double>) {
            const int q = algebra_.dim();
            double value[kMaxTrieNodes * kMaxDim];
            for (std::size_t n = 0; n < nodes_.size(); ++n) {
                const Node& node = nodes_[n];
                const double* letter = node.letter == 0 ? x.coords().data() : y.coords().data();
                double* out = value + n * kMaxDim;
                if (node.parent < 0) {
                    std::copy(letter, letter + q, out);
                    continue;
                }
                algebra_.bracket_into(letter, value + static_cast<std::size_t>(node.parent) * kMaxDim, out);
                if (node.term >= 0) {
                    const double c = term_coef_[static_cast<std::size_t>(node.term)];
                    for (int i = 0; i < q; ++i) result[i] += c * out[i];
                }
            }
            return result;
        }
        std::array<BasicElement<T>, kMaxTrieNodes> value;
        for (std::size_t n = 0; n < nodes_.size(); ++n) {
            const Node& node = nodes_[n];
            const BasicElement<T>& letter = node.letter == 0 ? x : y;
            if (node.parent < 0) {
                value[n] = letter;
                continue;
            }
            const auto& inner = value[static_cast<std::size_t>(node.parent)];
            value[n] = inner.is_zero() ? BasicElement<T>(algebra_.dim()) : algebra_.bracket(letter, inner);
            if (node.term >= 0) {
                BasicElement<T> contrib = value[n];
                if constexpr (!std::is_floating_point_v<T>)
                    contrib *= T(terms_[static_cast<std::size_t>(node.term)].coef);
                else
                    contrib *= static_cast<T>(term_coef_[static_cast<std::size_t>(node.term)]);
                result += contrib;
            }
        }
        return result;
    }

    template <class T>
    BasicElement<T> inverse(const BasicElement<T>& x) const
    {
        algebra_check(x.size());
        return -x;
    }

    /// delta_r: coordinate of weight w is scaled by r^w.
    GroupElement dilate(double r, const GroupElement& x) const
    {
        if (!(r > 0.0)) throw Error(ErrorKind::NonpositiveScale, "dilation factor must be positive");
        algebra_check(x.size());
        double pw[kMaxDim + 1];
        pw[0] = 1.0;
        for (int j = 1; j <= algebra_.step(); ++j) pw[j] = pw[j - 1] * r;
        GroupElement out(x.size());
        for (int i = 0; i < x.size(); ++i) out[i] = x[i] * pw[algebra_.weight(i)];
        return out;
    }

    /// Conjugation a^{-1} b a.
    GroupElement conjugate(const GroupElement& b, const GroupElement& a) const
    {
        return product(product(inverse(a), b), a);
    }

private:
    static constexpr std::size_t kMaxTrieNodes = 256;

    struct Node {
        int letter = 0;
        int parent = -1; // node holding the inner bracket
        int term = -1;   // index into terms_ if this node's word carries a coefficient
    };

    void algebra_check(int size) const
    {
        if (size != algebra_.dim())
            throw Error(ErrorKind::DimensionMismatch, "element does not belong to algebra '" + algebra_.name() + "'");
    }

    void build_trie()
    {
        // Key: reversed word prefix (innermost letter first). Parents precede children.
        std::map<std::vector<int>, int> index;
        auto node_for = [&](const std::vector<int>& rev) {
            for (std::size_t len = 1; len <= rev.size(); ++len) {
                std::vector<int> key(rev.begin(), rev.begin() + static_cast<long>(len));
                if (index.count(key)) continue;
                Node node;
                node.letter = key.back();
                if (len > 1) node.parent = index.at(std::vector<int>(key.begin(), key.end() - 1));
                index[key] = static_cast<int>(nodes_.size());
                nodes_.push_back(node);
            }
            return index.at(rev);
        };
        for (std::size_t t = 0; t < terms_.size(); ++t) {
            const auto& w = terms_[t].word;
            if (w.size() == 1) continue; // x + y handled directly
            std::vector<int> rev(w.rbegin(), w.rend());
            int n = node_for(rev);
            nodes_[static_cast<std::size_t>(n)].term = static_cast<int>(t);
        }
        for (const auto& t : terms_) term_coef_.push_back(t.coef.to_double());
        if (nodes_.size() > kMaxTrieNodes)
            throw Error(ErrorKind::ParseError, "step too large for the Dynkin evaluator");
    }

    GradedAlgebra algebra_;
    std::vector<DynkinTerm> terms_;
    std::vector<double> term_coef_;
    std::vector<Node> nodes_;
};

/// Group product x*y (truncated BCH / Dynkin series).
inline GroupElement bch(const GroupLaw& law, const GroupElement& x, const GroupElement& y)
{
    return law.product(x, y);
}

inline GroupElement inverse(const GroupElement& x) { return -x; }

inline GroupElement dilate(const GroupLaw& law, double r, const GroupElement& x) { return law.dilate(r, x); }

} // namespace hgr
