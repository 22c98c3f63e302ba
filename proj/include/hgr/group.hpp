#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hgr/compiled_law.hpp"
#include "hgr/norm.hpp"

namespace hgr {

/// Norm selection as read from a group file or the command line. Empty params mean "calibrate".
struct NormSpec {
    NormKind kind = NormKind::WeightedMax;
    std::vector<double> params;
};

/// Parsed contents of a group definition file.
struct GroupSpec {
    GradedAlgebra algebra;
    std::optional<NormSpec> norm;
};

/// Sample size used when certifying a norm's triangle inequality.
inline constexpr long kDefaultCalibrationSamples = 1000000;

/// An algebra together with its group law and a certified homogeneous norm.
class HomogeneousGroup {
public:
    HomogeneousGroup() = default;
    HomogeneousGroup(const GradedAlgebra& algebra, const NormSpec& spec, long samples = kDefaultCalibrationSamples,
                     std::uint64_t seed = 1)
        : law_(std::make_shared<const GroupLaw>(algebra))
    {
        if (spec.params.empty())
            norm_ = calibrate_norm(law_, spec.kind, samples, seed);
        else
            norm_ = certify_norm(HomogeneousNorm(law_, spec.kind, spec.params), samples, seed);
    }

    const GradedAlgebra& algebra() const { return law_->algebra(); }
    const GroupLaw& law() const { return *law_; }
    const HomogeneousNorm& norm() const { return norm_; }
    int dim() const { return law_->dim(); }
    int h1() const { return law_->algebra().layer_dim(1); }

    GroupElement mul(const GroupElement& x, const GroupElement& y) const { return law_->product(x, y); }
    GroupElement inv(const GroupElement& x) const { return law_->inverse(x); }
    GroupElement dilate(double r, const GroupElement& x) const { return law_->dilate(r, x); }
    double norm_of(const GroupElement& x) const { return norm_(x); }
    double dist(const GroupElement& x, const GroupElement& y) const { return norm_.dist(x, y); }

private:
    std::shared_ptr<const GroupLaw> law_;
    HomogeneousNorm norm_;
};

namespace detail {

inline Rational json_rational(const nlohmann::json& v)
{
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_number_float()) {
        // Re-read through the decimal text so 0.5 stays exactly 1/2.
        std::ostringstream os;
        os.precision(17);
        os << v.get<double>();
        return Rational::parse(os.str());
    }
    throw Error(ErrorKind::ParseError, "bracket coefficient must be a string or number");
}

} // namespace detail

/// Parses a group definition: {name, step, layers, brackets: [[i,j,m,coef]], norm: {kind, params}}.
/// Indices are 1-based; coefficients are parsed exactly.
inline GroupSpec parse_group(const nlohmann::json& j)
{
    try {
        GroupSpec out;
        const std::string name = j.value("name", std::string("unnamed"));
        std::vector<int> layers = j.at("layers").get<std::vector<int>>();
        if (j.contains("step") && j.at("step").get<int>() != static_cast<int>(layers.size()))
            throw Error(ErrorKind::ParseError, "step " + std::to_string(j.at("step").get<int>()) +
                                                   " does not match " + std::to_string(layers.size()) + " layers");
        std::vector<BracketEntry> entries;
        if (j.contains("brackets"))
            for (const auto& row : j.at("brackets")) {
                if (!row.is_array() || row.size() != 4)
                    throw Error(ErrorKind::ParseError, "bracket rows must be [i, j, m, coef]");
                entries.push_back({row[0].get<int>() - 1, row[1].get<int>() - 1, row[2].get<int>() - 1,
                                   detail::json_rational(row[3])});
            }
        out.algebra = GradedAlgebra::create(name, std::move(layers), entries);
        if (j.contains("norm")) {
            NormSpec ns;
            ns.kind = parse_norm_kind(j.at("norm").at("kind").get<std::string>());
            if (j.at("norm").contains("params")) ns.params = j.at("norm").at("params").get<std::vector<double>>();
            out.norm = ns;
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
}

inline GroupSpec load_group_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open group file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, path + ": " + e.what());
    }
    try {
        return parse_group(j);
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + std::string(e.what()));
    }
}

/// Validated algebra from a JSON text.
inline GradedAlgebra load_group(const std::string& json_text) { return parse_group(nlohmann::json::parse(json_text)).algebra; }

inline nlohmann::json to_json(const GradedAlgebra& a)
{
    nlohmann::json br = nlohmann::json::array();
    for (const auto& e : a.brackets()) br.push_back({e.i + 1, e.j + 1, e.m + 1, e.coef.str()});
    return {{"name", a.name()}, {"step", a.step()}, {"layers", a.layer_dims()}, {"brackets", br},
            {"homogeneous_dim", a.homogeneous_dim()}};
}

inline nlohmann::json to_json(const HomogeneousNorm& n)
{
    return {{"kind", to_string(n.kind())},
            {"params", n.params()},
            {"certified_margin", n.certified_margin()},
            {"certified_samples", n.certified_samples()}};
}

/// Built-in algebras used by tests, fixtures and the acceptance battery.
namespace groups {

inline GradedAlgebra abelian(int n)
{
    return GradedAlgebra::create("abelian" + std::to_string(n), {n}, {});
}

inline GradedAlgebra heisenberg()
{
    return GradedAlgebra::create("heisenberg", {2, 1}, {{0, 1, 2, Rational(1)}});
}

inline GradedAlgebra engel()
{
    return GradedAlgebra::create("engel", {2, 1, 1}, {{0, 1, 2, Rational(1)}, {0, 2, 3, Rational(1)}});
}

/// Heisenberg group with a 4-dimensional first layer: [e1,e2] = [e3,e4] = e5.
inline GradedAlgebra heisenberg5()
{
    return GradedAlgebra::create("heisenberg5", {4, 1}, {{0, 1, 4, Rational(1)}, {2, 3, 4, Rational(1)}});
}

} // namespace groups

} // namespace hgr
