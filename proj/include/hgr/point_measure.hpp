#pragma once

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hgr/group.hpp"

namespace hgr {

enum class Provenance { Parametrized, SelfSimilar, External };

inline std::string to_string(Provenance p)
{
    switch (p) {
    case Provenance::Parametrized: return "parametrized";
    case Provenance::SelfSimilar: return "self-similar";
    case Provenance::External: return "external";
    }
    return "external";
}

inline Provenance parse_provenance(const std::string& s)
{
    if (s == "parametrized") return Provenance::Parametrized;
    if (s == "self-similar") return Provenance::SelfSimilar;
    if (s == "external") return Provenance::External;
    throw Error(ErrorKind::ParseError, "unknown provenance '" + s + "'");
}

/// Weighted point set standing in for H^k restricted to a set E.
///
/// `resolution` is the diameter of the piece of E each sample stands for (the sample
/// spacing for parametrized sets, the cell diameter for self-similar ones); 0 means
/// unknown, in which case estimators fall back to the nearest-neighbour spacing.
struct PointMeasure {
    std::shared_ptr<const GroupLaw> law;
    double k = 1.0;
    std::vector<GroupElement> points;
    std::vector<double> weights;
    Provenance provenance = Provenance::External;
    double resolution = 0.0;
    bool purely_unrectifiable = false;
    nlohmann::json metadata = nlohmann::json::object();

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    double total_mass() const
    {
        double m = 0.0;
        for (double w : weights) m += w;
        return m;
    }

    void validate() const
    {
        if (!law) throw Error(ErrorKind::ParseError, "point measure has no algebra");
        if (!(k > 0.0) || !std::isfinite(k)) throw Error(ErrorKind::ParseError, "dimension parameter k must be positive");
        if (points.size() != weights.size())
            throw Error(ErrorKind::ParseError, "point measure has " + std::to_string(points.size()) + " points but " +
                                                   std::to_string(weights.size()) + " weights");
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i].size() != law->dim())
                throw Error(ErrorKind::DimensionMismatch, "point " + std::to_string(i) + " has the wrong dimension");
            if (!all_finite(points[i])) throw Error(ErrorKind::ParseError, "point " + std::to_string(i) + " is not finite");
            if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
                throw Error(ErrorKind::ParseError, "weight " + std::to_string(i) + " must be positive and finite");
        }
        if (!std::isfinite(total_mass())) throw Error(ErrorKind::ParseError, "total mass is not finite");
    }

    /// Copy with every point dilated by r and every weight scaled by r^k.
    PointMeasure dilated(double r) const
    {
        PointMeasure out = *this;
        for (auto& p : out.points) p = law->dilate(r, p);
        for (auto& w : out.weights) w *= std::pow(r, k);
        out.resolution *= r;
        return out;
    }
};

inline nlohmann::json to_json(const PointMeasure& m)
{
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : m.points) pts.push_back(p.to_vector());
    return {{"algebra", to_json(m.law->algebra())},
            {"k", m.k},
            {"points", pts},
            {"weights", m.weights},
            {"provenance", to_string(m.provenance)},
            {"resolution", m.resolution},
            {"purely_unrectifiable", m.purely_unrectifiable},
            {"metadata", m.metadata}};
}

inline PointMeasure point_measure_from_json(const nlohmann::json& j)
{
    try {
        PointMeasure m;
        m.law = std::make_shared<const GroupLaw>(parse_group(j.at("algebra")).algebra);
        m.k = j.at("k").get<double>();
        for (const auto& p : j.at("points")) {
            const auto v = p.get<std::vector<double>>();
            GroupElement e(static_cast<int>(v.size()));
            for (std::size_t i = 0; i < v.size(); ++i) e[static_cast<int>(i)] = v[i];
            m.points.push_back(e);
        }
        m.weights = j.at("weights").get<std::vector<double>>();
        m.provenance = parse_provenance(j.value("provenance", std::string("external")));
        m.resolution = j.value("resolution", 0.0);
        m.purely_unrectifiable = j.value("purely_unrectifiable", false);
        if (j.contains("metadata")) m.metadata = j.at("metadata");
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("point measure: ") + e.what());
    }
}

inline void save_point_measure(const PointMeasure& m, const std::string& path)
{
    std::ofstream f(path);
    if (!f) throw Error(ErrorKind::IoError, path + ": cannot open for writing");
    f << to_json(m).dump() << '\n';
}

inline PointMeasure load_point_measure(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::IoError, path + ": cannot open");
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return point_measure_from_json(nlohmann::json::parse(ss.str()));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, path + ": " + e.what());
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

} // namespace hgr
