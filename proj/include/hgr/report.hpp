#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hgr/profile.hpp"

namespace hgr {

inline constexpr const char* kToolName = "hgr";
inline constexpr const char* kToolVersion = "0.1.0";

/// One recorded comparison. `passed` is recomputable from value, bound and relation.
struct Verdict {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    std::string relation = "<="; // "<=" or ">="
    bool passed = false;

    double slack() const { return relation == "<=" ? bound - value : value - bound; }
};

inline Verdict at_most(std::string name, double value, double bound)
{
    return {std::move(name), value, bound, "<=", value <= bound};
}

inline Verdict at_least(std::string name, double value, double bound)
{
    return {std::move(name), value, bound, ">=", value >= bound};
}

inline nlohmann::json to_json(const Verdict& v)
{
    return {{"name", v.name}, {"value", v.value}, {"bound", v.bound}, {"relation", v.relation}, {"slack", v.slack()}, {"passed", v.passed}};
}

/// Result of one command. Everything except `timestamps` is a function of the inputs.
struct Report {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json results = nlohmann::json::object();
    std::vector<Verdict> verdicts;
    nlohmann::json timestamps = nlohmann::json::object();

    bool passed() const
    {
        return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
    }
};

inline nlohmann::json to_json(const Report& r)
{
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto& v : r.verdicts) verdicts.push_back(to_json(v));
    return {{"tool", kToolName},       {"version", kToolVersion}, {"command", r.command},     {"config", r.config},
            {"results", r.results},    {"verdicts", verdicts},    {"passed", r.passed()},     {"timestamps", r.timestamps}};
}

/// The report without its timestamps; two runs with one config must agree on this byte for byte.
inline std::string deterministic_dump(nlohmann::json report)
{
    report.erase("timestamps");
    return report.dump(2);
}

inline std::string utc_now()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

/// Wall-clock stopwatch whose readings go into the timestamps field only.
class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()), started_(utc_now()) {}
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }
    nlohmann::json stamp() const { return {{"started", started_}, {"finished", utc_now()}, {"wall_seconds", seconds()}}; }

private:
    std::chrono::steady_clock::time_point start_;
    std::string started_;
};

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error(ErrorKind::IoError, "write to '" + path + "' failed");
}

namespace detail {

inline std::string fmt(double x)
{
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << std::setprecision(17) << x;
    return out.str();
}

} // namespace detail

/// CSV with header scale,excess,density,blowup_discrepancy. Statistics that were not
/// computed leave their cells empty.
inline std::string profile_csv(const DecayProfile& p)
{
    if (p.empty()) throw Error(ErrorKind::EmptyProfile, "profile has no scales");
    p.validate();
    std::string out = "scale,excess,density,blowup_discrepancy\n";
    for (std::size_t i = 0; i < p.scales.size(); ++i) {
        out += detail::fmt(p.scales[i]);
        for (const auto* v : {&p.excess, &p.density, &p.blowup}) {
            out += ',';
            if (!v->empty()) out += detail::fmt((*v)[i]);
        }
        out += '\n';
    }
    return out;
}

/// Log-log plot of the profile statistics against scale, one series per computed
/// statistic. Zero values have no logarithm and are left out of their series.
inline std::string profile_svg(const DecayProfile& p, const std::string& title = "decay profile")
{
    if (p.empty()) throw Error(ErrorKind::EmptyProfile, "profile has no scales");
    p.validate();
    struct Series {
        const char* name;
        const char* colour;
        const std::vector<double>* values;
    };
    const std::vector<Series> all{{"excess", "#1f77b4", &p.excess}, {"density", "#2ca02c", &p.density},
                                  {"blowup_discrepancy", "#d62728", &p.blowup}};
    double xlo = std::log10(p.scales.back()), xhi = std::log10(p.scales.front());
    double ylo = 1e300, yhi = -1e300;
    for (const auto& s : all)
        for (double v : *s.values)
            if (v > 0.0) {
                ylo = std::min(ylo, std::log10(v));
                yhi = std::max(yhi, std::log10(v));
            }
    if (ylo > yhi) ylo = yhi = 0.0;
    if (xhi - xlo < 1e-9) {
        xlo -= 0.5;
        xhi += 0.5;
    }
    if (yhi - ylo < 1e-9) {
        ylo -= 0.5;
        yhi += 0.5;
    }
    const double w = 640, h = 400, ml = 70, mr = 170, mt = 40, mb = 50;
    const auto px = [&](double lx) { return ml + (lx - xlo) / (xhi - xlo) * (w - ml - mr); };
    const auto py = [&](double ly) { return h - mb - (ly - ylo) / (yhi - ylo) * (h - mt - mb); };
    const auto esc = [](const std::string& s) {
        std::string o;
        for (char c : s) {
            if (c == '<') o += "&lt;";
            else if (c == '>') o += "&gt;";
            else if (c == '&') o += "&amp;";
            else o += c;
        }
        return o;
    };
    using detail::fmt;
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n"
        << "<text x=\"" << ml << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << esc(title) << "</text>\n"
        << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w - ml - mr << "\" height=\"" << h - mt - mb
        << "\" fill=\"none\" stroke=\"black\"/>\n"
        << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12 << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">log10 scale</text>\n"
        << "<text x=\"16\" y=\"" << (mt + h - mb) / 2 << "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
        << (mt + h - mb) / 2 << ")\" text-anchor=\"middle\">log10 value</text>\n";
    for (const auto& [lx, anchor] : {std::pair{xlo, "start"}, std::pair{xhi, "end"}})
        out << "<text x=\"" << px(lx) << "\" y=\"" << h - mb + 16 << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"" << anchor
            << "\">" << fmt(lx) << "</text>\n";
    for (double ly : {ylo, yhi})
        out << "<text x=\"" << ml - 4 << "\" y=\"" << py(ly) + 4 << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">"
            << fmt(ly) << "</text>\n";
    int row = 0;
    for (const auto& s : all) {
        if (s.values->empty()) continue;
        std::string pts;
        std::ostringstream marks;
        marks.imbue(std::locale::classic());
        for (std::size_t i = 0; i < p.scales.size(); ++i) {
            const double v = (*s.values)[i];
            if (!(v > 0.0)) continue;
            const double x = px(std::log10(p.scales[i])), y = py(std::log10(v));
            pts += fmt(x) + "," + fmt(y) + " ";
            marks << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3\" fill=\"" << s.colour << "\"/>\n";
        }
        out << "<g id=\"" << s.name << "\">\n";
        if (!pts.empty()) {
            pts.pop_back();
            out << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
        }
        out << marks.str() << "</g>\n";
        const double ly = mt + 16 + 18 * row++;
        out << "<line x1=\"" << w - mr + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << w - mr + 32 << "\" y2=\"" << ly - 4 << "\" stroke=\""
            << s.colour << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << w - mr + 38 << "\" y=\"" << ly << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

inline void plot_profile(const DecayProfile& p, const std::string& path, const std::string& title = "decay profile")
{
    write_text(path, profile_svg(p, title));
}

} // namespace hgr
