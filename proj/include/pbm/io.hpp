/// @file io.hpp
/// Deterministic serialization of trajectories and reports: CSV, JSON and
/// static SVG line charts. All numbers are rendered with 9 significant
/// digits via the C locale, so identical runs give identical bytes.

#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "pbm/equilibrium.hpp"
#include "pbm/experiments.hpp"
#include "pbm/integrate.hpp"
#include "pbm/loops.hpp"

namespace pbm {

inline constexpr const char* kCsvHeader =
    "t,P,B,M,Y,F,pi,R_B,T_B,I_B,i_B,T_P,I_P,i_P,ihat_P,ihat_B,attractiveness,"
    "B_star,W,L,l,p_M,D_M,m_B,lambda_M,lawlessness,integrity";

namespace detail {

inline std::array<double, 27> sample_row(const Sample& s) {
    const StockState& st = s.state;
    const AuxiliaryValues& a = s.aux;
    return {s.t,    st.P,   st.B,   st.M,   a.Y,    a.F,    a.pi,
            a.R_B,  a.T_B,  a.I_B,  a.i_B,  a.T_P,  a.I_P,  a.i_P,
            st.ihat_P, st.ihat_B, a.attractiveness, a.B_star, a.W, a.L, a.l,
            a.p_M,  a.D_M,  a.m_B,  a.lambda_M, a.lawlessness, a.integrity};
}

}  // namespace detail

inline void write_csv(const Trajectory& traj, std::ostream& out) {
    out << kCsvHeader << "\n";
    for (const auto& s : traj.samples) {
        auto row = detail::sample_row(s);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            out << format_number(row[i]);
        }
        out << "\n";
    }
}

/// Same data as the CSV, as one JSON document: {"columns": [...],
/// "samples": [[...], ...]}. Column order mirrors the CSV.
inline void write_json(const Trajectory& traj, std::ostream& out) {
    out << "{\n  \"columns\": [";
    std::string header = kCsvHeader;
    std::size_t pos = 0;
    bool first = true;
    while (pos != std::string::npos) {
        std::size_t comma = header.find(',', pos);
        std::string col = header.substr(pos, comma == std::string::npos
                                                 ? std::string::npos
                                                 : comma - pos);
        if (!first) out << ", ";
        out << "\"" << col << "\"";
        first = false;
        pos = comma == std::string::npos ? comma : comma + 1;
    }
    out << "],\n  \"samples\": [\n";
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        auto row = detail::sample_row(traj.samples[i]);
        out << "    [";
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ", ";
            out << format_number(row[j]);
        }
        out << "]" << (i + 1 < traj.samples.size() ? "," : "") << "\n";
    }
    out << "  ]\n}\n";
}

namespace detail {

inline void polyline(std::ostream& out, const Trajectory& traj,
                     double (*get)(const Sample&), double y_top, double y_height,
                     double y_max, const char* color) {
    double t_max = traj.samples.back().t;
    out << "  <polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& s : traj.samples) {
        double x = 60.0 + 700.0 * (t_max > 0.0 ? s.t / t_max : 0.0);
        double v = std::clamp(get(s) / y_max, 0.0, 1.0);
        double y = y_top + y_height * (1.0 - v);
        out << format_number(x) << "," << format_number(y) << " ";
    }
    out << "\"/>\n";
}

inline void chart_frame(std::ostream& out, double y_top, double y_height,
                        const char* title) {
    out << "  <rect x=\"60\" y=\"" << format_number(y_top)
        << "\" width=\"700\" height=\"" << format_number(y_height)
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "  <text x=\"60\" y=\"" << format_number(y_top - 6.0)
        << "\" font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
}

}  // namespace detail

/// Two stacked line charts: population fractions (P, B, M over N) and the
/// lawlessness/integrity indices versus time.
inline void write_svg(const Trajectory& traj, std::ostream& out) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"560\" "
           "viewBox=\"0 0 800 560\">\n";
    if (!traj.samples.empty()) {
        detail::chart_frame(out, 30.0, 220.0, "Population fractions: P (green), B (red), M (black)");
        detail::polyline(out, traj, +[](const Sample& s) { return s.state.P / s.params.N; },
                         30.0, 220.0, 1.0, "#2a8a2a");
        detail::polyline(out, traj, +[](const Sample& s) { return s.state.B / s.params.N; },
                         30.0, 220.0, 1.0, "#c03030");
        detail::polyline(out, traj, +[](const Sample& s) { return s.state.M / s.params.N; },
                         30.0, 220.0, 1.0, "#202020");
        detail::chart_frame(out, 310.0, 220.0, "Indices: lawlessness (red), economic integrity (blue)");
        detail::polyline(out, traj, +[](const Sample& s) { return s.aux.lawlessness; },
                         310.0, 220.0, 1.0, "#c03030");
        detail::polyline(out, traj, +[](const Sample& s) { return s.aux.integrity; },
                         310.0, 220.0, 1.0, "#3050c0");
    }
    out << "</svg>\n";
}

inline void write_signs(const std::string& name, const OutcomeSigns& signs,
                        std::ostream& out) {
    out << name << "\tP:" << sign_label(signs.peasants) << "\tB:"
        << sign_label(signs.bandits) << "\tM:" << sign_label(signs.mafia)
        << "\tlawlessness:" << sign_label(signs.lawlessness) << "\tintegrity:"
        << sign_label(signs.integrity) << "\n";
}

inline void write_equilibrium_report(const FixedPointResult& fp, std::ostream& out) {
    out << "converged " << (fp.converged ? "yes" : "no") << "\n"
        << "max_residual " << format_number(fp.max_residual) << "\n"
        << "horizon_used " << format_number(fp.horizon_used) << "\n"
        << "P " << format_number(fp.state.P) << "\n"
        << "B " << format_number(fp.state.B) << "\n"
        << "M " << format_number(fp.state.M) << "\n"
        << "ihat_P " << format_number(fp.state.ihat_P) << "\n"
        << "ihat_B " << format_number(fp.state.ihat_B) << "\n";
}

inline void write_loop_report(const SignedDigraph& g, std::ostream& out) {
    NamedLoopReport named = find_named_loops(g);
    for (const auto& loop : named.loops) {
        out << loop.name << " ";
        if (!loop.found) {
            out << "MISSING (broken edge " << loop.broken_edge << ")";
        } else {
            out << (loop.actual_polarity > 0 ? "reinforcing" : "balancing") << " "
                << (loop.actual_polarity == loop.expected_polarity ? "ok" : "POLARITY MISMATCH");
            out << " [";
            for (std::size_t i = 0; i < loop.chain.size(); ++i) {
                if (i) out << " -> ";
                out << loop.chain[i];
            }
            out << "]";
        }
        out << "\n";
    }
    auto all = enumerate_loops(g);
    auto through_mafia = enumerate_loops(g, std::string("Mafia"));
    out << "total_elementary_circuits " << all.size() << "\n";
    out << "circuits_through_Mafia " << through_mafia.size()
        << " (diagram-level published count: 21; granularity differs)\n";
}

}  // namespace pbm
