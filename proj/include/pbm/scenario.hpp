/// @file scenario.hpp
/// Declarative timed interventions, the scenario type, and its plain-text
/// file format.

#pragma once

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbm/model.hpp"

namespace pbm {

/// Raised for malformed scenario files and invalid configuration. Maps to
/// CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A timed change to either a parameter or a structural override.
struct Intervention {
    enum class Kind { SetParameter, SetOverride };
    double time = 0.0;
    Kind kind = Kind::SetParameter;
    std::string target;  ///< parameter name, or "demand_zero"/"potential_bandits_zero"
    double value = 0.0;  ///< for overrides: nonzero means on
};

namespace detail {

inline const std::map<std::string, double Parameters::*>& parameter_fields() {
    static const std::map<std::string, double Parameters::*> fields = {
        {"a_P", &Parameters::a_P},         {"theta_B", &Parameters::theta_B},
        {"theta_M", &Parameters::theta_M}, {"c_M", &Parameters::c_M},
        {"lambda_A", &Parameters::lambda_A}, {"tbar_M", &Parameters::tbar_M},
        {"tau", &Parameters::tau},         {"tau_B", &Parameters::tau_B},
        {"tau_M", &Parameters::tau_M},     {"N", &Parameters::N},
    };
    return fields;
}

inline bool is_override_name(const std::string& name) {
    return name == "demand_zero" || name == "potential_bandits_zero";
}

}  // namespace detail

/// Initial stock guess; fields left unset are filled in by the runner.
struct InitialGuess {
    std::optional<double> P, B, M, ihat_P, ihat_B;
};

/// A named run: starting parameters, optional initial guess, time-ordered
/// interventions and a horizon.
struct Scenario {
    std::string name = "scenario";
    Parameters initial_params;
    InitialGuess initial;
    std::vector<Intervention> interventions;
    double horizon = 300.0;

    /// Throws ConfigError on any structural problem (bad target, unsorted
    /// or out-of-range times, invalid parameter value).
    void validate() const {
        if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
        if (auto err = initial_params.validate()) {
            throw ConfigError("parameters: " + *err);
        }
        double prev = 0.0;
        for (const auto& iv : interventions) {
            if (iv.time < 0.0 || iv.time > horizon) {
                throw ConfigError("intervention time " + std::to_string(iv.time) +
                                  " outside [0, horizon]");
            }
            if (iv.time < prev) throw ConfigError("interventions not sorted by time");
            prev = iv.time;
            if (iv.kind == Intervention::Kind::SetParameter) {
                if (!detail::parameter_fields().count(iv.target)) {
                    throw ConfigError("unknown parameter '" + iv.target + "'");
                }
                Parameters probe = initial_params;
                probe.*(detail::parameter_fields().at(iv.target)) = iv.value;
                if (auto err = probe.validate()) {
                    throw ConfigError("intervention on " + iv.target + ": " + *err);
                }
            } else if (!detail::is_override_name(iv.target)) {
                throw ConfigError("unknown override '" + iv.target + "'");
            }
        }
    }
};

/// Applies every intervention with time <= t, in order. Later interventions
/// win for the same target. Overrides latch on; turning one off again is a
/// legal intervention but the built-in experiments never do it.
inline void apply_interventions(const Scenario& sc, double t, Parameters& params,
                                Overrides& ov) {
    for (const auto& iv : sc.interventions) {
        if (iv.time > t) break;
        if (iv.kind == Intervention::Kind::SetParameter) {
            params.*(detail::parameter_fields().at(iv.target)) = iv.value;
        } else if (iv.target == "demand_zero") {
            ov.demand_zero = iv.value != 0.0;
        } else {
            ov.potential_bandits_zero = iv.value != 0.0;
        }
    }
}

// ---------------------------------------------------------------------------
// Scenario file format
//
//   name base
//   horizon 300
//   [parameters]
//   a_P 10
//   ...
//   [initial]
//   P 107
//   ...
//   [interventions]
//   60 lambda_A 0
//   150 demand_zero on
//
// Blank lines and lines starting with '#' are ignored.
// ---------------------------------------------------------------------------

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline void dump_scenario(const Scenario& sc, std::ostream& out) {
    out << "name " << sc.name << "\n";
    out << "horizon " << format_number(sc.horizon) << "\n";
    out << "[parameters]\n";
    const Parameters& p = sc.initial_params;
    for (const auto& [key, member] : detail::parameter_fields()) {
        out << key << " " << format_number(p.*member) << "\n";
    }
    out << "[initial]\n";
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) out << key << " " << format_number(*v) << "\n";
    };
    put("P", sc.initial.P);
    put("B", sc.initial.B);
    put("M", sc.initial.M);
    put("ihat_P", sc.initial.ihat_P);
    put("ihat_B", sc.initial.ihat_B);
    out << "[interventions]\n";
    for (const auto& iv : sc.interventions) {
        out << format_number(iv.time) << " " << iv.target << " ";
        if (iv.kind == Intervention::Kind::SetOverride) {
            out << (iv.value != 0.0 ? "on" : "off");
        } else {
            out << format_number(iv.value);
        }
        out << "\n";
    }
}

inline Scenario parse_scenario(std::istream& in) {
    Scenario sc;
    std::string line;
    std::string section;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ConfigError("scenario line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        if (line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            if (section != "parameters" && section != "initial" &&
                section != "interventions") {
                fail("unknown section '" + section + "'");
            }
            continue;
        }
        std::istringstream fields(line);
        if (section.empty()) {
            std::string key;
            fields >> key;
            if (key == "name") {
                fields >> sc.name;
            } else if (key == "horizon") {
                if (!(fields >> sc.horizon)) fail("bad horizon");
            } else {
                fail("expected 'name' or 'horizon', got '" + key + "'");
            }
        } else if (section == "parameters") {
            std::string key;
            double value;
            if (!(fields >> key >> value)) fail("expected 'name value'");
            auto it = detail::parameter_fields().find(key);
            if (it == detail::parameter_fields().end()) {
                fail("unknown parameter '" + key + "'");
            }
            sc.initial_params.*(it->second) = value;
        } else if (section == "initial") {
            std::string key;
            double value;
            if (!(fields >> key >> value)) fail("expected 'name value'");
            if (key == "P") sc.initial.P = value;
            else if (key == "B") sc.initial.B = value;
            else if (key == "M") sc.initial.M = value;
            else if (key == "ihat_P") sc.initial.ihat_P = value;
            else if (key == "ihat_B") sc.initial.ihat_B = value;
            else fail("unknown initial field '" + key + "'");
        } else {
            Intervention iv;
            std::string target, value;
            if (!(fields >> iv.time >> target >> value)) {
                fail("expected 'time target value'");
            }
            iv.target = target;
            if (detail::is_override_name(target)) {
                iv.kind = Intervention::Kind::SetOverride;
                if (value == "on") iv.value = 1.0;
                else if (value == "off") iv.value = 0.0;
                else fail("override value must be 'on' or 'off'");
            } else {
                iv.kind = Intervention::Kind::SetParameter;
                try {
                    iv.value = std::stod(value);
                } catch (const std::exception&) {
                    fail("bad numeric value '" + value + "'");
                }
            }
            sc.interventions.push_back(iv);
        }
    }
    std::stable_sort(sc.interventions.begin(), sc.interventions.end(),
                     [](const Intervention& a, const Intervention& b) {
                         return a.time < b.time;
                     });
    sc.validate();
    return sc;
}

}  // namespace pbm
