#pragma once

#include "wata/solver.hpp"

#include <json.hpp>

#include <string>

namespace wata {

inline const char* verdict_text(Verdict::Kind k, bool sat_style = false) {
    switch (k) {
        case Verdict::Kind::nonempty: return sat_style ? "SAT" : "NONEMPTY";
        case Verdict::Kind::empty: return sat_style ? "UNSAT" : "EMPTY";
        case Verdict::Kind::unknown: return "UNKNOWN";
    }
    return "UNKNOWN";
}

inline int verdict_exit_code(Verdict::Kind k) {
    switch (k) {
        case Verdict::Kind::nonempty: return 0;
        case Verdict::Kind::empty: return 1;
        case Verdict::Kind::unknown: return 2;
    }
    return 2;
}

inline nlohmann::ordered_json moves_json(const Automaton& a, const std::vector<Successor>& path) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [m, c] : path) arr.push_back({{"move", move_text(a, m)}, {"config", dump(a, c)}});
    return arr;
}

// Stable report layout: verdict, optional reason and witness, then stats.
inline nlohmann::ordered_json verdict_json(const Automaton& a, const Verdict& v, bool sat_style = false) {
    nlohmann::ordered_json j;
    j["verdict"] = verdict_text(v.kind, sat_style);
    if (!v.reason.empty()) j["reason"] = v.reason;
    if (v.witness)
        j["witness"] = {{"stem", moves_json(a, v.witness->stem)}, {"cycle", moves_json(a, v.witness->cycle)}};
    j["stats"] = {{"iterations", v.iterations},
                  {"generators_per_Z", v.generators_per_z},
                  {"nodes_explored", v.nodes_explored},
                  {"mode", v.mode == Mode::exact ? "exact" : "capped"},
                  {"exact", v.exact}};
    return j;
}

inline std::string verdict_plain(const Automaton& a, const Verdict& v, bool sat_style = false) {
    std::string s = verdict_text(v.kind, sat_style);
    if (!v.reason.empty()) s += " (" + v.reason + ")";
    s += "\n";
    if (v.witness) {
        s += "stem:\n";
        for (const auto& [m, c] : v.witness->stem) s += "  " + move_text(a, m) + " -> " + dump(a, c) + "\n";
        s += "cycle:\n";
        for (const auto& [m, c] : v.witness->cycle) s += "  " + move_text(a, m) + " -> " + dump(a, c) + "\n";
    }
    s += "iterations: " + std::to_string(v.iterations) + ", generators per Z:";
    for (auto g : v.generators_per_z) s += " " + std::to_string(g);
    if (v.generators_per_z.empty()) s += " none";
    s += ", nodes explored: " + std::to_string(v.nodes_explored);
    s += ", mode: " + std::string(v.mode == Mode::exact ? "exact" : "capped");
    s += v.exact ? ", fixpoint complete\n" : ", fixpoint incomplete\n";
    return s;
}

}  // namespace wata
