#include "wata/wata.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace wata;

namespace {

enum Exit { kNonempty = 0, kEmpty = 1, kUnknown = 2, kUsage = 3, kOutOfClass = 4, kResource = 5 };

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Words separated by blanks or commas.
std::vector<std::string> split_words(std::string s) {
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

struct Options {
    std::string mode = "capped";
    std::uint64_t cap = 10000;
    int max_size = 8;
    int threads = 1;
    std::uint64_t seed = 0;
    bool json = false;
    std::string alphabet;

    SolverOptions solver() const {
        SolverOptions o;
        o.mode = mode == "exact" ? Mode::exact : Mode::capped;
        o.cap = cap;
        o.max_size = max_size;
        o.threads = threads;
        return o;
    }
};

void print_verdict(const Automaton& a, const Verdict& v, const Options& o, bool sat_style) {
    if (o.json)
        std::cout << verdict_json(a, v, sat_style).dump(2) << "\n";
    else
        std::cout << verdict_plain(a, v, sat_style);
}

int cmd_check(const std::string& path, const Options& o) {
    Automaton a = normalize(parse_automaton(slurp(path)));
    Verdict v = decide_emptiness(a, o.solver());
    print_verdict(a, v, o, false);
    return verdict_exit_code(v.kind);
}

std::vector<std::string> need_alphabet(const Options& o) {
    auto alpha = split_words(o.alphabet);
    if (alpha.empty()) throw CLI::ValidationError("--alphabet", "a non-empty alphabet is required");
    return alpha;
}

int cmd_sat(const std::string& text, const Options& o) {
    auto f = tptl::parse_formula(text);
    auto cls = tptl::classify(f);
    if (cls.kind == tptl::FragmentClass::Kind::rejected) {
        std::cerr << "error: " << cls.reason << "\n";
        return kOutOfClass;
    }
    Automaton a = tptl::compile(f, need_alphabet(o));
    Verdict v = decide_emptiness(a, o.solver());
    print_verdict(a, v, o, true);
    return verdict_exit_code(v.kind);
}

int cmd_translate(const std::string& text, const Options& o) {
    auto f = tptl::parse_formula(text);
    auto cls = tptl::classify(f);
    if (cls.kind == tptl::FragmentClass::Kind::rejected) {
        std::cerr << "error: " << cls.reason << "\n";
        return kOutOfClass;
    }
    auto tr = tptl::translate(f, need_alphabet(o));
    std::cout << "# " << tptl::text(*f) << "\n";
    for (std::size_t i = 0; i < tr.state_formulas.size(); ++i)
        std::cout << "# s" << i << " = " << tr.state_formulas[i] << "\n";
    std::cout << to_text(tr.automaton);
    return 0;
}

int cmd_run(const std::string& path, const std::string& word, const Options& o) {
    Automaton a = parse_automaton(slurp(path));
    TimedWord w = parse_timed_word(word, a.alphabet);
    std::set<ConcreteConfig> cur{{{a.initial, Rational(0)}}};
    Rational now(0);
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
    bool truncated = false;
    auto record = [&](const std::string& label) {
        std::vector<std::string> cs;
        for (const auto& p : cur) cs.push_back(concrete_text(a, p));
        if (o.json) {
            steps.push_back({{"event", label}, {"configs", cs}});
        } else {
            std::cout << label << ":\n";
            if (cs.empty()) std::cout << "  (all branches blocked)\n";
            for (const auto& c : cs) std::cout << "  " << c << "\n";
        }
    };
    record("start");
    for (const auto& ev : w) {
        std::set<ConcreteConfig> next;
        for (const auto& p : cur)
            for (auto& s : letter_successors(a, elapse(p, ev.time - now), ev.action)) {
                if (next.size() >= kDefaultBranchCap) {
                    truncated = true;
                    break;
                }
                next.insert(s);
            }
        cur = std::move(next);
        now = ev.time;
        record(a.alphabet[ev.action] + "@" + rational_text(ev.time));
    }
    if (o.json)
        std::cout << nlohmann::ordered_json{{"steps", steps}, {"truncated", truncated}}.dump(2) << "\n";
    else if (truncated)
        std::cout << "(branch cap reached; trace truncated)\n";
    return 0;
}

int cmd_encode(const std::string& path) {
    std::cout << to_text(encode(parse_counter_machine(slurp(path))));
    return 0;
}

int cmd_abstract(const std::string& path, const std::string& config, const std::string& move,
                 const Options& o) {
    Automaton a = normalize(parse_automaton(slurp(path)));
    RegionSystem sys(a);
    Configuration c = parse_configuration(a, config);
    std::optional<SigmaBarMove> only;
    if (!move.empty()) {
        only = parse_move(a, move);
        if (!only) throw CLI::ValidationError("--move", "unknown move '" + move + "'");
    }
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [m, s] : sys.all_successors(c)) {
        if (only && m != *only) continue;
        if (o.json)
            arr.push_back({{"move", move_text(a, m)}, {"config", dump(a, s)}});
        else
            std::cout << move_text(a, m) << " -> " << dump(a, s) << "\n";
    }
    if (o.json) std::cout << arr.dump(2) << "\n";
    return 0;
}

int cmd_random(const Options& o, const RandomAtaParams& p) {
    std::cout << to_text(random_ata(o.seed, p));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Emptiness checker for one-clock alternating timed automata with a weak (0,1) condition"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--mode", o.mode, "exact or capped")->check(CLI::IsMember({"exact", "capped"}));
    app.add_option("--cap", o.cap, "work units per enumeration in capped mode")->check(CLI::PositiveNumber);
    app.add_option("--max-size", o.max_size, "size bound of the lasso witness search")->check(CLI::PositiveNumber);
    app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "seed for the random generator");
    app.add_flag("--json", o.json, "machine-readable output");
    app.add_option("--alphabet", o.alphabet, "letters of a formula, e.g. \"a b c\" or a,b,c");

    std::string file, text, word, move;
    auto* check = app.add_subcommand("check", "decide emptiness of an automaton file");
    check->add_option("file", file)->required();
    auto* sat = app.add_subcommand("sat", "decide satisfiability of a formula");
    sat->add_option("formula", text)->required();
    auto* translate = app.add_subcommand("translate", "print the automaton of a formula");
    translate->add_option("formula", text)->required();
    auto* run = app.add_subcommand("run", "replay a timed word such as \"a@1/2 b@1\"");
    run->add_option("file", file)->required();
    run->add_option("word", word)->required();
    auto* enc = app.add_subcommand("encode-cm", "encode a counter machine file as an automaton");
    enc->add_option("file", file)->required();
    auto* abs = app.add_subcommand("abstract", "list the abstract successors of a configuration");
    abs->add_option("file", file)->required();
    abs->add_option("config", text, "e.g. \"[{q:I1}] inf={}\"")->required();
    abs->add_option("--move", move, "only this move, e.g. delay or delay,a");
    RandomAtaParams rp;
    auto* rnd = app.add_subcommand("random", "print a random weak (0,1) automaton");
    rnd->add_option("--states", rp.n_states)->check(CLI::Range(1, 3));
    rnd->add_option("--letters", rp.n_letters)->check(CLI::Range(1, 2));
    rnd->add_option("--dmax", rp.d_max)->check(CLI::Range(1, 2));
    rnd->add_option("--rank-bias", rp.rank1_bias)->check(CLI::Range(0.0, 1.0));
    app.fallthrough();
    for (auto* s : {check, sat, translate, run, enc, abs, rnd}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*check) return cmd_check(file, o);
        if (*sat) return cmd_sat(text, o);
        if (*translate) return cmd_translate(text, o);
        if (*run) return cmd_run(file, word, o);
        if (*enc) return cmd_encode(file);
        if (*abs) return cmd_abstract(file, text, move, o);
        if (*rnd) return cmd_random(o, rp);
    } catch (const OutOfClass& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kOutOfClass;
    } catch (const ResourceError& e) {
        std::cerr << "error: resource limit: " << e.what() << "\n";
        return kResource;
    } catch (const wata::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
