#include "polcheck/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "polcheck/compliance.hpp"
#include "polcheck/error.hpp"

namespace polcheck::cli {

namespace {

struct Config {
    std::string onto, facts, high, low, patterns, state, format = "text", out_dir, atom;
    std::size_t max_branches = 1024;
};

class InputError : public Error {
public:
    using Error::Error;
};

std::string read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool color() {
    const char* v = std::getenv("POLCHECK_COLOR");
    return v && std::string(v) == "1";
}

std::string paint(const std::string& text, bool good) {
    if (!color()) return text;
    return (good ? "\033[32m" : "\033[31m") + text + "\033[0m";
}

struct Loaded {
    Ontology onto;
    DataSystem ds;
    std::optional<Policy> high, low;
    PatternSet patterns;
    CurrentState state;
};

// Reads whatever the config names; errors carry the offending path.
Loaded load(const Config& c) {
    auto guarded = [](const std::string& path, auto&& fn) {
        try {
            return fn(read(path));
        } catch (const InputError&) {
            throw;
        } catch (const Error& e) {
            throw InputError(path + ": " + e.what());
        }
    };
    Loaded l;
    l.onto = guarded(c.onto, [](const std::string& t) { return parse_ontology(t); });
    if (!c.facts.empty()) l.ds = guarded(c.facts, [&](const std::string& t) { return parse_facts(t, l.onto); });
    if (!c.high.empty()) l.high = guarded(c.high, [&](const std::string& t) { return parse_policy(t, &l.onto); });
    if (!c.low.empty()) l.low = guarded(c.low, [&](const std::string& t) { return parse_policy(t, &l.onto); });
    if (!c.patterns.empty())
        l.patterns = guarded(c.patterns, [&](const std::string& t) { return parse_patterns(t, &l.onto); });
    if (!c.state.empty()) l.state = guarded(c.state, [&](const std::string& t) { return parse_state(t, l.onto); });
    return l;
}

RefineOptions refine_options(const Config& c) {
    RefineOptions o;
    o.max_branches = c.max_branches;
    return o;
}

std::set<Atom> view_facts(const Loaded& l) {
    std::set<Atom> facts = base_facts(l.ds, l.onto);
    facts.insert(l.state.atoms.begin(), l.state.atoms.end());
    return facts;
}

int cmd_validate(const Config& c, std::ostream& out) {
    int status = 0;
    auto report = [&](const std::string& path, const std::vector<std::string>& problems,
                      const std::vector<std::string>& notes = {}) {
        for (const auto& n : notes) out << path << ": note: " << n << "\n";
        for (const auto& p : problems) out << path << ": " << p << "\n";
        if (problems.empty()) out << path << ": ok\n";
        else status = 2;
    };
    auto attempt = [&](const std::string& path, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            report(path, {e.what()});
        }
    };
    std::optional<Ontology> onto;
    attempt(c.onto, [&] {
        onto = parse_ontology(read(c.onto));
        report(c.onto, {}, onto->warnings());
    });
    if (!onto) return 2;
    if (!c.facts.empty()) attempt(c.facts, [&] {
        parse_facts(read(c.facts), *onto);
        report(c.facts, {});
    });
    auto check_policy = [&](const std::string& path, bool high) {
        attempt(path, [&] {
            Policy p = parse_policy(read(path), &*onto);
            std::vector<std::string> problems;
            for (const auto& v : check_stratification(p)) {
                std::string allowed;
                for (const auto& a : v.allowed) allowed += (allowed.empty() ? "" : ", ") + a;
                problems.push_back("rule " + v.rule_id + ": " + v.message + " (literal " + v.literal + "; row " +
                                   std::to_string(v.row) + " allows " + allowed + ")");
            }
            if (high)
                for (const auto& v : validate_high_level(p)) problems.push_back("rule " + v.rule_id + ": " + v.message);
            report(path, problems);
        });
    };
    if (!c.high.empty()) check_policy(c.high, true);
    if (!c.low.empty()) check_policy(c.low, false);
    if (!c.patterns.empty()) attempt(c.patterns, [&] {
        PatternSet ps = parse_patterns(read(c.patterns), &*onto);
        std::vector<std::string> problems, notes;
        for (const auto& p : ps.patterns()) {
            Verdict v = check_well_formed_complex(p, *onto);
            for (const auto& x : v.violations) {
                if (x.constraint == "unlabeled-node") notes.push_back("pattern " + p.id + ": " + x.node + " is not checked (unlabeled)");
                else problems.push_back("pattern " + p.id + ": " + x.str());
            }
            for (const auto& w : v.warnings) notes.push_back("pattern " + p.id + ": " + w);
        }
        report(c.patterns, problems, notes);
    });
    return status;
}

std::string pad(std::size_t k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03zu", k);
    return buf;
}

int cmd_refine(const Config& c, std::ostream& out) {
    Loaded l = load(c);
    if (!l.high) throw InputError("refine needs --high");
    RefinementResult res = enumerate_refinements(*l.high, l.patterns, l.onto, refine_options(c));
    bool evaluate_views = !c.facts.empty();
    std::set<Atom> facts = evaluate_views ? view_facts(l) : std::set<Atom>{};
    if (!c.out_dir.empty()) std::filesystem::create_directories(c.out_dir);
    nlohmann::ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["warnings"] = res.warnings;
    j["branches"] = nlohmann::ordered_json::array();
    std::ostringstream text;
    for (const auto& w : res.warnings) text << "warning: " << w << "\n";
    for (std::size_t i = 0; i < res.branches.size(); ++i) {
        const auto& b = res.branches[i];
        std::string name = "branch-" + pad(i + 1);
        if (!c.out_dir.empty()) {
            std::ofstream(c.out_dir + "/" + name + ".pol") << b.policy.str();
            std::ofstream(c.out_dir + "/" + name + ".log") << b.log_str();
        }
        nlohmann::ordered_json jb;
        jb["name"] = name;
        jb["choice_log"] = nlohmann::ordered_json::array();
        for (const auto& e : b.choice_log) jb["choice_log"].push_back(e.str());
        text << name << ":";
        if (b.choice_log.empty()) text << " (no choices)";
        for (const auto& e : b.choice_log) text << " [" << e.str() << "]";
        text << "\n";
        if (c.out_dir.empty()) {
            std::string body = b.policy.str();
            std::istringstream lines(body);
            for (std::string line; std::getline(lines, line);) text << "  " << line << "\n";
            jb["policy"] = body;
        }
        if (evaluate_views) {
            DecisionView v = decision_view(evaluate(b.policy, facts));
            jb["mustdo"] = nlohmann::ordered_json::array();
            jb["do"] = nlohmann::ordered_json::array();
            for (const auto& a : v.mustdo_atoms) {
                text << "  => " << a.str() << "\n";
                jb["mustdo"].push_back(a.str());
            }
            for (const auto& a : v.do_atoms) jb["do"].push_back(a.str());
        }
        j["branches"].push_back(jb);
    }
    if (c.format == "json") out << j.dump(2) << "\n";
    else out << text.str();
    return 0;
}

int cmd_check(const Config& c, std::ostream& out, std::ostream& err) {
    Loaded l = load(c);
    if (!l.high || !l.low) throw InputError("check needs --high and --low");
    ComplianceReport r = check_compliance(*l.high, *l.low, l.ds, l.patterns, l.onto, l.state, refine_options(c));
    if (c.format == "json") {
        out << r.to_json();
    } else {
        std::string text = r.to_text();
        std::size_t eol = text.find('\n');
        out << paint(text.substr(0, eol), r.verdict == ComplianceVerdict::Compliant) << text.substr(eol);
    }
    if (r.verdict == ComplianceVerdict::InconsistentInput) {
        for (const auto& m : r.messages) err << "polcheck: " << m << "\n";
        return 2;
    }
    return r.verdict == ComplianceVerdict::Compliant ? 0 : 1;
}

int cmd_explain(const Config& c, std::ostream& out) {
    Atom target;
    try {
        target = parse_atom_text(c.atom);
    } catch (const Error& e) {
        throw InputError("cannot parse atom '" + c.atom + "': " + e.what());
    }
    Loaded l = load(c);
    std::set<Atom> facts = view_facts(l);
    if (l.low) {
        out << explain(evaluate(*l.low, facts), target);
        return 0;
    }
    if (!l.high) throw InputError("explain needs --high or --low");
    RefinementResult res = enumerate_refinements(*l.high, l.patterns, l.onto, refine_options(c));
    bool any = false;
    for (std::size_t i = 0; i < res.branches.size(); ++i) {
        Model m = evaluate(res.branches[i].policy, facts);
        if (!m.contains(target)) continue;
        if (res.branches.size() > 1) {
            out << (any ? "\n" : "") << "branch-" << pad(i + 1) << ":";
            for (const auto& e : res.branches[i].choice_log) out << " [" << e.str() << "]";
            out << "\n";
        }
        any = true;
        out << explain(m, target);
    }
    if (!any) out << "not derivable\n";
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Policy refinement and compliance checker", "polcheck"};
    app.require_subcommand(1);
    Config c;
    auto common = [&](CLI::App* sub, bool need_facts, bool need_high, bool need_low, bool need_patterns) {
        sub->add_option("--onto", c.onto, "Ontology file")->required();
        auto facts = sub->add_option("--facts", c.facts, "Data system file");
        auto high = sub->add_option("--high", c.high, "High-level policy");
        auto low = sub->add_option("--low", c.low, "Low-level policy");
        auto pats = sub->add_option("--patterns", c.patterns, "Refinement patterns");
        if (need_facts) facts->required();
        if (need_high) high->required();
        if (need_low) low->required();
        if (need_patterns) pats->required();
        sub->add_option("--state", c.state, "Current state file");
        sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--max-branches", c.max_branches, "Refinement branch limit")->check(CLI::PositiveNumber);
        sub->add_option("--out", c.out_dir, "Output directory for refine");
    };
    auto validate = app.add_subcommand("validate", "Check input files");
    common(validate, false, false, false, false);
    auto refine = app.add_subcommand("refine", "Enumerate refined high-level policies");
    common(refine, false, true, false, true);
    auto check = app.add_subcommand("check", "Check compliance of a low-level policy");
    common(check, true, true, true, true);
    auto explain_cmd = app.add_subcommand("explain", "Show how an atom is derived");
    common(explain_cmd, true, false, false, false);
    explain_cmd->add_option("atom", c.atom, "Ground atom")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    try {
        if (validate->parsed()) return cmd_validate(c, out);
        if (refine->parsed()) return cmd_refine(c, out);
        if (check->parsed()) return cmd_check(c, out, err);
        return cmd_explain(c, out);
    } catch (const std::exception& e) {
        err << "polcheck: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace polcheck::cli
