#include "polcheck/policy.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace polcheck {

PredicateKind predicate_kind(const std::string& p) {
    static const std::map<std::string, PredicateKind> m = {
        {"done", PredicateKind::Done},
        {"over_AS", PredicateKind::Over},
        {"over_AO", PredicateKind::Over},
        {"hasObligation", PredicateKind::HasObligation},
        {"hasDispensation", PredicateKind::HasDispensation},
        {"derhasDispensation", PredicateKind::DerhasDispensation},
        {"derhasObligation", PredicateKind::DerhasObligation},
        {"mustdo", PredicateKind::Mustdo},
        {"cando", PredicateKind::Cando},
        {"dercando", PredicateKind::Dercando},
        {"do", PredicateKind::Do},
        {"error", PredicateKind::Error}};
    auto it = m.find(p);
    return it == m.end() ? PredicateKind::Base : it->second;
}

std::string to_string(PredicateKind k) {
    switch (k) {
    case PredicateKind::Base: return "hie/rel";
    case PredicateKind::Done: return "done";
    case PredicateKind::Over: return "over";
    case PredicateKind::HasObligation: return "hasObligation";
    case PredicateKind::HasDispensation: return "hasDispensation";
    case PredicateKind::DerhasDispensation: return "derhasDispensation";
    case PredicateKind::DerhasObligation: return "derhasObligation";
    case PredicateKind::Mustdo: return "mustdo";
    case PredicateKind::Cando: return "cando";
    case PredicateKind::Dercando: return "dercando";
    case PredicateKind::Do: return "do";
    case PredicateKind::Error: return "error";
    }
    return {};
}

std::string Literal::str() const { return (positive ? "" : "!") + atom.str(); }

RuleGroup Rule::group() const {
    switch (kind()) {
    case PredicateKind::HasObligation:
    case PredicateKind::HasDispensation: return RuleGroup::H;
    case PredicateKind::Cando:
    case PredicateKind::Dercando:
    case PredicateKind::Do: return RuleGroup::A;
    default: return RuleGroup::M;
    }
}

std::string Rule::str() const {
    std::string out = "@" + id + " " + head.str();
    for (std::size_t i = 0; i < body.size(); ++i) out += (i ? " & " : " :- ") + body[i].str();
    return out + ".";
}

std::vector<const Rule*> Policy::group(RuleGroup g) const {
    std::vector<const Rule*> out;
    for (const auto& r : rules)
        if (r.group() == g) out.push_back(&r);
    return out;
}

const Rule* Policy::find(const std::string& id) const {
    for (const auto& r : rules)
        if (r.id == id) return &r;
    return nullptr;
}

namespace {

std::string quoted(const std::string& v) {
    bool plain = !v.empty() && std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
    return plain && std::isalpha(static_cast<unsigned char>(v[0])) ? v : "\"" + v + "\"";
}

}  // namespace

std::string Policy::str() const {
    std::string out;
    if (!scope.empty()) {
        out += "scope ";
        for (std::size_t i = 0; i < scope.size(); ++i) out += (i ? ", " : "") + quoted(scope[i]);
        out += ".\n";
    }
    if (!environment.empty()) {
        out += "env ";
        bool first = true;
        for (const auto& [k, v] : environment) {
            out += (first ? "" : ", ") + k + " = " + quoted(v);
            first = false;
        }
        out += ".\n";
    }
    for (const auto& r : rules) out += r.str() + "\n";
    return out;
}

namespace {

bool is_negative_do_default(const Rule& r) {
    if (r.body.size() != 1) return false;
    const Literal& l = r.body.front();
    if (l.positive || l.atom.predicate != "do" || l.atom.args.size() != 3) return false;
    const Term& h = r.head.args[2];
    const Term& b = l.atom.args[2];
    return b.is_signed() && b.sign() == '+' && h.inner() == b.inner() && l.atom.args[0] == r.head.args[0] &&
           l.atom.args[1] == r.head.args[1];
}

bool negative_head(const Atom& a) {
    return a.predicate == "do" && a.args.size() == 3 && a.args[2].is_signed() && a.args[2].sign() == '-';
}

using Kinds = std::set<PredicateKind>;

const Kinds& allowed_body(int row) {
    using K = PredicateKind;
    static const std::map<int, Kinds> m = {
        {1, {K::Done, K::Base}},
        {2, {K::HasObligation, K::HasDispensation, K::DerhasDispensation, K::Over, K::Done, K::Base}},
        {3, {K::HasObligation, K::HasDispensation, K::DerhasObligation, K::DerhasDispensation, K::Over, K::Done,
             K::Base}},
        {4, {K::HasObligation, K::DerhasObligation, K::HasDispensation, K::DerhasDispensation, K::Done, K::Base}},
        {5, {K::Mustdo, K::Done, K::Base}},
        {6, {K::Mustdo, K::Cando, K::Dercando, K::Done, K::Base}},
        {7, {K::Cando, K::Dercando, K::Done, K::Base}},
        {8, {K::Do}},
        {9, {K::Mustdo, K::HasObligation, K::DerhasObligation, K::HasDispensation, K::DerhasDispensation, K::Do,
             K::Cando, K::Dercando, K::Done, K::Base}}};
    static const Kinds none;
    auto it = m.find(row);
    return it == m.end() ? none : it->second;
}

// Predicates that must occur positively in the body of their own row.
std::optional<PredicateKind> must_be_positive(int row) {
    switch (row) {
    case 2: return PredicateKind::DerhasDispensation;
    case 3: return PredicateKind::DerhasObligation;
    case 6: return PredicateKind::Dercando;
    default: return std::nullopt;
    }
}

}  // namespace

int rule_stratum(const Rule& r) {
    if (r.kind() == PredicateKind::Do) return negative_head(r.head) && is_negative_do_default(r) ? 8 : 7;
    return atom_stratum(r.head);
}

int atom_stratum(const Atom& a) {
    switch (predicate_kind(a.predicate)) {
    case PredicateKind::Base:
    case PredicateKind::Done:
    case PredicateKind::Over: return 0;
    case PredicateKind::HasObligation:
    case PredicateKind::HasDispensation: return 1;
    case PredicateKind::DerhasDispensation: return 2;
    case PredicateKind::DerhasObligation: return 3;
    case PredicateKind::Mustdo: return 4;
    case PredicateKind::Cando: return 5;
    case PredicateKind::Dercando: return 6;
    case PredicateKind::Do: return negative_head(a) ? 8 : 7;
    case PredicateKind::Error: return 9;
    }
    return 0;
}

std::vector<StratificationViolation> check_stratification(const Policy& p) {
    std::vector<StratificationViolation> out;
    for (const auto& r : p.rules) {
        int row = rule_stratum(r);
        auto report = [&](const std::string& lit, const std::string& msg) {
            StratificationViolation v{r.id, row, lit, msg, {}};
            for (auto k : allowed_body(row)) v.allowed.push_back(to_string(k));
            out.push_back(std::move(v));
        };
        if (row == 0) {
            if (!r.body.empty()) report(r.head.str(), "row 0 predicates are base relations and take no rules");
            continue;
        }
        const Kinds& allowed = allowed_body(row);
        for (const auto& lit : r.body) {
            PredicateKind k = predicate_kind(lit.atom.predicate);
            if (!allowed.count(k)) {
                report(lit.str(), "row " + std::to_string(row) + " (" + r.head.predicate + ") body may not contain " +
                                      to_string(k) + " literals");
            } else if (!lit.positive && must_be_positive(row) == k) {
                report(lit.str(), "row " + std::to_string(row) + ": " + to_string(k) + " literals in the body must be positive");
            }
        }
        if (row == 4) {
            std::set<std::string> head_vars, body_vars;
            collect_variables(r.head, head_vars);
            for (const auto& lit : r.body) collect_variables(lit.atom, body_vars, true);
            for (const auto& v : body_vars)
                if (!head_vars.count(v) && v[0] != '_')
                    report("$" + v, "row 4: body variable $" + v + " must also appear in the head");
        }
    }
    return out;
}

std::vector<SafetyViolation> check_safety(const Policy& p) {
    std::vector<SafetyViolation> out;
    for (const auto& r : p.rules) {
        // The closed default do(o,s,-a) :- !do(o,s,+a) ranges over requested authorizations.
        if (rule_stratum(r) == 8) continue;
        std::set<std::string> bound;
        for (const auto& lit : r.body)
            if (lit.positive) collect_variables(lit.atom, bound, true);
        std::set<std::string> head_vars;
        collect_variables(r.head, head_vars, true);
        for (const auto& v : head_vars)
            if (!bound.count(v))
                out.push_back({r.id, v, "head variable $" + v + " does not occur in a positive body literal"});
        for (const auto& lit : r.body) {
            if (lit.positive) continue;
            std::set<std::string> vars;
            collect_variables(lit.atom, vars, true);
            for (const auto& v : vars)
                if (!bound.count(v) && v[0] != '_')
                    out.push_back({r.id, v, "variable $" + v + " of negative literal " + lit.str() +
                                                " does not occur in a positive body literal"});
        }
    }
    return out;
}

std::vector<HighLevelViolation> validate_high_level(const Policy& p) {
    std::vector<HighLevelViolation> out;
    for (const auto& r : p.rules) {
        if (r.group() != RuleGroup::A) continue;
        const Term& a = r.head.args[2];
        if (!a.is_signed() || a.sign() == '+')
            out.push_back({r.id, "high-level policy authors positive authorization " + r.head.str()});
    }
    return out;
}

}  // namespace polcheck
