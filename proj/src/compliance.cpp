#include "polcheck/compliance.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "polcheck/error.hpp"

namespace polcheck {

CurrentState parse_state(std::string_view text, const Ontology& onto) {
    DataSystem ds = parse_facts(text, onto);
    CurrentState s;
    for (const auto& a : ds.base_atoms) s.atoms.insert(a);
    for (const auto& o : ds.objects)
        for (const auto& [prop, val] : o.props) s.atoms.insert(Atom{prop, {Term::constant(o.id), Term::constant(val)}});
    s.assignments = ds.assignments;
    return s;
}

std::string to_string(ComplianceVerdict v) {
    switch (v) {
    case ComplianceVerdict::Compliant: return "compliant";
    case ComplianceVerdict::NonCompliant: return "non-compliant";
    case ComplianceVerdict::InconsistentInput: return "inconsistent-input";
    }
    return "?";
}

std::string to_string(ConflictCategory c) {
    switch (c) {
    case ConflictCategory::ModalAuthorizationViolation: return "modal-authorization-violation";
    case ConflictCategory::ObligationViolation: return "obligation-violation";
    case ConflictCategory::ResourceCapabilityConflict: return "resource-capability-conflict";
    case ConflictCategory::ModalCapabilityConflict: return "modal-capability-conflict";
    }
    return "?";
}

std::string Conflict::str() const {
    std::string out = to_string(category) + ":";
    for (std::size_t i = 0; i < witness.size(); ++i) out += (i ? ", " : " ") + witness[i].str();
    if (!rule_ids.empty()) {
        out += " [";
        for (std::size_t i = 0; i < rule_ids.size(); ++i) out += (i ? " " : "") + rule_ids[i];
        out += "]";
    }
    return out;
}

namespace {

class Entailment {
public:
    Entailment(const CurrentState& sigma, const DataSystem& ds, const Ontology& onto) : onto_(onto) {
        facts_ = base_facts(ds, onto);
        facts_.insert(sigma.atoms.begin(), sigma.atoms.end());
        for (const auto& a : facts_) known_.insert(a.predicate);
    }

    bool holds(const Formula& f) {
        check_known(f);
        Substitution s;
        return solve({&f}, s);
    }

private:
    void check_known(const Formula& f) const {
        if (f.kind == Formula::Kind::Atom) {
            const std::string& p = f.atom.predicate;
            static const std::set<std::string> builtin = {"type", "isa", "done", "over_AS", "over_AO"};
            if (!known_.count(p) && !builtin.count(p) && !onto_.family(p) && !onto_.property(p))
                throw EntailmentError("cannot decide " + f.atom.str() + ": unknown predicate '" + p + "'");
        }
        for (const auto& c : f.children) check_known(c);
    }

    bool solve(std::vector<const Formula*> goals, Substitution& s) {
        if (goals.empty()) return true;
        const Formula* g = goals.back();
        goals.pop_back();
        switch (g->kind) {
        case Formula::Kind::True: return solve(goals, s);
        case Formula::Kind::False: return false;
        case Formula::Kind::And:
            for (auto it = g->children.rbegin(); it != g->children.rend(); ++it) goals.push_back(&*it);
            return solve(goals, s);
        case Formula::Kind::Or:
            for (const auto& c : g->children) {
                auto next = goals;
                next.push_back(&c);
                Substitution saved = s;
                if (solve(next, s)) return true;
                s = std::move(saved);
            }
            return false;
        case Formula::Kind::Not: {
            Substitution inner = s;
            if (solve({&g->children.front()}, inner)) return false;
            return solve(goals, s);
        }
        case Formula::Kind::Atom: {
            Atom pattern = substitute(g->atom, s);
            for (const auto& f : facts_) {
                if (f.predicate != pattern.predicate) continue;
                Substitution ext = s;
                if (match(pattern, f, ext) && solve(goals, ext)) {
                    s = std::move(ext);
                    return true;
                }
            }
            return false;
        }
        }
        return false;
    }

    const Ontology& onto_;
    std::set<Atom> facts_;
    std::set<std::string> known_;
};

std::string strip(const std::string& v) { return !v.empty() && v[0] == '$' ? v.substr(1) : v; }

Formula effect_of(const Term& act, const Ontology& onto) {
    const ActionClassDef* def = onto.action(act.name());
    if (!def) return Formula::truth();
    Substitution s;
    for (const auto& [prop, v] : def->params)
        for (const auto& b : act.bindings())
            if (b.property == prop) s[strip(v)] = b.value;
    return substitute(def->effect, s);
}

Formula postcondition_of(const Term& q) {
    if (q.is_formula()) return q.as_formula();
    if (q.is_constant() && q.name() == "false") return Formula::falsity();
    return Formula::truth();
}

bool released(const Term& act, const CurrentState& sigma, const Ontology& onto) {
    const ActionClassDef* def = onto.action(act.name());
    if (!def || onto.variables().empty()) return false;
    State delta;
    for (const auto& v : onto.variables()) {
        auto it = sigma.assignments.find(v.name);
        if (it == sigma.assignments.end()) return false;
        delta.values[v.name] = it->second;
    }
    return !space_refines_state(def->init, delta, onto);
}

std::vector<std::string> rules_for(const Model& m, const Atom& a) {
    std::set<std::string> ids;
    auto it = m.provenance.find(a);
    if (it != m.provenance.end())
        for (const auto& d : it->second) ids.insert(d.rule_id);
    return {ids.begin(), ids.end()};
}

std::vector<std::string> merge(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

bool is_do(const Atom& a, char sign) {
    return a.predicate == "do" && a.args.size() == 3 && a.args[2].is_signed() && a.args[2].sign() == sign;
}

Atom flip(const Atom& a) {
    Atom out = a;
    out.args[2] = Term::signed_term(a.args[2].sign() == '+' ? '-' : '+', a.args[2].inner());
    return out;
}

std::vector<Atom> mustdo_atoms(const Model& m) { return decision_view(m).mustdo_atoms; }

}  // namespace

Satisfaction obligation_satisfied(const Atom& mustdo, const CurrentState& sigma, const DataSystem& ds,
                                  const Ontology& onto) {
    if (mustdo.predicate != "mustdo" || mustdo.args.size() != 3 || !is_ground(mustdo))
        throw EntailmentError("not a ground mustdo atom: " + mustdo.str());
    Satisfaction r;
    Entailment e(sigma, ds, onto);
    r.postcondition = e.holds(postcondition_of(mustdo.args[2]));
    r.effect = e.holds(effect_of(mustdo.args[1], onto));
    r.released = released(mustdo.args[1], sigma, onto);
    r.satisfied = r.released || (r.postcondition && r.effect);
    return r;
}

std::vector<Conflict> detect_modal_authorization_violation(const Model& high, const Model& low) {
    std::vector<Conflict> out;
    for (const auto& a : low.atoms) {
        if (!is_do(a, '+')) continue;
        Atom denied = flip(a);
        if (!high.contains(denied)) continue;
        out.push_back({ConflictCategory::ModalAuthorizationViolation, {a, denied},
                       merge(rules_for(low, a), rules_for(high, denied))});
    }
    return out;
}

std::vector<Conflict> detect_obligation_violation(const Model& high, const Model& low, const CurrentState& sigma,
                                                  const DataSystem& ds, const Ontology& onto) {
    std::vector<Conflict> out;
    for (const auto& m : mustdo_atoms(high)) {
        if (low.contains(m)) continue;
        if (obligation_satisfied(m, sigma, ds, onto).satisfied) continue;
        out.push_back({ConflictCategory::ObligationViolation, {m}, rules_for(high, m)});
    }
    return out;
}

std::vector<Conflict> detect_resource_capability_conflict(const Model& high, const DataSystem& ds) {
    std::vector<Conflict> out;
    for (const auto& m : mustdo_atoms(high)) {
        const Term& act = m.args[1];
        std::set<Term> resources;
        for (const auto& a : high.atoms)
            if (a.predicate == "resource" && a.args.size() == 2 && a.args[0] == act) resources.insert(a.args[1]);
        if (act.is_action())
            for (const auto& b : act.bindings())
                if (b.property == "resource") resources.insert(b.value);
        for (const auto& r : resources) {
            if (r.is_constant() && ds.object(r.name())) continue;
            out.push_back({ConflictCategory::ResourceCapabilityConflict, {m, Atom{"resource", {act, r}}},
                           rules_for(high, m)});
        }
    }
    return out;
}

std::vector<Conflict> detect_modal_capability_conflict(const Model& high, const Model& low) {
    std::vector<Conflict> out;
    for (const auto& m : mustdo_atoms(high)) {
        Atom exec{"do", {m.args[1], m.args[0], Term::signed_term('+', Term::constant("execute"))}};
        if (low.contains(exec)) continue;
        out.push_back({ConflictCategory::ModalCapabilityConflict, {m, exec}, rules_for(high, m)});
    }
    return out;
}

std::vector<Conflict> detect_missing_decisions(const Model& high, const Model& low) {
    std::vector<Conflict> out;
    for (const auto& a : high.atoms) {
        if (a.predicate != "do" || low.contains(a)) continue;
        bool negative = a.args.size() == 3 && a.args[2].is_signed() && a.args[2].sign() == '-';
        out.push_back({negative ? ConflictCategory::ModalAuthorizationViolation : ConflictCategory::ModalCapabilityConflict,
                       {a}, rules_for(high, a)});
    }
    return out;
}

namespace {

struct BranchOutcome {
    std::vector<Conflict> conflicts;
    std::vector<Atom> released;
    std::size_t met_by_low = 0;
};

// Missing-decision conflicts already witnessed by a detector of the same category are dropped.
void add_missing(std::vector<Conflict>& all, const std::vector<Conflict>& missing) {
    for (const auto& c : missing) {
        bool covered = std::any_of(all.begin(), all.end(), [&](const Conflict& x) {
            return x.category == c.category &&
                   std::find(x.witness.begin(), x.witness.end(), c.witness.front()) != x.witness.end();
        });
        if (!covered) all.push_back(c);
    }
}

BranchOutcome examine(const Model& high, const Model& low, const CurrentState& sigma, const DataSystem& ds,
                      const Ontology& onto) {
    BranchOutcome b;
    auto append = [&](std::vector<Conflict> cs) { b.conflicts.insert(b.conflicts.end(), cs.begin(), cs.end()); };
    append(detect_modal_authorization_violation(high, low));
    append(detect_obligation_violation(high, low, sigma, ds, onto));
    append(detect_resource_capability_conflict(high, ds));
    append(detect_modal_capability_conflict(high, low));
    add_missing(b.conflicts, detect_missing_decisions(high, low));
    for (const auto& m : decision_view(high).mustdo_atoms) {
        if (low.contains(m)) {
            ++b.met_by_low;
            continue;
        }
        if (obligation_satisfied(m, sigma, ds, onto).released) b.released.push_back(m);
    }
    return b;
}

std::set<Atom> view_facts(const DataSystem& ds, const Ontology& onto, const CurrentState& sigma) {
    std::set<Atom> facts = base_facts(ds, onto);
    facts.insert(sigma.atoms.begin(), sigma.atoms.end());
    return facts;
}

}  // namespace

ComplianceReport check_compliance(const Policy& high, const Policy& low, const DataSystem& ds,
                                  const PatternSet& patterns, const Ontology& onto, const CurrentState& sigma,
                                  const RefineOptions& opts) {
    ComplianceReport report;
    std::set<Atom> facts = view_facts(ds, onto, sigma);
    Model low_view = evaluate(low, facts);
    report.stats.atoms_derived += low_view.atoms.size() - low_view.facts.size();
    if (low_view.error_flag()) {
        report.verdict = ComplianceVerdict::InconsistentInput;
        report.messages.push_back("policy P_l is inconsistent: integrity rules derive error");
        return report;
    }
    RefinementResult refined = enumerate_refinements(high, patterns, onto, opts);
    report.messages = refined.warnings;
    report.stats.branches_total = refined.branches.size();
    std::optional<std::pair<std::size_t, BranchOutcome>> nearest;
    for (std::size_t i = 0; i < refined.branches.size(); ++i) {
        const auto& branch = refined.branches[i];
        Model high_view = evaluate(branch.policy, facts);
        ++report.stats.branches_examined;
        report.stats.atoms_derived += high_view.atoms.size() - high_view.facts.size();
        if (high_view.error_flag()) {
            report.verdict = ComplianceVerdict::InconsistentInput;
            report.messages.push_back("policy P_h is inconsistent: integrity rules derive error in branch " +
                                      std::to_string(i + 1));
            report.conflicts.clear();
            return report;
        }
        BranchOutcome outcome = examine(high_view, low_view, sigma, ds, onto);
        if (outcome.conflicts.empty()) {
            report.verdict = ComplianceVerdict::Compliant;
            report.matched_branch = branch.choice_log;
            report.released = outcome.released;
            report.stats.obligations_met_by_low = outcome.met_by_low;
            return report;
        }
        if (!nearest || outcome.conflicts.size() < nearest->second.conflicts.size())
            nearest = std::make_pair(i, std::move(outcome));
    }
    report.verdict = ComplianceVerdict::NonCompliant;
    if (nearest) {
        report.nearest_branch = refined.branches[nearest->first].choice_log;
        report.conflicts = nearest->second.conflicts;
        report.released = nearest->second.released;
        report.stats.obligations_met_by_low = nearest->second.met_by_low;
    }
    return report;
}

namespace {

std::string log_text(const std::vector<ChoiceEntry>& log) {
    if (log.empty()) return "(no choices)";
    std::string out;
    for (std::size_t i = 0; i < log.size(); ++i) out += (i ? "; " : "") + log[i].str();
    return out;
}

nlohmann::ordered_json log_json(const std::vector<ChoiceEntry>& log) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& e : log)
        out.push_back({{"rule", e.rule_id}, {"pattern", e.pattern_id}, {"node", e.node}, {"branch", e.branch}});
    return out;
}

}  // namespace

std::string ComplianceReport::to_text() const {
    std::ostringstream os;
    os << "verdict: " << to_string(verdict) << "\n";
    if (matched_branch) os << "matched branch: " << log_text(*matched_branch) << "\n";
    if (nearest_branch) os << "nearest branch: " << log_text(*nearest_branch) << "\n";
    for (const auto& c : conflicts) os << "conflict " << c.str() << "\n";
    for (const auto& a : released) os << "released " << a.str() << "\n";
    for (const auto& m : messages) os << "note: " << m << "\n";
    os << "branches examined: " << stats.branches_examined << " of " << stats.branches_total << "\n";
    os << "atoms derived: " << stats.atoms_derived << "\n";
    if (stats.obligations_met_by_low)
        os << "obligations accepted from the low view: " << stats.obligations_met_by_low << "\n";
    return os.str();
}

std::string ComplianceReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["verdict"] = to_string(verdict);
    j["matched_branch"] = matched_branch ? log_json(*matched_branch) : nlohmann::ordered_json();
    j["nearest_branch"] = nearest_branch ? log_json(*nearest_branch) : nlohmann::ordered_json();
    j["conflicts"] = nlohmann::ordered_json::array();
    for (const auto& c : conflicts) {
        nlohmann::ordered_json w = nlohmann::ordered_json::array();
        for (const auto& a : c.witness) w.push_back(a.str());
        j["conflicts"].push_back({{"category", to_string(c.category)}, {"witness", w}, {"rule_ids", c.rule_ids}});
    }
    j["released"] = nlohmann::ordered_json::array();
    for (const auto& a : released) j["released"].push_back(a.str());
    j["messages"] = messages;
    j["stats"] = {{"branches_examined", stats.branches_examined},
                  {"branches_total", stats.branches_total},
                  {"atoms_derived", stats.atoms_derived},
                  {"obligations_met_by_low", stats.obligations_met_by_low}};
    return j.dump(2) + "\n";
}

}  // namespace polcheck
