#include "polcheck/eval.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "polcheck/error.hpp"
#include "polcheck/ontology.hpp"

namespace polcheck {

namespace {

bool signed_predicate(const std::string& p) { return p == "cando" || p == "dercando" || p == "do"; }

// Dependency-graph nodes: predicate names, with cando/dercando/do split by sign.
std::vector<std::string> keys_of(const Atom& a) {
    if (!signed_predicate(a.predicate) || a.args.size() != 3) return {a.predicate};
    const Term& t = a.args[2];
    if (t.is_signed()) return {a.predicate + t.sign()};
    return {a.predicate + '+', a.predicate + '-'};
}

std::string key_of_ground(const Atom& a) { return keys_of(a).front(); }

// The closed default do(o,s,-a) :- !do(o,s,+a) draws its candidates from these keys.
const std::vector<std::string> kRequestKeys = {"cando+", "cando-", "dercando+", "dercando-", "do+"};

struct Index {
    std::map<std::string, std::vector<Atom>> by_key;
    std::set<Atom> all;

    bool add(const Atom& a) {
        if (!all.insert(a).second) return false;
        by_key[key_of_ground(a)].push_back(a);
        return true;
    }
    const std::vector<Atom>& get(const std::string& k) const {
        static const std::vector<Atom> none;
        auto it = by_key.find(k);
        return it == by_key.end() ? none : it->second;
    }
};

struct Graph {
    std::map<std::string, std::set<std::pair<std::string, bool>>> edges;  // body -> (head, negative)
    std::set<std::string> nodes;
};

bool closed_default(const Rule& r) { return rule_stratum(r) == 8; }

Graph build_graph(const Policy& p) {
    Graph g;
    for (const auto& r : p.rules) {
        for (const auto& h : keys_of(r.head)) {
            g.nodes.insert(h);
            for (const auto& lit : r.body)
                for (const auto& b : keys_of(lit.atom)) {
                    g.nodes.insert(b);
                    g.edges[b].insert({h, !lit.positive});
                }
            if (closed_default(r))
                for (const auto& b : kRequestKeys) {
                    g.nodes.insert(b);
                    g.edges[b].insert({h, false});
                }
        }
    }
    return g;
}

// Tarjan's algorithm; components come out in reverse topological order.
std::vector<std::vector<std::string>> components(const Graph& g) {
    std::map<std::string, int> index, low;
    std::set<std::string> on_stack;
    std::vector<std::string> stack;
    std::vector<std::vector<std::string>> out;
    int counter = 0;
    std::function<void(const std::string&)> visit = [&](const std::string& v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack.insert(v);
        auto it = g.edges.find(v);
        if (it != g.edges.end())
            for (const auto& [w, neg] : it->second) {
                (void)neg;
                if (!index.count(w)) {
                    visit(w);
                    low[v] = std::min(low[v], low[w]);
                } else if (on_stack.count(w)) {
                    low[v] = std::min(low[v], index[w]);
                }
            }
        if (low[v] == index[v]) {
            std::vector<std::string> comp;
            std::string w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack.erase(w);
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            out.push_back(std::move(comp));
        }
    };
    for (const auto& v : g.nodes)
        if (!index.count(v)) visit(v);
    std::reverse(out.begin(), out.end());
    return out;
}

class Evaluator {
public:
    Evaluator(const Policy& p, const std::set<Atom>& facts) : policy_(p) {
        model_.facts = facts;
        for (const auto& f : facts) index_.add(f);
    }

    Model run() {
        Graph g = build_graph(policy_);
        for (const auto& comp : components(g)) {
            std::set<std::string> in(comp.begin(), comp.end());
            for (const auto& v : comp) {
                auto it = g.edges.find(v);
                if (it == g.edges.end()) continue;
                for (const auto& [w, neg] : it->second)
                    if (neg && in.count(w))
                        throw StructureError("policy is not stratified: " + w + " depends negatively on " + v +
                                             " within a recursive cycle");
            }
            evaluate_component(in);
        }
        model_.atoms = index_.all;
        return std::move(model_);
    }

private:
    std::vector<const Rule*> rules_for(const std::set<std::string>& comp) const {
        std::vector<const Rule*> out;
        for (const auto& r : policy_.rules)
            for (const auto& k : keys_of(r.head))
                if (comp.count(k)) {
                    out.push_back(&r);
                    break;
                }
        return out;
    }

    static bool recursive(const Literal& l, const std::set<std::string>& comp) {
        if (!l.positive) return false;
        for (const auto& k : keys_of(l.atom))
            if (comp.count(k)) return true;
        return false;
    }

    void evaluate_component(const std::set<std::string>& comp) {
        auto rules = rules_for(comp);
        std::set<Atom> delta;
        for (const Rule* r : rules) fire(*r, comp, -1, delta, delta);
        while (!delta.empty()) {
            std::set<Atom> next;
            for (const Rule* r : rules)
                for (std::size_t i = 0; i < r->body.size(); ++i)
                    if (recursive(r->body[i], comp)) fire(*r, comp, static_cast<int>(i), delta, next);
            delta = std::move(next);
        }
    }

    // Fires every instance of r; with delta_pos >= 0 that body literal only ranges over `delta`.
    void fire(const Rule& r, const std::set<std::string>& comp, int delta_pos, const std::set<Atom>& delta,
              std::set<Atom>& fresh) {
        if (closed_default(r)) {
            if (delta_pos < 0) fire_closed_default(r, comp, fresh);
            return;
        }
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < r.body.size(); ++i)
            if (r.body[i].positive) order.push_back(i);
        for (std::size_t i = 0; i < r.body.size(); ++i)
            if (!r.body[i].positive) order.push_back(i);
        Substitution s;
        std::vector<Atom> pos, neg;
        std::function<void(std::size_t)> step = [&](std::size_t k) {
            if (k == order.size()) {
                emit(r, substitute(r.head, s), pos, neg, comp, fresh);
                return;
            }
            const Literal& lit = r.body[order[k]];
            if (!lit.positive) {
                Atom a = substitute(lit.atom, s);
                if (exists(a)) return;
                neg.push_back(a);
                step(k + 1);
                neg.pop_back();
                return;
            }
            auto try_atom = [&](const Atom& cand) {
                Substitution saved = s;
                if (match(lit.atom, cand, s)) {
                    pos.push_back(cand);
                    step(k + 1);
                    pos.pop_back();
                }
                s = std::move(saved);
            };
            if (static_cast<int>(order[k]) == delta_pos) {
                for (const auto& cand : delta) try_atom(cand);
            } else {
                for (const auto& key : keys_of(lit.atom)) {
                    // Copy: emitting may grow the index while we iterate.
                    std::vector<Atom> cands = index_.get(key);
                    for (const auto& cand : cands) try_atom(cand);
                }
            }
        };
        step(0);
    }

    void fire_closed_default(const Rule& r, const std::set<std::string>& comp, std::set<Atom>& fresh) {
        std::set<Atom> requests;
        for (const auto& key : kRequestKeys)
            for (const auto& a : index_.get(key)) {
                if (!a.args[2].is_signed()) continue;
                Atom q{"do", {a.args[0], a.args[1], Term::signed_term('+', a.args[2].inner())}};
                requests.insert(q);
            }
        for (const auto& q : requests) {
            Substitution s;
            if (!match(r.body.front().atom, q, s) || exists(q)) continue;
            emit(r, substitute(r.head, s), {}, {q}, comp, fresh);
        }
    }

    bool exists(const Atom& pattern) const {
        for (const auto& key : keys_of(pattern))
            for (const auto& cand : index_.get(key)) {
                Substitution s;
                if (match(pattern, cand, s)) return true;
            }
        return false;
    }

    void emit(const Rule& r, const Atom& head, const std::vector<Atom>& pos, const std::vector<Atom>& neg,
              const std::set<std::string>& comp, std::set<Atom>& fresh) {
        if (!comp.count(key_of_ground(head))) return;
        model_.provenance[head].insert(Derivation{r.id, pos, neg});
        if (index_.add(head)) fresh.insert(head);
    }

    const Policy& policy_;
    Model model_;
    Index index_;
};

}  // namespace

std::map<int, std::set<Atom>> Model::strata() const {
    std::map<int, std::set<Atom>> out;
    for (const auto& a : atoms) out[atom_stratum(a)].insert(a);
    return out;
}

bool Model::error_flag() const { return contains(Atom{"error", {}}); }

Model evaluate(const Policy& p, const std::set<Atom>& facts) { return Evaluator(p, facts).run(); }

Model evaluate(const Policy& p, const DataSystem& ds, const Ontology& onto) { return evaluate(p, base_facts(ds, onto)); }

std::vector<GroundRule> ground(const Policy& p, const std::set<Atom>& facts) {
    Model m = evaluate(p, facts);
    std::vector<GroundRule> out;
    for (const auto& r : p.rules) {
        std::vector<GroundRule> mine;
        for (const auto& [head, ds] : m.provenance)
            for (const auto& d : ds) {
                if (d.rule_id != r.id) continue;
                GroundRule g{r.id, head, {}};
                for (const auto& a : d.positive) g.body.push_back({true, a});
                for (const auto& a : d.negative) g.body.push_back({false, a});
                mine.push_back(std::move(g));
            }
        out.insert(out.end(), mine.begin(), mine.end());
    }
    return out;
}

DecisionView decision_view(const Model& m) {
    DecisionView v;
    for (const auto& a : m.atoms) {
        if (a.predicate == "do") v.do_atoms.push_back(a);
        if (a.predicate == "mustdo") v.mustdo_atoms.push_back(a);
    }
    return v;
}

IntegrityResult check_integrity(const Model& m) {
    IntegrityResult r;
    auto it = m.provenance.find(Atom{"error", {}});
    if (it != m.provenance.end()) {
        r.consistent = false;
        r.witnesses.assign(it->second.begin(), it->second.end());
    } else if (m.error_flag()) {
        r.consistent = false;
    }
    return r;
}

std::string dump(const Model& m) {
    std::string out;
    for (const auto& a : m.atoms) out += a.str() + "\n";
    return out;
}

namespace {

void render(const Model& m, const Atom& a, const Derivation* d, int depth, std::set<Atom>& path, std::string& out) {
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    if (!d) {
        out += pad + a.str() + (m.facts.count(a) ? "  [fact]" : "") + "\n";
        return;
    }
    out += pad + a.str() + "  <- " + d->rule_id + "\n";
    path.insert(a);
    for (const auto& b : d->positive) {
        const Derivation* sub = nullptr;
        if (!m.facts.count(b) && !path.count(b)) {
            auto it = m.provenance.find(b);
            if (it != m.provenance.end())
                for (const auto& cand : it->second) {
                    bool cyclic = std::any_of(cand.positive.begin(), cand.positive.end(),
                                              [&](const Atom& x) { return path.count(x) > 0; });
                    if (!cyclic) {
                        sub = &cand;
                        break;
                    }
                }
        }
        render(m, b, sub, depth + 1, path, out);
    }
    for (const auto& b : d->negative) out += pad + "  not " + b.str() + "\n";
    path.erase(a);
}

}  // namespace

std::string explain(const Model& m, const Atom& a) {
    if (!m.contains(a)) return "not derivable\n";
    std::vector<std::string> trees;
    if (m.facts.count(a)) {
        std::set<Atom> path;
        std::string t;
        render(m, a, nullptr, 0, path, t);
        trees.push_back(t);
    }
    auto it = m.provenance.find(a);
    if (it != m.provenance.end())
        for (const auto& d : it->second) {
            std::set<Atom> path;
            std::string t;
            render(m, a, &d, 0, path, t);
            trees.push_back(t);
        }
    std::sort(trees.begin(), trees.end());
    std::string out;
    for (std::size_t i = 0; i < trees.size(); ++i) out += (i ? "\n" : "") + trees[i];
    return out;
}

}  // namespace polcheck
