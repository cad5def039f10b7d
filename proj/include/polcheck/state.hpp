#pragma once

#include <compare>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace polcheck {

/// Total assignment `x_1:=v_1, ..., x_h:=v_h` over the declared variables.
struct State {
    std::map<std::string, std::string> values;

    const std::string& at(const std::string& var) const { return values.at(var); }
    std::string str() const;

    friend auto operator<=>(const State&, const State&) = default;
    friend bool operator==(const State&, const State&) = default;
};

using Assignment = std::map<std::string, std::string>;

/// A state space kept as a union of concise descriptions.
///
/// Each part is a partial assignment standing for the cross product of its fixed values with the
/// full ranges of the remaining variables. One empty part is the whole space; no parts is the
/// empty space. An explicit set of states is a union of total assignments.
struct StateSpace {
    std::vector<Assignment> parts;

    static StateSpace everything() { return StateSpace{{Assignment{}}}; }
    static StateSpace nothing() { return StateSpace{}; }
    static StateSpace concise(Assignment a) { return StateSpace{{std::move(a)}}; }
    static StateSpace explicit_states(const std::set<State>& states);

    bool is_concise() const { return parts.size() == 1; }
    std::string str() const;

    friend bool operator==(const StateSpace&, const StateSpace&) = default;
};

std::string assignment_str(const Assignment& a);

inline std::ostream& operator<<(std::ostream& os, const State& s) { return os << s.str(); }
inline std::ostream& operator<<(std::ostream& os, const StateSpace& s) { return os << s.str(); }

}  // namespace polcheck
