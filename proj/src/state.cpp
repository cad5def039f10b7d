#include "polcheck/state.hpp"

namespace polcheck {

std::string assignment_str(const Assignment& a) {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : a) {
        if (!first) out += ", ";
        first = false;
        out += k + "=" + v;
    }
    return out + "}";
}

std::string State::str() const { return assignment_str(values); }

StateSpace StateSpace::explicit_states(const std::set<State>& states) {
    StateSpace s;
    for (const auto& st : states) s.parts.push_back(st.values);
    return s;
}

std::string StateSpace::str() const {
    if (parts.empty()) return "empty";
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += " | ";
        out += assignment_str(parts[i]);
    }
    return out;
}

}  // namespace polcheck
