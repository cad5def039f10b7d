#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testutil {

inline std::string source_path(const std::string& rel) { return std::string(POLCHECK_SOURCE_DIR) + "/" + rel; }

inline std::string read_file(const std::string& rel) {
    std::ifstream in(source_path(rel));
    if (!in) throw std::runtime_error("cannot open " + rel);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace testutil
