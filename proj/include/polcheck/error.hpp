#pragma once

#include <stdexcept>
#include <string>

namespace polcheck {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax error carrying a 1-based source position.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

class NameError : public Error { public: using Error::Error; };
class SchemaError : public Error { public: using Error::Error; };
class StructureError : public Error { public: using Error::Error; };
class ExpansionError : public Error { public: using Error::Error; };
class TaxonomyError : public Error { public: using Error::Error; };
class OracleScaleError : public Error { public: using Error::Error; };
class PatternError : public Error { public: using Error::Error; };
class SafetyError : public Error { public: using Error::Error; };
class EntailmentError : public Error { public: using Error::Error; };
class BranchLimitError : public Error { public: using Error::Error; };

}  // namespace polcheck
