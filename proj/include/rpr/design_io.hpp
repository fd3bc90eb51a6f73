#pragma once

#include <stdexcept>
#include <string>

#include "rpr/geometry.hpp"

namespace rpr {

/// Parse failure for a design file; carries what went wrong and where.
class DesignParseError : public std::runtime_error {
  public:
    enum class Kind { Io, Malformed, UnknownKey, DuplicateKey, MissingKey, UnitRange };

    DesignParseError(Kind kind, std::string key, int line, const std::string& message)
        : std::runtime_error(message), kind_(kind), key_(std::move(key)), line_(line) {}

    Kind kind() const { return kind_; }
    const std::string& key() const { return key_; }
    int line() const { return line_; } // 1-based; 0 when not tied to a line

  private:
    Kind kind_;
    std::string key_;
    int line_;
};

/// Reads a key-value design file.  Keys: Rb, alphab, betab, Rp, alphap,
/// betap, L1, L2, L3 — each exactly once, `key = value` or `key value` per
/// line, `#` lines and blank lines ignored.  Lengths are meters, angles are
/// degrees (converted to radians here).  The resulting design is validated.
RobotDesign parse_design(const std::string& path);

/// Same parser over an in-memory document (used by tests and error paths).
RobotDesign parse_design_text(const std::string& text);

} // namespace rpr
