#ifndef TOPROOTS_ERRORS_HPP
#define TOPROOTS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace toproots {

// Bad user input: malformed curve data, incompatible contacts, schema errors.
// CLI maps this to exit code 1.
class input_error : public std::runtime_error {
public:
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Violated internal invariant: indicates a bug, not bad input.
// CLI maps this to exit code 2.
class internal_error : public std::logic_error {
public:
  explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

inline void require_input(bool cond, const std::string& msg) {
  if (!cond) throw input_error(msg);
}

inline void require_internal(bool cond, const std::string& msg) {
  if (!cond) throw internal_error(msg);
}

}  // namespace toproots

#endif
