#pragma once

#include <stdexcept>
#include <string>

namespace wlrgs {

// Bad or inconsistent user input: malformed data, invalid configuration,
// numerically degenerate quantities. The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what) {}
};

// The requested boundaries cannot be constructed (futility meets efficacy,
// spending exceeds the available probability). Exit code 2.
class InfeasibleDesign : public std::runtime_error {
 public:
  InfeasibleDesign(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what) {}
};

}  // namespace wlrgs
