// SPDX-License-Identifier: Apache-2.0

#ifndef CARLEMAN_ERROR_HPP
#define CARLEMAN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace carleman {

/// Invalid input or a violated precondition. Maps to exit code 2 in the CLI.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario invariant violation; `invariant` names the broken rule.
class InvariantError : public Error {
 public:
  InvariantError(std::string invariant, const std::string& what)
      : Error(invariant + ": " + what), invariant_(std::move(invariant)) {}
  const std::string& invariant() const { return invariant_; }

 private:
  std::string invariant_;
};

}  // namespace carleman

#endif  // CARLEMAN_ERROR_HPP
