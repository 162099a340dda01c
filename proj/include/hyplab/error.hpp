#pragma once

#include <stdexcept>
#include <string>

namespace hyplab {

/// Domain/model failure carrying a stable, machine-readable error name
/// (e.g. "bracket-failure", "horo-convexity-lost"). The CLI prints the name
/// and exits with status 2.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& detail)
      : std::runtime_error(name + ": " + detail), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

}  // namespace hyplab
