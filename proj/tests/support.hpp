#pragma once

#include <string>

#include "hyplab/error.hpp"

// Name of the hyplab::Error raised by fn, or "" when nothing is thrown.
template <class Fn>
std::string thrown(Fn&& fn) {
  try {
    fn();
  } catch (const hyplab::Error& e) {
    return e.name();
  }
  return {};
}
