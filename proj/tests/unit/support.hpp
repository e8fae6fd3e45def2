#pragma once

#include <cmath>
#include <string>

#include "tou/errors.hpp"

namespace tou::test {

inline double rel_err(double value, double reference) {
  return reference == 0.0 ? std::abs(value) : std::abs(value - reference) / std::abs(reference);
}

template <class F>
bool throws_kind(F&& f, ErrorKind kind) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

}  // namespace tou::test
