#pragma once

#include <cmath>
#include <optional>

#include <dscatter/common.hpp>

namespace testutil {

// Runs f and reports the ScatterError code it threw, if any.
template <typename F>
std::optional<dscatter::Errc> code_of(F&& f) {
  try {
    f();
  } catch (const dscatter::ScatterError& e) {
    return e.code();
  }
  return std::nullopt;
}

inline double rel_err(dscatter::cdouble got, dscatter::cdouble want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace testutil
