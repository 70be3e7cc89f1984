#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <dscatter/dispersion.hpp>
#include <dscatter/levinson.hpp>
#include <dscatter/models.hpp>
#include <dscatter/numerics.hpp>

// Strict JSON run configuration. Unknown keys anywhere are an error: a typo
// must never silently fall back to a default. Complex numbers are [re, im].

namespace dscatter::cfg {

struct RunConfig {
  std::variant<models::EmitterModel, models::SeparableModel> model;
  disp::Dispersion dispersion;
  num::QuadratureSpec quadrature;
  lev::SweepOptions sweep;
  std::vector<double> energies;  // optional explicit grid for the sweep task
  std::string source_text;
  std::uint64_t hash = 0;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Canonical JSON for a parsed config; parse_config(serialize_config(c))
// reproduces every field of c.
std::string serialize_config(const RunConfig& config);

std::uint64_t fnv1a_hash(std::string_view text);

}  // namespace dscatter::cfg
