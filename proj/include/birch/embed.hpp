#pragma once

#include <optional>

#include "birch/net.hpp"

namespace birch {

inline OmegaConfiguration to_omega(const Configuration& c) {
  return {c.state, OmegaValuation::from_vector(c.marking)};
}

// Embedding witness search: a renaming sigma with sigma(lo.state) = hi.state
// and sigma(lo valuation) <= hi valuation pointwise (omega-aware), or nullopt.
// This is the order whose downward closures the cover computation works with;
// it is reflexive, transitive, and a well-quasi-order on configurations.
std::optional<Renaming> embeds(const OmegaConfiguration& lo,
                               const OmegaConfiguration& hi);

std::optional<Renaming> embeds(const Configuration& lo, const OmegaConfiguration& hi);
std::optional<Renaming> embeds(const Configuration& lo, const Configuration& hi);

}  // namespace birch
