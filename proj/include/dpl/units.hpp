#pragma once

#include <cmath>

namespace dpl {

// Physical constants used by the Hamiltonian and the field bridge.
// The default is natural units (hbar = c = eps0 = mu0 = 1).
struct Units {
  double hbar = 1.0;
  double eps0 = 1.0;
  double mu0 = 1.0;

  double c() const noexcept { return 1.0 / std::sqrt(eps0 * mu0); }

  static Units natural() noexcept { return {}; }

  static Units si() noexcept {
    return {1.054571817e-34, 8.8541878128e-12, 1.25663706212e-6};
  }

  friend bool operator==(const Units&, const Units&) = default;
};

}  // namespace dpl
