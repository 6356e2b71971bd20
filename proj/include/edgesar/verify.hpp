#pragma once

#include <string>
#include <vector>

#include "edgesar/config.hpp"

namespace edgesar {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
};

/// Self-consistency checks of the whole chain on the configured geometry:
/// forward matrix vs. direct summation, phase compensation, filter/forward
/// composition, measurement-level commutation with the reference edge map,
/// dictionary normalization, streaming vs. batch statistics, gradient and
/// Lipschitz bound. Intended as a quick sanity pass before long runs.
std::vector<CheckResult> verify_config(const ExperimentConfig& config);

}  // namespace edgesar
