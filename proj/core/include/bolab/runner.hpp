#pragma once

#include <iosfwd>
#include <string>

#include "bolab/config.hpp"

namespace bolab {

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerdictFailure = 2;

std::string version();

/// Runs a validated config. With config.out empty the data payload goes to
/// `out` and the manifest to `err`; otherwise both are written next to
/// config.out. Returns kExitPass, kExitUsage or kExitVerdictFailure.
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

}  // namespace bolab
