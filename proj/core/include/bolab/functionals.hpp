#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bolab/state.hpp"

namespace bolab {

/// A bounded continuous functional reading the first `arity` modes of a state.
struct TestFunctional {
  std::string id;
  std::size_t arity = 1;
  double bound = 1.0;  ///< sup |F|
  bool phase_sensitive = false;
  std::function<double(const BirkhoffState&)> evaluate;

  double operator()(const BirkhoffState& state) const { return evaluate(state); }
};

/// The fixed panel F1..F5:
///   F1 = exp(-||pi_4 zeta||_{h^0}^2)
///   F2 = Re(zeta_1) exp(-|zeta_1|^2)
///   F3 = Re(zeta_2 conj(zeta_1)^2) / max(|zeta_2||zeta_1|^2, 1e-12), clipped to [-1, 1]
///   F4 = min(1, |zeta_3|^2)
///   F5 = sin(Re zeta_1 + Im zeta_2)
std::vector<TestFunctional> builtin_functionals();

/// Looks a functional up by id in `panel`; throws InvalidArgument if absent.
const TestFunctional& find_functional(std::span<const TestFunctional> panel, const std::string& id);

}  // namespace bolab
