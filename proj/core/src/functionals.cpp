#include "bolab/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "bolab/error.hpp"

namespace bolab {

std::vector<TestFunctional> builtin_functionals() {
  std::vector<TestFunctional> panel;
  panel.push_back({"F1", 4, 1.0, false, [](const BirkhoffState& z) {
                     double sum = 0.0;
                     for (std::size_t n = 1; n <= 4; ++n) sum += z.action(n);
                     return std::exp(-sum);
                   }});
  // sup of x e^{-x^2} is (2e)^{-1/2}
  panel.push_back({"F2", 1, 1.0 / std::sqrt(2.0 * std::exp(1.0)), true, [](const BirkhoffState& z) {
                     const complex z1 = z.mode(1);
                     return z1.real() * std::exp(-std::norm(z1));
                   }});
  panel.push_back({"F3", 2, 1.0, true, [](const BirkhoffState& z) {
                     const complex z1 = z.mode(1);
                     const complex z2 = z.mode(2);
                     const double num = (z2 * std::conj(z1) * std::conj(z1)).real();
                     const double den = std::max(std::abs(z2) * std::norm(z1), 1e-12);
                     return std::clamp(num / den, -1.0, 1.0);
                   }});
  panel.push_back({"F4", 3, 1.0, false, [](const BirkhoffState& z) {
                     return std::min(1.0, z.action(3));
                   }});
  panel.push_back({"F5", 2, 1.0, true, [](const BirkhoffState& z) {
                     return std::sin(z.mode(1).real() + z.mode(2).imag());
                   }});
  return panel;
}

const TestFunctional& find_functional(std::span<const TestFunctional> panel, const std::string& id) {
  for (const auto& f : panel) {
    if (f.id == id) return f;
  }
  throw InvalidArgument("unknown functional '" + id + "'");
}

}  // namespace bolab
