#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace bolab {

using complex = std::complex<double>;

/// Regularity exponent s of the weighted space h^s. Negative values are allowed.
struct SobolevIndex {
  double value = 0.0;
  constexpr explicit SobolevIndex(double s) : value(s) {}
};

/// Weight n^{2s}; exactly 1 at n = 1.
double sobolev_weight(std::size_t n, SobolevIndex s);

/// A finitely supported point (zeta_1, ..., zeta_M) of h^s.
///
/// Coefficients are indexed by mode n = 1..M. Every mode beyond M is zero, and all
/// operations treat the state as that zero-extended infinite sequence.
class BirkhoffState {
 public:
  /// Throws InvalidArgument if `coeffs` is empty or contains NaN/Inf.
  explicit BirkhoffState(std::vector<complex> coeffs);

  static BirkhoffState zeros(std::size_t length);

  std::size_t length() const noexcept { return coeffs_.size(); }

  /// 1-based mode access with zero-extension: returns 0 for n > length().
  complex mode(std::size_t n) const noexcept {
    return (n >= 1 && n <= coeffs_.size()) ? coeffs_[n - 1] : complex{};
  }

  std::span<const complex> coeffs() const noexcept { return coeffs_; }

  /// Modulus squared of mode n (zero beyond the stored length).
  double action(std::size_t n) const noexcept { return std::norm(mode(n)); }

  friend bool operator==(const BirkhoffState&, const BirkhoffState&) = default;

 private:
  std::vector<complex> coeffs_;
};

/// (sum_{n<=M} n^{2s} |zeta_n|^2)^{1/2}
double h_norm(const BirkhoffState& state, SobolevIndex s);

/// Orthogonal projection onto the first N modes. Result has length min(N, M).
BirkhoffState project(const BirkhoffState& state, std::size_t N);

/// (sum_{n>N} n^{2s} |zeta_n|^2)^{1/2}
double tail_norm(const BirkhoffState& state, std::size_t N, SobolevIndex s);

/// h^s norm of a - b, both zero-extended to the longer length.
double h_distance(const BirkhoffState& a, const BirkhoffState& b, SobolevIndex s);

// Serialization. Doubles are written with 17 significant digits and read back
// bit-exactly.

void write_state_csv(std::ostream& os, const BirkhoffState& state);
BirkhoffState read_state_csv(std::istream& is);

std::string state_to_json(const BirkhoffState& state);
BirkhoffState state_from_json(const std::string& text);

/// Shortest-safe 17 significant digit rendering used by every CSV writer.
std::string format_double(double x);

}  // namespace bolab
