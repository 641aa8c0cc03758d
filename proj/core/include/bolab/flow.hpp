#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bolab/state.hpp"

namespace bolab {

/// Frequencies beta_{N,n}, n = 1..N, of the truncated flow.
struct PhaseVector {
  std::vector<double> beta;

  std::size_t truncation() const noexcept { return beta.size(); }
  /// 1-based.
  double operator[](std::size_t n) const { return beta.at(n - 1); }
};

struct FlowSpec {
  std::size_t N = 1;
  double t = 0.0;
};

/// beta_{N,n} = n^2 - 2 sum_{k<=N} min(n,k) |zeta_k|^2 for n = 1..N.
///
/// Evaluated in O(N) through the running sums
///   A_n = sum_{k<=n} |zeta_k|^2,   C_{n+1} = C_n + A_n  (C_n = sum_{k<=n} (n-k)|zeta_k|^2),
/// giving beta_{N,n} = n^2 + 2 C_n - 2 n A_N.
PhaseVector phase_vector(const BirkhoffState& state, std::size_t N);

/// e^{i x}, with x reduced mod 2 pi first when |x| > 2^30.
complex unit_phase(double x);

/// Exact solution of the N-mode truncated system at time t, applied to pi_N(state).
/// Output length is min(N, length); moduli are unchanged.
BirkhoffState flow_truncated(const BirkhoffState& state, FlowSpec spec);

/// Full flow of a finitely supported state: the truncated flow at N = length.
BirkhoffState flow_full(const BirkhoffState& state, double t);

/// H = -1/2 sum k^2 |zeta_k|^2 + 1/2 sum_k (sum_{j>=k} |zeta_j|^2)^2 over k, j <= N.
double hamiltonian(const BirkhoffState& state, std::size_t N);

/// Right-hand side (i beta_{N,n} zeta_n)_{n<=N} of the truncated system.
BirkhoffState vector_field(const BirkhoffState& state, std::size_t N);

/// Determinant of the central-difference Jacobian of (xi, eta) -> flow_truncated.
///
/// Works on the 2N real coordinates of the first N modes (state zero-extended to N).
/// Throws DegenerateStepError for fd_step <= 0, N > 8, or a numerically singular
/// difference matrix.
double flow_jacobian_det(const BirkhoffState& state, FlowSpec spec, double fd_step);

/// ||flow_full(state, t) - flow_truncated(state, {N, t})||_{h^s} for each N.
std::vector<double> convergence_profile(const BirkhoffState& state, double t, SobolevIndex s,
                                        std::span<const std::size_t> truncations);

}  // namespace bolab
