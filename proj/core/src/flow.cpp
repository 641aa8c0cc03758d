#include "bolab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "bolab/error.hpp"

namespace bolab {

namespace {

constexpr double kPhaseReduceThreshold = 1073741824.0;  // 2^30

void require_truncation(std::size_t N, const char* who) {
  if (N == 0) throw InvalidArgument(std::string(who) + ": N must be >= 1");
}

}  // namespace

PhaseVector phase_vector(const BirkhoffState& state, std::size_t N) {
  require_truncation(N, "phase_vector");
  double total = 0.0;
  for (std::size_t k = 1; k <= N; ++k) total += state.action(k);

  PhaseVector out;
  out.beta.resize(N);
  double prefix = 0.0;    // A_{n-1}
  double weighted = 0.0;  // C_n
  for (std::size_t n = 1; n <= N; ++n) {
    weighted += prefix;
    prefix += state.action(n);
    const double nn = static_cast<double>(n);
    out.beta[n - 1] = nn * nn + 2.0 * weighted - 2.0 * nn * total;
  }
  return out;
}

complex unit_phase(double x) {
  if (std::abs(x) > kPhaseReduceThreshold) x = std::remainder(x, 2.0 * std::numbers::pi);
  return {std::cos(x), std::sin(x)};
}

BirkhoffState flow_truncated(const BirkhoffState& state, FlowSpec spec) {
  require_truncation(spec.N, "flow_truncated");
  const std::size_t len = std::min(spec.N, state.length());
  const PhaseVector phases = phase_vector(state, len);
  std::vector<complex> out(len);
  for (std::size_t n = 1; n <= len; ++n) {
    out[n - 1] = state.mode(n) * unit_phase(spec.t * phases.beta[n - 1]);
  }
  return BirkhoffState(std::move(out));
}

BirkhoffState flow_full(const BirkhoffState& state, double t) {
  return flow_truncated(state, FlowSpec{state.length(), t});
}

double hamiltonian(const BirkhoffState& state, std::size_t N) {
  require_truncation(N, "hamiltonian");
  double quadratic = 0.0;
  double quartic = 0.0;
  double tail = 0.0;
  for (std::size_t k = N; k >= 1; --k) {
    const double a = state.action(k);
    const double kk = static_cast<double>(k);
    tail += a;
    quadratic += kk * kk * a;
    quartic += tail * tail;
  }
  return -0.5 * quadratic + 0.5 * quartic;
}

BirkhoffState vector_field(const BirkhoffState& state, std::size_t N) {
  require_truncation(N, "vector_field");
  const std::size_t len = std::min(N, state.length());
  const PhaseVector phases = phase_vector(state, len);
  std::vector<complex> out(len);
  for (std::size_t n = 1; n <= len; ++n) {
    out[n - 1] = complex{0.0, phases.beta[n - 1]} * state.mode(n);
  }
  return BirkhoffState(std::move(out));
}

double flow_jacobian_det(const BirkhoffState& state, FlowSpec spec, double fd_step) {
  if (!(fd_step > 0.0) || !std::isfinite(fd_step)) {
    throw DegenerateStepError("flow_jacobian_det: fd_step must be > 0");
  }
  require_truncation(spec.N, "flow_jacobian_det");
  if (spec.N > 8) throw DegenerateStepError("flow_jacobian_det: N must be <= 8");

  const std::size_t N = spec.N;
  const std::size_t dim = 2 * N;
  std::vector<complex> base(N);
  for (std::size_t n = 1; n <= N; ++n) base[n - 1] = state.mode(n);

  // Real coordinates are ordered (xi_1..xi_N, eta_1..eta_N).
  auto evaluate = [&](const std::vector<complex>& z) {
    const BirkhoffState out = flow_truncated(BirkhoffState(z), spec);
    Eigen::VectorXd v(dim);
    for (std::size_t n = 1; n <= N; ++n) {
      v[n - 1] = out.mode(n).real();
      v[N + n - 1] = out.mode(n).imag();
    }
    return v;
  };

  Eigen::MatrixXd jac(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<complex> plus = base;
    std::vector<complex> minus = base;
    const std::size_t mode = j % N;
    double width = 0.0;
    // Divide by the step actually realized in floating point.
    if (j < N) {
      plus[mode].real(base[mode].real() + fd_step);
      minus[mode].real(base[mode].real() - fd_step);
      width = plus[mode].real() - minus[mode].real();
    } else {
      plus[mode].imag(base[mode].imag() + fd_step);
      minus[mode].imag(base[mode].imag() - fd_step);
      width = plus[mode].imag() - minus[mode].imag();
    }
    if (!(width > 0.0)) throw DegenerateStepError("flow_jacobian_det: fd_step vanishes at this state");
    jac.col(static_cast<Eigen::Index>(j)) = (evaluate(plus) - evaluate(minus)) / width;
  }

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
  const double det = lu.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-8) {
    throw DegenerateStepError("flow_jacobian_det: difference Jacobian is numerically singular");
  }
  return det;
}

std::vector<double> convergence_profile(const BirkhoffState& state, double t, SobolevIndex s,
                                        std::span<const std::size_t> truncations) {
  if (s.value < 0.0) throw InvalidArgument("convergence_profile: requires s >= 0");
  const BirkhoffState full = flow_full(state, t);
  std::vector<double> out;
  out.reserve(truncations.size());
  for (const std::size_t N : truncations) {
    if (N == 0 || N > state.length()) {
      throw InvalidArgument("convergence_profile: truncation " + std::to_string(N) +
                            " outside [1, " + std::to_string(state.length()) + "]");
    }
    out.push_back(h_distance(full, flow_truncated(state, FlowSpec{N, t}), s));
  }
  return out;
}

}  // namespace bolab
