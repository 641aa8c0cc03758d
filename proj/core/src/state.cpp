#include "bolab/state.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "bolab/error.hpp"

namespace bolab {

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& v : violations) msg += "\n  " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

double sobolev_weight(std::size_t n, SobolevIndex s) {
  if (n == 1) return 1.0;
  return std::exp(2.0 * s.value * std::log(static_cast<double>(n)));
}

BirkhoffState::BirkhoffState(std::vector<complex> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw InvalidArgument("BirkhoffState: length must be >= 1");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (!std::isfinite(coeffs_[i].real()) || !std::isfinite(coeffs_[i].imag())) {
      throw InvalidArgument("BirkhoffState: non-finite coefficient at mode " +
                            std::to_string(i + 1));
    }
  }
}

BirkhoffState BirkhoffState::zeros(std::size_t length) {
  return BirkhoffState(std::vector<complex>(length));
}

namespace {

double weighted_sum(const BirkhoffState& state, std::size_t first, std::size_t last,
                    SobolevIndex s) {
  double sum = 0.0;
  for (std::size_t n = first; n <= last; ++n) sum += sobolev_weight(n, s) * state.action(n);
  return sum;
}

}  // namespace

double h_norm(const BirkhoffState& state, SobolevIndex s) {
  return std::sqrt(weighted_sum(state, 1, state.length(), s));
}

BirkhoffState project(const BirkhoffState& state, std::size_t N) {
  if (N == 0) throw InvalidArgument("project: N must be >= 1");
  const auto c = state.coeffs();
  const std::size_t len = std::min(N, c.size());
  return BirkhoffState(std::vector<complex>(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(len)));
}

double tail_norm(const BirkhoffState& state, std::size_t N, SobolevIndex s) {
  if (N == 0) throw InvalidArgument("tail_norm: N must be >= 1");
  if (N >= state.length()) return 0.0;
  return std::sqrt(weighted_sum(state, N + 1, state.length(), s));
}

double h_distance(const BirkhoffState& a, const BirkhoffState& b, SobolevIndex s) {
  const std::size_t len = std::max(a.length(), b.length());
  double sum = 0.0;
  for (std::size_t n = 1; n <= len; ++n) sum += sobolev_weight(n, s) * std::norm(a.mode(n) - b.mode(n));
  return std::sqrt(sum);
}

std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, ptr);
}

void write_state_csv(std::ostream& os, const BirkhoffState& state) {
  os << "n,re,im\n";
  for (std::size_t n = 1; n <= state.length(); ++n) {
    const complex z = state.mode(n);
    os << n << ',' << format_double(z.real()) << ',' << format_double(z.imag()) << '\n';
  }
}

namespace {

double parse_double(std::string_view text, std::size_t line) {
  double value = 0.0;
  // from_chars does not skip leading whitespace or '+'
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw IoError("state csv line " + std::to_string(line) + ": cannot parse number '" +
                  std::string(text) + "'");
  }
  return value;
}

}  // namespace

BirkhoffState read_state_csv(std::istream& is) {
  std::vector<complex> coeffs;
  std::string row;
  std::size_t line = 0;
  while (std::getline(is, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty() || row.front() == '#') continue;
    if (row.rfind("n,", 0) == 0) continue;  // header
    std::vector<std::string_view> fields;
    std::string_view rest = row;
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      fields.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    fields.push_back(rest);
    if (fields.size() != 3) {
      throw IoError("state csv line " + std::to_string(line) + ": expected n,re,im");
    }
    const double n = parse_double(fields[0], line);
    if (n != static_cast<double>(coeffs.size() + 1)) {
      throw IoError("state csv line " + std::to_string(line) + ": modes must be listed 1,2,3,...");
    }
    coeffs.emplace_back(parse_double(fields[1], line), parse_double(fields[2], line));
  }
  if (coeffs.empty()) throw IoError("state csv: no coefficients");
  return BirkhoffState(std::move(coeffs));
}

std::string state_to_json(const BirkhoffState& state) {
  std::string out = "[";
  for (std::size_t n = 1; n <= state.length(); ++n) {
    const complex z = state.mode(n);
    if (n > 1) out += ',';
    out += '[' + format_double(z.real()) + ',' + format_double(z.imag()) + ']';
  }
  out += ']';
  return out;
}

BirkhoffState state_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("state json: ") + e.what());
  }
  if (!j.is_array()) throw IoError("state json: expected an array of [re, im] pairs");
  std::vector<complex> coeffs;
  coeffs.reserve(j.size());
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
      throw IoError("state json: expected an array of [re, im] pairs");
    }
    coeffs.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  if (coeffs.empty()) throw IoError("state json: no coefficients");
  return BirkhoffState(std::move(coeffs));
}

}  // namespace bolab
