#include "spinthermo/degenerate.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "spinthermo/error.hpp"

namespace spinthermo {
namespace {

double two_level_c(double e) {
  double q = std::exp(-e);
  return e * e * q / ((1.0 + q) * (1.0 + q));
}

double log_dm1_of(std::uint64_t D) {
  if (D < 3) {
    std::ostringstream msg;
    msg << "optimal gap needs D >= 3, got " << D;
    throw DomainError(msg.str());
  }
  return std::log(static_cast<double>(D - 1));
}

}  // namespace

std::vector<Level> DegenerateModel::levels() const {
  if (dim < 2) throw DomainError("degenerate model needs dim >= 2");
  return {{0.0, 1}, {gap, dim - 1}};
}

double optimal_gap_log(double L) {
  if (!(L >= std::log(2.0) - 1e-15) || !std::isfinite(L)) {
    throw DomainError("optimal gap needs ln(D-1) >= ln 2");
  }
  // g is increasing on (2, inf): g(2+) = -inf, g(2+L+20) > 0.
  auto g = [L](double x) { return x + std::log(x - 2.0) - std::log(x + 2.0) - L; };
  double lo = 2.0 + 1e-12, hi = 2.0 + L + 20.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < 0.0) lo = mid; else hi = mid;
  }
  double x = 0.5 * (lo + hi);
  // One Newton polish; g' = 1 + 1/(x-2) - 1/(x+2).
  double step = g(x) / (1.0 + 1.0 / (x - 2.0) - 1.0 / (x + 2.0));
  if (std::abs(step) < hi - lo + 1e-15) x -= step;
  return x;
}

double optimal_gap(std::uint64_t D) { return optimal_gap_log(log_dm1_of(D)); }

double c_opt_log(double L) {
  double x = optimal_gap_log(L);
  double q = std::exp(x - L);
  return x * x * q / ((1.0 + q) * (1.0 + q));
}

double c_opt(std::uint64_t D) { return c_opt_log(log_dm1_of(D)); }

double c_opt_spins(int n) {
  if (n < 1) throw DomainError("c_opt_spins needs n >= 1");
  if (n == 1) return single_spin_c_max();
  double L = n * std::numbers::ln2 + std::log1p(-std::exp2(-n));
  return c_opt_log(L);
}

double single_spin_c_max() {
  static const double value = [] {
    double e = golden_section_max(two_level_c, 0.5, 5.0, 1e-12);
    return two_level_c(e);
  }();
  return value;
}

double estimation_error_bound(double C, long long nu) {
  if (!(C > 0.0)) throw DomainError("heat capacity must be positive");
  if (nu < 1) throw DomainError("number of repetitions must be >= 1");
  return 1.0 / (static_cast<double>(nu) * C);
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
    if (c >= d) break;
  }
  return 0.5 * (a + b);
}

GapOptimum max_c_over_gap(const GapTemplate& tmpl, double beta, double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("gap scan range must satisfy 0 < lo < hi");
  auto c_at = [&](double e) { return thermal_stats(std::span<const Level>(tmpl(e)), beta).heat_capacity; };
  constexpr int kScan = 400;
  double ratio = std::pow(hi / lo, 1.0 / (kScan - 1));
  std::vector<double> grid(kScan);
  int best = 0;
  double best_c = -1.0;
  for (int i = 0; i < kScan; ++i) {
    grid[i] = lo * std::pow(ratio, i);
    double c = c_at(grid[i]);
    if (c > best_c) {
      best_c = c;
      best = i;
    }
  }
  double a = grid[best > 0 ? best - 1 : 0];
  double b = grid[best < kScan - 1 ? best + 1 : kScan - 1];
  double e = golden_section_max(c_at, a, b, 1e-10);
  double c = c_at(e);
  if (c < best_c) return {grid[best], best_c};
  return {e, c};
}

}  // namespace spinthermo
