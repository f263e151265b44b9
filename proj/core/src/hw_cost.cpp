#include "cvconv/hw_cost.hpp"

#include <stdexcept>

namespace cvconv {

int ceil_log2(int64_t x) {
  if (x < 1) throw std::invalid_argument("ceil_log2: argument must be >= 1");
  int b = 0;
  while ((int64_t(1) << b) < x) ++b;
  return b;
}

namespace {

void check_args(int n, int m) {
  if (n < 2) throw std::invalid_argument("cost model: N must be >= 2");
  if (m < 0 || m > 7) throw std::invalid_argument("cost model: m must be in [0,7]");
}

}  // namespace

Rational fa_decrease_per_macstar(int n, int m) {
  check_args(n, m);
  if (m == 0) return Rational(0);
  const int sumx_bits = ceil_log2(int64_t(n) * ((1 << m) - 1));
  // 9m saved in the multiplier tree and the sum adder, minus the new sumX
  // adder, plus the half-adder credit.
  return Rational(9 * m) - Rational(sumx_bits) + Rational(1, 2);
}

Rational fa_increase_per_macplus(int n, int m) {
  check_args(n, m);
  if (m == 0) return Rational(0);
  const int sumx_bits = ceil_log2(int64_t(n) * ((1 << m) - 1));
  const int out_bits = ceil_log2(int64_t(n) * ((int64_t(1) << 16) - 1));
  return Rational(7 * sumx_bits) - Rational(1, 2) + Rational(out_bits);
}

CostReport cost_report(int n, int m) {
  check_args(n, m);
  CostReport r;
  r.n = n;
  r.m = m;
  if (m == 0) return r;  // exact array, nothing changes
  r.fa_decrease_per_macstar = fa_decrease_per_macstar(n, m);
  r.fa_increase_per_macplus = fa_increase_per_macplus(n, m);
  r.total_macstar_decrease = r.fa_decrease_per_macstar * Rational(int64_t(n) * n);
  r.total_macplus_increase = r.fa_increase_per_macplus * Rational(n);
  r.net_decrease = r.total_macstar_decrease - r.total_macplus_increase;
  return r;
}

std::vector<CostReport> reference_cost_table() {
  std::vector<CostReport> rows;
  for (int m : {1, 2}) {
    for (int n : {16, 32, 48, 64}) {
      rows.push_back(cost_report(n, m));
    }
  }
  return rows;
}

}  // namespace cvconv
