#pragma once

#include <vector>

#include "cvconv/rational.hpp"

namespace cvconv {

// Full-adder accounting for an N x N MAC array converted to the perforated
// N x (N+1) form. Half adders count as 0.5 FA. All values are exact
// rationals; the aggregate ones are integer-valued over the supported range.
struct CostReport {
  int n = 0;
  int m = 0;
  Rational fa_decrease_per_macstar;
  Rational fa_increase_per_macplus;
  Rational total_macstar_decrease;  // N^2 * per-unit
  Rational total_macplus_increase;  // N  * per-unit
  Rational net_decrease;
};

// Smallest b with 2^b >= x (x >= 1).
int ceil_log2(int64_t x);

// Per MAC* unit: 9m - ceil(log2(N*(2^m-1))) + 0.5 full adders saved.
Rational fa_decrease_per_macstar(int n, int m);

// Per MAC+ unit: 7*ceil(log2(N*(2^m-1))) - 0.5 + ceil(log2(N*(2^16-1)))
// full adders added (an accurate bx8 multiplier plus the final adder).
Rational fa_increase_per_macplus(int n, int m);

// m = 0 yields an all-zero report (no perforation, no extra column cost).
CostReport cost_report(int n, int m);

// The eight (N, m) rows of the reference table: N in {16,32,48,64} for
// m in {1,2}.
std::vector<CostReport> reference_cost_table();

}  // namespace cvconv
