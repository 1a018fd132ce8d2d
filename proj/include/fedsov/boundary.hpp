#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <utility>
#include <vector>

namespace fedsov {

struct BoundaryResult {
    int64_t n;
    double target_pa_log2;
    int64_t err_n;
    double r_n;                // 1 - err_n/n
    double bracket_low_log2;   // log2 of the cumulative sum strictly below P_A
    double bracket_high_log2;  // log2 of the cumulative sum at or above P_A
};

struct AdvantageBound {
    int64_t n, err, k, q;
    double bound_log2;  // capped at 0 (probability 1)
};

// a = sum_{i=0}^{radius} C(n, i), exact.
mpz_class cumulative_ball_size(int64_t n, int64_t radius);

// log2 of a positive big integer, accurate to double precision.
double mpz_log2(const mpz_class& v);

// P_A <= k*q * 2^-n * sum_{i<=2 err} C(n,i), in log2, capped at 0.
AdvantageBound attacker_bound(int64_t n, int64_t err, int64_t k, int64_t q);

// Smallest err_n such that P_A <= 2^-n * sum_{i<=2 err_n} C(n,i), with the
// cumulative sums bracketing P_A at the crossing radius. target_pa_log2 is
// log2(P_A); integer targets are compared exactly in big-integer arithmetic.
BoundaryResult solve_boundary(int64_t n, double target_pa_log2);

// For each n: 1 - log2(a)/n with a = cumulative_ball_size(n, 2*floor(f*n)).
std::vector<std::pair<int64_t, double>> convergence_curve(
    double err_fraction, const std::vector<int64_t>& n_values);

}  // namespace fedsov
