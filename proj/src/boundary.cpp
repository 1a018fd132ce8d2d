#include "fedsov/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedsov {

mpz_class cumulative_ball_size(int64_t n, int64_t radius) {
    if (n < 0 || radius < 0 || radius > n)
        throw std::out_of_range("cumulative_ball_size: radius must be in [0, n]");
    if (n > (1 << 16))
        throw std::out_of_range("cumulative_ball_size: n exceeds exact-arithmetic bound");
    mpz_class sum = 0;
    mpz_class coeff = 1;  // C(n, 0)
    for (int64_t i = 0;; ++i) {
        sum += coeff;
        if (i == radius) break;
        // C(n, i+1) = C(n, i) * (n - i) / (i + 1)
        coeff *= n - i;
        coeff /= i + 1;
    }
    return sum;
}

double mpz_log2(const mpz_class& v) {
    if (v <= 0) throw std::domain_error("mpz_log2: argument must be positive");
    signed long exp;
    double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
    return std::log2(mant) + static_cast<double>(exp);
}

AdvantageBound attacker_bound(int64_t n, int64_t err, int64_t k, int64_t q) {
    if (err < 0 || k < 1 || q < 1)
        throw std::out_of_range("attacker_bound: invalid parameters");
    int64_t radius = std::min<int64_t>(2 * err, n);
    double raw = std::log2(static_cast<double>(k)) + std::log2(static_cast<double>(q)) -
                 static_cast<double>(n) + mpz_log2(cumulative_ball_size(n, radius));
    return AdvantageBound{n, err, k, q, std::min(0.0, raw)};
}

namespace {

// Exact comparison sum >= P_A * 2^n for P_A = 2^target_log2.
// Integer targets use pure big-integer arithmetic; fractional targets use
// 256-bit floats and require the sum to sit clearly away from the threshold.
bool crossed(const mpz_class& sum, int64_t n, double target_log2) {
    double rounded = std::round(target_log2);
    if (target_log2 == rounded) {
        int64_t t = static_cast<int64_t>(rounded);
        mpz_class threshold = mpz_class(1) << static_cast<unsigned long>(n + t);
        return sum >= threshold;
    }
    double shifted = static_cast<double>(n) + target_log2;
    double int_part = std::floor(shifted);
    mpf_class threshold(std::exp2(shifted - int_part), 256);
    mpf_class scale(0, 256);
    mpf_mul_2exp(scale.get_mpf_t(), mpf_class(1, 256).get_mpf_t(),
                 static_cast<unsigned long>(int_part));
    threshold *= scale;
    mpf_class s(sum, 256);
    mpf_class rel = (s - threshold) / threshold;
    if (std::abs(rel.get_d()) < 1e-12)
        throw std::runtime_error("solve_boundary: threshold too close to certify");
    return s >= threshold;
}

}  // namespace

BoundaryResult solve_boundary(int64_t n, double target_pa_log2) {
    if (!(target_pa_log2 > -static_cast<double>(n)) || !(target_pa_log2 < 0.0))
        throw std::domain_error("solve_boundary: target_pa_log2 must lie in (-n, 0)");
    mpz_class sum = 0;
    mpz_class coeff = 1;
    mpz_class prev_sum = 0;
    for (int64_t radius = 0; radius <= n; ++radius) {
        prev_sum = sum;
        sum += coeff;
        if (crossed(sum, n, target_pa_log2)) {
            int64_t err_n = (radius + 1) / 2;
            BoundaryResult res;
            res.n = n;
            res.target_pa_log2 = target_pa_log2;
            res.err_n = err_n;
            res.r_n = 1.0 - static_cast<double>(err_n) / static_cast<double>(n);
            res.bracket_low_log2 =
                radius == 0 ? -std::numeric_limits<double>::infinity()
                            : mpz_log2(prev_sum) - static_cast<double>(n);
            res.bracket_high_log2 = mpz_log2(sum) - static_cast<double>(n);
            return res;
        }
        coeff *= n - radius;
        coeff /= radius + 1;
    }
    throw std::runtime_error("solve_boundary: infeasible target");
}

std::vector<std::pair<int64_t, double>> convergence_curve(
    double err_fraction, const std::vector<int64_t>& n_values) {
    if (!(err_fraction > 0.0) || !(err_fraction < 0.5))
        throw std::domain_error("convergence_curve: err_fraction must be in (0, 0.5)");
    std::vector<std::pair<int64_t, double>> out;
    out.reserve(n_values.size());
    for (int64_t n : n_values) {
        int64_t err = static_cast<int64_t>(err_fraction * static_cast<double>(n));
        mpz_class a = cumulative_ball_size(n, std::min<int64_t>(2 * err, n));
        out.emplace_back(n, 1.0 - mpz_log2(a) / static_cast<double>(n));
    }
    return out;
}

}  // namespace fedsov
