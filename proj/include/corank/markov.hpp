#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "corank/dyadic.hpp"

namespace corank::markov {

// 80-bit extended precision: the stationary masses decay like 2^(-j^2) and
// fall out of double range near j = 33, while extended range keeps every
// entry of a 64-state truncation strictly positive.
using real = long double;

// Corank transition kernel of uniform row/column extension. Rows are
// tridiagonal and sum to exactly 1; entries outside {i-1, i, i+1} are zero.
Dyadic qcl_entry(uint32_t i, int64_t j);

struct TruncatedKernel {
    uint32_t N = 0;
    std::vector<std::vector<Dyadic>> rows;  // (N+1) x (N+1)
    Dyadic clipped_mass;  // up-transition mass folded onto the diagonal at row N
};

// states 0..N; the up-move at row N is clipped onto the diagonal so the row
// stays stochastic (that mass is 2^(-1-2N))
TruncatedKernel qcl_truncated(uint32_t N);

// partial product of (1 - 2^-j), stopping once the update is within
// `precision` of 1; absolute error is below 2 * precision
real eta_infinity(real precision, uint32_t* terms_out = nullptr);
real eta_k(uint32_t k);

// stationary corank law pi(j) = 2^(-j^2) * eta_inf / eta_j^2
real pi_cl(uint32_t j, real precision = 1e-18L);

struct ProbVector {
    std::vector<real> p;
    real mass() const;
    real leaked() const;  // 1 - mass, floored at 0
};

ProbVector pi_cl_vector(uint32_t N, real precision = 1e-18L);

ProbVector propagate(const ProbVector& mu, const TruncatedKernel& k, uint32_t steps);
std::vector<Dyadic> propagate_exact(const std::vector<Dyadic>& mu, const TruncatedKernel& k, uint32_t steps);

// sum of |mu - nu| padded with zeros, plus both leaked masses
real l1_distance(const ProbVector& mu, const ProbVector& nu);
Dyadic l1_distance_exact(std::span<const Dyadic> mu, std::span<const Dyadic> nu);

// [Q(x,x-1) 2^(x-1) + Q(x,x) 2^x + Q(x,x+1) 2^(x+1)] / 2^x, exactly; x >= 1.
// Simplifies to 1/2 + 2^-x.
Dyadic drift_ratio(uint32_t x);

struct DriftCertificate {
    real lambda_sup_from_3 = 0;           // sup of the ratio over x >= 3 in range
    std::vector<uint32_t> states_at_one;  // states in range with ratio >= 1
    std::vector<std::pair<uint32_t, Dyadic>> ratios;
};
DriftCertificate drift_certificate(uint32_t x_min, uint32_t x_max);

struct StationarityResult {
    uint32_t N = 0;
    real residual = 0;
    real bound = 0;  // combined truncation/clipping error estimate
};
StationarityResult stationarity_residual(uint32_t N, real precision = 1e-18L);

// same residual computed entirely in dyadic arithmetic after rounding the
// stationary vector to multiples of 2^-bits; nonzero since eta_inf is
// irrational, but tiny
Dyadic stationarity_residual_dyadic(uint32_t N, uint32_t bits);

struct RateFit {
    double rho_hat = 0;
    double c_hat = 0;
    double rms_residual = 0;
    size_t points = 0;
};

// ordinary least squares on (r, log distance); throws on nonpositive
// distance or fewer than two points
RateFit rate_fit(std::span<const std::pair<double, double>> points);

}  // namespace corank::markov
