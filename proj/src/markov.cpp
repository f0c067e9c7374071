#include "corank/markov.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace corank::markov {

Dyadic qcl_entry(uint32_t i, int64_t j) {
    if (j < 0) return Dyadic(0);
    int64_t s = static_cast<int64_t>(i);
    if (j == s - 1) {
        // 1 + 2^-2i - 2^(1-i) = (2^2i + 1 - 2^(i+1)) / 2^2i
        BigInt num = BigInt::pow2(2 * i) + BigInt(1) - BigInt::pow2(i + 1);
        return Dyadic(std::move(num), 2 * i);
    }
    if (j == s) {
        // 2^(1-i) - 3 * 2^(-1-2i) = (2^(i+2) - 3) / 2^(2i+1)
        BigInt num = BigInt::pow2(i + 2) - BigInt(3);
        return Dyadic(std::move(num), 2 * i + 1);
    }
    if (j == s + 1) return Dyadic(BigInt(1), 2 * i + 1);
    return Dyadic(0);
}

TruncatedKernel qcl_truncated(uint32_t N) {
    if (N < 1) throw std::invalid_argument("qcl_truncated: N >= 1 required");
    TruncatedKernel k;
    k.N = N;
    k.rows.assign(N + 1, std::vector<Dyadic>(N + 1));
    for (uint32_t i = 0; i <= N; ++i)
        for (uint32_t j = 0; j <= N; ++j)
            k.rows[i][j] = qcl_entry(i, j);
    k.clipped_mass = qcl_entry(N, static_cast<int64_t>(N) + 1);
    k.rows[N][N] += k.clipped_mass;
    return k;
}

real eta_infinity(real precision, uint32_t* terms_out) {
    real prod = 1.0L;
    uint32_t j = 0;
    while (true) {
        ++j;
        real factor = 1.0L - std::ldexp(1.0L, -static_cast<int>(j));
        prod *= factor;
        if (1.0L - factor < precision || j >= 64000) break;
    }
    if (terms_out) *terms_out = j;
    return prod;
}

real eta_k(uint32_t k) {
    real prod = 1.0L;
    for (uint32_t j = 1; j <= k; ++j) prod *= 1.0L - std::ldexp(1.0L, -static_cast<int>(j));
    return prod;
}

real pi_cl(uint32_t j, real precision) {
    real e = eta_k(j);
    uint64_t jj = static_cast<uint64_t>(j) * j;
    if (jj > 16000) return 0.0L;  // below extended-precision range
    return std::ldexp(eta_infinity(precision) / (e * e), -static_cast<int>(jj));
}

real ProbVector::mass() const {
    real s = 0;
    for (real x : p) s += x;
    return s;
}

real ProbVector::leaked() const {
    real l = 1.0L - mass();
    return l > 0 ? l : 0.0L;
}

ProbVector pi_cl_vector(uint32_t N, real precision) {
    ProbVector v;
    v.p.resize(N + 1);
    real einf = eta_infinity(precision);
    real ej = 1.0L;
    for (uint32_t j = 0; j <= N; ++j) {
        if (j > 0) ej *= 1.0L - std::ldexp(1.0L, -static_cast<int>(j));
        uint64_t jj = static_cast<uint64_t>(j) * j;
        v.p[j] = jj > 16000 ? 0.0L : std::ldexp(einf / (ej * ej), -static_cast<int>(jj));
    }
    return v;
}

ProbVector propagate(const ProbVector& mu, const TruncatedKernel& k, uint32_t steps) {
    if (mu.p.size() != k.N + 1) throw std::invalid_argument("propagate: dimension mismatch");
    ProbVector cur = mu;
    ProbVector next;
    next.p.resize(k.N + 1);
    for (uint32_t s = 0; s < steps; ++s) {
        std::fill(next.p.begin(), next.p.end(), 0.0L);
        for (uint32_t x = 0; x <= k.N; ++x) {
            if (cur.p[x] == 0.0L) continue;
            uint32_t lo = x == 0 ? 0 : x - 1;
            uint32_t hi = x == k.N ? k.N : x + 1;
            for (uint32_t y = lo; y <= hi; ++y)
                next.p[y] += cur.p[x] * static_cast<real>(k.rows[x][y].to_long_double());
        }
        std::swap(cur.p, next.p);
    }
    return cur;
}

std::vector<Dyadic> propagate_exact(const std::vector<Dyadic>& mu, const TruncatedKernel& k, uint32_t steps) {
    if (mu.size() != k.N + 1) throw std::invalid_argument("propagate_exact: dimension mismatch");
    std::vector<Dyadic> cur = mu;
    for (uint32_t s = 0; s < steps; ++s) {
        std::vector<Dyadic> next(k.N + 1, Dyadic(0));
        for (uint32_t x = 0; x <= k.N; ++x) {
            if (cur[x].is_zero()) continue;
            uint32_t lo = x == 0 ? 0 : x - 1;
            uint32_t hi = x == k.N ? k.N : x + 1;
            for (uint32_t y = lo; y <= hi; ++y) next[y] += cur[x] * k.rows[x][y];
        }
        cur = std::move(next);
    }
    return cur;
}

real l1_distance(const ProbVector& mu, const ProbVector& nu) {
    size_t n = mu.p.size() > nu.p.size() ? mu.p.size() : nu.p.size();
    real s = 0;
    for (size_t j = 0; j < n; ++j) {
        real a = j < mu.p.size() ? mu.p[j] : 0.0L;
        real b = j < nu.p.size() ? nu.p[j] : 0.0L;
        s += a > b ? a - b : b - a;
    }
    return s + mu.leaked() + nu.leaked();
}

Dyadic l1_distance_exact(std::span<const Dyadic> mu, std::span<const Dyadic> nu) {
    size_t n = mu.size() > nu.size() ? mu.size() : nu.size();
    Dyadic s(0);
    Dyadic mass_mu(0), mass_nu(0);
    for (size_t j = 0; j < n; ++j) {
        Dyadic a = j < mu.size() ? mu[j] : Dyadic(0);
        Dyadic b = j < nu.size() ? nu[j] : Dyadic(0);
        s += (a - b).abs();
        mass_mu += a;
        mass_nu += b;
    }
    Dyadic one(1);
    if (mass_mu < one) s += one - mass_mu;
    if (mass_nu < one) s += one - mass_nu;
    return s;
}

Dyadic drift_ratio(uint32_t x) {
    if (x < 1) throw std::invalid_argument("drift_ratio: x >= 1 required");
    Dyadic down = qcl_entry(x, static_cast<int64_t>(x) - 1);
    Dyadic stay = qcl_entry(x, x);
    Dyadic up = qcl_entry(x, static_cast<int64_t>(x) + 1);
    // V(y) = 2^y: (down * 2^(x-1) + stay * 2^x + up * 2^(x+1)) / 2^x
    return down * Dyadic::pow2(-1) + stay + up * Dyadic::pow2(1);
}

DriftCertificate drift_certificate(uint32_t x_min, uint32_t x_max) {
    if (x_min < 1 || x_max < x_min) throw std::invalid_argument("drift_certificate: bad range");
    DriftCertificate c;
    Dyadic one(1);
    for (uint32_t x = x_min; x <= x_max; ++x) {
        Dyadic r = drift_ratio(x);
        if (x >= 3) {
            real v = r.to_long_double();
            if (v > c.lambda_sup_from_3) c.lambda_sup_from_3 = v;
        }
        if (r >= one) c.states_at_one.push_back(x);
        c.ratios.emplace_back(x, std::move(r));
    }
    return c;
}

StationarityResult stationarity_residual(uint32_t N, real precision) {
    if (N < 8) throw std::invalid_argument("stationarity_residual: N >= 8 required");
    StationarityResult r;
    r.N = N;
    ProbVector pi = pi_cl_vector(N, precision);
    TruncatedKernel k = qcl_truncated(N);
    ProbVector next = propagate(pi, k, 1);
    r.residual = l1_distance(next, pi);
    // per-entry eta truncation error, rounding accumulation across the N+1
    // states, the clipped boundary mass and the tail beyond the window
    real eps = std::numeric_limits<real>::epsilon();
    r.bound = 4.0L * precision * (N + 1) + 8.0L * eps * (N + 1) * (N + 1) +
              2.0L * pi.leaked() + 2.0L * static_cast<real>(k.clipped_mass.to_long_double());
    return r;
}

Dyadic stationarity_residual_dyadic(uint32_t N, uint32_t bits) {
    ProbVector pi = pi_cl_vector(N);
    std::vector<Dyadic> rounded(N + 1);
    for (uint32_t j = 0; j <= N; ++j) rounded[j] = Dyadic::from_long_double(pi.p[j], bits);
    TruncatedKernel k = qcl_truncated(N);
    std::vector<Dyadic> next = propagate_exact(rounded, k, 1);
    Dyadic s(0);
    for (uint32_t j = 0; j <= N; ++j) s += (next[j] - rounded[j]).abs();
    return s;
}

RateFit rate_fit(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw std::invalid_argument("rate_fit: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [r, d] : points) {
        if (!(d > 0)) throw std::invalid_argument("rate_fit: distances must be positive");
        double y = std::log(d);
        sx += r;
        sy += y;
        sxx += r * r;
        sxy += r * y;
    }
    double n = static_cast<double>(points.size());
    double denom = n * sxx - sx * sx;
    if (denom == 0) throw std::invalid_argument("rate_fit: degenerate abscissae");
    double slope = (n * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / n;
    RateFit f;
    f.rho_hat = std::exp(slope);
    f.c_hat = std::exp(intercept);
    double ss = 0;
    for (auto [r, d] : points) {
        double e = std::log(d) - (slope * r + intercept);
        ss += e * e;
    }
    f.rms_residual = std::sqrt(ss / n);
    f.points = points.size();
    return f;
}

}  // namespace corank::markov
