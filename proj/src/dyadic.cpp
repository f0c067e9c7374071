#include "corank/dyadic.hpp"

#include <cmath>
#include <stdexcept>

namespace corank {

void Dyadic::canonicalize() {
    if (num_.is_zero()) {
        exp_ = 0;
        return;
    }
    uint32_t tz = num_.trailing_zero_bits();
    uint32_t drop = tz < exp_ ? tz : exp_;
    if (drop) {
        num_ = num_.shifted_right(drop);
        exp_ -= drop;
    }
}

Dyadic Dyadic::operator+(const Dyadic& o) const {
    uint32_t e = exp_ > o.exp_ ? exp_ : o.exp_;
    BigInt a = num_.shifted_left(e - exp_);
    BigInt b = o.num_.shifted_left(e - o.exp_);
    return Dyadic(a + b, e);
}

long double Dyadic::to_long_double() const {
    uint64_t m;
    int64_t scale;
    num_.top_mantissa(m, scale);
    long double v = std::ldexp(static_cast<long double>(m), static_cast<int>(scale - exp_));
    return num_.is_negative() ? -v : v;
}

std::string Dyadic::to_string() const {
    if (exp_ == 0) return num_.to_string();
    return num_.to_string() + "/2^" + std::to_string(exp_);
}

Dyadic Dyadic::from_long_double(long double x, uint32_t bits) {
    if (!std::isfinite(x)) throw std::invalid_argument("from_long_double: non-finite");
    long double scaled = std::ldexp(x, static_cast<int>(bits));
    long double rounded = std::round(std::fabs(scaled));
    // peel 48-bit chunks into a BigInt
    BigInt mag(0);
    BigInt chunk_base = BigInt::pow2(48);
    long double rest = rounded;
    std::vector<long double> parts;
    while (rest >= 1.0L) {
        long double hi = std::floor(std::ldexp(rest, -48));
        long double lo = rest - std::ldexp(hi, 48);
        parts.push_back(lo);
        rest = hi;
    }
    for (size_t i = parts.size(); i-- > 0;) {
        mag = mag * chunk_base + BigInt::from_u64(static_cast<uint64_t>(parts[i]));
    }
    if (x < 0) mag = -mag;
    return Dyadic(mag, bits);
}

}  // namespace corank
