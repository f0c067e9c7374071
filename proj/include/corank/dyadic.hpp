#pragma once

#include <cstdint>
#include <string>

#include "corank/bigint.hpp"

namespace corank {

// Exact dyadic rational num / 2^exp. Canonical form keeps num odd whenever
// exp > 0 (an even num with exp == 0 is already fully reduced).
class Dyadic {
public:
    Dyadic() = default;
    Dyadic(int64_t integer) : num_(integer) {}
    Dyadic(BigInt num, uint32_t exp) : num_(std::move(num)), exp_(exp) { canonicalize(); }

    static Dyadic ratio_pow2(int64_t num, uint32_t exp) { return Dyadic(BigInt(num), exp); }
    // 2^k for any integer k
    static Dyadic pow2(int64_t k) {
        if (k >= 0) return Dyadic(BigInt::pow2(static_cast<uint32_t>(k)), 0);
        return Dyadic(BigInt(1), static_cast<uint32_t>(-k));
    }

    const BigInt& num() const { return num_; }
    uint32_t exp() const { return exp_; }
    bool is_zero() const { return num_.is_zero(); }
    int sign() const { return num_.sign(); }

    Dyadic operator-() const { return Dyadic(-num_, exp_); }
    Dyadic operator+(const Dyadic& o) const;
    Dyadic operator-(const Dyadic& o) const { return *this + (-o); }
    Dyadic operator*(const Dyadic& o) const { return Dyadic(num_ * o.num_, exp_ + o.exp_); }
    Dyadic& operator+=(const Dyadic& o) { *this = *this + o; return *this; }
    Dyadic abs() const { return sign() < 0 ? -*this : *this; }

    bool operator==(const Dyadic& o) const { return num_ == o.num_ && exp_ == o.exp_; }
    bool operator!=(const Dyadic& o) const { return !(*this == o); }
    bool operator<(const Dyadic& o) const { return (*this - o).sign() < 0; }
    bool operator<=(const Dyadic& o) const { return (*this - o).sign() <= 0; }
    bool operator>(const Dyadic& o) const { return o < *this; }
    bool operator>=(const Dyadic& o) const { return o <= *this; }

    long double to_long_double() const;
    double to_double() const { return static_cast<double>(to_long_double()); }

    // "num" when exp == 0, otherwise "num/2^exp"
    std::string to_string() const;

    // nearest dyadic multiple of 2^-bits (ties away from zero)
    static Dyadic from_long_double(long double x, uint32_t bits);

private:
    BigInt num_;
    uint32_t exp_ = 0;

    void canonicalize();
};

}  // namespace corank
