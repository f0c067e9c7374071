#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace corank {

// Arbitrary-precision signed integer, sign/magnitude over 64-bit limbs.
// Only the operations needed for exact dyadic probability bookkeeping are
// provided: ring arithmetic, shifts, comparisons, decimal printing and a
// lossy conversion to long double.
class BigInt {
public:
    BigInt() = default;
    BigInt(int64_t v);
    static BigInt from_u64(uint64_t v);
    static BigInt pow2(uint32_t k);
    static BigInt binomial(uint32_t n, uint32_t k);

    bool is_zero() const { return limbs_.empty(); }
    bool is_negative() const { return neg_; }
    bool is_even() const { return limbs_.empty() || (limbs_[0] & 1u) == 0; }
    int sign() const { return limbs_.empty() ? 0 : (neg_ ? -1 : 1); }

    BigInt operator-() const;
    BigInt operator+(const BigInt& o) const;
    BigInt operator-(const BigInt& o) const;
    BigInt operator*(const BigInt& o) const;
    BigInt& operator+=(const BigInt& o) { *this = *this + o; return *this; }
    BigInt& operator-=(const BigInt& o) { *this = *this - o; return *this; }

    BigInt shifted_left(uint32_t bits) const;
    BigInt shifted_right(uint32_t bits) const;  // shifts the magnitude

    bool operator==(const BigInt& o) const { return neg_ == o.neg_ && limbs_ == o.limbs_; }
    bool operator!=(const BigInt& o) const { return !(*this == o); }
    bool operator<(const BigInt& o) const;
    bool operator<=(const BigInt& o) const { return *this < o || *this == o; }
    bool operator>(const BigInt& o) const { return o < *this; }
    bool operator>=(const BigInt& o) const { return o <= *this; }

    uint32_t trailing_zero_bits() const;  // 0 for zero
    uint32_t bit_length() const;          // 0 for zero
    uint64_t low_u64() const { return limbs_.empty() ? 0 : limbs_[0]; }

    long double to_long_double() const;
    // top 64 bits of the magnitude plus the power-of-two scale they carry,
    // so value = +-mantissa * 2^scale_exp without intermediate overflow
    void top_mantissa(uint64_t& mantissa, int64_t& scale_exp) const;

    std::string to_string() const;  // decimal

private:
    bool neg_ = false;
    std::vector<uint64_t> limbs_;  // little-endian magnitude, no leading zeros

    void trim();
    static int cmp_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b);
    static std::vector<uint64_t> add_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b);
    static std::vector<uint64_t> sub_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b);
    uint64_t divmod_small(uint64_t divisor);  // in place, returns remainder
};

}  // namespace corank
