#include "corank/bigint.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace corank {

BigInt::BigInt(int64_t v) {
    if (v == 0) return;
    neg_ = v < 0;
    uint64_t m = neg_ ? (~static_cast<uint64_t>(v) + 1) : static_cast<uint64_t>(v);
    limbs_.push_back(m);
}

BigInt BigInt::from_u64(uint64_t v) {
    BigInt r;
    if (v) r.limbs_.push_back(v);
    return r;
}

BigInt BigInt::pow2(uint32_t k) {
    BigInt r;
    r.limbs_.assign(k / 64 + 1, 0);
    r.limbs_.back() = uint64_t(1) << (k % 64);
    return r;
}

BigInt BigInt::binomial(uint32_t n, uint32_t k) {
    if (k > n) return BigInt(0);
    if (k > n - k) k = n - k;
    BigInt c(1);
    for (uint32_t i = 1; i <= k; ++i) {
        c = c * BigInt::from_u64(n - k + i);
        uint64_t rem = c.divmod_small(i);
        if (rem != 0) throw std::logic_error("binomial: non-exact division");
    }
    return c;
}

void BigInt::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) neg_ = false;
}

int BigInt::cmp_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

std::vector<uint64_t> BigInt::add_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b) {
    const std::vector<uint64_t>& lo = a.size() < b.size() ? a : b;
    const std::vector<uint64_t>& hi = a.size() < b.size() ? b : a;
    std::vector<uint64_t> r(hi.size() + 1, 0);
    unsigned carry = 0;
    for (size_t i = 0; i < hi.size(); ++i) {
        __uint128_t s = static_cast<__uint128_t>(hi[i]) + (i < lo.size() ? lo[i] : 0) + carry;
        r[i] = static_cast<uint64_t>(s);
        carry = static_cast<unsigned>(s >> 64);
    }
    r[hi.size()] = carry;
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

// requires |a| >= |b|
std::vector<uint64_t> BigInt::sub_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b) {
    std::vector<uint64_t> r(a.size(), 0);
    unsigned borrow = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        uint64_t bi = i < b.size() ? b[i] : 0;
        uint64_t d = a[i] - bi - borrow;
        borrow = (a[i] < bi + static_cast<__uint128_t>(borrow)) ? 1 : 0;
        r[i] = d;
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

BigInt BigInt::operator-() const {
    BigInt r = *this;
    if (!r.limbs_.empty()) r.neg_ = !r.neg_;
    return r;
}

BigInt BigInt::operator+(const BigInt& o) const {
    BigInt r;
    if (neg_ == o.neg_) {
        r.limbs_ = add_mag(limbs_, o.limbs_);
        r.neg_ = neg_;
    } else {
        int c = cmp_mag(limbs_, o.limbs_);
        if (c == 0) return BigInt();
        if (c > 0) {
            r.limbs_ = sub_mag(limbs_, o.limbs_);
            r.neg_ = neg_;
        } else {
            r.limbs_ = sub_mag(o.limbs_, limbs_);
            r.neg_ = o.neg_;
        }
    }
    r.trim();
    return r;
}

BigInt BigInt::operator-(const BigInt& o) const { return *this + (-o); }

BigInt BigInt::operator*(const BigInt& o) const {
    if (is_zero() || o.is_zero()) return BigInt();
    BigInt r;
    r.limbs_.assign(limbs_.size() + o.limbs_.size(), 0);
    for (size_t i = 0; i < limbs_.size(); ++i) {
        uint64_t carry = 0;
        for (size_t j = 0; j < o.limbs_.size(); ++j) {
            __uint128_t cur = static_cast<__uint128_t>(limbs_[i]) * o.limbs_[j] + r.limbs_[i + j] + carry;
            r.limbs_[i + j] = static_cast<uint64_t>(cur);
            carry = static_cast<uint64_t>(cur >> 64);
        }
        r.limbs_[i + o.limbs_.size()] += carry;
    }
    r.neg_ = neg_ != o.neg_;
    r.trim();
    return r;
}

BigInt BigInt::shifted_left(uint32_t bits) const {
    if (is_zero() || bits == 0) return *this;
    BigInt r;
    uint32_t words = bits / 64, sh = bits % 64;
    r.limbs_.assign(limbs_.size() + words + 1, 0);
    for (size_t i = 0; i < limbs_.size(); ++i) {
        r.limbs_[i + words] |= sh ? (limbs_[i] << sh) : limbs_[i];
        if (sh) r.limbs_[i + words + 1] |= limbs_[i] >> (64 - sh);
    }
    r.neg_ = neg_;
    r.trim();
    return r;
}

BigInt BigInt::shifted_right(uint32_t bits) const {
    if (is_zero()) return *this;
    uint32_t words = bits / 64, sh = bits % 64;
    if (words >= limbs_.size()) return BigInt();
    BigInt r;
    r.limbs_.assign(limbs_.size() - words, 0);
    for (size_t i = 0; i < r.limbs_.size(); ++i) {
        r.limbs_[i] = limbs_[i + words] >> sh;
        if (sh && i + words + 1 < limbs_.size()) r.limbs_[i] |= limbs_[i + words + 1] << (64 - sh);
    }
    r.neg_ = neg_;
    r.trim();
    return r;
}

bool BigInt::operator<(const BigInt& o) const {
    if (neg_ != o.neg_) return neg_;
    int c = cmp_mag(limbs_, o.limbs_);
    return neg_ ? c > 0 : c < 0;
}

uint32_t BigInt::trailing_zero_bits() const {
    if (is_zero()) return 0;
    uint32_t n = 0;
    for (size_t i = 0; i < limbs_.size(); ++i) {
        if (limbs_[i] == 0) {
            n += 64;
        } else {
            n += static_cast<uint32_t>(std::countr_zero(limbs_[i]));
            break;
        }
    }
    return n;
}

uint32_t BigInt::bit_length() const {
    if (is_zero()) return 0;
    return static_cast<uint32_t>((limbs_.size() - 1) * 64 + (64 - std::countl_zero(limbs_.back())));
}

void BigInt::top_mantissa(uint64_t& mantissa, int64_t& scale_exp) const {
    if (is_zero()) {
        mantissa = 0;
        scale_exp = 0;
        return;
    }
    uint32_t bl = bit_length();
    if (bl <= 64) {
        mantissa = limbs_[0];
        scale_exp = 0;
        return;
    }
    BigInt top = shifted_right(bl - 64);
    mantissa = top.limbs_[0];
    scale_exp = static_cast<int64_t>(bl) - 64;
}

long double BigInt::to_long_double() const {
    uint64_t m;
    int64_t e;
    top_mantissa(m, e);
    long double v = std::ldexp(static_cast<long double>(m), static_cast<int>(e));
    return neg_ ? -v : v;
}

uint64_t BigInt::divmod_small(uint64_t divisor) {
    if (divisor == 0) throw std::invalid_argument("division by zero");
    __uint128_t rem = 0;
    for (size_t i = limbs_.size(); i-- > 0;) {
        __uint128_t cur = (rem << 64) | limbs_[i];
        limbs_[i] = static_cast<uint64_t>(cur / divisor);
        rem = cur % divisor;
    }
    trim();
    return static_cast<uint64_t>(rem);
}

std::string BigInt::to_string() const {
    if (is_zero()) return "0";
    BigInt tmp = *this;
    std::vector<uint64_t> chunks;
    constexpr uint64_t kChunk = 1000000000000000000ull;  // 10^18
    while (!tmp.is_zero()) chunks.push_back(tmp.divmod_small(kChunk));
    std::string s = neg_ ? "-" : "";
    s += std::to_string(chunks.back());
    for (size_t i = chunks.size() - 1; i-- > 0;) {
        std::string part = std::to_string(chunks[i]);
        s += std::string(18 - part.size(), '0') + part;
    }
    return s;
}

}  // namespace corank
