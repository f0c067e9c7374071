#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace corank::f2 {

using word = uint64_t;
inline constexpr uint32_t kWordBits = 64;
inline uint32_t words_for(uint32_t bits) { return (bits + kWordBits - 1) / kWordBits; }

// Bit-packed vector over F2. Public indexing is 1-based.
class F2Vector {
public:
    F2Vector() = default;
    explicit F2Vector(uint32_t len) : len_(len), w_(words_for(len), 0) {}

    static F2Vector ones(uint32_t len);                       // all entries 1
    static F2Vector ones_prefix(uint32_t len, uint32_t k);    // first k entries 1
    static F2Vector unit(uint32_t len, uint32_t i);           // e_i, 1-based
    static F2Vector from_bits(std::initializer_list<int> bits);
    static F2Vector from_string(std::string_view s);          // e.g. "0110"

    uint32_t len() const { return len_; }
    int get(uint32_t i) const {  // i in [1, len]
        return static_cast<int>((w_[(i - 1) / kWordBits] >> ((i - 1) % kWordBits)) & 1u);
    }
    void set(uint32_t i, int bit) {
        word mask = word(1) << ((i - 1) % kWordBits);
        if (bit) w_[(i - 1) / kWordBits] |= mask;
        else w_[(i - 1) / kWordBits] &= ~mask;
    }

    void push_bit(int bit);
    void pop_bit();
    void reset(uint32_t len) { len_ = len; w_.assign(words_for(len), 0); }

    void xor_with(const F2Vector& o);
    int inner(const F2Vector& o) const;  // parity of componentwise AND
    bool is_zero() const;
    int parity() const;  // parity of the number of ones

    bool operator==(const F2Vector& o) const { return len_ == o.len_ && w_ == o.w_; }
    bool operator!=(const F2Vector& o) const { return !(*this == o); }

    std::string to_string() const;
    std::span<const word> words() const { return w_; }
    std::span<word> words_mut() { return w_; }
    uint64_t packed_low() const { return w_.empty() ? 0 : w_[0]; }  // first 64 coordinates

private:
    uint32_t len_ = 0;
    std::vector<word> w_;
};

enum class TransitionClass : int { Down = -1, Same = 0, Up = 1 };
inline int delta(TransitionClass t) { return static_cast<int>(t); }

// Square bit-packed matrix over F2. Entry (i, j) is bit j of row i, 1-based.
// The empty 0x0 matrix is legal (rank 0, corank 0) and is the seed every
// growth rule starts from.
class F2Matrix {
public:
    F2Matrix() = default;
    explicit F2Matrix(uint32_t n) : n_(n), rows_(n, F2Vector(n)) {}

    static F2Matrix identity(uint32_t n);
    static F2Matrix from_rows(std::initializer_list<std::string_view> rows);
    static F2Matrix parse(std::string_view rows_joined);  // "01;10"

    uint32_t n() const { return n_; }
    int get(uint32_t i, uint32_t j) const { return rows_[i - 1].get(j); }
    void set(uint32_t i, uint32_t j, int bit) { rows_[i - 1].set(j, bit); }
    const F2Vector& row(uint32_t i) const { return rows_[i - 1]; }
    F2Vector column(uint32_t j) const;

    F2Matrix transposed() const;

    // grow by one row v, one column w and corner c; v, w have length n
    void extend_inplace(const F2Vector& v, const F2Vector& w, int c);
    void shrink_inplace();  // undo of extend_inplace

    bool operator==(const F2Matrix& o) const { return n_ == o.n_ && rows_ == o.rows_; }

    std::string to_string() const;

private:
    uint32_t n_ = 0;
    std::vector<F2Vector> rows_;
};

uint32_t rank(const F2Matrix& a);
inline uint32_t corank(const F2Matrix& a) { return a.n() - rank(a); }

F2Vector matvec(const F2Matrix& a, const F2Vector& x);
int inner(const F2Vector& v, const F2Vector& w);

bool in_image(const F2Matrix& a, const F2Vector& v);          // exists x: Ax = v
std::optional<F2Vector> solve(const F2Matrix& a, const F2Vector& v);

// <A^-1 v, w>; well defined when v is in Im(A) and w is in Im(A^T),
// otherwise throws std::domain_error("pairing undefined")
int pairing(const F2Matrix& a, const F2Vector& v, const F2Vector& w);

F2Matrix extend(const F2Matrix& a, const F2Vector& v, const F2Vector& w, int c);
TransitionClass classify_transition(const F2Matrix& a, const F2Vector& v, const F2Vector& w, int c);

bool kernel_intersection_trivial(const F2Matrix& a);  // ker(A) /\ ker(A^T) = {0}
uint32_t image_sum_dim(const F2Matrix& a);            // dim(Im(A) + Im(A^T))
std::vector<F2Vector> kernel_basis(const F2Matrix& a);

// classifies many extensions against one fixed matrix; the row/column
// eliminations are done once at construction
class TransitionOracle {
public:
    explicit TransitionOracle(const F2Matrix& a);
    ~TransitionOracle();
    TransitionOracle(const TransitionOracle&) = delete;
    TransitionOracle& operator=(const TransitionOracle&) = delete;
    TransitionClass classify(const F2Vector& v, const F2Vector& w, int c) const;

private:
    struct Impl;
    Impl* impl_;
};

// Incremental growth state: maintains rank, row-space and column-space
// elimination data across extend steps, so one step costs O(n^2 / 64)
// instead of a fresh O(n^3 / 64) elimination.
class GrowthSimulator {
public:
    // track_matrix keeps the grown matrix available for detector queries;
    // plain corank sampling can switch it off
    explicit GrowthSimulator(uint32_t capacity, bool track_matrix = true);

    void reset();
    uint32_t size() const { return size_; }
    uint32_t rank() const { return rank_; }
    uint32_t corank() const { return size_ - rank_; }
    const F2Matrix& matrix() const;

    TransitionClass step(const F2Vector& v, const F2Vector& w, int c);

private:
    // online tracked elimination over a growing ambient space; elements live
    // in a preallocated arena so steady-state stepping never allocates
    struct Span {
        uint32_t cap_words = 0;
        uint32_t ambient = 0;  // current vector length
        uint32_t gens = 0;     // generators inserted so far
        struct Elem {
            std::vector<word> vec;   // combination of generators
            std::vector<word> comb;  // which generators (bitset over insertion order)
        };
        std::vector<Elem> arena;
        uint32_t used = 0;
        std::vector<uint32_t> pivot_elems;     // arena indices, vec != 0, distinct pivots
        std::vector<uint32_t> relation_elems;  // arena indices, vec == 0
        std::vector<int32_t> pivot_at;         // bit position -> arena index

        void init(uint32_t capacity);
        void reset();
        bool contains(std::span<const word> v) const;
        // reduces v, filling comb with the generator combination; false if not in span
        bool solve(std::span<const word> v, std::span<word> comb_out) const;
        // every generator gains one trailing coordinate; newcoord is indexed by generator
        void append_coordinate(std::span<const word> newcoord);
        void add_generator(std::span<const word> vec);
        uint32_t rank() const { return static_cast<uint32_t>(pivot_elems.size()); }
    };

    uint32_t capacity_;
    bool track_matrix_;
    uint32_t size_ = 0;
    uint32_t rank_ = 0;
    F2Matrix mat_;
    Span rowspace_;  // generators = rows of A; membership test for Im(A^T)
    Span colspace_;  // generators = columns of A; membership test for Im(A)
    std::vector<word> scratch_, comb_scratch_;
};

}  // namespace corank::f2
