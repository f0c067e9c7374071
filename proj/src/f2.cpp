#include "corank/f2.hpp"

#include <bit>
#include <cassert>
#include <stdexcept>

namespace corank::f2 {

namespace {

int parity_words(std::span<const word> a) {
    word x = 0;
    for (word w : a) x ^= w;
    return std::popcount(x) & 1;
}

int inner_words(std::span<const word> a, std::span<const word> b) {
    word x = 0;
    size_t n = a.size() < b.size() ? a.size() : b.size();
    for (size_t i = 0; i < n; ++i) x ^= a[i] & b[i];
    return std::popcount(x) & 1;
}

void xor_words(std::span<word> dst, std::span<const word> src) {
    for (size_t i = 0; i < src.size() && i < dst.size(); ++i) dst[i] ^= src[i];
}

bool is_zero_words(std::span<const word> a) {
    for (word w : a) if (w) return false;
    return true;
}

int lowest_bit(std::span<const word> a) {
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i]) return static_cast<int>(i * kWordBits + std::countr_zero(a[i]));
    }
    return -1;
}

}  // namespace

F2Vector F2Vector::ones(uint32_t len) { return ones_prefix(len, len); }

F2Vector F2Vector::ones_prefix(uint32_t len, uint32_t k) {
    F2Vector v(len);
    for (uint32_t i = 1; i <= k; ++i) v.set(i, 1);
    return v;
}

F2Vector F2Vector::unit(uint32_t len, uint32_t i) {
    F2Vector v(len);
    v.set(i, 1);
    return v;
}

F2Vector F2Vector::from_bits(std::initializer_list<int> bits) {
    F2Vector v(static_cast<uint32_t>(bits.size()));
    uint32_t i = 1;
    for (int b : bits) v.set(i++, b ? 1 : 0);
    return v;
}

F2Vector F2Vector::from_string(std::string_view s) {
    F2Vector v(static_cast<uint32_t>(s.size()));
    for (uint32_t i = 0; i < s.size(); ++i) {
        if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("F2Vector: expected 0/1 string");
        v.set(i + 1, s[i] == '1');
    }
    return v;
}

void F2Vector::push_bit(int bit) {
    ++len_;
    if (words_for(len_) > w_.size()) w_.push_back(0);
    set(len_, bit);
}

void F2Vector::pop_bit() {
    set(len_, 0);
    --len_;
    if (words_for(len_) < w_.size()) w_.pop_back();
}

void F2Vector::xor_with(const F2Vector& o) {
    if (len_ != o.len_) throw std::invalid_argument("F2Vector: length mismatch");
    for (size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
}

int F2Vector::inner(const F2Vector& o) const {
    if (len_ != o.len_) throw std::invalid_argument("F2Vector: length mismatch");
    return inner_words(w_, o.w_);
}

bool F2Vector::is_zero() const { return is_zero_words(w_); }

int F2Vector::parity() const { return parity_words(w_); }

std::string F2Vector::to_string() const {
    std::string s(len_, '0');
    for (uint32_t i = 1; i <= len_; ++i) if (get(i)) s[i - 1] = '1';
    return s;
}

F2Matrix F2Matrix::identity(uint32_t n) {
    F2Matrix m(n);
    for (uint32_t i = 1; i <= n; ++i) m.set(i, i, 1);
    return m;
}

F2Matrix F2Matrix::from_rows(std::initializer_list<std::string_view> rows) {
    F2Matrix m(static_cast<uint32_t>(rows.size()));
    uint32_t i = 1;
    for (auto r : rows) {
        if (r.size() != m.n_) throw std::invalid_argument("F2Matrix: not square");
        m.rows_[i - 1] = F2Vector::from_string(r);
        ++i;
    }
    return m;
}

F2Matrix F2Matrix::parse(std::string_view s) {
    std::vector<std::string_view> parts;
    size_t pos = 0;
    if (!s.empty()) {
        while (true) {
            size_t semi = s.find(';', pos);
            parts.push_back(s.substr(pos, semi == std::string_view::npos ? semi : semi - pos));
            if (semi == std::string_view::npos) break;
            pos = semi + 1;
        }
    }
    F2Matrix m(static_cast<uint32_t>(parts.size()));
    for (uint32_t i = 0; i < parts.size(); ++i) {
        if (parts[i].size() != m.n_) throw std::invalid_argument("F2Matrix: not square");
        m.rows_[i] = F2Vector::from_string(parts[i]);
    }
    return m;
}

F2Vector F2Matrix::column(uint32_t j) const {
    F2Vector c(n_);
    for (uint32_t i = 1; i <= n_; ++i) c.set(i, get(i, j));
    return c;
}

F2Matrix F2Matrix::transposed() const {
    F2Matrix t(n_);
    for (uint32_t i = 1; i <= n_; ++i)
        for (uint32_t j = 1; j <= n_; ++j)
            if (get(i, j)) t.set(j, i, 1);
    return t;
}

void F2Matrix::extend_inplace(const F2Vector& v, const F2Vector& w, int c) {
    if (v.len() != n_ || w.len() != n_) throw std::invalid_argument("extend: length mismatch");
    for (uint32_t k = 1; k <= n_; ++k) rows_[k - 1].push_bit(w.get(k));
    F2Vector last(n_ + 1);
    for (uint32_t j = 1; j <= n_; ++j) last.set(j, v.get(j));
    last.set(n_ + 1, c);
    rows_.push_back(std::move(last));
    ++n_;
}

void F2Matrix::shrink_inplace() {
    if (n_ == 0) throw std::logic_error("shrink of empty matrix");
    rows_.pop_back();
    --n_;
    for (auto& r : rows_) r.pop_bit();
}

std::string F2Matrix::to_string() const {
    std::string s;
    for (uint32_t i = 1; i <= n_; ++i) {
        if (i > 1) s += ';';
        s += rows_[i - 1].to_string();
    }
    return s;
}

uint32_t rank(const F2Matrix& a) {
    uint32_t n = a.n();
    if (n == 0) return 0;
    uint32_t nw = words_for(n);
    std::vector<word> buf(static_cast<size_t>(n) * nw);
    for (uint32_t i = 0; i < n; ++i) {
        auto r = a.row(i + 1).words();
        for (uint32_t k = 0; k < nw; ++k) buf[i * nw + k] = r[k];
    }
    uint32_t rk = 0;
    for (uint32_t i = 0; i < n; ++i) {
        std::span<word> row(&buf[i * nw], nw);
        int p = lowest_bit(row);
        if (p < 0) continue;
        ++rk;
        for (uint32_t j = i + 1; j < n; ++j) {
            std::span<word> other(&buf[j * nw], nw);
            if ((other[p / kWordBits] >> (p % kWordBits)) & 1u) xor_words(other, row);
        }
    }
    return rk;
}

F2Vector matvec(const F2Matrix& a, const F2Vector& x) {
    if (x.len() != a.n()) throw std::invalid_argument("matvec: length mismatch");
    F2Vector y(a.n());
    for (uint32_t i = 1; i <= a.n(); ++i) y.set(i, a.row(i).inner(x));
    return y;
}

int inner(const F2Vector& v, const F2Vector& w) { return v.inner(w); }

namespace {

// tracked elimination over the columns of A: supports membership in Im(A)
// and recovery of a solution x of Ax = v as the generator combination
struct ColumnSolver {
    uint32_t n, nw, cw;
    std::vector<std::vector<word>> vec, comb;
    std::vector<int32_t> pivot_at;

    explicit ColumnSolver(const F2Matrix& a, bool use_rows = false)
        : n(a.n()), nw(words_for(n ? n : 1)), cw(nw), pivot_at(n, -1) {
        for (uint32_t j = 1; j <= n; ++j) {
            std::vector<word> v(nw, 0), c(cw, 0);
            F2Vector gen = use_rows ? a.row(j) : a.column(j);
            auto gw = gen.words();
            for (uint32_t k = 0; k < gw.size(); ++k) v[k] = gw[k];
            c[(j - 1) / kWordBits] |= word(1) << ((j - 1) % kWordBits);
            insert(std::move(v), std::move(c));
        }
    }

    void insert(std::vector<word> v, std::vector<word> c) {
        while (true) {
            int p = lowest_bit(v);
            if (p < 0) return;  // dependent generator
            if (pivot_at[p] < 0) {
                pivot_at[p] = static_cast<int32_t>(vec.size());
                vec.push_back(std::move(v));
                comb.push_back(std::move(c));
                return;
            }
            xor_words(v, vec[pivot_at[p]]);
            xor_words(c, comb[pivot_at[p]]);
        }
    }

    bool reduce(const F2Vector& target, F2Vector* solution) const {
        std::vector<word> v(target.words().begin(), target.words().end());
        v.resize(nw, 0);
        std::vector<word> c(cw, 0);
        while (true) {
            int p = lowest_bit(v);
            if (p < 0) break;
            if (pivot_at[p] < 0) return false;
            xor_words(v, vec[pivot_at[p]]);
            xor_words(c, comb[pivot_at[p]]);
        }
        if (solution) {
            *solution = F2Vector(n);
            auto sw = solution->words_mut();
            for (uint32_t k = 0; k < sw.size(); ++k) sw[k] = c[k];
        }
        return true;
    }
};

}  // namespace

bool in_image(const F2Matrix& a, const F2Vector& v) {
    if (v.len() != a.n()) throw std::invalid_argument("in_image: length mismatch");
    return ColumnSolver(a).reduce(v, nullptr);
}

std::optional<F2Vector> solve(const F2Matrix& a, const F2Vector& v) {
    if (v.len() != a.n()) throw std::invalid_argument("solve: length mismatch");
    F2Vector x;
    if (!ColumnSolver(a).reduce(v, &x)) return std::nullopt;
    return x;
}

int pairing(const F2Matrix& a, const F2Vector& v, const F2Vector& w) {
    auto x = solve(a, v);
    if (!x || !in_image(a.transposed(), w)) throw std::domain_error("pairing undefined");
    return x->inner(w);
}

F2Matrix extend(const F2Matrix& a, const F2Vector& v, const F2Vector& w, int c) {
    F2Matrix m = a;
    m.extend_inplace(v, w, c);
    return m;
}

// The appended ROW v must lie in the row space and the appended COLUMN w in
// the column space for the corank to grow; the corner then has to equal
// <x, w> for the row combination x with A^T x = v (equivalently <y, v> for
// A y = w). Exhaustive recomputation of coranks pins this orientation.
TransitionClass classify_transition(const F2Matrix& a, const F2Vector& v, const F2Vector& w, int c) {
    ColumnSolver cols(a);
    ColumnSolver rows(a, /*use_rows=*/true);
    F2Vector x;
    bool v_in = rows.reduce(v, &x);
    bool w_in = cols.reduce(w, nullptr);
    if (v_in && w_in && c == x.inner(w)) return TransitionClass::Up;
    if (!v_in && !w_in) return TransitionClass::Down;
    return TransitionClass::Same;
}

struct TransitionOracle::Impl {
    ColumnSolver cols;
    ColumnSolver rows;
    explicit Impl(const F2Matrix& a) : cols(a), rows(a, /*use_rows=*/true) {}
};

TransitionOracle::TransitionOracle(const F2Matrix& a) : impl_(new Impl(a)) {}
TransitionOracle::~TransitionOracle() { delete impl_; }

TransitionClass TransitionOracle::classify(const F2Vector& v, const F2Vector& w, int c) const {
    F2Vector x;
    bool v_in = impl_->rows.reduce(v, &x);
    bool w_in = impl_->cols.reduce(w, nullptr);
    if (v_in && w_in && c == x.inner(w)) return TransitionClass::Up;
    if (!v_in && !w_in) return TransitionClass::Down;
    return TransitionClass::Same;
}

std::vector<F2Vector> kernel_basis(const F2Matrix& a) {
    // relations among the columns of A are exactly the kernel vectors
    uint32_t n = a.n();
    uint32_t nw = words_for(n ? n : 1);
    std::vector<std::vector<word>> vec, comb;
    std::vector<int32_t> pivot_at(n, -1);
    std::vector<F2Vector> kernel;
    for (uint32_t j = 1; j <= n; ++j) {
        std::vector<word> v(nw, 0), c(nw, 0);
        F2Vector col = a.column(j);
        auto gw = col.words();
        for (uint32_t k = 0; k < gw.size(); ++k) v[k] = gw[k];
        c[(j - 1) / kWordBits] |= word(1) << ((j - 1) % kWordBits);
        while (true) {
            int p = lowest_bit(v);
            if (p < 0) {
                F2Vector kv(n);
                auto kw = kv.words_mut();
                for (uint32_t k = 0; k < kw.size(); ++k) kw[k] = c[k];
                kernel.push_back(std::move(kv));
                break;
            }
            if (pivot_at[p] < 0) {
                pivot_at[p] = static_cast<int32_t>(vec.size());
                vec.push_back(std::move(v));
                comb.push_back(std::move(c));
                break;
            }
            xor_words(v, vec[pivot_at[p]]);
            xor_words(c, comb[pivot_at[p]]);
        }
    }
    return kernel;
}

bool kernel_intersection_trivial(const F2Matrix& a) {
    auto ka = kernel_basis(a);
    if (ka.empty()) return true;
    auto kt = kernel_basis(a.transposed());
    if (kt.empty()) return true;
    // intersection is trivial iff the stacked bases stay independent
    uint32_t n = a.n();
    uint32_t nw = words_for(n ? n : 1);
    std::vector<std::vector<word>> basis;
    std::vector<int32_t> pivot_at(n, -1);
    auto insert = [&](const F2Vector& x) -> bool {  // true if independent
        std::vector<word> v(x.words().begin(), x.words().end());
        v.resize(nw, 0);
        while (true) {
            int p = lowest_bit(v);
            if (p < 0) return false;
            if (pivot_at[p] < 0) {
                pivot_at[p] = static_cast<int32_t>(basis.size());
                basis.push_back(std::move(v));
                return true;
            }
            xor_words(v, basis[pivot_at[p]]);
        }
    };
    for (const auto& x : ka) insert(x);
    for (const auto& x : kt) {
        if (!insert(x)) return false;  // dependent on ker(A) + previous: shared vector
    }
    return true;
}

uint32_t image_sum_dim(const F2Matrix& a) {
    uint32_t n = a.n();
    uint32_t nw = words_for(n ? n : 1);
    std::vector<std::vector<word>> basis;
    std::vector<int32_t> pivot_at(n, -1);
    auto insert = [&](const F2Vector& x) {
        std::vector<word> v(x.words().begin(), x.words().end());
        v.resize(nw, 0);
        while (true) {
            int p = lowest_bit(v);
            if (p < 0) return;
            if (pivot_at[p] < 0) {
                pivot_at[p] = static_cast<int32_t>(basis.size());
                basis.push_back(std::move(v));
                return;
            }
            xor_words(v, basis[pivot_at[p]]);
        }
    };
    for (uint32_t j = 1; j <= n; ++j) {
        insert(a.column(j));
        insert(a.row(j));
    }
    return static_cast<uint32_t>(basis.size());
}

void GrowthSimulator::Span::init(uint32_t capacity) {
    cap_words = words_for(capacity ? capacity : 1);
    pivot_at.assign(capacity, -1);
    arena.resize(capacity);
    for (auto& e : arena) {
        e.vec.assign(cap_words, 0);
        e.comb.assign(cap_words, 0);
    }
    pivot_elems.reserve(capacity);
    relation_elems.reserve(capacity);
    reset();
}

void GrowthSimulator::Span::reset() {
    ambient = 0;
    gens = 0;
    used = 0;
    pivot_elems.clear();
    relation_elems.clear();
    std::fill(pivot_at.begin(), pivot_at.end(), -1);
}

bool GrowthSimulator::Span::contains(std::span<const word> v) const {
    uint32_t nw = words_for(ambient ? ambient : 1);
    word local[16];
    std::vector<word> heap;
    word* buf;
    if (nw <= 16) {
        for (uint32_t k = 0; k < nw; ++k) local[k] = k < v.size() ? v[k] : 0;
        buf = local;
    } else {
        heap.assign(v.begin(), v.end());
        heap.resize(nw, 0);
        buf = heap.data();
    }
    while (true) {
        int p = lowest_bit(std::span<const word>(buf, nw));
        if (p < 0) return true;
        int32_t e = pivot_at[p];
        if (e < 0) return false;
        const word* ev = arena[e].vec.data();
        for (uint32_t k = static_cast<uint32_t>(p) / kWordBits; k < nw; ++k) buf[k] ^= ev[k];
    }
}

bool GrowthSimulator::Span::solve(std::span<const word> v, std::span<word> comb_out) const {
    uint32_t nw = words_for(ambient ? ambient : 1);
    uint32_t gw = words_for(gens ? gens : 1);
    std::vector<word> buf(v.begin(), v.end());
    buf.resize(nw, 0);
    std::fill(comb_out.begin(), comb_out.end(), word(0));
    while (true) {
        int p = lowest_bit(std::span<const word>(buf.data(), nw));
        if (p < 0) return true;
        int32_t e = pivot_at[p];
        if (e < 0) return false;
        const Elem& el = arena[e];
        for (uint32_t k = static_cast<uint32_t>(p) / kWordBits; k < nw; ++k) buf[k] ^= el.vec[k];
        for (uint32_t k = 0; k < gw; ++k) comb_out[k] ^= el.comb[k];
    }
}

void GrowthSimulator::Span::append_coordinate(std::span<const word> newcoord) {
    uint32_t pos = ambient;  // 0-based index of the appended coordinate
    word mask = word(1) << (pos % kWordBits);
    uint32_t wi = pos / kWordBits;
    uint32_t gw = static_cast<uint32_t>(newcoord.size());
    for (uint32_t idx : pivot_elems) {
        const word* cb = arena[idx].comb.data();
        word acc = 0;
        for (uint32_t k = 0; k < gw; ++k) acc ^= cb[k] & newcoord[k];
        if (std::popcount(acc) & 1) arena[idx].vec[wi] |= mask;
    }
    int32_t promoted = -1;
    for (size_t r = 0; r < relation_elems.size();) {
        uint32_t idx = relation_elems[r];
        const word* cb = arena[idx].comb.data();
        word acc = 0;
        for (uint32_t k = 0; k < gw; ++k) acc ^= cb[k] & newcoord[k];
        if (std::popcount(acc) & 1) {
            if (promoted < 0) {
                arena[idx].vec[wi] |= mask;
                promoted = static_cast<int32_t>(idx);
                pivot_at[pos] = promoted;
                pivot_elems.push_back(idx);
                relation_elems[r] = relation_elems.back();
                relation_elems.pop_back();
                continue;  // index r now holds a different relation
            }
            // stays a relation: cancel against the promoted one
            word* ec = arena[idx].comb.data();
            const word* pc = arena[promoted].comb.data();
            uint32_t gwf = words_for(gens ? gens : 1);
            for (uint32_t k = 0; k < gwf; ++k) ec[k] ^= pc[k];
        }
        ++r;
    }
    ++ambient;
}

void GrowthSimulator::Span::add_generator(std::span<const word> vec) {
    uint32_t idx = used++;
    Elem& e = arena[idx];
    uint32_t nw = words_for(ambient ? ambient : 1);
    uint32_t gw = words_for(gens + 1);
    for (uint32_t k = 0; k < nw; ++k) e.vec[k] = k < vec.size() ? vec[k] : 0;
    for (uint32_t k = 0; k < gw; ++k) e.comb[k] = 0;
    e.comb[gens / kWordBits] = word(1) << (gens % kWordBits);
    ++gens;
    while (true) {
        int p = lowest_bit(std::span<const word>(e.vec.data(), nw));
        if (p < 0) {
            relation_elems.push_back(idx);
            return;
        }
        int32_t at = pivot_at[p];
        if (at < 0) {
            pivot_at[p] = static_cast<int32_t>(idx);
            pivot_elems.push_back(idx);
            return;
        }
        const Elem& el = arena[at];
        for (uint32_t k = static_cast<uint32_t>(p) / kWordBits; k < nw; ++k) e.vec[k] ^= el.vec[k];
        for (uint32_t k = 0; k < gw; ++k) e.comb[k] ^= el.comb[k];
    }
}

GrowthSimulator::GrowthSimulator(uint32_t capacity, bool track_matrix)
    : capacity_(capacity), track_matrix_(track_matrix) {
    rowspace_.init(capacity + 1);
    colspace_.init(capacity + 1);
    scratch_.assign(words_for(capacity + 1), 0);
    comb_scratch_.assign(words_for(capacity + 1), 0);
}

const F2Matrix& GrowthSimulator::matrix() const {
    if (!track_matrix_) throw std::logic_error("GrowthSimulator: matrix tracking disabled");
    return mat_;
}

void GrowthSimulator::reset() {
    size_ = 0;
    rank_ = 0;
    if (track_matrix_) mat_ = F2Matrix();
    rowspace_.reset();
    colspace_.reset();
}

TransitionClass GrowthSimulator::step(const F2Vector& v, const F2Vector& w, int c) {
    if (v.len() != size_ || w.len() != size_ || size_ > capacity_)
        throw std::invalid_argument("GrowthSimulator::step: length mismatch");

    bool v_in = rowspace_.contains(v.words());
    bool w_in = colspace_.contains(w.words());
    TransitionClass cls;
    if (v_in && w_in) {
        // row combination x with A^T x = v; the corank grows iff c = <x, w>
        bool ok = rowspace_.solve(v.words(), comb_scratch_);
        assert(ok);
        (void)ok;
        int pair = inner_words(comb_scratch_, w.words());
        cls = (c == pair) ? TransitionClass::Up : TransitionClass::Same;
    } else if (!v_in && !w_in) {
        cls = TransitionClass::Down;
    } else {
        cls = TransitionClass::Same;
    }

    // column j of A gains coordinate v(j); new column is (w | c)
    colspace_.append_coordinate(v.words());
    uint32_t nw = words_for(size_ + 1);
    std::fill_n(scratch_.begin(), nw, word(0));
    auto ww = w.words();
    for (size_t k = 0; k < ww.size(); ++k) scratch_[k] = ww[k];
    if (c) scratch_[size_ / kWordBits] |= word(1) << (size_ % kWordBits);
    colspace_.add_generator(std::span<const word>(scratch_.data(), nw));

    // row k of A gains coordinate w(k); new row is (v | c)
    rowspace_.append_coordinate(w.words());
    std::fill_n(scratch_.begin(), nw, word(0));
    auto vw = v.words();
    for (size_t k = 0; k < vw.size(); ++k) scratch_[k] = vw[k];
    if (c) scratch_[size_ / kWordBits] |= word(1) << (size_ % kWordBits);
    rowspace_.add_generator(std::span<const word>(scratch_.data(), nw));

    if (track_matrix_) mat_.extend_inplace(v, w, c);
    ++size_;
    rank_ += 1 - delta(cls);
    assert(rowspace_.rank() == rank_ && colspace_.rank() == rank_);
    return cls;
}

}  // namespace corank::f2
