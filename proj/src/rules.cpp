#include "corank/rules.hpp"

#include <bit>
#include <charconv>
#include <stdexcept>

#include "corank/markov.hpp"

namespace corank::rules {

using f2::F2Matrix;
using f2::F2Vector;

namespace {

uint32_t parse_u32(std::string_view s) {
    uint32_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::invalid_argument("rule: bad integer '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    size_t pos = 0;
    while (true) {
        size_t k = s.find(sep, pos);
        out.push_back(s.substr(pos, k == std::string_view::npos ? k : k - pos));
        if (k == std::string_view::npos) break;
        pos = k + 1;
    }
    return out;
}

}  // namespace

RuleId RuleId::parse(std::string_view s) {
    auto parts = split(s, ':');
    RuleId r;
    std::string_view name = parts[0];
    if (name == "mat") {
        r.family = Family::Mat;
        if (parts.size() != 1) throw std::invalid_argument("rule: mat takes no parameters");
        return r;
    }
    if (name == "alt") {
        r.family = Family::Alt;
        if (parts.size() != 1) throw std::invalid_argument("rule: alt takes no parameters");
        return r;
    }
    if (name == "redei" || name == "pell1" || name == "pell2") {
        r.family = name == "redei" ? Family::Redei : (name == "pell1" ? Family::Pell1 : Family::Pell2);
        if (parts.size() != 2) throw std::invalid_argument("rule: expected " + std::string(name) + ":K");
        r.kappa = parse_u32(parts[1]);
        return r;
    }
    if (name == "pell3") {
        r.family = Family::Pell3;
        if (parts.size() != 4) throw std::invalid_argument("rule: expected pell3:K:A:B");
        r.kappa = parse_u32(parts[1]);
        r.a = static_cast<int>(parse_u32(parts[2]));
        r.b = static_cast<int>(parse_u32(parts[3]));
        if (r.a > 1 || r.b > 1) throw std::invalid_argument("rule: pell3 a, b must be bits");
        return r;
    }
    throw std::invalid_argument("rule: unknown family '" + std::string(name) + "'");
}

std::string RuleId::to_string() const {
    switch (family) {
        case Family::Mat: return "mat";
        case Family::Alt: return "alt";
        case Family::Redei: return "redei:" + std::to_string(kappa);
        case Family::Pell1: return "pell1:" + std::to_string(kappa);
        case Family::Pell2: return "pell2:" + std::to_string(kappa);
        case Family::Pell3:
            return "pell3:" + std::to_string(kappa) + ":" + std::to_string(a) + ":" + std::to_string(b);
    }
    return "";
}

uint32_t StepShape::log2_size() const {
    uint32_t kv = v_free_from > i ? 0 : i - v_free_from + 1;
    uint32_t kw = w_free == WFree::All ? i : (w_free == WFree::Pos2 ? 1 : 0);
    return kv + kw + (c_free ? 1 : 0);
}

StepShape step_shape(const RuleId& rule, uint32_t i) {
    StepShape s;
    s.i = i;
    s.v_base = F2Vector(i);
    s.w_mask = F2Vector(i);
    switch (rule.family) {
        case Family::Mat:
            s.v_free_from = 1;
            s.w_free = StepShape::WFree::All;
            return s;
        case Family::Alt:
            s.v_free_from = 1;
            s.w_mask = F2Vector::ones(i);
            return s;
        case Family::Redei:
            s.v_free_from = 1;
            if (i < rule.kappa) s.w_mask = F2Vector::ones(i);  // v + w = H_i
            return s;                                          // else v = w
        case Family::Pell1:
            if (i == 0) {
                s.c_free = false;
                s.c_base = 1;
                return s;
            }
            s.v_free_from = 2;
            if (i < rule.kappa) {
                // v + w = (0, H_{i-1}), first coordinate of w is 1
                s.v_base.set(1, 1);
                s.w_mask = F2Vector::ones(i);
                s.w_mask.set(1, 0);
            }
            return s;  // i >= kappa: v = w with first coordinate 0
        case Family::Pell2:
            if (i == 0) {
                s.c_free = false;
                s.c_base = 1;
                return s;
            }
            s.v_free_from = 2;
            if (i <= rule.kappa) s.w_mask = F2Vector::ones(i);  // v + w = H_i, w_1 = 1
            return s;                                           // i > kappa: v = w, v_1 = 0
        case Family::Pell3:
            if (i == 0) {
                s.c_free = false;
                s.c_base = 1;
                return s;
            }
            if (i == 1) {
                s.v_base.set(1, 1);
                s.v_free_from = 2;
                s.w_mask.set(1, rule.a ? 0 : 1);  // w = (a)
                s.c_free = false;
                s.c_base = rule.b;
                return s;
            }
            s.v_free_from = 3;
            s.w_free = StepShape::WFree::Pos2;
            if (i <= rule.kappa) {
                // v_1 = 0, v_2 = 1, w_1 = 1, w_j = v_j + 1 for j >= 3
                s.v_base.set(2, 1);
                s.w_mask = F2Vector::ones(i);
                s.w_mask.set(2, 0);
            } else {
                // v_1 = v_2 = 0, w_1 = 1, w_j = v_j for j >= 3
                s.w_mask.set(1, 1);
            }
            return s;
    }
    throw std::logic_error("unreachable");
}

uint32_t step_space_log2(const RuleId& rule, uint32_t i) { return step_shape(rule, i).log2_size(); }

uint64_t step_space_size(const RuleId& rule, uint32_t i) {
    uint32_t e = step_space_log2(rule, i);
    if (e >= 64) throw std::overflow_error("step_space_size: does not fit in 64 bits");
    return uint64_t(1) << e;
}

bool step_valid(const RuleId& rule, uint32_t i, const Step& s) {
    if (s.v.len() != i || s.w.len() != i || s.c < 0 || s.c > 1) return false;
    StepShape sh = step_shape(rule, i);
    for (uint32_t p = 1; p < sh.v_free_from && p <= i; ++p)
        if (s.v.get(p) != sh.v_base.get(p)) return false;
    if (sh.w_free != StepShape::WFree::All) {
        for (uint32_t p = 1; p <= i; ++p) {
            if (sh.w_free == StepShape::WFree::Pos2 && p == 2) continue;
            if (s.w.get(p) != (s.v.get(p) ^ sh.w_mask.get(p))) return false;
        }
    }
    if (!sh.c_free && s.c != sh.c_base) return false;
    return true;
}

std::vector<Step> enumerate_step(const RuleId& rule, uint32_t i) {
    StepShape sh = step_shape(rule, i);
    uint32_t kv = sh.v_free_from > i ? 0 : i - sh.v_free_from + 1;
    uint32_t kw = sh.w_free == StepShape::WFree::All ? i : (sh.w_free == StepShape::WFree::Pos2 ? 1 : 0);
    if (sh.log2_size() > 28) throw std::invalid_argument("enumerate_step: space too large");
    std::vector<Step> out;
    out.reserve(uint64_t(1) << sh.log2_size());
    for (uint64_t uv = 0; uv < (uint64_t(1) << kv); ++uv) {
        F2Vector v = sh.v_base;
        for (uint32_t k = 0; k < kv; ++k) v.set(sh.v_free_from + k, (uv >> k) & 1);
        F2Vector w0 = v;
        w0.xor_with(sh.w_mask);
        for (uint64_t uw = 0; uw < (uint64_t(1) << kw); ++uw) {
            F2Vector w = w0;
            if (sh.w_free == StepShape::WFree::Pos2) w.set(2, uw & 1);
            else for (uint32_t k = 0; k < kw; ++k) w.set(1 + k, (uw >> k) & 1);
            if (sh.c_free) {
                out.push_back(Step{v, w, 0});
                out.push_back(Step{v, w, 1});
            } else {
                out.push_back(Step{v, w, sh.c_base});
            }
        }
    }
    return out;
}

void sample_from_shape(const StepShape& sh, Rng& rng, Step& out) {
    uint32_t i = sh.i;
    out.v = sh.v_base;
    // free v coordinates drawn word-wise, low positions first
    if (sh.v_free_from <= i) {
        auto vw = out.v.words_mut();
        uint32_t from0 = sh.v_free_from - 1;  // 0-based
        uint32_t nw = f2::words_for(i);
        for (uint32_t k = from0 / 64; k < nw; ++k) {
            uint64_t r = rng.next();
            uint64_t keep = ~uint64_t(0);
            uint32_t base = k * 64;
            if (from0 > base) keep &= ~uint64_t(0) << (from0 - base);
            if (i - base < 64) keep &= (~uint64_t(0)) >> (64 - (i - base));
            vw[k] = (vw[k] & ~keep) | (r & keep);
        }
    }
    out.w = out.v;
    out.w.xor_with(sh.w_mask);
    if (sh.w_free == StepShape::WFree::Pos2) {
        out.w.set(2, static_cast<int>(rng.bits(1)));
    } else if (sh.w_free == StepShape::WFree::All) {
        auto ww = out.w.words_mut();
        uint32_t nw = f2::words_for(i);
        for (uint32_t k = 0; k < nw; ++k) {
            uint64_t r = rng.next();
            uint64_t keep = ~uint64_t(0);
            uint32_t base = k * 64;
            if (i - base < 64) keep &= (~uint64_t(0)) >> (64 - (i - base));
            ww[k] = r & keep;
        }
    }
    out.c = sh.c_free ? static_cast<int>(rng.bits(1)) : sh.c_base;
}

Step sample_step(const RuleId& rule, uint32_t i, Rng& rng) {
    Step s;
    sample_from_shape(step_shape(rule, i), rng, s);
    return s;
}

F2Matrix build_matrix(const RuleId& rule, std::span<const Step> steps) {
    F2Matrix m;
    for (uint32_t i = 0; i < steps.size(); ++i) {
        if (!step_valid(rule, i, steps[i]))
            throw std::invalid_argument("build_matrix: step " + std::to_string(i) + " violates the rule");
        m.extend_inplace(steps[i].v, steps[i].w, steps[i].c);
    }
    return m;
}

namespace {

// A * H: the vector of row parities
bool row_parities_all_zero(const F2Matrix& a) {
    for (uint32_t k = 1; k <= a.n(); ++k)
        if (a.row(k).parity()) return false;
    return true;
}

int detector_early(const F2Matrix& a) { return row_parities_all_zero(a) ? 1 : 0; }

// span membership with an independence report for the generating set
bool in_span(const std::vector<F2Vector>& gens, const F2Vector& target, bool* independent) {
    uint32_t len = target.len();
    uint32_t nw = f2::words_for(len ? len : 1);
    std::vector<std::vector<f2::word>> basis;
    std::vector<int32_t> pivot_at(len, -1);
    bool indep = true;
    auto reduce_insert = [&](const F2Vector& x, bool insert) -> bool {  // true if reduced to zero
        std::vector<f2::word> v(x.words().begin(), x.words().end());
        v.resize(nw, 0);
        while (true) {
            int p = -1;
            for (uint32_t k = 0; k < nw && p < 0; ++k)
                if (v[k]) p = static_cast<int>(k * 64 + std::countr_zero(v[k]));
            if (p < 0) return true;
            if (pivot_at[p] < 0) {
                if (insert) {
                    pivot_at[p] = static_cast<int32_t>(basis.size());
                    basis.push_back(std::move(v));
                }
                return false;
            }
            for (uint32_t k = 0; k < nw; ++k) v[k] ^= basis[pivot_at[p]][k];
        }
    };
    for (const auto& g : gens)
        if (reduce_insert(g, true)) indep = false;
    if (independent) *independent = indep;
    return reduce_insert(target, false);
}

F2Vector column_sum(const F2Matrix& a, uint32_t from, uint32_t to) {
    F2Vector s(a.n());
    for (uint32_t j = from; j <= to; ++j) s.xor_with(a.column(j));
    return s;
}

F2Vector row_sum(const F2Matrix& a, uint32_t from, uint32_t to) {
    F2Vector s(a.n());
    for (uint32_t k = from; k <= to; ++k) s.xor_with(a.row(k));
    return s;
}

uint32_t bottom_right_rank(const F2Matrix& a, uint32_t row_from, uint32_t col_from) {
    uint32_t n = a.n();
    uint32_t rows = n - row_from + 1, cols = n - col_from + 1;
    F2Matrix sub(rows > cols ? rows : cols);  // pad to square; padding stays zero
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c)
            if (a.get(row_from + r, col_from + c)) sub.set(r + 1, c + 1, 1);
    return f2::rank(sub);
}

// Redei-style late condition: the last i - kappa columns must be independent
// and no kernel vector may project onto the first kappa coordinates as all
// ones. The affine part solves  A[:, kappa+1..i] y = sum of first kappa
// columns  instead of scanning candidate vectors.
int detector_late_redei(const F2Matrix& a, uint32_t kappa) {
    uint32_t i = a.n();
    std::vector<F2Vector> suffix;
    for (uint32_t j = kappa + 1; j <= i; ++j) suffix.push_back(a.column(j));
    bool indep = true;
    bool hit = in_span(suffix, column_sum(a, 1, kappa), &indep);
    return (!indep || hit) ? 1 : 0;
}

// Pell variant: independence is demanded of the bottom-right
// (i-1) x (i-kappa) submatrix instead of the full columns
int detector_late_pell(const F2Matrix& a, uint32_t kappa) {
    uint32_t i = a.n();
    uint32_t rows = i - 1, cols = i - kappa;
    uint32_t full = rows < cols ? rows : cols;
    if (bottom_right_rank(a, 2, kappa + 1) != full) return 1;
    std::vector<F2Vector> suffix;
    for (uint32_t j = kappa + 1; j <= i; ++j) suffix.push_back(a.column(j));
    if (in_span(suffix, column_sum(a, 1, kappa), nullptr)) return 1;
    return 0;
}

// transpose-kernel exclusion for Pell2/Pell3 when min(i, kappa) is even:
// no x with A^T x = 0 and x restricted to the first q coordinates equal to
// (0, H_{q-1})
int detector_transpose_extra(const F2Matrix& a, uint32_t kappa) {
    uint32_t i = a.n();
    uint32_t q = i < kappa ? i : kappa;
    if (q % 2 != 0 || q == 0) return 0;
    if (i <= kappa) {
        // x is fully pinned to (0, H_{i-1})
        return row_sum(a, 2, i).is_zero() ? 1 : 0;
    }
    std::vector<F2Vector> suffix;
    for (uint32_t k = kappa + 1; k <= i; ++k) suffix.push_back(a.row(k));
    return in_span(suffix, row_sum(a, 2, kappa), nullptr) ? 1 : 0;
}

}  // namespace

int genericity(const RuleId& rule, const F2Matrix& a) {
    uint32_t i = a.n();
    switch (rule.family) {
        case Family::Mat:
            throw std::invalid_argument("genericity: the mat family has no detector");
        case Family::Alt:
            return detector_early(a);
        case Family::Redei:
            return i <= rule.kappa ? detector_early(a) : detector_late_redei(a, rule.kappa);
        case Family::Pell1:
            return i <= rule.kappa ? detector_early(a) : detector_late_pell(a, rule.kappa);
        case Family::Pell2:
        case Family::Pell3: {
            int base = i <= rule.kappa ? detector_early(a) : detector_late_pell(a, rule.kappa);
            if (base) return 1;
            return detector_transpose_extra(a, rule.kappa);
        }
    }
    throw std::logic_error("unreachable");
}

bool transition_is_markov(const RuleId& rule, const F2Matrix& a) {
    uint32_t i = a.n();
    uint32_t j = f2::corank(a);
    auto steps = enumerate_step(rule, i);
    f2::TransitionOracle oracle(a);
    uint64_t counts[3] = {0, 0, 0};  // down, same, up
    for (const auto& s : steps) ++counts[f2::delta(oracle.classify(s.v, s.w, s.c)) + 1];
    uint32_t e = step_space_log2(rule, i);
    Dyadic down(BigInt::from_u64(counts[0]), e);
    Dyadic same(BigInt::from_u64(counts[1]), e);
    Dyadic up(BigInt::from_u64(counts[2]), e);
    return down == markov::qcl_entry(j, static_cast<int64_t>(j) - 1) &&
           same == markov::qcl_entry(j, j) &&
           up == markov::qcl_entry(j, static_cast<int64_t>(j) + 1);
}

}  // namespace corank::rules
