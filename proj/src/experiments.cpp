#include "corank/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace corank::experiments {

using f2::F2Matrix;
using f2::F2Vector;
using rules::Family;
using rules::RuleId;
using rules::Step;
using rules::StepShape;

uint64_t default_budget() {
    if (const char* env = std::getenv("CORANK_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return uint64_t(1) << 26;
}

namespace {

constexpr uint64_t kShardSize = 4096;

// log2 of the number of step sequences of length r; 64+ means "too large"
uint64_t sweep_log2(const RuleId& rule, uint32_t r) {
    uint64_t total = 0;
    for (uint32_t i = 0; i < r && total < 64; ++i) total += rules::step_space_log2(rule, i);
    return total;
}

bool sweep_fits(const RuleId& rule, uint32_t r, uint64_t budget) {
    uint64_t l = sweep_log2(rule, r);
    return l < 64 && (uint64_t(1) << l) <= budget;
}

uint32_t feasible_sweep_r(const RuleId& rule, uint64_t budget) {
    uint32_t r = 0;
    while (sweep_fits(rule, r + 1, budget)) ++r;
    return r;
}

// rank of a matrix whose rows fit in single words (n <= 64)
uint32_t rank_words(std::vector<uint64_t>& rows) {
    uint32_t rk = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
        uint64_t r = rows[i];
        if (!r) continue;
        ++rk;
        int p = std::countr_zero(r);
        for (size_t j = i + 1; j < rows.size(); ++j)
            if ((rows[j] >> p) & 1u) rows[j] ^= r;
    }
    return rk;
}

uint32_t small_corank(const F2Matrix& m, std::vector<uint64_t>& scratch) {
    uint32_t n = m.n();
    scratch.resize(n);
    for (uint32_t k = 0; k < n; ++k) scratch[k] = m.row(k + 1).packed_low();
    return n - rank_words(scratch);
}

int detector_or_zero(const RuleId& rule, const F2Matrix& m) {
    if (rule.family == Family::Mat) return 0;
    return rules::genericity(rule, m);
}

std::vector<Dyadic> counts_to_mass(const std::vector<uint64_t>& counts, uint64_t log2_total) {
    std::vector<Dyadic> mass(counts.size());
    for (size_t j = 0; j < counts.size(); ++j)
        mass[j] = Dyadic(BigInt::from_u64(counts[j]), static_cast<uint32_t>(log2_total));
    return mass;
}

}  // namespace

ExactDistribution exact_distribution(const RuleId& rule, uint32_t r, uint64_t budget) {
    if (!sweep_fits(rule, r, budget)) {
        uint32_t fmax = feasible_sweep_r(rule, budget);
        throw BudgetExceeded("exact enumeration of " + rule.to_string() + " at r=" + std::to_string(r) +
                                 " exceeds the budget; feasible maximum r is " + std::to_string(fmax),
                             fmax);
    }
    uint64_t log2_total = sweep_log2(rule, r);
    std::vector<uint64_t> counts(r + 1, 0);
    std::vector<std::vector<Step>> levels(r);
    for (uint32_t i = 0; i < r; ++i) levels[i] = rules::enumerate_step(rule, i);
    F2Matrix m;
    std::vector<uint64_t> scratch;
    auto rec = [&](auto&& self, uint32_t depth) -> void {
        if (depth == r) {
            ++counts[small_corank(m, scratch)];
            return;
        }
        for (const Step& s : levels[depth]) {
            m.extend_inplace(s.v, s.w, s.c);
            self(self, depth + 1);
            m.shrink_inplace();
        }
    };
    rec(rec, 0);
    ExactDistribution d;
    d.r = r;
    d.log2_total = log2_total;
    d.mass = counts_to_mass(counts, log2_total);
    d.method = "enumeration";
    return d;
}

ExactDistribution mat_chain_distribution(uint32_t r) {
    std::vector<Dyadic> cur{Dyadic(1)};
    for (uint32_t i = 0; i < r; ++i) {
        std::vector<Dyadic> next(i + 2, Dyadic(0));
        for (uint32_t s = 0; s <= i; ++s) {
            if (cur[s].is_zero()) continue;
            for (int64_t j = static_cast<int64_t>(s) - 1; j <= static_cast<int64_t>(s) + 1; ++j) {
                if (j < 0) continue;
                Dyadic q = markov::qcl_entry(s, j);
                if (!q.is_zero()) next[static_cast<size_t>(j)] += cur[s] * q;
            }
        }
        cur = std::move(next);
    }
    ExactDistribution d;
    d.r = r;
    d.mass = std::move(cur);
    d.log2_total = static_cast<uint64_t>(r) * r;  // implied size of the full space
    d.method = "chain";
    return d;
}

namespace {

// shape lookup for mixtures: one early array (kappa larger than any index)
// and one late array (kappa = 0) cover every branch of the kappa families
struct MixtureShapes {
    RuleId base;
    std::vector<StepShape> early, late;

    MixtureShapes(const RuleId& rule, uint32_t r) : base(rule) {
        RuleId hi = rule, lo = rule;
        hi.kappa = r + 2;
        lo.kappa = 0;
        early.reserve(r);
        late.reserve(r);
        for (uint32_t i = 0; i < r; ++i) {
            early.push_back(rules::step_shape(hi, i));
            late.push_back(rules::step_shape(lo, i));
        }
    }

    const StepShape& at(uint32_t kappa, uint32_t i) const {
        switch (base.family) {
            case Family::Redei: return i < kappa ? early[i] : late[i];
            case Family::Pell1: return (i >= 1 && i < kappa) ? early[i] : late[i];
            case Family::Pell2: return (i >= 1 && i <= kappa) ? early[i] : late[i];
            case Family::Pell3: return (i >= 2 && i <= kappa) ? early[i] : late[i];
            default: return late[i];
        }
    }
};

struct ShardPlan {
    uint64_t samples;
    uint64_t n_shards;
    uint64_t shard_count(uint64_t s) const {
        uint64_t lo = s * kShardSize;
        return std::min<uint64_t>(kShardSize, samples - lo);
    }
};

// Flat word-matrix for corank-only sampling: the matrix is rebuilt row by
// row per sample and eliminated in place at the end. Draw order matches the
// incremental simulator exactly, so both paths produce identical outputs.
struct FlatGrower {
    uint32_t r, nw;
    std::vector<uint64_t> rows;

    explicit FlatGrower(uint32_t r_) : r(r_), nw(f2::words_for(r_ ? r_ : 1)), rows(size_t(r_) * nw) {}

    void reset() { std::fill(rows.begin(), rows.end(), 0); }

    void apply(uint32_t i, const Step& s) {
        auto ww = s.w.words();
        uint64_t col_mask = uint64_t(1) << (i % 64);
        uint32_t col_word = i / 64;
        for (uint32_t q = 0; q < ww.size(); ++q) {
            uint64_t bits = ww[q];
            while (bits) {
                uint32_t k = q * 64 + static_cast<uint32_t>(std::countr_zero(bits));
                rows[size_t(k) * nw + col_word] |= col_mask;
                bits &= bits - 1;
            }
        }
        auto vw = s.v.words();
        uint64_t* row = &rows[size_t(i) * nw];
        for (uint32_t q = 0; q < nw; ++q) row[q] = q < vw.size() ? vw[q] : 0;
        if (s.c) row[col_word] |= col_mask;
    }

    uint32_t corank_destructive() {
        uint32_t rank = 0;
        for (uint32_t i = 0; i < r; ++i) {
            uint64_t* ri = &rows[size_t(i) * nw];
            int p = -1;
            for (uint32_t q = 0; q < nw && p < 0; ++q)
                if (ri[q]) p = static_cast<int>(q * 64 + std::countr_zero(ri[q]));
            if (p < 0) continue;
            ++rank;
            uint32_t pw = static_cast<uint32_t>(p) / 64;
            uint64_t pm = uint64_t(1) << (p % 64);
            for (uint32_t j = i + 1; j < r; ++j) {
                uint64_t* rj = &rows[size_t(j) * nw];
                if (rj[pw] & pm)
                    for (uint32_t q = pw; q < nw; ++q) rj[q] ^= ri[q];
            }
        }
        return r - rank;
    }
};

template <typename PerShard>
void run_shards(uint64_t samples, uint32_t threads, PerShard&& body) {
    ShardPlan plan{samples, (samples + kShardSize - 1) / kShardSize};
    if (threads <= 1) {
        for (uint64_t s = 0; s < plan.n_shards; ++s) body(s, plan.shard_count(s));
        return;
    }
    std::vector<std::thread> pool;
    for (uint32_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            for (uint64_t s = t; s < plan.n_shards; s += threads) body(s, plan.shard_count(s));
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

EmpiricalDistribution mc_distribution(const RuleId& rule, uint32_t r, uint64_t samples,
                                      uint64_t seed, uint32_t threads) {
    if (samples < 1) throw std::invalid_argument("mc_distribution: samples >= 1 required");
    std::vector<StepShape> shapes;
    shapes.reserve(r);
    for (uint32_t i = 0; i < r; ++i) shapes.push_back(rules::step_shape(rule, i));

    uint64_t n_shards = (samples + kShardSize - 1) / kShardSize;
    std::vector<std::vector<uint64_t>> shard_counts(n_shards);
    run_shards(samples, threads, [&](uint64_t shard, uint64_t count) {
        Rng rng(Rng::sub_seed(seed, shard));
        FlatGrower grower(r);
        Step buf;
        std::vector<uint64_t> counts(r + 1, 0);
        for (uint64_t k = 0; k < count; ++k) {
            grower.reset();
            for (uint32_t i = 0; i < r; ++i) {
                rules::sample_from_shape(shapes[i], rng, buf);
                grower.apply(i, buf);
            }
            ++counts[grower.corank_destructive()];
        }
        shard_counts[shard] = std::move(counts);
    });

    EmpiricalDistribution d;
    d.r = r;
    d.total = samples;
    d.seed = seed;
    d.counts.assign(r + 1, 0);
    for (const auto& c : shard_counts)
        for (size_t j = 0; j < c.size(); ++j) d.counts[j] += c[j];
    return d;
}

// incremental-rank route kept alongside the eliminator; the two must agree
// bit for bit on identical (rule, r, samples, seed)
EmpiricalDistribution mc_distribution_incremental(const RuleId& rule, uint32_t r, uint64_t samples,
                                                  uint64_t seed) {
    std::vector<StepShape> shapes;
    shapes.reserve(r);
    for (uint32_t i = 0; i < r; ++i) shapes.push_back(rules::step_shape(rule, i));
    uint64_t n_shards = (samples + kShardSize - 1) / kShardSize;
    EmpiricalDistribution d;
    d.r = r;
    d.total = samples;
    d.seed = seed;
    d.counts.assign(r + 1, 0);
    f2::GrowthSimulator sim(r, false);
    Step buf;
    for (uint64_t shard = 0; shard < n_shards; ++shard) {
        Rng rng(Rng::sub_seed(seed, shard));
        uint64_t count = std::min<uint64_t>(kShardSize, samples - shard * kShardSize);
        for (uint64_t k = 0; k < count; ++k) {
            sim.reset();
            for (uint32_t i = 0; i < r; ++i) {
                rules::sample_from_shape(shapes[i], rng, buf);
                sim.step(buf.v, buf.w, buf.c);
            }
            ++d.counts[sim.corank()];
        }
    }
    return d;
}

FamilySpec FamilySpec::parse(std::string_view s) {
    FamilySpec f;
    size_t colon = s.find(':');
    std::string_view name = s.substr(0, colon);
    if (name == "mat" || name == "alt") {
        if (colon != std::string_view::npos) throw std::invalid_argument("family: no parameters expected");
        f.rule = RuleId::parse(s);
        f.mixture = false;
        return f;
    }
    if (name == "redei" || name == "pell1" || name == "pell2") {
        if (colon == std::string_view::npos) {
            f.rule = RuleId::parse(std::string(name) + ":0");
            f.mixture = true;
        } else {
            f.rule = RuleId::parse(s);
            f.mixture = false;
        }
        return f;
    }
    if (name == "pell3") {
        // pell3:A:B is the mixture; pell3:K:A:B is the fixed rule
        auto rest = s.substr(colon == std::string_view::npos ? s.size() : colon);
        size_t parts = rest.empty() ? 0 : static_cast<size_t>(std::count(rest.begin(), rest.end(), ':'));
        if (parts == 2) {
            f.rule = RuleId::parse("pell3:0" + std::string(rest));
            f.mixture = true;
            return f;
        }
        if (parts == 3) {
            f.rule = RuleId::parse(s);
            f.mixture = false;
            return f;
        }
        throw std::invalid_argument("family: expected pell3:A:B or pell3:K:A:B");
    }
    throw std::invalid_argument("family: unknown '" + std::string(s) + "'");
}

std::string FamilySpec::to_string() const {
    if (!mixture) return rule.to_string();
    switch (rule.family) {
        case Family::Redei: return "redei";
        case Family::Pell1: return "pell1";
        case Family::Pell2: return "pell2";
        case Family::Pell3: return "pell3:" + std::to_string(rule.a) + ":" + std::to_string(rule.b);
        default: return rule.to_string();
    }
}

uint32_t FamilySpec::kappa_range(uint32_t r) const {
    return rule.family == Family::Pell3 ? (r == 0 ? 0 : r - 1) : r;
}

ExactDistribution mixture_exact(const FamilySpec& fam, uint32_t r, uint64_t budget) {
    if (!fam.mixture) return exact_distribution(fam.rule, r, budget);
    if (r < 1) throw std::invalid_argument("mixture: r >= 1 required");
    uint32_t kmax = fam.kappa_range(r);
    // total work across all kappa sweeps must fit the budget
    uint64_t total_work = 0;
    uint32_t feasible = 0;
    for (uint32_t rr = 1; rr <= r; ++rr) {
        uint64_t work = 0;
        bool ok = true;
        for (uint32_t k = 0; k <= fam.kappa_range(rr) && ok; ++k) {
            RuleId rk = fam.rule;
            rk.kappa = k;
            uint64_t l = sweep_log2(rk, rr);
            if (l >= 63 || work + (uint64_t(1) << l) > budget) ok = false;
            else work += uint64_t(1) << l;
        }
        if (ok) {
            feasible = rr;
            if (rr == r) total_work = work;
        } else if (rr == r) {
            throw BudgetExceeded("exact mixture of " + fam.to_string() + " at r=" + std::to_string(r) +
                                     " exceeds the budget; feasible maximum r is " + std::to_string(feasible),
                                 feasible);
        }
    }
    (void)total_work;

    std::vector<Dyadic> mass(r + 1, Dyadic(0));
    uint32_t weight_n = fam.rule.family == Family::Pell3 ? r - 1 : r;
    for (uint32_t k = 0; k <= kmax; ++k) {
        RuleId rk = fam.rule;
        rk.kappa = k;
        ExactDistribution part = exact_distribution(rk, r, budget);
        Dyadic weight(BigInt::binomial(weight_n, k), weight_n);
        for (uint32_t j = 0; j <= r; ++j)
            if (!part.mass[j].is_zero()) mass[j] += weight * part.mass[j];
    }
    ExactDistribution d;
    d.r = r;
    d.mass = std::move(mass);
    d.log2_total = sweep_log2(fam.rule, r) + weight_n;  // indicative only
    d.method = "enumeration";
    return d;
}

EmpiricalDistribution mixture_mc(const FamilySpec& fam, uint32_t r, uint64_t samples,
                                 uint64_t seed, uint32_t threads) {
    if (!fam.mixture) return mc_distribution(fam.rule, r, samples, seed, threads);
    if (r < 1 || samples < 1) throw std::invalid_argument("mixture_mc: r, samples >= 1 required");
    MixtureShapes shapes(fam.rule, r);
    uint32_t weight_n = fam.rule.family == Family::Pell3 ? r - 1 : r;

    uint64_t n_shards = (samples + kShardSize - 1) / kShardSize;
    std::vector<std::vector<uint64_t>> shard_counts(n_shards);
    run_shards(samples, threads, [&](uint64_t shard, uint64_t count) {
        Rng rng(Rng::sub_seed(seed, shard));
        FlatGrower grower(r);
        Step buf;
        std::vector<uint64_t> counts(r + 1, 0);
        for (uint64_t k = 0; k < count; ++k) {
            // kappa ~ Binom(weight_n, 1/2): popcount of weight_n fair bits
            uint32_t kappa = 0;
            for (uint32_t left = weight_n; left > 0;) {
                uint32_t take = left > 64 ? 64 : left;
                kappa += static_cast<uint32_t>(std::popcount(rng.bits(take)));
                left -= take;
            }
            grower.reset();
            for (uint32_t i = 0; i < r; ++i) {
                rules::sample_from_shape(shapes.at(kappa, i), rng, buf);
                grower.apply(i, buf);
            }
            ++counts[grower.corank_destructive()];
        }
        shard_counts[shard] = std::move(counts);
    });

    EmpiricalDistribution d;
    d.r = r;
    d.total = samples;
    d.seed = seed;
    d.counts.assign(r + 1, 0);
    for (const auto& c : shard_counts)
        for (size_t j = 0; j < c.size(); ++j) d.counts[j] += c[j];
    return d;
}

DecompositionReport decomposition_check(const RuleId& rule, uint32_t r_max, uint64_t budget) {
    if (!sweep_fits(rule, r_max, budget)) {
        uint32_t fmax = feasible_sweep_r(rule, budget);
        throw BudgetExceeded("decomposition sweep exceeds the budget; feasible maximum r is " +
                                 std::to_string(fmax),
                             fmax);
    }
    uint64_t L = sweep_log2(rule, r_max);
    // suffix weights: leaves below one node at depth i
    std::vector<uint64_t> weight(r_max + 1, 0);
    weight[r_max] = 0;
    for (uint32_t i = r_max; i-- > 0;) weight[i] = weight[i + 1] + rules::step_space_log2(rule, i);

    auto table = [&](uint32_t rows) {
        return std::vector<std::vector<uint64_t>>(rows, std::vector<uint64_t>(r_max + 2, 0));
    };
    auto mu = table(r_max + 1), vz = table(r_max + 1), wz = table(r_max + 1);

    std::vector<std::vector<Step>> levels(r_max);
    for (uint32_t i = 0; i < r_max; ++i) levels[i] = rules::enumerate_step(rule, i);
    F2Matrix m;
    std::vector<uint64_t> scratch;
    auto rec = [&](auto&& self, uint32_t depth, int parent_z) -> void {
        uint32_t c = small_corank(m, scratch);
        uint64_t w = uint64_t(1) << weight[depth];
        mu[depth][c] += w;
        if (depth > 0 && parent_z) wz[depth - 1][c] += w;
        if (depth == r_max) return;
        int z = detector_or_zero(rule, m);
        if (z) vz[depth][c] += w;
        for (const Step& s : levels[depth]) {
            m.extend_inplace(s.v, s.w, s.c);
            self(self, depth + 1, z);
            m.shrink_inplace();
        }
    };
    rec(rec, 0, 0);

    DecompositionReport rep;
    rep.r_max = r_max;
    rep.max_residual = Dyadic(0);
    for (uint32_t i = 0; i < r_max; ++i) {
        // lhs = (mu_i - v_i) Q + w_i over states 0..i+1, exactly
        std::vector<Dyadic> lhs(i + 2, Dyadic(0));
        for (uint32_t s = 0; s <= i; ++s) {
            Dyadic m_minus_v = Dyadic(BigInt::from_u64(mu[i][s]) - BigInt::from_u64(vz[i][s]),
                                      static_cast<uint32_t>(L));
            if (m_minus_v.is_zero()) continue;
            for (int64_t j = static_cast<int64_t>(s) - 1; j <= static_cast<int64_t>(s) + 1; ++j) {
                if (j < 0 || j > static_cast<int64_t>(i) + 1) continue;
                Dyadic q = markov::qcl_entry(s, j);
                if (!q.is_zero()) lhs[static_cast<size_t>(j)] += m_minus_v * q;
            }
        }
        Dyadic res(0);
        for (uint32_t j = 0; j <= i + 1; ++j) {
            Dyadic rhs = Dyadic(BigInt::from_u64(mu[i + 1][j]), static_cast<uint32_t>(L));
            Dyadic w = Dyadic(BigInt::from_u64(wz[i][j]), static_cast<uint32_t>(L));
            res += (lhs[j] + w - rhs).abs();
        }
        if (rep.max_residual < res) rep.max_residual = res;
        rep.residuals.push_back(std::move(res));
    }
    return rep;
}

AuditReport transition_audit(const RuleId& rule, uint32_t r, bool exact,
                             uint64_t samples, uint64_t seed, uint64_t budget) {
    AuditReport rep;
    rep.rule = rule.to_string();
    rep.r = r;
    rep.mode = exact ? "exact" : "mc";
    if (exact) {
        if (!sweep_fits(rule, r, budget)) {
            uint32_t fmax = feasible_sweep_r(rule, budget);
            throw BudgetExceeded("audit sweep exceeds the budget; feasible maximum r is " +
                                     std::to_string(fmax),
                                 fmax);
        }
        uint64_t L = sweep_log2(rule, r);
        std::vector<uint64_t> weight(r + 1, 0);
        for (uint32_t i = r; i-- > 0;) weight[i] = weight[i + 1] + rules::step_space_log2(rule, i);

        std::vector<uint64_t> z1(r, 0);
        // cond[i][s][class]: mass of depth-(i+1) nodes whose parent had Z=0, corank s
        std::vector<std::vector<std::array<uint64_t, 3>>> cond(
            r, std::vector<std::array<uint64_t, 3>>(r + 2, {0, 0, 0}));

        std::vector<std::vector<Step>> levels(r);
        for (uint32_t i = 0; i < r; ++i) levels[i] = rules::enumerate_step(rule, i);
        F2Matrix m;
        std::vector<uint64_t> scratch;
        auto rec = [&](auto&& self, uint32_t depth, int parent_z, uint32_t parent_c) -> void {
            uint32_t c = small_corank(m, scratch);
            if (depth > 0 && !parent_z) {
                int cls = static_cast<int>(c) - static_cast<int>(parent_c) + 1;  // 0,1,2
                cond[depth - 1][parent_c][static_cast<size_t>(cls)] += uint64_t(1) << weight[depth];
            }
            if (depth == r) return;
            int z = detector_or_zero(rule, m);
            if (z) z1[depth] += uint64_t(1) << weight[depth];
            for (const Step& s : levels[depth]) {
                m.extend_inplace(s.v, s.w, s.c);
                self(self, depth + 1, z, c);
                m.shrink_inplace();
            }
        };
        rec(rec, 0, 0, 0);

        for (uint32_t i = 0; i < r; ++i) {
            AuditRow row;
            row.i = i;
            Dyadic p(BigInt::from_u64(z1[i]), static_cast<uint32_t>(L));
            row.p_detect = static_cast<double>(p.to_long_double());
            row.p_detect_exact = p.to_string();
            long double max_dev = 0;
            bool all_zero = true;
            uint64_t generic = 0;
            for (uint32_t s = 0; s <= i; ++s) {
                uint64_t tot = cond[i][s][0] + cond[i][s][1] + cond[i][s][2];
                if (!tot) continue;
                generic += tot;
                for (int d = 0; d < 3; ++d) {
                    Dyadic q = markov::qcl_entry(s, static_cast<int64_t>(s) + d - 1);
                    // exact check: count == q * tot
                    Dyadic cnt(BigInt::from_u64(cond[i][s][static_cast<size_t>(d)]), 0);
                    Dyadic tot_d(BigInt::from_u64(tot), 0);
                    if (cnt != q * tot_d) all_zero = false;
                    long double dev = std::fabs(static_cast<long double>(cond[i][s][static_cast<size_t>(d)]) /
                                                    static_cast<long double>(tot) -
                                                q.to_long_double());
                    if (dev > max_dev) max_dev = dev;
                }
            }
            row.max_dev = static_cast<double>(max_dev);
            row.dev_exactly_zero = all_zero;
            row.generic_steps = generic;
            rep.rows.push_back(std::move(row));
        }
        return rep;
    }

    // Monte Carlo mode: one detector evaluation per step of each trajectory
    std::vector<StepShape> shapes;
    shapes.reserve(r);
    for (uint32_t i = 0; i < r; ++i) shapes.push_back(rules::step_shape(rule, i));
    std::vector<uint64_t> z1(r, 0);
    std::vector<std::vector<std::array<uint64_t, 3>>> cond(
        r, std::vector<std::array<uint64_t, 3>>(r + 2, {0, 0, 0}));
    Rng rng(Rng::sub_seed(seed, 0));
    f2::GrowthSimulator sim(r);
    Step buf;
    for (uint64_t k = 0; k < samples; ++k) {
        sim.reset();
        for (uint32_t i = 0; i < r; ++i) {
            int z = detector_or_zero(rule, sim.matrix());
            uint32_t c = sim.corank();
            rules::sample_from_shape(shapes[i], rng, buf);
            f2::TransitionClass cls = sim.step(buf.v, buf.w, buf.c);
            if (z) ++z1[i];
            else ++cond[i][c][static_cast<size_t>(f2::delta(cls) + 1)];
        }
    }
    for (uint32_t i = 0; i < r; ++i) {
        AuditRow row;
        row.i = i;
        row.p_detect = static_cast<double>(z1[i]) / static_cast<double>(samples);
        long double max_dev = 0;
        uint64_t generic = 0;
        for (uint32_t s = 0; s <= i; ++s) {
            uint64_t tot = cond[i][s][0] + cond[i][s][1] + cond[i][s][2];
            if (!tot) continue;
            generic += tot;
            for (int d = 0; d < 3; ++d) {
                long double dev = std::fabs(static_cast<long double>(cond[i][s][static_cast<size_t>(d)]) /
                                                static_cast<long double>(tot) -
                                            markov::qcl_entry(s, static_cast<int64_t>(s) + d - 1).to_long_double());
                if (dev > max_dev) max_dev = dev;
            }
        }
        row.max_dev = static_cast<double>(max_dev);
        row.dev_exactly_zero = false;
        row.generic_steps = generic;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

HoeffdingResult hoeffding_tail(uint32_t r, double eps) {
    if (!(eps > 0 && eps < 0.5)) throw std::invalid_argument("hoeffding_tail: eps in (0, 1/2) required");
    HoeffdingResult res;
    res.r = r;
    res.eps = eps;
    // cutoffs within 1e-9 of an integer are treated as exactly that integer,
    // so decimal eps like 0.1 behaves as the rational it denotes
    long double lo = static_cast<long double>(eps) * r;
    long double hi = (1.0L - static_cast<long double>(eps)) * r;
    if (std::fabs(lo - std::round(lo)) < 1e-9L) lo = std::round(lo);
    if (std::fabs(hi - std::round(hi)) < 1e-9L) hi = std::round(hi);
    BigInt sum(0);
    for (uint32_t k = 0; k <= r; ++k) {
        if (static_cast<long double>(k) < lo || static_cast<long double>(k) > hi)
            sum += BigInt::binomial(r, k);
    }
    res.tail = Dyadic(std::move(sum), r);
    res.bound = 2.0 * std::exp(-2.0 * (0.5 - eps) * (0.5 - eps) * static_cast<double>(r));
    res.ok = static_cast<double>(res.tail.to_long_double()) <= res.bound;
    return res;
}

double distance_to_pi(const ExactDistribution& d) {
    uint32_t N = std::min<uint32_t>(std::max<uint32_t>(d.r, 64), 120);
    markov::ProbVector pi = markov::pi_cl_vector(N);
    long double s = 0;
    for (uint32_t j = 0; j <= N; ++j) {
        long double mj = j < d.mass.size() ? d.mass[j].to_long_double() : 0.0L;
        s += std::fabs(mj - pi.p[j]);
    }
    s += pi.leaked();
    return static_cast<double>(s);
}

double distance_to_pi(const EmpiricalDistribution& d) {
    uint32_t N = std::min<uint32_t>(std::max<uint32_t>(d.r, 64), 120);
    markov::ProbVector pi = markov::pi_cl_vector(N);
    long double s = 0;
    for (uint32_t j = 0; j <= N; ++j) {
        long double mj = j < d.counts.size()
                             ? static_cast<long double>(d.counts[j]) / static_cast<long double>(d.total)
                             : 0.0L;
        s += std::fabs(mj - pi.p[j]);
    }
    s += pi.leaked();
    return static_cast<double>(s);
}

double mc_stderr(const EmpiricalDistribution& d) {
    // E |phat_j - p_j| ~= sqrt(2 p (1-p) / (pi S)) per state, summed
    long double s = 0;
    long double total = static_cast<long double>(d.total);
    for (uint64_t c : d.counts) {
        if (!c) continue;
        long double p = static_cast<long double>(c) / total;
        s += std::sqrt(2.0L * p * (1.0L - p) / (3.14159265358979323846L * total));
    }
    return static_cast<double>(s);
}

ConvergenceReport convergence_report(const FamilySpec& fam, std::span<const uint32_t> rs,
                                     uint64_t samples, uint64_t seed, uint64_t budget,
                                     uint32_t threads) {
    if (rs.empty()) throw std::invalid_argument("convergence_report: empty r list");
    ConvergenceReport rep;
    rep.family = fam.to_string();
    for (uint32_t r : rs) {
        ConvergenceRow row;
        row.r = r;
        bool exact_ok;
        if (!fam.mixture && fam.rule.family == Family::Mat) {
            exact_ok = true;  // the unconstrained family has an exact chain law
        } else if (fam.mixture) {
            exact_ok = true;
            uint64_t work = 0;
            for (uint32_t k = 0; k <= fam.kappa_range(r) && exact_ok; ++k) {
                RuleId rk = fam.rule;
                rk.kappa = k;
                uint64_t l = sweep_log2(rk, r);
                if (l >= 63 || work + (uint64_t(1) << l) > budget) exact_ok = false;
                else work += uint64_t(1) << l;
            }
        } else {
            exact_ok = sweep_fits(fam.rule, r, budget);
        }
        if (exact_ok) {
            ExactDistribution d = (!fam.mixture && fam.rule.family == Family::Mat)
                                      ? mat_chain_distribution(r)
                                      : mixture_exact(fam, r, budget);
            row.distance = distance_to_pi(d);
            row.mode = "exact";
            row.samples = 0;
            row.stderr_est = 0;
            row.in_fit = true;
        } else {
            EmpiricalDistribution d = mixture_mc(fam, r, samples, seed, threads);
            row.distance = distance_to_pi(d);
            row.mode = "mc";
            row.samples = samples;
            row.stderr_est = mc_stderr(d);
            row.in_fit = row.distance > rep.noise_floor_factor * row.stderr_est;
        }
        rep.rows.push_back(row);
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : rep.rows)
        if (row.in_fit && row.distance > 0) pts.emplace_back(static_cast<double>(row.r), row.distance);
    if (pts.size() >= 2) {
        rep.fit = markov::rate_fit(pts);
        rep.has_fit = true;
    }
    return rep;
}

namespace {

// direct enumeration of the constrained matrix spaces behind the Pell rules
struct RawPellSpace {
    uint32_t m = 0;  // matrix side
    std::vector<uint64_t> counts;
    uint64_t total = 0;
};

RawPellSpace raw_pell_space(uint32_t j, uint32_t s, uint32_t kappa, int a, int b) {
    RawPellSpace out;
    if (j == 1 || j == 2) {
        uint32_t m = s + 1;
        out.m = m;
        out.counts.assign(m + 1, 0);
        // first row pinned: zero for j=1, first kappa+1 ones for j=2
        F2Vector first = j == 1 ? F2Vector(m) : F2Vector::ones_prefix(m, kappa + 1);
        if (first.parity() != 0) return out;  // row sums cannot vanish: empty space
        // free bits: strictly upper entries outside the first row
        std::vector<std::pair<uint32_t, uint32_t>> free_pos;
        for (uint32_t i0 = 2; i0 <= m; ++i0)
            for (uint32_t j0 = i0 + 1; j0 <= m; ++j0) free_pos.emplace_back(i0, j0);
        uint64_t nf = free_pos.size();
        std::vector<uint64_t> scratch;
        for (uint64_t bits = 0; bits < (uint64_t(1) << nf); ++bits) {
            F2Matrix A(m);
            for (uint32_t c0 = 1; c0 <= m; ++c0) A.set(1, c0, first.get(c0));
            for (uint64_t k = 0; k < nf; ++k)
                A.set(free_pos[k].first, free_pos[k].second, (bits >> k) & 1);
            // lower entries from the (anti)symmetry pattern
            for (uint32_t i0 = 1; i0 <= m; ++i0)
                for (uint32_t j0 = i0 + 1; j0 <= m; ++j0) {
                    int anti = (j0 <= kappa + 1) ? 1 : 0;
                    A.set(j0, i0, A.get(i0, j0) ^ anti);
                }
            // diagonal from zero row sums (row 1 already consistent)
            for (uint32_t i0 = 2; i0 <= m; ++i0) {
                int ssum = 0;
                for (uint32_t j0 = 1; j0 <= m; ++j0)
                    if (j0 != i0) ssum ^= A.get(i0, j0);
                A.set(i0, i0, ssum);
            }
            ++out.counts[small_corank(A, scratch)];
            ++out.total;
        }
        return out;
    }
    if (j == 3) {
        uint32_t m = s + 2;
        out.m = m;
        out.counts.assign(m + 1, 0);
        std::vector<std::pair<uint32_t, uint32_t>> free_pos;
        for (uint32_t j0 = 3; j0 <= kappa + 2 && j0 <= m; ++j0) free_pos.emplace_back(2, j0);
        for (uint32_t i0 = 3; i0 <= m; ++i0)
            for (uint32_t j0 = i0 + 1; j0 <= m; ++j0) free_pos.emplace_back(i0, j0);
        for (uint32_t k = 3; k <= m; ++k) free_pos.emplace_back(k, k);  // free diagonal
        uint64_t nf = free_pos.size();
        std::vector<uint64_t> scratch;
        for (uint64_t bits = 0; bits < (uint64_t(1) << nf); ++bits) {
            F2Matrix A(m);
            for (uint32_t c0 = 1; c0 <= m; ++c0) A.set(1, c0, c0 <= kappa + 2 ? 1 : 0);
            A.set(2, 1, a);
            A.set(2, 2, b);
            for (uint32_t k = 3; k <= m; ++k) A.set(k, 2, k - 2 <= kappa ? 1 : 0);
            for (uint64_t k = 0; k < nf; ++k)
                A.set(free_pos[k].first, free_pos[k].second, (bits >> k) & 1);
            // pattern: antisymmetric inside the first kappa+2 indices away
            // from index 2, symmetric beyond
            for (uint32_t i0 = 1; i0 <= m; ++i0)
                for (uint32_t j0 = i0 + 1; j0 <= m; ++j0) {
                    if (j0 <= kappa + 2) {
                        if (i0 != 2 && j0 != 2) A.set(j0, i0, A.get(i0, j0) ^ 1);
                    } else {
                        if (i0 == 2) A.set(2, j0, A.get(j0, 2));
                        else A.set(j0, i0, A.get(i0, j0));
                    }
                }
            ++out.counts[small_corank(A, scratch)];
            ++out.total;
        }
        return out;
    }
    throw std::invalid_argument("pell_space_crosscheck: j must be 1, 2 or 3");
}

}  // namespace

PellCheckReport pell_space_crosscheck(uint32_t j, uint32_t s, uint32_t kappa, int a, int b,
                                      uint64_t budget) {
    if (kappa > s) throw std::invalid_argument("pell_space_crosscheck: kappa <= s required");
    PellCheckReport rep;
    rep.j = j;
    rep.s = s;
    rep.kappa = kappa;
    rep.a = a;
    rep.b = b;
    rep.offset = 1;

    RawPellSpace raw = raw_pell_space(j, s, kappa, a, b);
    rep.raw_count = raw.total;
    if (raw.total == 0) {
        rep.empty = true;
        rep.match = true;  // nothing to contradict
        return rep;
    }
    uint64_t log2_total = std::countr_zero(raw.total);
    rep.raw_mass = counts_to_mass(raw.counts, log2_total);

    RuleId rule;
    rule.family = j == 1 ? Family::Pell1 : (j == 2 ? Family::Pell2 : Family::Pell3);
    rule.kappa = kappa;
    rule.a = a;
    rule.b = b;
    uint32_t r_side = j == 3 ? s + 1 : s;
    ExactDistribution ruled = exact_distribution(rule, r_side, budget);
    rep.rule_mass_shifted.assign(raw.m + 1, Dyadic(0));
    for (uint32_t k = 0; k < ruled.mass.size(); ++k)
        rep.rule_mass_shifted[k + rep.offset] = ruled.mass[k];

    rep.match = true;
    for (uint32_t k = 0; k <= raw.m; ++k) {
        Dyadic lhs = k < rep.raw_mass.size() ? rep.raw_mass[k] : Dyadic(0);
        if (lhs != rep.rule_mass_shifted[k]) rep.match = false;
    }
    return rep;
}

}  // namespace corank::experiments
