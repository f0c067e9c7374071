#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "corank/dyadic.hpp"
#include "corank/markov.hpp"
#include "corank/rules.hpp"

namespace corank::experiments {

struct BudgetExceeded : std::runtime_error {
    uint32_t feasible_max;
    BudgetExceeded(const std::string& what, uint32_t feasible) : std::runtime_error(what), feasible_max(feasible) {}
};

uint64_t default_budget();  // CORANK_BUDGET env override, else 2^26

struct ExactDistribution {
    uint32_t r = 0;
    std::vector<Dyadic> mass;  // index = corank, sums to exactly 1
    uint64_t log2_total = 0;   // log2 of the enumerated (or implied) space size
    std::string method;        // "enumeration" or "chain"
};

struct EmpiricalDistribution {
    uint32_t r = 0;
    std::vector<uint64_t> counts;
    uint64_t total = 0;
    uint64_t seed = 0;
};

// exhaustive sweep over all step sequences of length r
ExactDistribution exact_distribution(const rules::RuleId& rule, uint32_t r, uint64_t budget);

// exact law of the unconstrained family as repeated kernel application;
// agrees with the sweep and has no budget limit
ExactDistribution mat_chain_distribution(uint32_t r);

EmpiricalDistribution mc_distribution(const rules::RuleId& rule, uint32_t r, uint64_t samples,
                                      uint64_t seed, uint32_t threads = 1);

// same sampler driven through the incremental rank-update engine; must be
// bit-identical to mc_distribution on the same arguments
EmpiricalDistribution mc_distribution_incremental(const rules::RuleId& rule, uint32_t r,
                                                  uint64_t samples, uint64_t seed);

// A convergence/mixture target: either a fixed rule or the binomial mixture
// over kappa of a kappa family.
struct FamilySpec {
    bool mixture = false;
    rules::RuleId rule;

    // mat | alt | redei | redei:K | pell1[:K] | pell2[:K] | pell3:A:B | pell3:K:A:B
    static FamilySpec parse(std::string_view s);
    std::string to_string() const;
    // Pell3 mixes kappa = 0..r-1 with Binom(r-1, .) weights; the others use
    // Binom(r, .) over kappa = 0..r
    uint32_t kappa_range(uint32_t r) const;
};

ExactDistribution mixture_exact(const FamilySpec& fam, uint32_t r, uint64_t budget);
EmpiricalDistribution mixture_mc(const FamilySpec& fam, uint32_t r, uint64_t samples,
                                 uint64_t seed, uint32_t threads = 1);

struct DecompositionReport {
    uint32_t r_max = 0;
    std::vector<Dyadic> residuals;  // index i < r_max
    Dyadic max_residual;
};

// checks (mu_i - v_i) Q + w_i = mu_{i+1} exactly, where v_i, w_i restrict to
// the detector event Z_i = 1
DecompositionReport decomposition_check(const rules::RuleId& rule, uint32_t r_max, uint64_t budget);

struct AuditRow {
    uint32_t i = 0;
    double p_detect = 0;
    std::string p_detect_exact;  // dyadic string (exact mode)
    double max_dev = 0;          // worst conditional-row deviation from the kernel
    bool dev_exactly_zero = false;
    uint64_t generic_steps = 0;
};

struct AuditReport {
    std::string rule;
    uint32_t r = 0;
    std::string mode;  // "exact" or "mc"
    std::vector<AuditRow> rows;
};

AuditReport transition_audit(const rules::RuleId& rule, uint32_t r, bool exact,
                             uint64_t samples, uint64_t seed, uint64_t budget);

struct HoeffdingResult {
    uint32_t r = 0;
    double eps = 0;
    Dyadic tail;       // exact binomial tail mass
    double bound = 0;  // 2 exp(-2 (1/2 - eps)^2 r)
    bool ok = false;   // tail <= bound
};

HoeffdingResult hoeffding_tail(uint32_t r, double eps);

struct ConvergenceRow {
    uint32_t r = 0;
    double distance = 0;
    std::string mode;  // "exact" or "mc"
    uint64_t samples = 0;
    double stderr_est = 0;
    bool in_fit = false;
};

struct ConvergenceReport {
    std::string family;
    std::vector<ConvergenceRow> rows;
    bool has_fit = false;
    markov::RateFit fit;
    double noise_floor_factor = 3.0;
};

ConvergenceReport convergence_report(const FamilySpec& fam, std::span<const uint32_t> rs,
                                     uint64_t samples, uint64_t seed, uint64_t budget,
                                     uint32_t threads = 1);

struct PellCheckReport {
    uint32_t j = 0, s = 0, kappa = 0;
    int a = 0, b = 0;
    bool empty = false;  // the raw constraint space has no members
    bool match = false;  // raw corank law equals the rule law shifted by offset
    uint32_t offset = 1;
    uint64_t raw_count = 0;
    std::vector<Dyadic> raw_mass;
    std::vector<Dyadic> rule_mass_shifted;
};

// enumerates the raw constrained matrix space directly and compares with the
// rule-built distribution shifted by the corank offset of the reduction
PellCheckReport pell_space_crosscheck(uint32_t j, uint32_t s, uint32_t kappa, int a, int b,
                                      uint64_t budget);

// L1 distance against the stationary law, padding with its tail mass
double distance_to_pi(const ExactDistribution& d);
double distance_to_pi(const EmpiricalDistribution& d);
// estimate of E || empirical - truth ||_1 under multinomial sampling
double mc_stderr(const EmpiricalDistribution& d);

}  // namespace corank::experiments
