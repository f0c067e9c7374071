#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corank/f2.hpp"
#include "corank/rng.hpp"

namespace corank::rules {

enum class Family { Mat, Alt, Redei, Pell1, Pell2, Pell3 };

// One of the six matrix-growth families. kappa parametrizes Redei/Pell rules;
// (a, b) is the fixed second step of Pell3. The even-discriminant variant of
// Pell1 reduces to the same rule and is not a separate family.
struct RuleId {
    Family family = Family::Mat;
    uint32_t kappa = 0;
    int a = 0, b = 0;

    static RuleId parse(std::string_view s);  // mat | alt | redei:K | pell1:K | pell2:K | pell3:K:A:B
    std::string to_string() const;
    bool uses_kappa() const { return family != Family::Mat && family != Family::Alt; }
};

// one extension datum: appended row v, appended column w, corner c
struct Step {
    f2::F2Vector v, w;
    int c = 0;
};

// |S_i| as a power of two (every step space here has power-of-two size)
uint32_t step_space_log2(const RuleId& rule, uint32_t i);
uint64_t step_space_size(const RuleId& rule, uint32_t i);  // throws if it would overflow

bool step_valid(const RuleId& rule, uint32_t i, const Step& s);

// all members of S_i in lexicographic order of (packed v, packed w, c)
std::vector<Step> enumerate_step(const RuleId& rule, uint32_t i);

// Fixed description of one step space S_i: pinned coordinates, the mask that
// derives w from v, and which coordinates stay free. Every S_i of the six
// families fits this form, so the enumerator, the sampler and the size
// formula all read it.
struct StepShape {
    uint32_t i = 0;
    f2::F2Vector v_base, w_mask;  // w = v ^ w_mask before free overwrites
    uint32_t v_free_from = 1;     // first free v coordinate; i+1 when none
    enum class WFree { None, Pos2, All } w_free = WFree::None;
    bool c_free = true;
    int c_base = 0;
    uint32_t log2_size() const;
};

StepShape step_shape(const RuleId& rule, uint32_t i);

// uniform over S_i by drawing exactly the free coordinates; no rejection
Step sample_step(const RuleId& rule, uint32_t i, Rng& rng);
void sample_from_shape(const StepShape& shape, Rng& rng, Step& out);

// fold the steps through row/column extension starting from the empty matrix
f2::F2Matrix build_matrix(const RuleId& rule, std::span<const Step> steps);

// Genericity detector Z_i: returns 1 when the i x i matrix is exceptional,
// 0 when the next extension drawn from S_i transitions exactly like the
// corank kernel. Throws for Mat (that family needs no detector; callers use
// Z == 0 there).
int genericity(const RuleId& rule, const f2::F2Matrix& a);

// ground-truth check: enumerates S_i from state A and compares the exact
// transition frequencies with the corank kernel row
bool transition_is_markov(const RuleId& rule, const f2::F2Matrix& a);

}  // namespace corank::rules
