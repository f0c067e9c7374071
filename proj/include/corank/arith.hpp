#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "corank/f2.hpp"

namespace corank::arith {

// Kronecker symbol (a | n), defined for all integers with (0 | 0) excluded
int kronecker(int64_t a, int64_t n);

bool is_squarefree(int64_t d);
std::vector<int64_t> prime_factors(int64_t x);  // distinct primes of |x|, ascending

struct RedeiContext {
    int64_t d = 0;
    int64_t discriminant = 0;
    std::vector<int64_t> primes;  // row order: l first (if given), then 2, then q = 3 mod 4, then q = 1 mod 4
    int64_t l = 0;                // 0 when not given
    uint32_t t = 0;               // number of prime rows
    uint32_t kappa = 0;           // odd primes = 3 mod 4 among the q_i (l excluded)
    int64_t two_part = 0;         // prime discriminant carried by 2: -4, 8 or -8; 1 when the discriminant is odd
};

// The quadratic-residue matrix of the discriminant's primes: entry (i, j) is
// 1 exactly when the character attached to prime j is -1 at Frobenius of
// prime i; diagonal entries make every row sum to zero.
std::pair<f2::F2Matrix, RedeiContext> redei_matrix(int64_t d, int64_t l = 0);

// off-diagonal pairs of odd prime rows p, q must satisfy
// entry(p,q) + entry(q,p) = 1 iff p = q = 3 mod 4, else 0
bool validate_reciprocity(int64_t d);

struct PellClassification {
    std::string label;  // pell1 | pell2 | pell1' | pell3
    uint32_t s = 0;
    uint32_t kappa = 0;
    int a = 0, b = 0;         // pell3 only
    bool constraints_ok = false;  // the (anti)symmetry pattern, first row excluded
    bool first_row_flag = false;  // first row matches the solubility pattern
};

PellClassification classify_pell(int64_t d, int64_t l);

struct ScanRow {
    int64_t d = 0;
    int64_t discriminant = 0;
    uint32_t t = 0;
    uint32_t kappa = 0;
    uint32_t corank = 0;
    bool reciprocity_ok = false;
    std::string pell_label;  // empty unless l was given and divides d
    int first_row_flag = -1;  // -1 when not classified
};

// all squarefree d with 1 < |d| <= dmax, positive then negative per magnitude
std::vector<ScanRow> scan(int64_t dmax, int64_t l = 0);

}  // namespace corank::arith
