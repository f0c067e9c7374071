#include "corank.h"

#include <cstring>
#include <new>
#include <string>

#include "corank/report.hpp"

using corank::Dyadic;
using corank::experiments::BudgetExceeded;
using corank::report::Format;

struct corank_matrix {
    corank::f2::F2Matrix m;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
corank_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const BudgetExceeded& e) {
        g_last_error = e.what();
        return CORANK_ERR_BUDGET;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return CORANK_ERR_USAGE;
    } catch (const std::domain_error& e) {
        g_last_error = e.what();
        return CORANK_ERR_USAGE;
    } catch (const std::overflow_error& e) {
        g_last_error = e.what();
        return CORANK_ERR_USAGE;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CORANK_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return CORANK_ERR_INTERNAL;
    }
}

corank_status require(bool cond, const char* msg) {
    if (cond) return CORANK_OK;
    g_last_error = msg;
    return CORANK_ERR_USAGE;
}

Format to_format(corank_format f) { return f == CORANK_FORMAT_CSV ? Format::Csv : Format::Json; }

corank_status emit(char** out, const std::string& payload) {
    *out = dup_string(payload);
    return CORANK_OK;
}

}  // namespace

extern "C" {

const char* corank_version(void) { return corank::report::kToolVersion; }

const char* corank_last_error(void) { return g_last_error.c_str(); }

void corank_string_free(char* s) { delete[] s; }

uint64_t corank_default_budget(void) { return corank::experiments::default_budget(); }

corank_status corank_matrix_new(uint32_t n, corank_matrix** out) {
    if (require(out != nullptr, "null output pointer")) return CORANK_ERR_USAGE;
    return guarded([&] {
        *out = new corank_matrix{corank::f2::F2Matrix(n)};
        return CORANK_OK;
    });
}

corank_status corank_matrix_parse(const char* rows, corank_matrix** out) {
    if (require(rows && out, "null argument")) return CORANK_ERR_USAGE;
    return guarded([&] {
        *out = new corank_matrix{corank::f2::F2Matrix::parse(rows)};
        return CORANK_OK;
    });
}

void corank_matrix_free(corank_matrix* m) { delete m; }

corank_status corank_matrix_set(corank_matrix* m, uint32_t i, uint32_t j, int bit) {
    if (require(m != nullptr, "null matrix")) return CORANK_ERR_USAGE;
    return guarded([&] {
        if (i < 1 || i > m->m.n() || j < 1 || j > m->m.n())
            throw std::invalid_argument("index out of range");
        m->m.set(i, j, bit ? 1 : 0);
        return CORANK_OK;
    });
}

corank_status corank_matrix_get(const corank_matrix* m, uint32_t i, uint32_t j, int* bit) {
    if (require(m && bit, "null argument")) return CORANK_ERR_USAGE;
    return guarded([&] {
        if (i < 1 || i > m->m.n() || j < 1 || j > m->m.n())
            throw std::invalid_argument("index out of range");
        *bit = m->m.get(i, j);
        return CORANK_OK;
    });
}

corank_status corank_matrix_rank(const corank_matrix* m, uint32_t* rank, uint32_t* corank) {
    if (require(m != nullptr, "null matrix")) return CORANK_ERR_USAGE;
    return guarded([&] {
        uint32_t rk = corank::f2::rank(m->m);
        if (rank) *rank = rk;
        if (corank) *corank = m->m.n() - rk;
        return CORANK_OK;
    });
}

corank_status corank_matrix_extend(const corank_matrix* m, const char* v, const char* w, int c,
                                   corank_matrix** out) {
    if (require(m && v && w && out, "null argument")) return CORANK_ERR_USAGE;
    return guarded([&] {
        auto vv = corank::f2::F2Vector::from_string(v);
        auto wv = corank::f2::F2Vector::from_string(w);
        *out = new corank_matrix{corank::f2::extend(m->m, vv, wv, c ? 1 : 0)};
        return CORANK_OK;
    });
}

corank_status corank_matrix_classify(const corank_matrix* m, const char* v, const char* w, int c,
                                     int* klass) {
    if (require(m && v && w && klass, "null argument")) return CORANK_ERR_USAGE;
    return guarded([&] {
        auto vv = corank::f2::F2Vector::from_string(v);
        auto wv = corank::f2::F2Vector::from_string(w);
        if (vv.len() != m->m.n() || wv.len() != m->m.n())
            throw std::invalid_argument("length mismatch");
        *klass = corank::f2::delta(corank::f2::classify_transition(m->m, vv, wv, c ? 1 : 0));
        return CORANK_OK;
    });
}

corank_status corank_matrix_in_image(const corank_matrix* m, const char* v, int* in_image) {
    if (require(m && v && in_image, "null argument")) return CORANK_ERR_USAGE;
    return guarded([&] {
        *in_image = corank::f2::in_image(m->m, corank::f2::F2Vector::from_string(v)) ? 1 : 0;
        return CORANK_OK;
    });
}

corank_status corank_matrix_pairing(const corank_matrix* m, const char* v, const char* w, int* bit) {
    if (require(m && v && w && bit, "null argument")) return CORANK_ERR_USAGE;
    return guarded([&] {
        *bit = corank::f2::pairing(m->m, corank::f2::F2Vector::from_string(v),
                                   corank::f2::F2Vector::from_string(w));
        return CORANK_OK;
    });
}

corank_status corank_pi_value(uint32_t j, double* out) {
    if (require(out != nullptr, "null output pointer")) return CORANK_ERR_USAGE;
    return guarded([&] {
        *out = static_cast<double>(corank::markov::pi_cl(j));
        return CORANK_OK;
    });
}

corank_status corank_qcl_entry_str(uint32_t i, int64_t j, char** dyadic) {
    if (require(dyadic != nullptr, "null output pointer")) return CORANK_ERR_USAGE;
    return guarded([&] { return emit(dyadic, corank::markov::qcl_entry(i, j).to_string()); });
}

corank_status corank_report_pi(uint32_t max_j, double precision, corank_format f, char** out) {
    if (require(out != nullptr, "null output pointer")) return CORANK_ERR_USAGE;
    return guarded([&] {
        if (!(precision > 0)) throw std::invalid_argument("precision must be positive");
        return emit(out, corank::report::pi_payload(max_j, precision, to_format(f)));
    });
}

corank_status corank_report_qcl(uint32_t n, corank_format f, char** out) {
    if (require(out != nullptr, "null output pointer")) return CORANK_ERR_USAGE;
    return guarded([&] { return emit(out, corank::report::qcl_payload(n, to_format(f))); });
}

corank_status corank_report_stationarity(uint32_t n, double precision, corank_format f, char** out) {
    if (require(out != nullptr, "null output pointer")) return CORANK_ERR_USAGE;
    return guarded([&] {
        if (!(precision > 0)) throw std::invalid_argument("precision must be positive");
        return emit(out, corank::report::stationarity_payload(n, precision, to_format(f)));
    });
}

corank_status corank_report_drift(uint32_t xmin, uint32_t xmax, corank_format f, char** out) {
    if (require(out != nullptr, "null output pointer")) return CORANK_ERR_USAGE;
    return guarded([&] { return emit(out, corank::report::drift_payload(xmin, xmax, to_format(f))); });
}

corank_status corank_report_exact(const char* rule, uint32_t r, uint64_t budget,
                                  corank_format f, char** out) {
    if (require(rule && out, "null argument")) return CORANK_ERR_USAGE;
    return guarded([&] {
        auto id = corank::rules::RuleId::parse(rule);
        auto d = corank::experiments::exact_distribution(id, r, budget);
        return emit(out, corank::report::exact_payload(id, d, to_format(f)));
    });
}

corank_status corank_report_mc(const char* rule, uint32_t r, uint64_t samples, uint64_t seed,
                               uint32_t threads, corank_format f, char** out) {
    if (require(rule && out, "null argument")) return CORANK_ERR_USAGE;
    return guarded([&] {
        auto id = corank::rules::RuleId::parse(rule);
        auto d = corank::experiments::mc_distribution(id, r, samples, seed, threads ? threads : 1);
        return emit(out, corank::report::mc_payload(id, d, to_format(f)));
    });
}

corank_status corank_report_mixture(const char* family, uint32_t r, const char* mode,
                                    uint64_t samples, uint64_t seed, uint64_t budget,
                                    uint32_t threads, corank_format f, char** out) {
    if (require(family && mode && out, "null argument")) return CORANK_ERR_USAGE;
    return guarded([&] {
        auto fam = corank::experiments::FamilySpec::parse(family);
        std::string m = mode;
        if (m == "auto") {
            try {
                auto d = corank::experiments::mixture_exact(fam, r, budget);
                return emit(out, corank::report::mixture_payload(fam, d, to_format(f)));
            } catch (const BudgetExceeded&) {
                m = "mc";
            }
        }
        if (m == "exact") {
            auto d = corank::experiments::mixture_exact(fam, r, budget);
            return emit(out, corank::report::mixture_payload(fam, d, to_format(f)));
        }
        if (m == "mc") {
            auto d = corank::experiments::mixture_mc(fam, r, samples, seed, threads ? threads : 1);
            return emit(out, corank::report::mixture_payload(fam, d, to_format(f)));
        }
        throw std::invalid_argument("mixture mode must be exact, mc or auto");
    });
}

corank_status corank_report_audit(const char* rule, uint32_t r, int exact_mode, uint64_t samples,
                                  uint64_t seed, uint64_t budget, corank_format f, char** out) {
    if (require(rule && out, "null argument")) return CORANK_ERR_USAGE;
    return guarded([&] {
        auto id = corank::rules::RuleId::parse(rule);
        auto a = corank::experiments::transition_audit(id, r, exact_mode != 0, samples, seed, budget);
        return emit(out, corank::report::audit_payload(a, to_format(f)));
    });
}

corank_status corank_report_decomp(const char* rule, uint32_t rmax, uint64_t budget,
                                   corank_format f, char** out) {
    if (require(rule && out, "null argument")) return CORANK_ERR_USAGE;
    return guarded([&] {
        auto id = corank::rules::RuleId::parse(rule);
        auto d = corank::experiments::decomposition_check(id, rmax, budget);
        return emit(out, corank::report::decomp_payload(id, d, to_format(f)));
    });
}

corank_status corank_report_converge(const char* family, const uint32_t* rs, uint32_t n_rs,
                                     uint64_t samples, uint64_t seed, uint64_t budget,
                                     uint32_t threads, corank_format f, char** out) {
    if (require(family && rs && out && n_rs > 0, "need a family and a nonempty r list"))
        return CORANK_ERR_USAGE;
    return guarded([&] {
        auto fam = corank::experiments::FamilySpec::parse(family);
        std::vector<uint32_t> list(rs, rs + n_rs);
        for (uint32_t k = 1; k < n_rs; ++k)
            if (list[k] <= list[k - 1]) throw std::invalid_argument("r list must be increasing");
        auto c = corank::experiments::convergence_report(fam, list, samples, seed, budget,
                                                         threads ? threads : 1);
        return emit(out, corank::report::converge_payload(c, seed, to_format(f)));
    });
}

corank_status corank_report_hoeffding(uint32_t r, double eps, corank_format f, char** out) {
    if (require(out != nullptr, "null output pointer")) return CORANK_ERR_USAGE;
    return guarded([&] {
        auto h = corank::experiments::hoeffding_tail(r, eps);
        return emit(out, corank::report::hoeffding_payload(h, to_format(f)));
    });
}

corank_status corank_report_pellcheck(uint32_t j, uint32_t s, uint32_t kappa, int a, int b,
                                      uint64_t budget, corank_format f, char** out) {
    if (require(out != nullptr, "null output pointer")) return CORANK_ERR_USAGE;
    return guarded([&] {
        auto p = corank::experiments::pell_space_crosscheck(j, s, kappa, a, b, budget);
        return emit(out, corank::report::pellcheck_payload(p, to_format(f)));
    });
}

corank_status corank_report_redei(int64_t d, int64_t l, corank_format f, char** out) {
    if (require(out != nullptr, "null output pointer")) return CORANK_ERR_USAGE;
    return guarded([&] { return emit(out, corank::report::redei_payload(d, l, to_format(f))); });
}

corank_status corank_report_scan(int64_t dmax, int64_t l, corank_format f, char** out) {
    if (require(out != nullptr, "null output pointer")) return CORANK_ERR_USAGE;
    return guarded([&] {
        if (dmax < 2) throw std::invalid_argument("scan: dmax >= 2 required");
        auto rows = corank::arith::scan(dmax, l);
        return emit(out, corank::report::scan_payload(rows, dmax, l, to_format(f)));
    });
}

corank_status corank_envelope(const char* command, int has_seed, uint64_t seed,
                              const char* timestamp, const char* payload, corank_format f,
                              char** out) {
    if (require(command && payload && out, "null argument")) return CORANK_ERR_USAGE;
    return guarded([&] {
        std::optional<uint64_t> s;
        if (has_seed) s = seed;
        std::string ts = timestamp ? timestamp : "";
        return emit(out, corank::report::envelope(command, s, ts, payload, to_format(f)));
    });
}

}  // extern "C"
