#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "corank/arith.hpp"
#include "corank/experiments.hpp"

namespace corank::report {

inline constexpr const char* kToolName = "corank";
inline constexpr const char* kToolVersion = "0.1.0";

enum class Format { Json, Csv };

std::string fmt_real(long double x);  // 17 significant digits

std::string pi_payload(uint32_t max_j, long double precision, Format f);
std::string qcl_payload(uint32_t n, Format f);
std::string stationarity_payload(uint32_t n, long double precision, Format f);
std::string drift_payload(uint32_t xmin, uint32_t xmax, Format f);
std::string exact_payload(const rules::RuleId& rule, const experiments::ExactDistribution& d, Format f);
std::string mc_payload(const rules::RuleId& rule, const experiments::EmpiricalDistribution& d, Format f);
std::string mixture_payload(const experiments::FamilySpec& fam, const experiments::ExactDistribution& d, Format f);
std::string mixture_payload(const experiments::FamilySpec& fam, const experiments::EmpiricalDistribution& d, Format f);
std::string audit_payload(const experiments::AuditReport& a, Format f);
std::string decomp_payload(const rules::RuleId& rule, const experiments::DecompositionReport& d, Format f);
std::string converge_payload(const experiments::ConvergenceReport& c, uint64_t seed, Format f);
std::string hoeffding_payload(const experiments::HoeffdingResult& h, Format f);
std::string pellcheck_payload(const experiments::PellCheckReport& p, Format f);
std::string redei_payload(int64_t d, int64_t l, Format f);
std::string scan_payload(const std::vector<arith::ScanRow>& rows, int64_t dmax, int64_t l, Format f);

// wraps a payload in the reproducibility envelope; timestamp may be empty
std::string envelope(const std::string& command, std::optional<uint64_t> seed,
                     const std::string& timestamp, const std::string& payload, Format f);

}  // namespace corank::report
