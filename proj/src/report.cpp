#include "corank/report.hpp"

#include <cstdio>

#include "json.hpp"

namespace corank::report {

using nlohmann::json;

std::string fmt_real(long double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17Lg", x);
    return buf;
}

namespace {

// one payload = a kind tag, scalar fields and one rectangular table;
// JSON and CSV render the same content
class Builder {
public:
    explicit Builder(std::string kind) : kind_(std::move(kind)) {}

    void scalar(const std::string& key, json v) { scalars_.emplace_back(key, std::move(v)); }
    void columns(std::vector<std::string> names) { cols_ = std::move(names); }
    void row(std::vector<json> cells) { rows_.push_back(std::move(cells)); }

    std::string str(Format f) const {
        if (f == Format::Json) {
            json out;
            out["kind"] = kind_;
            for (const auto& [k, v] : scalars_) out[k] = v;
            json rows = json::array();
            for (const auto& r : rows_) {
                json obj;
                for (size_t c = 0; c < cols_.size(); ++c) obj[cols_[c]] = r[c];
                rows.push_back(std::move(obj));
            }
            if (!cols_.empty()) out["rows"] = std::move(rows);
            return out.dump();
        }
        std::string out = "# kind=" + kind_ + "\n";
        for (const auto& [k, v] : scalars_) out += "# " + k + "=" + cell(v) + "\n";
        if (!cols_.empty()) {
            for (size_t c = 0; c < cols_.size(); ++c) out += (c ? "," : "") + cols_[c];
            out += "\n";
            for (const auto& r : rows_) {
                for (size_t c = 0; c < r.size(); ++c) out += (c ? "," : "") + cell(r[c]);
                out += "\n";
            }
        }
        return out;
    }

private:
    static std::string cell(const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_null()) return "";
        return v.dump();
    }

    std::string kind_;
    std::vector<std::pair<std::string, json>> scalars_;
    std::vector<std::string> cols_;
    std::vector<std::vector<json>> rows_;
};

json dy(const Dyadic& d) { return d.to_string(); }

}  // namespace

std::string pi_payload(uint32_t max_j, long double precision, Format f) {
    Builder b("pi");
    uint32_t terms = 0;
    markov::eta_infinity(precision, &terms);
    b.scalar("max_j", max_j);
    b.scalar("precision", fmt_real(precision));
    b.scalar("eta_terms", terms);
    long double sum = 0;
    b.columns({"j", "value"});
    for (uint32_t j = 0; j <= max_j; ++j) {
        long double v = markov::pi_cl(j, precision);
        sum += v;
        b.row({j, fmt_real(v)});
    }
    b.scalar("remainder", fmt_real(1.0L - sum));
    return b.str(f);
}

std::string qcl_payload(uint32_t n, Format f) {
    Builder b("qcl");
    markov::TruncatedKernel k = markov::qcl_truncated(n);
    b.scalar("n", n);
    b.scalar("clipped_mass", dy(k.clipped_mass));
    b.columns({"i", "down", "stay", "up"});
    for (uint32_t i = 0; i <= n; ++i) {
        json down = i == 0 ? json("0") : dy(k.rows[i][i - 1]);
        json up = i == n ? json("0") : dy(k.rows[i][i + 1]);
        b.row({i, down, dy(k.rows[i][i]), up});
    }
    return b.str(f);
}

std::string stationarity_payload(uint32_t n, long double precision, Format f) {
    Builder b("stationarity");
    markov::StationarityResult r = markov::stationarity_residual(n, precision);
    b.scalar("n", n);
    b.scalar("precision", fmt_real(precision));
    b.scalar("residual", fmt_real(r.residual));
    b.scalar("bound", fmt_real(r.bound));
    b.scalar("within_bound", r.residual <= r.bound);
    return b.str(f);
}

std::string drift_payload(uint32_t xmin, uint32_t xmax, Format f) {
    Builder b("drift");
    markov::DriftCertificate c = markov::drift_certificate(xmin, xmax);
    b.scalar("xmin", xmin);
    b.scalar("xmax", xmax);
    b.scalar("lambda_sup_from_3", fmt_real(c.lambda_sup_from_3));
    json bad = json::array();
    for (uint32_t x : c.states_at_one) bad.push_back(x);
    b.scalar("states_at_or_above_one", bad);
    b.columns({"x", "ratio_exact", "ratio"});
    for (const auto& [x, r] : c.ratios) b.row({x, dy(r), fmt_real(r.to_long_double())});
    return b.str(f);
}

namespace {

void distribution_rows(Builder& b, const experiments::ExactDistribution& d) {
    b.columns({"corank", "probability", "value"});
    for (uint32_t j = 0; j < d.mass.size(); ++j) {
        if (d.mass[j].is_zero() && j > d.r) continue;
        b.row({j, dy(d.mass[j]), fmt_real(d.mass[j].to_long_double())});
    }
}

void distribution_rows(Builder& b, const experiments::EmpiricalDistribution& d) {
    b.columns({"corank", "count", "frequency"});
    for (uint32_t j = 0; j < d.counts.size(); ++j) {
        if (d.counts[j] == 0) continue;
        b.row({j, d.counts[j],
               fmt_real(static_cast<long double>(d.counts[j]) / static_cast<long double>(d.total))});
    }
}

}  // namespace

std::string exact_payload(const rules::RuleId& rule, const experiments::ExactDistribution& d, Format f) {
    Builder b("exact_distribution");
    b.scalar("rule", rule.to_string());
    b.scalar("r", d.r);
    b.scalar("log2_total", d.log2_total);
    b.scalar("method", d.method);
    b.scalar("distance_to_pi", fmt_real(experiments::distance_to_pi(d)));
    distribution_rows(b, d);
    return b.str(f);
}

std::string mc_payload(const rules::RuleId& rule, const experiments::EmpiricalDistribution& d, Format f) {
    Builder b("mc_distribution");
    b.scalar("rule", rule.to_string());
    b.scalar("r", d.r);
    b.scalar("samples", d.total);
    b.scalar("seed", d.seed);
    b.scalar("stderr", fmt_real(experiments::mc_stderr(d)));
    b.scalar("distance_to_pi", fmt_real(experiments::distance_to_pi(d)));
    distribution_rows(b, d);
    return b.str(f);
}

std::string mixture_payload(const experiments::FamilySpec& fam, const experiments::ExactDistribution& d, Format f) {
    Builder b("mixture");
    b.scalar("family", fam.to_string());
    b.scalar("r", d.r);
    b.scalar("mode", "exact");
    b.scalar("distance_to_pi", fmt_real(experiments::distance_to_pi(d)));
    distribution_rows(b, d);
    return b.str(f);
}

std::string mixture_payload(const experiments::FamilySpec& fam, const experiments::EmpiricalDistribution& d, Format f) {
    Builder b("mixture");
    b.scalar("family", fam.to_string());
    b.scalar("r", d.r);
    b.scalar("mode", "mc");
    b.scalar("samples", d.total);
    b.scalar("seed", d.seed);
    b.scalar("stderr", fmt_real(experiments::mc_stderr(d)));
    b.scalar("distance_to_pi", fmt_real(experiments::distance_to_pi(d)));
    distribution_rows(b, d);
    return b.str(f);
}

std::string audit_payload(const experiments::AuditReport& a, Format f) {
    Builder b("transition_audit");
    b.scalar("rule", a.rule);
    b.scalar("r", a.r);
    b.scalar("mode", a.mode);
    b.columns({"i", "p_detect", "p_detect_exact", "max_dev", "dev_exactly_zero", "generic_steps"});
    for (const auto& row : a.rows)
        b.row({row.i, fmt_real(row.p_detect), row.p_detect_exact, fmt_real(row.max_dev),
               row.dev_exactly_zero, row.generic_steps});
    return b.str(f);
}

std::string decomp_payload(const rules::RuleId& rule, const experiments::DecompositionReport& d, Format f) {
    Builder b("decomposition_check");
    b.scalar("rule", rule.to_string());
    b.scalar("r_max", d.r_max);
    b.scalar("max_residual", dy(d.max_residual));
    b.scalar("residual_is_zero", d.max_residual.is_zero());
    b.columns({"i", "residual"});
    for (uint32_t i = 0; i < d.residuals.size(); ++i) b.row({i, dy(d.residuals[i])});
    return b.str(f);
}

std::string converge_payload(const experiments::ConvergenceReport& c, uint64_t seed, Format f) {
    Builder b("convergence");
    b.scalar("family", c.family);
    b.scalar("seed", seed);
    b.scalar("noise_floor_factor", fmt_real(c.noise_floor_factor));
    if (c.has_fit) {
        b.scalar("rho_hat", fmt_real(c.fit.rho_hat));
        b.scalar("c_hat", fmt_real(c.fit.c_hat));
        b.scalar("fit_rms_residual", fmt_real(c.fit.rms_residual));
        b.scalar("fit_points", c.fit.points);
    } else {
        b.scalar("rho_hat", nullptr);
        b.scalar("c_hat", nullptr);
        b.scalar("fit_rms_residual", nullptr);
        b.scalar("fit_points", 0);
    }
    b.columns({"r", "distance", "mode", "samples", "stderr", "in_fit"});
    for (const auto& row : c.rows)
        b.row({row.r, fmt_real(row.distance), row.mode, row.samples, fmt_real(row.stderr_est), row.in_fit});
    return b.str(f);
}

std::string hoeffding_payload(const experiments::HoeffdingResult& h, Format f) {
    Builder b("hoeffding");
    b.scalar("r", h.r);
    b.scalar("eps", fmt_real(h.eps));
    b.scalar("tail_exact", dy(h.tail));
    b.scalar("tail_value", fmt_real(h.tail.to_long_double()));
    b.scalar("bound", fmt_real(h.bound));
    b.scalar("ok", h.ok);
    return b.str(f);
}

std::string pellcheck_payload(const experiments::PellCheckReport& p, Format f) {
    Builder b("pell_space_crosscheck");
    b.scalar("j", p.j);
    b.scalar("s", p.s);
    b.scalar("kappa", p.kappa);
    if (p.j == 3) {
        b.scalar("a", p.a);
        b.scalar("b", p.b);
    }
    b.scalar("raw_count", p.raw_count);
    b.scalar("empty", p.empty);
    b.scalar("offset", p.offset);
    b.scalar("match", p.match);
    if (!p.empty) {
        b.columns({"corank", "raw_probability", "rule_probability_shifted"});
        size_t n = std::max(p.raw_mass.size(), p.rule_mass_shifted.size());
        for (size_t k = 0; k < n; ++k) {
            Dyadic raw = k < p.raw_mass.size() ? p.raw_mass[k] : Dyadic(0);
            Dyadic ruled = k < p.rule_mass_shifted.size() ? p.rule_mass_shifted[k] : Dyadic(0);
            if (raw.is_zero() && ruled.is_zero()) continue;
            b.row({k, dy(raw), dy(ruled)});
        }
    }
    return b.str(f);
}

std::string redei_payload(int64_t d, int64_t l, Format f) {
    Builder b("redei");
    auto [m, ctx] = arith::redei_matrix(d, l);
    b.scalar("d", d);
    b.scalar("discriminant", ctx.discriminant);
    json primes = json::array();
    for (int64_t p : ctx.primes) primes.push_back(p);
    b.scalar("primes", primes);
    b.scalar("t", ctx.t);
    b.scalar("kappa", ctx.kappa);
    b.scalar("two_part", ctx.two_part);
    b.scalar("corank", f2::corank(m));
    b.scalar("reciprocity_ok", arith::validate_reciprocity(d));
    if (l != 0) {
        arith::PellClassification pc = arith::classify_pell(d, l);
        json pell;
        pell["label"] = pc.label;
        pell["s"] = pc.s;
        pell["kappa"] = pc.kappa;
        pell["a"] = pc.a;
        pell["b"] = pc.b;
        pell["constraints_ok"] = pc.constraints_ok;
        pell["first_row_flag"] = pc.first_row_flag;
        b.scalar("pell", pell);
    }
    b.columns({"row", "bits"});
    for (uint32_t i = 1; i <= ctx.t; ++i) b.row({i, m.row(i).to_string()});
    return b.str(f);
}

std::string scan_payload(const std::vector<arith::ScanRow>& rows, int64_t dmax, int64_t l, Format f) {
    Builder b("scan");
    b.scalar("dmax", dmax);
    if (l != 0) b.scalar("l", l);
    b.scalar("count", rows.size());
    b.columns({"d", "discriminant", "t", "kappa", "corank", "reciprocity_ok", "pell_label", "first_row_flag"});
    for (const auto& r : rows) {
        json flag = r.first_row_flag < 0 ? json(nullptr) : json(r.first_row_flag != 0);
        b.row({r.d, r.discriminant, r.t, r.kappa, r.corank, r.reciprocity_ok, r.pell_label, flag});
    }
    return b.str(f);
}

std::string envelope(const std::string& command, std::optional<uint64_t> seed,
                     const std::string& timestamp, const std::string& payload, Format f) {
    if (f == Format::Json) {
        json out;
        out["tool"] = kToolName;
        out["version"] = kToolVersion;
        out["command"] = command;
        out["seed"] = seed ? json(*seed) : json(nullptr);
        out["timestamp"] = timestamp.empty() ? json(nullptr) : json(timestamp);
        out["payload"] = json::parse(payload);
        return out.dump(2) + "\n";
    }
    std::string out = "# tool=" + std::string(kToolName) + "\n# version=" + kToolVersion +
                      "\n# command=" + command + "\n";
    out += "# seed=" + (seed ? std::to_string(*seed) : std::string()) + "\n";
    out += "# timestamp=" + timestamp + "\n";
    out += payload;
    return out;
}

}  // namespace corank::report
