// Command-line front end. Everything goes through the C API of the shared
// library; this file only parses flags and frames the envelope.

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "corank.h"

namespace {

struct Global {
    std::string format = "json";
    bool timestamp = false;
    uint32_t threads = 1;
    uint64_t budget = 0;  // 0: use the library default
    std::string command;  // reconstructed argv
};

corank_format fmt(const Global& g) {
    return g.format == "csv" ? CORANK_FORMAT_CSV : CORANK_FORMAT_JSON;
}

std::string now_rfc3339() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

int finish(const Global& g, corank_status st, char* payload, bool has_seed, uint64_t seed) {
    if (st != CORANK_OK) {
        std::fprintf(stderr, "corank: %s\n", corank_last_error());
        return static_cast<int>(st);
    }
    char* wrapped = nullptr;
    std::string ts = g.timestamp ? now_rfc3339() : "";
    corank_status est = corank_envelope(g.command.c_str(), has_seed ? 1 : 0, seed, ts.c_str(),
                                        payload, fmt(g), &wrapped);
    corank_string_free(payload);
    if (est != CORANK_OK) {
        std::fprintf(stderr, "corank: %s\n", corank_last_error());
        return static_cast<int>(est);
    }
    std::fputs(wrapped, stdout);
    corank_string_free(wrapped);
    return 0;
}

std::vector<uint32_t> parse_r_list(const std::string& s) {
    std::vector<uint32_t> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t comma = s.find(',', pos);
        std::string part = s.substr(pos, comma == std::string::npos ? comma : comma - pos);
        out.push_back(static_cast<uint32_t>(std::stoul(part)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    Global g;
    for (int i = 0; i < argc; ++i) {
        if (i) g.command += ' ';
        g.command += argv[i];
    }

    CLI::App app{"corank: corank statistics of constrained random matrices over F2"};
    app.require_subcommand(1);
    app.add_option("--format", g.format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--timestamp", g.timestamp, "stamp the envelope with the wall clock");
    app.add_option("--threads", g.threads, "worker threads for Monte Carlo shards");
    app.add_option("--budget", g.budget, "enumeration budget (step sequences)");

    uint32_t max_j = 8, n = 64, xmin = 1, xmax = 64, r = 5, rmax = 5, s_param = 3, kappa = 0, jfam = 1;
    double precision = 1e-15, eps = 0.25;
    uint64_t samples = 100000, seed = 1;
    int64_t d = 0, l = 0, dmax = 100;
    int a = 0, b = 0;
    std::string rule = "mat", family = "redei", mode = "auto", rs = "10,25,50,100,200";

    CLI::App* c_pi = app.add_subcommand("pi", "stationary corank law");
    c_pi->add_option("--max-j", max_j);
    c_pi->add_option("--precision", precision);

    CLI::App* c_qcl = app.add_subcommand("qcl", "truncated transition kernel");
    c_qcl->add_option("--n", n);

    CLI::App* c_st = app.add_subcommand("stationarity", "one-step residual of the stationary law");
    c_st->add_option("--n", n);
    c_st->add_option("--precision", precision);

    CLI::App* c_dr = app.add_subcommand("drift", "geometric drift ratios");
    c_dr->add_option("--xmin", xmin);
    c_dr->add_option("--xmax", xmax);

    CLI::App* c_ex = app.add_subcommand("exact", "exhaustive corank distribution");
    c_ex->add_option("--rule", rule)->required();
    c_ex->add_option("--r", r)->required();

    CLI::App* c_mc = app.add_subcommand("mc", "Monte Carlo corank distribution");
    c_mc->add_option("--rule", rule)->required();
    c_mc->add_option("--r", r)->required();
    c_mc->add_option("--samples", samples);
    c_mc->add_option("--seed", seed);

    CLI::App* c_mx = app.add_subcommand("mixture", "binomial mixture over kappa");
    c_mx->add_option("--family", family)->required();
    c_mx->add_option("--r", r)->required();
    c_mx->add_option("--mode", mode)->check(CLI::IsMember({"auto", "exact", "mc"}));
    c_mx->add_option("--samples", samples);
    c_mx->add_option("--seed", seed);

    CLI::App* c_au = app.add_subcommand("audit", "detector and transition audit");
    c_au->add_option("--rule", rule)->required();
    c_au->add_option("--r", r)->required();
    bool audit_exact = false;
    c_au->add_flag("--exact", audit_exact, "exhaustive instead of sampled");
    c_au->add_option("--samples", samples);
    c_au->add_option("--seed", seed);

    CLI::App* c_de = app.add_subcommand("decomp", "exact decomposition identity residual");
    c_de->add_option("--rule", rule)->required();
    c_de->add_option("--rmax", rmax)->required();

    CLI::App* c_cv = app.add_subcommand("converge", "distance to the stationary law across r");
    c_cv->add_option("--family", family)->required();
    c_cv->add_option("--rs", rs, "comma-separated increasing r values");
    c_cv->add_option("--samples", samples);
    c_cv->add_option("--seed", seed);

    CLI::App* c_ho = app.add_subcommand("hoeffding", "exact binomial tail against the Hoeffding bound");
    c_ho->add_option("--r", r)->required();
    c_ho->add_option("--eps", eps)->required();

    CLI::App* c_pc = app.add_subcommand("pellcheck", "raw Pell space versus rule reduction");
    c_pc->add_option("--j", jfam)->required();
    c_pc->add_option("--s", s_param)->required();
    c_pc->add_option("--kappa", kappa)->required();
    c_pc->add_option("--a", a);
    c_pc->add_option("--b", b);

    CLI::App* c_rd = app.add_subcommand("redei", "quadratic-residue matrix of a squarefree integer");
    c_rd->add_option("--d", d)->required();
    c_rd->add_option("--l", l);

    CLI::App* c_sc = app.add_subcommand("scan", "bulk scan of squarefree integers");
    c_sc->add_option("--dmax", dmax)->required();
    c_sc->add_option("--l", l);

    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    uint64_t budget = g.budget ? g.budget : corank_default_budget();
    char* payload = nullptr;
    corank_status st = CORANK_ERR_USAGE;
    bool has_seed = false;

    if (c_pi->parsed()) {
        st = corank_report_pi(max_j, precision, fmt(g), &payload);
    } else if (c_qcl->parsed()) {
        st = corank_report_qcl(n, fmt(g), &payload);
    } else if (c_st->parsed()) {
        st = corank_report_stationarity(n, precision, fmt(g), &payload);
    } else if (c_dr->parsed()) {
        st = corank_report_drift(xmin, xmax, fmt(g), &payload);
    } else if (c_ex->parsed()) {
        st = corank_report_exact(rule.c_str(), r, budget, fmt(g), &payload);
    } else if (c_mc->parsed()) {
        st = corank_report_mc(rule.c_str(), r, samples, seed, g.threads, fmt(g), &payload);
        has_seed = true;
    } else if (c_mx->parsed()) {
        st = corank_report_mixture(family.c_str(), r, mode.c_str(), samples, seed, budget, g.threads,
                                   fmt(g), &payload);
        has_seed = mode != "exact";
    } else if (c_au->parsed()) {
        st = corank_report_audit(rule.c_str(), r, audit_exact ? 1 : 0, samples, seed, budget, fmt(g),
                                 &payload);
        has_seed = !audit_exact;
    } else if (c_de->parsed()) {
        st = corank_report_decomp(rule.c_str(), rmax, budget, fmt(g), &payload);
    } else if (c_cv->parsed()) {
        std::vector<uint32_t> list;
        try {
            list = parse_r_list(rs);
        } catch (const std::exception&) {
            std::fprintf(stderr, "corank: bad --rs list\n");
            return 2;
        }
        st = corank_report_converge(family.c_str(), list.data(), static_cast<uint32_t>(list.size()),
                                    samples, seed, budget, g.threads, fmt(g), &payload);
        has_seed = true;
    } else if (c_ho->parsed()) {
        st = corank_report_hoeffding(r, eps, fmt(g), &payload);
    } else if (c_pc->parsed()) {
        st = corank_report_pellcheck(jfam, s_param, kappa, a, b, budget, fmt(g), &payload);
    } else if (c_rd->parsed()) {
        st = corank_report_redei(d, l, fmt(g), &payload);
    } else if (c_sc->parsed()) {
        st = corank_report_scan(dmax, l, fmt(g), &payload);
    } else {
        std::fprintf(stderr, "corank: no subcommand\n");
        return 2;
    }
    return finish(g, st, payload, has_seed, seed);
}
