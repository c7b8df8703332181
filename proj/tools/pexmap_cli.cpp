#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pexmap/cocycle.hpp"
#include "pexmap/errors.hpp"
#include "pexmap/io.hpp"
#include "pexmap/map.hpp"
#include "pexmap/params.hpp"
#include "pexmap/sequences.hpp"
#include "pexmap/spectrum.hpp"
#include "pexmap/wandering.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pexmap;

namespace {

constexpr int kM0 = 2;  // block structure base for exponent traces

struct CommonOpts {
    std::string config;
    std::string out = ".";
    uint64_t seed = 20240817ULL;
};

Params load_params(const CommonOpts& c) {
    Params p = c.config.empty() ? validate_params(1, 3, 0.025, 0.02) : params_from_file(c.config);
    p.M = find_min_epoch(p, 3);
    return p;
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

int run_trace(const CommonOpts& c, int64_t nmax, double alpha, double beta, double tail) {
    Params p = load_params(c);
    ExponentTrace tr = exponent_trace(p, kM0, nmax, alpha, beta);
    OmegaEstimate est = omega_interval_estimate(tr, p, tail);

    std::ostringstream csv;
    csv << csv_preamble(p, c.seed);
    csv << "n,a_n,epoch,block_phase\n";
    for (size_t i = 0; i < tr.a.size(); ++i) {
        csv << (i + 1) << "," << format_g17(tr.a[i]) << "," << tr.epoch[i] << "," << tr.phase[i]
            << "\n";
    }
    fs::create_directories(c.out);
    write_text_file(join(c.out, "trace.csv"), csv.str());

    json j = make_envelope(p, c.seed);
    j["m0"] = kM0;
    j["alpha"] = alpha;
    j["beta"] = beta;
    j["lo"] = est.lo;
    j["hi"] = est.hi;
    j["predicted_lo"] = est.predicted_lo;
    j["predicted_hi"] = est.predicted_hi;
    j["n_last"] = est.n_last;
    write_json_file(join(c.out, "omega.json"), j);
    return 0;
}

int run_sweep(const CommonOpts& c, const std::vector<double>& sigmas, int64_t nmax, double tail) {
    Params base = c.config.empty() ? validate_params(1, 3, 0.025, 0.02)
                                   : params_from_file(c.config);
    std::ostringstream csv;
    csv << csv_preamble(base, c.seed);
    csv << "sigma,xi0,xi1,mean,est_lo,est_hi,width\n";
    for (double s : sigmas) {
        Params p = params_for_sigma(base, s);
        LimitExponents ex = limit_exponents(p);
        ExponentTrace tr = exponent_trace(p, kM0, nmax, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
        OmegaEstimate est = omega_interval_estimate(tr, p, tail);
        csv << format_g17(s) << "," << format_g17(ex.xi0) << "," << format_g17(ex.xi1) << ","
            << format_g17(ex.mean) << "," << format_g17(est.lo) << "," << format_g17(est.hi) << ","
            << format_g17(est.hi - est.lo) << "\n";
    }
    fs::create_directories(c.out);
    write_text_file(join(c.out, "sweep.csv"), csv.str());
    return 0;
}

int run_verify(const CommonOpts& c, double tol) {
    Params p = load_params(c);
    SequenceTable tab(p, 10);

    json j = make_envelope(p, c.seed);
    j["M"] = p.M;
    bool all_ok = true;

    json recs = json::array();
    for (int m = p.M + 1; m <= p.M + 3; ++m) {
        RecurrenceReport r = check_recurrences(tab, m, tol);
        all_ok = all_ok && r.ok;
        recs.push_back({{"m", m},
                        {"ok", r.ok},
                        {"checked", r.checked},
                        {"max_residual", r.max_residual},
                        {"worst", r.worst}});
    }
    j["recurrences"] = recs;

    json suites = json::array();
    for (int m = p.M + 1; m <= p.M + 3; ++m) {
        SuiteReport s = inequality_suite(p, m);
        all_ok = all_ok && s.ok;
        json checks = json::object();
        for (auto& [name, ok] : s.checks) checks[name] = ok;
        suites.push_back({{"m", m}, {"ok", s.ok}, {"checks", checks}});
    }
    j["inequalities"] = suites;
    j["ok"] = all_ok;

    fs::create_directories(c.out);
    write_json_file(join(c.out, "verify.json"), j);
    if (!all_ok) std::cerr << "verify: checks failed, see verify.json\n";
    return all_ok ? 0 : 1;
}

int run_dump(const CommonOpts& c) {
    Params p = load_params(c);
    SequenceTable tab(p, p.M + 4);
    std::ostringstream csv;
    csv << csv_preamble(p, c.seed);
    csv << "m,k,logB,logL,logH,logW\n";
    for (int m = p.M + 1; m <= p.M + 3; ++m) {
        int64_t gm = tab.pow_gamma(m);
        for (int64_t k = 0; k < gm; ++k) {
            csv << m << "," << k << "," << format_g17(tab.logB(k, m)) << ","
                << format_g17(tab.logL(k, m)) << "," << format_g17(tab.logH(k, m)) << ","
                << format_g17(tab.logW(k, m)) << "\n";
        }
    }
    fs::create_directories(c.out);
    write_text_file(join(c.out, "sequences.csv"), csv.str());
    return 0;
}

int run_wander(const CommonOpts& c, int64_t steps_opt) {
    Params p = load_params(c);
    SequenceTable tab(p, 10);
    ProfilePair profile(tab);
    int m_start = p.M + 1;
    int64_t steps = steps_opt > 0
                        ? steps_opt
                        : tab.pow_gamma(p.M + 1) + tab.pow_gamma(p.M + 2);

    OrbitPos pos{0, m_start};
    for (int64_t t = 0; t < steps; ++t) pos = advance_rectangle(tab, profile, pos.k, pos.m);
    DisjointReport rep = check_disjoint(tab, m_start, steps);

    json j = make_envelope(p, c.seed);
    j["m_start"] = rep.m_start;
    j["steps"] = rep.steps;
    j["min_gap_log"] = rep.min_gap_log;
    j["disjoint"] = rep.disjoint;
    fs::create_directories(c.out);
    write_json_file(join(c.out, "wander.json"), j);

    // time-near-origin fractions at three epoch-boundary scales
    std::vector<int64_t> horizons;
    int64_t acc = 0;
    for (int m = m_start; m <= m_start + 5; ++m) {
        acc += tab.pow_gamma(m);
        if (m == m_start + 2 || m == m_start + 4 || m == m_start + 5) horizons.push_back(acc);
    }
    double log_radius = -p.eps1 * static_cast<double>(tab.pow_gamma(p.M + 2));
    std::ostringstream csv;
    csv << csv_preamble(p, c.seed);
    csv << "steps,fraction\n";
    for (const BirkhoffPoint& pt : birkhoff_stats(tab, m_start, horizons, log_radius))
        csv << pt.horizon << "," << format_g17(pt.fraction) << "\n";
    write_text_file(join(c.out, "birkhoff.csv"), csv.str());

    if (!rep.disjoint) std::cerr << "wander: rectangles overlap\n";
    return rep.disjoint ? 0 : 1;
}

int run_spectrum(const CommonOpts& c, int grid, int sampling, int64_t horizon, int hit_samples,
                 double theta, bool skeleton) {
    Params p = load_params(c);
    SequenceTable tab(p, 10);
    ProfilePair profile(tab);
    MapModel model(p, skeleton ? nullptr : &profile);

    UlamOperator P = build_ulam(model, grid, sampling, c.seed);
    SpectralData sd = leading_spectrum(P, 3, 1e-6);
    SupportInfo sup = acim_supports(sd, theta);

    std::vector<int64_t> horizons{horizon / 5, horizon / 2, horizon};
    HitStats uni = hit_time_stats(model, tab, InitialSet::UniformD, p.M + 1, sup, grid, horizons,
                                  hit_samples, c.seed);
    HitStats wan = hit_time_stats(model, tab, InitialSet::WanderingRectangle, p.M + 1, sup, grid,
                                  horizons, hit_samples, c.seed + 1);

    json j = make_envelope(p, c.seed);
    j["n"] = P.n;
    j["s"] = P.s;
    j["seed"] = P.seed;
    j["skeleton"] = skeleton;
    json eigs = json::array();
    for (auto& z : sd.eigenvalues) eigs.push_back({z.real(), z.imag()});
    j["eigenvalues"] = eigs;
    j["residuals"] = sd.residuals;
    j["threshold"] = theta;
    j["q_hat"] = sup.q_hat;
    json hits = json::object();
    json hu = json::array(), hw = json::array();
    for (auto& [h, f] : uni.fraction_by_horizon) hu.push_back({h, f});
    for (auto& [h, f] : wan.fraction_by_horizon) hw.push_back({h, f});
    hits["uniform"] = hu;
    hits["wandering"] = hw;
    j["hit_fraction_by_horizon"] = hits;
    fs::create_directories(c.out);
    write_json_file(join(c.out, "spectrum.json"), j);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for a family of planar piecewise expanding maps"};
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("--config", common.config, "JSON parameter file {r, gamma, eps1, eps2}");
    app.add_option("--out", common.out, "output directory");
    app.add_option("--seed", common.seed, "base RNG seed");

    int64_t nmax = 6561;
    double alpha = 1.0 / std::sqrt(2.0), beta = 1.0 / std::sqrt(2.0), tail = 0.5;
    auto* trace = app.add_subcommand("trace", "finite-time exponent trace and interval estimate");
    trace->add_option("--nmax", nmax, "trace length");
    trace->add_option("--alpha", alpha, "first tangent weight");
    trace->add_option("--beta", beta, "second tangent weight");
    trace->add_option("--tail", tail, "tail window fraction");

    std::vector<double> sigmas{0.4, 0.2, 0.1, 0.05};
    int64_t sweep_nmax = 59049;
    double sweep_tail = 0.5;
    auto* sweep = app.add_subcommand("sweep", "interval estimates across sigma");
    sweep->add_option("--sigma", sigmas, "sigma values");
    sweep->add_option("--nmax", sweep_nmax, "trace length per sigma");
    sweep->add_option("--tail", sweep_tail, "tail window fraction");

    double tol = 1e-12;
    auto* verify = app.add_subcommand("verify", "recurrence and inequality checks");
    verify->add_option("--tol", tol, "log-scale residual tolerance");

    auto* dump = app.add_subcommand("dump-sequences", "tabulate the four sequences");

    int64_t wander_steps = 0;
    auto* wander = app.add_subcommand("wander", "rectangle orbit with cover and disjointness checks");
    wander->add_option("--steps", wander_steps, "orbit steps (default two full epochs)");

    int grid = 128, sampling = 16, hit_samples = 1000;
    int64_t horizon = 500;
    double theta = 0.1;
    bool skeleton = false;
    auto* spectrum = app.add_subcommand("spectrum", "discretized transfer operator probe");
    spectrum->add_option("--grid", grid, "cells per axis");
    spectrum->add_option("--sampling", sampling, "samples per cell axis");
    spectrum->add_option("--horizon", horizon, "hit-time horizon");
    spectrum->add_option("--samples", hit_samples, "hit-time sample count");
    spectrum->add_option("--theta", theta, "support threshold relative to the density maximum");
    spectrum->add_flag("--skeleton", skeleton, "probe the zero-profile skeleton map");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (trace->parsed()) return run_trace(common, nmax, alpha, beta, tail);
        if (sweep->parsed()) return run_sweep(common, sigmas, sweep_nmax, sweep_tail);
        if (verify->parsed()) return run_verify(common, tol);
        if (dump->parsed()) return run_dump(common);
        if (wander->parsed()) return run_wander(common, wander_steps);
        if (spectrum->parsed())
            return run_spectrum(common, grid, sampling, horizon, hit_samples, theta, skeleton);
    } catch (const BoundViolation& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const OutsideDomain& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const CoverageFailure& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 1;
    } catch (const DisjointnessFailure& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 1;
    } catch (const NoConvergence& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
