// Command-line driver: single-instance solves, convergence traces,
// ergodic-rate sweeps, and the self-check suites. CSV/JSON on stdout or file.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "jmb/harness.hpp"
#include "jmb/verify.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path);
}

json precoder_to_json(const jmb::Precoder& pre) {
    const auto col_to_json = [](const jmb::CVec& v) {
        json col = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i)
            col.push_back({{"re", v(i).real()}, {"im", v(i).imag()}});
        return col;
    };
    json out;
    out["common"] = col_to_json(pre.common);
    out["private"] = json::array();
    for (const auto& p : pre.private_cols) out["private"].push_back(col_to_json(p));
    return out;
}

struct SolveArgs {
    int ntx = 2;
    int k = 2;
    double snr_db = 20.0;
    double alpha = 0.6;
    double sigma_e2 = -1.0;  // >= 0 selects the fixed error model
    int m = 1000;
    std::string init = "zf_svd";
    std::string mode = "jmb";
    std::uint64_t seed = 1;
    double eps_r = 1e-4;
    int n_max = 200;
    std::string out;
};

int cmd_solve(const SolveArgs& a) {
    jmb::Scenario sc;
    sc.n_tx = a.ntx;
    sc.n_users = a.k;
    sc.noise_var = 1.0;
    sc.power = std::pow(10.0, a.snr_db / 10.0);
    if (a.sigma_e2 >= 0.0)
        sc.error_model = jmb::FixedError{a.sigma_e2};
    else
        sc.error_model = jmb::Decaying{a.alpha};
    sc.sample_size = a.m;
    sc.validate();

    const double se2 = jmb::effective_error_variance(sc);
    jmb::RngStream root(a.seed, 0);
    auto chan = root.substream(0);
    auto s_true = chan.substream(0);
    auto s_est = chan.substream(1);
    auto s_mc = chan.substream(2);
    const jmb::Channel h_true = jmb::draw_true_channel(s_true, sc);
    const jmb::EstimateDraw ed = jmb::draw_estimate(s_est, h_true, se2);
    const jmb::SampleSet ss = jmb::draw_sample_set(s_mc, ed.estimate, se2, sc.sample_size);

    jmb::AoConfig cfg;
    cfg.eps_r = a.eps_r;
    cfg.n_max = a.n_max;
    cfg.init = jmb::init_from_string(a.init);
    cfg.mode = jmb::tx_mode_from_string(a.mode);
    const jmb::AoResult res = jmb::ao_solve(sc, ss, cfg);

    const double achieved =
        cfg.mode == jmb::TxMode::Jmb
            ? jmb::achieved_min_rate(h_true, res.precoder, res.coeffs, sc.noise_var)
            : jmb::achieved_min_rate(h_true, res.precoder, sc.noise_var);

    json out;
    out["scenario"] = {{"n_tx", sc.n_tx},        {"n_users", sc.n_users},
                       {"power", sc.power},      {"noise_var", sc.noise_var},
                       {"snr_db", a.snr_db},     {"sigma_e2", se2},
                       {"sample_size", sc.sample_size}};
    out["mode"] = jmb::to_string(cfg.mode);
    out["init"] = jmb::to_string(cfg.init);
    out["seed"] = a.seed;
    out["converged"] = res.converged;
    out["iterations"] = res.objective_trace.size();
    out["objective_trace_bits"] = res.objective_trace;
    out["objective_bits"] = res.objective_trace.empty() ? 0.0 : res.objective_trace.back();
    out["achieved_min_rate_bits"] = achieved;
    out["coeffs"] = std::vector<double>(res.coeffs.data(), res.coeffs.data() + res.coeffs.size());
    out["average_rates"] = {
        {"common", std::vector<double>(res.final_rates.common.data(),
                                       res.final_rates.common.data() + sc.n_users)},
        {"private", std::vector<double>(res.final_rates.private_rate.data(),
                                        res.final_rates.private_rate.data() + sc.n_users)},
        {"common_min", res.final_rates.common_min}};
    out["precoder"] = precoder_to_json(res.precoder);
    out["total_power"] = res.precoder.total_power();
    write_output(a.out, out.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"max-min fair multicast-assisted MU-MISO precoder designer"};
    app.require_subcommand(1);

    // --- solve -----------------------------------------------------------
    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "design precoders for one instance, JSON out");
    solve->add_option("--ntx", sa.ntx, "transmit antennas");
    solve->add_option("--k", sa.k, "users");
    solve->add_option("--snr-db", sa.snr_db, "SNR in dB (noise variance 1)");
    solve->add_option("--alpha", sa.alpha, "decaying error exponent");
    solve->add_option("--sigma-e2", sa.sigma_e2, "fixed error variance (overrides --alpha)");
    solve->add_option("--m", sa.m, "Monte-Carlo sample size");
    solve->add_option("--init", sa.init, "zf_e | zf_svd");
    solve->add_option("--mode", sa.mode, "jmb | bc");
    solve->add_option("--seed", sa.seed, "random seed");
    solve->add_option("--eps-r", sa.eps_r, "convergence threshold (bits)");
    solve->add_option("--n-max", sa.n_max, "max iterations");
    solve->add_option("-o,--out", sa.out, "output file (default stdout)");

    // --- shared experiment options ---------------------------------------
    std::string config_path, out_path;
    std::vector<double> snrs;
    std::vector<std::string> modes, inits;
    int channels = 0, m = 0, n_max = 0, threads = -1;
    double alpha = -1.0, sigma_e2 = -1.0, eps_r = 0.0;
    std::uint64_t seed = 0;
    bool unpaired = false;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON experiment config");
        cmd->add_option("--snrs", snrs, "SNR grid (dB)");
        cmd->add_option("--channels", channels, "evaluation channel count");
        cmd->add_option("--m", m, "Monte-Carlo sample size");
        cmd->add_option("--alpha", alpha, "decaying error exponent");
        cmd->add_option("--sigma-e2", sigma_e2, "fixed error variance");
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("--eps-r", eps_r, "convergence threshold (bits)");
        cmd->add_option("--n-max", n_max, "max AO iterations");
        cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
        cmd->add_flag("--unpaired", unpaired, "fresh channel draws per SNR point");
        cmd->add_option("-o,--out", out_path, "output file (default stdout)");
    };

    auto* converge = app.add_subcommand("converge", "per-iteration objective traces, CSV out");
    add_common(converge);
    auto* ergodic = app.add_subcommand("ergodic", "ergodic-rate sweep, CSV out");
    add_common(ergodic);
    ergodic->add_option("--modes", modes, "subset of {jmb, bc}");
    ergodic->add_option("--inits", inits, "subset of {zf_e, zf_svd}");

    auto* verify = app.add_subcommand("verify", "run the oracle cross-check suites");
    std::uint64_t verify_seed = 1;
    verify->add_option("--seed", verify_seed, "random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(sa);

        if (verify->parsed()) {
            const auto results = jmb::run_verification(verify_seed);
            bool all = true;
            for (const auto& r : results) {
                std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.detail
                          << ")\n";
                all = all && r.pass;
            }
            return all ? 0 : 1;
        }

        jmb::ExperimentSpec spec;
        if (!config_path.empty()) spec = jmb::spec_from_json_text(read_file(config_path));
        if (!snrs.empty()) spec.snr_grid_db = snrs;
        if (channels > 0) spec.n_channels = channels;
        if (m > 0) spec.scenario.sample_size = m;
        if (alpha >= 0.0) spec.scenario.error_model = jmb::Decaying{alpha};
        if (sigma_e2 >= 0.0) spec.scenario.error_model = jmb::FixedError{sigma_e2};
        if (seed != 0) spec.seed = seed;
        if (eps_r > 0.0) spec.eps_r = eps_r;
        if (n_max > 0) spec.n_max = n_max;
        if (threads >= 0) spec.threads = threads;
        if (unpaired) spec.paired_sampling = false;
        if (!modes.empty()) {
            spec.modes.clear();
            for (const auto& s : modes) spec.modes.push_back(jmb::tx_mode_from_string(s));
        }
        if (!inits.empty()) {
            spec.inits.clear();
            for (const auto& s : inits) spec.inits.push_back(jmb::init_from_string(s));
        }

        std::ostringstream os;
        if (converge->parsed()) {
            double a = 0.6;
            if (const auto* d = std::get_if<jmb::Decaying>(&spec.scenario.error_model))
                a = d->alpha;
            std::vector<double> pts = snrs.empty() ? std::vector<double>{5, 20, 35}
                                                   : spec.snr_grid_db;
            if (inits.empty() && config_path.empty())
                spec.inits = {jmb::InitKind::ZfE, jmb::InitKind::ZfSvd};
            jmb::write_convergence_csv(os, jmb::run_convergence(spec, pts, a));
        } else {
            jmb::write_ergodic_csv(os, jmb::run_ergodic(spec));
        }
        write_output(out_path, os.str());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
