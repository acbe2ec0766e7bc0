#include "jmb/harness.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "jmb/mmse.hpp"

namespace jmb {

void ExperimentSpec::validate() const {
    scenario.validate();
    if (snr_grid_db.empty()) throw std::invalid_argument("spec: empty SNR grid");
    if (n_channels < 1) throw std::invalid_argument("spec: n_channels must be >= 1");
    if (modes.empty()) throw std::invalid_argument("spec: no modes selected");
    if (inits.empty()) throw std::invalid_argument("spec: no inits selected");
    if (!(eps_r > 0.0) || n_max < 1) throw std::invalid_argument("spec: bad stopping rule");
}

double achieved_min_rate(const Channel& h_true, const Precoder& pre, const RVec& coeffs,
                         double noise_var) {
    const int K = h_true.users();
    if (coeffs.size() != K)
        throw std::invalid_argument("achieved_min_rate: coefficient count mismatch");
    RVec r_private(K), r_common(K);
    for (int k = 0; k < K; ++k) {
        const RatePair r = rates(link_stats(h_true.col(k), pre, noise_var, k));
        r_private(k) = r.private_rate;
        r_common(k) = r.common;
    }
    const double rc = r_common.minCoeff();
    return (r_private + coeffs * rc).minCoeff();
}

double achieved_min_rate(const Channel& h_true, const Precoder& pre, double noise_var) {
    const int K = h_true.users();
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
        const RatePair r = rates(link_stats(h_true.col(k), pre, noise_var, k));
        worst = std::min(worst, r.private_rate);
    }
    return worst;
}

namespace {

// Substream labels hanging off each channel's stream.
constexpr std::uint64_t kDrawTrue = 0;
constexpr std::uint64_t kDrawEstimate = 1;
constexpr std::uint64_t kDrawSamples = 2;
constexpr std::uint64_t kUnpairedBase = 1000;

Scenario at_snr(const Scenario& tpl, double snr_db) {
    Scenario sc = tpl;
    sc.power = tpl.noise_var * std::pow(10.0, snr_db / 10.0);
    return sc;
}

void parallel_over(int count, int threads, const std::function<void(int)>& body) {
    int nthreads = threads > 0 ? threads
                               : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::clamp(nthreads, 1, count);
    if (nthreads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

std::vector<ChannelOutcome> run_channels(const ExperimentSpec& spec, double snr_db,
                                         int snr_index, TxMode mode, InitKind init) {
    spec.validate();
    const Scenario sc = at_snr(spec.scenario, snr_db);
    const double sigma_e2 = effective_error_variance(sc);

    std::vector<ChannelOutcome> out(static_cast<std::size_t>(spec.n_channels));
    const RngStream root(spec.seed, 0);

    parallel_over(spec.n_channels, spec.threads, [&](int i) {
        ChannelOutcome& co = out[static_cast<std::size_t>(i)];
        try {
            RngStream chan = root.substream(static_cast<std::uint64_t>(i));
            if (!spec.paired_sampling)
                chan = chan.substream(kUnpairedBase + static_cast<std::uint64_t>(snr_index));
            RngStream s_true = chan.substream(kDrawTrue);
            RngStream s_est = chan.substream(kDrawEstimate);
            RngStream s_mc = chan.substream(kDrawSamples);

            const Channel h_true = draw_true_channel(s_true, sc);
            const EstimateDraw ed = draw_estimate(s_est, h_true, sigma_e2);
            const SampleSet ss =
                draw_sample_set(s_mc, ed.estimate, sigma_e2, sc.sample_size);

            AoConfig cfg;
            cfg.eps_r = spec.eps_r;
            cfg.n_max = spec.n_max;
            cfg.init = init;
            cfg.mode = mode;
            const AoResult res = ao_solve(sc, ss, cfg);

            co.sampled_objective = res.objective_trace.back();
            co.achieved_rate =
                mode == TxMode::Jmb
                    ? achieved_min_rate(h_true, res.precoder, res.coeffs, sc.noise_var)
                    : achieved_min_rate(h_true, res.precoder, sc.noise_var);
            co.iterations = static_cast<int>(res.objective_trace.size());
            co.converged = res.converged;
            co.failed = false;
        } catch (const std::exception&) {
            co.failed = true;
        }
    });
    return out;
}

std::vector<ErRecord> run_ergodic(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<ErRecord> records;
    for (std::size_t si = 0; si < spec.snr_grid_db.size(); ++si) {
        for (TxMode mode : spec.modes) {
            for (InitKind init : spec.inits) {
                const auto outcomes = run_channels(spec, spec.snr_grid_db[si],
                                                   static_cast<int>(si), mode, init);
                int failures = 0;
                double sum = 0.0, sum2 = 0.0, iters = 0.0;
                int n = 0;
                for (const auto& co : outcomes) {
                    if (co.failed) {
                        ++failures;
                        continue;
                    }
                    sum += co.achieved_rate;
                    sum2 += co.achieved_rate * co.achieved_rate;
                    iters += co.iterations;
                    ++n;
                }
                if (failures * 20 > spec.n_channels)  // > 5%
                    throw std::runtime_error("run_ergodic: too many channel failures");
                ErRecord rec;
                rec.snr_db = spec.snr_grid_db[si];
                rec.mode = mode;
                rec.init = init;
                rec.ergodic_rate = n ? sum / n : 0.0;
                const double var =
                    n > 1 ? std::max(0.0, (sum2 - sum * sum / n) / (n - 1)) : 0.0;
                rec.std_error = n > 1 ? std::sqrt(var / n) : 0.0;
                rec.mean_iterations = n ? iters / n : 0.0;
                rec.n_channels = n;
                rec.m = spec.scenario.sample_size;
                rec.failures = failures;
                records.push_back(rec);
            }
        }
    }
    return records;
}

std::vector<ConvergenceRow> run_convergence(const ExperimentSpec& spec,
                                            const std::vector<double>& snr_points_db,
                                            double alpha) {
    spec.validate();
    if (snr_points_db.empty())
        throw std::invalid_argument("run_convergence: empty SNR list");

    std::vector<ConvergenceRow> rows;
    const RngStream root(spec.seed, 0);
    RngStream chan = root.substream(0);

    for (std::size_t si = 0; si < snr_points_db.size(); ++si) {
        Scenario sc = at_snr(spec.scenario, snr_points_db[si]);
        sc.error_model = Decaying{alpha};
        const double sigma_e2 = effective_error_variance(sc);

        RngStream s_true = chan.substream(kDrawTrue);
        RngStream s_est = chan.substream(kDrawEstimate);
        RngStream s_mc = chan.substream(kDrawSamples);
        const Channel h_true = draw_true_channel(s_true, sc);
        const EstimateDraw ed = draw_estimate(s_est, h_true, sigma_e2);
        const SampleSet ss = draw_sample_set(s_mc, ed.estimate, sigma_e2, sc.sample_size);

        for (InitKind init : spec.inits) {
            AoConfig cfg;
            cfg.eps_r = spec.eps_r;
            cfg.n_max = spec.n_max;
            cfg.init = init;
            cfg.mode = TxMode::Jmb;
            const AoResult res = ao_solve(sc, ss, cfg);
            for (std::size_t it = 0; it < res.objective_trace.size(); ++it)
                rows.push_back({static_cast<int>(it) + 1, snr_points_db[si], init,
                                res.objective_trace[it]});
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------

namespace {
std::string fmt(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}
}  // namespace

std::string to_string(TxMode mode) {
    return mode == TxMode::Jmb ? "jmb" : "bc";
}

std::string to_string(InitKind init) {
    switch (init) {
        case InitKind::ZfE: return "zf_e";
        case InitKind::ZfSvd: return "zf_svd";
        default: return "custom";
    }
}

TxMode tx_mode_from_string(const std::string& s) {
    if (s == "jmb") return TxMode::Jmb;
    if (s == "bc") return TxMode::ConventionalBc;
    throw std::invalid_argument("unknown mode: " + s);
}

InitKind init_from_string(const std::string& s) {
    if (s == "zf_e") return InitKind::ZfE;
    if (s == "zf_svd") return InitKind::ZfSvd;
    throw std::invalid_argument("unknown init: " + s);
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
    os << "iteration,snr_db,init,objective_bits\n";
    for (const auto& r : rows)
        os << r.iteration << ',' << fmt(r.snr_db) << ',' << to_string(r.init) << ','
           << fmt(r.objective_bits) << '\n';
}

void write_ergodic_csv(std::ostream& os, const std::vector<ErRecord>& records) {
    os << "snr_db,mode,init,ergodic_rate_bits,std_error,n_channels,m\n";
    for (const auto& r : records)
        os << fmt(r.snr_db) << ',' << to_string(r.mode) << ',' << to_string(r.init) << ','
           << fmt(r.ergodic_rate) << ',' << fmt(r.std_error) << ',' << r.n_channels << ','
           << r.m << '\n';
}

ExperimentSpec spec_from_json_text(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    ExperimentSpec spec;
    if (j.contains("scenario")) {
        const auto& s = j.at("scenario");
        if (s.contains("n_tx")) spec.scenario.n_tx = s.at("n_tx").get<int>();
        if (s.contains("n_users")) spec.scenario.n_users = s.at("n_users").get<int>();
        if (s.contains("noise_var")) spec.scenario.noise_var = s.at("noise_var").get<double>();
        if (s.contains("sample_size"))
            spec.scenario.sample_size = s.at("sample_size").get<int>();
        if (s.contains("error_model")) {
            const auto& e = s.at("error_model");
            const std::string type = e.at("type").get<std::string>();
            if (type == "decaying")
                spec.scenario.error_model = Decaying{e.at("alpha").get<double>()};
            else if (type == "fixed")
                spec.scenario.error_model = FixedError{e.at("sigma_e2").get<double>()};
            else
                throw std::invalid_argument("config: unknown error model " + type);
        }
    }
    if (j.contains("snr_grid_db"))
        spec.snr_grid_db = j.at("snr_grid_db").get<std::vector<double>>();
    if (j.contains("n_channels")) spec.n_channels = j.at("n_channels").get<int>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("paired_sampling"))
        spec.paired_sampling = j.at("paired_sampling").get<bool>();
    if (j.contains("modes")) {
        spec.modes.clear();
        for (const auto& m : j.at("modes"))
            spec.modes.push_back(tx_mode_from_string(m.get<std::string>()));
    }
    if (j.contains("inits")) {
        spec.inits.clear();
        for (const auto& m : j.at("inits"))
            spec.inits.push_back(init_from_string(m.get<std::string>()));
    }
    if (j.contains("eps_r")) spec.eps_r = j.at("eps_r").get<double>();
    if (j.contains("n_max")) spec.n_max = j.at("n_max").get<int>();
    if (j.contains("threads")) spec.threads = j.at("threads").get<int>();
    return spec;
}

}  // namespace jmb
