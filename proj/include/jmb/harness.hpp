#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "jmb/ao.hpp"
#include "jmb/model.hpp"

namespace jmb {

// One experiment campaign: the scenario acts as a template whose power is
// replaced at each SNR grid point (SNR = P_t / sigma_n^2).
struct ExperimentSpec {
    Scenario scenario;
    std::vector<double> snr_grid_db = {0, 5, 10, 15, 20, 25, 30, 35};
    int n_channels = 50;
    std::uint64_t seed = 1;
    bool paired_sampling = true;  // common random numbers across SNR points
    std::vector<TxMode> modes = {TxMode::Jmb, TxMode::ConventionalBc};
    std::vector<InitKind> inits = {InitKind::ZfSvd};
    double eps_r = 1e-4;
    int n_max = 200;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct ErRecord {
    double snr_db;
    TxMode mode;
    InitKind init;
    double ergodic_rate;  // bits
    double std_error;
    double mean_iterations;
    int n_channels;
    int m;
    int failures;
};

// Minimum total rate achieved on the true channel by a precoder designed
// from the estimate; the common rate is bottlenecked by the weakest user.
double achieved_min_rate(const Channel& h_true, const Precoder& pre, const RVec& coeffs,
                         double noise_var);
// Conventional BC variant: minimum private rate, no common share.
double achieved_min_rate(const Channel& h_true, const Precoder& pre, double noise_var);

struct ConvergenceRow {
    int iteration;  // 1-based
    double snr_db;
    InitKind init;
    double objective_bits;
};

// Per-iteration objective traces on one random channel, per init and SNR
// point, with decaying error variance P_t^-alpha.
std::vector<ConvergenceRow> run_convergence(const ExperimentSpec& spec,
                                            const std::vector<double>& snr_points_db,
                                            double alpha);

struct ChannelOutcome {
    double sampled_objective;  // final AO objective on the sampled problem
    double achieved_rate;      // min total rate on the true channel
    int iterations;
    bool converged;
    bool failed;
};

// Design + evaluate every channel at one (snr, mode, init) cell. Channel i
// is driven by a substream keyed by (seed, i), so outputs are deterministic
// and independent of the number of worker threads.
std::vector<ChannelOutcome> run_channels(const ExperimentSpec& spec, double snr_db,
                                         int snr_index, TxMode mode, InitKind init);

// Full ergodic-rate sweep over the SNR grid, modes, and inits. Throws if
// more than 5% of channels fail in any cell.
std::vector<ErRecord> run_ergodic(const ExperimentSpec& spec);

// CSV emission; UTF-8, '.' decimal point, stable formatting.
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);
void write_ergodic_csv(std::ostream& os, const std::vector<ErRecord>& records);

std::string to_string(TxMode mode);
std::string to_string(InitKind init);
TxMode tx_mode_from_string(const std::string& s);
InitKind init_from_string(const std::string& s);

// JSON config covering ExperimentSpec (see README for the schema).
ExperimentSpec spec_from_json_text(const std::string& text);

}  // namespace jmb
