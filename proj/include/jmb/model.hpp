#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "jmb/types.hpp"

namespace jmb {

// CSIT error power models: Decaying gives sigma_e^2 = P_t^(-alpha),
// Fixed keeps sigma_e^2 constant over the whole SNR range.
struct Decaying {
    double alpha;
};
struct FixedError {
    double sigma_e2;
};
using ErrorModel = std::variant<Decaying, FixedError>;

// Problem dimensions and physical parameters of one downlink instance.
// All powers and variances are linear scale.
struct Scenario {
    int n_tx = 2;             // transmit antennas N_t
    int n_users = 2;          // single-antenna users K, K <= N_t
    double power = 100.0;     // transmit budget P_t
    double noise_var = 1.0;   // per-user noise variance sigma_n^2, > 0
    ErrorModel error_model = Decaying{0.6};
    int sample_size = 1000;   // Monte-Carlo sample size M

    void validate() const;    // throws std::invalid_argument on bad fields
    double snr_db() const;    // 10 log10(P_t / sigma_n^2)
};

// sigma_e^2 implied by the scenario's error model.
double effective_error_variance(const Scenario& sc);

// Exponent used by the initialization power split. For Decaying this is
// alpha itself; for Fixed it is the exponent that would produce the same
// error variance at the scenario's power, clamped to [0, 1].
double equivalent_alpha(const Scenario& sc);

// Complex N_t x K fading matrix; column k is user k's channel h_k.
// The same container serves for estimates and errors.
struct Channel {
    CMat matrix;

    int antennas() const { return static_cast<int>(matrix.rows()); }
    int users() const { return static_cast<int>(matrix.cols()); }
    CVec col(int k) const { return matrix.col(k); }
};

// The M conditional Monte-Carlo realizations drawn around one estimate.
struct SampleSet {
    Channel estimate;
    std::vector<Channel> realizations;
    double error_var = 0.0;

    int size() const { return static_cast<int>(realizations.size()); }
};

// Counter-based random stream (Philox4x32-10). Draws are a pure function
// of (seed, stream_id, draw index), so distinct streams never interact and
// per-stream output is independent of interleaving with other streams.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_(stream_id) {}

    // Derived stream, independent of the parent and of siblings with
    // different indices. Chainable.
    RngStream substream(std::uint64_t index) const;

    double uniform();      // [0, 1)
    double uniform_pos();  // (0, 1], safe for log()
    std::pair<double, double> normal_pair();  // two i.i.d. N(0, 1)
    cplx cgauss(double variance);             // CN(0, variance)

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;

    void next_block(std::uint32_t out[4]);
};

// Entries i.i.d. CN(0, 1): unit average power, real/imag each N(0, 1/2).
Channel draw_true_channel(RngStream& rng, const Scenario& sc);

struct EstimateDraw {
    Channel estimate;  // h_true - error
    Channel error;     // entries i.i.d. CN(0, sigma_e2)
};
EstimateDraw draw_estimate(RngStream& rng, const Channel& h_true, double sigma_e2);

// m_count realizations, each estimate + CN(0, sigma_e2) perturbation.
SampleSet draw_sample_set(RngStream& rng, const Channel& estimate, double sigma_e2,
                          int m_count);

}  // namespace jmb
