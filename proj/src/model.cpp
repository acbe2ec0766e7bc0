#include "jmb/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace jmb {

void Scenario::validate() const {
    if (n_tx < 1) throw std::invalid_argument("scenario: n_tx must be positive");
    if (n_users < 1 || n_users > n_tx)
        throw std::invalid_argument("scenario: need 1 <= n_users <= n_tx");
    if (!(power > 0.0)) throw std::invalid_argument("scenario: power must be > 0");
    if (!(noise_var > 0.0))
        throw std::invalid_argument("scenario: noise_var must be > 0");
    if (sample_size < 1)
        throw std::invalid_argument("scenario: sample_size must be >= 1");
    if (const auto* d = std::get_if<Decaying>(&error_model)) {
        if (!(d->alpha >= 0.0))
            throw std::invalid_argument("scenario: decaying exponent must be >= 0");
    } else {
        const auto& f = std::get<FixedError>(error_model);
        if (!(f.sigma_e2 >= 0.0))
            throw std::invalid_argument("scenario: error variance must be >= 0");
    }
}

double Scenario::snr_db() const { return 10.0 * std::log10(power / noise_var); }

double effective_error_variance(const Scenario& sc) {
    if (const auto* d = std::get_if<Decaying>(&sc.error_model))
        return std::pow(sc.power, -d->alpha);
    return std::get<FixedError>(sc.error_model).sigma_e2;
}

double equivalent_alpha(const Scenario& sc) {
    if (const auto* d = std::get_if<Decaying>(&sc.error_model))
        return std::min(d->alpha, 1.0);
    const double se2 = std::get<FixedError>(sc.error_model).sigma_e2;
    if (se2 <= 0.0) return 1.0;  // perfect CSIT: full-power private split
    const double lp = std::log(sc.power);
    if (lp <= 0.0) return 1.0;   // P_t <= 1: the split is power-independent
    const double a = -std::log(se2) / lp;
    return std::clamp(a, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Philox4x32-10 block cipher as a counter-based generator. Key = 64-bit seed,
// counter words = (draw counter, stream id), so streams are disjoint by
// construction.

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2511F53ull;
constexpr std::uint64_t kPhiloxM1 = 0xCD9E8D57ull;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t c[4], std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = kPhiloxM0 * static_cast<std::uint64_t>(c[0]);
    const std::uint64_t p1 = kPhiloxM1 * static_cast<std::uint64_t>(c[2]);
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t n0 = hi1 ^ c[1] ^ k0;
    const std::uint32_t n1 = lo1;
    const std::uint32_t n2 = hi0 ^ c[3] ^ k1;
    const std::uint32_t n3 = lo0;
    c[0] = n0;
    c[1] = n1;
    c[2] = n2;
    c[3] = n3;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

void RngStream::next_block(std::uint32_t out[4]) {
    out[0] = static_cast<std::uint32_t>(counter_);
    out[1] = static_cast<std::uint32_t>(counter_ >> 32);
    out[2] = static_cast<std::uint32_t>(stream_);
    out[3] = static_cast<std::uint32_t>(stream_ >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            k0 += kPhiloxW0;
            k1 += kPhiloxW1;
        }
        philox_round(out, k0, k1);
    }
    ++counter_;
}

RngStream RngStream::substream(std::uint64_t index) const {
    // splitmix of (stream, index) keeps chained derivations collision-free in
    // practice; the seed (cipher key) is shared so disjoint stream ids imply
    // disjoint counter blocks.
    const std::uint64_t child = splitmix64(splitmix64(stream_) ^ (index + 1));
    return RngStream(seed_, child);
}

double RngStream::uniform() {
    std::uint32_t b[4];
    next_block(b);
    const std::uint64_t u = (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
    return static_cast<double>(u >> 11) * 0x1.0p-53;
}

double RngStream::uniform_pos() {
    std::uint32_t b[4];
    next_block(b);
    const std::uint64_t u = (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
    return (static_cast<double>(u >> 11) + 1.0) * 0x1.0p-53;
}

std::pair<double, double> RngStream::normal_pair() {
    // Box-Muller; one cipher block yields both uniforms.
    std::uint32_t b[4];
    next_block(b);
    const std::uint64_t ua = (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
    const std::uint64_t ub = (static_cast<std::uint64_t>(b[3]) << 32) | b[2];
    const double u1 = (static_cast<double>(ua >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = static_cast<double>(ub >> 11) * 0x1.0p-53;          // [0,1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
}

cplx RngStream::cgauss(double variance) {
    const auto [z0, z1] = normal_pair();
    const double s = std::sqrt(0.5 * variance);
    return {s * z0, s * z1};
}

// ---------------------------------------------------------------------------

Channel draw_true_channel(RngStream& rng, const Scenario& sc) {
    sc.validate();
    CMat h(sc.n_tx, sc.n_users);
    for (int k = 0; k < sc.n_users; ++k)
        for (int i = 0; i < sc.n_tx; ++i) h(i, k) = rng.cgauss(1.0);
    return Channel{std::move(h)};
}

EstimateDraw draw_estimate(RngStream& rng, const Channel& h_true, double sigma_e2) {
    if (!(sigma_e2 >= 0.0))
        throw std::invalid_argument("draw_estimate: sigma_e2 must be >= 0");
    CMat err(h_true.matrix.rows(), h_true.matrix.cols());
    for (Eigen::Index k = 0; k < err.cols(); ++k)
        for (Eigen::Index i = 0; i < err.rows(); ++i) err(i, k) = rng.cgauss(sigma_e2);
    return EstimateDraw{Channel{h_true.matrix - err}, Channel{std::move(err)}};
}

SampleSet draw_sample_set(RngStream& rng, const Channel& estimate, double sigma_e2,
                          int m_count) {
    if (m_count < 1) throw std::invalid_argument("draw_sample_set: m_count must be >= 1");
    if (!(sigma_e2 >= 0.0))
        throw std::invalid_argument("draw_sample_set: sigma_e2 must be >= 0");
    SampleSet ss;
    ss.estimate = estimate;
    ss.error_var = sigma_e2;
    ss.realizations.reserve(static_cast<std::size_t>(m_count));
    for (int m = 0; m < m_count; ++m) {
        CMat r(estimate.matrix.rows(), estimate.matrix.cols());
        for (Eigen::Index k = 0; k < r.cols(); ++k)
            for (Eigen::Index i = 0; i < r.rows(); ++i)
                r(i, k) = estimate.matrix(i, k) + rng.cgauss(sigma_e2);
        ss.realizations.push_back(Channel{std::move(r)});
    }
    return ss;
}

}  // namespace jmb
