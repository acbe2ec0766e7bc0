#include "jmb/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace jmb {

namespace {
void validate_inputs(double common_rate, const RVec& private_rates) {
    if (private_rates.size() < 1)
        throw std::invalid_argument("partition: need at least one user");
    if (!std::isfinite(common_rate) || common_rate < 0.0)
        throw std::invalid_argument("partition: common rate must be finite and >= 0");
    for (Eigen::Index k = 0; k < private_rates.size(); ++k)
        if (!std::isfinite(private_rates(k)) || private_rates(k) < 0.0)
            throw std::invalid_argument("partition: private rates must be finite and >= 0");
}
}  // namespace

PartitionResult waterfill(double common_rate, const RVec& private_rates) {
    validate_inputs(common_rate, private_rates);
    const int K = static_cast<int>(private_rates.size());

    PartitionResult res;
    res.coeffs = RVec::Zero(K);

    if (common_rate == 0.0) {
        res.coeffs.setConstant(1.0 / K);
        res.level = private_rates.minCoeff();
        res.active_count = 0;
        res.degenerate = true;
        return res;
    }

    // Sort ascending by private rate, ties by user index.
    std::vector<int> order(static_cast<std::size_t>(K));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (private_rates(a) != private_rates(b))
            return private_rates(a) < private_rates(b);
        return a < b;
    });

    // Shrink the active set from the top until the smallest share is
    // non-negative; always terminates since one user would take c = 1.
    double level = 0.0;
    int kc = K;
    for (; kc >= 1; --kc) {
        double sum = common_rate;
        for (int j = 0; j < kc; ++j) sum += private_rates(order[static_cast<std::size_t>(j)]);
        level = sum / kc;
        if (level - private_rates(order[static_cast<std::size_t>(kc - 1)]) >= 0.0) break;
    }

    for (int j = 0; j < kc; ++j) {
        const int k = order[static_cast<std::size_t>(j)];
        res.coeffs(k) = (level - private_rates(k)) / common_rate;
    }
    res.level = level;
    res.active_count = kc;
    res.degenerate = false;
    return res;
}

PartitionResult lp_oracle(double common_rate, const RVec& private_rates) {
    validate_inputs(common_rate, private_rates);
    if (!(common_rate > 0.0))
        throw std::invalid_argument("lp_oracle: common rate must be > 0");
    const int K = static_cast<int>(private_rates.size());

    const auto budget_used = [&](double level) {
        double s = 0.0;
        for (int k = 0; k < K; ++k) s += std::max(0.0, level - private_rates(k));
        return s / common_rate;
    };

    double lo = private_rates.minCoeff();
    double hi = lo + common_rate + private_rates.maxCoeff();
    if (budget_used(hi) <= 1.0) {
        lo = hi;  // bracket top is already feasible (single-user case)
    } else {
        for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (budget_used(mid) <= 1.0)
                lo = mid;
            else
                hi = mid;
        }
    }

    PartitionResult res;
    res.coeffs = RVec::Zero(K);
    res.level = lo;
    int active = 0;
    for (int k = 0; k < K; ++k) {
        const double c = std::max(0.0, (lo - private_rates(k)) / common_rate);
        res.coeffs(k) = c;
        if (c > 0.0) ++active;
    }
    res.active_count = active;
    res.degenerate = false;
    return res;
}

}  // namespace jmb
