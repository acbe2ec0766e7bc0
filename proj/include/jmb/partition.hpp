#pragma once

#include "jmb/types.hpp"

namespace jmb {

// Allocation of the common average rate across users.
//   coeffs: fractions c_k >= 0, summing to 1 unless degenerate
//   level: optimized minimum total rate min_k (R_k + c_k * R_c)
//   active_count: number of users (those with the smallest private rates)
//                 that receive a share of the common rate
//   degenerate: common rate was zero, so the split is irrelevant and a
//               uniform allocation is returned
struct PartitionResult {
    RVec coeffs;
    double level = 0.0;
    int active_count = 0;
    bool degenerate = false;
};

// Closed-form water-filling: raise the common level until the budget
// sum(c) = 1 is exhausted, discarding users whose private rate already
// exceeds the level. Users with c_k > 0 end exactly at the level; users
// with c_k = 0 sit at or above it.
PartitionResult waterfill(double common_rate, const RVec& private_rates);

// Independent check: bisection on the level with feasibility test
// sum_k max(0, level - R_k) / R_c <= 1. Requires common_rate > 0.
PartitionResult lp_oracle(double common_rate, const RVec& private_rates);

}  // namespace jmb
