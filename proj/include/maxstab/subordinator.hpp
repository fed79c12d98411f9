#pragma once
#include "maxstab/censor.hpp"
#include "maxstab/rng.hpp"

namespace maxstab {

// Tail mass above x of the truncated Levy measure (0 for TailKind::None).
double tail_mass(const SubordinatorParams& p, double x);
// Upper end of the jump-size support (infinite for stable tails).
double tail_cutoff(const SubordinatorParams& p);
// Expected total length of jumps below x_min per unit time.
double truncation_bias_rate(const SubordinatorParams& p);
Predicted predicted_label(const SubordinatorParams& p);

struct SubordinatorSample {
    CensorSet set;
    SubordinatorInfo info;
};

// Samples the closed range of X(t) = d t + (jumps > x_min) on [0, horizon].
// horizon <= 0 picks T = cover / d so that the range covers [0, cover].
SubordinatorSample sample_subordinator_range(const SubordinatorParams& p, double horizon, Engine& rng,
                                             double cover = 1.0);

}  // namespace maxstab
