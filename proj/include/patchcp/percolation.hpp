#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "patchcp/meso_sim.hpp"
#include "patchcp/rng.hpp"

namespace patchcp {

struct CoverageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Wet sites of one level of the oriented graph: sites live at (z, n) with
// z + n even, and edges go from (z, n) to (z +- 1, n + 1).
struct WetSet {
    int level = 0;
    std::vector<int32_t> wet;  // strictly ascending, parity z + level even
};

// Throws std::logic_error on parity or ordering violations.
void validate_wet(const WetSet& w);

// One synchronous generation: each candidate z' in {z - 1, z + 1 : z wet} is
// open independently with probability 1 - q. Candidates with |z'| beyond
// width_cap are dropped and *truncated is set; the run continues clipped.
WetSet evolve(const WetSet& w, double q, Rng& g, int32_t width_cap, bool* truncated = nullptr);

struct PercSurvival {
    double q = 0.0;
    int levels = 0;
    long long replicas = 0;
    long long survived = 0;
    double point = 0.0;
    double ci_halfwidth = 0.0;  // 95% normal approximation
    uint64_t seed = 0;
    long long truncated_replicas = 0;
};

// Fraction of replicas whose wet set from W_0 = {0} is nonempty after
// `levels` generations. width_cap < 0 means levels + 1, the light cone, so
// nothing is ever clipped. Replica r runs on substream_seed(seed, r);
// per_replica, when given, receives one survived flag per replica in order.
PercSurvival estimate_perc_survival(double q, int levels, long long replicas, uint64_t seed,
                                    int32_t width_cap = -1,
                                    std::vector<char>* per_replica = nullptr);

enum class GoodVariant { A1, A2 };

// Good sites of the block construction read off a replayed trajectory, for
// levels n = 0..levels at sites with z + n even (z is a patch index, z + 1
// wraps around the ring).
//   A1: the pair (c(z), c(z+1)) stays above N/2 in both coordinates for
//       every t in the open window ((2n+2)N, (2n+4)N).
//   A2: c(z) > c_plus*N - 3*sqrt(N) at time 4nN; needs a > 4 for c_plus.
// An extinct trajectory pins the all-empty state forever, so it covers every
// level; otherwise the last window must end by terminal_time or a
// CoverageError names the largest evaluable level.
std::map<int, std::vector<int32_t>> good_sites(const Trajectory& tr, GoodVariant variant,
                                               const ModelParams& params, int levels);

}  // namespace patchcp
