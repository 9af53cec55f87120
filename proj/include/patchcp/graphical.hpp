#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "patchcp/model.hpp"
#include "patchcp/rng.hpp"

namespace patchcp {

enum class ArrivalKind : uint8_t { death, a_birth, b_birth };

// One Poisson arrival of the space-time construction. Birth arrivals carry
// the ordered parent pair (locations in the same patch as each other: the
// target's own patch for a_birth, one of its 2M neighbour patches for
// b_birth). Deaths have p1 = p2 = -1.
struct Arrival {
    double t = 0.0;
    ArrivalKind kind = ArrivalKind::death;
    int32_t target = -1;
    int32_t p1 = -1;
    int32_t p2 = -1;
};

struct WindowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Every arrival on [0, t_max] for the individual-level construction, sorted
// by time. One realization drives both the forward run and the backward run;
// sharing it is what makes the pathwise comparison meaningful.
struct GraphicalRep {
    ModelParams params;
    double t_max = 0.0;
    uint64_t seed = 0;
    std::vector<Arrival> arrivals;
};

// Samples the merged arrival stream at rate L*N*(1+a+b), marking each point
// with a uniform target, a kind (weights 1 : a : b, which restores the per-
// location death/birth intensities), and a uniform ordered parent pair.
// Throws WindowError when the expected arrival count exceeds `cap`.
GraphicalRep build_rep(const ModelParams& params, double t_max, uint64_t seed, double cap = 1e7);

// Runs the configuration forward through the arrivals with time <= upto
// (upto < 0 means the whole window). A birth fires only if both parents are
// occupied and sets the target occupied (idempotent); a death empties the
// target unconditionally. Optionally records (time, state) after each
// arrival.
MicroConfig forward_micro(const GraphicalRep& rep, const MicroConfig& initial, double upto = -1.0,
                          std::vector<std::pair<double, MicroConfig>>* path = nullptr);

// Death arrival times at one location, ascending.
std::vector<double> deaths_at(const GraphicalRep& rep, int32_t loc);

long long count_kind(const GraphicalRep& rep, ArrivalKind kind);

}  // namespace patchcp
