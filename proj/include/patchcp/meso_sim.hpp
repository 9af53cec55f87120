#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "patchcp/bounds.hpp"
#include "patchcp/model.hpp"
#include "patchcp/rng.hpp"

namespace patchcp {

// One transition of the patch-level chain: occupancy at `patch` changed by
// `delta` (+1 birth, -1 death) at absolute time t.
struct Event {
    double t = 0.0;
    int patch = -1;
    int delta = 0;
};

enum class OutcomeKind { extinct_at, alive_at_horizon };

struct Outcome {
    OutcomeKind kind = OutcomeKind::extinct_at;
    double time = 0.0;  // extinction time, or the horizon
};

struct Trajectory {
    MesoConfig initial;
    std::vector<Event> events;  // empty when recording was disabled
    double terminal_time = 0.0;
    Outcome outcome;
};

// Replays the event list from the initial configuration and throws
// std::logic_error if any patch leaves [0, N], if event times fail to
// increase strictly, or if the recorded outcome disagrees with the replay.
void check_trajectory(const Trajectory& tr, const ModelParams& params);

// Event-count safety cap tripped; carries whatever was simulated so far.
struct RunawayError : std::runtime_error {
    Trajectory partial;
    explicit RunawayError(Trajectory p);
};

// The occupied region reached the edge of the ring while the run was asked
// to behave like a process on the infinite lattice.
struct SeamError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepResult {
    bool absorbed = false;
    double wait = 0.0;
    int patch = -1;
    int delta = 0;
};

// Samples a single transition directly from the rate table, rebuilding it
// from scratch on every call. This is the slow reference path; the engine
// behind run() keeps incremental caches and is checked against this law.
StepResult step(const MesoConfig& config, const ModelParams& params, Rng& rng);

struct RunOptions {
    bool record_events = true;
    bool monitor_seam = false;  // throw SeamError if growth nears the ring edge
    long long event_cap = 1000000000LL;
    // Snapshot times for the configuration, ascending, each <= horizon.
    // The state reported at time s is the right-continuous one.
    std::vector<double> probe_times;
};

Trajectory run(const MesoConfig& initial, const ModelParams& params, double horizon,
               uint64_t seed);
Trajectory run(const MesoConfig& initial, const ModelParams& params, double horizon,
               uint64_t seed, const RunOptions& options,
               std::vector<MesoConfig>* probes = nullptr);

// All patches empty except patch L/2 at full capacity N.
MesoConfig single_full_patch(const ModelParams& params);

struct SurvivalEstimate {
    ModelParams params;
    long long replicas = 0;
    double horizon = 0.0;
    long long survived = 0;
    double point = 0.0;
    double ci_halfwidth = 0.0;  // 1.96 * sqrt(point(1-point)/replicas)
    uint64_t seed = 0;
};

// Fraction of independent replicas (single full patch start) still alive at
// the horizon. Replica k runs on substream_seed(seed, k), so the result is
// the same for any thread count. When `outcomes` is given it receives one
// entry per replica, indexed by replica.
SurvivalEstimate estimate_survival(const ModelParams& params, double horizon,
                                   long long replicas, uint64_t seed, int threads = 1,
                                   bool monitor_seam = false,
                                   std::vector<Outcome>* outcomes = nullptr);

struct SweepEntry {
    SurvivalEstimate estimate;
    SurvivalBound bound;  // analytic companion for the same parameters
};

// estimate_survival across dispersal ranges, one independent stream per M,
// with seam monitoring on: these runs stand in for the infinite lattice, so
// an occupied region touching the ring edge voids the experiment.
std::vector<SweepEntry> range_sweep(ModelParams base, const std::vector<int>& m_values,
                                    double horizon, long long replicas, uint64_t seed,
                                    int threads = 1);

}  // namespace patchcp
