#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "patchcp/graphical.hpp"

namespace patchcp {

struct ExplosionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Summary of one backward run from a single origin. The family is the state
// at dual time `horizon` as canonical sorted sets; emptiness is absorbing.
// Dual time s corresponds to forward time t - s on the shared realization.
struct DualRun {
    int32_t origin = -1;
    double horizon = 0.0;
    bool extinct = false;
    double extinct_at = -1.0;  // dual time the family emptied
    long long births_applied = 0;
    long long deaths_applied = 0;
    // fired births whose parent pair met the family union just before firing
    long long collisions = 0;
    double first_collision_at = -1.0;  // dual time, -1 when collision-free
    long long max_family = 0;
    std::vector<std::vector<int32_t>> family;
};

// Walks the arrivals of `rep` backward from forward time t. A death arrival
// at x removes every set containing x; a birth arrival targeting x adds, for
// every set B containing x, the set (B \ {x}) u {p1, p2} while keeping B.
// Throws ExplosionError past `family_cap` live sets.
DualRun dual_run(const GraphicalRep& rep, int32_t w, double t, long long family_cap = 1000000);

// Pathwise equivalence on one realization: the forward state occupies w at
// time t iff some set of the backward family lies inside the initial state.
bool duality_check(const GraphicalRep& rep, const MicroConfig& initial, int32_t w, double t);

struct ZetaRun {
    bool extinct = false;
    double extinct_at = -1.0;
    bool had_event = false;
    bool first_event_birth = false;
    long long births = 0;
    long long deaths = 0;
    long long max_family = 0;
    long long max_points = 0;
    long long points_at_horizon = 0;
};

// Collision-free branching variant of the backward family: every point
// carries clocks at rate 1 (death) and a+b (birth); a birth replaces the
// point, in each set containing it, by two brand-new identifiers. Fresh
// integer ids stand in for uniform location marks: only identity matters for
// the set dynamics, and new ids can never already belong to the family.
// Throws ExplosionError past `family_cap` live sets.
ZetaRun zeta_run(double a, double b, double t, uint64_t seed, long long family_cap = 1000000);

// Fixed points of the one-point survival recursion in [0, 1]: roots of
// (a+b) r^2 (1 - r) = r. Always contains 0; for a+b >= 4 also the roots of
// the quadratic, which collide at 1/2 when a+b = 4.
std::vector<double> rho_fixed_points(double a, double b);

// exp(2(a+b)t) / K + 2K(K+1)/N with K = N^{1/5}: union bound on the chance
// that a backward family of subcritical size collides with itself inside a
// patch of N locations by dual time t.
double dual_collision_bound(double a, double b, double N, double t);

}  // namespace patchcp
