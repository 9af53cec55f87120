#pragma once

#include <cstdint>
#include <vector>

namespace patchcp {

// Parameters of the two-level lattice model.
//   a: within-patch pair birth rate
//   b: dispersal pair birth rate (split evenly over 2M neighbouring patches)
//   N: patch capacity, M: dispersal range, L: number of patches on the ring
struct ModelParams {
    double a = 0.0;
    double b = 0.0;
    int N = 2;
    int M = 1;
    int L = 3;

    void validate() const;  // throws std::invalid_argument on a bad combination
};

// Patch-level configuration: occupancy count per patch, each in [0, N].
using MesoConfig = std::vector<int>;

// Individual-level configuration: L*N boolean slots. Slot k of patch x is
// location id x*N + k.
struct MicroConfig {
    int L = 0;
    int N = 0;
    std::vector<uint8_t> occ;  // size L*N

    MicroConfig() = default;
    MicroConfig(int L_, int N_) : L(L_), N(N_), occ(static_cast<size_t>(L_) * N_, 0) {}

    bool occupied(int32_t loc) const { return occ[static_cast<size_t>(loc)] != 0; }
    void set(int32_t loc, bool v) { occ[static_cast<size_t>(loc)] = v ? 1 : 0; }
    int patch_of(int32_t loc) const { return static_cast<int>(loc) / N; }
    int32_t loc(int x, int k) const { return static_cast<int32_t>(x) * N + k; }
    int32_t size() const { return static_cast<int32_t>(L) * N; }
};

int wrap_patch(int x, int L);

// The 2M patches within distance M of x, in ascending offset order
// (-M, ..., -1, +1, ..., +M), wrapped on the ring.
std::vector<int> neighbors(int x, const ModelParams& p);

// Patch-level flip rates at patch x. The up rate is
//   a/(N(N-1)) * c(x)(c(x)-1)(N-c(x))
//   + sum_{y ~ x} (1/2M) * b/(N(N-1)) * c(y)(c(y)-1)(N-c(x)),
// the down rate is c(x).
double up_rate(const MesoConfig& c, int x, const ModelParams& p);
double down_rate(const MesoConfig& c, int x);
double total_rate(const MesoConfig& c, const ModelParams& p);

// Column sums of the individual-level configuration.
MesoConfig project(const MicroConfig& m);

// Individual-level birth rate into one location, by literal enumeration of
// ordered parent pairs. Deliberately not derived from the patch-count formula:
// the agreement of the two routes is what the aggregation tests check.
double micro_up_rate_into(const MicroConfig& m, int32_t loc, const ModelParams& p);

// Sum of all individual-level rates (births into empty slots + one death rate
// per occupied slot), by the same literal route.
double micro_total_rate(const MicroConfig& m, const ModelParams& p);

void validate_meso(const MesoConfig& c, const ModelParams& p);

}  // namespace patchcp
