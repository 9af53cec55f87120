#pragma once

#include <cstdint>
#include <vector>

#include "patchcp/rng.hpp"

namespace patchcp {

// Closed forms for the truncated linear birth-death chain (up rate (a/4)j for
// j < N, down rate j) started at N and absorbed at 0, as used by the
// dispersal-range argument. v are expected visit counts, sigma expected
// occupation times. The recursion residual at each interior state is kept so
// callers can see where the closed forms do and do not satisfy the balance
// equations they are derived from.
struct OccupationTable {
    double a = 0.0;
    int N = 0;
    std::vector<double> v;         // j = 0..N; v[N] from the truncation boundary rule
    std::vector<double> sigma;     // j = 1..N (index 0 unused)
    std::vector<double> residual;  // balance residual at j = 1..N-1 (indices 0, N unused)
    double max_residual = 0.0;
    double weighted_bound = 0.0;  // sum_{j=1}^{N} sum_{i=0}^{j} (a/4)^i
};
OccupationTable occupation_table(double a, int N);

// Which single-patch chain:
//   dominating: up rate (a/4) j      for j < N
//   patch:      up rate a j(j-1)(N-j)/(N(N-1))
// Both have down rate j and are truncated at N.
enum class ChainKind { dominating, patch };

// Expected visits and occupation times from the flow balance equations of the
// embedded jump chain, solved directly (tridiagonal system). Independent of
// any closed form; the numeric oracle the closed forms are tested against.
struct ChainSolution {
    std::vector<double> visits;      // j = 0..N, start state N counted once
    std::vector<double> occupation;  // visits / total jump rate, [0] = 0
};
ChainSolution solve_expected_visits(ChainKind kind, double a, int N);

struct BirthDeathStats {
    ChainKind kind = ChainKind::dominating;
    double a = 0.0;
    int N = 0;
    long long replicas = 0;
    std::vector<double> mean_visits;  // j = 0..N
    std::vector<double> se_visits;
    std::vector<double> mean_time;  // j = 0..N ([0] stays 0: absorbing)
    std::vector<double> se_time;
    double mean_weighted_time = 0.0;  // per-replica mean of sum_j j * time_at_j
    double se_weighted_time = 0.0;
    std::vector<double> sample_times;
    // state_counts[k][j]: replicas found in state j at sample_times[k]
    std::vector<std::vector<long long>> state_counts;
};

// Runs the chain from state N to absorption at 0, replica by replica on
// substreams of `seed`, and aggregates visit counts, holding times and the
// marginal state distribution at the requested times (ascending).
BirthDeathStats simulate_birth_death(double a, int N, long long replicas, uint64_t seed,
                                     ChainKind kind = ChainKind::dominating,
                                     const std::vector<double>& sample_times = {});

// Upper bound on the expected number of emigrants produced by one patch
// before its line dies out. Three separate regimes; values within 1e-12 of
// a = 4 take the a = 4 branch. Not continuous across the split, by design.
double mean_emigrants_bound(double a, double b, int N);

// Probability that some two of the first ceil(M^{1/3}) emigrants land on the
// same patch when each picks uniformly among 2M targets.
struct CollisionBound {
    double cap = 0.0;            // (1/2) M^{-1/3}
    double exact_product = 0.0;  // 1 - prod_{j<offspring} (1 - j/(2M))
    long long offspring = 0;     // ceil(M^{1/3})
};
CollisionBound collision_prob_bound(long long M);

// M^{-1/3} (1/2 + mean_emigrants_bound). raw may exceed 1; value is the
// raw bound clamped into [0,1] for display next to survival frequencies.
struct SurvivalBound {
    double raw = 0.0;
    double value = 0.0;
    bool clamped = false;
};
SurvivalBound survival_upper_bound(double a, double b, int N, long long M);

// Expected instantaneous change of patch counts for the two-patch dispersal
// caricature (kinds sum, difference, y_given; coeff is b) and for a single
// patch in isolation (kind single_patch; coeff is a). `leading` is the
// N^{-2} i^2 large-N form, `exact` the generator form with i^2/N^2 replaced
// by i(i-1)/(N(N-1)); both drop only nonnegative contributions of the full
// lattice generator, so a nonnegative exact drift is a genuine certificate.
enum class DriftKind { sum, difference, y_given, single_patch };

struct DriftValue {
    double leading = 0.0;
    double exact = 0.0;
};
DriftValue drift(DriftKind kind, double i, double j, double coeff, int N);

enum class Lemma {
    outer_sum,         // d(i+j) >= N(1/4)(b/8-1) on Omega_- u Omega_+
    outer_difference,  // d(i-j) <= 0 on Omega_-
    outer_up,          // dj >= N(1/4)(b/8-1) on i > N/2, j < N/2 + 2 sqrt(N)
    inner_1,           // di > 0 on i in (c+ N - 4 sqrt(N), c+ N - sqrt(N))
    inner_drift_1,     // dj > 0 for j < c- N + 2 sqrt(N), donor fixed just above c+ N - 3 sqrt(N)
    inner_drift_2,     // dj > 0 on j in (c- N + 2 sqrt(N), c+ N - 2 sqrt(N))
};

struct ScanResult {
    Lemma lemma{};
    double a = 0.0;
    double b = 0.0;
    int N = 0;
    double target = 0.0;          // threshold subtracted from the oriented drift
    double margin = 0.0;          // min over the region, exact-generator form
    double leading_margin = 0.0;  // same minimum for the leading-order form
    int arg_i = -1;               // state minimizing the exact margin
    int arg_j = -1;               // -1 for the single-coordinate lemmas
    long long states = 0;         // region size
    bool pass = false;            // margin >= 0
};

// Exhaustive enumeration of every integer state in the lemma's region.
// Throws std::domain_error if the region is empty at this N (the message
// names the smallest workable N) or if an inner lemma is asked for a <= 4.
ScanResult scan_lemma(Lemma lemma, double a, double b, int N);

}  // namespace patchcp
