#include "patchcp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "patchcp/mean_field.hpp"

namespace patchcp {

OccupationTable occupation_table(double a, int N) {
    if (!(a >= 0.0)) throw std::invalid_argument("occupation_table: a must be >= 0");
    if (N < 2) throw std::invalid_argument("occupation_table: N must be >= 2");
    const double r = 0.25 * a;
    OccupationTable tb;
    tb.a = a;
    tb.N = N;
    tb.v.assign(static_cast<size_t>(N) + 1, 0.0);
    tb.sigma.assign(static_cast<size_t>(N) + 1, 0.0);
    tb.residual.assign(static_cast<size_t>(N), 0.0);

    // geometric sums by running accumulation; no ratio form, so r = 1 is not special
    tb.v[0] = 1.0;
    double term = 1.0;
    for (int j = 1; j <= N - 1; ++j) {
        term *= r;
        tb.v[static_cast<size_t>(j)] = tb.v[static_cast<size_t>(j) - 1] + term;
    }
    // truncation boundary: the start state is entered once, then refilled from
    // below with the interior jump weight
    tb.v[static_cast<size_t>(N)] = 1.0 + a / (a + 4.0) * tb.v[static_cast<size_t>(N) - 1];

    for (int j = 1; j <= N - 1; ++j)
        tb.sigma[static_cast<size_t>(j)] = tb.v[static_cast<size_t>(j)] / ((r + 1.0) * j);
    tb.sigma[static_cast<size_t>(N)] = tb.v[static_cast<size_t>(N)] / N;

    double S = 1.0;
    term = 1.0;
    for (int j = 1; j <= N; ++j) {
        term *= r;
        S += term;
        tb.weighted_bound += S;
    }

    for (int j = 1; j <= N - 1; ++j) {
        const double res = tb.v[static_cast<size_t>(j)] -
                           4.0 / (a + 4.0) * tb.v[static_cast<size_t>(j) + 1] -
                           a / (a + 4.0) * tb.v[static_cast<size_t>(j) - 1];
        tb.residual[static_cast<size_t>(j)] = res;
        tb.max_residual = std::max(tb.max_residual, std::fabs(res));
    }
    return tb;
}

namespace {

double chain_birth_rate(ChainKind kind, double a, int N, int j) {
    if (j <= 0 || j >= N) return 0.0;  // absorbing at 0, truncated at N
    if (kind == ChainKind::dominating) return 0.25 * a * j;
    const double x = j;
    return a * x * (x - 1.0) * (N - x) / (static_cast<double>(N) * (N - 1));
}

}  // namespace

ChainSolution solve_expected_visits(ChainKind kind, double a, int N) {
    if (!(a >= 0.0)) throw std::invalid_argument("solve_expected_visits: a must be >= 0");
    if (N < 2) throw std::invalid_argument("solve_expected_visits: N must be >= 2");
    // Flow balance of the embedded jump chain started at N, unknowns v_1..v_N:
    //   v_j = [j == N] + v_{j+1} P(j+1 -> j) + v_{j-1} P(j-1 -> j),
    // with no inflow from the absorbing state. Tridiagonal, solved directly.
    std::vector<double> diag(static_cast<size_t>(N) + 1, 1.0);
    std::vector<double> upper(static_cast<size_t>(N) + 1, 0.0);
    std::vector<double> lower(static_cast<size_t>(N) + 1, 0.0);
    std::vector<double> rhs(static_cast<size_t>(N) + 1, 0.0);
    for (int j = 1; j <= N; ++j) {
        if (j + 1 <= N) {
            const double bj = chain_birth_rate(kind, a, N, j + 1);
            upper[static_cast<size_t>(j)] = -(j + 1.0) / (bj + (j + 1.0));
        }
        if (j - 1 >= 1) {
            const double bj = chain_birth_rate(kind, a, N, j - 1);
            lower[static_cast<size_t>(j)] = -bj / (bj + (j - 1.0));
        }
    }
    rhs[static_cast<size_t>(N)] = 1.0;
    for (int j = 2; j <= N; ++j) {
        const double w = lower[static_cast<size_t>(j)] / diag[static_cast<size_t>(j) - 1];
        diag[static_cast<size_t>(j)] -= w * upper[static_cast<size_t>(j) - 1];
        rhs[static_cast<size_t>(j)] -= w * rhs[static_cast<size_t>(j) - 1];
    }
    ChainSolution sol;
    sol.visits.assign(static_cast<size_t>(N) + 1, 0.0);
    sol.occupation.assign(static_cast<size_t>(N) + 1, 0.0);
    sol.visits[static_cast<size_t>(N)] = rhs[static_cast<size_t>(N)] / diag[static_cast<size_t>(N)];
    for (int j = N - 1; j >= 1; --j)
        sol.visits[static_cast<size_t>(j)] =
            (rhs[static_cast<size_t>(j)] -
             upper[static_cast<size_t>(j)] * sol.visits[static_cast<size_t>(j) + 1]) /
            diag[static_cast<size_t>(j)];
    // every path is absorbed exactly once; this evaluates to 1 up to roundoff
    const double b1 = chain_birth_rate(kind, a, N, 1);
    sol.visits[0] = sol.visits[1] / (b1 + 1.0);
    for (int j = 1; j <= N; ++j)
        sol.occupation[static_cast<size_t>(j)] =
            sol.visits[static_cast<size_t>(j)] / (chain_birth_rate(kind, a, N, j) + j);
    return sol;
}

BirthDeathStats simulate_birth_death(double a, int N, long long replicas, uint64_t seed,
                                     ChainKind kind, const std::vector<double>& sample_times) {
    if (!(a >= 0.0)) throw std::invalid_argument("simulate_birth_death: a must be >= 0");
    if (N < 2) throw std::invalid_argument("simulate_birth_death: N must be >= 2");
    if (replicas < 1) throw std::invalid_argument("simulate_birth_death: replicas must be >= 1");
    for (size_t k = 0; k < sample_times.size(); ++k)
        if (!(sample_times[k] >= 0.0) || (k > 0 && sample_times[k] < sample_times[k - 1]))
            throw std::invalid_argument("simulate_birth_death: sample times must be ascending, >= 0");

    BirthDeathStats st;
    st.kind = kind;
    st.a = a;
    st.N = N;
    st.replicas = replicas;
    st.sample_times = sample_times;
    st.state_counts.assign(sample_times.size(),
                           std::vector<long long>(static_cast<size_t>(N) + 1, 0));

    const size_t nst = static_cast<size_t>(N) + 1;
    std::vector<double> sumv(nst, 0.0), sumv2(nst, 0.0), sumt(nst, 0.0), sumt2(nst, 0.0);
    double sumw = 0.0, sumw2 = 0.0;
    std::vector<long long> vis(nst);
    std::vector<double> tim(nst);
    constexpr long long kStepCap = 1000000000LL;

    for (long long rep = 0; rep < replicas; ++rep) {
        Rng g(substream_seed(seed, static_cast<uint64_t>(rep)));
        std::fill(vis.begin(), vis.end(), 0);
        std::fill(tim.begin(), tim.end(), 0.0);
        int s = N;
        vis[static_cast<size_t>(N)] = 1;
        double t = 0.0, w = 0.0;
        size_t si = 0;
        long long steps = 0;
        while (s != 0) {
            const double beta = chain_birth_rate(kind, a, N, s);
            const double tot = beta + s;
            const double tau = exponential(g, tot);
            while (si < sample_times.size() && sample_times[si] < t + tau) {
                ++st.state_counts[si][static_cast<size_t>(s)];
                ++si;
            }
            t += tau;
            tim[static_cast<size_t>(s)] += tau;
            w += s * tau;
            s += (uniform01(g) * tot < beta) ? 1 : -1;
            ++vis[static_cast<size_t>(s)];
            if (++steps > kStepCap)
                throw std::runtime_error("simulate_birth_death: replica exceeded step cap");
        }
        while (si < sample_times.size()) {  // absorbed: the state stays 0
            ++st.state_counts[si][0];
            ++si;
        }
        for (size_t j = 0; j < nst; ++j) {
            const double vj = static_cast<double>(vis[j]);
            sumv[j] += vj;
            sumv2[j] += vj * vj;
            sumt[j] += tim[j];
            sumt2[j] += tim[j] * tim[j];
        }
        sumw += w;
        sumw2 += w * w;
    }

    const double R = static_cast<double>(replicas);
    const auto se_of = [&](double s1, double s2) {
        if (replicas < 2) return 0.0;
        const double m = s1 / R;
        const double var = std::max(0.0, (s2 - R * m * m) / (R - 1.0));
        return std::sqrt(var / R);
    };
    st.mean_visits.resize(nst);
    st.se_visits.resize(nst);
    st.mean_time.resize(nst);
    st.se_time.resize(nst);
    for (size_t j = 0; j < nst; ++j) {
        st.mean_visits[j] = sumv[j] / R;
        st.se_visits[j] = se_of(sumv[j], sumv2[j]);
        st.mean_time[j] = sumt[j] / R;
        st.se_time[j] = se_of(sumt[j], sumt2[j]);
    }
    st.mean_weighted_time = sumw / R;
    st.se_weighted_time = se_of(sumw, sumw2);
    return st;
}

double mean_emigrants_bound(double a, double b, int N) {
    if (!(a >= 0.0) || !(b >= 0.0))
        throw std::invalid_argument("mean_emigrants_bound: rates must be >= 0");
    if (N < 2) throw std::invalid_argument("mean_emigrants_bound: N must be >= 2");
    if (std::fabs(a - 4.0) <= 1e-12) return 0.5 * b * (N + 2.0) * (N + 2.0);
    if (a < 4.0) return b * N / (1.0 - 0.25 * a);
    const double r = 0.25 * a;
    return b * std::pow(r - 1.0, -2.0) * std::pow(r, N + 2.0);
}

CollisionBound collision_prob_bound(long long M) {
    if (M < 1) throw std::invalid_argument("collision_prob_bound: M must be >= 1");
    CollisionBound cb;
    long long k = std::llround(std::cbrt(static_cast<double>(M)));
    while (k * k * k < M) ++k;  // smallest k with k^3 >= M, immune to cbrt rounding
    while (k > 1 && (k - 1) * (k - 1) * (k - 1) >= M) --k;
    cb.offspring = k;
    cb.cap = 0.5 / std::cbrt(static_cast<double>(M));
    double prod = 1.0;
    const double twoM = 2.0 * static_cast<double>(M);
    for (long long j = 0; j < k; ++j) prod *= 1.0 - static_cast<double>(j) / twoM;
    cb.exact_product = 1.0 - prod;
    return cb;
}

SurvivalBound survival_upper_bound(double a, double b, int N, long long M) {
    if (M < 1) throw std::invalid_argument("survival_upper_bound: M must be >= 1");
    SurvivalBound sb;
    sb.raw = (0.5 + mean_emigrants_bound(a, b, N)) / std::cbrt(static_cast<double>(M));
    sb.clamped = sb.raw > 1.0;
    sb.value = sb.clamped ? 1.0 : sb.raw;
    return sb;
}

DriftValue drift(DriftKind kind, double i, double j, double coeff, int N) {
    if (N < 2) throw std::invalid_argument("drift: N must be >= 2");
    const double n = N;
    const double n2 = n * n;
    const double nn1 = n * (n - 1.0);
    DriftValue d;
    switch (kind) {
        case DriftKind::sum:
            d.leading = 0.5 * coeff * (i * i * (n - j) + j * j * (n - i)) / n2 - (i + j);
            d.exact =
                0.5 * coeff * (i * (i - 1.0) * (n - j) + j * (j - 1.0) * (n - i)) / nn1 - (i + j);
            break;
        case DriftKind::difference:
            d.leading = 0.5 * coeff * (j * j * (n - i) - i * i * (n - j)) / n2 - (i - j);
            d.exact =
                0.5 * coeff * (j * (j - 1.0) * (n - i) - i * (i - 1.0) * (n - j)) / nn1 - (i - j);
            break;
        case DriftKind::y_given:
            d.leading = 0.5 * coeff * i * i * (n - j) / n2 - j;
            d.exact = 0.5 * coeff * i * (i - 1.0) * (n - j) / nn1 - j;
            break;
        case DriftKind::single_patch:
            d.leading = coeff * i * i * (n - i) / n2 - i;
            d.exact = coeff * i * (i - 1.0) * (n - i) / nn1 - i;
            break;
    }
    return d;
}

namespace {

struct RegionBounds {
    double halfline = 0.0;  // i + j > N - 4 sqrt(N)
    double band = 0.0;      // the N/2 + 2 sqrt(N) cap
    double half = 0.0;      // N/2
    double lo = 0.0;        // open interval for the single-coordinate lemmas
    double hi = 0.0;
    long long donor = -1;  // fixed donor count for the conditioned lemma
};

RegionBounds region_bounds(Lemma lemma, double a, int n) {
    RegionBounds rb;
    const double rn = std::sqrt(static_cast<double>(n));
    switch (lemma) {
        case Lemma::outer_sum:
        case Lemma::outer_difference:
            rb.halfline = n - 4.0 * rn;
            rb.band = 0.5 * n + 2.0 * rn;
            break;
        case Lemma::outer_up:
            rb.half = 0.5 * n;
            rb.band = 0.5 * n + 2.0 * rn;
            break;
        case Lemma::inner_1: {
            const MeanFieldRoots r = *roots(a);
            rb.lo = r.c_plus * n - 4.0 * rn;
            rb.hi = r.c_plus * n - rn;
            break;
        }
        case Lemma::inner_drift_2: {
            const MeanFieldRoots r = *roots(a);
            rb.lo = r.c_minus * n + 2.0 * rn;
            rb.hi = r.c_plus * n - 2.0 * rn;
            break;
        }
        case Lemma::inner_drift_1: {
            const MeanFieldRoots r = *roots(a);
            rb.lo = -1.0;  // every j >= 0 below the cap is in the region
            rb.hi = r.c_minus * n + 2.0 * rn;
            // smallest admissible donor count: strictly above c+ n - 3 sqrt(n)
            rb.donor = static_cast<long long>(std::floor(r.c_plus * n - 3.0 * rn)) + 1;
            if (rb.donor < 0) rb.donor = 0;
            break;
        }
    }
    return rb;
}

bool region_nonempty(Lemma lemma, double a, int n) {
    const RegionBounds rb = region_bounds(lemma, a, n);
    switch (lemma) {
        case Lemma::outer_sum:
            for (long long i = 0; i <= n; ++i)
                for (long long j = 0; j <= n; ++j)
                    if (i + j > rb.halfline &&
                        ((j < rb.band && i > j) || (i < rb.band && j > i)))
                        return true;
            return false;
        case Lemma::outer_difference:
            for (long long i = 0; i <= n; ++i)
                for (long long j = 0; j <= n; ++j)
                    if (i + j > rb.halfline && j < rb.band && i > j) return true;
            return false;
        case Lemma::outer_up:
            for (long long i = 0; i <= n; ++i)
                for (long long j = 0; j <= n; ++j)
                    if (i > rb.half && j < rb.band) return true;
            return false;
        case Lemma::inner_1:
        case Lemma::inner_drift_2:
            for (long long s = 0; s <= n; ++s)
                if (s > rb.lo && s < rb.hi) return true;
            return false;
        case Lemma::inner_drift_1:
            if (rb.donor > n) return false;
            for (long long s = 0; s <= n; ++s)
                if (s < rb.hi) return true;
            return false;
    }
    return false;
}

}  // namespace

ScanResult scan_lemma(Lemma lemma, double a, double b, int N) {
    if (N < 2) throw std::invalid_argument("scan_lemma: N must be >= 2");
    const bool inner =
        lemma == Lemma::inner_1 || lemma == Lemma::inner_drift_1 || lemma == Lemma::inner_drift_2;
    if (inner && !(a > 4.0))
        throw std::domain_error("scan_lemma: single-patch lemmas need a > 4 (two interior roots)");

    ScanResult res;
    res.lemma = lemma;
    res.a = a;
    res.b = b;
    res.N = N;
    res.target = (lemma == Lemma::outer_sum || lemma == Lemma::outer_up)
                     ? N * 0.25 * (b / 8.0 - 1.0)
                     : 0.0;
    res.margin = std::numeric_limits<double>::infinity();
    res.leading_margin = std::numeric_limits<double>::infinity();

    const RegionBounds rb = region_bounds(lemma, a, N);
    const auto consider = [&](double exact, double leading, int i, int j) {
        ++res.states;
        if (exact < res.margin) {
            res.margin = exact;
            res.arg_i = i;
            res.arg_j = j;
        }
        if (leading < res.leading_margin) res.leading_margin = leading;
    };

    switch (lemma) {
        case Lemma::outer_sum:
            for (long long i = 0; i <= N; ++i)
                for (long long j = 0; j <= N; ++j) {
                    if (!(i + j > rb.halfline)) continue;
                    if (!((j < rb.band && i > j) || (i < rb.band && j > i))) continue;
                    const DriftValue d = drift(DriftKind::sum, static_cast<double>(i),
                                               static_cast<double>(j), b, N);
                    consider(d.exact - res.target, d.leading - res.target, static_cast<int>(i),
                             static_cast<int>(j));
                }
            break;
        case Lemma::outer_difference:
            for (long long i = 0; i <= N; ++i)
                for (long long j = 0; j <= N; ++j) {
                    if (!(i + j > rb.halfline && j < rb.band && i > j)) continue;
                    const DriftValue d = drift(DriftKind::difference, static_cast<double>(i),
                                               static_cast<double>(j), b, N);
                    // the claim is drift <= 0, so the margin is its negation
                    consider(-d.exact, -d.leading, static_cast<int>(i), static_cast<int>(j));
                }
            break;
        case Lemma::outer_up:
            for (long long i = 0; i <= N; ++i) {
                if (!(i > rb.half)) continue;
                for (long long j = 0; j <= N; ++j) {
                    if (!(j < rb.band)) continue;
                    const DriftValue d = drift(DriftKind::y_given, static_cast<double>(i),
                                               static_cast<double>(j), b, N);
                    consider(d.exact - res.target, d.leading - res.target, static_cast<int>(i),
                             static_cast<int>(j));
                }
            }
            break;
        case Lemma::inner_1:
        case Lemma::inner_drift_2:
            for (long long s = 0; s <= N; ++s) {
                if (!(s > rb.lo && s < rb.hi)) continue;
                const DriftValue d =
                    drift(DriftKind::single_patch, static_cast<double>(s), 0.0, a, N);
                consider(d.exact, d.leading, static_cast<int>(s), -1);
            }
            break;
        case Lemma::inner_drift_1:
            if (rb.donor <= N) {
                for (long long s = 0; s <= N; ++s) {
                    if (!(s < rb.hi)) continue;
                    const DriftValue d = drift(DriftKind::y_given, static_cast<double>(rb.donor),
                                               static_cast<double>(s), b, N);
                    consider(d.exact, d.leading, static_cast<int>(rb.donor), static_cast<int>(s));
                }
            }
            break;
    }

    if (res.states == 0) {
        int good = -1;
        for (int n = 2; n <= 100000; ++n)
            if (region_nonempty(lemma, a, n)) {
                good = n;
                break;
            }
        std::string msg = "scan_lemma: region empty at N=" + std::to_string(N);
        msg += good > 0 ? "; smallest nonempty N is " + std::to_string(good)
                        : "; no nonempty N <= 100000";
        throw std::domain_error(msg);
    }
    res.pass = res.margin >= 0.0;
    return res;
}

}  // namespace patchcp
