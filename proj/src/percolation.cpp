#include "patchcp/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "patchcp/mean_field.hpp"

namespace patchcp {

void validate_wet(const WetSet& w) {
    for (size_t i = 0; i < w.wet.size(); ++i) {
        const int32_t z = w.wet[i];
        if (((z + w.level) % 2 + 2) % 2 != 0) {
            throw std::logic_error("WetSet: site " + std::to_string(z) + " at level " +
                                   std::to_string(w.level) + " breaks the parity rule");
        }
        if (i > 0 && w.wet[i - 1] >= z) {
            throw std::logic_error("WetSet: sites must be strictly ascending");
        }
    }
}

WetSet evolve(const WetSet& w, double q, Rng& g, int32_t width_cap, bool* truncated) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("evolve: q must lie in [0, 1]");
    if (width_cap < 0) throw std::invalid_argument("evolve: width_cap must be >= 0");

    WetSet next;
    next.level = w.level + 1;

    std::vector<int32_t> cand;
    cand.reserve(2 * w.wet.size());
    for (int32_t z : w.wet) {
        cand.push_back(z - 1);
        cand.push_back(z + 1);
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    next.wet.reserve(cand.size());
    for (int32_t z : cand) {
        if (z > width_cap || z < -width_cap) {
            if (truncated) *truncated = true;
            continue;
        }
        if (uniform01(g) >= q) next.wet.push_back(z);
    }
    return next;
}

PercSurvival estimate_perc_survival(double q, int levels, long long replicas, uint64_t seed,
                                    int32_t width_cap, std::vector<char>* per_replica) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw std::invalid_argument("estimate_perc_survival: q must lie in [0, 1]");
    }
    if (levels < 0) throw std::invalid_argument("estimate_perc_survival: levels must be >= 0");
    if (replicas < 1) throw std::invalid_argument("estimate_perc_survival: replicas must be >= 1");
    if (width_cap < 0) width_cap = levels + 1;

    PercSurvival out;
    out.q = q;
    out.levels = levels;
    out.replicas = replicas;
    out.seed = seed;
    if (per_replica) per_replica->assign(static_cast<size_t>(replicas), 0);

    for (long long r = 0; r < replicas; ++r) {
        Rng g(substream_seed(seed, static_cast<uint64_t>(r)));
        WetSet w;
        w.wet = {0};
        bool truncated = false;
        for (int n = 0; n < levels && !w.wet.empty(); ++n) {
            w = evolve(w, q, g, width_cap, &truncated);
        }
        if (truncated) ++out.truncated_replicas;
        if (!w.wet.empty()) {
            ++out.survived;
            if (per_replica) (*per_replica)[static_cast<size_t>(r)] = 1;
        }
    }

    out.point = static_cast<double>(out.survived) / static_cast<double>(replicas);
    out.ci_halfwidth =
        1.96 * std::sqrt(out.point * (1.0 - out.point) / static_cast<double>(replicas));
    return out;
}

std::map<int, std::vector<int32_t>> good_sites(const Trajectory& tr, GoodVariant variant,
                                               const ModelParams& params, int levels) {
    params.validate();
    if (static_cast<int>(tr.initial.size()) != params.L) {
        throw std::invalid_argument("good_sites: trajectory width does not match params");
    }
    if (levels < 0) throw std::invalid_argument("good_sites: levels must be >= 0");

    const double N = params.N;
    const int L = params.L;
    const bool pinned = tr.outcome.kind == OutcomeKind::extinct_at;
    const double coverage = pinned ? std::numeric_limits<double>::infinity() : tr.terminal_time;

    const bool a1 = variant == GoodVariant::A1;
    const double need = a1 ? (2.0 * levels + 4.0) * N : 4.0 * levels * N;
    if (need > coverage) {
        // largest n whose window still fits
        const int max_level =
            a1 ? static_cast<int>(std::floor(coverage / (2.0 * N))) - 2
               : static_cast<int>(std::floor(coverage / (4.0 * N)));
        throw CoverageError("good_sites: trajectory ends at " + std::to_string(tr.terminal_time) +
                            ", too short for level " + std::to_string(levels) +
                            "; maximum evaluable level is " + std::to_string(max_level));
    }

    double a2_threshold = 0.0;
    if (!a1) {
        if (!(params.a > 4.0)) {
            throw std::domain_error("good_sites: variant A2 needs a > 4 for the upper root");
        }
        a2_threshold = roots(params.a)->c_plus * N - 3.0 * std::sqrt(N);
    }

    MesoConfig c = tr.initial;
    size_t ei = 0;
    auto advance_through = [&](double tt) {
        while (ei < tr.events.size() && tr.events[ei].t <= tt) {
            c[static_cast<size_t>(tr.events[ei].patch)] += tr.events[ei].delta;
            ++ei;
        }
    };

    std::map<int, std::vector<int32_t>> out;
    if (!a1) {
        for (int n = 0; n <= levels; ++n) {
            advance_through(4.0 * n * N);
            std::vector<int32_t> good;
            for (int z = 0; z < L; ++z) {
                if ((z + n) % 2 != 0) continue;
                if (c[static_cast<size_t>(z)] > a2_threshold) good.push_back(z);
            }
            out[n] = std::move(good);
        }
        return out;
    }

    const double half = N / 2.0;
    std::vector<char> ok(static_cast<size_t>(L));
    auto pair_ok = [&](int z) {
        return c[static_cast<size_t>(z)] > half &&
               c[static_cast<size_t>(wrap_patch(z + 1, L))] > half;
    };
    for (int n = 0; n <= levels; ++n) {
        const double t1 = (2.0 * n + 2.0) * N;
        const double t2 = (2.0 * n + 4.0) * N;
        advance_through(t1);
        for (int z = 0; z < L; ++z) ok[static_cast<size_t>(z)] = pair_ok(z) ? 1 : 0;
        // the predicate is "throughout the open window", so violations are
        // permanent within the level; only pairs touching the jumped patch
        // need rechecking
        while (ei < tr.events.size() && tr.events[ei].t < t2) {
            const Event& e = tr.events[ei];
            c[static_cast<size_t>(e.patch)] += e.delta;
            ++ei;
            const int left = wrap_patch(e.patch - 1, L);
            if (ok[static_cast<size_t>(e.patch)] && !pair_ok(e.patch)) {
                ok[static_cast<size_t>(e.patch)] = 0;
            }
            if (ok[static_cast<size_t>(left)] && !pair_ok(left)) {
                ok[static_cast<size_t>(left)] = 0;
            }
        }
        std::vector<int32_t> good;
        for (int z = 0; z < L; ++z) {
            if ((z + n) % 2 != 0) continue;
            if (ok[static_cast<size_t>(z)]) good.push_back(z);
        }
        out[n] = std::move(good);
    }
    return out;
}

}  // namespace patchcp
