#include "patchcp/graphical.hpp"

#include <string>

namespace patchcp {

GraphicalRep build_rep(const ModelParams& params, double t_max, uint64_t seed, double cap) {
    params.validate();
    if (!(t_max > 0.0)) throw std::invalid_argument("build_rep: t_max must be > 0");
    if (!(cap > 0.0)) throw std::invalid_argument("build_rep: cap must be > 0");

    const double sites = static_cast<double>(params.L) * params.N;
    const double lambda = sites * (1.0 + params.a + params.b);
    const double expected = lambda * t_max;
    if (expected > cap) {
        throw WindowError("build_rep: expected arrival count " + std::to_string(expected) +
                          " exceeds cap " + std::to_string(cap) +
                          "; shrink the window or the lattice");
    }

    GraphicalRep rep;
    rep.params = params;
    rep.t_max = t_max;
    rep.seed = seed;
    rep.arrivals.reserve(static_cast<size_t>(expected) + 16);

    Rng g(seed);
    const int nsites = params.L * params.N;
    const double total_weight = 1.0 + params.a + params.b;
    double t = 0.0;
    for (;;) {
        t += exponential(g, lambda);
        if (t > t_max) break;

        Arrival ar;
        ar.t = t;
        ar.target = static_cast<int32_t>(uniform_int(g, nsites));
        const double u = uniform01(g) * total_weight;
        if (u < 1.0) {
            ar.kind = ArrivalKind::death;
        } else {
            int src_patch = ar.target / params.N;
            if (u < 1.0 + params.a) {
                ar.kind = ArrivalKind::a_birth;
            } else {
                ar.kind = ArrivalKind::b_birth;
                // neighbour offsets -M..-1, +1..+M, matching neighbors()
                const int nb = uniform_int(g, 2 * params.M);
                const int off = nb < params.M ? nb - params.M : nb - params.M + 1;
                src_patch = wrap_patch(src_patch + off, params.L);
            }
            // ordered pair of distinct slots in the source patch; the pair may
            // include the target itself, in which case the birth is a no-op
            // whenever the target is empty
            const int y = uniform_int(g, params.N);
            int z = uniform_int(g, params.N - 1);
            if (z >= y) ++z;
            ar.p1 = static_cast<int32_t>(src_patch) * params.N + y;
            ar.p2 = static_cast<int32_t>(src_patch) * params.N + z;
        }
        rep.arrivals.push_back(ar);
    }
    return rep;
}

MicroConfig forward_micro(const GraphicalRep& rep, const MicroConfig& initial, double upto,
                          std::vector<std::pair<double, MicroConfig>>* path) {
    if (initial.L != rep.params.L || initial.N != rep.params.N) {
        throw std::invalid_argument("forward_micro: configuration shape does not match the window");
    }
    const double tend = upto < 0.0 ? rep.t_max : upto;
    if (tend > rep.t_max) {
        throw std::invalid_argument("forward_micro: requested time is beyond the window");
    }

    MicroConfig m = initial;
    if (path) path->clear();
    for (const Arrival& ar : rep.arrivals) {
        if (ar.t > tend) break;
        if (ar.kind == ArrivalKind::death) {
            m.set(ar.target, false);
        } else if (m.occupied(ar.p1) && m.occupied(ar.p2)) {
            m.set(ar.target, true);
        }
        if (path) path->emplace_back(ar.t, m);
    }
    return m;
}

std::vector<double> deaths_at(const GraphicalRep& rep, int32_t loc) {
    std::vector<double> out;
    for (const Arrival& ar : rep.arrivals) {
        if (ar.kind == ArrivalKind::death && ar.target == loc) out.push_back(ar.t);
    }
    return out;
}

long long count_kind(const GraphicalRep& rep, ArrivalKind kind) {
    long long n = 0;
    for (const Arrival& ar : rep.arrivals) {
        if (ar.kind == kind) ++n;
    }
    return n;
}

}  // namespace patchcp
