#include "patchcp/dual.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <unordered_map>

#include "patchcp/mean_field.hpp"

namespace patchcp {

namespace {

bool contains(const std::vector<int32_t>& sorted_set, int32_t v) {
    return std::binary_search(sorted_set.begin(), sorted_set.end(), v);
}

}  // namespace

DualRun dual_run(const GraphicalRep& rep, int32_t w, double t, long long family_cap) {
    const long long nsites = static_cast<long long>(rep.params.L) * rep.params.N;
    if (w < 0 || w >= nsites) throw std::invalid_argument("dual_run: origin outside the lattice");
    if (!(t > 0.0) || t > rep.t_max) {
        throw std::invalid_argument("dual_run: need 0 < t <= t_max of the window");
    }
    if (family_cap < 1) throw std::invalid_argument("dual_run: family_cap must be >= 1");

    DualRun out;
    out.origin = w;
    out.horizon = t;

    std::set<std::vector<int32_t>> family;
    std::vector<long long> degree(static_cast<size_t>(nsites), 0);
    family.insert({w});
    degree[static_cast<size_t>(w)] = 1;
    out.max_family = 1;

    // Arrivals with forward time in [0, t), processed backward, i.e. in
    // increasing dual time s = t - arrival time.
    auto itend = std::lower_bound(rep.arrivals.begin(), rep.arrivals.end(), t,
                                  [](const Arrival& ar, double tt) { return ar.t < tt; });
    for (auto it = itend; it != rep.arrivals.begin();) {
        --it;
        const Arrival& ar = *it;
        const double s = t - ar.t;

        if (ar.kind == ArrivalKind::death) {
            if (degree[ar.target] == 0) continue;
            ++out.deaths_applied;
            for (auto fit = family.begin(); fit != family.end();) {
                if (contains(*fit, ar.target)) {
                    for (int32_t m : *fit) --degree[m];
                    fit = family.erase(fit);
                } else {
                    ++fit;
                }
            }
            if (family.empty()) {
                out.extinct = true;
                out.extinct_at = s;
                break;
            }
        } else {
            if (degree[ar.target] == 0) continue;
            ++out.births_applied;
            // collision test against the union just before the birth fires;
            // the parents may include the target itself
            if (degree[ar.p1] > 0 || degree[ar.p2] > 0) {
                ++out.collisions;
                if (out.first_collision_at < 0.0) out.first_collision_at = s;
            }
            std::vector<std::vector<int32_t>> added;
            for (const auto& B : family) {
                if (!contains(B, ar.target)) continue;
                std::vector<int32_t> nb;
                nb.reserve(B.size() + 1);
                for (int32_t m : B) {
                    if (m != ar.target) nb.push_back(m);
                }
                nb.push_back(ar.p1);
                nb.push_back(ar.p2);
                std::sort(nb.begin(), nb.end());
                nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
                added.push_back(std::move(nb));
            }
            for (auto& nb : added) {
                auto [pos, inserted] = family.insert(std::move(nb));
                if (inserted) {
                    for (int32_t m : *pos) ++degree[m];
                }
            }
            if (static_cast<long long>(family.size()) > family_cap) {
                throw ExplosionError("dual_run: family exceeded cap of " +
                                     std::to_string(family_cap) + " sets");
            }
            out.max_family = std::max(out.max_family, static_cast<long long>(family.size()));
        }
    }

    out.family.assign(family.begin(), family.end());
    return out;
}

bool duality_check(const GraphicalRep& rep, const MicroConfig& initial, int32_t w, double t) {
    const MicroConfig fin = forward_micro(rep, initial, t);
    const bool forward_occupied = fin.occupied(w);

    const DualRun dr = dual_run(rep, w, t);
    bool dual_seeded = false;
    for (const auto& B : dr.family) {
        bool all = true;
        for (int32_t m : B) {
            if (!initial.occupied(m)) {
                all = false;
                break;
            }
        }
        if (all) {
            dual_seeded = true;
            break;
        }
    }
    return forward_occupied == dual_seeded;
}

namespace {

// Family store for the branching variant. Sets are immutable once created
// and die wholesale, so incidence lists are cleaned lazily: dead set ids are
// dropped the next time a point's list is touched.
struct BranchingFamily {
    std::unordered_map<int32_t, std::vector<int32_t>> sets;       // id -> members
    std::unordered_map<int32_t, std::vector<int32_t>> incidence;  // point -> set ids (may be stale)
    std::unordered_map<int32_t, int32_t> degree;                  // point -> live set count
    std::vector<int32_t> alive;                                   // distinct points, any order
    std::unordered_map<int32_t, size_t> alive_pos;
    int32_t next_set = 0;

    void point_gained(int32_t m) {
        int32_t& d = degree[m];
        if (d == 0) {
            alive_pos[m] = alive.size();
            alive.push_back(m);
        }
        ++d;
    }

    void point_lost(int32_t m) {
        auto dit = degree.find(m);
        if (--dit->second > 0) return;
        degree.erase(dit);
        incidence.erase(m);
        const size_t pos = alive_pos[m];
        alive_pos[alive.back()] = pos;
        std::swap(alive[pos], alive.back());
        alive.pop_back();
        alive_pos.erase(m);
    }

    void add_set(std::vector<int32_t> members) {
        const int32_t id = next_set++;
        for (int32_t m : members) {
            incidence[m].push_back(id);
            point_gained(m);
        }
        sets.emplace(id, std::move(members));
    }

    // Live set ids containing u, compacting the stale entries away.
    std::vector<int32_t>& live_sets_of(int32_t u) {
        auto& ids = incidence[u];
        size_t keep = 0;
        for (int32_t id : ids) {
            if (sets.count(id)) ids[keep++] = id;
        }
        ids.resize(keep);
        return ids;
    }

    void kill_point(int32_t u) {
        // copy: point_lost(u) erases the incidence entry out from under us
        const std::vector<int32_t> ids = live_sets_of(u);
        for (int32_t id : ids) {
            auto sit = sets.find(id);
            for (int32_t m : sit->second) point_lost(m);
            sets.erase(sit);
        }
    }
};

}  // namespace

ZetaRun zeta_run(double a, double b, double t, uint64_t seed, long long family_cap) {
    if (!(a >= 0.0) || !(b >= 0.0)) throw std::invalid_argument("zeta_run: rates must be >= 0");
    if (!(t > 0.0)) throw std::invalid_argument("zeta_run: horizon must be > 0");
    if (family_cap < 1) throw std::invalid_argument("zeta_run: family_cap must be >= 1");

    ZetaRun out;
    BranchingFamily fam;
    fam.add_set({0});
    int32_t next_id = 1;
    out.max_family = 1;
    out.max_points = 1;

    Rng g(seed);
    const double per_point = 1.0 + a + b;
    const double birth_prob = (a + b) / per_point;
    double s = 0.0;
    while (!fam.alive.empty()) {
        const double rate = static_cast<double>(fam.alive.size()) * per_point;
        s += exponential(g, rate);
        if (s > t) break;

        const int32_t u = fam.alive[static_cast<size_t>(
            uniform_int(g, static_cast<int>(fam.alive.size())))];
        const bool birth = uniform01(g) < birth_prob;
        if (!out.had_event) {
            out.had_event = true;
            out.first_event_birth = birth;
        }

        if (birth) {
            ++out.births;
            const int32_t f1 = next_id++;
            const int32_t f2 = next_id++;
            // same fresh pair for every containing set: one event, one pair
            const std::vector<int32_t> ids = fam.live_sets_of(u);
            for (int32_t id : ids) {
                const auto& B = fam.sets.find(id)->second;
                std::vector<int32_t> nb;
                nb.reserve(B.size() + 1);
                for (int32_t m : B) {
                    if (m != u) nb.push_back(m);
                }
                nb.push_back(f1);
                nb.push_back(f2);
                fam.add_set(std::move(nb));
            }
            if (static_cast<long long>(fam.sets.size()) > family_cap) {
                throw ExplosionError("zeta_run: family exceeded cap of " +
                                     std::to_string(family_cap) + " sets");
            }
        } else {
            ++out.deaths;
            fam.kill_point(u);
            if (fam.alive.empty()) {
                out.extinct = true;
                out.extinct_at = s;
            }
        }
        out.max_family = std::max(out.max_family, static_cast<long long>(fam.sets.size()));
        out.max_points = std::max(out.max_points, static_cast<long long>(fam.alive.size()));
    }

    out.points_at_horizon = static_cast<long long>(fam.alive.size());
    return out;
}

std::vector<double> rho_fixed_points(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0)) {
        throw std::invalid_argument("rho_fixed_points: rates must be >= 0");
    }
    const double s = a + b;
    if (!(s > 0.0)) throw std::invalid_argument("rho_fixed_points: need a + b > 0");
    const auto r = roots(s);
    if (!r) return {0.0};
    if (r->degenerate) return {0.0, 0.5};
    return {0.0, r->c_minus, r->c_plus};
}

double dual_collision_bound(double a, double b, double N, double t) {
    if (!(a >= 0.0) || !(b >= 0.0)) {
        throw std::invalid_argument("dual_collision_bound: rates must be >= 0");
    }
    if (!(N >= 2.0)) throw std::invalid_argument("dual_collision_bound: need N >= 2");
    if (!(t > 0.0)) throw std::invalid_argument("dual_collision_bound: need t > 0");
    const double K = std::pow(N, 0.2);
    return std::exp(2.0 * (a + b) * t) / K + 2.0 * K * (K + 1.0) / N;
}

}  // namespace patchcp
