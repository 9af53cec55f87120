#include "patchcp/meso_sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>
#include <utility>

namespace patchcp {

RunawayError::RunawayError(Trajectory p)
    : std::runtime_error("event cap exceeded before extinction or horizon"),
      partial(std::move(p)) {}

void check_trajectory(const Trajectory& tr, const ModelParams& params) {
    validate_meso(tr.initial, params);
    MesoConfig c = tr.initial;
    long long pop = 0;
    for (int v : c) pop += v;
    double last = 0.0;
    for (const Event& e : tr.events) {
        if (!(e.t > last)) throw std::logic_error("trajectory: times not strictly increasing");
        if (e.patch < 0 || e.patch >= params.L)
            throw std::logic_error("trajectory: patch out of range");
        if (e.delta != 1 && e.delta != -1) throw std::logic_error("trajectory: delta not +-1");
        c[static_cast<size_t>(e.patch)] += e.delta;
        const int v = c[static_cast<size_t>(e.patch)];
        if (v < 0 || v > params.N) throw std::logic_error("trajectory: occupancy left [0,N]");
        pop += e.delta;
        last = e.t;
    }
    if (tr.outcome.kind == OutcomeKind::extinct_at) {
        if (pop != 0) throw std::logic_error("trajectory: extinct outcome, population nonzero");
        const double expect = tr.events.empty() ? 0.0 : tr.events.back().t;
        if (tr.terminal_time != expect || tr.outcome.time != expect)
            throw std::logic_error("trajectory: extinction time disagrees with replay");
    } else {
        if (pop == 0) throw std::logic_error("trajectory: alive outcome, population zero");
        if (tr.outcome.time != tr.terminal_time)
            throw std::logic_error("trajectory: outcome time disagrees with terminal time");
    }
}

namespace {

constexpr long long kRebuildEvery = 1000000;

// Incremental rate table over the ring. An event at x only changes the pair
// count at x, hence only the up rates of x and of the 2M patches around it.
// The scan for event selection walks an unwrapped window [lo-M, hi+M] around
// the occupied span so that mostly-empty large rings cost O(span), not O(L);
// once the dilated span covers the ring the engine falls back to full scans.
class Engine {
  public:
    Engine(const MesoConfig& initial, const ModelParams& params, bool monitor_seam)
        : p(params),
          denom(static_cast<double>(p.N) * (p.N - 1)),
          bb(p.b / (2.0 * p.M)),
          xi(initial),
          pp(static_cast<size_t>(p.L), 0.0),
          nsum(static_cast<size_t>(p.L), 0.0),
          up(static_cast<size_t>(p.L), 0.0),
          seam(monitor_seam) {
        for (int x = 0; x < p.L; ++x) {
            if (xi[static_cast<size_t>(x)] > 0) {
                pop += xi[static_cast<size_t>(x)];
                if (hi < lo) lo = x;
                hi = x;
            }
        }
        if (pop > 0) after_extend();
        rebuild();
    }

    bool absorbed() const { return pop == 0; }
    double total() const { return tot_up + static_cast<double>(pop); }
    const MesoConfig& state() const { return xi; }

    // Selects the event at cumulative position `target` in [0, total()) and
    // applies it. Patches are scanned in ascending unwrapped order, death
    // before birth within a patch; the order is fixed, so a seed fixes the
    // trajectory. Returns (ring patch, delta).
    std::pair<int, int> fire(double target) {
        long long from = 0, to = p.L - 1;
        if (!full_ring) {
            from = lo - p.M;
            to = hi + p.M;
        }
        double acc = 0.0;
        long long last_u = -1;
        int last_delta = 0;
        for (long long u = from; u <= to; ++u) {
            const int x = wl(u);
            const double dn = xi[static_cast<size_t>(x)];
            if (dn > 0.0) {
                acc += dn;
                last_u = u;
                last_delta = -1;
                if (target < acc) return apply(u, -1);
            }
            const double bu = up[static_cast<size_t>(x)];
            if (bu > 0.0) {
                acc += bu;
                last_u = u;
                last_delta = +1;
                if (target < acc) return apply(u, +1);
            }
        }
        // target fell in the rounding gap between the running total and the
        // freshly accumulated one; the last positive-rate event absorbs it
        if (last_delta == 0) throw std::logic_error("engine: no positive rate in scan window");
        return apply(last_u, last_delta);
    }

  private:
    int wl(long long u) const {
        long long r = u % p.L;
        if (r < 0) r += p.L;
        return static_cast<int>(r);
    }

    std::pair<int, int> apply(long long u, int delta) {
        const int x = wl(u);
        pop += delta;
        xi[static_cast<size_t>(x)] += delta;
        const double cx = xi[static_cast<size_t>(x)];
        const double newpp = cx * (cx - 1.0);
        const double dpp = newpp - pp[static_cast<size_t>(x)];
        pp[static_cast<size_t>(x)] = newpp;
        refresh_up(x);
        if (dpp != 0.0) {  // 0 <-> 1 moves no pair mass, skip the neighbourhood
            for (int d = 1; d <= p.M; ++d) {
                bump(wrap_patch(x - d, p.L), dpp);
                bump(wrap_patch(x + d, p.L), dpp);
            }
        }
        if (delta > 0 && !full_ring && (u < lo || u > hi)) {
            lo = std::min(lo, u);
            hi = std::max(hi, u);
            after_extend();
        } else if (delta < 0 && xi[static_cast<size_t>(x)] == 0 && !full_ring && pop > 0) {
            if (u == lo)
                while (lo <= hi && xi[static_cast<size_t>(wl(lo))] == 0) ++lo;
            else if (u == hi)
                while (hi >= lo && xi[static_cast<size_t>(wl(hi))] == 0) --hi;
        }
        if (++since_rebuild >= kRebuildEvery) rebuild();
        return {x, delta};
    }

    void refresh_up(int x) {
        const double old = up[static_cast<size_t>(x)];
        up[static_cast<size_t>(x)] = (p.N - xi[static_cast<size_t>(x)]) *
                                     (p.a * pp[static_cast<size_t>(x)] + bb * nsum[static_cast<size_t>(x)]) / denom;
        tot_up += up[static_cast<size_t>(x)] - old;
    }

    void bump(int y, double dpp) {
        nsum[static_cast<size_t>(y)] += dpp;
        refresh_up(y);
    }

    void after_extend() {
        if ((hi - lo + 1) + 2LL * p.M >= p.L) {
            if (seam) throw SeamError("occupied region wrapped the ring; enlarge L");
            full_ring = true;
        } else if (seam && (lo < p.M || hi > static_cast<long long>(p.L) - 1 - p.M)) {
            throw SeamError("occupied region reached the ring edge; enlarge L");
        }
    }

    // Recomputes every cache from the configuration alone and checks that the
    // incrementally maintained total has not drifted. up_rate() is the
    // authoritative formula; its value replaces the cached one.
    void rebuild() {
        long long fresh_pop = 0;
        for (int x = 0; x < p.L; ++x) fresh_pop += xi[static_cast<size_t>(x)];
        if (fresh_pop != pop) throw std::logic_error("engine: population count drift");
        for (int x = 0; x < p.L; ++x) {
            const double cx = xi[static_cast<size_t>(x)];
            pp[static_cast<size_t>(x)] = cx * (cx - 1.0);
        }
        double fresh_tot = 0.0;
        for (int x = 0; x < p.L; ++x) {
            double s = 0.0;
            for (int d = 1; d <= p.M; ++d)
                s += pp[static_cast<size_t>(wrap_patch(x - d, p.L))] +
                     pp[static_cast<size_t>(wrap_patch(x + d, p.L))];
            nsum[static_cast<size_t>(x)] = s;
            up[static_cast<size_t>(x)] = up_rate(xi, x, p);
            fresh_tot += up[static_cast<size_t>(x)];
        }
        if (initialized && std::fabs(fresh_tot - tot_up) > 1e-9 * std::max(1.0, fresh_tot))
            throw std::logic_error("engine: rate table drift beyond tolerance");
        tot_up = fresh_tot;
        initialized = true;
        since_rebuild = 0;
    }

    const ModelParams p;
    const double denom;
    const double bb;  // b / 2M
    MesoConfig xi;
    std::vector<double> pp;    // xi(xi-1) per patch
    std::vector<double> nsum;  // sum of pp over the 2M neighbours
    std::vector<double> up;
    double tot_up = 0.0;
    long long pop = 0;
    long long lo = 0, hi = -1;  // unwrapped occupied span, empty when hi < lo
    bool full_ring = false;
    bool seam = false;
    bool initialized = false;
    long long since_rebuild = 0;
};

}  // namespace

StepResult step(const MesoConfig& config, const ModelParams& params, Rng& rng) {
    params.validate();
    validate_meso(config, params);
    const int L = params.L;
    std::vector<double> dn(static_cast<size_t>(L)), bu(static_cast<size_t>(L));
    double tot = 0.0;
    for (int x = 0; x < L; ++x) {
        dn[static_cast<size_t>(x)] = down_rate(config, x);
        bu[static_cast<size_t>(x)] = up_rate(config, x, params);
        tot += dn[static_cast<size_t>(x)] + bu[static_cast<size_t>(x)];
    }
    if (tot <= 0.0) return {true, 0.0, -1, 0};
    StepResult res;
    do { res.wait = exponential(rng, tot); } while (!(res.wait > 0.0));
    const double target = uniform01(rng) * tot;
    double acc = 0.0;
    for (int x = 0; x < L; ++x) {
        if (dn[static_cast<size_t>(x)] > 0.0) {
            acc += dn[static_cast<size_t>(x)];
            res.patch = x;
            res.delta = -1;
            if (target < acc) return res;
        }
        if (bu[static_cast<size_t>(x)] > 0.0) {
            acc += bu[static_cast<size_t>(x)];
            res.patch = x;
            res.delta = +1;
            if (target < acc) return res;
        }
    }
    return res;  // rounding gap: last positive-rate event
}

Trajectory run(const MesoConfig& initial, const ModelParams& params, double horizon,
               uint64_t seed) {
    return run(initial, params, horizon, seed, RunOptions{});
}

Trajectory run(const MesoConfig& initial, const ModelParams& params, double horizon,
               uint64_t seed, const RunOptions& options, std::vector<MesoConfig>* probes) {
    params.validate();
    validate_meso(initial, params);
    if (!(horizon > 0.0)) throw std::invalid_argument("run: horizon must be > 0");
    const std::vector<double>& pt = options.probe_times;
    for (size_t i = 0; i < pt.size(); ++i) {
        if (!(pt[i] >= 0.0) || pt[i] > horizon)
            throw std::invalid_argument("run: probe time outside [0, horizon]");
        if (i > 0 && pt[i] < pt[i - 1])
            throw std::invalid_argument("run: probe times not ascending");
    }
    if (probes) probes->clear();

    Engine eng(initial, params, options.monitor_seam);
    Rng g(seed);
    Trajectory tr;
    tr.initial = initial;

    double t = 0.0;
    size_t pi = probes ? 0 : pt.size();
    long long count = 0;
    // probe times strictly before `tnext` see the current (pre-tnext) state
    const auto snap_until = [&](double tnext) {
        while (pi < pt.size() && pt[pi] < tnext) {
            probes->push_back(eng.state());
            ++pi;
        }
    };
    for (;;) {
        if (eng.absorbed()) {
            snap_until(horizon + 1.0);  // extinct state persists
            tr.terminal_time = t;
            tr.outcome = {OutcomeKind::extinct_at, t};
            return tr;
        }
        if (count == options.event_cap) {
            snap_until(t + 1e-12);
            tr.terminal_time = t;
            tr.outcome = {OutcomeKind::alive_at_horizon, t};
            throw RunawayError(std::move(tr));
        }
        double dt;
        do { dt = exponential(g, eng.total()); } while (!(dt > 0.0));
        if (t + dt > horizon) {
            snap_until(horizon + 1.0);  // no further event before the horizon
            tr.terminal_time = horizon;
            tr.outcome = {OutcomeKind::alive_at_horizon, horizon};
            return tr;
        }
        t += dt;
        snap_until(t);
        const double target = uniform01(g) * eng.total();
        const auto [x, delta] = eng.fire(target);
        ++count;
        if (options.record_events) tr.events.push_back({t, x, delta});
    }
}

MesoConfig single_full_patch(const ModelParams& params) {
    MesoConfig c(static_cast<size_t>(params.L), 0);
    c[static_cast<size_t>(params.L / 2)] = params.N;
    return c;
}

SurvivalEstimate estimate_survival(const ModelParams& params, double horizon,
                                   long long replicas, uint64_t seed, int threads,
                                   bool monitor_seam, std::vector<Outcome>* outcomes) {
    params.validate();
    if (replicas < 1) throw std::invalid_argument("estimate_survival: replicas must be >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("estimate_survival: horizon must be > 0");
    if (threads < 1) threads = 1;
    if (static_cast<long long>(threads) > replicas) threads = static_cast<int>(replicas);

    const MesoConfig init = single_full_patch(params);
    RunOptions opt;
    opt.record_events = false;
    opt.monitor_seam = monitor_seam;
    if (outcomes) outcomes->assign(static_cast<size_t>(replicas), Outcome{});

    std::vector<long long> counts(static_cast<size_t>(threads), 0);
    std::vector<std::exception_ptr> errs(static_cast<size_t>(threads));
    const auto work = [&](int ti) {
        try {
            const long long first = replicas * ti / threads;
            const long long past = replicas * (ti + 1) / threads;
            long long alive = 0;
            for (long long r = first; r < past; ++r) {
                Trajectory tr =
                    run(init, params, horizon, substream_seed(seed, static_cast<uint64_t>(r)), opt);
                if (tr.outcome.kind == OutcomeKind::alive_at_horizon) ++alive;
                if (outcomes) (*outcomes)[static_cast<size_t>(r)] = tr.outcome;
            }
            counts[static_cast<size_t>(ti)] = alive;
        } catch (...) {
            errs[static_cast<size_t>(ti)] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(threads));
        for (int ti = 0; ti < threads; ++ti) pool.emplace_back(work, ti);
        for (std::thread& th : pool) th.join();
    }
    for (const std::exception_ptr& e : errs)
        if (e) std::rethrow_exception(e);

    SurvivalEstimate est;
    est.params = params;
    est.replicas = replicas;
    est.horizon = horizon;
    for (long long c : counts) est.survived += c;
    est.point = static_cast<double>(est.survived) / static_cast<double>(replicas);
    est.ci_halfwidth =
        1.96 * std::sqrt(est.point * (1.0 - est.point) / static_cast<double>(replicas));
    est.seed = seed;
    return est;
}

std::vector<SweepEntry> range_sweep(ModelParams base, const std::vector<int>& m_values,
                                    double horizon, long long replicas, uint64_t seed,
                                    int threads) {
    std::vector<SweepEntry> out;
    out.reserve(m_values.size());
    for (size_t i = 0; i < m_values.size(); ++i) {
        ModelParams p = base;
        p.M = m_values[i];
        p.validate();
        SweepEntry e;
        e.estimate = estimate_survival(p, horizon, replicas, substream_seed(seed, i), threads,
                                       /*monitor_seam=*/true);
        e.bound = survival_upper_bound(p.a, p.b, p.N, p.M);
        out.push_back(e);
    }
    return out;
}

}  // namespace patchcp
