#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "patchcp/bounds.hpp"
#include "patchcp/dual.hpp"
#include "patchcp/graphical.hpp"
#include "patchcp/io.hpp"
#include "patchcp/mean_field.hpp"
#include "patchcp/meso_sim.hpp"
#include "patchcp/model.hpp"
#include "patchcp/percolation.hpp"
#include "patchcp/rng.hpp"

namespace {

using namespace patchcp;

std::string fmt6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

template <class T>
T parse_value(const std::string& s);

template <>
double parse_value<double>(const std::string& s) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::exception();
        return v;
    } catch (...) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
}

template <>
long long parse_value<long long>(const std::string& s) {
    try {
        size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::exception();
        return v;
    } catch (...) {
        throw std::invalid_argument("not an integer: '" + s + "'");
    }
}

template <>
int parse_value<int>(const std::string& s) {
    const long long v = parse_value<long long>(s);
    if (v < INT32_MIN || v > INT32_MAX) throw std::invalid_argument("out of range: '" + s + "'");
    return static_cast<int>(v);
}

template <>
uint64_t parse_value<uint64_t>(const std::string& s) {
    try {
        size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::exception();
        return v;
    } catch (...) {
        throw std::invalid_argument("not a seed: '" + s + "'");
    }
}

template <>
std::string parse_value<std::string>(const std::string& s) {
    return s;
}

template <>
bool parse_value<bool>(const std::string& s) {
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw std::invalid_argument("not a boolean: '" + s + "'");
}

// Binds options to variables while remembering how to set each one from a
// config file. Command-line flags always win; config fills the rest; the
// remaining required gaps are an error.
class OptionSet {
  public:
    explicit OptionSet(CLI::App* cmd) : cmd_(cmd) {
        cmd->add_option("--config", config_path_,
                        "key = value file (a previous run's manifest works); flags win");
    }

    template <class T>
    CLI::Option* add(const std::string& name, T& var, const std::string& desc,
                     bool required = false) {
        CLI::Option* o = cmd_->add_option(name, var, desc);
        const std::string key = name.substr(2);
        setters_[key] = [&var](const std::string& s) { var = parse_value<T>(s); };
        if (required) required_.insert(key);
        return o;
    }

    CLI::Option* add_flag(const std::string& name, bool& var, const std::string& desc) {
        CLI::Option* o = cmd_->add_flag(name, var, desc);
        const std::string key = name.substr(2);
        setters_[key] = [&var](const std::string& s) { var = parse_value<bool>(s); };
        return o;
    }

    // Call once at the start of the handler.
    void merge() {
        for (const auto& [key, fn] : setters_) {
            (void)fn;
            if (cmd_->get_option("--" + key)->count() > 0) provided_.insert(key);
        }
        if (!config_path_.empty()) {
            for (const auto& [key, value] : read_config(config_path_)) {
                auto it = setters_.find(key);
                if (it == setters_.end()) {
                    throw std::invalid_argument("config: unknown key '" + key + "' for this command");
                }
                if (provided_.count(key)) continue;
                it->second(value);
                provided_.insert(key);
            }
        }
        for (const std::string& key : required_) {
            if (!provided_.count(key)) throw std::invalid_argument("missing required --" + key);
        }
    }

    bool provided(const std::string& key) const { return provided_.count(key) > 0; }

  private:
    CLI::App* cmd_;
    std::map<std::string, std::function<void(const std::string&)>> setters_;
    std::set<std::string> required_;
    std::set<std::string> provided_;
    std::string config_path_;
};

// CSV with the experiment parameters embedded as comments, so the file alone
// identifies the run; wall times and paths stay out to keep reruns
// byte-identical.
class CsvOut {
  public:
    CsvOut(const std::string& path, const std::string& command, const KvList& params) {
        f_.open(path, std::ios::binary);
        if (!f_) throw std::runtime_error("cannot open output file " + path);
        f_ << "# command = " << command << "\n";
        f_ << "# version = " << kVersion << "\n";
        for (const auto& [k, v] : params) f_ << "# " << k << " = " << v << "\n";
    }
    void line(const std::string& s) { f_ << s << "\n"; }
    void close(const std::string& path) {
        f_.close();
        if (!f_) throw std::runtime_error("failed writing " + path);
    }

  private:
    std::ofstream f_;
};

void finish_outputs(const std::string& out, const std::string& command, const KvList& params,
                    const std::string& started) {
    Manifest m;
    m.command = command;
    m.started = started;
    m.finished = iso_now();
    m.output = out;
    m.params = params;
    write_manifest(m, out + ".manifest");
}

int default_threads() {
    const char* env = std::getenv("PATCHCP_THREADS");
    if (!env || !*env) return 1;
    try {
        const int t = parse_value<int>(env);
        return t >= 1 ? t : 1;
    } catch (...) {
        return 1;
    }
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(parse_value<int>(item));
    }
    return out;
}

using Handler = std::function<int()>;

Handler setup_meanfield(CLI::App& app) {
    struct V {
        double a = 0, u0 = 0, dt = 1e-3, tmax = 200;
        long long every = 100;
        std::string out;
    };
    auto v = std::make_shared<V>();
    CLI::App* cmd = app.add_subcommand("meanfield", "integrate the density law and report the regime");
    auto opts = std::make_shared<OptionSet>(cmd);
    opts->add("--a", v->a, "pair birth rate", true);
    opts->add("--u0", v->u0, "initial density in [0, 1]", true);
    opts->add("--dt", v->dt, "integrator step");
    opts->add("--t-max", v->tmax, "integration horizon");
    opts->add("--sample-every", v->every, "record every k-th step");
    opts->add("--out", v->out, "trajectory CSV path");
    return [v, opts, cmd]() -> int {
        if (!cmd->parsed()) return -1;
        opts->merge();
        const std::string started = iso_now();
        const MeanFieldRun run = integrate(v->u0, v->a, v->dt, v->tmax, v->every);
        const char* names[] = {"extinct", "upper_equilibrium", "undetermined"};
        std::cout << "regime = " << names[static_cast<int>(run.regime)] << "\n";
        std::cout << "u_final = " << fmt6(run.u_final) << "\n";
        if (const auto r = roots(v->a)) {
            std::cout << "c_minus = " << fmt6(r->c_minus) << "\n";
            std::cout << "c_plus = " << fmt6(r->c_plus) << "\n";
        }
        if (!v->out.empty()) {
            KvList kv{{"a", fmt_g17(v->a)},
                      {"u0", fmt_g17(v->u0)},
                      {"dt", fmt_g17(v->dt)},
                      {"t-max", fmt_g17(v->tmax)},
                      {"sample-every", std::to_string(v->every)}};
            CsvOut csv(v->out, "meanfield", kv);
            csv.line("t,u");
            for (size_t i = 0; i < run.t.size(); ++i) {
                csv.line(fmt_g17(run.t[i]) + "," + fmt_g17(run.u[i]));
            }
            csv.close(v->out);
            finish_outputs(v->out, "meanfield", kv, started);
        }
        return 0;
    };
}

Handler setup_simulate(CLI::App& app) {
    struct V {
        double a = 0, b = 0, horizon = 0;
        int n = 0, m = 1, l = 0, threads = default_threads();
        long long replicas = 0;
        uint64_t seed = 1;
        bool seam = false;
        std::string out;
    };
    auto v = std::make_shared<V>();
    CLI::App* cmd = app.add_subcommand("simulate", "patch-level survival Monte Carlo");
    auto opts = std::make_shared<OptionSet>(cmd);
    opts->add("--a", v->a, "within-patch pair birth rate", true);
    opts->add("--b", v->b, "dispersal pair birth rate", true);
    opts->add("--n", v->n, "patch capacity", true);
    opts->add("--m", v->m, "dispersal range");
    opts->add("--l", v->l, "number of patches on the ring", true);
    opts->add("--horizon", v->horizon, "simulation horizon", true);
    opts->add("--replicas", v->replicas, "independent replicas", true);
    opts->add("--seed", v->seed, "root seed");
    opts->add("--threads", v->threads, "worker threads (PATCHCP_THREADS sets the default)");
    opts->add_flag("--monitor-seam", v->seam, "fail if the occupied region reaches the ring edge");
    opts->add("--out", v->out, "per-replica CSV path");
    return [v, opts, cmd]() -> int {
        if (!cmd->parsed()) return -1;
        opts->merge();
        const std::string started = iso_now();
        ModelParams p{v->a, v->b, v->n, v->m, v->l};
        std::vector<Outcome> outcomes;
        const SurvivalEstimate est =
            estimate_survival(p, v->horizon, v->replicas, v->seed, v->threads, v->seam,
                              v->out.empty() ? nullptr : &outcomes);
        std::cout << "survived = " << est.survived << "/" << est.replicas << "\n";
        std::cout << "survival = " << fmt6(est.point) << "\n";
        std::cout << "ci_halfwidth = " << fmt6(est.ci_halfwidth) << "\n";
        if (!v->out.empty()) {
            KvList kv{{"a", fmt_g17(v->a)},
                      {"b", fmt_g17(v->b)},
                      {"n", std::to_string(v->n)},
                      {"m", std::to_string(v->m)},
                      {"l", std::to_string(v->l)},
                      {"horizon", fmt_g17(v->horizon)},
                      {"replicas", std::to_string(v->replicas)},
                      {"seed", std::to_string(v->seed)},
                      {"monitor-seam", v->seam ? "1" : "0"}};
            CsvOut csv(v->out, "simulate", kv);
            csv.line("replica,survived,time");
            for (long long i = 0; i < est.replicas; ++i) {
                const Outcome& oc = outcomes[static_cast<size_t>(i)];
                const bool alive = oc.kind == OutcomeKind::alive_at_horizon;
                csv.line(std::to_string(i) + "," + (alive ? "1" : "0") + "," + fmt_g17(oc.time));
            }
            csv.close(v->out);
            finish_outputs(v->out, "simulate", kv, started);
        }
        return 0;
    };
}

Handler setup_sweep(CLI::App& app) {
    struct V {
        double a = 0, b = 0, horizon = 0;
        int n = 0, l = 0, threads = default_threads();
        long long replicas = 0;
        uint64_t seed = 1;
        std::string mlist, out;
    };
    auto v = std::make_shared<V>();
    CLI::App* cmd = app.add_subcommand("sweep", "survival across dispersal ranges, with the analytic bound");
    auto opts = std::make_shared<OptionSet>(cmd);
    opts->add("--a", v->a, "within-patch pair birth rate", true);
    opts->add("--b", v->b, "dispersal pair birth rate", true);
    opts->add("--n", v->n, "patch capacity", true);
    opts->add("--l", v->l, "number of patches on the ring", true);
    opts->add("--horizon", v->horizon, "simulation horizon", true);
    opts->add("--replicas", v->replicas, "independent replicas per range", true);
    opts->add("--seed", v->seed, "root seed");
    opts->add("--threads", v->threads, "worker threads (PATCHCP_THREADS sets the default)");
    opts->add("--m-list", v->mlist, "comma-separated dispersal ranges", true);
    opts->add("--out", v->out, "per-range CSV path");
    return [v, opts, cmd]() -> int {
        if (!cmd->parsed()) return -1;
        opts->merge();
        const std::string started = iso_now();
        const std::vector<int> ms = parse_int_list(v->mlist);
        if (ms.empty()) throw std::invalid_argument("--m-list must name at least one range");
        ModelParams base{v->a, v->b, v->n, 1, v->l};
        const std::vector<SweepEntry> entries =
            range_sweep(base, ms, v->horizon, v->replicas, v->seed, v->threads);
        for (size_t i = 0; i < entries.size(); ++i) {
            const SweepEntry& e = entries[i];
            std::cout << "m = " << ms[i] << ": survival = " << fmt6(e.estimate.point)
                      << " +- " << fmt6(e.estimate.ci_halfwidth)
                      << ", bound = " << fmt6(e.bound.value) << "\n";
        }
        if (!v->out.empty()) {
            KvList kv{{"a", fmt_g17(v->a)},
                      {"b", fmt_g17(v->b)},
                      {"n", std::to_string(v->n)},
                      {"l", std::to_string(v->l)},
                      {"horizon", fmt_g17(v->horizon)},
                      {"replicas", std::to_string(v->replicas)},
                      {"seed", std::to_string(v->seed)},
                      {"m-list", v->mlist}};
            CsvOut csv(v->out, "sweep", kv);
            csv.line("m,replicas,survived,survival,ci_halfwidth,bound_raw,bound,bound_clamped");
            for (size_t i = 0; i < entries.size(); ++i) {
                const SweepEntry& e = entries[i];
                csv.line(std::to_string(ms[i]) + "," + std::to_string(e.estimate.replicas) + "," +
                         std::to_string(e.estimate.survived) + "," + fmt_g17(e.estimate.point) +
                         "," + fmt_g17(e.estimate.ci_halfwidth) + "," + fmt_g17(e.bound.raw) +
                         "," + fmt_g17(e.bound.value) + "," + (e.bound.clamped ? "1" : "0"));
            }
            csv.close(v->out);
            finish_outputs(v->out, "sweep", kv, started);
        }
        return 0;
    };
}

Handler setup_dual(CLI::App& app) {
    struct V {
        std::string mode;
        double a = 0, b = 0, t = 0;
        int l = 0, n = 0, m = 1;
        long long replicas = 0, family_cap = 1000000;
        uint64_t seed = 1;
        bool check = false;
        std::string out;
    };
    auto v = std::make_shared<V>();
    CLI::App* cmd = app.add_subcommand("dual", "backward family statistics (zeta or full lattice mode)");
    auto opts = std::make_shared<OptionSet>(cmd);
    opts->add("--mode", v->mode, "zeta | full", true);
    opts->add("--a", v->a, "within-patch pair birth rate", true);
    opts->add("--b", v->b, "dispersal pair birth rate", true);
    opts->add("--t", v->t, "window length / dual horizon", true);
    opts->add("--replicas", v->replicas, "independent replicas", true);
    opts->add("--seed", v->seed, "root seed");
    opts->add("--family-cap", v->family_cap, "explosion cap on live sets");
    opts->add("--l", v->l, "patches on the ring (full mode)");
    opts->add("--n", v->n, "patch capacity (full mode)");
    opts->add("--m", v->m, "dispersal range (full mode)");
    opts->add_flag("--check-duality", v->check, "verify forward/backward agreement per replica (full mode)");
    opts->add("--out", v->out, "per-replica CSV path");
    return [v, opts, cmd]() -> int {
        if (!cmd->parsed()) return -1;
        opts->merge();
        const std::string started = iso_now();
        if (v->replicas < 1) throw std::invalid_argument("--replicas must be >= 1");

        if (v->mode == "zeta") {
            long long extinct = 0, exploded = 0;
            struct Row {
                ZetaRun z;
                bool exploded = false;
            };
            std::vector<Row> rows;
            if (!v->out.empty()) rows.reserve(static_cast<size_t>(v->replicas));
            for (long long r = 0; r < v->replicas; ++r) {
                Row row;
                try {
                    row.z = zeta_run(v->a, v->b, v->t, substream_seed(v->seed, static_cast<uint64_t>(r)),
                                     v->family_cap);
                } catch (const ExplosionError&) {
                    row.exploded = true;  // ran out of room, definitely not extinct
                    ++exploded;
                }
                if (row.z.extinct) ++extinct;
                if (!v->out.empty()) rows.push_back(row);
            }
            const double freq = static_cast<double>(extinct) / static_cast<double>(v->replicas);
            std::cout << "extinct = " << extinct << "/" << v->replicas << "\n";
            std::cout << "extinction_frequency = " << fmt6(freq) << "\n";
            std::cout << "exploded = " << exploded << "\n";
            std::cout << "rho_fixed_points =";
            for (double r : rho_fixed_points(v->a, v->b)) std::cout << " " << fmt6(r);
            std::cout << "\n";
            if (!v->out.empty()) {
                KvList kv{{"mode", "zeta"},
                          {"a", fmt_g17(v->a)},
                          {"b", fmt_g17(v->b)},
                          {"t", fmt_g17(v->t)},
                          {"replicas", std::to_string(v->replicas)},
                          {"seed", std::to_string(v->seed)},
                          {"family-cap", std::to_string(v->family_cap)}};
                CsvOut csv(v->out, "dual", kv);
                csv.line("replica,extinct,extinct_at,first_event_birth,births,deaths,max_family,exploded");
                for (size_t i = 0; i < rows.size(); ++i) {
                    const Row& row = rows[i];
                    csv.line(std::to_string(i) + "," + (row.z.extinct ? "1" : "0") + "," +
                             fmt_g17(row.z.extinct_at) + "," + (row.z.first_event_birth ? "1" : "0") +
                             "," + std::to_string(row.z.births) + "," + std::to_string(row.z.deaths) +
                             "," + std::to_string(row.z.max_family) + "," +
                             (row.exploded ? "1" : "0"));
                }
                csv.close(v->out);
                finish_outputs(v->out, "dual", kv, started);
            }
            return 0;
        }

        if (v->mode != "full") throw std::invalid_argument("--mode must be zeta or full");
        if (!opts->provided("l") || !opts->provided("n")) {
            throw std::invalid_argument("full mode needs --l and --n");
        }
        ModelParams p{v->a, v->b, v->n, v->m, v->l};
        p.validate();
        const int nsites = p.L * p.N;
        long long checks_passed = 0, with_collision = 0, extinct = 0;
        struct Row {
            DualRun d;
            int ok = -1;
        };
        std::vector<Row> rows;
        if (!v->out.empty()) rows.reserve(static_cast<size_t>(v->replicas));
        for (long long r = 0; r < v->replicas; ++r) {
            const GraphicalRep rep =
                build_rep(p, v->t, substream_seed(v->seed, 2 * static_cast<uint64_t>(r)));
            Rng aux(substream_seed(v->seed, 2 * static_cast<uint64_t>(r) + 1));
            MicroConfig init(p.L, p.N);
            for (int i = 0; i < nsites; ++i) init.set(i, uniform01(aux) < 0.5);
            const int32_t w = static_cast<int32_t>(uniform_int(aux, nsites));
            Row row;
            row.d = dual_run(rep, w, v->t, v->family_cap);
            if (row.d.extinct) ++extinct;
            if (row.d.collisions > 0) ++with_collision;
            if (v->check) {
                row.ok = duality_check(rep, init, w, v->t) ? 1 : 0;
                if (row.ok == 1) ++checks_passed;
            }
            if (!v->out.empty()) rows.push_back(row);
        }
        if (v->check) {
            std::cout << checks_passed << "/" << v->replicas << " duality checks passed\n";
        }
        std::cout << "dual_extinct = " << extinct << "/" << v->replicas << "\n";
        std::cout << "replicas_with_collision = " << with_collision << "\n";
        std::cout << "collision_bound = " << fmt6(dual_collision_bound(v->a, v->b, v->n, v->t))
                  << "\n";
        if (!v->out.empty()) {
            KvList kv{{"mode", "full"},
                      {"a", fmt_g17(v->a)},
                      {"b", fmt_g17(v->b)},
                      {"t", fmt_g17(v->t)},
                      {"l", std::to_string(v->l)},
                      {"n", std::to_string(v->n)},
                      {"m", std::to_string(v->m)},
                      {"replicas", std::to_string(v->replicas)},
                      {"seed", std::to_string(v->seed)},
                      {"family-cap", std::to_string(v->family_cap)},
                      {"check-duality", v->check ? "1" : "0"}};
            CsvOut csv(v->out, "dual", kv);
            csv.line("replica,duality_ok,extinct,extinct_at,births_applied,collisions,first_collision_at,max_family");
            for (size_t i = 0; i < rows.size(); ++i) {
                const Row& row = rows[i];
                csv.line(std::to_string(i) + "," + std::to_string(row.ok) + "," +
                         (row.d.extinct ? "1" : "0") + "," + fmt_g17(row.d.extinct_at) + "," +
                         std::to_string(row.d.births_applied) + "," +
                         std::to_string(row.d.collisions) + "," +
                         fmt_g17(row.d.first_collision_at) + "," +
                         std::to_string(row.d.max_family));
            }
            csv.close(v->out);
            finish_outputs(v->out, "dual", kv, started);
        }
        return 0;
    };
}

Handler setup_bounds(CLI::App& app) {
    struct V {
        double a = 0, b = 0;
        int n = 0;
        long long m = 1;
        std::string out;
    };
    auto v = std::make_shared<V>();
    CLI::App* cmd = app.add_subcommand("bounds", "closed-form survival bound and its ingredients");
    auto opts = std::make_shared<OptionSet>(cmd);
    opts->add("--a", v->a, "within-patch pair birth rate", true);
    opts->add("--b", v->b, "dispersal pair birth rate", true);
    opts->add("--n", v->n, "patch capacity", true);
    opts->add("--m", v->m, "dispersal range", true);
    opts->add("--out", v->out, "single-row CSV path");
    return [v, opts, cmd]() -> int {
        if (!cmd->parsed()) return -1;
        opts->merge();
        const std::string started = iso_now();
        const double emi = mean_emigrants_bound(v->a, v->b, v->n);
        const CollisionBound col = collision_prob_bound(v->m);
        const SurvivalBound sb = survival_upper_bound(v->a, v->b, v->n, v->m);
        std::cout << "expected_emigrants_bound = " << fmt6(emi) << "\n";
        std::cout << "collision_cap = " << fmt6(col.cap) << "\n";
        std::cout << "survival_bound_raw = " << fmt6(sb.raw) << "\n";
        std::cout << "survival_bound = " << fmt6(sb.value) << (sb.clamped ? " (clamped)" : "")
                  << "\n";
        if (!v->out.empty()) {
            KvList kv{{"a", fmt_g17(v->a)},
                      {"b", fmt_g17(v->b)},
                      {"n", std::to_string(v->n)},
                      {"m", std::to_string(v->m)}};
            CsvOut csv(v->out, "bounds", kv);
            csv.line("emigrants_bound,collision_cap,collision_exact,bound_raw,bound,clamped");
            csv.line(fmt_g17(emi) + "," + fmt_g17(col.cap) + "," + fmt_g17(col.exact_product) +
                     "," + fmt_g17(sb.raw) + "," + fmt_g17(sb.value) + "," +
                     (sb.clamped ? "1" : "0"));
            csv.close(v->out);
            finish_outputs(v->out, "bounds", kv, started);
        }
        return 0;
    };
}

Handler setup_drift_scan(CLI::App& app) {
    struct V {
        std::string lemma;
        double a = 0, b = 0;
        int n = 0;
        std::string out;
    };
    auto v = std::make_shared<V>();
    CLI::App* cmd = app.add_subcommand("drift-scan", "exhaustive drift inequality check over a region");
    auto opts = std::make_shared<OptionSet>(cmd);
    opts->add("--lemma", v->lemma,
              "outer-sum | outer-difference | outer-up | inner-1 | inner-drift-1 | inner-drift-2",
              true);
    opts->add("--a", v->a, "within-patch pair birth rate (inner lemmas)");
    opts->add("--b", v->b, "dispersal pair birth rate (outer lemmas, inner-drift-1)");
    opts->add("--n", v->n, "patch capacity", true);
    opts->add("--out", v->out, "single-row CSV path");
    return [v, opts, cmd]() -> int {
        if (!cmd->parsed()) return -1;
        opts->merge();
        const std::string started = iso_now();
        static const std::map<std::string, Lemma> lemmas = {
            {"outer-sum", Lemma::outer_sum},
            {"outer-difference", Lemma::outer_difference},
            {"outer-up", Lemma::outer_up},
            {"inner-1", Lemma::inner_1},
            {"inner-drift-1", Lemma::inner_drift_1},
            {"inner-drift-2", Lemma::inner_drift_2},
        };
        const auto it = lemmas.find(v->lemma);
        if (it == lemmas.end()) throw std::invalid_argument("unknown lemma '" + v->lemma + "'");
        const bool needs_a = it->second == Lemma::inner_1 || it->second == Lemma::inner_drift_1 ||
                             it->second == Lemma::inner_drift_2;
        const bool needs_b = !needs_a || it->second == Lemma::inner_drift_1;
        if (needs_a && !opts->provided("a")) throw std::invalid_argument("this lemma needs --a");
        if (needs_b && !opts->provided("b")) throw std::invalid_argument("this lemma needs --b");
        const ScanResult sr = scan_lemma(it->second, v->a, v->b, v->n);
        std::cout << (sr.pass ? "PASS" : "FAIL") << " margin=" << fmt_g17(sr.margin)
                  << " at i=" << sr.arg_i << " j=" << sr.arg_j << " (target " << fmt6(sr.target)
                  << ", " << sr.states << " states)\n";
        if (!v->out.empty()) {
            KvList kv{{"lemma", v->lemma},
                      {"a", fmt_g17(v->a)},
                      {"b", fmt_g17(v->b)},
                      {"n", std::to_string(v->n)}};
            CsvOut csv(v->out, "drift-scan", kv);
            csv.line("lemma,a,b,n,target,margin,leading_margin,arg_i,arg_j,states,pass");
            csv.line(v->lemma + "," + fmt_g17(sr.a) + "," + fmt_g17(sr.b) + "," +
                     std::to_string(sr.N) + "," + fmt_g17(sr.target) + "," + fmt_g17(sr.margin) +
                     "," + fmt_g17(sr.leading_margin) + "," + std::to_string(sr.arg_i) + "," +
                     std::to_string(sr.arg_j) + "," + std::to_string(sr.states) + "," +
                     (sr.pass ? "1" : "0"));
            csv.close(v->out);
            finish_outputs(v->out, "drift-scan", kv, started);
        }
        return sr.pass ? 0 : 4;
    };
}

Handler setup_percolation(CLI::App& app) {
    struct V {
        double q = 0;
        int levels = 100, width_cap = -1;
        long long replicas = 0;
        uint64_t seed = 1;
        std::string out;
    };
    auto v = std::make_shared<V>();
    CLI::App* cmd = app.add_subcommand("percolation", "oriented site percolation survival Monte Carlo");
    auto opts = std::make_shared<OptionSet>(cmd);
    opts->add("--q", v->q, "closure probability per site", true);
    opts->add("--levels", v->levels, "generations to evolve");
    opts->add("--replicas", v->replicas, "independent replicas", true);
    opts->add("--seed", v->seed, "root seed");
    opts->add("--width-cap", v->width_cap, "max |z| tracked (default: levels + 1)");
    opts->add("--out", v->out, "per-replica CSV path");
    return [v, opts, cmd]() -> int {
        if (!cmd->parsed()) return -1;
        opts->merge();
        const std::string started = iso_now();
        std::vector<char> flags;
        const PercSurvival ps =
            estimate_perc_survival(v->q, v->levels, v->replicas, v->seed, v->width_cap,
                                   v->out.empty() ? nullptr : &flags);
        std::cout << "survived = " << ps.survived << "/" << ps.replicas << "\n";
        std::cout << "survival = " << fmt6(ps.point) << "\n";
        std::cout << "ci_halfwidth = " << fmt6(ps.ci_halfwidth) << "\n";
        if (ps.truncated_replicas > 0) {
            std::cout << "truncated_replicas = " << ps.truncated_replicas << "\n";
        }
        if (!v->out.empty()) {
            KvList kv{{"q", fmt_g17(v->q)},
                      {"levels", std::to_string(v->levels)},
                      {"replicas", std::to_string(v->replicas)},
                      {"seed", std::to_string(v->seed)},
                      {"width-cap", std::to_string(v->width_cap)}};
            CsvOut csv(v->out, "percolation", kv);
            csv.line("replica,survived");
            for (size_t i = 0; i < flags.size(); ++i) {
                csv.line(std::to_string(i) + "," + (flags[i] ? "1" : "0"));
            }
            csv.close(v->out);
            finish_outputs(v->out, "percolation", kv, started);
        }
        return 0;
    };
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic and analytic toolkit for a two-parent contact process on a patch ring"};
    app.require_subcommand(1);

    std::vector<Handler> handlers;
    handlers.push_back(setup_meanfield(app));
    handlers.push_back(setup_simulate(app));
    handlers.push_back(setup_sweep(app));
    handlers.push_back(setup_dual(app));
    handlers.push_back(setup_bounds(app));
    handlers.push_back(setup_drift_scan(app));
    handlers.push_back(setup_percolation(app));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        for (const Handler& h : handlers) {
            const int rc = h();
            if (rc >= 0) return rc;
        }
        std::fprintf(stderr, "error: no subcommand dispatched\n");
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
