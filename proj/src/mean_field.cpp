#include "patchcp/mean_field.hpp"

#include <cmath>
#include <stdexcept>

namespace patchcp {

double q_eval(double u, double a) {
    return a * u * u * (1.0 - u) - u;
}

std::optional<MeanFieldRoots> roots(double a) {
    if (!(a > 0.0)) throw std::domain_error("roots: a must be > 0");
    if (a < 4.0) return std::nullopt;
    const double disc = 0.25 - 1.0 / a;  // 0 at a = 4
    const double s = std::sqrt(disc < 0.0 ? 0.0 : disc);
    MeanFieldRoots r;
    r.c_minus = 0.5 - s;
    r.c_plus = 0.5 + s;
    r.degenerate = (a == 4.0);
    return r;
}

double inner_threshold(double a) {
    if (!(a > 4.0)) throw std::domain_error("inner_threshold: a must be > 4");
    const MeanFieldRoots r = *roots(a);
    const double v1 = 2.0 * a * a * a * std::pow(r.c_minus, 4);
    const double v2 = 2.0 * r.c_minus / std::pow(r.c_plus, 3);
    // the two algebraic forms must agree; a mismatch means a root bug
    if (std::fabs(v1 - v2) > 1e-10 * (1.0 + std::fabs(v1)))
        throw std::runtime_error("inner_threshold: form mismatch");
    return v1;
}

MeanFieldRun integrate(double u0, double a, double step, double horizon, int sample_every) {
    if (u0 < 0.0 || u0 > 1.0) throw std::invalid_argument("integrate: u0 outside [0,1]");
    if (!(step > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("integrate: bad step/horizon");
    if (sample_every < 1) sample_every = 1;

    const long nsteps = static_cast<long>(std::ceil(horizon / step));
    MeanFieldRun run;
    run.t.reserve(static_cast<size_t>(nsteps / sample_every) + 2);
    run.u.reserve(static_cast<size_t>(nsteps / sample_every) + 2);

    double u = u0;
    double t = 0.0;
    run.t.push_back(t);
    run.u.push_back(u);
    for (long i = 0; i < nsteps; ++i) {
        const double h = (i == nsteps - 1) ? horizon - t : step;
        const double k1 = q_eval(u, a);
        const double k2 = q_eval(u + 0.5 * h * k1, a);
        const double k3 = q_eval(u + 0.5 * h * k2, a);
        const double k4 = q_eval(u + h * k3, a);
        u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
        if (u < -1e-9 || u > 1.0 + 1e-9 || !std::isfinite(u))
            throw std::runtime_error("integrate: iterate left [0,1]; reduce the step");
        if ((i + 1) % sample_every == 0 || i == nsteps - 1) {
            run.t.push_back(t);
            run.u.push_back(u);
        }
    }
    run.u_final = u;

    if (u < 1e-3) {
        run.regime = Regime::extinct;
    } else if (a >= 4.0 && std::fabs(u - roots(a)->c_plus) < 1e-3) {
        run.regime = Regime::upper_equilibrium;
    } else {
        run.regime = Regime::undetermined;
    }
    return run;
}

}  // namespace patchcp
