#pragma once

#include <optional>
#include <vector>

namespace patchcp {

// Right-hand side of the density ODE u' = a u^2 (1-u) - u.
double q_eval(double u, double a);

// Nontrivial equilibria c- <= c+ of the density ODE. They satisfy
// c- + c+ = 1 and c- * c+ = 1/a. Exist only for a >= 4; at a = 4 the two
// collapse into the double root 1/2 (flagged degenerate).
struct MeanFieldRoots {
    double c_minus = 0.0;
    double c_plus = 0.0;
    bool degenerate = false;  // a == 4: double root at 1/2
};

// nullopt when 0 < a < 4; throws std::domain_error when a <= 0.
std::optional<MeanFieldRoots> roots(double a);

// Dispersal threshold 2 a^3 c-^4 (equivalently 2 c- / c+^3) appearing in the
// survival condition for a > 4. Throws std::domain_error for a <= 4.
double inner_threshold(double a);

enum class Regime { extinct, upper_equilibrium, undetermined };

struct MeanFieldRun {
    std::vector<double> t;  // sample times (every sample_every steps, plus the endpoint)
    std::vector<double> u;
    double u_final = 0.0;
    Regime regime = Regime::undetermined;
};

// Fixed-step RK4 integration of the density ODE from u0 in [0,1].
// Classification at the horizon: u < 1e-3 -> extinct; |u - c+| < 1e-3 (when
// roots exist) -> upper_equilibrium; otherwise undetermined. Throws
// std::runtime_error if the iterate leaves [-1e-9, 1+1e-9] (numerical
// instability; only reachable with an oversized step).
MeanFieldRun integrate(double u0, double a, double step = 1e-3, double horizon = 200.0,
                       int sample_every = 100);

}  // namespace patchcp
