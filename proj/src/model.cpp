#include "patchcp/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace patchcp {

void ModelParams::validate() const {
    if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("a must be finite and >= 0");
    if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("b must be finite and >= 0");
    if (N < 2) throw std::invalid_argument("N must be >= 2");
    if (M < 1) throw std::invalid_argument("M must be >= 1");
    if (L < 2 * M + 1)
        throw std::invalid_argument("L must be >= 2M+1 (got L=" + std::to_string(L) +
                                    ", M=" + std::to_string(M) + ")");
}

int wrap_patch(int x, int L) {
    int r = x % L;
    return r < 0 ? r + L : r;
}

std::vector<int> neighbors(int x, const ModelParams& p) {
    std::vector<int> out;
    out.reserve(2 * p.M);
    for (int off = -p.M; off <= p.M; ++off) {
        if (off == 0) continue;
        out.push_back(wrap_patch(x + off, p.L));
    }
    return out;
}

void validate_meso(const MesoConfig& c, const ModelParams& p) {
    if (static_cast<int>(c.size()) != p.L) throw std::invalid_argument("config length != L");
    for (int v : c)
        if (v < 0 || v > p.N) throw std::invalid_argument("patch count outside [0, N]");
}

double up_rate(const MesoConfig& c, int x, const ModelParams& p) {
    const double denom = static_cast<double>(p.N) * (p.N - 1);
    const double cx = c[static_cast<size_t>(x)];
    double r = p.a / denom * cx * (cx - 1.0) * (p.N - cx);
    const double disp = p.b / (2.0 * p.M) / denom;
    for (int off = -p.M; off <= p.M; ++off) {
        if (off == 0) continue;
        const double cy = c[static_cast<size_t>(wrap_patch(x + off, p.L))];
        r += disp * cy * (cy - 1.0) * (p.N - cx);
    }
    return r;
}

double down_rate(const MesoConfig& c, int x) {
    return static_cast<double>(c[static_cast<size_t>(x)]);
}

double total_rate(const MesoConfig& c, const ModelParams& p) {
    double t = 0.0;
    for (int x = 0; x < p.L; ++x) t += up_rate(c, x, p) + down_rate(c, x);
    return t;
}

MesoConfig project(const MicroConfig& m) {
    MesoConfig c(static_cast<size_t>(m.L), 0);
    for (int x = 0; x < m.L; ++x) {
        int n = 0;
        for (int k = 0; k < m.N; ++k) n += m.occ[static_cast<size_t>(x) * m.N + k];
        c[static_cast<size_t>(x)] = n;
    }
    return c;
}

double micro_up_rate_into(const MicroConfig& m, int32_t loc, const ModelParams& p) {
    if (m.occupied(loc)) return 0.0;
    const int x = m.patch_of(loc);
    const double denom = static_cast<double>(p.N) * (p.N - 1);

    // ordered pairs (y, z), y != z, both in patch x
    double pairs_same = 0.0;
    for (int k1 = 0; k1 < p.N; ++k1) {
        if (!m.occupied(m.loc(x, k1))) continue;
        for (int k2 = 0; k2 < p.N; ++k2) {
            if (k2 == k1) continue;
            if (m.occupied(m.loc(x, k2))) pairs_same += 1.0;
        }
    }
    double r = p.a / denom * pairs_same;

    // ordered pairs inside one patch at distance <= M
    const double disp = p.b / (2.0 * p.M) / denom;
    for (int off = -p.M; off <= p.M; ++off) {
        if (off == 0) continue;
        const int y = wrap_patch(x + off, p.L);
        double pairs = 0.0;
        for (int k1 = 0; k1 < p.N; ++k1) {
            if (!m.occupied(m.loc(y, k1))) continue;
            for (int k2 = 0; k2 < p.N; ++k2) {
                if (k2 == k1) continue;
                if (m.occupied(m.loc(y, k2))) pairs += 1.0;
            }
        }
        r += disp * pairs;
    }
    return r;
}

double micro_total_rate(const MicroConfig& m, const ModelParams& p) {
    double t = 0.0;
    for (int32_t loc = 0; loc < m.size(); ++loc) {
        if (m.occupied(loc))
            t += 1.0;  // unit death rate per occupied location
        else
            t += micro_up_rate_into(m, loc, p);
    }
    return t;
}

}  // namespace patchcp
