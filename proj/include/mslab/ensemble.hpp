#pragma once

#include <random>

#include "mslab/grid.hpp"

namespace mslab {

/// Band-limited random field vanishing on the spatial boundary: a sum of the
/// first few Dirichlet sine modes with complex Gaussian coefficients and
/// smooth oscillatory time envelopes. Deterministic in the seed.
inline SpaceTimeComplexField makeBandLimitedField(const SpaceTimeGrid& g, std::uint64_t seed,
                                                  int maxMode = 4) {
    if (maxMode < 1) throw std::invalid_argument("ensemble: maxMode must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);

    struct Mode {
        int m1, m2;
        Complex coeff;
        double omega, phase;
    };
    std::vector<Mode> modes;
    if (g.dim == 1) {
        for (int m = 1; m <= maxMode; ++m)
            modes.push_back({m, 0, Complex{gauss(rng), gauss(rng)} / double(m), 0.7 * m, unif(rng)});
    } else {
        for (int m1 = 1; m1 <= maxMode; ++m1)
            for (int m2 = 1; m2 <= maxMode; ++m2)
                modes.push_back({m1, m2, Complex{gauss(rng), gauss(rng)} / double(m1 + m2),
                                 0.5 * (m1 + m2), unif(rng)});
    }

    SpaceTimeComplexField out(g);
    const double L0 = g.hi[0] - g.lo[0];
    const double L1 = g.dim == 2 ? g.hi[1] - g.lo[1] : 1.0;
    for (int k = 0; k < g.nt; ++k) {
        const double t = g.time(k);
        for (int n = 0; n < g.numNodes(); ++n) {
            const Point p = g.point(n);
            if (g.isBoundary(n)) continue;  // exact zero trace, not sin(m pi) roundoff
            Complex v{0.0, 0.0};
            for (const Mode& md : modes) {
                double sp = std::sin(md.m1 * M_PI * (p[0] - g.lo[0]) / L0);
                if (g.dim == 2) sp *= std::sin(md.m2 * M_PI * (p[1] - g.lo[1]) / L1);
                v += md.coeff * sp * std::polar(1.0, md.omega * t + md.phase);
            }
            out.at(n, k) = v;
        }
    }
    return out;
}

/// Spatial-only variant (slice of the above at t = 0 would couple modes;
/// this draws fresh coefficients).
inline ComplexField makeBandLimitedState(const SpaceTimeGrid& g, std::uint64_t seed,
                                         int maxMode = 4) {
    const SpaceTimeComplexField f = makeBandLimitedField(g, seed, maxMode);
    return f.slice(0);
}

}  // namespace mslab
