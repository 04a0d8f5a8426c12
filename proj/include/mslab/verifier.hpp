#pragma once

#include "mslab/weight.hpp"

namespace mslab {

/// L u = -i dt u - Delta u (main part of the evolution operator).
inline SpaceTimeComplexField applyL(const SpaceTimeGrid& g, const SpaceTimeComplexField& u) {
    requireSameShape(g, u, "applyL");
    const SpaceTimeComplexField ut = timeDerivative(g, u);
    SpaceTimeComplexField out(g);
    const Complex I{0.0, 1.0};
    for (int k = 0; k < g.nt; ++k) {
        const ComplexField lap = laplacian(g, u.slice(k));
        for (int n = 0; n < g.numNodes(); ++n) out.at(n, k) = -I * ut.at(n, k) - lap[n];
    }
    return out;
}

/// R1 w = -i dt w - Delta w - s^2 |grad alpha|^2 w. The final time slice is
/// defined as 0: the weight vanishes there and the coefficients blow up.
inline SpaceTimeComplexField applyR1(const SpaceTimeGrid& g, const SpaceTimeComplexField& w,
                                     const CarlemanWeight& wt, double s) {
    requireSameShape(g, w, "applyR1");
    const SpaceTimeComplexField dtw = timeDerivative(g, w);
    SpaceTimeComplexField out(g);
    const Complex I{0.0, 1.0};
    for (int k = 0; k + 1 < g.nt; ++k) {
        const double t = g.time(k);
        const ComplexField lap = laplacian(g, w.slice(k));
        for (int n = 0; n < g.numNodes(); ++n) {
            const Point ga = wt.gradAlpha(n, t);
            const double ga2 = ga[0] * ga[0] + ga[1] * ga[1];
            out.at(n, k) = -I * dtw.at(n, k) - lap[n] - s * s * ga2 * w.at(n, k);
        }
    }
    return out;
}

/// R2 w = 2 s grad alpha . grad w + s (Delta alpha) w; final slice 0 as above.
inline SpaceTimeComplexField applyR2(const SpaceTimeGrid& g, const SpaceTimeComplexField& w,
                                     const CarlemanWeight& wt, double s) {
    requireSameShape(g, w, "applyR2");
    SpaceTimeComplexField out(g);
    for (int k = 0; k + 1 < g.nt; ++k) {
        const double t = g.time(k);
        const ComplexVectorField gw = gradient(g, w.slice(k));
        for (int n = 0; n < g.numNodes(); ++n) {
            const Point ga = wt.gradAlpha(n, t);
            Complex adv{0.0, 0.0};
            for (int a = 0; a < g.dim; ++a) adv += ga[a] * gw.at(a, n);
            out.at(n, k) = 2.0 * s * adv + s * wt.lapAlpha(n, t) * w.at(n, k);
        }
    }
    return out;
}

/// Pointwise multiply by e^{s alpha}.
inline SpaceTimeComplexField conjugate(const SpaceTimeGrid& g, const SpaceTimeComplexField& u,
                                       const CarlemanWeight& wt, double s) {
    requireSameShape(g, u, "conjugate");
    SpaceTimeComplexField w(g);
    for (int k = 0; k < g.nt; ++k) {
        const double t = g.time(k);
        for (int n = 0; n < g.numNodes(); ++n) w.at(n, k) = u.at(n, k) * wt.expSAlpha(s, n, t);
    }
    return w;
}

/// Z(u0) = int_Omega e^{2 s alpha(x,0)} | conj(u0) grad beta . grad u0
///                                       - u0 grad beta . grad conj(u0) | dx.
inline double computeZ(const SpaceTimeGrid& g, const ComplexField& u0, const CarlemanWeight& wt,
                       double s) {
    requireSameShape(g, u0, "computeZ");
    const ComplexVectorField gu = gradient(g, u0);
    return integrateSpaceWith(g, [&](int n) {
        const Point gb = wt.gradBeta(n);
        Complex bdot{0.0, 0.0};
        for (int a = 0; a < g.dim; ++a) bdot += gb[a] * gu.at(a, n);
        const Complex cross = std::conj(u0[n]) * bdot - u0[n] * std::conj(bdot);
        const double wgt = clampedExp(2.0 * s * wt.alpha(n, 0.0));
        return wgt * std::abs(cross);
    });
}

struct CarlemanRow {
    double s = 0.0;
    double r1 = 0.0, r2 = 0.0, sGradU = 0.0, s3U = 0.0;  // left-hand terms
    double lu = 0.0, bnd = 0.0, sZ = 0.0;                // right-hand terms (C = 1)
    double lhs = 0.0, rhs = 0.0, cHat = 0.0;
    bool violation = false;  // rhs = 0 while lhs > 0
};

struct CarlemanReport {
    std::vector<CarlemanRow> rows;
    /// Index of the smallest s from which cHat is non-increasing; -1 if never.
    int stableFromIndex = -1;
};

namespace detail {
inline double weightedNormSq(const SpaceTimeGrid& g, const CarlemanWeight& wt, double s,
                             const SpaceTimeComplexField& f) {
    return integrateSpaceTimeWith(g, [&](int n, int k) {
        const double e = wt.expSAlpha(s, n, g.time(k));
        return e > 0.0 ? e * e * std::norm(f.at(n, k)) : 0.0;
    });
}

inline double plainNormSq(const SpaceTimeGrid& g, const SpaceTimeComplexField& f) {
    return integrateSpaceTimeWith(g, [&](int n, int k) { return std::norm(f.at(n, k)); });
}
}  // namespace detail

/// Evaluate all seven bracketed quantities of the global estimate for each s,
/// with C = 1 placeholders on the right-hand terms.
inline CarlemanReport verifyCarleman(const SpaceTimeGrid& g, const SpaceTimeComplexField& u,
                                     const CarlemanWeight& wt, const std::vector<double>& sGrid,
                                     const BoundarySubset& gamma0) {
    requireSameShape(g, u, "verifyCarleman");
    for (int k = 0; k < g.nt; ++k)
        for (int n : g.boundaryNodes())
            if (std::abs(u.at(n, k)) != 0.0)
                throw std::invalid_argument("verifyCarleman: u must vanish on the boundary");

    const SpaceTimeComplexField Lu = applyL(g, u);
    const BoundaryTimeField trace = neumannTrace(g, u, gamma0);
    const double bndSq = normL2SigmaT(g, gamma0, trace) * normL2SigmaT(g, gamma0, trace);

    // Per-slice |grad u|^2, reused across the s sweep.
    std::vector<double> gradSq(std::size_t(g.numSpaceTimeNodes()), 0.0);
    for (int k = 0; k < g.nt; ++k) {
        const ComplexVectorField gu = gradient(g, u.slice(k));
        for (int n = 0; n < g.numNodes(); ++n) {
            double acc = 0.0;
            for (int a = 0; a < g.dim; ++a) acc += std::norm(gu.at(a, n));
            gradSq[std::size_t(k) * g.numNodes() + n] = acc;
        }
    }

    CarlemanReport rep;
    for (double s : sGrid) {
        CarlemanRow row;
        row.s = s;
        const SpaceTimeComplexField w = conjugate(g, u, wt, s);
        row.r1 = detail::plainNormSq(g, applyR1(g, w, wt, s));
        row.r2 = detail::plainNormSq(g, applyR2(g, w, wt, s));
        row.sGradU = s * integrateSpaceTimeWith(g, [&](int n, int k) {
                         const double e = wt.expSAlpha(s, n, g.time(k));
                         return e > 0.0 ? e * e * gradSq[std::size_t(k) * g.numNodes() + n] : 0.0;
                     });
        row.s3U = s * s * s * detail::weightedNormSq(g, wt, s, u);
        row.lu = detail::weightedNormSq(g, wt, s, Lu);
        row.bnd = bndSq;
        row.sZ = s * computeZ(g, u.slice(0), wt, s);
        row.lhs = row.r1 + row.r2 + row.sGradU + row.s3U;
        row.rhs = row.lu + row.bnd + row.sZ;
        if (row.rhs > 0.0)
            row.cHat = row.lhs / row.rhs;
        else if (row.lhs > 0.0)
            row.violation = true;
        rep.rows.push_back(row);
    }
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        bool nonInc = true;
        for (std::size_t j = i; j + 1 < rep.rows.size(); ++j)
            if (rep.rows[j + 1].cHat > rep.rows[j].cHat) nonInc = false;
        if (nonInc) {
            rep.stableFromIndex = int(i);
            break;
        }
    }
    return rep;
}

struct InitialBoundResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double tol = 0.0;
    bool ok = false;
};

/// || e^{s alpha(.,0)} v(.,0) ||^2 <= s^{-3/2} (||R1 w||^2 + s^3 ||w||^2),
/// checked with constant exactly 1 plus discretization slack.
inline InitialBoundResult verifyInitialBound(const SpaceTimeGrid& g, const SpaceTimeComplexField& v,
                                             const CarlemanWeight& wt, double s) {
    requireSameShape(g, v, "verifyInitialBound");
    InitialBoundResult res;
    res.lhs = integrateSpaceWith(g, [&](int n) {
        const double e = wt.expSAlpha(s, n, 0.0);
        return e * e * std::norm(v.at(n, 0));
    });
    const SpaceTimeComplexField w = conjugate(g, v, wt, s);
    const double r1 = detail::plainNormSq(g, applyR1(g, w, wt, s));
    const double w2 = detail::plainNormSq(g, w);
    res.rhs = std::pow(s, -1.5) * (r1 + s * s * s * w2);
    const double h = g.h(0), tau = g.tau();
    res.tol = 10.0 * (h * h + tau * tau);
    res.ok = res.lhs <= res.rhs * (1.0 + res.tol);
    return res;
}

/// Residual of e^{s alpha} L(w e^{-s alpha}) = i s (dt alpha) w + R1 w + R2 w,
/// measured on the fixed sub-cylinder [0, tEnd * T]. A fixed window keeps the
/// integration domain identical across grid refinements, so the residual's
/// O(h^2 + tau^2) order is observable. The weight must keep |s alpha|
/// representable one slice past the window.
struct DecompositionResidual {
    double residual = 0.0;
    double scale = 0.0;
    int kend = 0;
};

inline DecompositionResidual decompositionResidual(const SpaceTimeGrid& g,
                                                   const SpaceTimeComplexField& w,
                                                   const CarlemanWeight& wt, double s,
                                                   double tEnd = 0.5, double maxExponent = 300.0) {
    requireSameShape(g, w, "decompositionResidual");
    if (tEnd <= 0.0 || tEnd >= 1.0)
        throw std::invalid_argument("decompositionResidual: tEnd must lie in (0,1)");
    const int kend = int(std::floor(tEnd * g.T / g.tau() + 1e-9));
    if (kend < 4 || kend + 1 >= g.nt)
        throw std::invalid_argument("decompositionResidual: window too short");
    for (int k = 0; k <= kend + 1; ++k) {
        double worst = 0.0;
        for (int n = 0; n < g.numNodes(); ++n)
            worst = std::max(worst, std::abs(s * wt.alpha(n, g.time(k))));
        if (worst >= maxExponent)
            throw std::invalid_argument("decompositionResidual: weight too steep for s");
    }

    // u = w e^{-s alpha} on [0, kend+1]; L u with one-sided time stencils at
    // the window ends.
    const int N = g.numNodes();
    auto uAt = [&](int n, int k) { return w.at(n, k) * std::exp(-s * wt.alpha(n, g.time(k))); };
    const Complex I{0.0, 1.0};
    const double tau = g.tau();

    const SpaceTimeComplexField r1 = applyR1(g, w, wt, s);
    const SpaceTimeComplexField r2 = applyR2(g, w, wt, s);

    double accRes = 0.0, accScale = 0.0;
    for (int k = 0; k <= kend; ++k) {
        const double t = g.time(k);
        const double wtT = (k == 0 || k == kend) ? 0.5 * tau : tau;
        ComplexField uk(g);
        for (int n = 0; n < N; ++n) uk[n] = uAt(n, k);
        const ComplexField lap = laplacian(g, uk);
        for (int n = 0; n < N; ++n) {
            if (g.isBoundary(n)) continue;
            Complex dtu;
            if (k == 0)
                dtu = (-3.0 * uAt(n, 0) + 4.0 * uAt(n, 1) - uAt(n, 2)) / (2.0 * tau);
            else if (k == kend)
                dtu = (3.0 * uAt(n, k) - 4.0 * uAt(n, k - 1) + uAt(n, k - 2)) / (2.0 * tau);
            else
                dtu = (uAt(n, k + 1) - uAt(n, k - 1)) / (2.0 * tau);
            const Complex Lu = -I * dtu - lap[n];
            const Complex lhs = Lu * wt.expSAlpha(s, n, t);
            const Complex rhs =
                I * s * wt.dtAlpha(n, t) * w.at(n, k) + r1.at(n, k) + r2.at(n, k);
            accRes += wtT * spaceWeight(g, n) * std::norm(lhs - rhs);
            accScale += wtT * spaceWeight(g, n) * std::norm(w.at(n, k));
        }
    }
    return {std::sqrt(accRes), std::sqrt(accScale), kend};
}

}  // namespace mslab
