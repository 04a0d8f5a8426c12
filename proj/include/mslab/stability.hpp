#pragma once

#include <algorithm>

#include "mslab/solver.hpp"
#include "mslab/verifier.hpp"

namespace mslab {

/// Smooth bump with chi = grad chi = 0 on the boundary; peaks at 1 in the
/// center of the box. chi(x) = prod_a 16 s_a^2 (1-s_a)^2.
struct Cutoff {
    static double axisValue(double s) { return 16.0 * s * s * (1.0 - s) * (1.0 - s); }
    static double axisDeriv(double s) { return 32.0 * s * (1.0 - s) * (1.0 - 2.0 * s); }

    static double value(const SpaceTimeGrid& g, Point p) {
        double v = 1.0;
        for (int a = 0; a < g.dim; ++a) v *= axisValue((p[a] - g.lo[a]) / (g.hi[a] - g.lo[a]));
        return v;
    }

    static Point grad(const SpaceTimeGrid& g, Point p) {
        Point out{0.0, 0.0};
        for (int a = 0; a < g.dim; ++a) {
            double v = 1.0;
            for (int b = 0; b < g.dim; ++b) {
                const double s = (p[b] - g.lo[b]) / (g.hi[b] - g.lo[b]);
                v *= (b == a) ? axisDeriv(s) / (g.hi[b] - g.lo[b]) : axisValue(s);
            }
            out[a] = v;
        }
        return out;
    }
};

inline double japaneseBracket(Point p) { return std::sqrt(1.0 + p[0] * p[0] + p[1] * p[1]); }

enum class StabilityCase : int { Case1 = 1, Case2 = 2, Case3 = 3, Case3DivFree = 4 };

struct PotentialPair {
    StabilityCase caseId = StabilityCase::Case1;
    ElectromagneticPotential p1, p2;
    /// Largest pointwise logarithmic-gradient ratio seen by the validators.
    double effectiveM = 0.0;
};

namespace detail {

/// max over nodes of num/den, skipping nodes where den is below a floor tied
/// to the field scale (there both sides vanish with the cutoff).
inline double ratioSweep(const std::vector<double>& num, const std::vector<double>& den,
                         const char* condition) {
    double scale = 0.0;
    for (double d : den) scale = std::max(scale, d);
    if (scale == 0.0) throw std::invalid_argument(std::string(condition) + ": zero difference (degenerate pair)");
    const double floor = 1e-9 * scale;
    double m = 0.0;
    for (std::size_t n = 0; n < num.size(); ++n) {
        if (den[n] <= floor) {
            if (num[n] > 1e-9 * scale)
                throw std::invalid_argument(std::string(condition) + ": unbounded ratio at node " +
                                            std::to_string(n));
            continue;
        }
        m = std::max(m, num[n] / den[n]);
    }
    return m;
}

}  // namespace detail

/// Case 1: A = 0, rho_j = a + delta_j <x>, boundary agreement enforced by a
/// cutoff on the difference. Validates |Im(conj(rho) grad rho)| <= M |rho|^2.
inline PotentialPair makeCase1Pair(const SpaceTimeGrid& g, Complex a, Complex delta1,
                                   Complex delta2) {
    if (delta1 == delta2) throw std::invalid_argument("case1: delta1 == delta2 (degenerate pair)");
    const int N = g.numNodes();
    ComplexField rho1(g), rho2(g);
    for (int n = 0; n < N; ++n) {
        const Point p = g.point(n);
        rho1[n] = a + delta1 * japaneseBracket(p);
        rho2[n] = rho1[n] + (delta2 - delta1) * japaneseBracket(p) * Cutoff::value(g, p);
    }
    PotentialPair pair;
    pair.caseId = StabilityCase::Case1;
    pair.p1 = ElectromagneticPotential::make(g, std::move(rho1), RealVectorField(g));
    pair.p2 = ElectromagneticPotential::make(g, std::move(rho2), RealVectorField(g));

    // (c-el) re-verified after the cutoff.
    ComplexField diff(g);
    for (int n = 0; n < N; ++n) diff[n] = pair.p2.rho[n] - pair.p1.rho[n];
    const ComplexVectorField gd = gradient(g, diff);
    std::vector<double> num(static_cast<std::size_t>(N)), den(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
        Complex dot{0.0, 0.0};
        double im2 = 0.0;
        for (int ax = 0; ax < g.dim; ++ax) {
            const Complex t = std::conj(diff[n]) * gd.at(ax, n);
            im2 += t.imag() * t.imag();
        }
        (void)dot;
        num[n] = std::sqrt(im2);
        den[n] = std::norm(diff[n]);
    }
    pair.effectiveM = detail::ratioSweep(num, den, "(c-el)");
    requireBoundaryAgreement(g, pair.p1, pair.p2);
    return pair;
}

/// Case 2 (2D): simultaneous rho and A perturbation with <x>-type profiles
/// under the cutoff; validates the three logarithmic-gradient conditions.
inline PotentialPair makeCase2Pair(const SpaceTimeGrid& g, double delta) {
    if (g.dim != 2) throw std::invalid_argument("case2: needs a 2D grid");
    if (delta == 0.0) throw std::invalid_argument("case2: delta = 0 (degenerate pair)");
    const int N = g.numNodes();
    ComplexField rho1(g), rho2(g);
    RealVectorField A1(g), A2(g);
    for (int n = 0; n < N; ++n) {
        const Point p = g.point(n);
        const double br = japaneseBracket(p);
        const double chi = Cutoff::value(g, p);
        rho1[n] = Complex{0.4, 0.15} * br;
        rho2[n] = rho1[n] + delta * Complex{1.0, 0.3} * br * chi;
        A1.at(0, n) = 0.25 * br;
        A1.at(1, n) = 0.10 * br;
        A2.at(0, n) = A1.at(0, n) + delta * br * chi;
        A2.at(1, n) = A1.at(1, n) + 0.4 * delta * br * chi;
    }
    PotentialPair pair;
    pair.caseId = StabilityCase::Case2;
    pair.p1 = ElectromagneticPotential::make(g, std::move(rho1), A1);
    pair.p2 = ElectromagneticPotential::make(g, std::move(rho2), A2);

    ComplexField rhoDiff(g);
    RealVectorField Adiff(g);
    for (int n = 0; n < N; ++n) {
        rhoDiff[n] = pair.p2.rho[n] - pair.p1.rho[n];
        for (int ax = 0; ax < g.dim; ++ax)
            Adiff.at(ax, n) = pair.p2.A.at(ax, n) - pair.p1.A.at(ax, n);
    }
    // (h-em-a): |grad rho| <= M |rho|. Interior nodes only: on the boundary
    // both sides vanish with the cutoff, but the one-sided stencil sees
    // interior values and would report a spurious unbounded ratio.
    const ComplexVectorField grho = gradient(g, rhoDiff);
    std::vector<double> num(static_cast<std::size_t>(N)), den(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
        if (g.isBoundary(n)) continue;
        double g2 = 0.0;
        for (int ax = 0; ax < g.dim; ++ax) g2 += std::norm(grho.at(ax, n));
        num[n] = std::sqrt(g2);
        den[n] = std::abs(rhoDiff[n]);
    }
    double M = detail::ratioSweep(num, den, "(h-em-a)");
    // (h-em-b): max_i sum_j |d_i A_j| <= M |A|.
    std::vector<RealVectorField> JA;  // JA[j] = grad of component j
    for (int j = 0; j < g.dim; ++j) {
        std::vector<double> cj(static_cast<std::size_t>(N));
        for (int n = 0; n < N; ++n) cj[n] = Adiff.at(j, n);
        JA.push_back(gradient(g, cj));
    }
    std::fill(num.begin(), num.end(), 0.0);
    std::fill(den.begin(), den.end(), 0.0);
    for (int n = 0; n < N; ++n) {
        if (g.isBoundary(n)) continue;
        double rowMax = 0.0;
        for (int i = 0; i < g.dim; ++i) {
            double sum = 0.0;
            for (int j = 0; j < g.dim; ++j) sum += std::abs(JA[j].at(i, n));
            rowMax = std::max(rowMax, sum);
        }
        double a2 = 0.0;
        for (int ax = 0; ax < g.dim; ++ax) a2 += Adiff.at(ax, n) * Adiff.at(ax, n);
        num[n] = rowMax;
        den[n] = std::sqrt(a2);
    }
    M = std::max(M, detail::ratioSweep(num, den, "(h-em-b)"));
    // (h-em-c): |grad(div A)| <= M |div A|.
    std::vector<double> divDiff(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) divDiff[n] = pair.p2.divA[n] - pair.p1.divA[n];
    const RealVectorField gdiv = gradient(g, divDiff);
    std::fill(num.begin(), num.end(), 0.0);
    std::fill(den.begin(), den.end(), 0.0);
    for (int n = 0; n < N; ++n) {
        if (g.isBoundary(n)) continue;
        double g2 = 0.0;
        for (int ax = 0; ax < g.dim; ++ax) g2 += gdiv.at(ax, n) * gdiv.at(ax, n);
        num[n] = std::sqrt(g2);
        den[n] = std::abs(divDiff[n]);
    }
    M = std::max(M, detail::ratioSweep(num, den, "(h-em-c)"));
    pair.effectiveM = M;
    // div A agreement on the boundary holds at scheme order: the one-sided
    // discrete divergence sees interior nodes where the perturbation lives
    requireBoundaryAgreement(g, pair.p1, pair.p2, 1e-8 + 200.0 * std::abs(delta) * g.h(0) * g.h(0));
    return pair;
}

/// Case 3 (2D): equal-strength pair A_j = r(x)(cos theta_j, sin theta_j) with
/// theta_2 = theta_1 + delta chi; rho = 0.
inline PotentialPair makeCase3Pair(const SpaceTimeGrid& g, double delta) {
    if (g.dim != 2) throw std::invalid_argument("case3: needs a 2D grid");
    if (delta == 0.0) throw std::invalid_argument("case3: delta = 0 (degenerate pair)");
    const int N = g.numNodes();
    RealVectorField A1(g), A2(g);
    for (int n = 0; n < N; ++n) {
        const Point p = g.point(n);
        const double r = 0.5 + 0.3 * japaneseBracket(p);
        const double th1 = 0.4 * p[0] + 0.2 * p[1];
        const double th2 = th1 + delta * Cutoff::value(g, p);
        A1.at(0, n) = r * std::cos(th1);
        A1.at(1, n) = r * std::sin(th1);
        A2.at(0, n) = r * std::cos(th2);
        A2.at(1, n) = r * std::sin(th2);
    }
    PotentialPair pair;
    pair.caseId = StabilityCase::Case3;
    pair.p1 = ElectromagneticPotential::make(g, ComplexField(g), A1);
    pair.p2 = ElectromagneticPotential::make(g, ComplexField(g), A2);
    for (int n = 0; n < N; ++n) {
        const double d = std::abs(pair.p1.normA(n) - pair.p2.normA(n));
        if (d > 1e-12)
            throw std::runtime_error("case3: |A1| != |A2| at node " + std::to_string(n) +
                                     " (residual " + std::to_string(d) + ")");
    }
    // same scheme-order slack on div A as in makeCase2Pair
    requireBoundaryAgreement(g, pair.p1, pair.p2, 1e-8 + 200.0 * std::abs(delta) * g.h(0) * g.h(0));
    return pair;
}

/// Case 3 variant with div(A1 - A2) = 0 discretely: the difference is the
/// discrete rotated gradient W = (-D_y psi, D_x psi) of psi = delta chi.
/// D_x and D_y act on different tensor indices, so the discrete divergence of
/// W cancels exactly; A_j = +-W/2 + omega W^perp share strength pointwise.
/// Boundary agreement of A holds at scheme order (W on the boundary is the
/// one-sided derivative of a field that vanishes there to second order).
inline PotentialPair makeCase3DivFreePair(const SpaceTimeGrid& g, double delta,
                                          double omega = 1.0) {
    if (g.dim != 2) throw std::invalid_argument("case3-divfree: needs a 2D grid");
    if (delta == 0.0) throw std::invalid_argument("case3-divfree: delta = 0 (degenerate pair)");
    const int N = g.numNodes();
    std::vector<double> psi(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) psi[n] = delta * Cutoff::value(g, g.point(n));
    const RealVectorField gp = gradient(g, psi);
    RealVectorField A1(g), A2(g);
    for (int n = 0; n < N; ++n) {
        const Point W{-gp.at(1, n), gp.at(0, n)};
        const Point Wperp{-W[1], W[0]};
        A1.at(0, n) = 0.5 * W[0] + omega * Wperp[0];
        A1.at(1, n) = 0.5 * W[1] + omega * Wperp[1];
        A2.at(0, n) = -0.5 * W[0] + omega * Wperp[0];
        A2.at(1, n) = -0.5 * W[1] + omega * Wperp[1];
    }
    PotentialPair pair;
    pair.caseId = StabilityCase::Case3DivFree;
    pair.p1 = ElectromagneticPotential::make(g, ComplexField(g), A1);
    pair.p2 = ElectromagneticPotential::make(g, ComplexField(g), A2);
    for (int n = 0; n < N; ++n) {
        const double d = std::abs(pair.p1.normA(n) - pair.p2.normA(n));
        if (d > 1e-12)
            throw std::runtime_error("case3-divfree: |A1| != |A2| at node " + std::to_string(n));
    }
    const double bTol = 1e-10 + 200.0 * std::abs(delta) * g.h(0) * g.h(0);
    requireBoundaryAgreement(g, pair.p1, pair.p2, bTol);
    return pair;
}

/// Pointwise residual of J_S A + J_A S = 0 with discrete Jacobians, where
/// S = A1 + A2 and A = A1 - A2. The continuum identity follows from
/// |A1| = |A2|; the discrete residual is product-rule error, O(h^2).
inline double strengthIdentityResidual(const SpaceTimeGrid& g, const PotentialPair& pair) {
    const int N = g.numNodes();
    RealVectorField S(g), A(g);
    for (int n = 0; n < N; ++n)
        for (int ax = 0; ax < g.dim; ++ax) {
            S.at(ax, n) = pair.p1.A.at(ax, n) + pair.p2.A.at(ax, n);
            A.at(ax, n) = pair.p1.A.at(ax, n) - pair.p2.A.at(ax, n);
        }
    std::vector<RealVectorField> JS, JA;  // J*[j].at(i,n) = d_i of component j
    for (int j = 0; j < g.dim; ++j) {
        std::vector<double> cs(static_cast<std::size_t>(N)), ca(static_cast<std::size_t>(N));
        for (int n = 0; n < N; ++n) {
            cs[n] = S.at(j, n);
            ca[n] = A.at(j, n);
        }
        JS.push_back(gradient(g, cs));
        JA.push_back(gradient(g, ca));
    }
    double worst = 0.0;
    for (int n = 0; n < N; ++n) {
        for (int i = 0; i < g.dim; ++i) {
            double acc = 0.0;
            for (int j = 0; j < g.dim; ++j)
                acc += JS[j].at(i, n) * A.at(j, n) + JA[j].at(i, n) * S.at(j, n);
            worst = std::max(worst, std::abs(acc));
        }
    }
    return worst;
}

struct InitialStateSet {
    std::vector<ComplexField> states;
    double r0 = 1.0;
};

/// First choice: constant state u0 = r0. Second choice: affine states
/// u0^j = x_j + c_j whose gradient matrix is the identity. Case 1 uses the
/// single constant state; cases 2 and 3 use all n+1.
inline InitialStateSet makeInitialStates(StabilityCase c, const SpaceTimeGrid& g, double r0) {
    if (r0 <= 0.0) throw std::invalid_argument("initial states: r0 must be positive");
    InitialStateSet set;
    set.r0 = r0;
    ComplexField constant(g, Complex{r0, 0.0});
    set.states.push_back(std::move(constant));
    if (c == StabilityCase::Case1) return set;
    const int nStates = (c == StabilityCase::Case3DivFree) ? g.dim : g.dim;
    for (int j = 0; j < nStates; ++j) {
        ComplexField f(g);
        for (int n = 0; n < g.numNodes(); ++n) f[n] = g.point(n)[j] + 1.0;
        set.states.push_back(std::move(f));
    }
    if (c == StabilityCase::Case3DivFree) set.states.erase(set.states.begin());  // n measurements
    return set;
}

struct StabilityReport {
    StabilityCase caseId = StabilityCase::Case1;
    double normRho = 0.0, normA = 0.0, normDivA = 0.0;
    double obsNorm = 0.0;  // sum over states of ||d_nu d_t (u1-u2)||_{L2(Sigma0)}
    double ratio = 0.0;
    bool degenerate = false;
    std::vector<double> perStateObs;
    double v0FormulaResidual = 0.0;   // ||v(.,0) - closed-form|| over states, max
    double linearizedResidual = 0.0;  // consistency of the differentiated system
    std::vector<SpaceTimeComplexField> vFields;  // per-state v = dt(u1-u2)
};

inline StabilityReport runStability(const SpaceTimeGrid& g, const PotentialPair& pair,
                                    const InitialStateSet& states, const BoundarySubset& gamma0) {
    StabilityReport rep;
    rep.caseId = pair.caseId;

    const int N = g.numNodes();
    ComplexField rhoDiff(g);
    RealVectorField Adiff(g);
    std::vector<double> divDiff(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
        rhoDiff[n] = pair.p1.rho[n] - pair.p2.rho[n];
        for (int ax = 0; ax < g.dim; ++ax)
            Adiff.at(ax, n) = pair.p1.A.at(ax, n) - pair.p2.A.at(ax, n);
        divDiff[n] = pair.p1.divA[n] - pair.p2.divA[n];
    }
    rep.normRho = normL2Space(g, rhoDiff);
    {
        double acc = 0.0, accD = 0.0;
        for (int n = 0; n < N; ++n) {
            double a2 = 0.0;
            for (int ax = 0; ax < g.dim; ++ax) a2 += Adiff.at(ax, n) * Adiff.at(ax, n);
            acc += spaceWeight(g, n) * a2;
            accD += spaceWeight(g, n) * divDiff[n] * divDiff[n];
        }
        rep.normA = std::sqrt(acc);
        rep.normDivA = std::sqrt(accD);
    }

    const ForwardSolver solver1(g, pair.p1), solver2(g, pair.p2);
    for (const ComplexField& u0 : states.states) {
        const DirichletData bc = DirichletData::fromInitialState(g, u0);
        const ForwardSolution s1 = solver1.solve(u0, bc);
        const ForwardSolution s2 = solver2.solve(u0, bc);
        SpaceTimeComplexField v(g);
        for (std::size_t i = 0; i < v.v.size(); ++i) v.v[i] = s1.ut.v[i] - s2.ut.v[i];

        const BoundaryTimeField trace = neumannTrace(g, v, gamma0);
        rep.perStateObs.push_back(normL2SigmaT(g, gamma0, trace));

        // v(.,0) against -2A.grad u0 - i(rho + (A1+A2).A - i div A) u0,
        // with A = A1-A2 and rho = rho1-rho2.
        const ComplexVectorField gu0 = gradient(g, u0);
        double accRes = 0.0;
        const Complex I{0.0, 1.0};
        for (int n = 0; n < N; ++n) {
            if (g.isBoundary(n)) continue;
            Complex adot{0.0, 0.0};
            double sdot = 0.0;
            for (int ax = 0; ax < g.dim; ++ax) {
                adot += Adiff.at(ax, n) * gu0.at(ax, n);
                sdot += (pair.p1.A.at(ax, n) + pair.p2.A.at(ax, n)) * Adiff.at(ax, n);
            }
            const Complex formula =
                -2.0 * adot - I * (rhoDiff[n] + sdot - I * divDiff[n]) * u0[n];
            accRes += spaceWeight(g, n) * std::norm(v.at(n, 0) - formula);
        }
        rep.v0FormulaResidual = std::max(rep.v0FormulaResidual, std::sqrt(accRes));

        // Linearized-system residual: (-i dt - Delta_{A1} + rho1) v vs the
        // right-hand side driven by dt u2, interior time levels only.
        const SpaceTimeComplexField vt = timeDerivative(g, v);
        double accLin = 0.0, scaleLin = 0.0;
        for (int k = 1; k + 1 < g.nt; ++k) {
            const ComplexField dAv = magneticLaplacian(g, pair.p1, v.slice(k));
            const ComplexVectorField gut2 = gradient(g, s2.ut.slice(k));
            for (int n = 0; n < N; ++n) {
                if (g.isBoundary(n)) continue;
                Complex adot{0.0, 0.0};
                double sdot = 0.0;
                for (int ax = 0; ax < g.dim; ++ax) {
                    adot += Adiff.at(ax, n) * gut2.at(ax, n);
                    sdot += (pair.p1.A.at(ax, n) + pair.p2.A.at(ax, n)) * Adiff.at(ax, n);
                }
                const Complex lhs = -I * vt.at(n, k) - dAv[n] + pair.p1.rho[n] * v.at(n, k);
                const Complex rhs =
                    2.0 * I * adot - (rhoDiff[n] + sdot - I * divDiff[n]) * s2.ut.at(n, k);
                accLin += timeWeight(g, k) * spaceWeight(g, n) * std::norm(lhs - rhs);
                scaleLin += timeWeight(g, k) * spaceWeight(g, n) * std::norm(s2.ut.at(n, k));
            }
        }
        rep.linearizedResidual =
            std::max(rep.linearizedResidual,
                     scaleLin > 0.0 ? std::sqrt(accLin / scaleLin) : std::sqrt(accLin));

        rep.vFields.push_back(std::move(v));
    }

    for (double o : rep.perStateObs) rep.obsNorm += o;

    double coeffNorm = 0.0;
    switch (pair.caseId) {
        case StabilityCase::Case1: coeffNorm = rep.normRho; break;
        case StabilityCase::Case2: coeffNorm = rep.normRho + rep.normA + rep.normDivA; break;
        case StabilityCase::Case3: coeffNorm = rep.normA + rep.normDivA; break;
        case StabilityCase::Case3DivFree: coeffNorm = rep.normA; break;
    }
    const double scale = 1e-14;
    if (coeffNorm <= scale) {
        rep.degenerate = true;
    } else if (rep.obsNorm <= scale * coeffNorm) {
        throw std::runtime_error("stability violation: zero observation with nonzero coefficients");
    } else {
        rep.ratio = coeffNorm / rep.obsNorm;
    }
    return rep;
}

}  // namespace mslab
