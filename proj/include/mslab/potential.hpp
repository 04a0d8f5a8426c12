#pragma once

#include <cmath>
#include <optional>

#include "mslab/operators.hpp"

namespace mslab {

/// Electromagnetic potential pair (rho, A) with a cached discrete divergence
/// of A and an optional admissibility norm cap M.
struct ElectromagneticPotential {
    ComplexField rho;
    RealVectorField A;
    std::vector<double> divA;
    std::optional<double> M;

    static ElectromagneticPotential zero(const SpaceTimeGrid& g) {
        ElectromagneticPotential p;
        p.rho = ComplexField(g);
        p.A = RealVectorField(g);
        p.divA.assign(std::size_t(g.numNodes()), 0.0);
        return p;
    }

    static ElectromagneticPotential make(const SpaceTimeGrid& g, ComplexField rho,
                                         RealVectorField A,
                                         std::optional<double> M = std::nullopt) {
        requireSameShape(g, rho, "potential");
        if (A.numNodes() != std::size_t(g.numNodes()) || A.dim != g.dim)
            throw std::invalid_argument("potential: A shape does not match grid");
        for (const Complex& c : rho.v)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                throw std::invalid_argument("potential: non-finite rho value");
        for (double a : A.comp)
            if (!std::isfinite(a)) throw std::invalid_argument("potential: non-finite A value");
        ElectromagneticPotential p;
        p.rho = std::move(rho);
        p.A = std::move(A);
        p.divA = divergence(g, p.A);
        p.M = M;
        if (M) {
            double supRho = 0.0, supA = 0.0;
            for (const Complex& c : p.rho.v) supRho = std::max(supRho, std::abs(c));
            for (std::size_t n = 0; n < p.A.numNodes(); ++n) {
                double a2 = 0.0;
                for (int ax = 0; ax < p.A.dim; ++ax) a2 += p.A.at(ax, int(n)) * p.A.at(ax, int(n));
                supA = std::max(supA, std::sqrt(a2));
            }
            if (supRho > *M || supA > *M)
                throw std::invalid_argument("potential: sup norm exceeds declared M");
        }
        return p;
    }

    double normA(int node) const {
        double a2 = 0.0;
        for (int ax = 0; ax < A.dim; ++ax) a2 += A.at(ax, node) * A.at(ax, node);
        return std::sqrt(a2);
    }
};

/// Admissible pairs agree in rho, A and div A on boundary nodes.
inline void requireBoundaryAgreement(const SpaceTimeGrid& g, const ElectromagneticPotential& p1,
                                     const ElectromagneticPotential& p2, double tol = 1e-10) {
    for (int n : g.boundaryNodes()) {
        if (std::abs(p1.rho[n] - p2.rho[n]) > tol)
            throw std::invalid_argument("admissibility: rho differs on boundary node " +
                                        std::to_string(n));
        for (int a = 0; a < g.dim; ++a)
            if (std::abs(p1.A.at(a, n) - p2.A.at(a, n)) > tol)
                throw std::invalid_argument("admissibility: A differs on boundary node " +
                                            std::to_string(n));
        if (std::abs(p1.divA[n] - p2.divA[n]) > tol)
            throw std::invalid_argument("admissibility: div A differs on boundary node " +
                                        std::to_string(n));
    }
}

/// Delta_A f = Delta f + 2i A.grad f + i (div A) f - |A|^2 f, O(h^2).
inline ComplexField magneticLaplacian(const SpaceTimeGrid& g, const ElectromagneticPotential& pot,
                                      const ComplexField& f) {
    requireSameShape(g, f, "magneticLaplacian");
    ComplexField out = laplacian(g, f);
    const ComplexVectorField gf = gradient(g, f);
    const Complex I{0.0, 1.0};
    for (int n = 0; n < g.numNodes(); ++n) {
        Complex adv{0.0, 0.0};
        double a2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            adv += pot.A.at(a, n) * gf.at(a, n);
            a2 += pot.A.at(a, n) * pot.A.at(a, n);
        }
        out[n] += 2.0 * I * adv + I * pot.divA[n] * f[n] - a2 * f[n];
    }
    return out;
}

/// H f = -Delta_A f + rho f (the spatial Hamiltonian of the evolution).
inline ComplexField hamiltonianApply(const SpaceTimeGrid& g, const ElectromagneticPotential& pot,
                                     const ComplexField& f) {
    ComplexField out = magneticLaplacian(g, pot, f);
    for (int n = 0; n < g.numNodes(); ++n) out[n] = -out[n] + pot.rho[n] * f[n];
    return out;
}

}  // namespace mslab
