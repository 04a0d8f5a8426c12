#pragma once

#include <cmath>

#include "mslab/grid.hpp"

namespace mslab {

namespace detail {

/// Second-order first derivative along one axis: central in the interior,
/// one-sided 3-point at the first/last node.
template <typename T>
inline T d1(const std::vector<T>& f, int idx, int stride, int n, int pos, double h) {
    const auto at = [&](int p) { return f[std::size_t(idx + (p - pos) * stride)]; };
    if (pos == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    if (pos == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    return (at(pos + 1) - at(pos - 1)) / (2.0 * h);
}

/// Second-order second derivative along one axis; one-sided 4-point at the ends.
template <typename T>
inline T d2(const std::vector<T>& f, int idx, int stride, int n, int pos, double h) {
    const auto at = [&](int p) { return f[std::size_t(idx + (p - pos) * stride)]; };
    const double h2 = h * h;
    if (pos == 0) return (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / h2;
    if (pos == n - 1) return (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) / h2;
    return (at(pos - 1) - 2.0 * at(pos) + at(pos + 1)) / h2;
}

}  // namespace detail

/// Componentwise O(h^2) gradient of a nodal complex field.
inline ComplexVectorField gradient(const SpaceTimeGrid& g, const ComplexField& f) {
    requireSameShape(g, f, "gradient");
    ComplexVectorField out(g);
    const int N = g.numNodes();
    for (int n = 0; n < N; ++n) {
        const int i = g.dim == 1 ? n : n % g.nx;
        const int j = g.dim == 1 ? 0 : n / g.nx;
        out.at(0, n) = detail::d1(f.v, n, 1, g.nx, i, g.h(0));
        if (g.dim == 2) out.at(1, n) = detail::d1(f.v, n, g.nx, g.nx, j, g.h(1));
    }
    return out;
}

inline RealVectorField gradient(const SpaceTimeGrid& g, const std::vector<double>& f) {
    if (f.size() != std::size_t(g.numNodes()))
        throw std::invalid_argument("gradient: field shape does not match grid");
    RealVectorField out(g);
    const int N = g.numNodes();
    for (int n = 0; n < N; ++n) {
        const int i = g.dim == 1 ? n : n % g.nx;
        const int j = g.dim == 1 ? 0 : n / g.nx;
        out.at(0, n) = detail::d1(f, n, 1, g.nx, i, g.h(0));
        if (g.dim == 2) out.at(1, n) = detail::d1(f, n, g.nx, g.nx, j, g.h(1));
    }
    return out;
}

/// 3-point / 5-point Laplacian; one-sided stencils keep boundary nodes defined.
inline ComplexField laplacian(const SpaceTimeGrid& g, const ComplexField& f) {
    requireSameShape(g, f, "laplacian");
    ComplexField out(g);
    const int N = g.numNodes();
    for (int n = 0; n < N; ++n) {
        const int i = g.dim == 1 ? n : n % g.nx;
        const int j = g.dim == 1 ? 0 : n / g.nx;
        Complex acc = detail::d2(f.v, n, 1, g.nx, i, g.h(0));
        if (g.dim == 2) acc += detail::d2(f.v, n, g.nx, g.nx, j, g.h(1));
        out[n] = acc;
    }
    return out;
}

/// Discrete divergence of a real vector field, O(h^2).
inline std::vector<double> divergence(const SpaceTimeGrid& g, const RealVectorField& A) {
    if (A.numNodes() != std::size_t(g.numNodes()) || A.dim != g.dim)
        throw std::invalid_argument("divergence: field shape does not match grid");
    const int N = g.numNodes();
    std::vector<double> out(std::size_t(N), 0.0);
    std::vector<double> c(static_cast<std::size_t>(N));
    for (int a = 0; a < g.dim; ++a) {
        for (int n = 0; n < N; ++n) c[n] = A.at(a, n);
        const int stride = a == 0 ? 1 : g.nx;
        for (int n = 0; n < N; ++n) {
            const int pos = a == 0 ? (g.dim == 1 ? n : n % g.nx) : n / g.nx;
            out[n] += detail::d1(c, n, stride, g.nx, pos, g.h(a));
        }
    }
    return out;
}

/// Trapezoid weight of one spatial node.
inline double spaceWeight(const SpaceTimeGrid& g, int node) {
    auto axisW = [&](int pos, int axis) {
        return (pos == 0 || pos == g.nx - 1) ? 0.5 * g.h(axis) : g.h(axis);
    };
    if (g.dim == 1) return axisW(node, 0);
    return axisW(node % g.nx, 0) * axisW(node / g.nx, 1);
}

inline double timeWeight(const SpaceTimeGrid& g, int k) {
    return (k == 0 || k == g.nt - 1) ? 0.5 * g.tau() : g.tau();
}

template <typename F>
inline double integrateSpaceWith(const SpaceTimeGrid& g, F&& valueAt) {
    double acc = 0.0;
    for (int n = 0; n < g.numNodes(); ++n) acc += spaceWeight(g, n) * valueAt(n);
    return acc;
}

inline double integrateSpace(const SpaceTimeGrid& g, const std::vector<double>& f) {
    if (f.size() != std::size_t(g.numNodes()))
        throw std::invalid_argument("integrateSpace: shape mismatch");
    return integrateSpaceWith(g, [&](int n) { return f[n]; });
}

inline Complex integrateSpace(const SpaceTimeGrid& g, const ComplexField& f) {
    requireSameShape(g, f, "integrateSpace");
    Complex acc{0.0, 0.0};
    for (int n = 0; n < g.numNodes(); ++n) acc += spaceWeight(g, n) * f[n];
    return acc;
}

inline double normL2Space(const SpaceTimeGrid& g, const ComplexField& f) {
    requireSameShape(g, f, "normL2Space");
    return std::sqrt(integrateSpaceWith(g, [&](int n) { return std::norm(f[n]); }));
}

template <typename F>
inline double integrateSpaceTimeWith(const SpaceTimeGrid& g, F&& valueAt) {
    double acc = 0.0;
    for (int k = 0; k < g.nt; ++k) {
        const double wt = timeWeight(g, k);
        for (int n = 0; n < g.numNodes(); ++n) acc += wt * spaceWeight(g, n) * valueAt(n, k);
    }
    return acc;
}

inline double normL2SpaceTime(const SpaceTimeGrid& g, const SpaceTimeComplexField& f) {
    requireSameShape(g, f, "normL2SpaceTime");
    return std::sqrt(integrateSpaceTimeWith(g, [&](int n, int k) { return std::norm(f.at(n, k)); }));
}

/// Boundary integral over a subset, face-restricted trapezoid weights.
template <typename F>
inline double integrateBoundaryWith(const SpaceTimeGrid&, const BoundarySubset& bs, F&& valueAt) {
    double acc = 0.0;
    for (std::size_t e = 0; e < bs.size(); ++e) acc += bs.entries[e].weight * valueAt(int(e));
    return acc;
}

inline double integrateBoundary(const SpaceTimeGrid& g, const BoundarySubset& bs,
                                const std::vector<double>& perEntry) {
    if (perEntry.size() != bs.size())
        throw std::invalid_argument("integrateBoundary: shape mismatch");
    return integrateBoundaryWith(g, bs, [&](int e) { return perEntry[e]; });
}

/// One-sided second-order normal derivative at each non-corner node of the
/// subset, every time level.
inline BoundaryTimeField neumannTrace(const SpaceTimeGrid& g, const SpaceTimeComplexField& u,
                                      const BoundarySubset& bs) {
    requireSameShape(g, u, "neumannTrace");
    if (bs.empty()) throw std::invalid_argument("neumannTrace: empty observation boundary");
    BoundaryTimeField out(bs, g.nt);
    for (int k = 0; k < g.nt; ++k) {
        const std::size_t off = std::size_t(k) * g.numNodes();
        for (std::size_t e = 0; e < bs.size(); ++e) {
            const auto& be = bs.entries[e];
            if (be.corner) continue;  // normal undefined there
            const int axis = (be.face == Face::Left || be.face == Face::Right) ? 0 : 1;
            const int stride = axis == 0 ? 1 : g.nx;
            const int pos = axis == 0 ? (g.dim == 1 ? be.node : be.node % g.nx) : be.node / g.nx;
            // d1 is one-sided at the ends; multiply by the normal sign.
            const Complex d = detail::d1(u.v, int(off) + be.node, stride, g.nx, pos, g.h(axis));
            out.at(int(e), k) = d * be.normal[axis];
        }
    }
    return out;
}

/// L2(Gamma x (0,T)) norm of a boundary-time field.
inline double normL2SigmaT(const SpaceTimeGrid& g, const BoundarySubset& bs,
                           const BoundaryTimeField& f) {
    double acc = 0.0;
    for (int k = 0; k < g.nt; ++k) {
        const double wt = timeWeight(g, k);
        for (std::size_t e = 0; e < bs.size(); ++e)
            acc += wt * bs.entries[e].weight * std::norm(f.at(int(e), k));
    }
    return std::sqrt(acc);
}

/// Centered time derivative of a space-time field, one-sided at k=0, nt-1.
inline SpaceTimeComplexField timeDerivative(const SpaceTimeGrid& g, const SpaceTimeComplexField& u) {
    requireSameShape(g, u, "timeDerivative");
    SpaceTimeComplexField out(g);
    const int N = g.numNodes();
    const double tau = g.tau();
    for (int n = 0; n < N; ++n) {
        for (int k = 0; k < g.nt; ++k) {
            Complex d;
            if (k == 0)
                d = (-3.0 * u.at(n, 0) + 4.0 * u.at(n, 1) - u.at(n, 2)) / (2.0 * tau);
            else if (k == g.nt - 1)
                d = (3.0 * u.at(n, k) - 4.0 * u.at(n, k - 1) + u.at(n, k - 2)) / (2.0 * tau);
            else
                d = (u.at(n, k + 1) - u.at(n, k - 1)) / (2.0 * tau);
            out.at(n, k) = d;
        }
    }
    return out;
}

}  // namespace mslab
