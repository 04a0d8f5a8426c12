#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mslab {

using Complex = std::complex<double>;
using Point = std::array<double, 2>;

/// Uniform tensor grid on Omega x [0,T], Omega an interval (dim 1) or a
/// rectangle (dim 2). Spatial axes share the same point count nx.
struct SpaceTimeGrid {
    int dim = 1;
    Point lo{0.0, 0.0};
    Point hi{1.0, 1.0};
    int nx = 5;   // points per spatial axis
    int nt = 5;   // time levels (including t=0 and t=T)
    double T = 1.0;

    SpaceTimeGrid() = default;
    SpaceTimeGrid(int dim_, Point lo_, Point hi_, int nx_, int nt_, double T_)
        : dim(dim_), lo(lo_), hi(hi_), nx(nx_), nt(nt_), T(T_) {
        validate();
    }

    void validate() const {
        if (dim != 1 && dim != 2)
            throw std::invalid_argument("grid: dim must be 1 or 2");
        if (nx < 5 || nt < 5)
            throw std::invalid_argument("grid: need nx >= 5 and nt >= 5");
        if (T <= 0.0)
            throw std::invalid_argument("grid: T must be positive");
        for (int a = 0; a < dim; ++a)
            if (hi[a] <= lo[a])
                throw std::invalid_argument("grid: empty extent on axis " + std::to_string(a));
    }

    double h(int axis = 0) const { return (hi[axis] - lo[axis]) / double(nx - 1); }
    double tau() const { return T / double(nt - 1); }

    int numNodes() const { return dim == 1 ? nx : nx * nx; }
    int numSpaceTimeNodes() const { return numNodes() * nt; }

    int node(int i, int j = 0) const { return dim == 1 ? i : i + nx * j; }

    Point point(int node) const {
        if (dim == 1) return {lo[0] + h(0) * node, 0.0};
        const int i = node % nx, j = node / nx;
        return {lo[0] + h(0) * i, lo[1] + h(1) * j};
    }

    double time(int k) const { return tau() * k; }

    bool isBoundary(int node) const {
        if (dim == 1) return node == 0 || node == nx - 1;
        const int i = node % nx, j = node / nx;
        return i == 0 || i == nx - 1 || j == 0 || j == nx - 1;
    }

    /// Corner nodes carry no well-defined outward normal; they are tagged
    /// so traces can skip them.
    bool isCorner(int node) const {
        if (dim == 1) return false;
        const int i = node % nx, j = node / nx;
        return (i == 0 || i == nx - 1) && (j == 0 || j == nx - 1);
    }

    std::vector<int> boundaryNodes() const {
        std::vector<int> out;
        for (int n = 0; n < numNodes(); ++n)
            if (isBoundary(n)) out.push_back(n);
        return out;
    }
};

enum class Face : int { Left = 0, Right = 1, Bottom = 2, Top = 3 };

/// One boundary node seen from one face: its outward normal and its
/// face-restricted trapezoid quadrature weight. In 2D a corner node shows up
/// once per incident face; in 1D a boundary point carries counting measure.
struct BoundaryEntry {
    int node = 0;
    Face face = Face::Left;
    Point normal{0.0, 0.0};
    double weight = 1.0;
    bool corner = false;
};

struct BoundarySubset {
    std::vector<BoundaryEntry> entries;

    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }

    double measure() const {
        double m = 0.0;
        for (const auto& e : entries) m += e.weight;
        return m;
    }
};

/// Every node of every face of the boundary, with per-face normals and
/// trapezoid weights. 1D faces are the two endpoints with weight 1.
inline BoundarySubset fullBoundary(const SpaceTimeGrid& g) {
    BoundarySubset bs;
    if (g.dim == 1) {
        bs.entries.push_back({0, Face::Left, {-1.0, 0.0}, 1.0, false});
        bs.entries.push_back({g.nx - 1, Face::Right, {1.0, 0.0}, 1.0, false});
        return bs;
    }
    const double h0 = g.h(0), h1 = g.h(1);
    auto faceWeight = [&](int idx, double h) { return (idx == 0 || idx == g.nx - 1) ? 0.5 * h : h; };
    for (int j = 0; j < g.nx; ++j) {
        bs.entries.push_back({g.node(0, j), Face::Left, {-1.0, 0.0}, faceWeight(j, h1), j == 0 || j == g.nx - 1});
        bs.entries.push_back({g.node(g.nx - 1, j), Face::Right, {1.0, 0.0}, faceWeight(j, h1), j == 0 || j == g.nx - 1});
    }
    for (int i = 0; i < g.nx; ++i) {
        bs.entries.push_back({g.node(i, 0), Face::Bottom, {0.0, -1.0}, faceWeight(i, h0), i == 0 || i == g.nx - 1});
        bs.entries.push_back({g.node(i, g.nx - 1), Face::Top, {0.0, 1.0}, faceWeight(i, h0), i == 0 || i == g.nx - 1});
    }
    return bs;
}

/// Nodal complex scalar field on the spatial grid.
struct ComplexField {
    std::vector<Complex> v;

    ComplexField() = default;
    explicit ComplexField(const SpaceTimeGrid& g, Complex fill = {0.0, 0.0})
        : v(std::size_t(g.numNodes()), fill) {}

    Complex& operator[](std::size_t i) { return v[i]; }
    const Complex& operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

/// Nodal real n-vector field; component-major storage.
struct RealVectorField {
    int dim = 1;
    std::vector<double> comp;  // comp[a * numNodes + node]

    RealVectorField() = default;
    explicit RealVectorField(const SpaceTimeGrid& g, double fill = 0.0)
        : dim(g.dim), comp(std::size_t(g.dim) * g.numNodes(), fill) {}

    double& at(int axis, int node) { return comp[std::size_t(axis) * (comp.size() / dim) + node]; }
    double at(int axis, int node) const { return comp[std::size_t(axis) * (comp.size() / dim) + node]; }
    std::size_t numNodes() const { return comp.size() / dim; }
};

/// Complex gradient: one complex component per spatial axis.
struct ComplexVectorField {
    int dim = 1;
    std::vector<Complex> comp;

    ComplexVectorField() = default;
    explicit ComplexVectorField(const SpaceTimeGrid& g, Complex fill = {0.0, 0.0})
        : dim(g.dim), comp(std::size_t(g.dim) * g.numNodes(), fill) {}

    Complex& at(int axis, int node) { return comp[std::size_t(axis) * (comp.size() / dim) + node]; }
    Complex at(int axis, int node) const { return comp[std::size_t(axis) * (comp.size() / dim) + node]; }
};

/// Complex scalar field over the full space-time grid; time-major blocks.
struct SpaceTimeComplexField {
    int nodesPerSlice = 0;
    std::vector<Complex> v;  // v[node + nodesPerSlice * timeIndex]

    SpaceTimeComplexField() = default;
    explicit SpaceTimeComplexField(const SpaceTimeGrid& g, Complex fill = {0.0, 0.0})
        : nodesPerSlice(g.numNodes()), v(std::size_t(g.numSpaceTimeNodes()), fill) {}

    Complex& at(int node, int k) { return v[std::size_t(k) * nodesPerSlice + node]; }
    Complex at(int node, int k) const { return v[std::size_t(k) * nodesPerSlice + node]; }

    ComplexField slice(int k) const {
        ComplexField f;
        f.v.assign(v.begin() + std::size_t(k) * nodesPerSlice,
                   v.begin() + std::size_t(k + 1) * nodesPerSlice);
        return f;
    }

    void setSlice(int k, const ComplexField& f) {
        std::copy(f.v.begin(), f.v.end(), v.begin() + std::size_t(k) * nodesPerSlice);
    }
};

/// Values on a boundary subset over all time levels; entry-major per slice.
struct BoundaryTimeField {
    int entriesPerSlice = 0;
    std::vector<Complex> v;

    BoundaryTimeField() = default;
    BoundaryTimeField(const BoundarySubset& bs, int nt)
        : entriesPerSlice(int(bs.size())), v(std::size_t(bs.size()) * nt, Complex{0.0, 0.0}) {}

    Complex& at(int entry, int k) { return v[std::size_t(k) * entriesPerSlice + entry]; }
    Complex at(int entry, int k) const { return v[std::size_t(k) * entriesPerSlice + entry]; }
};

inline void requireSameShape(const SpaceTimeGrid& g, const ComplexField& f, const char* what) {
    if (f.size() != std::size_t(g.numNodes()))
        throw std::invalid_argument(std::string(what) + ": field shape does not match grid");
}

inline void requireSameShape(const SpaceTimeGrid& g, const SpaceTimeComplexField& f, const char* what) {
    if (f.v.size() != std::size_t(g.numSpaceTimeNodes()) || f.nodesPerSlice != g.numNodes())
        throw std::invalid_argument(std::string(what) + ": space-time field shape does not match grid");
}

}  // namespace mslab
