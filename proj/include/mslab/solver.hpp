#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "mslab/potential.hpp"

namespace mslab {

/// Dirichlet data on the (unique) boundary node list of a grid, all time levels.
struct DirichletData {
    std::vector<int> nodes;       // grid boundary nodes, ascending
    std::vector<Complex> vals;    // vals[k * nodes.size() + b]

    Complex at(int b, int k) const { return vals[std::size_t(k) * nodes.size() + b]; }
    Complex& at(int b, int k) { return vals[std::size_t(k) * nodes.size() + b]; }

    static DirichletData zero(const SpaceTimeGrid& g) {
        DirichletData d;
        d.nodes = g.boundaryNodes();
        d.vals.assign(d.nodes.size() * std::size_t(g.nt), Complex{0.0, 0.0});
        return d;
    }

    /// g(x,t) := u0(x) on the boundary, held fixed in time. Satisfies the
    /// k=0 compatibility condition by construction.
    static DirichletData fromInitialState(const SpaceTimeGrid& g, const ComplexField& u0) {
        requireSameShape(g, u0, "DirichletData");
        DirichletData d = zero(g);
        for (int k = 0; k < g.nt; ++k)
            for (std::size_t b = 0; b < d.nodes.size(); ++b) d.at(int(b), k) = u0[d.nodes[b]];
        return d;
    }

    /// Centered time derivative of the data (one-sided at the ends).
    DirichletData timeDerivative(const SpaceTimeGrid& g) const {
        DirichletData d = *this;
        const double tau = g.tau();
        const int nb = int(nodes.size());
        for (int b = 0; b < nb; ++b) {
            for (int k = 0; k < g.nt; ++k) {
                Complex v;
                if (k == 0)
                    v = (-3.0 * at(b, 0) + 4.0 * at(b, 1) - at(b, 2)) / (2.0 * tau);
                else if (k == g.nt - 1)
                    v = (3.0 * at(b, k) - 4.0 * at(b, k - 1) + at(b, k - 2)) / (2.0 * tau);
                else
                    v = (at(b, k + 1) - at(b, k - 1)) / (2.0 * tau);
                d.at(b, k) = v;
            }
        }
        return d;
    }
};

struct ForwardSolution {
    SpaceTimeComplexField u;
    SpaceTimeComplexField ut;  // from the differentiated system, not by differencing u
    ComplexField u0;
    DirichletData g;
};

/// Crank-Nicolson march for -i du/dt - Delta_A u + rho u = 0 with pinned
/// Dirichlet rows. The interior operator is assembled once per potential and
/// factorized once; the magnetic advection term is assembled in the
/// symmetrized form i(A_a D_a + D_a A_a)/1, which is Hermitian for real A and
/// agrees with 2iA.grad + i(div A) to O(h^2).
class ForwardSolver {
public:
    ForwardSolver(const SpaceTimeGrid& grid, const ElectromagneticPotential& pot)
        : grid_(grid), pot_(pot) {
        buildIndexMaps();
        assemble();
        const Complex iHalfTau = Complex{0.0, 0.5 * grid_.tau()};
        Eigen::SparseMatrix<Complex> A = iHalfTau * Hint_;
        for (int r = 0; r < ni_; ++r) A.coeffRef(r, r) += 1.0;
        A.makeCompressed();
        lu_.compute(A);
        if (lu_.info() != Eigen::Success)
            throw std::runtime_error("forward solver: interior system factorization failed");
    }

    const SpaceTimeGrid& grid() const { return grid_; }

    ForwardSolution solve(const ComplexField& u0, const DirichletData& g,
                          double compatTol = 1e-10) const {
        requireSameShape(grid_, u0, "solve");
        if (g.nodes.size() != bnodes_.size())
            throw std::invalid_argument("solve: Dirichlet data does not match grid boundary");
        // k=0 compatibility residual must vanish.
        double cc = 0.0;
        for (std::size_t b = 0; b < bnodes_.size(); ++b)
            cc = std::max(cc, std::abs(g.at(int(b), 0) - u0[bnodes_[b]]));
        if (cc > compatTol)
            throw std::invalid_argument("solve: compatibility g(.,0) = u0 violated on boundary (" +
                                        std::to_string(cc) + ")");

        ForwardSolution out;
        out.u0 = u0;
        out.g = g;
        out.u = march(u0, g);

        // dt u solves the differentiated system with initial state
        // z0 = -i(-Delta_A + rho) u0 and boundary data dt g.
        const DirichletData dtg = g.timeDerivative(grid_);
        ComplexField z0(grid_);
        applyFull(u0, g, 0, z0);
        for (int n = 0; n < grid_.numNodes(); ++n) z0[n] *= Complex{0.0, -1.0};
        for (std::size_t b = 0; b < bnodes_.size(); ++b) z0[bnodes_[b]] = dtg.at(int(b), 0);
        out.ut = march(z0, dtg);
        return out;
    }

    /// H applied through the assembled interior + boundary-coupling matrices;
    /// boundary slots of `out` are left untouched by the operator rows.
    void applyFull(const ComplexField& f, const DirichletData& g, int k, ComplexField& out) const {
        Eigen::VectorXcd fi(ni_), fb(nb_);
        for (int r = 0; r < ni_; ++r) fi[r] = f[inodes_[r]];
        for (int b = 0; b < nb_; ++b) fb[b] = g.at(b, k);
        const Eigen::VectorXcd hi = Hint_ * fi + Hbnd_ * fb;
        for (int r = 0; r < ni_; ++r) out[inodes_[r]] = hi[r];
    }

private:
    void buildIndexMaps() {
        const int N = grid_.numNodes();
        interiorIndex_.assign(std::size_t(N), -1);
        boundaryIndex_.assign(std::size_t(N), -1);
        for (int n = 0; n < N; ++n) {
            if (grid_.isBoundary(n)) {
                boundaryIndex_[n] = nb_;
                bnodes_.push_back(n);
                ++nb_;
            } else {
                interiorIndex_[n] = ni_;
                inodes_.push_back(n);
                ++ni_;
            }
        }
    }

    void addEntry(std::vector<Eigen::Triplet<Complex>>& ti,
                  std::vector<Eigen::Triplet<Complex>>& tb, int row, int col, Complex val) const {
        if (interiorIndex_[col] >= 0)
            ti.emplace_back(row, interiorIndex_[col], val);
        else
            tb.emplace_back(row, boundaryIndex_[col], val);
    }

    void assemble() {
        std::vector<Eigen::Triplet<Complex>> ti, tb;
        const Complex I{0.0, 1.0};
        for (int r = 0; r < ni_; ++r) {
            const int n = inodes_[r];
            Complex diag{0.0, 0.0};
            double a2 = 0.0;
            for (int a = 0; a < grid_.dim; ++a) a2 += pot_.A.at(a, n) * pot_.A.at(a, n);
            diag += pot_.rho[n] + a2;
            for (int a = 0; a < grid_.dim; ++a) {
                const double h = grid_.h(a);
                const int stride = a == 0 ? 1 : grid_.nx;
                diag += 2.0 / (h * h);
                for (int sgn : {-1, 1}) {
                    const int nb = n + sgn * stride;
                    // -Delta part
                    Complex val = Complex{-1.0 / (h * h), 0.0};
                    // symmetrized advection -i(A D + D A):
                    // neighbor coefficient -i * sgn * (A(nb) + A(n)) / (2h)
                    val += -I * double(sgn) * (pot_.A.at(a, nb) + pot_.A.at(a, n)) / (2.0 * h);
                    addEntry(ti, tb, r, nb, val);
                }
            }
            ti.emplace_back(r, r, diag);
        }
        Hint_.resize(ni_, ni_);
        Hint_.setFromTriplets(ti.begin(), ti.end());
        Hbnd_.resize(ni_, nb_);
        Hbnd_.setFromTriplets(tb.begin(), tb.end());
    }

    SpaceTimeComplexField march(const ComplexField& f0, const DirichletData& g) const {
        SpaceTimeComplexField out(grid_);
        const Complex iHalfTau{0.0, 0.5 * grid_.tau()};
        Eigen::VectorXcd cur(ni_), gb(nb_), gbNext(nb_);
        for (int r = 0; r < ni_; ++r) cur[r] = f0[inodes_[r]];
        auto store = [&](int k, const Eigen::VectorXcd& v) {
            for (int r = 0; r < ni_; ++r) out.at(inodes_[r], k) = v[r];
            for (int b = 0; b < nb_; ++b) out.at(bnodes_[b], k) = g.at(b, k);
        };
        store(0, cur);
        for (int k = 0; k + 1 < grid_.nt; ++k) {
            for (int b = 0; b < nb_; ++b) {
                gb[b] = g.at(b, k);
                gbNext[b] = g.at(b, k + 1);
            }
            Eigen::VectorXcd rhs =
                cur - iHalfTau * (Hint_ * cur) - iHalfTau * (Hbnd_ * (gb + gbNext));
            cur = lu_.solve(rhs);
            if (lu_.info() != Eigen::Success)
                throw std::runtime_error("forward solver: linear solve failed at step " +
                                         std::to_string(k));
            store(k + 1, cur);
        }
        return out;
    }

    SpaceTimeGrid grid_;
    ElectromagneticPotential pot_;
    int ni_ = 0, nb_ = 0;
    std::vector<int> interiorIndex_, boundaryIndex_, inodes_, bnodes_;
    Eigen::SparseMatrix<Complex> Hint_, Hbnd_;
    Eigen::SparseLU<Eigen::SparseMatrix<Complex>, Eigen::COLAMDOrdering<int>> lu_;
};

inline ForwardSolution solveForward(const SpaceTimeGrid& grid, const ElectromagneticPotential& pot,
                                    const ComplexField& u0, const DirichletData& g) {
    return ForwardSolver(grid, pot).solve(u0, g);
}

}  // namespace mslab
