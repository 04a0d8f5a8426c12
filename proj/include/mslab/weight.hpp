#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "mslab/operators.hpp"

namespace mslab {

/// Exponents below this underflow to exactly zero instead of producing
/// denormals or NaN at the l(T)=0 pole.
inline constexpr double kExpUnderflow = -745.0;

inline double clampedExp(double exponent) {
    if (!(exponent > kExpUnderflow)) return 0.0;
    return std::exp(exponent);
}

struct PseudoconvexityCertificate {
    double epsilon = 0.0;
    double lambdaMin = 0.0;
    int sampledDirections = 0;
};

/// Weight system alpha = (e^{lambda beta} - e^{lambda K}) / l^2,
/// phi = e^{lambda beta} / l^2, with beta = |x - x0|^2 by default and
/// l(t) = (T+t)(T-t). Immutable after construction; evaluators are pure.
class CarlemanWeight {
public:
    /// Default spatial weight |x - x0|^2; derivatives taken in closed form.
    static CarlemanWeight makeDefault(const SpaceTimeGrid& grid, Point x0, double lambda, double s) {
        if (lambda <= 0.0) throw std::invalid_argument("weight: lambda must be positive");
        if (s <= 0.0) throw std::invalid_argument("weight: s must be positive");
        if (insideClosure(grid, x0))
            throw std::invalid_argument("weight: x0 must lie outside the closure of Omega");
        CarlemanWeight w(grid, lambda, s);
        w.x0_ = x0;
        w.analytic_ = true;
        const int N = grid.numNodes();
        w.beta_.resize(static_cast<std::size_t>(N));
        w.gradBeta_ = RealVectorField(grid);
        for (int n = 0; n < N; ++n) {
            const Point p = grid.point(n);
            double b = 0.0;
            for (int a = 0; a < grid.dim; ++a) {
                const double d = p[a] - x0[a];
                b += d * d;
                w.gradBeta_.at(a, n) = 2.0 * d;
            }
            w.beta_[n] = b;
        }
        w.lapBeta_.assign(std::size_t(N), 2.0 * grid.dim);
        w.finish();
        return w;
    }

    /// User-supplied nodal beta; derivatives fall back to discrete stencils.
    static CarlemanWeight makeCustom(const SpaceTimeGrid& grid, std::vector<double> beta,
                                     double lambda, double s) {
        if (lambda <= 0.0) throw std::invalid_argument("weight: lambda must be positive");
        if (s <= 0.0) throw std::invalid_argument("weight: s must be positive");
        if (beta.size() != std::size_t(grid.numNodes()))
            throw std::invalid_argument("weight: beta shape does not match grid");
        CarlemanWeight w(grid, lambda, s);
        w.analytic_ = false;
        w.beta_ = std::move(beta);
        for (double b : w.beta_)
            if (b < 0.0) throw std::invalid_argument("weight: beta must be nonnegative");
        w.gradBeta_ = gradient(grid, w.beta_);
        ComplexField bc(grid);
        for (int n = 0; n < grid.numNodes(); ++n) bc[n] = w.beta_[n];
        const ComplexField lb = laplacian(grid, bc);
        w.lapBeta_.resize(w.beta_.size());
        for (std::size_t n = 0; n < w.beta_.size(); ++n) w.lapBeta_[n] = lb[n].real();
        // Nodal Hessian from the discrete gradient field, O(h^2).
        const int N = grid.numNodes();
        w.hessBeta_.assign(std::size_t(N) * 4, 0.0);
        for (int a = 0; a < grid.dim; ++a) {
            std::vector<double> ga(static_cast<std::size_t>(N));
            for (int n = 0; n < N; ++n) ga[n] = w.gradBeta_.at(a, n);
            const RealVectorField dga = gradient(grid, ga);
            for (int b = 0; b < grid.dim; ++b)
                for (int n = 0; n < N; ++n)
                    w.hessBeta_[std::size_t(n) * 4 + a * 2 + b] = dga.at(b, n);
        }
        w.finish();
        return w;
    }

    const SpaceTimeGrid& grid() const { return grid_; }
    double lambda() const { return lambda_; }
    double s() const { return s_; }
    double K() const { return K_; }
    double c0() const { return c0_; }
    Point x0() const { return x0_; }
    bool analyticBeta() const { return analytic_; }

    double beta(int node) const { return beta_[std::size_t(node)]; }
    Point gradBeta(int node) const {
        Point g{0.0, 0.0};
        for (int a = 0; a < grid_.dim; ++a) g[a] = gradBeta_.at(a, node);
        return g;
    }
    double lapBeta(int node) const { return lapBeta_[std::size_t(node)]; }

    /// D^2 beta (xi, xi). Closed form 2|xi|^2 for the default weight.
    double hessianForm(int node, Point xi) const {
        if (analytic_) return 2.0 * (xi[0] * xi[0] + xi[1] * xi[1]);
        return discreteHessianForm(node, xi);
    }

    double l(double t) const { return (T_ + t) * (T_ - t); }
    double lprime(double t) const { return -2.0 * t; }

    /// alpha(x,t); -inf sentinel at t = T.
    double alpha(int node, double t) const {
        const double lt = l(t);
        if (lt <= 0.0) return -std::numeric_limits<double>::infinity();
        return (std::exp(lambda_ * beta_[std::size_t(node)]) - expLambdaK_) / (lt * lt);
    }

    double phi(int node, double t) const {
        const double lt = l(t);
        if (lt <= 0.0) return std::numeric_limits<double>::infinity();
        return std::exp(lambda_ * beta_[std::size_t(node)]) / (lt * lt);
    }

    /// e^{s alpha}, evaluated in log-space; exactly 0 at and near t = T.
    double expSAlpha(double s, int node, double t) const {
        const double a = alpha(node, t);
        if (!std::isfinite(a)) return 0.0;
        return clampedExp(s * a);
    }

    /// grad alpha = lambda phi grad beta.
    Point gradAlpha(int node, double t) const {
        const double f = lambda_ * phi(node, t);
        Point g = gradBeta(node);
        g[0] *= f;
        g[1] *= f;
        return g;
    }

    /// Delta alpha = lambda^2 phi |grad beta|^2 + lambda phi Delta beta.
    double lapAlpha(int node, double t) const {
        const Point gb = gradBeta(node);
        const double gb2 = gb[0] * gb[0] + gb[1] * gb[1];
        const double ph = phi(node, t);
        return lambda_ * lambda_ * ph * gb2 + lambda_ * ph * lapBeta(node);
    }

    /// d alpha / dt = -2 l' (e^{lambda beta} - e^{lambda K}) / l^3.
    double dtAlpha(int node, double t) const {
        const double lt = l(t);
        if (lt <= 0.0) return std::numeric_limits<double>::infinity();
        const double num = std::exp(lambda_ * beta_[std::size_t(node)]) - expLambdaK_;
        return -2.0 * lprime(t) * num / (lt * lt * lt);
    }

    static bool insideClosure(const SpaceTimeGrid& g, Point x) {
        for (int a = 0; a < g.dim; ++a)
            if (x[a] < g.lo[a] || x[a] > g.hi[a]) return false;
        return true;
    }

private:
    CarlemanWeight(const SpaceTimeGrid& grid, double lambda, double s)
        : grid_(grid), lambda_(lambda), s_(s), T_(grid.T) {}

    void finish() {
        double supBeta = 0.0, minGrad = std::numeric_limits<double>::infinity();
        for (int n = 0; n < grid_.numNodes(); ++n) {
            supBeta = std::max(supBeta, beta_[std::size_t(n)]);
            const Point g = gradBeta(n);
            minGrad = std::min(minGrad, std::sqrt(g[0] * g[0] + g[1] * g[1]));
        }
        K_ = 2.0 * supBeta;
        c0_ = minGrad;
        expLambdaK_ = std::exp(lambda_ * K_);
        if (c0_ <= 0.0)
            throw std::invalid_argument("weight: beta has a critical point on the grid (c0 = 0)");
    }

    double discreteHessianForm(int node, Point xi) const {
        double q = 0.0;
        for (int a = 0; a < grid_.dim; ++a)
            for (int b = 0; b < grid_.dim; ++b)
                q += hessBeta_[std::size_t(node) * 4 + a * 2 + b] * xi[a] * xi[b];
        return q;
    }

    SpaceTimeGrid grid_;
    double lambda_, s_, T_;
    Point x0_{0.0, 0.0};
    bool analytic_ = true;
    double K_ = 0.0, c0_ = 0.0, expLambdaK_ = 1.0;
    std::vector<double> beta_, lapBeta_, hessBeta_;
    RealVectorField gradBeta_;
};

/// Minimal sampled value of lambda |grad beta . xi|^2 + D^2 beta(xi,xi) over
/// unit directions; refuses the weight when the form is not positive.
inline PseudoconvexityCertificate certifyPseudoconvexity(const CarlemanWeight& w,
                                                         int directionSamples = 32) {
    const SpaceTimeGrid& g = w.grid();
    std::vector<Point> dirs;
    if (g.dim == 1) {
        dirs.push_back({1.0, 0.0});
        dirs.push_back({-1.0, 0.0});
    } else {
        if (directionSamples < 16)
            throw std::invalid_argument("certifyPseudoconvexity: need >= 16 directions in 2D");
        for (int k = 0; k < directionSamples; ++k) {
            const double th = 2.0 * M_PI * k / directionSamples;
            dirs.push_back({std::cos(th), std::sin(th)});
        }
    }
    double eps = std::numeric_limits<double>::infinity();
    int badNode = -1;
    Point badDir{0.0, 0.0};
    for (int n = 0; n < g.numNodes(); ++n) {
        const Point gb = w.gradBeta(n);
        for (const Point& xi : dirs) {
            const double dot = gb[0] * xi[0] + gb[1] * xi[1];
            const double q = w.lambda() * dot * dot + w.hessianForm(n, xi);
            if (q < eps) {
                eps = q;
                badNode = n;
                badDir = xi;
            }
        }
    }
    // strict positivity with a roundoff margin: an exactly tangent direction
    // evaluates to ~1e-33, not a signed negative
    if (eps <= 1e-12) {
        const Point p = g.point(badNode);
        throw std::runtime_error(
            "pseudo-convexity refused: form value " + std::to_string(eps) + " at node (" +
            std::to_string(p[0]) + "," + std::to_string(p[1]) + "), direction (" +
            std::to_string(badDir[0]) + "," + std::to_string(badDir[1]) + ")");
    }
    return {eps, w.lambda(), int(dirs.size())};
}

/// Gamma0 = boundary nodes where grad beta . nu >= 0 (closed condition:
/// exact tangency nodes are kept).
inline BoundarySubset observationBoundary(const SpaceTimeGrid& g, const CarlemanWeight& w) {
    BoundarySubset all = fullBoundary(g);
    BoundarySubset out;
    for (const auto& e : all.entries) {
        const Point gb = w.gradBeta(e.node);
        if (gb[0] * e.normal[0] + gb[1] * e.normal[1] >= 0.0) out.entries.push_back(e);
    }
    return out;
}

}  // namespace mslab
