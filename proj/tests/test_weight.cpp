#include <doctest.h>

#include "mslab/weight.hpp"

using namespace mslab;

namespace {
SpaceTimeGrid grid1d(int nx = 41, int nt = 41, double T = 1.0) {
    return SpaceTimeGrid(1, {0.0, 0.0}, {1.0, 1.0}, nx, nt, T);
}
}  // namespace

TEST_CASE("default weight closed-form values: beta, K, c0, l") {
    const SpaceTimeGrid g = grid1d();
    const CarlemanWeight w = CarlemanWeight::makeDefault(g, {-1.0, 0.0}, 1.0, 1.0);
    CHECK(w.beta(0) == doctest::Approx(1.0));
    CHECK(w.beta(g.nx - 1) == doctest::Approx(4.0));
    CHECK(w.K() == doctest::Approx(8.0));
    CHECK(w.c0() == doctest::Approx(2.0));
    CHECK(w.l(0.0) == doctest::Approx(g.T * g.T));
    CHECK(w.l(g.T) == 0.0);
}

TEST_CASE("weight preconditions") {
    const SpaceTimeGrid g = grid1d();
    CHECK_THROWS_AS(CarlemanWeight::makeDefault(g, {0.5, 0.0}, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CarlemanWeight::makeDefault(g, {0.0, 0.0}, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CarlemanWeight::makeDefault(g, {-1.0, 0.0}, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CarlemanWeight::makeDefault(g, {-1.0, 0.0}, 1.0, -2.0), std::invalid_argument);
}

TEST_CASE("alpha properties: sign, monotonicity, e:0 lower bound, underflow") {
    const SpaceTimeGrid g = grid1d(31, 51);
    const double lambda = 1.0, s = 2.0;
    const CarlemanWeight w = CarlemanWeight::makeDefault(g, {-0.5, 0.0}, lambda, s);
    for (int n = 0; n < g.numNodes(); ++n) {
        double prevAlpha = w.alpha(n, 0.0);
        CHECK(prevAlpha < 0.0);
        for (int k = 1; k + 1 < g.nt; ++k) {
            const double a = w.alpha(n, g.time(k));
            CHECK(a < 0.0);
            CHECK(a <= prevAlpha + 1e-15);  // alpha(x,t) <= alpha(x,0), non-increasing
            prevAlpha = a;
        }
        // (e:0): e^{s alpha(x,0)} >= e^{s l^{-2}(0)(1 - e^{lambda K})} > 0
        const double lb = std::exp(s * (1.0 - std::exp(lambda * w.K())) / std::pow(w.l(0.0), 2));
        CHECK(w.expSAlpha(s, n, 0.0) >= lb);
        CHECK(w.expSAlpha(s, n, 0.0) > 0.0);
        // pole handling at t = T
        CHECK(w.expSAlpha(s, n, g.T) == 0.0);
        // e^{s alpha} -> 0 monotonically as t -> T
        double prev = w.expSAlpha(s, n, 0.0);
        for (int k = 1; k < g.nt; ++k) {
            const double e = w.expSAlpha(s, n, g.time(k));
            CHECK(e <= prev * (1.0 + 1e-14));
            prev = e;
        }
        CHECK(prev == 0.0);
    }
}

TEST_CASE("clamped exp underflows to exactly zero") {
    CHECK(clampedExp(-746.0) == 0.0);
    CHECK(clampedExp(-1e9) == 0.0);
    CHECK(clampedExp(-std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(clampedExp(-1.0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("pseudo-convexity certificate") {
    const SpaceTimeGrid g = grid1d();
    // default beta has D^2 beta = 2 I: epsilon >= 2 for every lambda > 0
    const CarlemanWeight w = CarlemanWeight::makeDefault(g, {-1.0, 0.0}, 1.0, 1.0);
    const PseudoconvexityCertificate c = certifyPseudoconvexity(w);
    CHECK(c.epsilon >= 2.0);

    // vanishing lambda isolates the Hessian term: epsilon -> 2 exactly
    const CarlemanWeight w0 = CarlemanWeight::makeDefault(g, {-1.0, 0.0}, 1e-12, 1.0);
    CHECK(certifyPseudoconvexity(w0).epsilon == doctest::Approx(2.0).epsilon(1e-6));

    // affine beta in 2D: directions orthogonal to grad beta kill the form
    const SpaceTimeGrid g2(2, {0.0, 0.0}, {1.0, 1.0}, 17, 11, 1.0);
    std::vector<double> betaAff(std::size_t(g2.numNodes()));
    for (int n = 0; n < g2.numNodes(); ++n) betaAff[n] = 1.0 + g2.point(n)[0];
    const CarlemanWeight wa = CarlemanWeight::makeCustom(g2, betaAff, 1.0, 1.0);
    CHECK_THROWS_AS(certifyPseudoconvexity(wa), std::runtime_error);
    const CarlemanWeight w2 = CarlemanWeight::makeDefault(g2, {-1.0, -1.0}, 1.0, 1.0);
    CHECK_THROWS_AS(certifyPseudoconvexity(w2, 8), std::invalid_argument);  // 2D needs >= 16
}

TEST_CASE("custom beta agrees with the default closed forms") {
    const SpaceTimeGrid g = grid1d(81);
    const CarlemanWeight wd = CarlemanWeight::makeDefault(g, {-1.0, 0.0}, 1.0, 1.0);
    std::vector<double> beta(std::size_t(g.numNodes()));
    for (int n = 0; n < g.numNodes(); ++n) beta[n] = wd.beta(n);
    const CarlemanWeight wc = CarlemanWeight::makeCustom(g, beta, 1.0, 1.0);
    for (int n = 0; n < g.numNodes(); ++n) {
        CHECK(std::abs(wc.gradBeta(n)[0] - wd.gradBeta(n)[0]) < 1e-10);  // exact on quadratics
        CHECK(std::abs(wc.lapBeta(n) - wd.lapBeta(n)) < 1e-8);
        CHECK(wc.hessianForm(n, {1.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-8));
    }
}

TEST_CASE("grad alpha two routes agree to O(h^2)") {
    auto defect = [](int nx) {
        const SpaceTimeGrid g(1, {0, 0}, {1, 1}, nx, 11, 1.0);
        const CarlemanWeight w = CarlemanWeight::makeDefault(g, {-0.5, 0.0}, 0.7, 1.0);
        const double t = 0.3;
        std::vector<double> alphaNodal(std::size_t(g.numNodes()));
        for (int n = 0; n < g.numNodes(); ++n) alphaNodal[n] = w.alpha(n, t);
        const RealVectorField da = gradient(g, alphaNodal);
        double e = 0.0;
        for (int n = 0; n < g.numNodes(); ++n)
            e = std::max(e, std::abs(da.at(0, n) - w.gradAlpha(n, t)[0]));
        return e;
    };
    const double r = defect(41) / defect(81);
    CHECK(r > 3.0);
    CHECK(r < 5.0);
}

TEST_CASE("observation boundary oracle") {
    const SpaceTimeGrid g = grid1d();
    const CarlemanWeight w = CarlemanWeight::makeDefault(g, {-1.0, 0.0}, 1.0, 1.0);
    const BoundarySubset gamma0 = observationBoundary(g, w);
    REQUIRE(gamma0.size() == 1);
    CHECK(gamma0.entries[0].node == g.nx - 1);
    CHECK(gamma0.entries[0].face == Face::Right);

    const SpaceTimeGrid g2(2, {0.0, 0.0}, {1.0, 1.0}, 11, 11, 1.0);
    const CarlemanWeight w2 = CarlemanWeight::makeDefault(g2, {-1.0, 0.5}, 1.0, 1.0);
    const BoundarySubset gm = observationBoundary(g2, w2);
    bool sawLeft = false, sawRight = false, sawTop = false, sawBottom = false;
    for (const auto& e : gm.entries) {
        sawLeft = sawLeft || e.face == Face::Left;
        sawRight = sawRight || e.face == Face::Right;
        sawTop = sawTop || e.face == Face::Top;
        sawBottom = sawBottom || e.face == Face::Bottom;
    }
    CHECK(!sawLeft);
    CHECK(sawRight);
    CHECK(sawTop);
    CHECK(sawBottom);
}

TEST_CASE("weighting is monotone in s") {
    const SpaceTimeGrid g = grid1d(21, 21);
    const CarlemanWeight w = CarlemanWeight::makeDefault(g, {-0.5, 0.0}, 1.0, 1.0);
    for (int n = 0; n < g.numNodes(); ++n)
        for (int k = 0; k < g.nt; ++k) {
            const double t = g.time(k);
            CHECK(w.expSAlpha(2.0, n, t) <= w.expSAlpha(1.0, n, t) * (1.0 + 1e-14));
        }
}
