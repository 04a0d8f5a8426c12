#include <doctest.h>

#include "mslab/ensemble.hpp"
#include "mslab/verifier.hpp"

using namespace mslab;

namespace {

SpaceTimeGrid grid1d(int nx, int nt, double T = 1.0) {
    return SpaceTimeGrid(1, {0.0, 0.0}, {1.0, 1.0}, nx, nt, T);
}

CarlemanWeight mildWeight(const SpaceTimeGrid& g, double lambda = 0.5) {
    return CarlemanWeight::makeDefault(g, {-0.1, 0.0}, lambda, 1.0);
}

}  // namespace

TEST_CASE("R1, R2 vanish on the zero field") {
    const SpaceTimeGrid g = grid1d(21, 21);
    const CarlemanWeight w = mildWeight(g);
    SpaceTimeComplexField z(g);
    for (const Complex& c : applyR1(g, z, w, 2.0).v) CHECK(std::abs(c) == 0.0);
    for (const Complex& c : applyR2(g, z, w, 2.0).v) CHECK(std::abs(c) == 0.0);
}

TEST_CASE("s = 0 degenerates R1 to L and kills R2") {
    const SpaceTimeGrid g = grid1d(21, 21);
    const CarlemanWeight wt = mildWeight(g);
    const SpaceTimeComplexField w = makeBandLimitedField(g, 3);
    const SpaceTimeComplexField r1 = applyR1(g, w, wt, 0.0);
    const SpaceTimeComplexField lw = applyL(g, w);
    for (int k = 0; k + 1 < g.nt; ++k)  // final slice is defined as 0 in R1
        for (int n = 0; n < g.numNodes(); ++n)
            CHECK(std::abs(r1.at(n, k) - lw.at(n, k)) < 1e-12);
    for (const Complex& c : applyR2(g, w, wt, 0.0).v) CHECK(std::abs(c) == 0.0);
}

TEST_CASE("decomposition identity residual shrinks at second order") {
    for (double s : {1.0, 5.0}) {
        auto rel = [&](int n) {
            const SpaceTimeGrid g = grid1d(n, n);
            const CarlemanWeight wt = mildWeight(g);
            const SpaceTimeComplexField w = makeBandLimitedField(g, 17);
            const DecompositionResidual d = decompositionResidual(g, w, wt, s);
            REQUIRE(d.scale > 0.0);
            return d.residual / d.scale;
        };
        const double r = rel(41) / rel(81);
        CHECK(r > 3.0);
        CHECK(r < 5.5);
    }
}

TEST_CASE("Z vanishes for real and purely imaginary states") {
    const SpaceTimeGrid g = grid1d(41, 11);
    const CarlemanWeight wt = mildWeight(g);
    ComplexField re(g), im(g);
    for (int n = 0; n < g.numNodes(); ++n) {
        const double x = g.point(n)[0];
        re[n] = Complex{std::sin(3.0 * x) + 0.2 * x, 0.0};
        im[n] = Complex{0.0, std::cos(2.0 * x) - x * x};
    }
    CHECK(computeZ(g, re, wt, 2.0) == 0.0);
    CHECK(computeZ(g, im, wt, 2.0) == 0.0);
}

TEST_CASE("Z against a closed-form integrand oracle") {
    // u0 = e^{ix}: integrand is e^{2 s alpha(x,0)} * 2 * |grad beta|
    const SpaceTimeGrid g = grid1d(201, 11);
    const double s = 1.0;
    const CarlemanWeight wt = CarlemanWeight::makeDefault(g, {-0.1, 0.0}, 0.5, s);
    ComplexField u0(g);
    for (int n = 0; n < g.numNodes(); ++n) u0[n] = std::polar(1.0, g.point(n)[0]);
    const double z = computeZ(g, u0, wt, s);
    const double oracle = integrateSpaceWith(g, [&](int n) {
        const double x = g.point(n)[0];
        return clampedExp(2.0 * s * wt.alpha(n, 0.0)) * 2.0 * 2.0 * (x + 0.1);
    });
    CHECK(oracle > 0.0);
    CHECK(z == doctest::Approx(oracle).epsilon(1e-3));  // discrete vs exact gradient
}

TEST_CASE("Z is invariant under a unimodular factor") {
    const SpaceTimeGrid g = grid1d(41, 11);
    const CarlemanWeight wt = mildWeight(g);
    ComplexField u0 = makeBandLimitedState(g, 5), v0(g);
    const Complex c = std::polar(1.0, 1.234);
    for (int n = 0; n < g.numNodes(); ++n) v0[n] = c * u0[n];
    const double z1 = computeZ(g, u0, wt, 2.0), z2 = computeZ(g, v0, wt, 2.0);
    CHECK(z2 == doctest::Approx(z1).epsilon(1e-12));
}

TEST_CASE("verifyCarleman on the zero field and boundary enforcement") {
    const SpaceTimeGrid g = grid1d(21, 21);
    const CarlemanWeight wt = mildWeight(g);
    const BoundarySubset gamma0 = observationBoundary(g, wt);
    SpaceTimeComplexField z(g);
    const CarlemanReport rep = verifyCarleman(g, z, wt, {1.0, 2.0}, gamma0);
    for (const CarlemanRow& r : rep.rows) {
        CHECK(r.lhs == 0.0);
        CHECK(r.rhs == 0.0);
        CHECK(!r.violation);
    }

    SpaceTimeComplexField bad(g, Complex{1.0, 0.0});
    CHECK_THROWS_AS(verifyCarleman(g, bad, wt, {1.0}, gamma0), std::invalid_argument);
}

TEST_CASE("verifyCarleman on a band-limited field: finite terms, no violation") {
    const SpaceTimeGrid g = grid1d(61, 61);
    const CarlemanWeight wt = CarlemanWeight::makeDefault(g, {-0.2, 0.0}, 1.0, 1.0);
    const BoundarySubset gamma0 = observationBoundary(g, wt);
    const SpaceTimeComplexField u = makeBandLimitedField(g, 21);
    std::vector<double> sGrid{0.5, 1.0, 2.0, 4.0, 8.0};
    const CarlemanReport rep = verifyCarleman(g, u, wt, sGrid, gamma0);
    REQUIRE(rep.rows.size() == sGrid.size());
    for (const CarlemanRow& r : rep.rows) {
        CHECK(!r.violation);
        CHECK(r.rhs > 0.0);
        CHECK(std::isfinite(r.cHat));
        CHECK(r.r1 >= 0.0);
        CHECK(r.r2 >= 0.0);
        CHECK(r.sGradU >= 0.0);
        CHECK(r.s3U >= 0.0);
    }
    // weighted norms decrease in s (alpha < 0): term4/s^3 is the weighted norm
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
        const double wi = rep.rows[i].s3U / std::pow(rep.rows[i].s, 3);
        const double wj = rep.rows[i + 1].s3U / std::pow(rep.rows[i + 1].s, 3);
        CHECK(wj <= wi * (1.0 + 1e-12));
    }
}

TEST_CASE("right-hand side grows when the observation boundary is enlarged") {
    const SpaceTimeGrid g = grid1d(41, 41);
    const CarlemanWeight wt = CarlemanWeight::makeDefault(g, {-0.2, 0.0}, 1.0, 1.0);
    const BoundarySubset gamma0 = observationBoundary(g, wt);  // right endpoint only
    const BoundarySubset full = fullBoundary(g);
    REQUIRE(full.size() > gamma0.size());
    const SpaceTimeComplexField u = makeBandLimitedField(g, 9);
    const std::vector<double> sGrid{1.0, 3.0};
    const CarlemanReport a = verifyCarleman(g, u, wt, sGrid, gamma0);
    const CarlemanReport b = verifyCarleman(g, u, wt, sGrid, full);
    for (std::size_t i = 0; i < sGrid.size(); ++i) CHECK(b.rows[i].rhs >= a.rows[i].rhs);
}

TEST_CASE("initial bound trivial cases") {
    const SpaceTimeGrid g = grid1d(21, 21);
    const CarlemanWeight wt = mildWeight(g);
    SpaceTimeComplexField z(g);
    const InitialBoundResult r0 = verifyInitialBound(g, z, wt, 2.0);
    CHECK(r0.lhs == 0.0);
    CHECK(r0.ok);

    // v with zero initial slice: lhs = 0 <= rhs
    SpaceTimeComplexField v = makeBandLimitedField(g, 4);
    for (int n = 0; n < g.numNodes(); ++n) v.at(n, 0) = Complex{0.0, 0.0};
    const InitialBoundResult r1 = verifyInitialBound(g, v, wt, 2.0);
    CHECK(r1.lhs == 0.0);
    CHECK(r1.ok);
}

TEST_CASE("decomposition window rejects a weight too steep for s") {
    const SpaceTimeGrid g = grid1d(21, 21);
    // lambda large and x0 far: |s alpha| blows past the exponent cap immediately
    const CarlemanWeight wt = CarlemanWeight::makeDefault(g, {-3.0, 0.0}, 2.0, 1.0);
    const SpaceTimeComplexField w = makeBandLimitedField(g, 2);
    CHECK_THROWS_AS(decompositionResidual(g, w, wt, 50.0), std::invalid_argument);
}
