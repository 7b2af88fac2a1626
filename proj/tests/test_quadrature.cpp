#include <catch2/catch.hpp>

#include <cmath>

#include "entropy/estimators.hpp"
#include "entropy/quadrature.hpp"

using entropy::integrate;
using entropy::integrate_half_line;
using entropy::QuadratureSpec;

TEST_CASE("quadrature spec validation", "[quadrature]") {
    QuadratureSpec bad;
    bad.relative_tolerance = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = QuadratureSpec{};
    bad.max_subdivisions = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("quadrature reproduces known closed forms", "[quadrature]") {
    CHECK(integrate([](double) { return 1.0; }, 0.0, 1.0) == Approx(1.0).margin(1e-12));
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) == Approx(1.0 / 3.0).margin(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, 3.14159265358979323846) ==
          Approx(2.0).margin(1e-10));
    CHECK(integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0) ==
          Approx(1.7724538509055160273).margin(1e-10)); // sqrt(pi)
    CHECK(integrate([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0) ==
          Approx(0.78539816339744830962).margin(1e-12)); // pi/4
}

TEST_CASE("half-line transform handles exponential and algebraic decay", "[quadrature]") {
    CHECK(integrate_half_line([](double x) { return std::exp(-x); }) == Approx(1.0).margin(1e-9));
    CHECK(integrate_half_line([](double x) { return x * std::exp(-x); }) == Approx(1.0).margin(1e-9));
    CHECK(integrate_half_line([](double x) { return 1.0 / ((1.0 + x) * (1.0 + x)); }) ==
          Approx(1.0).margin(1e-9));
}

TEST_CASE("the NSB hyperprior density integrates to one", "[quadrature][nsb]") {
    for (std::size_t k : {2, 10, 100}) {
        const double mass = integrate_half_line(
            [k](double alpha) { return entropy::nsb_hyperprior_density(alpha, k); });
        CHECK(mass == Approx(1.0).margin(1e-7));
    }
}

TEST_CASE("non-convergence reports the best estimate and bound", "[quadrature]") {
    QuadratureSpec tight;
    tight.relative_tolerance = 1e-14;
    tight.absolute_tolerance = 1e-16;
    tight.max_subdivisions = 2;
    // integrable singularity at zero; two subdivisions cannot resolve it
    auto spike = [](double x) { return 1.0 / std::sqrt(x); };
    try {
        integrate(spike, 0.0, 1.0, tight);
        FAIL("expected quadrature_error");
    } catch (const entropy::quadrature_error& err) {
        CHECK(err.error_bound() > 0.0);
        CHECK(std::isfinite(err.best_estimate()));
        CHECK(err.best_estimate() == Approx(2.0).margin(0.5));
    }
}

TEST_CASE("degenerate and inverted intervals", "[quadrature]") {
    CHECK(integrate([](double) { return 42.0; }, 2.0, 2.0) == 0.0);
    CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 1.0, 0.0), std::invalid_argument);
}
