#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracext/quadrature.hpp"

#include <cmath>

using namespace fracext;

namespace {

double tri_monomial_exact(int p, int q) {
    // int_T x^p y^q over the unit triangle = p! q! / (p+q+2)!
    auto fact = [](int n) {
        double f = 1.0;
        for (int k = 2; k <= n; ++k) f *= k;
        return f;
    };
    return fact(p) * fact(q) / fact(p + q + 2);
}

} // namespace

TEST_CASE("gauss_legendre integrates polynomials to 2n-1") {
    for (int n : {1, 2, 4, 8, 16}) {
        QuadratureRule rule = gauss_legendre(n);
        CHECK(rule.exactness_degree == 2 * n - 1);
        double wsum = rule.weights.sum();
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
        for (int p = 0; p <= rule.exactness_degree; ++p) {
            double acc = 0.0;
            for (int q = 0; q < rule.size(); ++q) acc += rule.weights[q] * std::pow(rule.points(0, q), p);
            CHECK(acc == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
        }
    }
}

TEST_CASE("triangle rules exact to their stated degree") {
    for (int degree : {2, 4, 5, 8}) {
        QuadratureRule rule = triangle_rule(degree);
        CHECK(rule.exactness_degree >= degree);
        CHECK(rule.weights.sum() == doctest::Approx(0.5).epsilon(1e-13));
        CHECK(rule.weights.minCoeff() > 0.0);
        for (int p = 0; p <= degree; ++p)
            for (int q = 0; p + q <= degree; ++q) {
                double acc = 0.0;
                for (int k = 0; k < rule.size(); ++k)
                    acc += rule.weights[k] * std::pow(rule.points(0, k), p) * std::pow(rule.points(1, k), q);
                CHECK(acc == doctest::Approx(tri_monomial_exact(p, q)).epsilon(1e-11));
            }
    }
}

TEST_CASE("reference_rule provides degree >= 4 in both dimensions") {
    CHECK(reference_rule(1, 4).exactness_degree >= 4);
    CHECK(reference_rule(2, 4).exactness_degree >= 4);
    CHECK_THROWS(reference_rule(3, 4));
}
