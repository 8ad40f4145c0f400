#include <doctest.h>

#include <numbers>

#include "test_util.hpp"

using namespace bel;

// The OpenMP kernels must agree with their serial reference twins:
// elementwise ops bitwise, reductions to near machine precision
// (summation order differs across the fixed thread partition).

TEST_CASE("multiplier application: serial and parallel agree bitwise") {
    GridSpec g(64, std::numbers::pi);
    Spectrum a = belt::random_field(g, 11).spectrum();
    Spectrum b = a;
    auto fn = [](int m1, int m2) { return complexd(0.1 * m1 - 0.2 * m2, 0.05 * m2); };
    kernels::apply_multiplier(a, fn);
    kernels::apply_multiplier_serial(b, fn);
    for (std::size_t i = 0; i < a.c.size(); ++i) CHECK(a.c[i] == b.c[i]);
}

TEST_CASE("pointwise multiply and linear_combine agree bitwise") {
    GridSpec g(64, 1.0);
    ScalarField a = belt::random_field(g, 1), b = belt::random_field(g, 2);
    std::vector<double> p1(g.size()), p2(g.size());
    kernels::multiply(a.data(), b.data(), p1.data(), g.size());
    kernels::multiply_serial(a.data(), b.data(), p2.data(), g.size());
    CHECK(p1 == p2);

    std::vector<double> c1(g.size()), c2(g.size());
    kernels::linear_combine({a.data(), b.data()}, {2.0, -0.5}, c1.data(), g.size());
    kernels::linear_combine_serial({a.data(), b.data()}, {2.0, -0.5}, c2.data(), g.size());
    CHECK(c1 == c2);
}

TEST_CASE("reductions: parallel matches serial to 1e-13 relative") {
    GridSpec g(128, 1.0);
    ScalarField f = belt::random_field(g, 3);
    const double s1 = kernels::pow_sum(f.data(), g.size(), 2.5);
    const double s2 = kernels::pow_sum_serial(f.data(), g.size(), 2.5);
    CHECK(std::abs(s1 - s2) < 1e-13 * std::abs(s2));
    CHECK(kernels::abs_max(f.data(), g.size()) == kernels::abs_max_serial(f.data(), g.size()));
}

TEST_CASE("reductions are deterministic across repeated runs") {
    GridSpec g(128, 1.0);
    ScalarField f = belt::random_field(g, 4);
    const double first = kernels::pow_sum(f.data(), g.size(), 3.0);
    for (int rep = 0; rep < 5; ++rep)
        CHECK(kernels::pow_sum(f.data(), g.size(), 3.0) == first);
}

TEST_CASE("sample: serial and parallel agree bitwise") {
    GridSpec g(32, 2.0);
    auto fn = [](double x1, double x2) { return std::sin(x1) * std::cos(2 * x2) + x1 * x2; };
    CHECK(kernels::sample(g, fn) == kernels::sample_serial(g, fn));
}
