#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mkdv/grid.hpp"

using namespace mkdv;

namespace {

double ground_state(double x) { return std::sqrt(2.0) / std::cosh(x); }

// Composite Simpson on [-a, a]; independent of the spectral quadrature path.
template <class Fn>
double simpson(Fn f, double a, int intervals) {
    const double h = 2.0 * a / intervals;
    double acc = f(-a) + f(a);
    for (int i = 1; i < intervals; ++i) acc += f(-a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("grid construction and wavenumber table") {
    auto g = make_grid(80.0, 1024);
    CHECK(g->dx == doctest::Approx(0.078125).epsilon(1e-15));
    CHECK(g->dx * g->n == doctest::Approx(80.0).epsilon(1e-15));

    auto g8 = make_grid(2.0 * M_PI, 8);
    for (int m = -4; m < 4; ++m) CHECK(g8->wavenumber(m) == doctest::Approx(m).epsilon(1e-14));
    // antisymmetric except the lone Nyquist entry
    for (int m = 1; m < 4; ++m)
        CHECK(g8->wavenumber(-m) == doctest::Approx(-g8->wavenumber(m)).epsilon(1e-14));

    CHECK_THROWS(make_grid(80.0, 7));
    CHECK_THROWS(make_grid(-1.0, 64));
    CHECK_THROWS(make_grid(10.0, 4));
}

TEST_CASE("spectral derivative of trigonometric fields") {
    auto g = make_grid(2.0 * M_PI, 64);
    Field f = sample(g, [](double x) { return std::sin(x); });
    Field d = spectral_derivative(f, 1);
    for (int i = 0; i < g->n; ++i)
        CHECK(d.v[i] == doctest::Approx(std::cos(g->x[i])).epsilon(1e-12));

    Field c = sample(g, [](double) { return 3.5; });
    CHECK(max_abs(spectral_derivative(c, 1)) < 1e-13);
}

TEST_CASE("soliton profile second derivative matches its elliptic identity") {
    auto g = make_grid(80.0, 2048);
    Field q = sample(g, ground_state);
    Field qxx = spectral_derivative(q, 2);
    for (int i = 0; i < g->n; ++i) {
        const double expected = q.v[i] - std::pow(q.v[i], 3);
        CHECK(std::fabs(qxx.v[i] - expected) < 1e-10);
    }
}

TEST_CASE("quadrature of the ground state") {
    auto g = make_grid(80.0, 2048);
    Field q = sample(g, ground_state);
    Field q2 = q * q;
    // antiderivative of 2 sech^2 is 2 tanh: the integral is exactly 4
    CHECK(integrate(q2) == doctest::Approx(4.0).epsilon(1e-10));

    Field zero(g);
    CHECK(integrate(zero) == 0.0);

    auto g2 = make_grid(2.0 * M_PI, 64);
    Field s = sample(g2, [](double x) { return std::sin(x); });
    CHECK(std::fabs(integrate(s)) < 1e-14);
}

TEST_CASE("sobolev norms of the ground state") {
    auto g = make_grid(80.0, 2048);
    Field q = sample(g, ground_state);
    CHECK(sobolev_norm(q, 0.0) == doctest::Approx(2.0).epsilon(1e-9));

    Field zero(g);
    CHECK(sobolev_norm(zero, 3.7) == 0.0);

    // independent oracle for the H1 content: Simpson quadrature of (q')^2
    const double qx2 = simpson(
        [](double x) {
            const double qp = -std::sqrt(2.0) * std::tanh(x) / std::cosh(x);
            return qp * qp;
        },
        40.0, 400000);
    CHECK(qx2 == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
    CHECK(sobolev_norm(q, 1.0) == doctest::Approx(std::sqrt(4.0 + qx2)).epsilon(1e-8));
}

TEST_CASE("parseval, derivative composition, and linearity") {
    auto g = make_grid(40.0, 256);
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        // random band-limited field
        Field f(g);
        for (int mode = 1; mode <= 40; ++mode) {
            const double a = gauss(rng), b = gauss(rng);
            const double k = g->wavenumber(mode);
            for (int i = 0; i < g->n; ++i)
                f.v[i] += a * std::cos(k * g->x[i]) + b * std::sin(k * g->x[i]);
        }
        const double n0 = sobolev_norm(f, 0.0);
        CHECK(std::fabs(n0 - std::sqrt(integrate(f * f))) <= 1e-12 * n0);

        Field d11 = spectral_derivative(spectral_derivative(f, 1), 1);
        Field d2 = spectral_derivative(f, 2);
        CHECK(sobolev_norm(d11 - d2, 0.0) <= 1e-10 * sobolev_norm(d2, 0.0));

        Field h(g);
        for (int i = 0; i < g->n; ++i) h.v[i] = std::cos(2.0 * M_PI * 3.0 * g->x[i] / 40.0);
        const double lin =
            integrate(2.5 * f + (-1.25) * h) - (2.5 * integrate(f) - 1.25 * integrate(h));
        CHECK(std::fabs(lin) < 1e-12 * (1.0 + std::fabs(integrate(f))));
    }
}

TEST_CASE("spectral derivative rejects out-of-range orders") {
    auto g = make_grid(10.0, 64);
    Field f(g);
    CHECK_THROWS(spectral_derivative(f, 0));
    CHECK_THROWS(spectral_derivative(f, 7));
    CHECK_THROWS(sobolev_norm(f, -1.0));
}
