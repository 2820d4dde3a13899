#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mkdv/solver.hpp"

using namespace mkdv;

TEST_CASE("zero stays zero and config validation rejects bad steps") {
    auto g = make_grid(80.0, 256);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    CHECK(max_abs(step(Field(g), cfg)) == 0.0);

    SolverConfig bad = cfg;
    bad.dt = 1.0;  // dt * kmax^3 blows past the budget on a fine grid
    auto gf = make_grid(80.0, 2048);
    CHECK_THROWS(validate_solver_config(bad, *gf));
    bad.dt = -1.0;
    CHECK_THROWS(validate_solver_config(bad, *g));
}

TEST_CASE("dealiased cube matches the exact cube of a band-limited field") {
    auto g = make_grid(2.0 * M_PI, 64);
    // u = cos(3x): u^3 = (3 cos(3x) + cos(9x))/4, fully inside the band
    Field u = sample(g, [](double x) { return std::cos(3.0 * x); });
    const Field cube = dealiased_cube(u);
    for (int i = 0; i < g->n; ++i) {
        const double expect = 0.25 * (3.0 * std::cos(3.0 * g->x[i]) + std::cos(9.0 * g->x[i]));
        CHECK(cube.v[i] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("traveling wave is propagated to spectral accuracy") {
    auto g = make_grid(80.0, 1024);
    const SolitonParams s{1.0, 1, 0.0};
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const Field u0 = eval_soliton(s, 0.0, g);
    const Trajectory traj = integrate_flow(u0, 0.0, 1.0, cfg);
    const Field expected = eval_soliton(s, 1.0, g);
    CHECK(sobolev_norm(traj.samples.back() - expected, 0.0) <= 1e-8);
}

TEST_CASE("one step forward then backward returns the state") {
    auto g = make_grid(80.0, 1024);
    const Field u0 = eval_soliton({1.0, 1, 0.0}, 0.0, g) +
                     eval_soliton({2.0, 1, -5.0}, 0.0, g);
    SolverConfig fwd;
    fwd.dt = 1e-3;
    SolverConfig bwd = fwd;
    bwd.direction = Direction::backward;
    const Field round = step(step(u0, fwd), bwd);
    CHECK(sobolev_norm(round - u0, 0.0) <= 1e-8);
}

TEST_CASE("zero-duration integration returns the input") {
    auto g = make_grid(80.0, 512);
    const Field u0 = eval_soliton({1.0, 1, 0.0}, 0.0, g);
    SolverConfig cfg;
    const Trajectory traj = integrate_flow(u0, 2.0, 2.0, cfg);
    CHECK(traj.times.size() == 1);
    CHECK(max_abs(traj.samples.front() - u0) == 0.0);
}

TEST_CASE("integration lands exactly on the requested endpoint") {
    auto g = make_grid(80.0, 512);
    const Field u0 = eval_soliton({1.0, 1, 0.0}, 0.0, g);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.sample_stride = 100;
    const Trajectory traj = integrate_flow(u0, 0.0, 0.2505, cfg);
    CHECK(traj.times.back() == doctest::Approx(0.2505).epsilon(1e-14));

    SolverConfig back = cfg;
    back.direction = Direction::backward;
    const Trajectory rej = integrate_flow(u0, 0.2505, 0.0, back);
    CHECK(rej.times.back() == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK_THROWS(integrate_flow(u0, 0.0, 1.0, back));
}

TEST_CASE("conservation drift through a two-soliton collision") {
    auto g = make_grid(80.0, 1024);
    // fast soliton starts behind and overtakes near t = 3
    ProfileSet ps = make_profile_set({SolitonParams{1.0, 1, 0.0}, SolitonParams{2.0, 1, -3.0}});
    const Field u0 = eval_profile_sum(ps, 0.0, g);
    SolverConfig cfg;
    cfg.dt = 2.5e-4;
    cfg.sample_stride = 2000;
    const Trajectory traj = integrate_flow(u0, 0.0, 5.0, cfg);
    const ConservedTriple ref = traj.conserved_series.front();
    for (const ConservedTriple& c : traj.conserved_series) {
        CHECK(std::fabs(c.mass - ref.mass) <= 1e-7 * std::fabs(ref.mass));
        CHECK(std::fabs(c.energy - ref.energy) <= 1e-7 * std::fabs(ref.energy));
        CHECK(std::fabs(c.second_energy - ref.second_energy) <=
              1e-7 * std::fabs(ref.second_energy));
    }
}

TEST_CASE("fourth-order convergence in the step size") {
    auto g = make_grid(80.0, 512);
    ProfileSet ps = make_profile_set({SolitonParams{1.0, 1, 0.0}, SolitonParams{2.0, 1, -3.0}});
    const Field u0 = eval_profile_sum(ps, 0.0, g);
    const double T = 0.5;

    auto terminal = [&](double dt, Scheme scheme) {
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.scheme = scheme;
        cfg.sample_stride = 1 << 20;  // endpoints only
        return integrate_flow(u0, 0.0, T, cfg).samples.back();
    };
    for (Scheme scheme : {Scheme::ETDRK4, Scheme::IFRK4}) {
        const Field ref = terminal(1.0 / 1024.0, scheme);
        const double e1 = sobolev_norm(terminal(1.0 / 128.0, scheme) - ref, 0.0);
        const double e2 = sobolev_norm(terminal(1.0 / 256.0, scheme) - ref, 0.0);
        const double ratio = e1 / e2;
        CHECK(ratio >= 12.0);
        CHECK(ratio <= 20.0);
    }
}

TEST_CASE("time-reversal symmetry through reflection") {
    auto g = make_grid(80.0, 1024);
    const Field u0 = eval_soliton({1.5, 1, 2.0}, 0.0, g) + eval_soliton({0.5, -1, -4.0}, 0.0, g);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.sample_stride = 1 << 20;
    const double T = 0.5;

    auto reflect = [](const Field& f) {
        Field out = f;
        // x -> -x on the grid [-L/2, L/2): index 0 is its own mirror image
        for (int i = 1; i < f.size(); ++i) out.v[i] = f.v[f.size() - i];
        return out;
    };
    const Field once = integrate_flow(u0, 0.0, T, cfg).samples.back();
    const Field back = reflect(integrate_flow(reflect(once), 0.0, T, cfg).samples.back());
    CHECK(sobolev_norm(back - u0, 0.0) <= 1e-7);
}

TEST_CASE("flow residual flags non-solutions") {
    auto gs = make_grid(80.0, 2048);
    ProfileObject real = SolitonParams{1.0, 1, 0.0};
    CHECK(pde_residual(real, 0.0, gs) < 1e-8);
    // sin(x) does not solve the flow
    auto g = make_grid(2.0 * M_PI * 8, 512);
    Field s = sample(g, [](double x) { return std::sin(x); });
    Field flux = spectral_derivative(s, 2);
    for (int i = 0; i < g->n; ++i) flux.v[i] += std::pow(s.v[i], 3);
    const double residual = max_abs(spectral_derivative(flux, 1));
    CHECK(residual > 0.1);
}
