#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mkdv/grid.hpp"
#include "mkdv/profiles.hpp"
#include "mkdv/solver.hpp"

using namespace mkdv;

TEST_CASE("soliton evaluation against the closed form") {
    auto g = make_grid(80.0, 1024);
    const SolitonParams p{1.0, 1, 0.0};
    const Field u = eval_soliton(p, 0.0, g);
    int i0 = g->n / 2;  // x = 0
    CHECK(g->x[i0] == doctest::Approx(0.0));
    CHECK(u.v[i0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    const SolitonParams p2{2.0, -1, 3.0};
    const Field u2 = eval_soliton(p2, 1.0, g);
    // peak sits at x = x0 + c t = 5 with value -sqrt(2c) = -2
    int ipe = static_cast<int>((5.0 + 40.0) / g->dx);
    CHECK(g->x[ipe] == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(u2.v[ipe] == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("soliton x-derivatives satisfy the defining identities") {
    auto g = make_grid(80.0, 1024);
    const SolitonParams p{1.3, 1, -2.0};
    const Field u = eval_soliton(p, 0.4, g);
    const Field uxx = eval_soliton(p, 0.4, g, 2, 0);
    for (int i = 0; i < g->n; ++i)
        CHECK(uxx.v[i] ==
              doctest::Approx(p.c * u.v[i] - std::pow(u.v[i], 3)).epsilon(1e-10).scale(1.0));

    // time derivative is -c times the space derivative
    const Field ut = eval_soliton(p, 0.4, g, 0, 1);
    const Field ux = eval_soliton(p, 0.4, g, 1, 0);
    for (int i = 0; i < g->n; i += 37)
        CHECK(ut.v[i] == doctest::Approx(-p.c * ux.v[i]).epsilon(1e-13).scale(1.0));
}

TEST_CASE("breather value and partials against finite differences") {
    auto g = make_grid(80.0, 2048);
    const BreatherParams b{1.0, 1.0, 0.0, 0.0};
    const Field u = eval_breather(b, 0.0, g);
    int i0 = g->n / 2;
    CHECK(u.v[i0] == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));

    // oracle: centered finite differences of 2 sqrt(2) arctan(g) in x
    auto arctan_g = [&](double x, double t) {
        const double y1 = x + b.delta() * t + b.x1;
        const double y2 = x + b.gamma() * t + b.x2;
        return 2.0 * std::sqrt(2.0) *
               std::atan(b.beta / b.alpha * std::sin(b.alpha * y1) / std::cosh(b.beta * y2));
    };
    const double h = 1e-6;
    for (int i = g->n / 4; i < 3 * g->n / 4; i += 101) {
        const double x = g->x[i];
        const double fd = (arctan_g(x + h, 0.0) - arctan_g(x - h, 0.0)) / (2.0 * h);
        CHECK(u.v[i] == doctest::Approx(fd).epsilon(1e-8).scale(1.0));
    }

    // parameter partials vs finite differences in x1, x2
    const Field d1 = eval_breather(b, 0.3, g, 0, 0, BreatherPart::d_x1);
    const Field d2 = eval_breather(b, 0.3, g, 0, 0, BreatherPart::d_x2);
    const double hp = 1e-6;
    BreatherParams bp = b, bm = b;
    bp.x1 += hp;
    bm.x1 -= hp;
    const Field up = eval_breather(bp, 0.3, g), um = eval_breather(bm, 0.3, g);
    BreatherParams cp = b, cm = b;
    cp.x2 += hp;
    cm.x2 -= hp;
    const Field vp = eval_breather(cp, 0.3, g), vm = eval_breather(cm, 0.3, g);
    double scale = std::max(max_abs(d1), max_abs(d2));
    for (int i = 0; i < g->n; i += 53) {
        CHECK(std::fabs(d1.v[i] - (up.v[i] - um.v[i]) / (2.0 * hp)) < 1e-8 * scale + 1e-9);
        CHECK(std::fabs(d2.v[i] - (vp.v[i] - vm.v[i]) / (2.0 * hp)) < 1e-8 * scale + 1e-9);
    }

    // time derivative vs finite differences in t
    const Field dt = eval_breather(b, 0.3, g, 0, 1);
    const Field tp = eval_breather(b, 0.3 + hp, g), tm = eval_breather(b, 0.3 - hp, g);
    for (int i = 0; i < g->n; i += 53)
        CHECK(std::fabs(dt.v[i] - (tp.v[i] - tm.v[i]) / (2.0 * hp)) < 1e-7 * max_abs(dt) + 1e-9);
}

TEST_CASE("half-period shift of x1 negates a breather") {
    auto g = make_grid(80.0, 1024);
    const BreatherParams b{1.4, 0.9, 0.2, -0.3};
    BreatherParams shifted = b;
    shifted.x1 += M_PI / b.alpha;
    const Field u = eval_breather(b, 0.5, g);
    const Field w = eval_breather(shifted, 0.5, g);
    CHECK(max_abs(u + w) < 1e-12);
}

TEST_CASE("breather decay envelope") {
    auto g = make_grid(80.0, 2048);
    const BreatherParams b{1.0, 1.0, 0.0, 0.0};
    const double t = 2.0;
    const Field u = eval_breather(b, t, g);
    const double v = b.velocity();
    for (int i = 0; i < g->n; i += 17) {
        const double r = std::fabs(g->x[i] - v * t);
        if (r < 25.0) CHECK(std::fabs(u.v[i]) <= 20.0 * std::exp(-b.beta * r));
    }
}

TEST_CASE("profile sets order by velocity and expose derived constants") {
    const BreatherParams b{1.0, 1.0, 0.0, 0.0};  // velocity -2
    const SolitonParams s{1.0, 1, 0.0};
    ProfileSet ps = make_profile_set({s, b});
    CHECK(ps.velocities[0] == doctest::Approx(-2.0));
    CHECK(ps.velocities[1] == doctest::Approx(1.0));
    CHECK(ps.beta_min == doctest::Approx(1.0));
    CHECK(ps.tau == doctest::Approx(3.0));
    CHECK(ps.theta == doctest::Approx(3.0 / 32.0));

    ProfileSet two = make_profile_set({SolitonParams{2.0, 1, 0.0}, SolitonParams{1.0, 1, 0.0}});
    CHECK(two.tau == doctest::Approx(1.0));
    CHECK(two.beta_min == doctest::Approx(1.0));
    CHECK(two.theta == doctest::Approx(1.0 / 32.0));

    // breather with velocity 1 collides with the c=1 soliton
    const BreatherParams collide{1.0, 2.0, 0.0, 0.0};
    CHECK(collide.velocity() == doctest::Approx(1.0));
    CHECK_THROWS(make_profile_set({SolitonParams{1.0, 1, 0.0}, collide}));
}

TEST_CASE("profile sums reduce to members") {
    auto g = make_grid(80.0, 1024);
    ProfileSet empty = make_profile_set({});
    CHECK(max_abs(eval_profile_sum(empty, 1.0, g)) == 0.0);

    const SolitonParams s{1.0, 1, 0.0};
    ProfileSet one = make_profile_set({s});
    const Field diff = eval_profile_sum(one, 2.0, g) - eval_soliton(s, 2.0, g);
    CHECK(max_abs(diff) == 0.0);
}

TEST_CASE("far from a fast soliton the pair sum matches the soliton alone") {
    auto g = make_grid(160.0, 2048);
    const SolitonParams s{1.0, 1, 0.0};
    const BreatherParams b{2.0, 1.0, 0.0, 0.0};  // velocity 1 - 12 = -11
    ProfileSet ps = make_profile_set({s, b});
    const double t = 5.0;
    const Field sum = eval_profile_sum(ps, t, g);
    const Field alone = eval_soliton(s, t, g);
    double worst = 0.0;
    for (int i = 0; i < g->n; ++i)
        if (std::fabs(g->x[i] - 5.0) < 2.0) worst = std::max(worst, std::fabs(sum.v[i] - alone.v[i]));
    CHECK(worst <= 10.0 * std::exp(-ps.beta_min * ps.tau * t / 2.0));
}

TEST_CASE("profiles solve the flow equation") {
    auto g = make_grid(80.0, 2048);
    CHECK(pde_residual(SolitonParams{2.0, 1, 0.0}, 1.3, g) < 1e-8);
    CHECK(pde_residual(SolitonParams{0.7, -1, 4.0}, 0.0, g) < 1e-8);
    CHECK(pde_residual(BreatherParams{1.0, 1.0, 0.0, 0.0}, 0.4, g) < 1e-6);
    // the wide slow-decay breather needs the box rule's larger half-length
    auto gw = make_grid(192.0, 2048);
    CHECK(pde_residual(BreatherParams{2.0, 0.7, 1.0, -0.5}, 1.1, gw) < 1e-6);
}

TEST_CASE("modulated soliton keeps the original phase speed") {
    auto g = make_grid(80.0, 1024);
    const SolitonParams s{1.5, 1, 1.0};
    const double dc = 0.02, dx0 = 0.3, t = 2.0;
    const Field u = eval_soliton_modulated(s, dc, dx0, t, g);
    Field ref(g);
    for (int i = 0; i < g->n; ++i) {
        const double y = g->x[i] - s.x0 + dx0 - s.c * t;
        ref.v[i] = soliton_q(s.c + dc, y);
    }
    CHECK(max_abs(u - ref) < 1e-13);

    // scale derivative against finite differences in dc
    const Field dscale = eval_soliton_scale_derivative(s, dc, dx0, t, g);
    const double h = 1e-6;
    const Field up = eval_soliton_modulated(s, dc + h, dx0, t, g);
    const Field um = eval_soliton_modulated(s, dc - h, dx0, t, g);
    for (int i = 0; i < g->n; i += 41)
        CHECK(std::fabs(dscale.v[i] - (up.v[i] - um.v[i]) / (2.0 * h)) < 1e-7);
}
