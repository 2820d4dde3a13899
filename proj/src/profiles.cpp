#include "mkdv/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mkdv {

double velocity(const ProfileObject& obj) {
    return std::visit([](const auto& p) { return p.velocity(); }, obj);
}

AbPair ab_params(const ProfileObject& obj) {
    if (const auto* s = std::get_if<SolitonParams>(&obj)) return {0.0, std::sqrt(s->c)};
    const auto& b = std::get<BreatherParams>(obj);
    return {b.alpha, b.beta};
}

double ProfileSet::center(int j, double t) const {
    const ProfileObject& obj = objects.at(j);
    if (const auto* s = std::get_if<SolitonParams>(&obj)) return s->x0 + s->velocity() * t;
    const auto& b = std::get<BreatherParams>(obj);
    return -b.x2 + b.velocity() * t;
}

ProfileSet make_profile_set(std::vector<ProfileObject> objects) {
    for (const ProfileObject& obj : objects) {
        if (const auto* s = std::get_if<SolitonParams>(&obj)) {
            if (!(s->c > 0.0)) throw std::invalid_argument("soliton scale c must be positive");
            if (s->kappa != 1 && s->kappa != -1) throw std::invalid_argument("soliton sign must be +-1");
        } else {
            const auto& b = std::get<BreatherParams>(obj);
            if (!(b.alpha > 0.0) || !(b.beta > 0.0))
                throw std::invalid_argument("breather alpha, beta must be positive");
        }
    }
    std::stable_sort(objects.begin(), objects.end(),
                     [](const ProfileObject& a, const ProfileObject& b) {
                         return velocity(a) < velocity(b);
                     });

    ProfileSet ps;
    ps.objects = std::move(objects);
    ps.velocities.reserve(ps.objects.size());
    for (const ProfileObject& obj : ps.objects) ps.velocities.push_back(velocity(obj));

    double vmax = 0.0;
    for (double v : ps.velocities) vmax = std::max(vmax, std::fabs(v));
    for (size_t j = 1; j < ps.velocities.size(); ++j) {
        if (ps.velocities[j] - ps.velocities[j - 1] <= 1e-12 * (1.0 + vmax)) {
            std::ostringstream msg;
            msg << "profiles " << j - 1 << " and " << j << " share the velocity "
                << ps.velocities[j];
            throw std::invalid_argument(msg.str());
        }
    }

    ps.beta_min = std::numeric_limits<double>::infinity();
    for (const ProfileObject& obj : ps.objects) ps.beta_min = std::min(ps.beta_min, ab_params(obj).b);

    ps.tau = std::numeric_limits<double>::infinity();
    for (size_t j = 1; j < ps.velocities.size(); ++j)
        ps.tau = std::min(ps.tau, ps.velocities[j] - ps.velocities[j - 1]);

    ps.theta = ps.beta_min * ps.tau / 32.0;
    return ps;
}

double soliton_q(double c, double y) {
    return std::sqrt(2.0 * c) / std::cosh(std::sqrt(c) * y);
}

double soliton_q_deriv(double c, double y, int order) {
    const double rc = std::sqrt(c);
    const double q = soliton_q(c, y);
    const double th = std::tanh(rc * y);
    switch (order) {
        case 0: return q;
        case 1: return -rc * th * q;
        case 2: return c * q - q * q * q;
        case 3: return (c - 3.0 * q * q) * (-rc * th * q);
        default: throw std::invalid_argument("soliton derivative order must be in 0..3");
    }
}

Field eval_soliton(const SolitonParams& p, double t, const GridPtr& grid,
                   int x_order, int t_order) {
    if (x_order < 0 || x_order > 2) throw std::invalid_argument("x_order must be in 0..2");
    if (t_order < 0 || t_order > 1) throw std::invalid_argument("t_order must be in 0..1");
    const int total = x_order + t_order;
    const double factor = p.kappa * (t_order == 1 ? -p.c : 1.0);
    Field out(grid);
    for (int i = 0; i < out.size(); ++i) {
        const double y = grid->x[i] - p.x0 - p.c * t;
        out.v[i] = factor * soliton_q_deriv(p.c, y, total);
    }
    return out;
}

namespace {

// g and its partials in the phase variables; B = 2*sqrt(2)(g1+g2)/(1+g^2).
struct BreatherKernel {
    double g, g1, g2, g11, g12, g22;
};

BreatherKernel breather_kernel(const BreatherParams& p, double y1, double y2) {
    const double a = p.alpha, b = p.beta;
    const double s = std::sin(a * y1), co = std::cos(a * y1);
    const double sech = 1.0 / std::cosh(b * y2), th = std::tanh(b * y2);
    BreatherKernel k;
    k.g = (b / a) * s * sech;
    k.g1 = b * co * sech;
    k.g2 = -b * th * k.g;
    k.g11 = -a * a * k.g;
    k.g12 = -b * th * k.g1;
    k.g22 = b * b * (th * th - sech * sech) * k.g;
    return k;
}

double breather_value(const BreatherKernel& k) {
    const double d = 1.0 + k.g * k.g;
    return 2.0 * std::sqrt(2.0) * (k.g1 + k.g2) / d;
}

// dB/dy1 and dB/dy2 from the quotient rule.
double breather_partial(const BreatherKernel& k, int which) {
    const double d = 1.0 + k.g * k.g;
    const double gi = (which == 1) ? k.g1 : k.g2;
    const double num = (which == 1) ? (k.g11 + k.g12) : (k.g12 + k.g22);
    return 2.0 * std::sqrt(2.0) * (num * d - 2.0 * k.g * gi * (k.g1 + k.g2)) / (d * d);
}

}  // namespace

Field eval_breather(const BreatherParams& p, double t, const GridPtr& grid,
                    int x_order, int t_order, BreatherPart which) {
    if (x_order < 0 || x_order > 2) throw std::invalid_argument("x_order must be in 0..2");
    if (t_order < 0 || t_order > 1) throw std::invalid_argument("t_order must be in 0..1");
    if (which != BreatherPart::value && (x_order != 0 || t_order != 0))
        throw std::invalid_argument("parameter partials are evaluated at order (0,0)");
    if (which == BreatherPart::value && t_order == 1 && x_order != 0)
        throw std::invalid_argument("mixed x/t orders are not provided");

    Field out(grid);
    for (int i = 0; i < out.size(); ++i) {
        const double y1 = grid->x[i] + p.delta() * t + p.x1;
        const double y2 = grid->x[i] + p.gamma() * t + p.x2;
        const BreatherKernel k = breather_kernel(p, y1, y2);
        double val = 0.0;
        switch (which) {
            case BreatherPart::d_x1: val = breather_partial(k, 1); break;
            case BreatherPart::d_x2: val = breather_partial(k, 2); break;
            case BreatherPart::value:
                if (t_order == 1)
                    val = p.delta() * breather_partial(k, 1) + p.gamma() * breather_partial(k, 2);
                else if (x_order == 0)
                    val = breather_value(k);
                else if (x_order == 1)
                    val = breather_partial(k, 1) + breather_partial(k, 2);
                break;
        }
        out.v[i] = val;
    }
    if (which == BreatherPart::value && t_order == 0 && x_order == 2) {
        Field base(grid);
        for (int i = 0; i < base.size(); ++i) {
            const double y1 = grid->x[i] + p.delta() * t + p.x1;
            const double y2 = grid->x[i] + p.gamma() * t + p.x2;
            base.v[i] = breather_value(breather_kernel(p, y1, y2));
        }
        out = spectral_derivative(base, 2);
    }
    return out;
}

Field eval_profile(const ProfileObject& obj, double t, const GridPtr& grid, int x_order) {
    if (const auto* s = std::get_if<SolitonParams>(&obj)) return eval_soliton(*s, t, grid, x_order, 0);
    return eval_breather(std::get<BreatherParams>(obj), t, grid, x_order, 0);
}

Field eval_profile_time_derivative(const ProfileObject& obj, double t, const GridPtr& grid) {
    if (const auto* s = std::get_if<SolitonParams>(&obj)) return eval_soliton(*s, t, grid, 0, 1);
    return eval_breather(std::get<BreatherParams>(obj), t, grid, 0, 1);
}

Field eval_profile_sum(const ProfileSet& ps, double t, const GridPtr& grid, int x_order) {
    Field out(grid);
    for (const ProfileObject& obj : ps.objects) out += eval_profile(obj, t, grid, x_order);
    return out;
}

Field eval_soliton_modulated(const SolitonParams& p, double dc, double dx0, double t,
                             const GridPtr& grid, int x_order) {
    if (!(p.c + dc > 0.0)) throw std::invalid_argument("modulated scale c + dc must stay positive");
    SolitonParams shifted = p;
    shifted.c = p.c + dc;
    // Keep the original phase speed: x - x0 + dx0 - c t == x - x0_eff - (c+dc) t.
    shifted.x0 = p.x0 - dx0 - dc * t;
    return eval_soliton(shifted, t, grid, x_order, 0);
}

Field eval_soliton_scale_derivative(const SolitonParams& p, double dc, double dx0, double t,
                                    const GridPtr& grid) {
    const double c_mod = p.c + dc;
    Field out(grid);
    for (int i = 0; i < out.size(); ++i) {
        const double y = grid->x[i] - p.x0 + dx0 - p.c * t;
        out.v[i] = p.kappa / (2.0 * c_mod) *
                   (soliton_q(c_mod, y) + y * soliton_q_deriv(c_mod, y, 1));
    }
    return out;
}

}  // namespace mkdv
