#include "mkdv/functionals.hpp"

#include <cmath>
#include <stdexcept>

namespace mkdv {

namespace {

struct Densities {
    Field mass;    // u^2 / 2
    Field energy;  // u_x^2/2 - u^4/4
    Field second;  // u_xx^2/2 - 5/2 u^2 u_x^2 + u^6/4
};

// All derivatives are spectral so the same path serves sampled numerical
// solutions and exact profiles alike.
Densities densities(const Field& u) {
    require_finite(u, "conserved-density input");
    const Field ux = spectral_derivative(u, 1);
    const Field uxx = spectral_derivative(u, 2);
    Densities d{Field(u.grid), Field(u.grid), Field(u.grid)};
    for (int i = 0; i < u.size(); ++i) {
        const double a = u.v[i], ax = ux.v[i], axx = uxx.v[i];
        const double a2 = a * a;
        d.mass.v[i] = 0.5 * a2;
        d.energy.v[i] = 0.5 * ax * ax - 0.25 * a2 * a2;
        d.second.v[i] = 0.5 * axx * axx - 2.5 * a2 * ax * ax + 0.25 * a2 * a2 * a2;
    }
    return d;
}

}  // namespace

ConservedTriple conserved(const Field& u) {
    const Densities d = densities(u);
    return {integrate(d.mass), integrate(d.energy), integrate(d.second)};
}

LocalizedSeries localized_conserved(const Field& u, const std::vector<Field>& weights,
                                    LocalizedVariant variant) {
    const Densities d = densities(u);
    LocalizedSeries out;
    out.variant = variant;
    for (const Field& w : weights) {
        require_same_grid(u, w);
        Field eff = w;
        if (variant == LocalizedVariant::sqrt_phi)
            for (double& x : eff.v) x = std::sqrt(std::max(0.0, x));
        out.mass.push_back(inner_product(d.mass, eff));
        out.energy.push_back(inner_product(d.energy, eff));
        out.second_energy.push_back(inner_product(d.second, eff));
    }
    return out;
}

double lyapunov(const Field& u, const ProfileSet& ps, const std::vector<Field>& weights) {
    if (static_cast<int>(weights.size()) != ps.size())
        throw std::invalid_argument("one weight per profile object expected");
    const LocalizedSeries loc = localized_conserved(u, weights, LocalizedVariant::phi);
    double acc = conserved(u).second_energy;
    for (int j = 0; j < ps.size(); ++j) {
        const AbPair ab = ab_params(ps.objects[j]);
        const double a2 = ab.a * ab.a, b2 = ab.b * ab.b;
        acc += 2.0 * (b2 - a2) * loc.energy[j] + (a2 + b2) * (a2 + b2) * loc.mass[j];
    }
    return acc;
}

double lyapunov_single(const Field& u, const AbPair& ab, const Field& weight) {
    const LocalizedSeries loc = localized_conserved(u, {weight}, LocalizedVariant::phi);
    const double a2 = ab.a * ab.a, b2 = ab.b * ab.b;
    return loc.second_energy[0] + 2.0 * (b2 - a2) * loc.energy[0] +
           (a2 + b2) * (a2 + b2) * loc.mass[0];
}

TaylorIdentityReport soliton_taylor_identities(const GridPtr& grid,
                                               const std::vector<double>& scales) {
    TaylorIdentityReport rep;
    const Field q = eval_soliton({1.0, 1, 0.0}, 0.0, grid);
    rep.ground_state = conserved(q);
    const double m = rep.ground_state.mass, e = rep.ground_state.energy,
                 f = rep.ground_state.second_energy;
    rep.combo_first = 2.5 * f + 3.0 * e + 0.5 * m;
    rep.combo_second = 15.0 / 8.0 * f + 0.75 * e - 0.125 * m;
    rep.combo_invariant = f + 2.0 * e + m;
    for (double c : scales) {
        const ConservedTriple tr = conserved(eval_soliton({c, 1, 0.0}, 0.0, grid));
        rep.scales.push_back(c);
        rep.r_measured.push_back(tr.second_energy + 2.0 * c * tr.energy + c * c * tr.mass);
        rep.r_expected.push_back(16.0 / 15.0 * std::pow(c, 2.5));
    }
    return rep;
}

}  // namespace mkdv
