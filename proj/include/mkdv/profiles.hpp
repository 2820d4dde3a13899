#pragma once

#include <variant>
#include <vector>

#include "mkdv/grid.hpp"

namespace mkdv {

// Traveling wave kappa * Q_c(x - x0 - c t) with Q_c = sqrt(2c)/cosh(sqrt(c) x).
struct SolitonParams {
    double c = 1.0;
    int kappa = 1;  // +1 or -1
    double x0 = 0.0;

    double velocity() const { return c; }
};

// Localized, shape-periodic solution generated by
//   2*sqrt(2) d/dx arctan((beta/alpha) sin(alpha y1)/cosh(beta y2)),
// y1 = x + delta t + x1, y2 = x + gamma t + x2. Travels at beta^2 - 3 alpha^2.
struct BreatherParams {
    double alpha = 1.0;
    double beta = 1.0;
    double x1 = 0.0;
    double x2 = 0.0;

    double delta() const { return alpha * alpha - 3.0 * beta * beta; }
    double gamma() const { return 3.0 * alpha * alpha - beta * beta; }
    double velocity() const { return beta * beta - 3.0 * alpha * alpha; }
};

using ProfileObject = std::variant<SolitonParams, BreatherParams>;

double velocity(const ProfileObject& obj);

// (a, b) coefficient pair: (alpha, beta) for a breather, (0, sqrt(c)) for a
// soliton. These weight the localized energies in the Lyapunov functional.
struct AbPair {
    double a = 0.0;
    double b = 0.0;
};
AbPair ab_params(const ProfileObject& obj);

// Ordered collection with distinct velocities and derived separation data.
struct ProfileSet {
    std::vector<ProfileObject> objects;  // sorted by increasing velocity
    std::vector<double> velocities;
    double beta_min = 0.0;  // min over {beta_k} and {sqrt(c_l)}
    double tau = 0.0;       // min gap between consecutive velocities (inf if J<2)
    double theta = 0.0;     // beta_min * tau / 32

    int size() const { return static_cast<int>(objects.size()); }

    // Center of mass x_j(t): -x2 + v t for a breather, x0 + v t for a soliton.
    double center(int j, double t) const;
};

// Sorts by velocity and computes derived constants; rejects duplicate
// velocities naming the offending pair.
ProfileSet make_profile_set(std::vector<ProfileObject> objects);

// Scalar soliton profile helpers (argument already shifted).
double soliton_q(double c, double y);         // Q_c(y)
double soliton_q_deriv(double c, double y, int order);  // d^order/dy^order, order in 0..3

// kappa * d_x^{x_order} d_t^{t_order} Q_c(x - x0 - c t); time derivatives are
// applied symbolically via d_t = -c d_x. x_order in 0..2, t_order in 0..1.
Field eval_soliton(const SolitonParams& p, double t, const GridPtr& grid,
                   int x_order = 0, int t_order = 0);

enum class BreatherPart { value, d_x1, d_x2 };

// Breather evaluation. For value: x_order in 0..2 (order 2 is spectral),
// t_order in 0..1 (closed form delta*dB/dy1 + gamma*dB/dy2, x_order must be 0).
// For d_x1/d_x2: the closed-form first partials dB/dy1, dB/dy2 (orders must
// be 0).
Field eval_breather(const BreatherParams& p, double t, const GridPtr& grid,
                    int x_order = 0, int t_order = 0,
                    BreatherPart which = BreatherPart::value);

// Generic single-object evaluation (x_order 0..2).
Field eval_profile(const ProfileObject& obj, double t, const GridPtr& grid, int x_order = 0);
Field eval_profile_time_derivative(const ProfileObject& obj, double t, const GridPtr& grid);

// Pointwise sum of member evaluations at matching order.
Field eval_profile_sum(const ProfileSet& ps, double t, const GridPtr& grid, int x_order = 0);

// Modulated soliton kappa * Q_{c+dc}(x - x0 + dx0 - c t): the shifted scale
// rides at the original phase speed c.
Field eval_soliton_modulated(const SolitonParams& p, double dc, double dx0, double t,
                             const GridPtr& grid, int x_order = 0);

// Derivative of the modulated soliton with respect to the scale shift:
// kappa/(2(c+dc)) * (Q + y Q_y) evaluated at y = x - x0 + dx0 - c t.
Field eval_soliton_scale_derivative(const SolitonParams& p, double dc, double dx0, double t,
                                    const GridPtr& grid);

}  // namespace mkdv
