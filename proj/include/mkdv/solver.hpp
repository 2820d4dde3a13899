#pragma once

#include <functional>
#include <vector>

#include "mkdv/functionals.hpp"
#include "mkdv/grid.hpp"
#include "mkdv/profiles.hpp"

namespace mkdv {

enum class Scheme { ETDRK4, IFRK4 };
enum class Direction { forward, backward };

// u_t = -u_xxx - (u^3)_x. The linear dispersion is integrated exactly; the
// cubic term is dealiased by zero padding to 2N modes with Nyquist zeroing.
struct SolverConfig {
    double dt = 1e-3;  // step magnitude, > 0
    Direction direction = Direction::forward;
    Scheme scheme = Scheme::ETDRK4;
    bool dealias = true;
    int sample_stride = 1;
};

// Throws when the config is out of range for the grid (dt * max|k|^3 beyond
// the scheme's nonlinear-accuracy budget).
void validate_solver_config(const SolverConfig& cfg, const PeriodicGrid& grid);

// One time step of the configured scheme.
Field step(const Field& u, const SolverConfig& cfg);

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> samples;
    std::vector<ConservedTriple> conserved_series;
};

using Observer = std::function<void(double t, const Field& u)>;

// Repeated stepping from t0 to t1 (sign consistent with cfg.direction), with
// samples every cfg.sample_stride steps plus the endpoints; the final step is
// shortened to land exactly on t1. Aborts on NaN (with the step index) or on
// H2 blow-up beyond 1000x the initial norm.
Trajectory integrate_flow(const Field& u0, double t0, double t1, const SolverConfig& cfg,
                          const std::vector<Observer>& observers = {});

// max-norm of u_t + (u_xx + u^3)_x for an exact profile, with the analytic
// time derivative and spectral space derivatives.
double pde_residual(const ProfileObject& obj, double t, const GridPtr& grid);

// Dealiased u^3 (2x zero padding, Nyquist zeroed); exposed for tests.
Field dealiased_cube(const Field& u);

}  // namespace mkdv
