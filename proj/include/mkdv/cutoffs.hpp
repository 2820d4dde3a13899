#pragma once

#include <optional>
#include <vector>

#include "mkdv/grid.hpp"
#include "mkdv/profiles.hpp"

namespace mkdv {

// C^3 transition cutoff: 0 for x <= -1, 1 for x >= 1, and
// (1+x)^4 / ((1+x)^4 + (1-x)^4) in between. order in 0..3.
double psi_eval(double x, int order);

// Moving partition of unity riding the mean velocities sigma_j. phi[j]
// isolates object j; phi1/phi2 are the matching psi'/psi'' combinations
// (multiply by 1/(delta t) resp. 1/(delta t)^2 for actual x-derivatives).
struct PhiWeights {
    double t = 0.0;
    double delta = 0.0;
    std::vector<Field> phi;
    std::vector<Field> phi1;
    std::vector<Field> phi2;

    int size() const { return static_cast<int>(phi.size()); }
};

double default_delta(const ProfileSet& ps);

// shifts, when given, hold one offset per transition (J-1 values): the
// initial-position midpoints added to sigma_j t.
PhiWeights phi_weights(const ProfileSet& ps, double t, const GridPtr& grid, double delta,
                       const std::optional<std::vector<double>>& shifts = std::nullopt);

// Monotone step (2/pi) arctan(exp(-sqrt(sigma) x / 2)): 1 at -inf, 0 at +inf.
// order in 0..3.
double arctan_step(double x, double sigma, int order);

// Steps located at the velocity midpoints. Phi[0] == 0 and Phi[J] == 1
// identically; chi[j] = Phi[j+1] - Phi[j] >= 0 isolates object j.
struct PhiSteps {
    double t = 0.0;
    double sigma = 0.0;
    std::vector<double> midpoints;  // m_j for the interior steps
    std::vector<Field> Phi;         // J+1 fields
    std::vector<Field> chi;         // J fields

    int size() const { return static_cast<int>(Phi.size()); }
};

double default_sigma(const ProfileSet& ps);
double min_velocity_midpoint_gap(const ProfileSet& ps);  // tau_0

PhiSteps step_weights(const ProfileSet& ps, double t, const GridPtr& grid, double sigma);

}  // namespace mkdv
