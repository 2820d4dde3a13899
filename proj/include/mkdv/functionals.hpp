#pragma once

#include <vector>

#include "mkdv/cutoffs.hpp"
#include "mkdv/grid.hpp"
#include "mkdv/profiles.hpp"

namespace mkdv {

// Mass, energy, and second energy:
//   M = 1/2 int u^2
//   E = 1/2 int u_x^2 - 1/4 int u^4
//   F = 1/2 int u_xx^2 - 5/2 int u^2 u_x^2 + 1/4 int u^6
struct ConservedTriple {
    double mass = 0.0;
    double energy = 0.0;
    double second_energy = 0.0;
};

ConservedTriple conserved(const Field& u);

// Closed-form values for the ground state q = Q_1.
constexpr double kGroundStateMass = 2.0;
constexpr double kGroundStateEnergy = -2.0 / 3.0;
constexpr double kGroundStateSecondEnergy = 2.0 / 5.0;

// The three densities integrated against moving weights. One entry per
// weight field handed in.
enum class LocalizedVariant { phi, sqrt_phi, step };

struct LocalizedSeries {
    LocalizedVariant variant = LocalizedVariant::phi;
    std::vector<double> mass;
    std::vector<double> energy;
    std::vector<double> second_energy;
};

LocalizedSeries localized_conserved(const Field& u, const std::vector<Field>& weights,
                                    LocalizedVariant variant);

// F[u] + sum_j [ 2(b_j^2-a_j^2) E_j + (a_j^2+b_j^2)^2 M_j ] with E_j, M_j
// localized against weights[j] (pass all-ones fields for the global form).
double lyapunov(const Field& u, const ProfileSet& ps, const std::vector<Field>& weights);

// Single-object variant F_w + 2(b^2-a^2) E_w + (a^2+b^2)^2 M_w against one
// weight field.
double lyapunov_single(const Field& u, const AbPair& ab, const Field& weight);

// Evaluates the vanishing Taylor combinations of (M,E,F)[q] and the invariant
// combination R(c) = F + 2cE + c^2 M = (16/15) c^(5/2) for Q_c.
struct TaylorIdentityReport {
    ConservedTriple ground_state;
    double combo_first = 0.0;    // (5/2)F + 3E + (1/2)M
    double combo_second = 0.0;   // (15/8)F + (3/4)E - (1/8)M
    double combo_invariant = 0.0;  // F + 2E + M  (= 16/15)
    std::vector<double> scales;
    std::vector<double> r_measured;
    std::vector<double> r_expected;  // (16/15) c^(5/2)
};

TaylorIdentityReport soliton_taylor_identities(const GridPtr& grid,
                                               const std::vector<double>& scales = {0.5, 1.0, 2.0});

}  // namespace mkdv
