#pragma once

#include <array>
#include <vector>

#include "mkdv/cutoffs.hpp"
#include "mkdv/grid.hpp"
#include "mkdv/profiles.hpp"

namespace mkdv {

struct ModulationOptions {
    double tolerance = 1e-11;  // max orthogonality residual at convergence
    int max_iterations = 50;
    double basin_radius = 0.1;  // admissible ||u - P(t)||_{H2}
    double rcond_min = 1e-8;    // Jacobian conditioning floor
};

// Per-object parameter pairs, in the profile-set order:
//   breather -> (x1 shift, x2 shift)
//   soliton  -> (x0 shift, c shift), entering as
//               kappa Q_{c+dc}(x - x0 + dx0 - c t).
struct ModulationResult {
    std::vector<std::array<double, 2>> params;
    Field epsilon;
    std::vector<double> residuals;  // two per object, matching condition order
    int iterations = 0;
    bool converged = false;
};

// Newton solve of the weighted orthogonality conditions
//   int dB/dx1 eps sqrt(phi) = int dB/dx2 eps sqrt(phi) = 0   (breathers)
//   int dR/dx  eps sqrt(phi) = int R      eps sqrt(phi) = 0   (solitons)
// with eps = u - sum of modulated objects. phi holds one weight field per
// object (pass all-ones fields for global products). Throws std::domain_error
// outside the basin and std::runtime_error on an ill-conditioned Jacobian.
ModulationResult modulate(const Field& u, const ProfileSet& ps, double t,
                          const std::vector<Field>& phi, const ModulationOptions& opt = {});

// Single-object decomposition with unweighted products; only object j is
// modulated. For a soliton y1 is the scale shift and y2 the translation
// (kappa Q_{c+y1}(x - x0 + y2 - c t)); for a breather (y1, y2) shift (x1, x2).
struct SingleModulationResult {
    double y1 = 0.0;
    double y2 = 0.0;
    Field w;
    std::array<double, 2> residuals{0.0, 0.0};
    int iterations = 0;
    bool converged = false;
};

SingleModulationResult modulate_single(const Field& u, const ProfileSet& ps, int j, double t,
                                       const ModulationOptions& opt = {});

// Determinant of the base-point Newton matrix (all parameters zero) with the
// given weights.
double jacobian_determinant(const ProfileSet& ps, double t, const GridPtr& grid,
                            const std::vector<Field>& phi);

// Product over the objects of the unweighted single-object block
// determinants; the full determinant approaches this as the objects separate.
double jacobian_block_product(const ProfileSet& ps, double t, const GridPtr& grid);

// Convenience: one all-ones weight per object.
std::vector<Field> global_weights(const ProfileSet& ps, const GridPtr& grid);

}  // namespace mkdv
