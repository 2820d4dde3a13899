#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mkdv/cutoffs.hpp"
#include "mkdv/grid.hpp"
#include "mkdv/profiles.hpp"

namespace mkdv {

// Residual field of the fourth-order elliptic equation
//   A_4x - 2(b^2-a^2)(A_xx + A^3) + (a^2+b^2)^2 A + 5 A A_x^2 + 5 A^2 A_xx + (3/2) A^5
// with (a,b) = (alpha,beta) for a breather and (0,sqrt(c)) for a soliton.
// Derivatives are spectral.
Field elliptic_residual_field(const Field& background, const AbPair& ab);

double soliton_elliptic_residual(double c, const GridPtr& grid);
double breather_elliptic_residual(const BreatherParams& p, double t, const GridPtr& grid);

// For the scale-shifted soliton Q_{c+dc} the same expression taken at the
// unshifted scale c equals 2 dc (Q_xx + Q^3) - 2 c dc Q - dc^2 Q; both sides
// are returned for pointwise comparison.
struct ModulatedEllipticCheck {
    Field lhs;
    Field rhs;
};
ModulatedEllipticCheck modulated_soliton_elliptic_check(const SolitonParams& p, double dc,
                                                        double t, const GridPtr& grid);

// Quadratic form around the background A:
//   1/2 int e_xx^2 - 5/2 int A^2 e_x^2 + 5/2 int A_x^2 e^2 + 5 int A A_xx e^2
//   + 15/4 int A^4 e^2 + (b^2-a^2)(int e_x^2 - 3 int A^2 e^2)
//   + (a^2+b^2)^2/2 int e^2.
double qform(const Field& eps, const Field& background, const AbPair& ab);

// Multi-object expansion: same shape with per-object coefficients weighted by
// weights[j] and a caller-supplied background (profile sum, modulated sum, or
// a numerical solution).
double h2_form(const Field& eps, const Field& background, const ProfileSet& ps,
               const std::vector<Field>& weights);

// Null directions of the linearized operator: {Q_y, Q + y Q_y} for a soliton
// (y the comoving coordinate), {dB/dx1, dB/dx2} for a breather.
std::vector<Field> kernel_basis(const ProfileObject& obj, double t, const GridPtr& grid);

// max over the grid of |2 Q_y^2 - Q Q_yy - c Q^2| with spectral derivatives.
double wronskian_deviation(double c, const GridPtr& grid);

// Dense symmetric discretization of the quadratic form: x^T mat x == qform(x).
struct SymmetricOperator {
    Eigen::MatrixXd mat;
    GridPtr grid;
    AbPair ab;
    Field background;
};

SymmetricOperator assemble_operator(const Field& background, const AbPair& ab);

// Plain spectrum of the discretized form (quadrature-weighted matrix).
struct OperatorSpectrum {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // columns
    int negative_count = 0;        // lambda < -tol
    int near_zero_count = 0;       // |lambda| <= tol
};
OperatorSpectrum operator_spectrum(const SymmetricOperator& op, double tol = 1e-6);

// Largest L2-subspace correlation between a spectrum column and the span of
// the given basis fields (1.0 = contained in the span).
double subspace_correlation(const Field& vec, const std::vector<Field>& basis);

// min of x^T A x / ||x||_{H2}^2 over x that are L2-orthogonal to every
// constraint; empty constraint list gives the global minimum. The H2 metric
// is the Fourier multiplier (1+k^2)^2.
double constrained_min_eigenvalue(const SymmetricOperator& op,
                                  const std::vector<Field>& constraints);

// ||A k|| / ||k|| column residuals for kernel candidates.
double operator_kernel_residual(const SymmetricOperator& op, const Field& k);

// Randomized certification of the quartered coercivity bound under
// nu-approximate orthogonality:
//   qform(e) >= (mu/4)||e||_{H2}^2 - (4/mu)(int e B)^2
// where the penalization term is present only when `penalization` is set
// (the breather case). mu is the measured constrained minimum under exact
// orthogonality to constraints (plus the penalization direction when given).
struct MarginCertificate {
    bool pass = true;
    int trials = 0;
    int violations = 0;
    double mu_hat = 0.0;
    double worst_margin = 0.0;  // min of (lhs - rhs-bound) over trials
};

MarginCertificate almost_orthogonality_margin(const SymmetricOperator& op,
                                              const std::vector<Field>& kernel_constraints,
                                              const Field* penalization, double nu, int trials,
                                              std::uint64_t seed);

// Looks for a kernel-aligned field that passes the nu gate yet violates the
// quartered bound; returns true when such a witness exists.
bool kernel_witness_violates(const SymmetricOperator& op,
                             const std::vector<Field>& kernel_constraints,
                             const Field* penalization, double nu, double mu_hat);

}  // namespace mkdv
