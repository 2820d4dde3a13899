#include "mkdv/quadforms.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace mkdv {

namespace {

double sq(double x) { return x * x; }

}  // namespace

Field elliptic_residual_field(const Field& background, const AbPair& ab) {
    const Field& A = background;
    const Field ax = spectral_derivative(A, 1);
    const Field axx = spectral_derivative(A, 2);
    const Field a4 = spectral_derivative(A, 4);
    const double lin2 = 2.0 * (ab.b * ab.b - ab.a * ab.a);
    const double lin0 = sq(ab.a * ab.a + ab.b * ab.b);
    Field out(A.grid);
    for (int i = 0; i < A.size(); ++i) {
        const double a = A.v[i];
        out.v[i] = a4.v[i] - lin2 * (axx.v[i] + a * a * a) + lin0 * a +
                   5.0 * a * sq(ax.v[i]) + 5.0 * a * a * axx.v[i] +
                   1.5 * a * a * a * a * a;
    }
    return out;
}

double soliton_elliptic_residual(double c, const GridPtr& grid) {
    const Field q = eval_soliton({c, 1, 0.0}, 0.0, grid);
    return max_abs(elliptic_residual_field(q, {0.0, std::sqrt(c)}));
}

double breather_elliptic_residual(const BreatherParams& p, double t, const GridPtr& grid) {
    const Field b = eval_breather(p, t, grid);
    return max_abs(elliptic_residual_field(b, {p.alpha, p.beta}));
}

ModulatedEllipticCheck modulated_soliton_elliptic_check(const SolitonParams& p, double dc,
                                                        double t, const GridPtr& grid) {
    const Field q = eval_soliton_modulated(p, dc, 0.0, t, grid);
    ModulatedEllipticCheck chk{elliptic_residual_field(q, {0.0, std::sqrt(p.c)}), Field(grid)};
    const Field qxx = spectral_derivative(q, 2);
    for (int i = 0; i < q.size(); ++i) {
        const double a = q.v[i];
        chk.rhs.v[i] = 2.0 * dc * (qxx.v[i] + a * a * a) - 2.0 * p.c * dc * a - dc * dc * a;
    }
    return chk;
}

double qform(const Field& eps, const Field& background, const AbPair& ab) {
    require_same_grid(eps, background);
    const Field& A = background;
    const Field ex = spectral_derivative(eps, 1);
    const Field exx = spectral_derivative(eps, 2);
    const Field ax = spectral_derivative(A, 1);
    const Field axx = spectral_derivative(A, 2);
    const double b2a2 = ab.b * ab.b - ab.a * ab.a;
    const double quad = sq(ab.a * ab.a + ab.b * ab.b);
    Field dens(eps.grid);
    for (int i = 0; i < eps.size(); ++i) {
        const double e = eps.v[i], a = A.v[i];
        dens.v[i] = 0.5 * sq(exx.v[i]) - 2.5 * a * a * sq(ex.v[i]) + 2.5 * sq(ax.v[i]) * e * e +
                    5.0 * a * axx.v[i] * e * e + 3.75 * a * a * a * a * e * e +
                    b2a2 * (sq(ex.v[i]) - 3.0 * a * a * e * e) + 0.5 * quad * e * e;
    }
    return integrate(dens);
}

double h2_form(const Field& eps, const Field& background, const ProfileSet& ps,
               const std::vector<Field>& weights) {
    require_same_grid(eps, background);
    if (static_cast<int>(weights.size()) != ps.size())
        throw std::invalid_argument("one weight per profile object expected");
    const Field& P = background;
    const Field ex = spectral_derivative(eps, 1);
    const Field exx = spectral_derivative(eps, 2);
    const Field px = spectral_derivative(P, 1);
    const Field pxx = spectral_derivative(P, 2);

    Field dens(eps.grid);
    for (int i = 0; i < eps.size(); ++i) {
        const double e = eps.v[i], p = P.v[i];
        dens.v[i] = 0.5 * sq(exx.v[i]) - 2.5 * p * p * sq(ex.v[i]) + 2.5 * sq(px.v[i]) * e * e +
                    5.0 * p * pxx.v[i] * e * e + 3.75 * p * p * p * p * e * e;
    }
    double acc = integrate(dens);
    for (int j = 0; j < ps.size(); ++j) {
        require_same_grid(eps, weights[j]);
        const AbPair ab = ab_params(ps.objects[j]);
        const double b2a2 = ab.b * ab.b - ab.a * ab.a;
        const double quad = sq(ab.a * ab.a + ab.b * ab.b);
        Field dj(eps.grid);
        for (int i = 0; i < eps.size(); ++i) {
            const double e = eps.v[i], p = P.v[i];
            dj.v[i] = (b2a2 * (sq(ex.v[i]) - 3.0 * p * p * e * e) + 0.5 * quad * e * e) *
                      weights[j].v[i];
        }
        acc += integrate(dj);
    }
    return acc;
}

std::vector<Field> kernel_basis(const ProfileObject& obj, double t, const GridPtr& grid) {
    if (const auto* s = std::get_if<SolitonParams>(&obj)) {
        Field k1 = eval_soliton(*s, t, grid, 1, 0);
        Field k2(grid);
        for (int i = 0; i < k2.size(); ++i) {
            const double y = grid->x[i] - s->x0 - s->c * t;
            k2.v[i] = s->kappa * (soliton_q(s->c, y) + y * soliton_q_deriv(s->c, y, 1));
        }
        return {k1, k2};
    }
    const auto& b = std::get<BreatherParams>(obj);
    return {eval_breather(b, t, grid, 0, 0, BreatherPart::d_x1),
            eval_breather(b, t, grid, 0, 0, BreatherPart::d_x2)};
}

double wronskian_deviation(double c, const GridPtr& grid) {
    const Field q = eval_soliton({c, 1, 0.0}, 0.0, grid);
    const Field qx = spectral_derivative(q, 1);
    const Field qxx = spectral_derivative(q, 2);
    double worst = 0.0;
    for (int i = 0; i < q.size(); ++i) {
        const double dev = 2.0 * sq(qx.v[i]) - q.v[i] * qxx.v[i] - c * sq(q.v[i]);
        worst = std::max(worst, std::fabs(dev));
    }
    return worst;
}

namespace {

// Dense spectral differentiation matrix of the given order, built column by
// column so it matches spectral_derivative exactly (Nyquist convention
// included).
Eigen::MatrixXd derivative_matrix(const GridPtr& grid, int order) {
    const int n = grid->n;
    Eigen::MatrixXd d(n, n);
    Field e(grid);
    for (int j = 0; j < n; ++j) {
        std::fill(e.v.begin(), e.v.end(), 0.0);
        e.v[j] = 1.0;
        const Field col = spectral_derivative(e, order);
        for (int i = 0; i < n; ++i) d(i, j) = col.v[i];
    }
    return d;
}

Eigen::MatrixXd h2_metric(const GridPtr& grid) {
    const int n = grid->n;
    const Eigen::MatrixXd d1 = derivative_matrix(grid, 1);
    const Eigen::MatrixXd d2 = derivative_matrix(grid, 2);
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + 2.0 * d1.transpose() * d1 +
                        d2.transpose() * d2;
    m *= grid->dx;
    return 0.5 * (m + m.transpose());
}

}  // namespace

SymmetricOperator assemble_operator(const Field& background, const AbPair& ab) {
    const GridPtr& grid = background.grid;
    const int n = grid->n;
    if (n > 4096) throw std::invalid_argument("dense operator capped at n <= 4096");

    const Eigen::MatrixXd d1 = derivative_matrix(grid, 1);
    const Eigen::MatrixXd d2 = derivative_matrix(grid, 2);
    const Field ax = spectral_derivative(background, 1);
    const Field axx = spectral_derivative(background, 2);
    const double b2a2 = ab.b * ab.b - ab.a * ab.a;
    const double quad = sq(ab.a * ab.a + ab.b * ab.b);

    Eigen::VectorXd a2(n), zero_order(n);
    for (int i = 0; i < n; ++i) {
        const double a = background.v[i];
        a2(i) = a * a;
        zero_order(i) = 2.5 * sq(ax.v[i]) + 5.0 * a * axx.v[i] + 3.75 * a * a * a * a -
                        3.0 * b2a2 * a * a + 0.5 * quad;
    }

    Eigen::MatrixXd m = 0.5 * d2.transpose() * d2;
    m -= 2.5 * d1.transpose() * a2.asDiagonal() * d1;
    m += b2a2 * d1.transpose() * d1;
    m += Eigen::MatrixXd(zero_order.asDiagonal());
    m *= grid->dx;

    SymmetricOperator op;
    op.mat = 0.5 * (m + m.transpose());
    op.grid = grid;
    op.ab = ab;
    op.background = background;
    return op;
}

OperatorSpectrum operator_spectrum(const SymmetricOperator& op, double tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.mat);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolve failed");
    OperatorSpectrum sp;
    sp.eigenvalues = solver.eigenvalues();
    sp.eigenvectors = solver.eigenvectors();
    for (int i = 0; i < sp.eigenvalues.size(); ++i) {
        if (sp.eigenvalues(i) < -tol) ++sp.negative_count;
        if (std::fabs(sp.eigenvalues(i)) <= tol) ++sp.near_zero_count;
    }
    return sp;
}

double subspace_correlation(const Field& vec, const std::vector<Field>& basis) {
    // Orthonormalize the basis in L2, then measure ||proj vec|| / ||vec||.
    std::vector<Field> ortho;
    for (const Field& b : basis) {
        Field q = b;
        for (const Field& o : ortho) {
            const double c = inner_product(q, o);
            for (int i = 0; i < q.size(); ++i) q.v[i] -= c * o.v[i];
        }
        const double nrm = std::sqrt(inner_product(q, q));
        if (nrm > 1e-13) {
            for (double& x : q.v) x /= nrm;
            ortho.push_back(q);
        }
    }
    double proj2 = 0.0;
    for (const Field& o : ortho) proj2 += sq(inner_product(vec, o));
    const double nrm2 = inner_product(vec, vec);
    return nrm2 > 0.0 ? std::sqrt(proj2 / nrm2) : 0.0;
}

double constrained_min_eigenvalue(const SymmetricOperator& op,
                                  const std::vector<Field>& constraints) {
    const int n = op.grid->n;
    const Eigen::MatrixXd metric = h2_metric(op.grid);
    if (constraints.empty()) {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> gen(op.mat, metric);
        if (gen.info() != Eigen::Success) throw std::runtime_error("eigensolve failed");
        return gen.eigenvalues()(0);
    }
    const int m = static_cast<int>(constraints.size());
    Eigen::MatrixXd c(n, m);
    for (int j = 0; j < m; ++j) {
        require_same_grid(constraints[j], op.background);
        for (int i = 0; i < n; ++i) c(i, j) = constraints[j].v[i];
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
    Eigen::MatrixXd qfull = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    // Degenerate constraint sets leave fewer than m independent directions.
    const Eigen::MatrixXd r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    for (int j = 0; j < m; ++j)
        if (std::fabs(r(j, j)) < 1e-12 * std::sqrt(static_cast<double>(n)))
            throw std::invalid_argument("degenerate constraint set");
    const Eigen::MatrixXd z = qfull.rightCols(n - m);
    const Eigen::MatrixXd az = z.transpose() * op.mat * z;
    const Eigen::MatrixXd mz = z.transpose() * metric * z;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> gen(
        0.5 * (az + az.transpose()), 0.5 * (mz + mz.transpose()));
    if (gen.info() != Eigen::Success) throw std::runtime_error("eigensolve failed");
    return gen.eigenvalues()(0);
}

double operator_kernel_residual(const SymmetricOperator& op, const Field& k) {
    require_same_grid(k, op.background);
    Eigen::VectorXd v(k.size());
    for (int i = 0; i < k.size(); ++i) v(i) = k.v[i];
    return (op.mat * v).norm() / v.norm();
}

namespace {

// Random field with H2-type spectral decay; deterministic in the engine state.
Field random_h2_field(const GridPtr& grid, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Spectrum s;
    s.grid = grid;
    s.c.assign(grid->n / 2 + 1, 0.0);
    for (int m = 1; m < grid->n / 2; ++m) {
        const double k = grid->wavenumber(m);
        const double amp = 1.0 / (1.0 + k * k);
        s.c[m] = std::complex<double>(gauss(rng), gauss(rng)) * amp;
    }
    return to_field(s);
}

std::vector<Field> l2_orthonormalize(const std::vector<Field>& basis) {
    std::vector<Field> ortho;
    for (const Field& b : basis) {
        Field q = b;
        for (const Field& o : ortho) {
            const double c = inner_product(q, o);
            for (int i = 0; i < q.size(); ++i) q.v[i] -= c * o.v[i];
        }
        const double nrm = std::sqrt(inner_product(q, q));
        if (nrm > 1e-13) {
            for (double& x : q.v) x /= nrm;
            ortho.push_back(q);
        }
    }
    return ortho;
}

double bound_rhs(double mu, double h2norm, const Field* penalization, const Field& eps) {
    double rhs = 0.25 * mu * h2norm * h2norm;
    if (penalization) rhs -= 4.0 / mu * sq(inner_product(eps, *penalization));
    return rhs;
}

bool gate(const std::vector<Field>& constraints, const Field& eps, double nu, double h2norm) {
    for (const Field& k : constraints)
        if (std::fabs(inner_product(eps, k)) > nu * h2norm + 1e-15) return false;
    return true;
}

}  // namespace

MarginCertificate almost_orthogonality_margin(const SymmetricOperator& op,
                                              const std::vector<Field>& kernel_constraints,
                                              const Field* penalization, double nu, int trials,
                                              std::uint64_t seed) {
    MarginCertificate cert;
    cert.trials = trials;

    std::vector<Field> exact = kernel_constraints;
    if (penalization) exact.push_back(*penalization);
    cert.mu_hat = constrained_min_eigenvalue(op, exact);
    if (!(cert.mu_hat > 0.0)) {
        cert.pass = false;
        return cert;
    }

    const std::vector<Field> ortho = l2_orthonormalize(kernel_constraints);
    double max_kernel_l2 = 0.0;
    for (const Field& k : kernel_constraints)
        max_kernel_l2 = std::max(max_kernel_l2, std::sqrt(inner_product(k, k)));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    cert.worst_margin = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < trials; ++trial) {
        Field eps = random_h2_field(op.grid, rng);
        std::vector<double> along(ortho.size());
        for (size_t j = 0; j < ortho.size(); ++j) along[j] = unit(rng);
        for (size_t j = 0; j < ortho.size(); ++j) {
            const double c = inner_product(eps, ortho[j]);
            for (int i = 0; i < eps.size(); ++i) eps.v[i] -= c * ortho[j].v[i];
        }
        if (nu > 0.0 && !ortho.empty()) {
            double s = nu * sobolev_norm(eps, 2.0) / (2.0 * std::max(max_kernel_l2, 1e-12) *
                                                      static_cast<double>(ortho.size()));
            Field cand = eps;
            for (int shrink = 0; shrink < 60; ++shrink) {
                cand = eps;
                for (size_t j = 0; j < ortho.size(); ++j)
                    for (int i = 0; i < cand.size(); ++i)
                        cand.v[i] += along[j] * s * ortho[j].v[i];
                if (gate(kernel_constraints, cand, nu, sobolev_norm(cand, 2.0))) break;
                s *= 0.5;
            }
            eps = cand;
        }
        const double h2 = sobolev_norm(eps, 2.0);
        const double lhs = qform(eps, op.background, op.ab);
        const double rhs = bound_rhs(cert.mu_hat, h2, penalization, eps);
        cert.worst_margin = std::min(cert.worst_margin, lhs - rhs);
        if (lhs < rhs) {
            ++cert.violations;
            cert.pass = false;
        }
    }
    return cert;
}

bool kernel_witness_violates(const SymmetricOperator& op,
                             const std::vector<Field>& kernel_constraints,
                             const Field* penalization, double nu, double mu_hat) {
    for (const Field& k : kernel_constraints) {
        Field eps = k;
        const double nrm = std::sqrt(inner_product(eps, eps));
        if (nrm < 1e-13) continue;
        for (double& x : eps.v) x /= nrm;
        const double h2 = sobolev_norm(eps, 2.0);
        if (!gate(kernel_constraints, eps, nu, h2)) continue;
        const double lhs = qform(eps, op.background, op.ab);
        if (lhs < bound_rhs(mu_hat, h2, penalization, eps)) return true;
    }
    return false;
}

}  // namespace mkdv
