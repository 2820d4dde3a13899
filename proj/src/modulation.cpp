#include "mkdv/modulation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace mkdv {

namespace {

// Condition kernels and parameter derivatives of one modulated object.
struct ObjectFields {
    Field value;
    Field cond1, cond2;    // the two orthogonality kernels
    Field dparam1, dparam2;  // derivative of the object w.r.t. each parameter
};

ObjectFields modulated_fields(const ProfileObject& obj, const std::array<double, 2>& p, double t,
                              const GridPtr& grid) {
    ObjectFields f;
    if (const auto* s = std::get_if<SolitonParams>(&obj)) {
        const double dx0 = p[0], dc = p[1];
        f.value = eval_soliton_modulated(*s, dc, dx0, t, grid, 0);
        f.cond1 = eval_soliton_modulated(*s, dc, dx0, t, grid, 1);  // d/dx
        f.cond2 = f.value;
        f.dparam1 = f.cond1;  // d/d(dx0) equals the space derivative
        f.dparam2 = eval_soliton_scale_derivative(*s, dc, dx0, t, grid);
    } else {
        BreatherParams b = std::get<BreatherParams>(obj);
        b.x1 += p[0];
        b.x2 += p[1];
        f.value = eval_breather(b, t, grid);
        f.cond1 = eval_breather(b, t, grid, 0, 0, BreatherPart::d_x1);
        f.cond2 = eval_breather(b, t, grid, 0, 0, BreatherPart::d_x2);
        f.dparam1 = f.cond1;
        f.dparam2 = f.cond2;
    }
    return f;
}

double weighted_product(const Field& a, const Field& b, const Field& w) {
    double acc = 0.0;
    for (int i = 0; i < a.size(); ++i) acc += a.v[i] * b.v[i] * w.v[i];
    return acc * a.grid->dx;
}

std::vector<Field> sqrt_fields(const std::vector<Field>& phi) {
    std::vector<Field> out = phi;
    for (Field& f : out)
        for (double& x : f.v) x = std::sqrt(std::max(0.0, x));
    return out;
}

double reciprocal_condition(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    return s(s.size() - 1) / s(0);
}

}  // namespace

ModulationResult modulate(const Field& u, const ProfileSet& ps, double t,
                          const std::vector<Field>& phi, const ModulationOptions& opt) {
    const int count = ps.size();
    if (count == 0) throw std::invalid_argument("empty profile set");
    if (static_cast<int>(phi.size()) != count)
        throw std::invalid_argument("one weight per profile object expected");
    const GridPtr& grid = u.grid;

    const Field base = eval_profile_sum(ps, t, grid);
    const double dist = sobolev_norm(u - base, 2.0);
    if (dist > opt.basin_radius)
        throw std::domain_error("perturbation outside the modulation basin");

    const std::vector<Field> w = sqrt_fields(phi);
    const int dim = 2 * count;

    ModulationResult res;
    res.params.assign(count, {0.0, 0.0});
    res.residuals.assign(dim, 0.0);

    Eigen::VectorXd rhs(dim);
    Eigen::MatrixXd jac(dim, dim);
    std::vector<ObjectFields> fields(count);

    for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
        Field p_mod(grid);
        for (int j = 0; j < count; ++j) {
            fields[j] = modulated_fields(ps.objects[j], res.params[j], t, grid);
            p_mod += fields[j].value;
        }
        res.epsilon = u - p_mod;

        for (int j = 0; j < count; ++j) {
            rhs(2 * j) = weighted_product(fields[j].cond1, res.epsilon, w[j]);
            rhs(2 * j + 1) = weighted_product(fields[j].cond2, res.epsilon, w[j]);
        }
        for (int i = 0; i < dim; ++i) res.residuals[i] = rhs(i);

        // The solvability of the system is part of the contract, so the
        // conditioning is checked even when the residuals already vanish.
        for (int j = 0; j < count; ++j)
            for (int m = 0; m < count; ++m) {
                jac(2 * j, 2 * m) = -weighted_product(fields[j].cond1, fields[m].dparam1, w[j]);
                jac(2 * j, 2 * m + 1) = -weighted_product(fields[j].cond1, fields[m].dparam2, w[j]);
                jac(2 * j + 1, 2 * m) = -weighted_product(fields[j].cond2, fields[m].dparam1, w[j]);
                jac(2 * j + 1, 2 * m + 1) =
                    -weighted_product(fields[j].cond2, fields[m].dparam2, w[j]);
            }
        if (reciprocal_condition(jac) < opt.rcond_min)
            throw std::runtime_error(
                "ill-conditioned modulation Jacobian (velocity separation too small)");

        if (rhs.cwiseAbs().maxCoeff() < opt.tolerance) {
            res.converged = true;
            return res;
        }

        const Eigen::VectorXd delta = jac.fullPivLu().solve(-rhs);
        for (int j = 0; j < count; ++j) {
            res.params[j][0] += delta(2 * j);
            res.params[j][1] += delta(2 * j + 1);
            if (const auto* s = std::get_if<SolitonParams>(&ps.objects[j]))
                if (s->c + res.params[j][1] <= 0.0)
                    throw std::runtime_error("modulated soliton scale left the admissible range");
        }
    }
    res.converged = false;
    return res;
}

SingleModulationResult modulate_single(const Field& u, const ProfileSet& ps, int j, double t,
                                       const ModulationOptions& opt) {
    if (j < 0 || j >= ps.size()) throw std::invalid_argument("object index out of range");
    const GridPtr& grid = u.grid;

    const Field base = eval_profile_sum(ps, t, grid);
    if (sobolev_norm(u - base, 2.0) > opt.basin_radius)
        throw std::domain_error("perturbation outside the modulation basin");

    Field others(grid);
    for (int m = 0; m < ps.size(); ++m)
        if (m != j) others += eval_profile(ps.objects[m], t, grid);

    const bool is_soliton = std::holds_alternative<SolitonParams>(ps.objects[j]);

    SingleModulationResult res;
    Eigen::Vector2d rhs;
    Eigen::Matrix2d jac;
    for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
        // For a soliton the parameter order here is (scale, translation).
        const std::array<double, 2> p =
            is_soliton ? std::array<double, 2>{res.y2, res.y1} : std::array<double, 2>{res.y1, res.y2};
        const ObjectFields f = modulated_fields(ps.objects[j], p, t, grid);
        res.w = u - others - f.value;

        const Field& g1 = is_soliton ? f.cond2 : f.cond1;  // soliton: value first
        const Field& g2 = is_soliton ? f.cond1 : f.cond2;
        const Field& d1 = is_soliton ? f.dparam2 : f.dparam1;  // d/dy1
        const Field& d2 = is_soliton ? f.dparam1 : f.dparam2;  // d/dy2

        rhs(0) = inner_product(g1, res.w);
        rhs(1) = inner_product(g2, res.w);
        res.residuals = {rhs(0), rhs(1)};
        if (rhs.cwiseAbs().maxCoeff() < opt.tolerance) {
            res.converged = true;
            return res;
        }

        jac(0, 0) = -inner_product(g1, d1);
        jac(0, 1) = -inner_product(g1, d2);
        jac(1, 0) = -inner_product(g2, d1);
        jac(1, 1) = -inner_product(g2, d2);
        if (reciprocal_condition(jac) < opt.rcond_min)
            throw std::runtime_error("ill-conditioned single-object modulation Jacobian");

        const Eigen::Vector2d delta = jac.fullPivLu().solve(-rhs);
        res.y1 += delta(0);
        res.y2 += delta(1);
        if (is_soliton) {
            const auto& s = std::get<SolitonParams>(ps.objects[j]);
            if (s.c + res.y1 <= 0.0)
                throw std::runtime_error("modulated soliton scale left the admissible range");
        }
    }
    res.converged = false;
    return res;
}

double jacobian_determinant(const ProfileSet& ps, double t, const GridPtr& grid,
                            const std::vector<Field>& phi) {
    const int count = ps.size();
    if (static_cast<int>(phi.size()) != count)
        throw std::invalid_argument("one weight per profile object expected");
    const std::vector<Field> w = sqrt_fields(phi);
    const int dim = 2 * count;
    Eigen::MatrixXd jac(dim, dim);
    std::vector<ObjectFields> fields(count);
    for (int j = 0; j < count; ++j) fields[j] = modulated_fields(ps.objects[j], {0.0, 0.0}, t, grid);
    for (int j = 0; j < count; ++j)
        for (int m = 0; m < count; ++m) {
            jac(2 * j, 2 * m) = -weighted_product(fields[j].cond1, fields[m].dparam1, w[j]);
            jac(2 * j, 2 * m + 1) = -weighted_product(fields[j].cond1, fields[m].dparam2, w[j]);
            jac(2 * j + 1, 2 * m) = -weighted_product(fields[j].cond2, fields[m].dparam1, w[j]);
            jac(2 * j + 1, 2 * m + 1) = -weighted_product(fields[j].cond2, fields[m].dparam2, w[j]);
        }
    return jac.determinant();
}

double jacobian_block_product(const ProfileSet& ps, double t, const GridPtr& grid) {
    double prod = 1.0;
    for (int j = 0; j < ps.size(); ++j) {
        std::vector<ProfileObject> single{ps.objects[j]};
        const ProfileSet one = make_profile_set(std::move(single));
        prod *= jacobian_determinant(one, t, grid, global_weights(one, grid));
    }
    return prod;
}

std::vector<Field> global_weights(const ProfileSet& ps, const GridPtr& grid) {
    std::vector<Field> w(ps.size(), Field(grid));
    for (Field& f : w)
        for (double& x : f.v) x = 1.0;
    return w;
}

}  // namespace mkdv
