#include "fsbp/construct.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>
#include <stdexcept>

namespace fsbp {

namespace {

using Positions = std::vector<std::pair<int, int>>;

// R = S(sigma) V - P(rho) V_x + B V / 2
Eigen::MatrixXd residual_matrix(const Eigen::VectorXd& rho, const Eigen::VectorXd& sigma,
                                const Eigen::MatrixXd& v, const Eigen::MatrixXd& v_x,
                                const Positions& pos, NormMap norm_map) {
    const Eigen::Index n = v.rows();
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, v.cols());
    for (size_t l = 0; l < pos.size(); ++l) {
        auto [i, j] = pos[l];
        const double s = sigma(static_cast<Eigen::Index>(l));
        r.row(i) += s * v.row(j);
        r.row(j) -= s * v.row(i);
    }
    for (Eigen::Index i = 0; i < n; ++i)
        r.row(i) -= positive_map(norm_map, rho(i)) * v_x.row(i);
    r.row(0) -= 0.5 * v.row(0);
    r.row(n - 1) += 0.5 * v.row(n - 1);
    return r;
}

// gradient of <C, R(rho, sigma)> accumulated into (grad_rho, grad_sigma)
void add_inner_product_gradient(const Eigen::MatrixXd& c, const Eigen::VectorXd& rho,
                                const Eigen::MatrixXd& v, const Eigen::MatrixXd& v_x,
                                const Positions& pos, NormMap norm_map,
                                Eigen::VectorXd& grad_rho, Eigen::VectorXd& grad_sigma) {
    for (size_t l = 0; l < pos.size(); ++l) {
        auto [i, j] = pos[l];
        grad_sigma(static_cast<Eigen::Index>(l)) +=
            c.row(i).dot(v.row(j)) - c.row(j).dot(v.row(i));
    }
    for (Eigen::Index i = 0; i < rho.size(); ++i)
        grad_rho(i) -= positive_map_derivative(norm_map, rho(i)) * v_x.row(i).dot(c.row(i));
}

struct PackedProblem {
    Eigen::Index n = 0;
    Eigen::Index n_sigma = 0;
    Eigen::VectorXd scale; // per-parameter equilibration, x = scale .* packed

    Eigen::VectorXd pack(const Eigen::VectorXd& rho, const Eigen::VectorXd& sigma) const {
        Eigen::VectorXd x(n + n_sigma);
        x.head(n) = rho;
        x.tail(n_sigma) = sigma;
        return x.cwiseQuotient(scale);
    }
    Eigen::VectorXd rho(const Eigen::VectorXd& x) const {
        return x.head(n).cwiseProduct(scale.head(n));
    }
    Eigen::VectorXd sigma(const Eigen::VectorXd& x) const {
        return x.tail(n_sigma).cwiseProduct(scale.tail(n_sigma));
    }
    void store_gradient(const Eigen::VectorXd& grad_rho, const Eigen::VectorXd& grad_sigma,
                        Eigen::VectorXd& grad) const {
        grad.head(n) = grad_rho.cwiseProduct(scale.head(n));
        grad.tail(n_sigma) = grad_sigma.cwiseProduct(scale.tail(n_sigma));
    }
};

// Equilibrates the rho block against the sigma block: each rho_i sees
// curvature ~ (p'(rho_i) ||v_x row i||)^2, every sigma entry shares one
// common scale. A per-entry sigma scale would change which minimizer a
// zero start converges to, so the sigma block is scaled uniformly.
PackedProblem make_packed(const Eigen::MatrixXd& v, const Eigen::MatrixXd& v_x,
                          Eigen::Index sigma_count, const Eigen::VectorXd& rho0,
                          NormMap norm_map) {
    PackedProblem packed;
    packed.n = v.rows();
    packed.n_sigma = sigma_count;
    packed.scale.resize(packed.n + packed.n_sigma);
    Eigen::VectorXd rowx = v_x.rowwise().norm();
    for (Eigen::Index i = 0; i < packed.n; ++i) {
        const double curvature = positive_map_derivative(norm_map, rho0(i)) * rowx(i);
        packed.scale(i) = 1.0 / std::max(curvature, 1e-8);
    }
    const double mean_row_sq = v.rowwise().squaredNorm().mean();
    packed.scale.tail(packed.n_sigma).setConstant(
        1.0 / std::max(std::sqrt(2.0 * mean_row_sq), 1e-8));
    return packed;
}

// Optional linear tying of the skew parameters. In repeating-stencil mode
// every band entry with offset k shares one coefficient a_k (the corner
// blocks keep their own entries, the right block mirrors the left), so the
// full parameter vector is sigma = expand(sigma_reduced).
struct SigmaMap {
    Eigen::Index full_size = 0;
    Eigen::Index reduced_size = 0;
    std::vector<Eigen::Index> reduced_of; // empty means identity

    bool identity() const { return reduced_of.empty(); }

    Eigen::VectorXd expand(const Eigen::VectorXd& reduced) const {
        if (identity()) return reduced;
        Eigen::VectorXd full(full_size);
        for (Eigen::Index l = 0; l < full_size; ++l)
            full(l) = reduced(reduced_of[static_cast<size_t>(l)]);
        return full;
    }

    Eigen::VectorXd contract_gradient(const Eigen::VectorXd& grad_full) const {
        if (identity()) return grad_full;
        Eigen::VectorXd reduced = Eigen::VectorXd::Zero(reduced_size);
        for (Eigen::Index l = 0; l < full_size; ++l)
            reduced(reduced_of[static_cast<size_t>(l)]) += grad_full(l);
        return reduced;
    }

    // consistent assignments (mirror images, equal stencil entries) collapse
    // onto one representative
    Eigen::VectorXd reduce(const Eigen::VectorXd& full) const {
        if (identity()) return full;
        Eigen::VectorXd reduced(reduced_size);
        for (Eigen::Index l = 0; l < full_size; ++l)
            reduced(reduced_of[static_cast<size_t>(l)]) = full(l);
        return reduced;
    }
};

SigmaMap identity_sigma_map(Eigen::Index size) {
    SigmaMap map;
    map.full_size = size;
    map.reduced_size = size;
    return map;
}

SigmaMap repeating_sigma_map(const Positions& pos, int n, const SparsityPattern& pattern) {
    if (pattern.is_dense())
        throw std::invalid_argument("repeating stencils require a banded pattern");
    const int b = pattern.bandwidth();
    const int c = pattern.boundary_size();
    const long m1_count = static_cast<long>(c) * (c - 1) / 2;
    auto m1_index = [&](int i, int j) {
        return static_cast<Eigen::Index>(i) * (2 * c - i - 1) / 2 + (j - i - 1);
    };
    SigmaMap map;
    map.full_size = static_cast<Eigen::Index>(pos.size());
    map.reduced_size = m1_count + b;
    map.reduced_of.resize(pos.size());
    for (size_t l = 0; l < pos.size(); ++l) {
        auto [i, j] = pos[l];
        if (i < c && j < c)
            map.reduced_of[l] = m1_index(i, j);
        else if (i >= n - c && j >= n - c)
            map.reduced_of[l] = m1_index(n - 1 - j, n - 1 - i); // mirrored corner
        else
            map.reduced_of[l] = m1_count + (j - i) - 1; // shared stencil entry
    }
    return map;
}

// The residual is affine in (sigma, p), so one minimal-norm least-squares
// correction lands on the solution manifold (or its nearest point) far more
// precisely than first-order steps can. The correction is rejected when it
// would leave the range of the norm map or fail to improve the objective.
struct PolishOutcome {
    bool applied = false;
    Eigen::VectorXd rho;
    Eigen::VectorXd sigma;
    double objective = 0.0;
};

PolishOutcome linear_polish(const Eigen::MatrixXd& v, const Eigen::MatrixXd& v_x,
                            const Positions& pos, const SigmaMap& map, NormMap norm_map,
                            const Eigen::VectorXd& rho, const Eigen::VectorXd& sigma_reduced,
                            double current_objective) {
    const Eigen::Index n = v.rows(), k = v.cols();
    const Eigen::Index nr = map.reduced_size;
    PolishOutcome out;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n * k, nr + n);
    for (size_t l = 0; l < pos.size(); ++l) {
        auto [i, j] = pos[l];
        const Eigen::Index col =
            map.identity() ? static_cast<Eigen::Index>(l) : map.reduced_of[l];
        for (Eigen::Index kk = 0; kk < k; ++kk) {
            a(i * k + kk, col) += v(j, kk);
            a(j * k + kk, col) -= v(i, kk);
        }
    }
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index kk = 0; kk < k; ++kk) a(i * k + kk, nr + i) = -v_x(i, kk);

    Eigen::MatrixXd r =
        residual_matrix(rho, map.expand(sigma_reduced), v, v_x, pos, norm_map);
    Eigen::VectorXd rvec(n * k);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index kk = 0; kk < k; ++kk) rvec(i * k + kk) = r(i, kk);

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    cod.setThreshold(1e-12);
    Eigen::VectorXd delta = cod.solve(-rvec);

    Eigen::VectorXd p_new(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        p_new(i) = positive_map(norm_map, rho(i)) + delta(nr + i);
        if (!(p_new(i) > 1e-12)) return out;
        if (norm_map == NormMap::Sigmoid && !(p_new(i) < 1.0 - 1e-12)) return out;
    }
    Eigen::VectorXd rho_new(n);
    for (Eigen::Index i = 0; i < n; ++i)
        rho_new(i) = positive_map_inverse(norm_map, p_new(i));
    Eigen::VectorXd sigma_new = sigma_reduced + delta.head(nr);

    const double objective =
        residual_matrix(rho_new, map.expand(sigma_new), v, v_x, pos, norm_map).squaredNorm();
    if (!(objective < current_objective)) return out;
    out.applied = true;
    out.rho = std::move(rho_new);
    out.sigma = std::move(sigma_new);
    out.objective = objective;
    return out;
}

void warn_missing_constant(const FunctionSpace& space) {
    if (!space.contains_constant())
        std::cerr << "warning: function space '" << space.name
                  << "' does not contain the constant; the constructed operator "
                     "will not be conservative\n";
}

// sum_k lambda_k || D g_k - g_k' ||^2 and its gradient, accumulated into
// (grad_rho, grad_sigma)
double augmented_term(const Eigen::VectorXd& rho, const Eigen::VectorXd& sigma,
                      const Eigen::MatrixXd& vg, const Eigen::MatrixXd& vgx,
                      const Eigen::VectorXd& lambda, const Positions& pos, NormMap norm_map,
                      Eigen::VectorXd& grad_rho, Eigen::VectorXd& grad_sigma) {
    const Eigen::Index n = rho.size();
    Eigen::VectorXd p(n);
    for (Eigen::Index i = 0; i < n; ++i) p(i) = positive_map(norm_map, rho(i));

    Eigen::MatrixXd qv = Eigen::MatrixXd::Zero(n, vg.cols());
    for (size_t l = 0; l < pos.size(); ++l) {
        auto [i, j] = pos[l];
        const double s = sigma(static_cast<Eigen::Index>(l));
        qv.row(i) += s * vg.row(j);
        qv.row(j) -= s * vg.row(i);
    }
    qv.row(0) -= 0.5 * vg.row(0);
    qv.row(n - 1) += 0.5 * vg.row(n - 1);

    Eigen::MatrixXd dg = qv.array().colwise() / p.array(); // D V_g
    Eigen::MatrixXd rg = dg - vgx;
    Eigen::MatrixXd wg = rg.array().rowwise() * lambda.transpose().array();

    double value = 0.0;
    for (Eigen::Index k = 0; k < lambda.size(); ++k)
        value += lambda(k) * rg.col(k).squaredNorm();

    for (size_t l = 0; l < pos.size(); ++l) {
        auto [i, j] = pos[l];
        grad_sigma(static_cast<Eigen::Index>(l)) +=
            2.0 * (wg.row(i).dot(vg.row(j)) / p(i) - wg.row(j).dot(vg.row(i)) / p(j));
    }
    for (Eigen::Index i = 0; i < n; ++i)
        grad_rho(i) += positive_map_derivative(norm_map, rho(i)) * (-2.0 / p(i)) *
                       wg.row(i).dot(dg.row(i));
    return value;
}

// The exactness residual is invariant under a change of basis of the span:
// (S V - P V_x + B V / 2) T vanishes iff the untransformed residual does, for
// any invertible T. Optimizing against an orthonormalized W = [V; -V_x]
// conditions the problem far better than a raw monomial basis, so the
// minimizer runs on transformed data while results are reported in the
// caller's basis.
struct BasisConditioner {
    Eigen::MatrixXd v;      // V T
    Eigen::MatrixXd v_x;    // V_x T
    double norm_sq = 1.0;   // ||W||_2^2; relates the two objective scales
};

BasisConditioner condition_basis(const Eigen::MatrixXd& v, const Eigen::MatrixXd& v_x) {
    const Eigen::Index n = v.rows(), k = v.cols();
    Eigen::MatrixXd w(2 * n, k);
    w.topRows(n) = v;
    w.bottomRows(n) = -v_x;

    BasisConditioner out;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
    const double sigma_max = svd.singularValues()(0);
    out.norm_sq = std::max(1.0, sigma_max * sigma_max);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(w);
    qr.setThreshold(1e-13);
    Eigen::MatrixXd t;
    if (qr.rank() == k) {
        Eigen::MatrixXd r = qr.matrixR().topRows(k).template triangularView<Eigen::Upper>();
        t = qr.colsPermutation() * r.inverse();
    } else {
        // nearly dependent basis functions: fall back to column equilibration
        t = Eigen::MatrixXd::Zero(k, k);
        for (Eigen::Index j = 0; j < k; ++j) t(j, j) = 1.0 / std::max(w.col(j).norm(), 1e-300);
    }
    out.v = v * t;
    out.v_x = v_x * t;
    return out;
}

} // namespace

ObjectiveValue objective_and_gradient(const Eigen::VectorXd& rho,
                                      const Eigen::VectorXd& sigma,
                                      const Eigen::MatrixXd& v, const Eigen::MatrixXd& v_x,
                                      const SparsityPattern& pattern, NormMap norm_map) {
    const int n = static_cast<int>(v.rows());
    const Positions pos = pattern.free_positions(n);
    if (sigma.size() != static_cast<Eigen::Index>(pos.size()) || rho.size() != n ||
        v_x.rows() != n || v_x.cols() != v.cols())
        throw std::invalid_argument("objective_and_gradient: inconsistent dimensions");

    Eigen::MatrixXd r = residual_matrix(rho, sigma, v, v_x, pos, norm_map);
    ObjectiveValue out;
    out.value = r.squaredNorm();
    out.grad_rho = Eigen::VectorXd::Zero(n);
    out.grad_sigma = Eigen::VectorXd::Zero(sigma.size());
    add_inner_product_gradient(2.0 * r, rho, v, v_x, pos, norm_map, out.grad_rho,
                               out.grad_sigma);
    return out;
}

ObjectiveValue regularized_objective_and_gradient(
    const Eigen::VectorXd& rho, const Eigen::VectorXd& sigma, const Eigen::MatrixXd& v,
    const Eigen::MatrixXd& v_x, const Eigen::MatrixXd& v_g, const Eigen::MatrixXd& v_gx,
    const Eigen::VectorXd& lambda, const SparsityPattern& pattern, NormMap norm_map) {
    ObjectiveValue out = objective_and_gradient(rho, sigma, v, v_x, pattern, norm_map);
    const Positions pos = pattern.free_positions(static_cast<int>(v.rows()));
    out.value +=
        augmented_term(rho, sigma, v_g, v_gx, lambda, pos, norm_map, out.grad_rho,
                       out.grad_sigma);
    return out;
}

RegularizationSpec RegularizationSpec::uniform(FunctionSpace basis, double weight) {
    RegularizationSpec spec;
    spec.weights.assign(static_cast<size_t>(basis.size()), weight);
    spec.g_basis = std::move(basis);
    spec.validate();
    return spec;
}

void RegularizationSpec::validate() const {
    if (weights.size() != static_cast<size_t>(g_basis.size()))
        throw std::invalid_argument("regularization: need one weight per basis function");
    for (double w : weights)
        if (!(w > 0.0)) throw std::invalid_argument("regularization: weights must be positive");
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> initial_parameters(const NodeSet& nodes,
                                                               const SparsityPattern& pattern,
                                                               const OptimOptions& opts) {
    const int n = nodes.size();
    const Positions pos = pattern.free_positions(n);
    Eigen::VectorXd rho = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pos.size()));
    if (opts.init == InitMode::Zero) return {rho, sigma};

    // composite-trapezoidal weights, clamped into the range of the norm map
    for (int i = 0; i < n; ++i) {
        double w;
        if (i == 0)
            w = 0.5 * (nodes[1] - nodes[0]);
        else if (i == n - 1)
            w = 0.5 * (nodes[n - 1] - nodes[n - 2]);
        else
            w = 0.5 * (nodes[i + 1] - nodes[i - 1]);
        w = std::max(w, 1e-3);
        if (opts.norm_map == NormMap::Sigmoid) w = std::min(w, 1.0 - 1e-3);
        rho(i) = positive_map_inverse(opts.norm_map, w);
    }

    if (opts.init == InitMode::Random) {
        std::mt19937_64 rng(opts.seed);
        std::normal_distribution<double> dist(0.0, 0.1);
        for (Eigen::Index l = 0; l < sigma.size(); ++l) sigma(l) = dist(rng);
        return {rho, sigma};
    }

    // nearest-neighbor +-1/2 couplings within the pattern
    for (size_t l = 0; l < pos.size(); ++l)
        if (pos[l].second == pos[l].first + 1) sigma(static_cast<Eigen::Index>(l)) = 0.5;
    return {rho, sigma};
}

SBPOperator assemble_operator(const NodeSet& nodes, const SparsityPattern& pattern,
                              const Eigen::VectorXd& rho, const Eigen::VectorXd& sigma,
                              NormMap norm_map) {
    Eigen::VectorXd p(rho.size());
    for (Eigen::Index i = 0; i < rho.size(); ++i) p(i) = positive_map(norm_map, rho(i));
    return SBPOperator(nodes, std::move(p), pattern, sigma);
}

Construction construct_operator(const FunctionSpace& space, const NodeSet& nodes,
                                const SparsityPattern& pattern, const OptimOptions& opts) {
    const int n = nodes.size();
    pattern.validate(n);
    warn_missing_constant(space);
    const auto vp = vandermonde(space, nodes);
    const BasisConditioner cond = condition_basis(vp.v, vp.v_x);
    const Positions pos = pattern.free_positions(n);
    const SigmaMap map = opts.repeating_stencil
                             ? repeating_sigma_map(pos, n, pattern)
                             : identity_sigma_map(static_cast<Eigen::Index>(pos.size()));

    auto [rho0, sigma0_full] = initial_parameters(nodes, pattern, opts);
    Eigen::VectorXd sigma0 = map.reduce(sigma0_full);
    const PackedProblem packed =
        make_packed(cond.v, cond.v_x, map.reduced_size, rho0, opts.norm_map);

    ObjectiveFn objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        Eigen::VectorXd rho = packed.rho(x);
        Eigen::VectorXd sigma = map.expand(packed.sigma(x));
        Eigen::MatrixXd r = residual_matrix(rho, sigma, cond.v, cond.v_x, pos, opts.norm_map);
        Eigen::VectorXd grad_rho = Eigen::VectorXd::Zero(packed.n);
        Eigen::VectorXd grad_sigma = Eigen::VectorXd::Zero(map.full_size);
        add_inner_product_gradient(2.0 * r, rho, cond.v, cond.v_x, pos, opts.norm_map,
                                   grad_rho, grad_sigma);
        packed.store_gradient(grad_rho, map.contract_gradient(grad_sigma), grad);
        return r.squaredNorm();
    };

    OptimOptions inner = opts;
    const double target = opts.objective_floor.value_or(
        1e-2 * opts.residual_tol * opts.residual_tol);
    inner.objective_floor = target / cond.norm_sq;

    auto [x_opt, result] = minimize(objective, packed.pack(rho0, sigma0), inner);
    Eigen::VectorXd rho_opt = packed.rho(x_opt);
    Eigen::VectorXd sigma_opt = packed.sigma(x_opt);

    // report against the caller's basis
    result.objective =
        residual_matrix(rho_opt, map.expand(sigma_opt), vp.v, vp.v_x, pos, opts.norm_map)
            .squaredNorm();
    auto polished = linear_polish(vp.v, vp.v_x, pos, map, opts.norm_map, rho_opt, sigma_opt,
                                  result.objective);
    if (polished.applied) {
        rho_opt = std::move(polished.rho);
        sigma_opt = std::move(polished.sigma);
        result.objective = polished.objective;
    }

    SBPOperator op =
        assemble_operator(nodes, pattern, rho_opt, map.expand(sigma_opt), opts.norm_map);
    const double exact_level = opts.residual_tol * opts.residual_tol;
    result.converged = result.converged || result.objective <= exact_level;
    result.exact = result.objective <= exact_level;
    return {std::move(op), result};
}

long repeating_unknown_count(const SparsityPattern& pattern) {
    if (pattern.is_dense())
        throw std::invalid_argument("repeating stencils require a banded pattern");
    const long b = pattern.bandwidth();
    const long c = pattern.boundary_size();
    return c * (c - 1) / 2 + b;
}

Construction construct_regularized(const FunctionSpace& space, const RegularizationSpec& reg,
                                   const NodeSet& nodes, const SparsityPattern& pattern,
                                   const OptimOptions& opts, RegularizedMode mode) {
    reg.validate();
    if (reg.g_basis.size() == 0) return construct_operator(space, nodes, pattern, opts);
    if (opts.repeating_stencil)
        throw std::invalid_argument(
            "repeating stencils are not supported for regularized construction");

    const int n = nodes.size();
    pattern.validate(n);
    warn_missing_constant(space);
    const auto vp = vandermonde(space, nodes);
    const auto vg = vandermonde(reg.g_basis, nodes);
    const BasisConditioner cond = condition_basis(vp.v, vp.v_x);
    const Positions pos = pattern.free_positions(n);
    const Eigen::VectorXd lambda = Eigen::Map<const Eigen::VectorXd>(
        reg.weights.data(), static_cast<Eigen::Index>(reg.weights.size()));

    auto [rho0, sigma0] = initial_parameters(nodes, pattern, opts);
    const PackedProblem packed = make_packed(cond.v, cond.v_x, pos, rho0, opts.norm_map);

    auto augmented_error = [&](const Eigen::VectorXd& rho, const Eigen::VectorXd& sigma,
                               Eigen::VectorXd& grad_rho, Eigen::VectorXd& grad_sigma) {
        return augmented_term(rho, sigma, vg.v, vg.v_x, lambda, pos, opts.norm_map, grad_rho,
                              grad_sigma);
    };

    if (mode == RegularizedMode::WeightedPenalty) {
        ObjectiveFn objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
            Eigen::VectorXd rho = packed.rho(x);
            Eigen::VectorXd sigma = packed.sigma(x);
            Eigen::VectorXd grad_rho = Eigen::VectorXd::Zero(packed.n);
            Eigen::VectorXd grad_sigma = Eigen::VectorXd::Zero(packed.n_sigma);
            Eigen::MatrixXd r = residual_matrix(rho, sigma, vp.v, vp.v_x, pos, opts.norm_map);
            add_inner_product_gradient(2.0 * r, rho, vp.v, vp.v_x, pos, opts.norm_map,
                                       grad_rho, grad_sigma);
            double value = r.squaredNorm();
            value += augmented_error(rho, sigma, grad_rho, grad_sigma);
            packed.store_gradient(grad_rho, grad_sigma, grad);
            return value;
        };
        auto [x_opt, result] = minimize(objective, packed.pack(rho0, sigma0), opts);
        SBPOperator op = assemble_operator(nodes, pattern, packed.rho(x_opt),
                                           packed.sigma(x_opt), opts.norm_map);
        Eigen::MatrixXd r = residual_matrix(packed.rho(x_opt), packed.sigma(x_opt), vp.v,
                                            vp.v_x, pos, opts.norm_map);
        result.exact = r.norm() <= opts.residual_tol && result.converged;
        return {std::move(op), result};
    }

    // augmented Lagrangian on the entrywise exactness constraints
    constexpr int kMaxOuter = 25;
    constexpr double kMuGrowth = 10.0;
    constexpr double kMuMax = 1e12;
    constexpr double kShrinkFactor = 4.0;

    double mu = 10.0;
    Eigen::MatrixXd multipliers = Eigen::MatrixXd::Zero(n, vp.v.cols());
    Eigen::VectorXd x = packed.pack(rho0, sigma0);

    Eigen::VectorXd x_best = x;
    double best_h = std::numeric_limits<double>::infinity();
    double best_error = std::numeric_limits<double>::infinity();
    bool best_feasible = false;

    OptimResult summary;
    double h_prev = std::numeric_limits<double>::infinity();

    for (int outer = 0; outer < kMaxOuter; ++outer) {
        ObjectiveFn lagrangian = [&](const Eigen::VectorXd& xv, Eigen::VectorXd& grad) {
            Eigen::VectorXd rho = packed.rho(xv);
            Eigen::VectorXd sigma = packed.sigma(xv);
            Eigen::VectorXd grad_rho = Eigen::VectorXd::Zero(packed.n);
            Eigen::VectorXd grad_sigma = Eigen::VectorXd::Zero(packed.n_sigma);
            double value = augmented_error(rho, sigma, grad_rho, grad_sigma);
            Eigen::MatrixXd r = residual_matrix(rho, sigma, cond.v, cond.v_x, pos,
                                                opts.norm_map);
            value += (multipliers.array() * r.array()).sum() + 0.5 * mu * r.squaredNorm();
            add_inner_product_gradient(multipliers + mu * r, rho, cond.v, cond.v_x, pos,
                                       opts.norm_map, grad_rho, grad_sigma);
            packed.store_gradient(grad_rho, grad_sigma, grad);
            return value;
        };

        OptimOptions inner = opts;
        inner.objective_floor = -std::numeric_limits<double>::infinity();
        auto [x_opt, inner_result] = minimize(lagrangian, x, inner);
        x = x_opt;
        summary.iters += inner_result.iters;
        summary.grad_norm = inner_result.grad_norm;

        // feasibility is judged against the caller's basis
        Eigen::MatrixXd r_true = residual_matrix(packed.rho(x), packed.sigma(x), vp.v,
                                                 vp.v_x, pos, opts.norm_map);
        Eigen::MatrixXd r = residual_matrix(packed.rho(x), packed.sigma(x), cond.v, cond.v_x,
                                            pos, opts.norm_map);
        const double h = r_true.norm();
        Eigen::VectorXd dummy_r = Eigen::VectorXd::Zero(packed.n);
        Eigen::VectorXd dummy_s = Eigen::VectorXd::Zero(packed.n_sigma);
        const double g_error = augmented_error(packed.rho(x), packed.sigma(x), dummy_r,
                                               dummy_s);

        const bool feasible = h <= opts.residual_tol;
        if ((feasible && (!best_feasible || g_error < best_error)) ||
            (!best_feasible && h < best_h)) {
            x_best = x;
            best_h = h;
            best_error = g_error;
            best_feasible = feasible;
        }

        if (feasible && inner_result.converged) {
            summary.converged = true;
            break;
        }

        multipliers += mu * r;
        if (h > h_prev / kShrinkFactor) mu = std::min(mu * kMuGrowth, kMuMax);
        h_prev = h;
    }

    Eigen::VectorXd rho_best = packed.rho(x_best);
    Eigen::VectorXd sigma_best = packed.sigma(x_best);

    // project the final iterate onto the exactness manifold; the correction
    // is O(h) and leaves the augmented error essentially unchanged
    auto polished = linear_polish(vp.v, vp.v_x, pos, opts.norm_map, rho_best, sigma_best,
                                  best_h * best_h);
    if (polished.applied) {
        rho_best = std::move(polished.rho);
        sigma_best = std::move(polished.sigma);
        best_h = std::sqrt(polished.objective);
        Eigen::VectorXd dummy_r = Eigen::VectorXd::Zero(packed.n);
        Eigen::VectorXd dummy_s = Eigen::VectorXd::Zero(packed.n_sigma);
        best_error = augmented_error(rho_best, sigma_best, dummy_r, dummy_s);
        best_feasible = best_h <= opts.residual_tol;
    }

    SBPOperator op = assemble_operator(nodes, pattern, rho_best, sigma_best, opts.norm_map);
    summary.objective = best_error;
    summary.exact = best_feasible;
    summary.converged = summary.converged || best_feasible;
    return {std::move(op), summary};
}

} // namespace fsbp
