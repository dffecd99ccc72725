#ifndef FSBP_CONSTRUCT_HPP
#define FSBP_CONSTRUCT_HPP

#include "fsbp/function_space.hpp"
#include "fsbp/operator.hpp"
#include "fsbp/optim.hpp"
#include "fsbp/sparsity.hpp"

#include <Eigen/Core>

namespace fsbp {

struct ObjectiveValue {
    double value = 0.0;
    Eigen::VectorXd grad_rho;
    Eigen::VectorXd grad_sigma;
};

/// Value and analytic gradient of || S(sigma) V - P(rho) V_x + B V / 2 ||_F^2.
/// With residual R, the gradient entries are
///   d/d rho_i   = -2 p'(rho_i) (V_x row i) . (R row i)
///   d/d sigma_l =  2 [ (R V^T)_{ij} - (R V^T)_{ji} ]   at free position (i, j).
ObjectiveValue objective_and_gradient(const Eigen::VectorXd& rho,
                                      const Eigen::VectorXd& sigma,
                                      const Eigen::MatrixXd& v, const Eigen::MatrixXd& v_x,
                                      const SparsityPattern& pattern,
                                      NormMap norm_map = NormMap::Sigmoid);

/// Value and analytic gradient of the weighted-sum regularized objective
/// || S V - P V_x + B V / 2 ||_F^2 + sum_k lambda_k || D g_k - g_k' ||_2^2
/// with D = P^{-1}(S + B/2) and g_k the columns of v_g.
ObjectiveValue regularized_objective_and_gradient(
    const Eigen::VectorXd& rho, const Eigen::VectorXd& sigma, const Eigen::MatrixXd& v,
    const Eigen::MatrixXd& v_x, const Eigen::MatrixXd& v_g, const Eigen::MatrixXd& v_gx,
    const Eigen::VectorXd& lambda, const SparsityPattern& pattern,
    NormMap norm_map = NormMap::Sigmoid);

/// Extra functions whose derivative error is minimized (not zeroed).
struct RegularizationSpec {
    FunctionSpace g_basis;
    std::vector<double> weights; // one positive weight per basis function

    static RegularizationSpec uniform(FunctionSpace basis, double weight = 1.0);
    void validate() const;
};

/// How construct_regularized treats the exactness requirement on the
/// primary space: as an equality constraint (augmented Lagrangian) or as a
/// weighted penalty added to the exactness objective.
enum class RegularizedMode { Constrained, WeightedPenalty };

struct Construction {
    SBPOperator op;
    OptimResult result;
};

/// Builds an operator exact on the space (when attainable) by minimizing the
/// parametrized exactness objective with LBFGS. The returned operator always
/// satisfies positivity and the SBP property structurally; result.exact
/// records whether the residual dropped below residual_tol.
Construction construct_operator(const FunctionSpace& space, const NodeSet& nodes,
                                const SparsityPattern& pattern,
                                const OptimOptions& opts = {});

/// Minimizes sum_k lambda_k ||D g_k - g_k'||^2 subject to exactness on the
/// primary space (augmented Lagrangian outer loop), or — in WeightedPenalty
/// mode — minimizes the plain weighted sum of both terms.
Construction construct_regularized(const FunctionSpace& space, const RegularizationSpec& reg,
                                   const NodeSet& nodes, const SparsityPattern& pattern,
                                   const OptimOptions& opts = {},
                                   RegularizedMode mode = RegularizedMode::Constrained);

/// Initial parameter vectors (rho, sigma) for a construction run.
std::pair<Eigen::VectorXd, Eigen::VectorXd> initial_parameters(const NodeSet& nodes,
                                                               const SparsityPattern& pattern,
                                                               const OptimOptions& opts);

/// Skew unknowns of a banded pattern under the repeating-stencil
/// restriction: c(c-1)/2 corner entries plus b stencil coefficients.
long repeating_unknown_count(const SparsityPattern& pattern);

/// Assembles the operator from parameter vectors.
SBPOperator assemble_operator(const NodeSet& nodes, const SparsityPattern& pattern,
                              const Eigen::VectorXd& rho, const Eigen::VectorXd& sigma,
                              NormMap norm_map = NormMap::Sigmoid);

} // namespace fsbp

#endif
