#ifndef FSBP_OPTIM_HPP
#define FSBP_OPTIM_HPP

#include <Eigen/Core>
#include <functional>
#include <optional>

namespace fsbp {

/// Logistic sigmoid s(x) = 1/(1+e^{-x}), maps R onto (0,1).
double sigmoid(double x);
/// Inverse of sigmoid; argument must lie in (0,1).
double logit(double p);
/// s'(x) = s(x)(1 - s(x)).
double sigmoid_derivative(double x);

double softplus(double x);
double softplus_inverse(double y);
double softplus_derivative(double x);

/// Map from unconstrained parameters to positive norm weights.
enum class NormMap { Sigmoid, Softplus };

double positive_map(NormMap map, double x);
double positive_map_inverse(NormMap map, double p);
double positive_map_derivative(NormMap map, double x);

enum class InitMode { Reference, Zero, Random };

struct OptimOptions {
    int max_iters = 10000;
    double grad_tol = 1e-13;
    double residual_tol = 1e-10;
    unsigned long seed = 0;
    InitMode init = InitMode::Reference;
    NormMap norm_map = NormMap::Sigmoid;
    int memory = 10;
    /// Banded construction only: repeat one interior stencil along the band
    /// and mirror the right corner block from the left one, shrinking the
    /// skew unknowns to c(c-1)/2 + b. Exact operators need not exist under
    /// this restriction on general nodes or bases.
    bool repeating_stencil = false;
    /// Stop when the objective drops to this value. When unset, the floor is
    /// 1e-2 * residual_tol^2 and a final objective <= residual_tol^2 also
    /// counts as converged.
    std::optional<double> objective_floor;
};

struct OptimResult {
    double objective = 0.0;
    double grad_norm = 0.0;
    int iters = 0;
    bool converged = false;
    bool exact = false; // objective <= residual_tol^2
};

/// Objective callback: returns f(x) and fills grad (resized by the caller).
using ObjectiveFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// Limited-memory BFGS with a strong-Wolfe line search. Deterministic for
/// fixed inputs. On line-search failure the best iterate seen is returned.
std::pair<Eigen::VectorXd, OptimResult> minimize(const ObjectiveFn& f,
                                                 const Eigen::VectorXd& x0,
                                                 const OptimOptions& opts = {});

} // namespace fsbp

#endif
