#ifndef FSBP_DIAGNOSTICS_HPP
#define FSBP_DIAGNOSTICS_HPP

#include "fsbp/operator.hpp"

#include <Eigen/Core>
#include <vector>

namespace fsbp {

/// Relative singular-value cutoff used by rank-based checks.
inline constexpr double kDefaultRankTol = 1e-8;

/// Eigenvalue real parts below this are treated as non-positive; keeps
/// structurally zero eigenvalues (computed as +-1e-16) from flipping the
/// verdict either way.
inline constexpr double kEigPositivityTol = 1e-10;

/// Per-basis-function residuals ||D f - f'||_2.
Eigen::VectorXd exactness_residual(const SBPOperator& op, const FunctionSpace& space);

/// ||Q + Q^T - B||_F for an explicit Q; B is implied by the size of Q.
double sbp_defect(const Eigen::MatrixXd& q);

/// ||(S + B/2) + (S + B/2)^T - B||_F. Zero up to accumulation because
/// antisymmetry of the stored S is structural.
double sbp_defect(const SBPOperator& op);

/// Number of singular values above rtol * sigma_max.
int numerical_rank(const Eigen::MatrixXd& m, double rtol = kDefaultRankTol);

/// True iff rank(D) = N - 1. Requires the operator to be exact for
/// constants (||D 1|| <= 1e-10), otherwise throws InconsistentOperatorError.
bool is_nullspace_consistent(const SBPOperator& op, double rtol = kDefaultRankTol);

struct EigenvaluePropertyResult {
    bool holds;
    double min_real_eig;
    std::vector<double> per_sample_min; // aligned with the nu samples
};

/// Checks that every eigenvalue of D + nu P^{-1} e_L e_L^T has positive
/// real part for each sampled nu (all samples must exceed 1/2).
EigenvaluePropertyResult has_eigenvalue_property(const SBPOperator& op,
                                                 const std::vector<double>& nu_samples);

inline std::vector<double> default_nu_samples() { return {0.75, 1.0, 2.0}; }

struct DiagnosticsReport {
    Eigen::VectorXd exactness_residuals;
    double sbp_defect = 0.0;
    double min_norm_weight = 0.0;
    int rank_d = 0;
    bool nullspace_consistent = false;
    bool eigenvalue_property = false;
    double min_real_eig = 0.0;
    std::vector<double> nu_samples;
};

DiagnosticsReport diagnose(const SBPOperator& op, const FunctionSpace& space,
                           double rtol = kDefaultRankTol,
                           const std::vector<double>& nu_samples = default_nu_samples());

} // namespace fsbp

#endif
