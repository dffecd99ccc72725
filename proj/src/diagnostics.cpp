#include "fsbp/diagnostics.hpp"

#include "fsbp/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <limits>

namespace fsbp {

Eigen::VectorXd exactness_residual(const SBPOperator& op, const FunctionSpace& space) {
    const auto vp = vandermonde(space, op.nodes());
    Eigen::MatrixXd dv = op.apply_to_columns(vp.v);
    Eigen::VectorXd res(space.size());
    for (int j = 0; j < space.size(); ++j) res(j) = (dv.col(j) - vp.v_x.col(j)).norm();
    return res;
}

double sbp_defect(const Eigen::MatrixXd& q) {
    const Eigen::Index n = q.rows();
    Eigen::MatrixXd t = q + q.transpose();
    t(0, 0) += 1.0;
    t(n - 1, n - 1) -= 1.0;
    return t.norm();
}

double sbp_defect(const SBPOperator& op) { return sbp_defect(op.q_matrix()); }

int numerical_rank(const Eigen::MatrixXd& m, double rtol) {
    if (!(rtol > 0.0)) throw std::invalid_argument("numerical_rank: rtol must be positive");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    if (svd.info() != Eigen::Success)
        throw NumericalError("numerical_rank: SVD did not converge");
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double cutoff = rtol * sv(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    return rank;
}

bool is_nullspace_consistent(const SBPOperator& op, double rtol) {
    const int n = op.size();
    const double const_residual = op.apply(Eigen::VectorXd::Ones(n)).norm();
    if (const_residual > 1e-10)
        throw InconsistentOperatorError(
            "operator is not exact for constants (||D 1|| = " +
            std::to_string(const_residual) + "); the rank criterion does not apply");
    return numerical_rank(differentiation_matrix(op), rtol) == n - 1;
}

EigenvaluePropertyResult has_eigenvalue_property(const SBPOperator& op,
                                                 const std::vector<double>& nu_samples) {
    if (nu_samples.empty())
        throw std::invalid_argument("has_eigenvalue_property: need at least one nu sample");
    for (double nu : nu_samples)
        if (!(nu > 0.5))
            throw std::invalid_argument("has_eigenvalue_property: every nu must exceed 1/2");

    const Eigen::MatrixXd d = differentiation_matrix(op);
    EigenvaluePropertyResult result;
    result.min_real_eig = std::numeric_limits<double>::infinity();
    for (double nu : nu_samples) {
        Eigen::MatrixXd dt = d;
        dt(0, 0) += nu / op.norm_weights()(0);
        Eigen::EigenSolver<Eigen::MatrixXd> es(dt, /*computeEigenvectors=*/false);
        if (es.info() != Eigen::Success)
            throw NumericalError("has_eigenvalue_property: eigensolver did not converge");
        const double min_real = es.eigenvalues().real().minCoeff();
        result.per_sample_min.push_back(min_real);
        result.min_real_eig = std::min(result.min_real_eig, min_real);
    }
    result.holds = result.min_real_eig > kEigPositivityTol;
    return result;
}

DiagnosticsReport diagnose(const SBPOperator& op, const FunctionSpace& space, double rtol,
                           const std::vector<double>& nu_samples) {
    DiagnosticsReport r;
    r.exactness_residuals = exactness_residual(op, space);
    r.sbp_defect = sbp_defect(op);
    r.min_norm_weight = op.norm_weights().minCoeff();
    r.rank_d = numerical_rank(differentiation_matrix(op), rtol);
    r.nullspace_consistent = (r.rank_d == op.size() - 1);
    auto eig = has_eigenvalue_property(op, nu_samples);
    r.eigenvalue_property = eig.holds;
    r.min_real_eig = eig.min_real_eig;
    r.nu_samples = nu_samples;
    return r;
}

} // namespace fsbp
