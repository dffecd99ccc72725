#ifndef FSBP_OPERATOR_HPP
#define FSBP_OPERATOR_HPP

#include "fsbp/function_space.hpp"
#include "fsbp/sparsity.hpp"

#include <Eigen/Core>

namespace fsbp {

/// Diagonal-norm SBP operator D = P^{-1}(S + B/2) with
/// B = e_R e_R^T - e_L e_L^T. Only the free entries of the skew part S are
/// stored, so antisymmetry (and with it Q + Q^T = B) holds by construction.
/// Immutable after creation.
class SBPOperator {
public:
    SBPOperator(NodeSet nodes, Eigen::VectorXd norm_weights,
                SparsityPattern pattern, Eigen::VectorXd skew_values);

    const NodeSet& nodes() const { return nodes_; }
    int size() const { return nodes_.size(); }
    const Eigen::VectorXd& norm_weights() const { return p_; }
    const SparsityPattern& pattern() const { return pattern_; }
    const Eigen::VectorXd& skew_values() const { return values_; }
    const std::vector<std::pair<int, int>>& skew_positions() const { return positions_; }

    /// Dense skew part S.
    Eigen::MatrixXd skew_dense() const;

    /// Dense Q = S + B/2.
    Eigen::MatrixXd q_matrix() const;

    /// y = D u without materializing D; uses the sparsity structure.
    Eigen::VectorXd apply(const Eigen::VectorXd& u) const;

    /// Y = D U (derivative down each column).
    Eigen::MatrixXd apply_to_columns(const Eigen::MatrixXd& u) const;

    /// Y = U D^T (derivative along each row).
    Eigen::MatrixXd apply_to_rows(const Eigen::MatrixXd& u) const;

private:
    NodeSet nodes_;
    Eigen::VectorXd p_;
    SparsityPattern pattern_;
    Eigen::VectorXd values_;
    std::vector<std::pair<int, int>> positions_;
};

/// Dense differentiation matrix D[i][j] = (S[i][j] + B[i][j]/2) / p_i.
Eigen::MatrixXd differentiation_matrix(const SBPOperator& op);

/// Discrete integral sum_i p_i * samples_i.
double quadrature(const SBPOperator& op, const Eigen::VectorXd& samples);

/// Operator on N equidistant nodes in [0, 1] whose differentiation matrix
/// only sees the two boundary nodes: every row is approximately
/// (-1, 0, ..., 0, 1). Exact for {1, x} up to O(eps) but rank deficient;
/// the norm weights of the interior nodes are eps/2.
SBPOperator make_boundary_difference_operator(int n, double eps);

/// Classical second-order operator on the given nodes: composite-trapezoidal
/// norm weights and nearest-neighbor couplings of +-1/2.
SBPOperator make_classical_second_order(const NodeSet& nodes);

} // namespace fsbp

#endif
