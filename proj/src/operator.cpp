#include "fsbp/operator.hpp"

#include <stdexcept>

namespace fsbp {

SBPOperator::SBPOperator(NodeSet nodes, Eigen::VectorXd norm_weights,
                         SparsityPattern pattern, Eigen::VectorXd skew_values)
    : nodes_(std::move(nodes)),
      p_(std::move(norm_weights)),
      pattern_(pattern),
      values_(std::move(skew_values)) {
    const int n = nodes_.size();
    if (p_.size() != n)
        throw std::invalid_argument("SBPOperator: norm weight count must match N");
    for (int i = 0; i < n; ++i)
        if (!(p_(i) > 0.0))
            throw std::invalid_argument("SBPOperator: non-positive norm weight at index " +
                                        std::to_string(i + 1));
    positions_ = pattern_.free_positions(n);
    if (values_.size() != static_cast<Eigen::Index>(positions_.size()))
        throw std::invalid_argument("SBPOperator: expected " +
                                    std::to_string(positions_.size()) +
                                    " skew entries, got " + std::to_string(values_.size()));
}

Eigen::MatrixXd SBPOperator::skew_dense() const {
    const int n = size();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (size_t l = 0; l < positions_.size(); ++l) {
        auto [i, j] = positions_[l];
        s(i, j) = values_(static_cast<Eigen::Index>(l));
        s(j, i) = -values_(static_cast<Eigen::Index>(l));
    }
    return s;
}

Eigen::MatrixXd SBPOperator::q_matrix() const {
    Eigen::MatrixXd q = skew_dense();
    const int n = size();
    q(0, 0) -= 0.5;
    q(n - 1, n - 1) += 0.5;
    return q;
}

Eigen::VectorXd SBPOperator::apply(const Eigen::VectorXd& u) const {
    const int n = size();
    if (u.size() != n) throw std::invalid_argument("apply: size mismatch");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    for (size_t l = 0; l < positions_.size(); ++l) {
        auto [i, j] = positions_[l];
        const double v = values_(static_cast<Eigen::Index>(l));
        y(i) += v * u(j);
        y(j) -= v * u(i);
    }
    y(0) -= 0.5 * u(0);
    y(n - 1) += 0.5 * u(n - 1);
    return y.cwiseQuotient(p_);
}

Eigen::MatrixXd SBPOperator::apply_to_columns(const Eigen::MatrixXd& u) const {
    const int n = size();
    if (u.rows() != n) throw std::invalid_argument("apply_to_columns: size mismatch");
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(u.rows(), u.cols());
    for (size_t l = 0; l < positions_.size(); ++l) {
        auto [i, j] = positions_[l];
        const double v = values_(static_cast<Eigen::Index>(l));
        y.row(i) += v * u.row(j);
        y.row(j) -= v * u.row(i);
    }
    y.row(0) -= 0.5 * u.row(0);
    y.row(n - 1) += 0.5 * u.row(n - 1);
    y.array().colwise() /= p_.array();
    return y;
}

Eigen::MatrixXd SBPOperator::apply_to_rows(const Eigen::MatrixXd& u) const {
    const int n = size();
    if (u.cols() != n) throw std::invalid_argument("apply_to_rows: size mismatch");
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(u.rows(), u.cols());
    for (size_t l = 0; l < positions_.size(); ++l) {
        auto [i, j] = positions_[l];
        const double v = values_(static_cast<Eigen::Index>(l));
        y.col(i) += v * u.col(j);
        y.col(j) -= v * u.col(i);
    }
    y.col(0) -= 0.5 * u.col(0);
    y.col(n - 1) += 0.5 * u.col(n - 1);
    y.array().rowwise() /= p_.transpose().array();
    return y;
}

Eigen::MatrixXd differentiation_matrix(const SBPOperator& op) {
    Eigen::MatrixXd d = op.q_matrix();
    d.array().colwise() /= op.norm_weights().array();
    return d;
}

double quadrature(const SBPOperator& op, const Eigen::VectorXd& samples) {
    if (samples.size() != op.size()) throw std::invalid_argument("quadrature: size mismatch");
    return op.norm_weights().dot(samples);
}

SBPOperator make_boundary_difference_operator(int n, double eps) {
    if (n < 3) throw std::invalid_argument("boundary difference operator needs N >= 3");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    NodeSet nodes = equidistant_nodes(0.0, 1.0, n);
    Eigen::VectorXd p = Eigen::VectorXd::Constant(n, 0.5 * eps);
    p(0) = 0.5;
    p(n - 1) = 0.5;
    auto pattern = SparsityPattern::dense();
    const auto pos = pattern.free_positions(n);
    Eigen::VectorXd vals = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pos.size()));
    for (size_t l = 0; l < pos.size(); ++l) {
        auto [i, j] = pos[l];
        if (i == 0 && j == n - 1)
            vals(static_cast<Eigen::Index>(l)) = 0.5;
        else if (i == 0 || j == n - 1)
            vals(static_cast<Eigen::Index>(l)) = 0.5 * eps;
    }
    return SBPOperator(std::move(nodes), std::move(p), pattern, std::move(vals));
}

SBPOperator make_classical_second_order(const NodeSet& nodes) {
    const int n = nodes.size();
    if (n < 3) throw std::invalid_argument("classical second-order operator needs N >= 3");
    Eigen::VectorXd p(n);
    p(0) = 0.5 * (nodes[1] - nodes[0]);
    for (int i = 1; i < n - 1; ++i) p(i) = 0.5 * (nodes[i + 1] - nodes[i - 1]);
    p(n - 1) = 0.5 * (nodes[n - 1] - nodes[n - 2]);
    auto pattern = SparsityPattern::banded(1, 1);
    Eigen::VectorXd vals = Eigen::VectorXd::Constant(n - 1, 0.5);
    return SBPOperator(nodes, std::move(p), pattern, std::move(vals));
}

} // namespace fsbp
