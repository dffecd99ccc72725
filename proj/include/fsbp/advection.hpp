#ifndef FSBP_ADVECTION_HPP
#define FSBP_ADVECTION_HPP

#include "fsbp/operator.hpp"

#include <Eigen/Core>
#include <functional>

namespace fsbp {

/// Periodic chain of K conforming blocks covering [x_left, x_right]; every
/// block carries the same reference operator mapped affinely (P scales by
/// the Jacobian, S is unchanged).
class BlockMesh1D {
public:
    BlockMesh1D(double x_left, double x_right, int blocks, SBPOperator reference_op);

    int blocks() const { return blocks_; }
    int nodes_per_block() const { return op_.size(); }
    int total_nodes() const { return blocks_ * op_.size(); }
    double x_left() const { return x_left_; }
    double x_right() const { return x_right_; }
    const SBPOperator& reference_op() const { return op_; }

    /// Block width divided by the reference domain length.
    double jacobian() const { return jacobian_; }
    double node_x(int block, int i) const;
    double h_min() const { return op_.nodes().min_spacing() * jacobian_; }

    /// Mapped quadrature weight of node i in any block (J * p_i).
    double weight(int i) const { return jacobian_ * op_.norm_weights()(i); }

    Eigen::VectorXd sample(const std::function<double(double)>& f) const;

private:
    double x_left_;
    double x_right_;
    int blocks_;
    SBPOperator op_;
    double jacobian_;
};

/// Semidiscrete right-hand side of u_t + a u_x = 0 with upwind interface
/// coupling and periodic wrap. State layout: block-major, node-minor.
Eigen::VectorXd advection_rhs(const BlockMesh1D& mesh, double a, const Eigen::VectorXd& u);

/// sqrt(sum_blocks J sum_i p_i diff_i^2)
double advection_l2_norm(const BlockMesh1D& mesh, const Eigen::VectorXd& diff);

/// Discrete energy u^T P u over the whole mesh.
double advection_energy(const BlockMesh1D& mesh, const Eigen::VectorXd& u);

/// Total discrete mass 1^T P u over the whole mesh.
double advection_mass(const BlockMesh1D& mesh, const Eigen::VectorXd& u);

/// Solution of the periodic advection problem at time t: u0(wrap(x - a t)).
double advected_exact(const std::function<double(double)>& u0, double x_left,
                      double x_right, double a, double x, double t);

} // namespace fsbp

#endif
