#ifndef FSBP_EULER_HPP
#define FSBP_EULER_HPP

#include "fsbp/operator.hpp"

#include <Eigen/Core>

namespace fsbp {

enum class Direction { X, Y };

/// Conserved variables (rho, rho v1, rho v2, rho e).
using EulerState = Eigen::Vector4d;

double euler_pressure(const EulerState& u, double gamma);

/// Directional flux column of the compressible Euler equations.
/// Throws StateError for non-positive density or pressure.
EulerState euler_flux(const EulerState& u, Direction dir, double gamma);

/// HLLC approximate Riemann flux with Davis wave-speed estimates.
EulerState hllc_flux(const EulerState& left, const EulerState& right, Direction dir,
                     double gamma);

struct ManufacturedParams {
    double c = 2.0;
    double amplitude = 0.1;
    double omega = 3.14159265358979323846;
    double gamma = 1.4;
};

/// rho = c + A sin(omega (x + y - t)), rho v1 = rho v2 = rho, rho e = rho^2.
EulerState manufactured_state(double x, double y, double t, const ManufacturedParams& mp);

/// Source that makes manufactured_state an exact solution.
EulerState manufactured_source(double x, double y, double t, const ManufacturedParams& mp);

/// K x K Cartesian grid of square blocks covering [-1,1]^2, all carrying the
/// same affinely mapped reference operator; periodic in both directions.
/// State layout: block (bi, bj) row-major, then field, then node (i, j)
/// row-major, where i indexes x and j indexes y.
class BlockMesh2D {
public:
    BlockMesh2D(int blocks_per_side, SBPOperator reference_op);

    int blocks_per_side() const { return k_; }
    int nodes_per_side() const { return op_.size(); }
    const SBPOperator& reference_op() const { return op_; }
    double jacobian() const { return jacobian_; }
    double h_min() const { return op_.nodes().min_spacing() * jacobian_; }

    long total_size() const { return 4L * k_ * k_ * op_.size() * op_.size(); }
    long block_offset(int bi, int bj, int field) const;
    double node_x(int bi, int i) const;
    double node_y(int bj, int j) const { return node_x(bj, j); }

private:
    int k_;
    SBPOperator op_;
    double jacobian_;
};

/// Tensor-product SBP discretization of the 2D compressible Euler equations
/// with HLLC interface coupling, periodic boundaries, and the manufactured
/// source term.
class Euler2DSemidiscretization {
public:
    Euler2DSemidiscretization(BlockMesh2D mesh, ManufacturedParams params);

    const BlockMesh2D& mesh() const { return mesh_; }
    const ManufacturedParams& params() const { return params_; }

    /// Throws SimulationAbort (with time and location) on inadmissible states.
    void rhs(double t, const Eigen::VectorXd& u, Eigen::VectorXd& dudt) const;

    /// Manufactured solution sampled on the mesh at time t.
    Eigen::VectorXd exact_state(double t) const;

    /// Per-variable discrete L2 errors (P (x) P weights) and Linf errors
    /// against the manufactured solution.
    std::pair<Eigen::Vector4d, Eigen::Vector4d> error_norms(const Eigen::VectorXd& u,
                                                            double t) const;

    /// P-weighted total of one conserved field.
    double total_mass(const Eigen::VectorXd& u, int field) const;

private:
    BlockMesh2D mesh_;
    ManufacturedParams params_;
};

} // namespace fsbp

#endif
