#include "fsbp/advection.hpp"

#include <cmath>
#include <stdexcept>

namespace fsbp {

BlockMesh1D::BlockMesh1D(double x_left, double x_right, int blocks, SBPOperator reference_op)
    : x_left_(x_left), x_right_(x_right), blocks_(blocks), op_(std::move(reference_op)) {
    if (!(x_left < x_right)) throw std::invalid_argument("BlockMesh1D: x_left must be < x_right");
    if (blocks < 1) throw std::invalid_argument("BlockMesh1D: need at least one block");
    const double block_width = (x_right_ - x_left_) / blocks_;
    jacobian_ = block_width / op_.nodes().length();
}

double BlockMesh1D::node_x(int block, int i) const {
    const double block_width = (x_right_ - x_left_) / blocks_;
    const double left = x_left_ + block * block_width;
    return left + (op_.nodes()[i] - op_.nodes().x_left()) * jacobian_;
}

Eigen::VectorXd BlockMesh1D::sample(const std::function<double(double)>& f) const {
    const int n = nodes_per_block();
    Eigen::VectorXd u(total_nodes());
    for (int b = 0; b < blocks_; ++b)
        for (int i = 0; i < n; ++i) u(b * n + i) = f(node_x(b, i));
    return u;
}

Eigen::VectorXd advection_rhs(const BlockMesh1D& mesh, double a, const Eigen::VectorXd& u) {
    const int n = mesh.nodes_per_block();
    const int nb = mesh.blocks();
    if (u.size() != mesh.total_nodes()) throw std::invalid_argument("advection_rhs: size mismatch");
    const SBPOperator& op = mesh.reference_op();
    const double inv_j = 1.0 / mesh.jacobian();

    Eigen::VectorXd rhs(u.size());
    for (int b = 0; b < nb; ++b) {
        const auto ub = u.segment(b * n, n);
        rhs.segment(b * n, n) = (-a * inv_j) * op.apply(ub);

        const double u_left = ub(0);
        const double u_right = ub(n - 1);
        const double nbr_right = u((b + nb - 1) % nb * n + n - 1); // left neighbor
        const double nbr_left = u((b + 1) % nb * n);               // right neighbor

        // upwind interface values
        const double u_star_left = a >= 0.0 ? nbr_right : u_left;
        const double u_star_right = a >= 0.0 ? u_right : nbr_left;

        rhs(b * n) += a * (u_star_left - u_left) / (mesh.jacobian() * op.norm_weights()(0));
        rhs(b * n + n - 1) -=
            a * (u_star_right - u_right) / (mesh.jacobian() * op.norm_weights()(n - 1));
    }
    return rhs;
}

double advection_l2_norm(const BlockMesh1D& mesh, const Eigen::VectorXd& diff) {
    const int n = mesh.nodes_per_block();
    double sum = 0.0;
    for (int b = 0; b < mesh.blocks(); ++b)
        for (int i = 0; i < n; ++i)
            sum += mesh.weight(i) * diff(b * n + i) * diff(b * n + i);
    return std::sqrt(sum);
}

double advection_energy(const BlockMesh1D& mesh, const Eigen::VectorXd& u) {
    const int n = mesh.nodes_per_block();
    double sum = 0.0;
    for (int b = 0; b < mesh.blocks(); ++b)
        for (int i = 0; i < n; ++i) sum += mesh.weight(i) * u(b * n + i) * u(b * n + i);
    return sum;
}

double advection_mass(const BlockMesh1D& mesh, const Eigen::VectorXd& u) {
    const int n = mesh.nodes_per_block();
    double sum = 0.0;
    for (int b = 0; b < mesh.blocks(); ++b)
        for (int i = 0; i < n; ++i) sum += mesh.weight(i) * u(b * n + i);
    return sum;
}

double advected_exact(const std::function<double(double)>& u0, double x_left, double x_right,
                      double a, double x, double t) {
    const double length = x_right - x_left;
    double xi = std::fmod(x - a * t - x_left, length);
    if (xi < 0.0) xi += length;
    return u0(x_left + xi);
}

} // namespace fsbp
