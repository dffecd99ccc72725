#include "fsbp/euler.hpp"

#include "fsbp/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace fsbp {

namespace {

struct Primitive {
    double rho;
    double vn; // normal velocity (direction of the flux)
    double vt; // transverse velocity
    double p;
    double energy; // total energy per volume
};

Primitive to_primitive(const EulerState& u, Direction dir, double gamma) {
    const double rho = u(0);
    if (!(rho > 0.0) || !std::isfinite(rho)) throw StateError("non-positive density");
    const double v1 = u(1) / rho;
    const double v2 = u(2) / rho;
    const double p = (gamma - 1.0) * (u(3) - 0.5 * rho * (v1 * v1 + v2 * v2));
    if (!(p > 0.0) || !std::isfinite(p)) throw StateError("non-positive pressure");
    Primitive w;
    w.rho = rho;
    w.vn = dir == Direction::X ? v1 : v2;
    w.vt = dir == Direction::X ? v2 : v1;
    w.p = p;
    w.energy = u(3);
    return w;
}

EulerState from_normal_components(double mass, double mom_n, double mom_t, double energy,
                                  Direction dir) {
    if (dir == Direction::X) return EulerState(mass, mom_n, mom_t, energy);
    return EulerState(mass, mom_t, mom_n, energy);
}

} // namespace

double euler_pressure(const EulerState& u, double gamma) {
    const double rho = u(0);
    return (gamma - 1.0) * (u(3) - 0.5 * (u(1) * u(1) + u(2) * u(2)) / rho);
}

EulerState euler_flux(const EulerState& u, Direction dir, double gamma) {
    const Primitive w = to_primitive(u, dir, gamma);
    const double mom_n = w.rho * w.vn;
    const double mom_t = w.rho * w.vt;
    return from_normal_components(mom_n, mom_n * w.vn + w.p, mom_t * w.vn,
                                  (w.energy + w.p) * w.vn, dir);
}

EulerState hllc_flux(const EulerState& left, const EulerState& right, Direction dir,
                     double gamma) {
    const Primitive wl = to_primitive(left, dir, gamma);
    const Primitive wr = to_primitive(right, dir, gamma);
    const double cl = std::sqrt(gamma * wl.p / wl.rho);
    const double cr = std::sqrt(gamma * wr.p / wr.rho);

    // Davis estimates
    const double s_left = std::min(wl.vn - cl, wr.vn - cr);
    const double s_right = std::max(wl.vn + cl, wr.vn + cr);

    const EulerState fl = euler_flux(left, dir, gamma);
    const EulerState fr = euler_flux(right, dir, gamma);
    if (s_left >= 0.0) return fl;
    if (s_right <= 0.0) return fr;

    const double s_star =
        (wr.p - wl.p + wl.rho * wl.vn * (s_left - wl.vn) - wr.rho * wr.vn * (s_right - wr.vn)) /
        (wl.rho * (s_left - wl.vn) - wr.rho * (s_right - wr.vn));

    auto star_state = [&](const Primitive& w, const EulerState& u, double s) {
        const double factor = w.rho * (s - w.vn) / (s - s_star);
        const double energy =
            factor * (u(3) / w.rho + (s_star - w.vn) * (s_star + w.p / (w.rho * (s - w.vn))));
        return from_normal_components(factor, factor * s_star, factor * w.vt, energy, dir);
    };

    if (s_star >= 0.0) {
        const EulerState u_star = star_state(wl, left, s_left);
        return fl + s_left * (u_star - left);
    }
    const EulerState u_star = star_state(wr, right, s_right);
    return fr + s_right * (u_star - right);
}

EulerState manufactured_state(double x, double y, double t, const ManufacturedParams& mp) {
    const double rho = mp.c + mp.amplitude * std::sin(mp.omega * (x + y - t));
    return EulerState(rho, rho, rho, rho * rho);
}

EulerState manufactured_source(double x, double y, double t, const ManufacturedParams& mp) {
    const double phi = mp.omega * (x + y - t);
    const double rho = mp.c + mp.amplitude * std::sin(phi);
    const double chi = mp.amplitude * mp.omega * std::cos(phi);
    const double gm1 = mp.gamma - 1.0;
    const double momentum = chi * (1.0 + gm1 * (2.0 * rho - 1.0));
    return EulerState(chi, momentum, momentum,
                      chi * (2.0 * rho + 2.0 * gm1 * (2.0 * rho - 1.0)));
}

BlockMesh2D::BlockMesh2D(int blocks_per_side, SBPOperator reference_op)
    : k_(blocks_per_side), op_(std::move(reference_op)) {
    if (k_ < 1) throw std::invalid_argument("BlockMesh2D: need at least one block per side");
    const double block_width = 2.0 / k_;
    jacobian_ = block_width / op_.nodes().length();
}

long BlockMesh2D::block_offset(int bi, int bj, int field) const {
    const long nn = static_cast<long>(op_.size()) * op_.size();
    return ((static_cast<long>(bi) * k_ + bj) * 4 + field) * nn;
}

double BlockMesh2D::node_x(int bi, int i) const {
    const double block_width = 2.0 / k_;
    const double left = -1.0 + bi * block_width;
    return left + (op_.nodes()[i] - op_.nodes().x_left()) * jacobian_;
}

Euler2DSemidiscretization::Euler2DSemidiscretization(BlockMesh2D mesh,
                                                     ManufacturedParams params)
    : mesh_(std::move(mesh)), params_(params) {
    if (!(params_.gamma > 1.0))
        throw std::invalid_argument("euler: gamma must exceed 1");
    if (!(params_.c > params_.amplitude) || params_.amplitude < 0.0)
        throw std::invalid_argument("euler: need c > A >= 0 for positive density");
}

namespace {

using FieldMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                Eigen::RowMajor>>;
using FieldMapMut =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

} // namespace

void Euler2DSemidiscretization::rhs(double t, const Eigen::VectorXd& u,
                                    Eigen::VectorXd& dudt) const {
    const int n = mesh_.nodes_per_side();
    const int k = mesh_.blocks_per_side();
    const double gamma = params_.gamma;
    if (u.size() != mesh_.total_size()) throw std::invalid_argument("euler rhs: size mismatch");
    dudt.resize(u.size());
    const SBPOperator& op = mesh_.reference_op();
    const double inv_j = 1.0 / mesh_.jacobian();
    const Eigen::VectorXd& p = op.norm_weights();

    auto state_at = [&](int bi, int bj, int i, int j) {
        EulerState s;
        for (int f = 0; f < 4; ++f)
            s(f) = u(mesh_.block_offset(bi, bj, f) + static_cast<long>(i) * n + j);
        return s;
    };

    Eigen::MatrixXd fx[4], fy[4];
    for (auto& m : fx) m.resize(n, n);
    for (auto& m : fy) m.resize(n, n);

    for (int bi = 0; bi < k; ++bi) {
        for (int bj = 0; bj < k; ++bj) {
            // volume fluxes
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const EulerState s = state_at(bi, bj, i, j);
                    EulerState flux_x, flux_y;
                    try {
                        flux_x = euler_flux(s, Direction::X, gamma);
                        flux_y = euler_flux(s, Direction::Y, gamma);
                    } catch (const StateError& e) {
                        throw SimulationAbort(t, bi * k + bj, i * n + j, e.what());
                    }
                    for (int f = 0; f < 4; ++f) {
                        fx[f](i, j) = flux_x(f);
                        fy[f](i, j) = flux_y(f);
                    }
                }
            }

            for (int f = 0; f < 4; ++f) {
                FieldMapMut out(dudt.data() + mesh_.block_offset(bi, bj, f), n, n);
                out = -inv_j * (op.apply_to_columns(fx[f]) + op.apply_to_rows(fy[f]));
            }

            // interface penalties, periodic wrap
            const int bi_prev = (bi + k - 1) % k, bi_next = (bi + 1) % k;
            const int bj_prev = (bj + k - 1) % k, bj_next = (bj + 1) % k;
            try {
                for (int j = 0; j < n; ++j) {
                    const EulerState inner_l = state_at(bi, bj, 0, j);
                    const EulerState outer_l = state_at(bi_prev, bj, n - 1, j);
                    const EulerState f_star_l = hllc_flux(outer_l, inner_l, Direction::X, gamma);
                    const EulerState df_l = f_star_l - euler_flux(inner_l, Direction::X, gamma);

                    const EulerState inner_r = state_at(bi, bj, n - 1, j);
                    const EulerState outer_r = state_at(bi_next, bj, 0, j);
                    const EulerState f_star_r = hllc_flux(inner_r, outer_r, Direction::X, gamma);
                    const EulerState df_r = f_star_r - euler_flux(inner_r, Direction::X, gamma);

                    for (int f = 0; f < 4; ++f) {
                        dudt(mesh_.block_offset(bi, bj, f) + 0L * n + j) +=
                            df_l(f) / (mesh_.jacobian() * p(0));
                        dudt(mesh_.block_offset(bi, bj, f) + static_cast<long>(n - 1) * n + j) -=
                            df_r(f) / (mesh_.jacobian() * p(n - 1));
                    }
                }
                for (int i = 0; i < n; ++i) {
                    const EulerState inner_b = state_at(bi, bj, i, 0);
                    const EulerState outer_b = state_at(bi, bj_prev, i, n - 1);
                    const EulerState g_star_b = hllc_flux(outer_b, inner_b, Direction::Y, gamma);
                    const EulerState dg_b = g_star_b - euler_flux(inner_b, Direction::Y, gamma);

                    const EulerState inner_t = state_at(bi, bj, i, n - 1);
                    const EulerState outer_t = state_at(bi, bj_next, i, 0);
                    const EulerState g_star_t = hllc_flux(inner_t, outer_t, Direction::Y, gamma);
                    const EulerState dg_t = g_star_t - euler_flux(inner_t, Direction::Y, gamma);

                    for (int f = 0; f < 4; ++f) {
                        dudt(mesh_.block_offset(bi, bj, f) + static_cast<long>(i) * n + 0) +=
                            dg_b(f) / (mesh_.jacobian() * p(0));
                        dudt(mesh_.block_offset(bi, bj, f) + static_cast<long>(i) * n + n - 1) -=
                            dg_t(f) / (mesh_.jacobian() * p(n - 1));
                    }
                }
            } catch (const StateError& e) {
                throw SimulationAbort(t, bi * k + bj, -1, e.what());
            }

            // manufactured source
            for (int i = 0; i < n; ++i) {
                const double x = mesh_.node_x(bi, i);
                for (int j = 0; j < n; ++j) {
                    const double y = mesh_.node_y(bj, j);
                    const EulerState s = manufactured_source(x, y, t, params_);
                    for (int f = 0; f < 4; ++f)
                        dudt(mesh_.block_offset(bi, bj, f) + static_cast<long>(i) * n + j) +=
                            s(f);
                }
            }
        }
    }
}

Eigen::VectorXd Euler2DSemidiscretization::exact_state(double t) const {
    const int n = mesh_.nodes_per_side();
    const int k = mesh_.blocks_per_side();
    Eigen::VectorXd u(mesh_.total_size());
    for (int bi = 0; bi < k; ++bi)
        for (int bj = 0; bj < k; ++bj)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const EulerState s =
                        manufactured_state(mesh_.node_x(bi, i), mesh_.node_y(bj, j), t, params_);
                    for (int f = 0; f < 4; ++f)
                        u(mesh_.block_offset(bi, bj, f) + static_cast<long>(i) * n + j) = s(f);
                }
    return u;
}

std::pair<Eigen::Vector4d, Eigen::Vector4d> Euler2DSemidiscretization::error_norms(
    const Eigen::VectorXd& u, double t) const {
    const int n = mesh_.nodes_per_side();
    const int k = mesh_.blocks_per_side();
    const Eigen::VectorXd& p = mesh_.reference_op().norm_weights();
    const double j2 = mesh_.jacobian() * mesh_.jacobian();
    Eigen::Vector4d l2 = Eigen::Vector4d::Zero();
    Eigen::Vector4d linf = Eigen::Vector4d::Zero();
    for (int bi = 0; bi < k; ++bi)
        for (int bj = 0; bj < k; ++bj)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const EulerState ex =
                        manufactured_state(mesh_.node_x(bi, i), mesh_.node_y(bj, j), t, params_);
                    for (int f = 0; f < 4; ++f) {
                        const double diff =
                            u(mesh_.block_offset(bi, bj, f) + static_cast<long>(i) * n + j) -
                            ex(f);
                        l2(f) += j2 * p(i) * p(j) * diff * diff;
                        linf(f) = std::max(linf(f), std::abs(diff));
                    }
                }
    l2 = l2.cwiseSqrt();
    return {l2, linf};
}

double Euler2DSemidiscretization::total_mass(const Eigen::VectorXd& u, int field) const {
    const int n = mesh_.nodes_per_side();
    const int k = mesh_.blocks_per_side();
    const Eigen::VectorXd& p = mesh_.reference_op().norm_weights();
    const double j2 = mesh_.jacobian() * mesh_.jacobian();
    double sum = 0.0;
    for (int bi = 0; bi < k; ++bi)
        for (int bj = 0; bj < k; ++bj)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    sum += j2 * p(i) * p(j) *
                           u(mesh_.block_offset(bi, bj, field) + static_cast<long>(i) * n + j);
    return sum;
}

} // namespace fsbp
