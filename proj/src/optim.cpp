#include "fsbp/optim.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fsbp {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("logit: argument must lie in (0,1)");
    return std::log(p / (1.0 - p));
}

double sigmoid_derivative(double x) {
    const double s = sigmoid(x);
    return s * (1.0 - s);
}

double softplus(double x) {
    if (x > 30.0) return x;
    return std::log1p(std::exp(x));
}

double softplus_inverse(double y) {
    if (!(y > 0.0)) throw std::invalid_argument("softplus_inverse: argument must be positive");
    if (y > 30.0) return y;
    return std::log(std::expm1(y));
}

double softplus_derivative(double x) { return sigmoid(x); }

double positive_map(NormMap map, double x) {
    return map == NormMap::Sigmoid ? sigmoid(x) : softplus(x);
}

double positive_map_inverse(NormMap map, double p) {
    return map == NormMap::Sigmoid ? logit(p) : softplus_inverse(p);
}

double positive_map_derivative(NormMap map, double x) {
    return map == NormMap::Sigmoid ? sigmoid_derivative(x) : softplus_derivative(x);
}

namespace {

struct WolfeResult {
    double alpha = 0.0;
    double f = 0.0;
    bool ok = false;
    Eigen::VectorXd x;
    Eigen::VectorXd g;
};

constexpr double kC1 = 1e-4;
constexpr double kC2 = 0.9;
constexpr int kMaxBracket = 50;
constexpr int kMaxZoom = 60;

double cubic_step(double a, double fa, double da, double b, double fb, double db) {
    // minimizer of the cubic through (a, fa, da), (b, fb, db); NaN on failure
    const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - da * db;
    if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    return b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
}

class LineSearch {
public:
    LineSearch(const ObjectiveFn& f, const Eigen::VectorXd& x0, const Eigen::VectorXd& d,
               double f0, double dphi0)
        : f_(f), x0_(x0), d_(d), f0_(f0), dphi0_(dphi0) {}

    WolfeResult run(double alpha1) {
        double alpha_prev = 0.0, f_prev = f0_, dphi_prev = dphi0_;
        double alpha = alpha1;
        const double alpha_max = 1e12;
        for (int i = 0; i < kMaxBracket; ++i) {
            auto [fa, dphi] = eval(alpha);
            if (fa > f0_ + kC1 * alpha * dphi0_ || (i > 0 && fa >= f_prev))
                return zoom(alpha_prev, f_prev, dphi_prev, alpha, fa, dphi);
            if (std::abs(dphi) <= -kC2 * dphi0_) return take(alpha, fa);
            if (dphi >= 0.0) return zoom(alpha, fa, dphi, alpha_prev, f_prev, dphi_prev);
            alpha_prev = alpha;
            f_prev = fa;
            dphi_prev = dphi;
            alpha = std::min(2.0 * alpha, alpha_max);
            if (alpha_prev >= alpha_max) break;
        }
        return {};
    }

private:
    std::pair<double, double> eval(double alpha) {
        x_trial_ = x0_ + alpha * d_;
        g_trial_.resize(x0_.size());
        const double fa = f_(x_trial_, g_trial_);
        return {fa, g_trial_.dot(d_)};
    }

    WolfeResult take(double alpha, double fa) {
        WolfeResult r;
        r.alpha = alpha;
        r.f = fa;
        r.ok = true;
        r.x = x_trial_;
        r.g = g_trial_;
        return r;
    }

    WolfeResult zoom(double lo, double f_lo, double d_lo, double hi, double f_hi,
                     double d_hi) {
        for (int j = 0; j < kMaxZoom; ++j) {
            double alpha = cubic_step(lo, f_lo, d_lo, hi, f_hi, d_hi);
            const double left = std::min(lo, hi), right = std::max(lo, hi);
            const double width = right - left;
            if (!std::isfinite(alpha) || alpha <= left + 0.1 * width ||
                alpha >= right - 0.1 * width)
                alpha = 0.5 * (lo + hi);
            auto [fa, dphi] = eval(alpha);
            if (fa > f0_ + kC1 * alpha * dphi0_ || fa >= f_lo) {
                hi = alpha;
                f_hi = fa;
                d_hi = dphi;
            } else {
                if (std::abs(dphi) <= -kC2 * dphi0_) return take(alpha, fa);
                if (dphi * (hi - lo) >= 0.0) {
                    hi = lo;
                    f_hi = f_lo;
                    d_hi = d_lo;
                }
                lo = alpha;
                f_lo = fa;
                d_lo = dphi;
            }
            if (std::abs(hi - lo) <= 1e-16 * std::max(1.0, std::abs(lo))) break;
        }
        return {};
    }

    const ObjectiveFn& f_;
    const Eigen::VectorXd& x0_;
    const Eigen::VectorXd& d_;
    double f0_;
    double dphi0_;
    Eigen::VectorXd x_trial_;
    Eigen::VectorXd g_trial_;
};

} // namespace

std::pair<Eigen::VectorXd, OptimResult> minimize(const ObjectiveFn& f,
                                                 const Eigen::VectorXd& x0,
                                                 const OptimOptions& opts) {
    if (!(opts.grad_tol > 0.0) || !(opts.residual_tol > 0.0))
        throw std::invalid_argument("minimize: tolerances must be positive");

    const bool default_floor = !opts.objective_floor.has_value();
    const double floor =
        opts.objective_floor.value_or(1e-2 * opts.residual_tol * opts.residual_tol);
    const double exact_level = opts.residual_tol * opts.residual_tol;

    Eigen::VectorXd x = x0;
    Eigen::VectorXd g(x.size());
    double fx = f(x, g);

    Eigen::VectorXd x_best = x;
    double f_best = fx;

    std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs; // (s, y)
    Eigen::VectorXd d(x.size()), q(x.size());

    OptimResult result;
    bool restarted_after_failure = false;

    auto finish = [&](bool converged) {
        if (f_best < fx) {
            x = x_best;
            fx = f_best;
            f(x, g);
        }
        result.objective = fx;
        result.grad_norm = g.norm();
        result.converged = converged;
        result.exact = default_floor && fx <= exact_level && converged;
        return std::make_pair(x, result);
    };

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        result.iters = iter;
        const double gnorm = g.norm();
        if (gnorm <= opts.grad_tol) return finish(true);
        if (fx <= floor) return finish(true);

        // two-loop recursion
        q = -g;
        std::vector<double> alpha_coeffs(pairs.size());
        for (size_t k = pairs.size(); k-- > 0;) {
            const auto& [s, y] = pairs[k];
            const double rho = 1.0 / y.dot(s);
            alpha_coeffs[k] = rho * s.dot(q);
            q -= alpha_coeffs[k] * y;
        }
        if (!pairs.empty()) {
            const auto& [s, y] = pairs.back();
            q *= s.dot(y) / y.dot(y);
        } else {
            q *= 1.0 / std::max(1.0, gnorm);
        }
        for (size_t k = 0; k < pairs.size(); ++k) {
            const auto& [s, y] = pairs[k];
            const double rho = 1.0 / y.dot(s);
            const double beta = rho * y.dot(q);
            q += (alpha_coeffs[k] - beta) * s;
        }
        d = q;

        double dphi0 = g.dot(d);
        if (!(dphi0 < 0.0)) { // not a descent direction, fall back to steepest
            pairs.clear();
            d = -g / std::max(1.0, gnorm);
            dphi0 = g.dot(d);
        }

        LineSearch ls(f, x, d, fx, dphi0);
        WolfeResult w = ls.run(1.0);
        if (!w.ok && !pairs.empty() && !restarted_after_failure) {
            // restart from steepest descent once before giving up
            restarted_after_failure = true;
            pairs.clear();
            d = -g / std::max(1.0, gnorm);
            dphi0 = g.dot(d);
            LineSearch ls2(f, x, d, fx, dphi0);
            w = ls2.run(1.0);
        }
        if (!w.ok) {
            const bool converged =
                g.norm() <= opts.grad_tol || fx <= floor ||
                (default_floor && std::min(fx, f_best) <= exact_level);
            return finish(converged);
        }
        restarted_after_failure = false;

        Eigen::VectorXd s = w.alpha * d;
        Eigen::VectorXd y = w.g - g;
        const double sy = s.dot(y);
        if (sy > 1e-10 * s.norm() * y.norm()) {
            pairs.emplace_back(std::move(s), std::move(y));
            if (static_cast<int>(pairs.size()) > opts.memory) pairs.pop_front();
        }

        x = w.x;
        g = w.g;
        fx = w.f;
        if (fx < f_best) {
            f_best = fx;
            x_best = x;
        }
    }
    result.iters = opts.max_iters;
    return finish(g.norm() <= opts.grad_tol || fx <= floor ||
                  (default_floor && fx <= exact_level));
}

} // namespace fsbp
