#ifndef FSBP_FUNCTION_SPACE_HPP
#define FSBP_FUNCTION_SPACE_HPP

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

namespace fsbp {

/// One-dimensional node set on [x_L, x_R]. Strictly increasing, N >= 2,
/// and boundary-inclusive: the first node is x_L and the last is x_R.
class NodeSet {
public:
    NodeSet(double x_left, double x_right, std::vector<double> nodes);

    double x_left() const { return x_left_; }
    double x_right() const { return x_right_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    double operator[](int i) const { return nodes_[static_cast<size_t>(i)]; }
    const std::vector<double>& nodes() const { return nodes_; }
    double length() const { return x_right_ - x_left_; }
    double min_spacing() const;

private:
    double x_left_;
    double x_right_;
    std::vector<double> nodes_;
};

/// nodes[i] = x_L + i*(x_R - x_L)/(N-1), endpoints exact.
NodeSet equidistant_nodes(double x_left, double x_right, int n);

/// A basis function with exact value and derivative evaluation.
class BasisFunction {
public:
    enum class Kind { Monomial, Sine, Cosine, Exponential, Custom };

    static BasisFunction monomial(int k);
    static BasisFunction sine(double omega);
    static BasisFunction cosine(double omega);
    static BasisFunction exponential(double alpha);
    static BasisFunction custom(std::string name,
                                std::function<double(double)> value,
                                std::function<double(double)> derivative);

    /// (f(x), f'(x)) with analytic derivative.
    std::pair<double, double> evaluate(double x) const;

    Kind kind() const { return kind_; }
    double parameter() const { return param_; }
    int degree() const { return degree_; }
    const std::string& name() const { return name_; }
    bool is_constant() const { return kind_ == Kind::Monomial && degree_ == 0; }

private:
    BasisFunction() = default;

    Kind kind_ = Kind::Custom;
    int degree_ = 0;      // Monomial exponent
    double param_ = 0.0;  // frequency or growth rate
    std::string name_;
    std::function<double(double)> value_fn_;
    std::function<double(double)> deriv_fn_;
};

/// Ordered list of basis functions spanning the exactness space.
struct FunctionSpace {
    std::vector<BasisFunction> basis;
    std::string name;

    int size() const { return static_cast<int>(basis.size()); }
    bool contains_constant() const;
};

/// span{1, x, ..., x^d}
FunctionSpace polynomial_space(int degree);

/// span{1, x, sin(pi x), cos(pi x)}
FunctionSpace trigonometric_space();

struct VandermondePair {
    Eigen::MatrixXd v;    // V[i][j]   = f_j(x_i)
    Eigen::MatrixXd v_x;  // V_x[i][j] = f_j'(x_i)
};

/// Evaluates the space on the nodes. Throws EvaluationError when a basis
/// function produces a non-finite value, naming the function and node.
VandermondePair vandermonde(const FunctionSpace& space, const NodeSet& nodes);

/// Text grammar: "poly:d", "trig", "custom:<file>", or an inline
/// comma-separated list such as "sin:pi,cos:pi" or "mono:2,exp:0.5".
FunctionSpace parse_space_spec(const std::string& spec);

/// Text grammar: "eq:<xL>,<xR>,<N>".
NodeSet parse_node_spec(const std::string& spec);

} // namespace fsbp

#endif
