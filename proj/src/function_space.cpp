#include "fsbp/function_space.hpp"

#include "fsbp/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fsbp {

NodeSet::NodeSet(double x_left, double x_right, std::vector<double> nodes)
    : x_left_(x_left), x_right_(x_right), nodes_(std::move(nodes)) {
    if (!(x_left_ < x_right_))
        throw std::invalid_argument("NodeSet: x_left must be < x_right");
    if (nodes_.size() < 2)
        throw std::invalid_argument("NodeSet: need at least 2 nodes");
    for (size_t i = 1; i < nodes_.size(); ++i)
        if (!(nodes_[i - 1] < nodes_[i]))
            throw std::invalid_argument("NodeSet: nodes must be strictly increasing");
    if (nodes_.front() != x_left_ || nodes_.back() != x_right_)
        throw std::invalid_argument(
            "NodeSet: boundary-inclusive node sets required (first node = x_left, "
            "last node = x_right)");
}

double NodeSet::min_spacing() const {
    double h = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i < nodes_.size(); ++i) h = std::min(h, nodes_[i] - nodes_[i - 1]);
    return h;
}

NodeSet equidistant_nodes(double x_left, double x_right, int n) {
    if (n < 2) throw std::invalid_argument("equidistant_nodes: N must be >= 2");
    if (!(x_left < x_right))
        throw std::invalid_argument("equidistant_nodes: x_left must be < x_right");
    std::vector<double> xs(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        xs[static_cast<size_t>(i)] =
            ((n - 1 - i) * x_left + i * x_right) / static_cast<double>(n - 1);
    xs.front() = x_left;
    xs.back() = x_right;
    return NodeSet(x_left, x_right, std::move(xs));
}

BasisFunction BasisFunction::monomial(int k) {
    if (k < 0) throw std::invalid_argument("monomial: exponent must be >= 0");
    BasisFunction f;
    f.kind_ = Kind::Monomial;
    f.degree_ = k;
    f.name_ = "monomial " + std::to_string(k);
    return f;
}

BasisFunction BasisFunction::sine(double omega) {
    BasisFunction f;
    f.kind_ = Kind::Sine;
    f.param_ = omega;
    f.name_ = "sine " + std::to_string(omega);
    return f;
}

BasisFunction BasisFunction::cosine(double omega) {
    BasisFunction f;
    f.kind_ = Kind::Cosine;
    f.param_ = omega;
    f.name_ = "cosine " + std::to_string(omega);
    return f;
}

BasisFunction BasisFunction::exponential(double alpha) {
    BasisFunction f;
    f.kind_ = Kind::Exponential;
    f.param_ = alpha;
    f.name_ = "exponential " + std::to_string(alpha);
    return f;
}

BasisFunction BasisFunction::custom(std::string name,
                                    std::function<double(double)> value,
                                    std::function<double(double)> derivative) {
    if (!value || !derivative)
        throw std::invalid_argument("custom basis function needs value and derivative");
    BasisFunction f;
    f.kind_ = Kind::Custom;
    f.name_ = std::move(name);
    f.value_fn_ = std::move(value);
    f.deriv_fn_ = std::move(derivative);
    return f;
}

std::pair<double, double> BasisFunction::evaluate(double x) const {
    switch (kind_) {
        case Kind::Monomial: {
            if (degree_ == 0) return {1.0, 0.0};
            double v = std::pow(x, degree_);
            double d = degree_ * std::pow(x, degree_ - 1);
            return {v, d};
        }
        case Kind::Sine:
            return {std::sin(param_ * x), param_ * std::cos(param_ * x)};
        case Kind::Cosine:
            return {std::cos(param_ * x), -param_ * std::sin(param_ * x)};
        case Kind::Exponential: {
            double v = std::exp(param_ * x);
            return {v, param_ * v};
        }
        case Kind::Custom:
            return {value_fn_(x), deriv_fn_(x)};
    }
    throw std::logic_error("unreachable");
}

bool FunctionSpace::contains_constant() const {
    for (const auto& f : basis)
        if (f.is_constant()) return true;
    return false;
}

FunctionSpace polynomial_space(int degree) {
    if (degree < 0) throw std::invalid_argument("polynomial_space: degree must be >= 0");
    FunctionSpace s;
    s.name = "poly:" + std::to_string(degree);
    for (int k = 0; k <= degree; ++k) s.basis.push_back(BasisFunction::monomial(k));
    return s;
}

FunctionSpace trigonometric_space() {
    FunctionSpace s;
    s.name = "trig";
    s.basis.push_back(BasisFunction::monomial(0));
    s.basis.push_back(BasisFunction::monomial(1));
    s.basis.push_back(BasisFunction::sine(M_PI));
    s.basis.push_back(BasisFunction::cosine(M_PI));
    return s;
}

VandermondePair vandermonde(const FunctionSpace& space, const NodeSet& nodes) {
    const int n = nodes.size();
    const int k = space.size();
    if (k < 1) throw std::invalid_argument("vandermonde: empty function space");
    VandermondePair vp;
    vp.v.resize(n, k);
    vp.v_x.resize(n, k);
    for (int j = 0; j < k; ++j) {
        const auto& f = space.basis[static_cast<size_t>(j)];
        for (int i = 0; i < n; ++i) {
            auto [val, der] = f.evaluate(nodes[i]);
            if (!std::isfinite(val) || !std::isfinite(der))
                throw EvaluationError("non-finite evaluation of " + f.name() +
                                      " at node " + std::to_string(i + 1) + " (x=" +
                                      std::to_string(nodes[i]) + ")");
            vp.v(i, j) = val;
            vp.v_x(i, j) = der;
        }
    }
    return vp;
}

namespace {

double parse_frequency(const std::string& tok) {
    // accepts "pi", "<r>pi", "<r>*pi", or a plain number
    auto p = tok.find("pi");
    if (p != std::string::npos) {
        std::string pre = tok.substr(0, p);
        if (!pre.empty() && pre.back() == '*') pre.pop_back();
        double factor = pre.empty() ? 1.0 : std::stod(pre);
        return factor * M_PI;
    }
    return std::stod(tok);
}

BasisFunction parse_basis_token(const std::string& word, const std::string& arg) {
    if (word == "monomial" || word == "mono") return BasisFunction::monomial(std::stoi(arg));
    if (word == "sine" || word == "sin") return BasisFunction::sine(parse_frequency(arg));
    if (word == "cosine" || word == "cos") return BasisFunction::cosine(parse_frequency(arg));
    if (word == "exponential" || word == "exp")
        return BasisFunction::exponential(std::stod(arg));
    throw std::invalid_argument("unknown basis function '" + word + "'");
}

} // namespace

FunctionSpace parse_space_spec(const std::string& spec) {
    if (spec == "trig") return trigonometric_space();
    if (spec.rfind("poly:", 0) == 0) {
        int d = std::stoi(spec.substr(5));
        return polynomial_space(d);
    }
    if (spec.rfind("custom:", 0) == 0) {
        std::string path = spec.substr(7);
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open basis file '" + path + "'");
        FunctionSpace s;
        s.name = "custom:" + path;
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string word, arg;
            if (!(ls >> word)) continue;
            if (word[0] == '#') continue;
            ls >> arg;
            s.basis.push_back(parse_basis_token(word, arg));
        }
        if (s.basis.empty())
            throw std::invalid_argument("basis file '" + path + "' lists no functions");
        return s;
    }
    // inline list: "sin:pi,cos:pi,mono:0"
    FunctionSpace s;
    s.name = spec;
    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto colon = tok.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("bad basis token '" + tok +
                                        "' (expected name:arg)");
        s.basis.push_back(parse_basis_token(tok.substr(0, colon), tok.substr(colon + 1)));
    }
    if (s.basis.empty()) throw std::invalid_argument("empty function space spec");
    return s;
}

NodeSet parse_node_spec(const std::string& spec) {
    if (spec.rfind("eq:", 0) != 0)
        throw std::invalid_argument("node spec must be 'eq:<xL>,<xR>,<N>'");
    std::istringstream ss(spec.substr(3));
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
        throw std::invalid_argument("node spec must be 'eq:<xL>,<xR>,<N>'");
    return equidistant_nodes(std::stod(a), std::stod(b), std::stoi(c));
}

} // namespace fsbp
