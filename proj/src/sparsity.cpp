#include "fsbp/sparsity.hpp"

#include <sstream>
#include <stdexcept>

namespace fsbp {

SparsityPattern SparsityPattern::dense() {
    SparsityPattern p;
    p.dense_ = true;
    return p;
}

SparsityPattern SparsityPattern::banded(int bandwidth, int boundary_size) {
    if (bandwidth < 1) throw std::invalid_argument("banded: bandwidth must be >= 1");
    if (boundary_size < bandwidth)
        throw std::invalid_argument("banded: boundary block size c must be >= bandwidth b");
    SparsityPattern p;
    p.dense_ = false;
    p.b_ = bandwidth;
    p.c_ = boundary_size;
    return p;
}

void SparsityPattern::validate(int n) const {
    if (n < 2) throw std::invalid_argument("pattern: need N >= 2");
    if (!dense_ && n < 2 * c_ + b_)
        throw std::invalid_argument("banded pattern with b=" + std::to_string(b_) +
                                    ", c=" + std::to_string(c_) + " needs N >= 2c + b = " +
                                    std::to_string(2 * c_ + b_) + ", got N = " +
                                    std::to_string(n));
}

bool SparsityPattern::is_free(int i, int j, int n) const {
    if (dense_) return true;
    if (i < c_ && j < c_) return true;          // left corner block
    if (i >= n - c_ && j >= n - c_) return true; // right corner block
    return j - i <= b_;                          // banded interior and couplings
}

std::vector<std::pair<int, int>> SparsityPattern::free_positions(int n) const {
    validate(n);
    std::vector<std::pair<int, int>> pos;
    pos.reserve(static_cast<size_t>(unknown_count(n, *this)));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (is_free(i, j, n)) pos.emplace_back(i, j);
    return pos;
}

std::string SparsityPattern::description() const {
    if (dense_) return "dense";
    return "banded b=" + std::to_string(b_) + " c=" + std::to_string(c_);
}

long unknown_count(int n, const SparsityPattern& pattern) {
    pattern.validate(n);
    const long nl = n;
    if (pattern.is_dense()) return nl * (nl - 1) / 2;
    const long b = pattern.bandwidth();
    const long c = pattern.boundary_size();
    return nl * b + b * (b + 1) / 2 + c * c - 2 * b * c - c;
}

Eigen::MatrixXd skew_from_parameters(const SparsityPattern& pattern,
                                     const Eigen::VectorXd& sigma, int n) {
    const auto pos = pattern.free_positions(n);
    if (sigma.size() != static_cast<Eigen::Index>(pos.size()))
        throw std::invalid_argument("skew_from_parameters: expected " +
                                    std::to_string(pos.size()) + " parameters, got " +
                                    std::to_string(sigma.size()));
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (size_t l = 0; l < pos.size(); ++l) {
        auto [i, j] = pos[l];
        s(i, j) = sigma(static_cast<Eigen::Index>(l));
        s(j, i) = -sigma(static_cast<Eigen::Index>(l));
    }
    return s;
}

Eigen::VectorXd skew_parameters(const SparsityPattern& pattern,
                                const Eigen::MatrixXd& skew) {
    const int n = static_cast<int>(skew.rows());
    const auto pos = pattern.free_positions(n);
    Eigen::VectorXd sigma(static_cast<Eigen::Index>(pos.size()));
    for (size_t l = 0; l < pos.size(); ++l)
        sigma(static_cast<Eigen::Index>(l)) = skew(pos[l].first, pos[l].second);
    return sigma;
}

SparsityPattern parse_pattern_spec(const std::string& spec) {
    if (spec == "dense") return SparsityPattern::dense();
    if (spec.rfind("banded:", 0) == 0) {
        int b = -1, c = -1;
        std::istringstream ss(spec.substr(7));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.rfind("b=", 0) == 0)
                b = std::stoi(tok.substr(2));
            else if (tok.rfind("c=", 0) == 0)
                c = std::stoi(tok.substr(2));
            else
                throw std::invalid_argument("bad pattern token '" + tok + "'");
        }
        if (b < 0) throw std::invalid_argument("banded pattern needs b=<bandwidth>");
        if (c < 0) c = 2 * b;
        return SparsityPattern::banded(b, c);
    }
    throw std::invalid_argument("pattern spec must be 'dense' or 'banded:b=<b>,c=<c>'");
}

} // namespace fsbp
