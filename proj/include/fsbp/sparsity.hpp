#ifndef FSBP_SPARSITY_HPP
#define FSBP_SPARSITY_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

namespace fsbp {

/// Sparsity structure of the skew-symmetric part S. Either dense, or a
/// banded interior of bandwidth b with dense c x c corner blocks (c >= b).
/// Against an N-node set, banded requires N >= 2c + b.
class SparsityPattern {
public:
    static SparsityPattern dense();
    static SparsityPattern banded(int bandwidth, int boundary_size);

    bool is_dense() const { return dense_; }
    int bandwidth() const { return b_; }
    int boundary_size() const { return c_; }

    /// Throws invalid_argument when the pattern cannot be realized on N nodes.
    void validate(int n) const;

    /// True when the strict upper-triangle entry (i, j), i < j, is free.
    bool is_free(int i, int j, int n) const;

    /// Free strict-upper-triangle positions in row-major order. This is the
    /// canonical layout of the parameter vector and of serialized entries.
    std::vector<std::pair<int, int>> free_positions(int n) const;

    std::string description() const;

    bool operator==(const SparsityPattern& o) const {
        return dense_ == o.dense_ && b_ == o.b_ && c_ == o.c_;
    }

private:
    SparsityPattern() = default;
    bool dense_ = true;
    int b_ = 0;
    int c_ = 0;
};

/// Number of free entries of S under the pattern: N(N-1)/2 for dense,
/// Nb + b(b+1)/2 + c^2 - 2bc - c for banded.
long unknown_count(int n, const SparsityPattern& pattern);

/// Assembles the dense skew-symmetric matrix from its free entries
/// (row-major over the pattern). Inverse of skew_parameters.
Eigen::MatrixXd skew_from_parameters(const SparsityPattern& pattern,
                                     const Eigen::VectorXd& sigma, int n);

/// Extracts the free entries of a skew-symmetric matrix in pattern order.
Eigen::VectorXd skew_parameters(const SparsityPattern& pattern,
                                const Eigen::MatrixXd& skew);

/// Text grammar: "dense" or "banded:b=3,c=6".
SparsityPattern parse_pattern_spec(const std::string& spec);

} // namespace fsbp

#endif
