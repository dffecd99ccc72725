#ifndef FSBP_ERRORS_HPP
#define FSBP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fsbp {

/// Basis function evaluation produced a non-finite value.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operator file could not be parsed. Carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// A numerical routine (SVD, eigensolver) failed to converge.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operator violates a precondition of the requested diagnostic.
class InconsistentOperatorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A physical state became inadmissible (negative density/pressure, NaN).
class StateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A simulation had to stop; records when and where.
class SimulationAbort : public std::runtime_error {
public:
    SimulationAbort(double t, int block, int node, const std::string& what)
        : std::runtime_error("simulation aborted at t=" + std::to_string(t) +
                             " (block " + std::to_string(block) + ", node " +
                             std::to_string(node) + "): " + what),
          t_(t), block_(block), node_(node) {}
    double time() const { return t_; }
    int block() const { return block_; }
    int node() const { return node_; }

private:
    double t_;
    int block_;
    int node_;
};

/// Adaptive time stepping drove dt below the representable floor.
class StiffnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fsbp

#endif
