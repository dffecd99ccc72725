#ifndef FSBP_SERIALIZATION_HPP
#define FSBP_SERIALIZATION_HPP

#include "fsbp/operator.hpp"

#include <string>

namespace fsbp {

/// Line-based text format, 17 significant digits per value so that
/// parse(serialize(op)) reproduces every binary64 field bit-exactly:
///
///   FSBP 1
///   domain <xL> <xR>
///   nodes <N>
///   <x_1> ... <x_N>
///   P
///   <p_1> ... <p_N>
///   S dense | S banded <b> <c>
///   <free entries of S, row-major over the stored pattern>
std::string serialize(const SBPOperator& op);

/// Throws ParseError (with line number) on malformed input.
SBPOperator parse_operator(const std::string& text);

void write_operator_file(const SBPOperator& op, const std::string& path);
SBPOperator read_operator_file(const std::string& path);

} // namespace fsbp

#endif
