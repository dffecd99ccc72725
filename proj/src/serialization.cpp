#include "fsbp/serialization.hpp"

#include "fsbp/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace fsbp {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class LineReader {
public:
    explicit LineReader(const std::string& text) : in_(text) {}

    bool next(std::string& line) {
        while (std::getline(in_, line)) {
            ++lineno_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    }

    int lineno() const { return lineno_; }

private:
    std::istringstream in_;
    int lineno_ = 0;
};

std::vector<double> parse_values(LineReader& reader, size_t count,
                                 const std::string& what) {
    std::vector<double> vals;
    vals.reserve(count);
    std::string line;
    while (vals.size() < count) {
        if (!reader.next(line))
            throw ParseError(reader.lineno(), "unexpected end of file while reading " +
                                                  what + " (" + std::to_string(vals.size()) +
                                                  " of " + std::to_string(count) + " values)");
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            if (vals.size() == count)
                throw ParseError(reader.lineno(), "too many values for " + what);
            try {
                size_t used = 0;
                double v = std::stod(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
                vals.push_back(v);
            } catch (const std::exception&) {
                throw ParseError(reader.lineno(), "bad number '" + tok + "' in " + what);
            }
        }
    }
    return vals;
}

} // namespace

std::string serialize(const SBPOperator& op) {
    std::ostringstream out;
    const int n = op.size();
    out << "FSBP 1\n";
    out << "domain " << fmt(op.nodes().x_left()) << ' ' << fmt(op.nodes().x_right()) << '\n';
    out << "nodes " << n << '\n';
    for (int i = 0; i < n; ++i) out << (i ? " " : "") << fmt(op.nodes()[i]);
    out << '\n';
    out << "P\n";
    for (int i = 0; i < n; ++i) out << (i ? " " : "") << fmt(op.norm_weights()(i));
    out << '\n';
    if (op.pattern().is_dense())
        out << "S dense\n";
    else
        out << "S banded " << op.pattern().bandwidth() << ' ' << op.pattern().boundary_size()
            << '\n';
    // one line per originating matrix row, row-major over the pattern
    const auto& pos = op.skew_positions();
    size_t l = 0;
    while (l < pos.size()) {
        const int row = pos[l].first;
        bool first = true;
        while (l < pos.size() && pos[l].first == row) {
            out << (first ? "" : " ") << fmt(op.skew_values()(static_cast<Eigen::Index>(l)));
            first = false;
            ++l;
        }
        out << '\n';
    }
    return out.str();
}

SBPOperator parse_operator(const std::string& text) {
    LineReader reader(text);
    std::string line;

    if (!reader.next(line) || line != "FSBP 1")
        throw ParseError(reader.lineno() ? reader.lineno() : 1,
                         "malformed header, expected 'FSBP 1'");

    if (!reader.next(line)) throw ParseError(reader.lineno(), "missing domain line");
    double x_left = 0.0, x_right = 0.0;
    {
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw >> x_left >> x_right) || kw != "domain")
            throw ParseError(reader.lineno(), "expected 'domain <xL> <xR>'");
        if (!(x_left < x_right))
            throw ParseError(reader.lineno(), "domain endpoints must satisfy xL < xR");
    }

    if (!reader.next(line)) throw ParseError(reader.lineno(), "missing nodes line");
    int n = 0;
    {
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw >> n) || kw != "nodes" || n < 2)
            throw ParseError(reader.lineno(), "expected 'nodes <N>' with N >= 2");
    }

    const int node_line = reader.lineno() + 1;
    std::vector<double> xs = parse_values(reader, static_cast<size_t>(n), "nodes");
    for (int i = 1; i < n; ++i)
        if (!(xs[static_cast<size_t>(i - 1)] < xs[static_cast<size_t>(i)]))
            throw ParseError(node_line, "non-increasing nodes at index " + std::to_string(i + 1));
    if (xs.front() != x_left || xs.back() != x_right)
        throw ParseError(node_line, "first/last node must equal the domain endpoints");

    if (!reader.next(line) || line != "P")
        throw ParseError(reader.lineno(), "expected 'P' marker");
    const int p_line = reader.lineno() + 1;
    std::vector<double> pv = parse_values(reader, static_cast<size_t>(n), "norm weights");
    for (int i = 0; i < n; ++i)
        if (!(pv[static_cast<size_t>(i)] > 0.0))
            throw ParseError(p_line, "non-positive norm weight at index " + std::to_string(i + 1));

    if (!reader.next(line)) throw ParseError(reader.lineno(), "missing S line");
    SparsityPattern pattern = SparsityPattern::dense();
    {
        std::istringstream ls(line);
        std::string kw, kind;
        if (!(ls >> kw >> kind) || kw != "S")
            throw ParseError(reader.lineno(), "expected 'S dense' or 'S banded <b> <c>'");
        if (kind == "dense") {
            pattern = SparsityPattern::dense();
        } else if (kind == "banded") {
            int b = 0, c = 0;
            if (!(ls >> b >> c))
                throw ParseError(reader.lineno(), "expected 'S banded <b> <c>'");
            try {
                pattern = SparsityPattern::banded(b, c);
                pattern.validate(n);
            } catch (const std::invalid_argument& e) {
                throw ParseError(reader.lineno(), e.what());
            }
        } else {
            throw ParseError(reader.lineno(), "unknown S storage kind '" + kind + "'");
        }
    }

    const size_t count = static_cast<size_t>(unknown_count(n, pattern));
    std::vector<double> sv = parse_values(reader, count, "skew entries");

    Eigen::VectorXd p = Eigen::Map<Eigen::VectorXd>(pv.data(), n);
    Eigen::VectorXd vals =
        Eigen::Map<Eigen::VectorXd>(sv.data(), static_cast<Eigen::Index>(sv.size()));
    try {
        return SBPOperator(NodeSet(x_left, x_right, std::move(xs)), std::move(p), pattern,
                           std::move(vals));
    } catch (const std::invalid_argument& e) {
        throw ParseError(reader.lineno(), e.what());
    }
}

void write_operator_file(const SBPOperator& op, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << serialize(op);
}

SBPOperator read_operator_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_operator(ss.str());
}

} // namespace fsbp
