#include "tllreach/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tllreach/errors.hpp"

namespace tllreach {

namespace {

const json& field(const json& j, const char* key, const std::string& context) {
    if (!j.is_object()) throw ParseError(context + ": expected a JSON object");
    const auto it = j.find(key);
    if (it == j.end()) throw ParseError(context + ": missing field '" + key + "'");
    return *it;
}

long integer_field(const json& j, const char* key, const std::string& context) {
    const json& v = field(j, key, context);
    if (!v.is_number_integer()) throw ParseError(context + ": field '" + key + "' must be an integer");
    return v.get<long>();
}

double real_value(const json& v, const std::string& what) {
    if (!v.is_number()) throw ParseError(what + ": expected a number");
    return v.get<double>();
}

void dump_number(std::string& out, double v) {
    if (!std::isfinite(v)) {
        out += "null";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    out += buf;
}

bool is_flat(const json& j) {
    for (const auto& e : j) {
        if (e.is_structured()) return false;
    }
    return true;
}

void dump_into(std::string& out, const json& j, int indent, int level) {
    const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * level), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{";
            out += nl;
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) {
                    out += ",";
                    out += nl;
                }
                first = false;
                out += pad;
                out += json(key).dump();
                out += indent > 0 ? ": " : ":";
                dump_into(out, value, indent, level + 1);
            }
            out += nl;
            out += close_pad;
            out += "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            const bool inline_array = indent == 0 || is_flat(j);
            out += "[";
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += inline_array ? (indent > 0 ? ", " : ",") : ",";
                if (!inline_array) {
                    out += nl;
                    out += pad;
                }
                first = false;
                dump_into(out, e, indent, level + 1);
            }
            if (!inline_array) {
                out += nl;
                out += close_pad;
            }
            out += "]";
            return;
        }
        case json::value_t::number_float:
            dump_number(out, j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

bool bits_equal(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double x = a.data()[i];
        const double y = b.data()[i];
        if (std::memcmp(&x, &y, sizeof(double)) != 0) return false;
    }
    return true;
}

}  // namespace

json to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json to_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(Vector(m.row(r).transpose())));
    return out;
}

json to_json(const HPolytope& P) { return json{{"C", to_json(P.C)}, {"d", to_json(P.d)}}; }

json to_json(const Box& box) { return json{{"lo", to_json(box.lo)}, {"hi", to_json(box.hi)}}; }

json to_json(const ScalarTLL& tll) {
    json sel = json::array();
    for (const auto& group : tll.selectors()) {
        json g = json::array();
        for (const int i : group) g.push_back(i + 1);
        sel.push_back(std::move(g));
    }
    return json{{"W", to_json(tll.weights())}, {"b", to_json(tll.biases())}, {"selectors", std::move(sel)}};
}

json to_json(const TLLController& ctrl) {
    json comps = json::array();
    for (const auto& c : ctrl.components()) comps.push_back(to_json(c));
    return json{{"n", ctrl.input_dim()},
                {"m", ctrl.output_dim()},
                {"N", ctrl.num_functions()},
                {"M", ctrl.num_groups()},
                {"components", std::move(comps)}};
}

json to_json(const ReachSet& reach) {
    json pieces = json::array();
    for (const auto& p : reach.pieces) {
        json piece = to_json(p.polytope);
        json signs = json::array();
        for (const signed char s : p.signs) signs.push_back(static_cast<int>(s));
        json active = json::array();
        for (const int a : p.active) active.push_back(a + 1);
        piece["signs"] = std::move(signs);
        piece["active"] = std::move(active);
        pieces.push_back(std::move(piece));
    }
    return json{{"pieces", std::move(pieces)}};
}

json to_json(const Problem& problem) {
    return json{{"controller", to_json(problem.controller)},
                {"A", to_json(problem.system.A)},
                {"B", to_json(problem.system.B)},
                {"X0", to_json(problem.initial_set)},
                {"epsilon", problem.epsilon},
                {"T", problem.steps}};
}

Vector vector_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError(what + ": expected an array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = real_value(j[i], what + "[" + std::to_string(i) + "]");
    }
    return v;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError(what + ": expected an array of rows");
    if (j.empty()) return Matrix(0, 0);
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        const std::string row_name = what + "[" + std::to_string(r) + "]";
        if (!j[r].is_array()) throw ParseError(row_name + ": expected an array");
        if (j[r].size() != cols) {
            throw ValidationError(row_name + " has " + std::to_string(j[r].size()) + " entries, expected " +
                                  std::to_string(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                real_value(j[r][c], row_name + "[" + std::to_string(c) + "]");
        }
    }
    return m;
}

HPolytope polytope_from_json(const json& j) {
    Matrix C = matrix_from_json(field(j, "C", "polytope"), "C");
    Vector d = vector_from_json(field(j, "d", "polytope"), "d");
    if (C.rows() != d.size()) {
        throw ValidationError("polytope: C has " + std::to_string(C.rows()) + " rows but d has " +
                              std::to_string(d.size()) + " entries");
    }
    if (C.rows() == 0) throw ValidationError("polytope: no constraints");
    return HPolytope(std::move(C), std::move(d));
}

Box box_from_json(const json& j) {
    Vector lo = vector_from_json(field(j, "lo", "box"), "lo");
    Vector hi = vector_from_json(field(j, "hi", "box"), "hi");
    if (lo.size() != hi.size()) throw ValidationError("box: lo/hi dimension mismatch");
    return Box(std::move(lo), std::move(hi));
}

TLLController controller_from_json(const json& j) {
    const std::string ctx = "controller";
    const long n = integer_field(j, "n", ctx);
    const long m = integer_field(j, "m", ctx);
    const long N = integer_field(j, "N", ctx);
    const long M = integer_field(j, "M", ctx);
    if (n < 1 || m < 1 || N < 1 || M < 1) throw ValidationError("controller: n, m, N, M must all be >= 1");
    const json& comps = field(j, "components", ctx);
    if (!comps.is_array()) throw ParseError("controller: 'components' must be an array");
    if (static_cast<long>(comps.size()) != m) {
        throw ValidationError("controller: m = " + std::to_string(m) + " but " + std::to_string(comps.size()) +
                              " components given");
    }
    std::vector<ScalarTLL> parsed;
    for (std::size_t k = 0; k < comps.size(); ++k) {
        const std::string cname = "component " + std::to_string(k + 1);
        const json& c = comps[k];
        Matrix W = matrix_from_json(field(c, "W", cname), cname + ".W");
        Vector b = vector_from_json(field(c, "b", cname), cname + ".b");
        const json& sel = field(c, "selectors", cname);
        if (!sel.is_array()) throw ParseError(cname + ": 'selectors' must be an array");
        if (W.rows() != N || W.cols() != n) {
            throw ValidationError(cname + ": W is " + std::to_string(W.rows()) + "x" + std::to_string(W.cols()) +
                                  ", expected " + std::to_string(N) + "x" + std::to_string(n));
        }
        if (b.size() != N) {
            throw ValidationError(cname + ": b has " + std::to_string(b.size()) + " entries, expected " +
                                  std::to_string(N));
        }
        if (static_cast<long>(sel.size()) != M) {
            throw ValidationError(cname + ": " + std::to_string(sel.size()) + " selector sets, expected " +
                                  std::to_string(M));
        }
        std::vector<std::vector<int>> groups;
        for (std::size_t g = 0; g < sel.size(); ++g) {
            if (!sel[g].is_array()) throw ParseError(cname + ": selector set " + std::to_string(g + 1) + " must be an array");
            std::vector<int> group;
            for (const auto& idx : sel[g]) {
                if (!idx.is_number_integer()) {
                    throw ParseError(cname + ": selector set " + std::to_string(g + 1) + " holds a non-integer");
                }
                const long v = idx.get<long>();
                if (v < 1 || v > N) {
                    throw ValidationError(cname + ": selector set " + std::to_string(g + 1) + " references index " +
                                          std::to_string(v) + " outside 1.." + std::to_string(N));
                }
                group.push_back(static_cast<int>(v - 1));
            }
            groups.push_back(std::move(group));
        }
        try {
            parsed.emplace_back(std::move(W), std::move(b), std::move(groups));
        } catch (const ValidationError& e) {
            throw ValidationError(cname + ": " + e.what());
        }
    }
    return TLLController(std::move(parsed));
}

Problem problem_from_json(const json& j, const std::filesystem::path& base_dir) {
    const json& c = field(j, "controller", "problem");
    TLLController ctrl = [&] {
        if (c.is_string()) {
            std::filesystem::path p = c.get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            return load_controller(p);
        }
        return controller_from_json(c);
    }();
    LTISystem sys(matrix_from_json(field(j, "A", "problem"), "A"), matrix_from_json(field(j, "B", "problem"), "B"));
    sys.check_compatible(ctrl);
    HPolytope X0 = polytope_from_json(field(j, "X0", "problem"));
    if (X0.dim() != sys.state_dim()) throw ValidationError("problem: X0 dimension does not match A");
    const double eps = real_value(field(j, "epsilon", "problem"), "epsilon");
    if (!(eps > 0.0)) throw ValidationError("problem: epsilon must be positive");
    const long T = integer_field(j, "T", "problem");
    if (T < 1) throw ValidationError("problem: T must be >= 1");
    return Problem{std::move(ctrl), std::move(sys), std::move(X0), eps, static_cast<int>(T)};
}

std::string dump_json(const json& j, int indent) {
    std::string out;
    dump_into(out, j, indent, 0);
    return out;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path.string() + "' for writing");
    f << dump_json(j) << '\n';
    if (!f) throw Error("failed writing '" + path.string() + "'");
}

json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_json_text(ss.str(), path.string());
}

void save(const TLLController& ctrl, const std::filesystem::path& path) { write_json_file(path, to_json(ctrl)); }
void save(const Problem& problem, const std::filesystem::path& path) { write_json_file(path, to_json(problem)); }
void save(const HPolytope& P, const std::filesystem::path& path) { write_json_file(path, to_json(P)); }

TLLController load_controller(const std::filesystem::path& path) { return controller_from_json(read_json_file(path)); }

Problem load_problem(const std::filesystem::path& path) {
    return problem_from_json(read_json_file(path), path.parent_path());
}

HPolytope load_polytope(const std::filesystem::path& path) { return polytope_from_json(read_json_file(path)); }

bool identical(const TLLController& a, const TLLController& b) {
    if (a.output_dim() != b.output_dim()) return false;
    for (Eigen::Index k = 0; k < a.output_dim(); ++k) {
        const auto& x = a.component(k);
        const auto& y = b.component(k);
        if (!bits_equal(x.weights(), y.weights()) || !bits_equal(x.biases(), y.biases()) ||
            x.selectors() != y.selectors()) {
            return false;
        }
    }
    return true;
}

}  // namespace tllreach
