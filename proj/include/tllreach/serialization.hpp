#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "tllreach/exact_reach.hpp"
#include "tllreach/polytope.hpp"
#include "tllreach/tll_model.hpp"

namespace tllreach {

using json = nlohmann::json;

json to_json(const Vector& v);
json to_json(const Matrix& m);
json to_json(const HPolytope& P);
json to_json(const Box& box);
json to_json(const ScalarTLL& tll);
json to_json(const TLLController& ctrl);
json to_json(const ReachSet& reach);
/// Problem with the controller inlined.
json to_json(const Problem& problem);

Vector vector_from_json(const json& j, const std::string& what);
Matrix matrix_from_json(const json& j, const std::string& what);
HPolytope polytope_from_json(const json& j);
Box box_from_json(const json& j);
TLLController controller_from_json(const json& j);
/// `base_dir` resolves a relative controller path.
Problem problem_from_json(const json& j, const std::filesystem::path& base_dir = {});

/// Serializes with every real written as a 17-significant-digit decimal and
/// object keys in sorted order, so equal values give identical bytes.
std::string dump_json(const json& j, int indent = 2);
void write_json_file(const std::filesystem::path& path, const json& j);

/// Parses a file; syntax errors become ParseError with line and column.
json read_json_file(const std::filesystem::path& path);
json parse_json_text(const std::string& text, const std::string& source);

void save(const TLLController& ctrl, const std::filesystem::path& path);
void save(const Problem& problem, const std::filesystem::path& path);
void save(const HPolytope& P, const std::filesystem::path& path);

TLLController load_controller(const std::filesystem::path& path);
Problem load_problem(const std::filesystem::path& path);
HPolytope load_polytope(const std::filesystem::path& path);

/// Structural equality, bit-exact on reals.
bool identical(const TLLController& a, const TLLController& b);

}  // namespace tllreach
