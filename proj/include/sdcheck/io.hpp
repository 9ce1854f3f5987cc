#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "sdcheck/diagnose.hpp"
#include "sdcheck/facialred.hpp"

namespace sdcheck {

using Json = nlohmann::ordered_json;

// %.17g without locale dependence.
std::string format_double(double v);

// Serializes with every float at 17 significant digits.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const Spectrahedron& f);
// Throws InvalidSpec on malformed input. An optional "objective" object
// {"C": [...], "p_star": v} is folded into the constraints.
Spectrahedron instance_from_json(const Json& j);

Json to_json(const FRResult& r);
Json to_json(const Report& r);

SymMatrix sym_from_json(const Json& j, int n);

void write_trace_csv(std::ostream& os, const PathTrace& trace);
void write_curves_csv(std::ostream& os, const RatioCurves& curves);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace sdcheck
