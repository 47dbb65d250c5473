#pragma once

#include <string>

#include <json.hpp>

namespace storecast {

using Json = nlohmann::json;

enum class ReportFormat { Json, Csv };

/// Serialize a result document with stable bytes: objects come out with
/// sorted keys and numbers in their shortest round-tripping form, so equal
/// documents give byte-identical output.
///
/// The CSV flattening rules (also stated in the emitted header comments):
///   - table mode applies when the document is an object whose "rows" value
///     is a non-empty array of scalar-valued objects and whose other values
///     are scalars. The non-"rows" fields become "# meta <key> = <value>"
///     comment lines, the header row is the sorted union of row keys, and
///     an empty cell means the key is absent from that row.
///   - every other document uses flat mode: one "path,value" line per leaf
///     with dot-joined paths, sorted; pure-digit segments are array indices
///     and empty containers appear as their own leaves.
///   - values are JSON literals in both modes (strings keep their quotes),
///     CSV-quoted when they contain a comma, quote, or newline.
/// Keys must not contain '.' for flat mode to stay invertible; report
/// builders in this codebase only use identifier-like keys.
std::string emit_report(const Json& results, ReportFormat format);

/// Inverse of emit_report: both formats parse back structurally equal.
Json parse_report(const std::string& bytes, ReportFormat format);

ReportFormat parse_report_format(const std::string& name);

}  // namespace storecast
