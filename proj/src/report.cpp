#include "storecast/report.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "storecast/errors.hpp"

namespace storecast {

namespace {

bool is_scalar(const Json& v) { return v.is_primitive() && !v.is_binary(); }

/// Table mode: {"rows": [flat objects...], everything else scalar}.
bool table_shaped(const Json& doc) {
  if (!doc.is_object() || !doc.contains("rows")) return false;
  const Json& rows = doc.at("rows");
  if (!rows.is_array() || rows.empty()) return false;
  for (const auto& row : rows) {
    if (!row.is_object()) return false;
    for (const auto& [key, value] : row.items()) {
      (void)key;
      if (!is_scalar(value)) return false;
    }
  }
  for (const auto& [key, value] : doc.items()) {
    if (key != "rows" && !is_scalar(value)) return false;
  }
  return true;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string emit_table_csv(const Json& doc) {
  std::string out = "# report mode=table\n";
  out += "# one row per entry of \"rows\"; cells are JSON literals; an empty cell means "
         "the key is absent\n";
  for (const auto& [key, value] : doc.items()) {
    if (key != "rows") out += "# meta " + key + " = " + value.dump() + "\n";
  }

  std::set<std::string> columns;
  for (const auto& row : doc.at("rows")) {
    for (const auto& [key, value] : row.items()) {
      (void)value;
      columns.insert(key);
    }
  }
  std::string header;
  for (const auto& c : columns) {
    if (!header.empty()) header += ',';
    header += csv_quote(c);
  }
  out += header + "\n";

  for (const auto& row : doc.at("rows")) {
    std::string line;
    bool first = true;
    for (const auto& c : columns) {
      if (!first) line += ',';
      first = false;
      if (row.contains(c)) line += csv_quote(row.at(c).dump());
    }
    out += line + "\n";
  }
  return out;
}

void collect_leaves(const Json& node, const std::string& path,
                    std::map<std::string, std::string>& leaves) {
  if (node.is_object() && !node.empty()) {
    for (const auto& [key, value] : node.items()) {
      collect_leaves(value, path.empty() ? key : path + "." + key, leaves);
    }
  } else if (node.is_array() && !node.empty()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      const std::string segment = std::to_string(i);
      collect_leaves(node[i], path.empty() ? segment : path + "." + segment, leaves);
    }
  } else {
    leaves[path] = node.dump();  // scalars and empty containers
  }
}

std::string emit_flat_csv(const Json& doc) {
  std::string out = "# report mode=flat\n";
  out += "# one line per leaf: dot-joined path, JSON literal; pure-digit segments are "
         "array indices\n";
  out += "path,value\n";
  std::map<std::string, std::string> leaves;
  collect_leaves(doc, "", leaves);
  for (const auto& [path, literal] : leaves) {
    out += csv_quote(path) + "," + csv_quote(literal) + "\n";
  }
  return out;
}

std::vector<std::string> split_lines(const std::string& bytes) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : bytes) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) lines.push_back(current);
  return lines;
}

std::vector<std::string> split_csv_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) raise(Errc::MalformedRow, "unterminated quote in csv line");
  fields.push_back(field);
  return fields;
}

Json parse_literal(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    raise(Errc::MalformedRow, std::string("bad value literal: ") + e.what());
  }
}

Json parse_table_csv(const std::vector<std::string>& lines) {
  Json doc = Json::object();
  doc["rows"] = Json::array();
  std::vector<std::string> columns;
  bool seen_header = false;
  for (const auto& line : lines) {
    if (line.rfind("# meta ", 0) == 0) {
      const std::string body = line.substr(7);
      const auto sep = body.find(" = ");
      if (sep == std::string::npos) raise(Errc::MalformedRow, "bad meta line: " + line);
      doc[body.substr(0, sep)] = parse_literal(body.substr(sep + 3));
      continue;
    }
    if (!line.empty() && line[0] == '#') continue;
    if (!seen_header) {
      columns = split_csv_fields(line);
      seen_header = true;
      continue;
    }
    const auto cells = split_csv_fields(line);
    if (cells.size() != columns.size()) {
      raise(Errc::MalformedRow, "row has " + std::to_string(cells.size()) +
                                    " cells, header has " + std::to_string(columns.size()));
    }
    Json row = Json::object();
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (!cells[j].empty()) row[columns[j]] = parse_literal(cells[j]);
    }
    doc["rows"].push_back(std::move(row));
  }
  if (!seen_header) raise(Errc::MalformedRow, "table csv has no header row");
  return doc;
}

Json parse_flat_csv(const std::vector<std::string>& lines) {
  Json doc;
  bool seen_header = false;
  for (const auto& line : lines) {
    if (!line.empty() && line[0] == '#') continue;
    if (!seen_header) {
      if (line != "path,value") raise(Errc::MalformedRow, "expected path,value header");
      seen_header = true;
      continue;
    }
    const auto fields = split_csv_fields(line);
    if (fields.size() != 2) raise(Errc::MalformedRow, "expected two csv fields: " + line);
    Json value = parse_literal(fields[1]);
    if (fields[0].empty()) {
      doc = std::move(value);
      continue;
    }
    std::string pointer;
    for (char c : fields[0]) pointer += c == '.' ? '/' : c;
    doc[Json::json_pointer("/" + pointer)] = std::move(value);
  }
  if (!seen_header) raise(Errc::MalformedRow, "flat csv has no header row");
  return doc;
}

}  // namespace

std::string emit_report(const Json& results, ReportFormat format) {
  if (format == ReportFormat::Json) return results.dump(2) + "\n";
  return table_shaped(results) ? emit_table_csv(results) : emit_flat_csv(results);
}

Json parse_report(const std::string& bytes, ReportFormat format) {
  if (format == ReportFormat::Json) {
    try {
      return Json::parse(bytes);
    } catch (const Json::parse_error& e) {
      raise(Errc::MalformedRow, std::string("bad json report: ") + e.what());
    }
  }
  const auto lines = split_lines(bytes);
  if (lines.empty()) raise(Errc::MalformedRow, "empty csv report");
  if (lines[0] == "# report mode=table") return parse_table_csv(lines);
  if (lines[0] == "# report mode=flat") return parse_flat_csv(lines);
  raise(Errc::MalformedRow, "missing report mode line");
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  raise(Errc::BadFlag, "unknown report format \"" + name + "\" (json or csv)");
}

}  // namespace storecast
