#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace pme {

/// Shortest round-trip decimal form of a double; deterministic for a given
/// build, so repeated CLI invocations are byte-identical.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// RFC 4180 quoting: only fields containing separators, quotes or newlines
/// get wrapped.
inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += "\"";
  return out;
}

/// Row-oriented CSV document with a fixed header; ends with a newline.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& os) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      os << (i ? "," : "") << csv_escape(header[i]);
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        os << (i ? "," : "") << csv_escape(row[i]);
      os << "\n";
    }
  }

  std::string str() const {
    std::ostringstream ss;
    write(ss);
    return ss.str();
  }
};

/// Write a report (CSV text or JSON document) to a path, or to the stream
/// when path is empty. JSON keys keep insertion order (nlohmann ordered_json)
/// so the documented schemas serialize verbatim; files end with a newline.
inline void write_report(const std::string& text, const std::string& path,
                         std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    if (text.empty() || text.back() != '\n') fallback << "\n";
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open output file: " + path);
  out << text;
  if (text.empty() || text.back() != '\n') out << "\n";
  if (!out) throw std::ios_base::failure("write failed: " + path);
}

inline void write_report(const nlohmann::ordered_json& doc, const std::string& path,
                         std::ostream& fallback) {
  write_report(doc.dump(2), path, fallback);
}

}  // namespace pme
