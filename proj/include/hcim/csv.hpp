#pragma once

#include <ostream>
#include <span>
#include <string>

namespace hcim {

// Quote a field when it contains a comma, quote or newline; embedded quotes
// are doubled.
inline std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline void csv_row(std::ostream& os, std::span<const std::string> fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_quote(fields[i]);
  }
  os << '\n';
}

}  // namespace hcim
