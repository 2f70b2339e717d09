#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "blockmax/io.hpp"

namespace blockmax::report {

// Ordered key/token pairs rendered once and emitted twice: as `key: token`
// text and as JSON.  Both views share the exact token, so any number shown
// to a human appears byte-identically in the machine-readable output.
class Report {
 public:
  void num(const std::string& key, double value) {
    fields_.push_back({key, io::fmt17(value), !std::isfinite(value)});
  }
  void integer(const std::string& key, long long value) {
    fields_.push_back({key, std::to_string(value), false});
  }
  void uinteger(const std::string& key, unsigned long long value) {
    fields_.push_back({key, std::to_string(value), false});
  }
  void boolean(const std::string& key, bool value) {
    fields_.push_back({key, value ? "true" : "false", false});
  }
  void text(const std::string& key, const std::string& value) {
    fields_.push_back({key, value, true});
  }

  void render_text(std::ostream& out) const {
    for (const auto& f : fields_) out << f.key << ": " << f.token << "\n";
  }

  void render_json(std::ostream& out) const {
    out << "{\n";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      const auto& f = fields_[i];
      out << "  \"" << escaped(f.key) << "\": ";
      if (f.quoted)
        out << '"' << escaped(f.token) << '"';
      else
        out << f.token;
      out << (i + 1 < fields_.size() ? ",\n" : "\n");
    }
    out << "}\n";
  }

 private:
  struct Field {
    std::string key;
    std::string token;
    bool quoted;
  };

  static std::string escaped(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out += buf;
          } else {
            out += c;
          }
      }
    }
    return out;
  }

  std::vector<Field> fields_;
};

}  // namespace blockmax::report
