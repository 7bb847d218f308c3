#include "json_out.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace biweb::cli {

namespace {

void newline(std::ostream& os, int indent, int depth) {
  if (indent < 0) return;
  os << '\n' << std::string(static_cast<std::size_t>(indent * depth), ' ');
}

void write(std::ostream& os, const nlohmann::json& v, int indent, int depth) {
  using nlohmann::json;
  switch (v.type()) {
    case json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        os << "null";
        break;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      os << buf;
      break;
    }
    case json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        break;
      }
      // arrays of scalars stay on one line
      bool flat = true;
      for (const auto& e : v) flat = flat && !e.is_structured();
      os << '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) os << (flat ? ", " : ",");
        first = false;
        if (!flat) newline(os, indent, depth + 1);
        write(os, e, indent, depth + 1);
      }
      if (!flat) newline(os, indent, depth);
      os << ']';
      break;
    }
    case json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        break;
      }
      os << '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) os << ',';
        first = false;
        newline(os, indent, depth + 1);
        os << json(it.key()).dump() << (indent < 0 ? ":" : ": ");
        write(os, it.value(), indent, depth + 1);
      }
      newline(os, indent, depth);
      os << '}';
      break;
    }
    default:
      os << v.dump();
  }
}

}  // namespace

void write_json(std::ostream& os, const nlohmann::json& v, int indent) { write(os, v, indent, 0); }

std::string dump_json(const nlohmann::json& v, int indent) {
  std::ostringstream os;
  write_json(os, v, indent);
  return os.str();
}

}  // namespace biweb::cli
