#include "qmetric/caps.hpp"

#include <cstdlib>
#include <sstream>

#include "qmetric/errors.hpp"

namespace qmetric {

namespace {

std::size_t parse_count(const std::string& text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
    throw PreconditionError("QMETRIC_CAP: not a count: '" + text + "'");
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    throw PreconditionError("QMETRIC_CAP: not a count: '" + text + "'");
  }
  if (used != text.size() || v == 0) throw PreconditionError("QMETRIC_CAP: not a positive count: '" + text + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

Caps parse_caps(const std::string& text, Caps base) {
  if (text.empty()) return base;
  if (text.find('=') == std::string::npos) {
    const std::size_t all = parse_count(text);
    return Caps{all, all, all, all, all};
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw PreconditionError("QMETRIC_CAP: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::size_t value = parse_count(item.substr(eq + 1));
    if (key == "matrix") base.matrix_dim = value;
    else if (key == "group") base.group_elements = value;
    else if (key == "lattice") base.lattice_points = value;
    else if (key == "denominator") base.denominator = value;
    else if (key == "product") base.product_set = value;
    else throw PreconditionError("QMETRIC_CAP: unknown cap '" + key + "'");
  }
  return base;
}

const Caps& default_caps() {
  static const Caps caps = [] {
    const char* env = std::getenv("QMETRIC_CAP");
    return env ? parse_caps(env) : Caps{};
  }();
  return caps;
}

}  // namespace qmetric
