#include "numstab/units.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace numstab {

namespace {

struct Parsed {
  double value;
  std::string unit;
};

Parsed split_number_unit(const std::string& text, const char* what) {
  std::size_t pos = 0;
  double value;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + ": no leading number in '" +
                                text + "'");
  }
  if (!std::isfinite(value)) {
    throw std::invalid_argument(std::string(what) + ": non-finite value in '" +
                                text + "'");
  }
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
    ++pos;
  }
  std::string unit = text.substr(pos);
  while (!unit.empty() && std::isspace(static_cast<unsigned char>(unit.back()))) {
    unit.pop_back();
  }
  if (unit.empty()) {
    throw std::invalid_argument(std::string(what) + ": missing unit in '" +
                                text + "'");
  }
  return {value, unit};
}

double lookup(const std::string& unit,
              const std::vector<std::pair<const char*, double>>& table,
              const char* what, const std::string& text) {
  for (const auto& [name, scale] : table) {
    if (unit == name) return scale;
  }
  throw std::invalid_argument(std::string(what) + ": unknown unit '" + unit +
                              "' in '" + text + "'");
}

}  // namespace

double RateQuantity::angular() const {
  return convention == FreqConvention::kAngular
             ? printed
             : 2.0 * std::numbers::pi * printed;
}

double RateQuantity::angular_if_ordinary() const {
  return 2.0 * std::numbers::pi * printed;
}

double parse_power(const std::string& text) {
  Parsed p = split_number_unit(text, "power");
  static const std::vector<std::pair<const char*, double>> table = {
      {"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}, {"nW", 1e-9}};
  double w = p.value * lookup(p.unit, table, "power", text);
  if (w <= 0.0) {
    throw std::invalid_argument("power: must be positive in '" + text + "'");
  }
  return w;
}

double parse_length(const std::string& text) {
  Parsed p = split_number_unit(text, "length");
  static const std::vector<std::pair<const char*, double>> table = {
      {"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}};
  double m = p.value * lookup(p.unit, table, "length", text);
  if (m <= 0.0) {
    throw std::invalid_argument("length: must be positive in '" + text + "'");
  }
  return m;
}

RateQuantity parse_rate(const std::string& text) {
  Parsed p = split_number_unit(text, "rate");
  if (p.unit == "rad/s") {
    return {p.value, FreqConvention::kAngular};
  }
  static const std::vector<std::pair<const char*, double>> table = {
      {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
  return {p.value * lookup(p.unit, table, "rate", text),
          FreqConvention::kOrdinary};
}

std::string convention_name(FreqConvention c) {
  return c == FreqConvention::kAngular ? "angular" : "ordinary";
}

}  // namespace numstab
