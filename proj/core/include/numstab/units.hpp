#pragma once

#include <string>

namespace numstab {

// How a printed frequency-like number is to be read. Ordinary means cycles
// per second (Hz and friends); Angular means the number already carries the
// 2 pi (rad/s). Mixing these up rescales squared-rate expressions by
// (2 pi)^2, which is why rates keep their declared convention around.
enum class FreqConvention { kOrdinary, kAngular };

struct RateQuantity {
  double printed = 0.0;  // numeric value scaled to its base unit (1/s)
  FreqConvention convention = FreqConvention::kAngular;

  // Value in rad/s under the declared convention.
  double angular() const;
  // Value in rad/s if the printed number were read as an ordinary frequency,
  // regardless of declaration. Used for convention sensitivity reports.
  double angular_if_ordinary() const;
};

// Strict "number unit" parsers. The unit token is mandatory and must come
// from a closed table; anything else throws std::invalid_argument.
double parse_power(const std::string& text);   // W, mW, uW, nW -> watts
double parse_length(const std::string& text);  // m, cm, mm, um, nm -> meters
// Hz, kHz, MHz, GHz -> ordinary; rad/s -> angular.
RateQuantity parse_rate(const std::string& text);

std::string convention_name(FreqConvention c);

}  // namespace numstab
