#pragma once

#include <cstdint>
#include <string_view>

namespace mics {

/// All times are integer microseconds.
using Micros = std::int64_t;

enum class Criticality { LC, HC };
enum class Mode { LO, HI };

constexpr std::string_view to_string(Criticality c) { return c == Criticality::HC ? "HC" : "LC"; }
constexpr std::string_view to_string(Mode m) { return m == Mode::HI ? "HI" : "LO"; }

}  // namespace mics
