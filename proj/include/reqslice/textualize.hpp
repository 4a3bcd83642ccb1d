#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "reqslice/model.hpp"

namespace reqslice {

enum class Verbosity { High, Medium, Low };

const char* to_string(Verbosity v);
std::optional<Verbosity> verbosity_from_string(std::string_view s);

// Shortest round-trip decimal rendering of a double ("0.05", "10", "-2.5").
std::string format_number(double v);

// Render a model as line-oriented key=value text.
//
//   model <name> sample_time=<t>
//   block sid=<n> name="<s>" type=<T>[ <k>=<v> ...][ position=(l,t,r,b)]
//   conn <sid>:<p> -> <sid>:<p>
//
// High keeps params and positions and emits connections; Medium drops the
// positions; Low keeps only sid/name/type per block and emits no connections.
// Blocks are emitted in SID order, connections in file order.
std::string textualize(const Model& m, Verbosity v);

using TokenEstimator = std::function<int(std::string_view)>;

// Default token estimate: ceil(byte_length / 4).
int token_count(std::string_view text);

}  // namespace reqslice
