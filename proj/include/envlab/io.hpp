#pragma once

#include <string>

#include "envlab/hilbert.hpp"

namespace envlab {

/// State file schema (field names are part of the contract):
/// {"labels": ["S","E"], "dims": [2,2], "amplitudes": [[re, im], ...]}
/// with amplitudes row-major, first label varying slowest.
PureState load_state(const std::string& path);
PureState parse_state_json(const std::string& text, const std::string& origin = "<input>");
std::string state_to_json(const PureState& state);
void save_state(const PureState& state, const std::string& path);

/// Inline amplitude spec: comma-separated re+imj tokens, e.g.
/// "0.5+0.5j,0,-0.5-0.5j". Dims give the subsystem shape; labels default to
/// q0, q1, ...
PureState parse_inline_state(const std::string& amplitudes, const std::vector<Index>& dims,
                             std::vector<std::string> labels = {});

Complex parse_complex_token(const std::string& token);

/// Shortest round-trip-exact decimal form of a double (what the JSON reports
/// use as well).
std::string format_double(double value);

} // namespace envlab
