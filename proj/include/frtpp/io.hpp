#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace frtpp {

// Raised for malformed inputs: bad CSV, invalid datasets, bad config values.
// The CLI maps it to exit code 1; anything else is a runtime failure (2).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

// Shortest round-trip decimal form ("0.5", "-3", "0.2118...").
// Used for every float we serialize so outputs are byte-stable.
std::string format_double(double v);

// Strict parsers: the whole token must be consumed.
double parse_double(std::string_view token);
long long parse_int(std::string_view token);

// Splits on a separator, trimming ASCII whitespace from each piece.
std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view s);

}  // namespace frtpp
