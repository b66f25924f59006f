#pragma once

#include <string>

namespace mwe::csv {

std::string format_double(double v);  // locale-independent %.17g

// Write via a temp file + rename so readers never see partial output.
void write_file(const std::string& path, const std::string& contents);

}  // namespace mwe::csv
