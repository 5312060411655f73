#pragma once

#include "quasilat/pointset.hpp"

#include <string>

namespace quasilat {

/// Writes `dim=<d>` then one point per line (17 significant digits), plus a
/// sidecar `<path>.json` holding the source recipe and truncation radius.
void write_point_set_csv(const PointSet& ps, const std::string& path);

/// Reads the CSV format above. Without a sidecar the set is treated as an
/// explicit list truncated at its largest sup norm. Throws ParseError on
/// malformed input.
PointSet read_point_set_csv(const std::string& path);

/// Reads a whole file; throws Error if it cannot be opened.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace quasilat
