#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fracmv/core/grid.hpp"

namespace fracmv {

/// Writes `path_id,t,x0..x{d-1}` rows with 17 significant digits, so reading
/// the file back reproduces every double exactly.
std::string paths_to_csv(const std::vector<SamplePath>& paths);
std::vector<SamplePath> paths_from_csv(const std::string& text);

/// `cell,t_start,t_end,h0..h{d-1}` rows.
std::string stepped_to_csv(const SteppedFunction& h);

std::string read_text_file(const std::filesystem::path& file);

/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& file, const std::string& contents);

/// Shortest "%.17g" rendering of a double.
std::string format_double(double v);

}  // namespace fracmv
