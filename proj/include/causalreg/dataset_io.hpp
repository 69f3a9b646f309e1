#pragma once

#include "causalreg/types.hpp"

#include <string>
#include <vector>

namespace causalreg {

// CSV with a header row. Lines starting with '#' and blank lines are skipped,
// so files written by this library can be read back.

/// X = the remaining columns in header order. An anchor column holding any
/// non-numeric cell is categorical and expands to one 0/1 column per level
/// (levels sorted, named "column=level"). An empty response name leaves Y
/// empty and puts every non-anchor column in X.
Dataset parse_dataset_text(const std::string& text, const std::string& response,
                           const std::vector<std::string>& anchors = {});
Dataset parse_dataset(const std::string& path, const std::string& response,
                      const std::vector<std::string>& anchors = {});

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// Columns y, X names, anchor names; `comments` become leading '#' lines.
std::string dataset_to_csv(const Dataset& d, const std::vector<std::string>& comments = {});

std::string read_text_file(const std::string& path);

} // namespace causalreg
