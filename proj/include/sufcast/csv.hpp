#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sufcast/panel.hpp"

namespace sufcast {

/// Panel read from a CSV file with its column and row labels.
struct LoadedPanel {
  DataPanel panel;
  std::vector<std::string> series_names;  // p predictor names in file order
  std::string target_name;
  std::string label_name;                 // empty when the file has no time-label column
  std::vector<std::string> time_labels;   // T labels, or "0".."T-1" when absent
};

/// Reads a header-first, comma-separated panel. The first column is a time
/// label when its header is one of date/time/period/t/index (any case) or
/// its first cell is not a number. Every other column is numeric; the one
/// named `target` becomes the target. Empty, NA and NaN cells are missing.
///
/// Throws DataError naming the offending row (1-based data row) for ragged
/// rows, non-numeric or missing cells, and when fewer than `min_periods`
/// rows remain.
LoadedPanel read_panel_csv(std::istream& in, const std::string& target, int min_periods = 20);
LoadedPanel load_csv(const std::string& path, const std::string& target, int min_periods = 20);

/// p x d numeric matrix from a CSV with header; an optional non-numeric
/// first column is skipped.
Matrix load_matrix_csv(const std::string& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

void write_panel_csv(std::ostream& out, const LoadedPanel& panel);
void write_panel_csv(const std::string& path, const LoadedPanel& panel);

/// Panel with default names x1..xp, target "y" and labels 0..T-1.
LoadedPanel label_panel(const DataPanel& panel);

/// Columns of equal length under a header. Non-empty `labels` become a
/// leading text column (header[0] names it).
void write_columns_csv(const std::string& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& columns,
                       const std::vector<std::string>& labels = {});

}  // namespace sufcast
