#include "sufcast/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "sufcast/errors.hpp"

namespace sufcast {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

/// Splits one line on commas; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(trim(field));
  return out;
}

bool is_missing(const std::string& cell) {
  const std::string l = lower(cell);
  return l.empty() || l == "na" || l == "nan" || l == "null";
}

std::optional<double> parse_number(const std::string& cell) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (begin != end && *begin == '+') ++begin;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool label_header(const std::string& name) {
  const std::string l = lower(name);
  return l.empty() || l == "date" || l == "time" || l == "period" || l == "t" || l == "index";
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

RawTable read_table(std::istream& in) {
  RawTable t;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_line(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw DataError("row " + std::to_string(t.rows.size() + 1) + " has " +
                      std::to_string(fields.size()) + " fields but the header has " +
                      std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw DataError("CSV input is empty (a header row is required)");
  return t;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

}  // namespace

LoadedPanel read_panel_csv(std::istream& in, const std::string& target, int min_periods) {
  const RawTable t = read_table(in);
  const std::size_t ncol = t.header.size();
  bool has_label = false;
  if (ncol > 0) {
    has_label = label_header(t.header[0]) ||
                (!t.rows.empty() && !is_missing(t.rows[0][0]) && !parse_number(t.rows[0][0]));
  }
  if (has_label && t.header[0] == target) has_label = false;

  LoadedPanel out;
  out.target_name = target;
  std::optional<std::size_t> target_col;
  std::vector<std::size_t> predictor_cols;
  for (std::size_t j = has_label ? 1 : 0; j < ncol; ++j) {
    if (t.header[j] == target) {
      if (target_col) throw DataError("target column '" + target + "' appears twice");
      target_col = j;
    } else {
      predictor_cols.push_back(j);
      out.series_names.push_back(t.header[j]);
    }
  }
  if (!target_col) throw DataError("no column named '" + target + "' in the header");
  if (predictor_cols.empty()) throw DataError("no predictor columns besides the target");
  if (has_label) out.label_name = t.header[0];

  const auto periods = static_cast<Eigen::Index>(t.rows.size());
  out.panel.predictors.resize(static_cast<Eigen::Index>(predictor_cols.size()), periods);
  out.panel.target.resize(periods);
  std::vector<std::size_t> missing_rows;
  for (Eigen::Index r = 0; r < periods; ++r) {
    const auto& row = t.rows[static_cast<std::size_t>(r)];
    out.time_labels.push_back(has_label ? row[0] : std::to_string(r));
    bool missing = false;
    auto cell = [&](std::size_t j) {
      if (is_missing(row[j])) {
        missing = true;
        return 0.0;
      }
      const std::optional<double> v = parse_number(row[j]);
      if (!v) {
        throw DataError("non-numeric cell '" + row[j] + "' at row " + std::to_string(r + 1) +
                        ", column '" + t.header[j] + "'");
      }
      return *v;
    };
    for (std::size_t i = 0; i < predictor_cols.size(); ++i) {
      out.panel.predictors(static_cast<Eigen::Index>(i), r) = cell(predictor_cols[i]);
    }
    out.panel.target(r) = cell(*target_col);
    if (missing) missing_rows.push_back(static_cast<std::size_t>(r) + 1);
  }
  if (!missing_rows.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing_rows.size() && i < 10; ++i) {
      list += (i ? ", " : "") + std::to_string(missing_rows[i]);
    }
    if (missing_rows.size() > 10) list += ", ...";
    throw DataError("missing values in row" + std::string(missing_rows.size() > 1 ? "s " : " ") +
                    list);
  }
  if (periods < min_periods) {
    throw DataError("need at least " + std::to_string(min_periods) + " periods, got " +
                    std::to_string(periods));
  }
  return out;
}

LoadedPanel load_csv(const std::string& path, const std::string& target, int min_periods) {
  std::ifstream in = open_input(path);
  return read_panel_csv(in, target, min_periods);
}

Matrix load_matrix_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  const RawTable t = read_table(in);
  if (t.rows.empty()) throw DataError("'" + path + "' has no data rows");
  const bool has_label = !parse_number(t.rows[0][0]) && !is_missing(t.rows[0][0]);
  const std::size_t first = has_label ? 1 : 0;
  if (first >= t.header.size()) throw DataError("'" + path + "' has no numeric columns");
  Matrix m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.header.size() - first));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t j = first; j < t.header.size(); ++j) {
      const std::optional<double> v = parse_number(t.rows[r][j]);
      if (!v) {
        throw DataError("bad cell '" + t.rows[r][j] + "' at row " + std::to_string(r + 1) +
                        ", column '" + t.header[j] + "' of '" + path + "'");
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j - first)) = *v;
    }
  }
  return m;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw NumericalError("cannot format a double");
  return std::string(buf, ptr);
}

void write_panel_csv(std::ostream& out, const LoadedPanel& lp) {
  const DataPanel& p = lp.panel;
  const bool label = !lp.label_name.empty();
  if (label) out << lp.label_name << ',';
  for (const std::string& name : lp.series_names) out << name << ',';
  out << lp.target_name << '\n';
  for (Eigen::Index t = 0; t < p.num_periods(); ++t) {
    if (label) out << lp.time_labels[static_cast<std::size_t>(t)] << ',';
    for (Eigen::Index i = 0; i < p.num_series(); ++i) out << format_double(p.predictors(i, t)) << ',';
    out << format_double(p.target(t)) << '\n';
  }
}

void write_panel_csv(const std::string& path, const LoadedPanel& panel) {
  std::ofstream out = open_output(path);
  write_panel_csv(out, panel);
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

LoadedPanel label_panel(const DataPanel& panel) {
  LoadedPanel lp;
  lp.panel = panel;
  lp.target_name = "y";
  lp.label_name = "period";
  for (Eigen::Index i = 0; i < panel.num_series(); ++i) lp.series_names.push_back("x" + std::to_string(i + 1));
  for (Eigen::Index t = 0; t < panel.num_periods(); ++t) lp.time_labels.push_back(std::to_string(t));
  return lp;
}

void write_columns_csv(const std::string& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& columns,
                       const std::vector<std::string>& labels) {
  const bool labeled = !labels.empty();
  if (header.size() != columns.size() + (labeled ? 1 : 0)) {
    throw ConfigError("header and column count differ");
  }
  std::ofstream out = open_output(path);
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  const std::size_t rows = labeled ? labels.size() : columns.empty() ? 0 : columns[0].size();
  for (std::size_t r = 0; r < rows; ++r) {
    if (labeled) out << labels[r];
    for (std::size_t j = 0; j < columns.size(); ++j) {
      out << (j || labeled ? "," : "");
      if (r < columns[j].size() && std::isfinite(columns[j][r])) out << format_double(columns[j][r]);
      else out << "NA";
    }
    out << '\n';
  }
}

}  // namespace sufcast
