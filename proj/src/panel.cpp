#include "sufcast/panel.hpp"

#include <string>

#include "sufcast/errors.hpp"

namespace sufcast {

void validate_panel(const DataPanel& panel) {
  if (panel.target.size() != panel.predictors.cols()) {
    throw DataError("target length " + std::to_string(panel.target.size()) +
                    " does not match the " + std::to_string(panel.predictors.cols()) +
                    " periods of the predictor panel");
  }
  if (!panel.predictors.allFinite()) throw DataError("predictor panel has non-finite entries");
  if (!panel.target.allFinite()) throw DataError("target series has non-finite entries");
}

DataPanel center_panel(const DataPanel& panel) {
  validate_panel(panel);
  if (panel.num_series() < 1 || panel.num_periods() < 2) {
    throw DataError("centering needs at least one series and two periods");
  }
  DataPanel out = panel;
  if (panel.centered) return out;
  const Vector means = panel.predictors.rowwise().mean();
  for (Eigen::Index i = 0; i < means.size(); ++i) {
    if (means(i) != 0.0) out.predictors.row(i).array() -= means(i);
  }
  out.centered = true;
  return out;
}

DataPanel leading_window(const DataPanel& panel, Eigen::Index n) {
  if (n < 0 || n > panel.num_periods()) throw ConfigError("window exceeds the panel length");
  DataPanel out;
  out.predictors = panel.predictors.leftCols(n);
  out.target = panel.target.head(n);
  out.centered = false;
  return out;
}

}  // namespace sufcast
