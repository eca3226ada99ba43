#pragma once

#include "sufcast/linalg.hpp"

namespace sufcast {

/// Predictor panel plus the aligned target series. Column t of `predictors`
/// holds x_t (p series observed in period t); `target(t)` is y_t.
struct DataPanel {
  Matrix predictors;  // p x T
  Vector target;      // T
  bool centered = false;

  Eigen::Index num_series() const { return predictors.rows(); }
  Eigen::Index num_periods() const { return predictors.cols(); }
};

/// Throws DataError when the panel is mis-shaped or holds non-finite values.
void validate_panel(const DataPanel& panel);

/// Demean every predictor row over time. The target is left untouched.
DataPanel center_panel(const DataPanel& panel);

/// Panel restricted to the first n periods (not re-centered).
DataPanel leading_window(const DataPanel& panel, Eigen::Index n);

}  // namespace sufcast
