#pragma once

#include <cstdint>

#include "oracles.hpp"
#include "sufcast/panel.hpp"
#include "sufcast/simlab.hpp"

namespace testing {

/// Seeded Gaussian panel with a few strong factors plus noise.
inline sufcast::DataPanel factor_panel(Eigen::Index p, Eigen::Index t, int k, unsigned seed,
                                       double noise = 1.0) {
  const oracle::Matrix f = oracle::random_normal(t, k, seed);
  const oracle::Matrix b = oracle::random_normal(p, k, seed + 1);
  sufcast::DataPanel panel;
  panel.predictors = b * f.transpose() + noise * oracle::random_normal(p, t, seed + 2);
  panel.target = f.col(0) + oracle::random_normal(t, 1, seed + 3).col(0);
  return panel;
}

inline sufcast::SimDraw draw(sufcast::Dgp dgp, Eigen::Index p, Eigen::Index t, std::uint64_t seed) {
  const sufcast::SimConfig c = sufcast::make_sim_config(dgp, p, t, seed);
  return sufcast::generate(c, sufcast::replication_seed(seed, 0));
}

}  // namespace testing
