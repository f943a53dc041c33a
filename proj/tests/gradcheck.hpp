#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "rescomp/ann.hpp"

namespace rescomp::check {

struct GradCheckCase {
  Network net;
  Dataset data;
};

/// Random K:J:I network (K, I ≤ 3, J ≤ 6) with weights in [-2, 2] and one
/// pattern whose inputs and targets are uniform in [0, 1].
inline GradCheckCase random_case(std::mt19937_64& rng, std::size_t patterns = 1) {
  std::uniform_int_distribution<std::size_t> small(1, 3), hidden(1, 6);
  std::uniform_real_distribution<double> weight(-2.0, 2.0), unit(0.0, 1.0);
  const NetworkShape shape{small(rng), hidden(rng), small(rng)};

  GradCheckCase c;
  c.net.params = Parameters::zeros(shape);
  Eigen::VectorXd flat(static_cast<Eigen::Index>(shape.parameter_count()));
  for (auto& v : flat) v = weight(rng);
  c.net.params.assign(flat);

  const auto p = static_cast<Eigen::Index>(patterns);
  c.data.inputs.resize(p, static_cast<Eigen::Index>(shape.inputs));
  c.data.targets.resize(p, static_cast<Eigen::Index>(shape.outputs));
  for (auto& v : c.data.inputs.reshaped()) v = unit(rng);
  for (auto& v : c.data.targets.reshaped()) v = unit(rng);
  return c;
}

inline Eigen::VectorXd central_difference(const Network& net, const Dataset& data, double h = 1e-5) {
  const Eigen::VectorXd base = net.params.flatten();
  Eigen::VectorXd fd(base.size());
  Network probe = net;
  for (Eigen::Index q = 0; q < base.size(); ++q) {
    Eigen::VectorXd x = base;
    x[q] = base[q] + h;
    probe.params.assign(x);
    const double up = mse(probe, data);
    x[q] = base[q] - h;
    probe.params.assign(x);
    const double down = mse(probe, data);
    fd[q] = (up - down) / (2.0 * h);
  }
  return fd;
}

/// Per-component agreement: relative error below `rel`, or absolute error below `abs_floor`.
inline bool components_agree(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double rel,
                             double abs_floor) {
  for (Eigen::Index q = 0; q < a.size(); ++q) {
    const double diff = std::abs(a[q] - b[q]);
    if (diff <= abs_floor) continue;
    if (diff > rel * std::max(std::abs(a[q]), std::abs(b[q]))) return false;
  }
  return true;
}

}  // namespace rescomp::check
