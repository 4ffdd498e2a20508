// scenario.hpp — finite ground-truth worlds for validation: point masses with
// losses in [0, C] and a zero-loss region flag per point.
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace pacbound {

struct ScenarioPoint {
  double mass = 0.0;
  double loss = 0.0;
  bool in_region = false;
};

class ScenarioParseError : public std::runtime_error {
 public:
  ScenarioParseError(const std::string& source, int line,
                     const std::string& what);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Immutable after construction; safe to share across threads. Points flagged
// in_region must carry loss exactly 0.
class DiscreteScenario {
 public:
  DiscreteScenario(std::vector<ScenarioPoint> points, double loss_range);

  const std::vector<ScenarioPoint>& points() const { return points_; }
  double loss_range() const { return loss_range_; }
  double true_risk() const { return true_risk_; }      // sum mass * loss
  double region_mass() const { return region_mass_; }  // mass inside the region

  // Inverse-CDF lookup for u in [0,1).
  std::size_t sample_index(double u) const;

  // Text format: one `C <loss_range>` line, then `point <mass> <loss> <0|1>`
  // lines; `#` starts a comment. Masses must sum to 1 within 1e-9 and are
  // normalised exactly afterwards.
  static DiscreteScenario parse(std::istream& in, const std::string& source);
  static DiscreteScenario load_file(const std::filesystem::path& path);

 private:
  std::vector<ScenarioPoint> points_;
  double loss_range_ = 1.0;
  double true_risk_ = 0.0;
  double region_mass_ = 0.0;
  std::vector<double> cumulative_;
};

}  // namespace pacbound
