#include "pacbound/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pacbound {

ScenarioParseError::ScenarioParseError(const std::string& source, int line,
                                       const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
      line_(line) {}

DiscreteScenario::DiscreteScenario(std::vector<ScenarioPoint> points,
                                   double loss_range)
    : points_(std::move(points)), loss_range_(loss_range) {
  if (points_.empty())
    throw std::domain_error("DiscreteScenario: at least one point required");
  if (!(loss_range_ > 0.0))
    throw std::domain_error("DiscreteScenario: loss range C must be > 0");
  double total = 0.0;
  for (const auto& pt : points_) {
    if (!(pt.mass > 0.0))
      throw std::domain_error("DiscreteScenario: point mass must be > 0");
    if (!(pt.loss >= 0.0 && pt.loss <= loss_range_))
      throw std::domain_error("DiscreteScenario: loss must lie in [0, C]");
    if (pt.in_region && pt.loss != 0.0)
      throw std::domain_error(
          "DiscreteScenario: in-region points must have loss 0");
    total += pt.mass;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::domain_error(
        "DiscreteScenario: point masses must sum to 1 within 1e-12");

  cumulative_.reserve(points_.size());
  double cum = 0.0;
  for (const auto& pt : points_) {
    true_risk_ += pt.mass * pt.loss;
    if (pt.in_region) region_mass_ += pt.mass;
    cum += pt.mass;
    cumulative_.push_back(cum);
  }
  cumulative_.back() = 1.0;
}

std::size_t DiscreteScenario::sample_index(double u) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return points_.size() - 1;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

DiscreteScenario DiscreteScenario::parse(std::istream& in,
                                         const std::string& source) {
  std::vector<ScenarioPoint> points;
  double loss_range = 0.0;
  bool have_c = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "C") {
      if (have_c)
        throw ScenarioParseError(source, line_no, "duplicate C line");
      if (!(ls >> loss_range))
        throw ScenarioParseError(source, line_no,
                                 "field 'loss_range': expected a number");
      if (!(loss_range > 0.0))
        throw ScenarioParseError(source, line_no,
                                 "field 'loss_range': must be > 0");
      have_c = true;
    } else if (tag == "point") {
      ScenarioPoint pt;
      if (!(ls >> pt.mass))
        throw ScenarioParseError(source, line_no,
                                 "field 'mass': expected a number");
      if (!(pt.mass > 0.0))
        throw ScenarioParseError(source, line_no, "field 'mass': must be > 0");
      if (!(ls >> pt.loss))
        throw ScenarioParseError(source, line_no,
                                 "field 'loss': expected a number");
      if (!(pt.loss >= 0.0))
        throw ScenarioParseError(source, line_no,
                                 "field 'loss': must be >= 0");
      int flag = -1;
      if (!(ls >> flag) || (flag != 0 && flag != 1))
        throw ScenarioParseError(source, line_no,
                                 "field 'in_region': expected 0 or 1");
      pt.in_region = flag == 1;
      points.push_back(pt);
    } else {
      throw ScenarioParseError(source, line_no,
                               "unknown directive '" + tag + "'");
    }
  }
  if (!have_c)
    throw ScenarioParseError(source, line_no, "missing C line");
  if (points.empty())
    throw ScenarioParseError(source, line_no, "no point lines");

  double total = 0.0;
  for (const auto& pt : points) total += pt.mass;
  if (std::fabs(total - 1.0) > 1e-9)
    throw ScenarioParseError(
        source, line_no,
        "point masses sum to " + std::to_string(total) +
            ", expected 1 within 1e-9");
  for (auto& pt : points) pt.mass /= total;
  return DiscreteScenario(std::move(points), loss_range);
}

DiscreteScenario DiscreteScenario::load_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open scenario file: " + path.string());
  return parse(in, path.string());
}

}  // namespace pacbound
