#include "moon/survey.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "moon/error.hpp"

namespace moon {

ProportionEstimate survey_proportions(const SurveyCounts& counts, double z) {
  if (counts.n_closer < 0 || counts.n_farther < 0)
    fail(ErrorKind::Domain, "survey counts must be non-negative");
  const long long total = counts.n_closer + counts.n_farther;
  if (total == 0) fail(ErrorKind::Domain, "survey has no responses");
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(counts.n_closer) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {p, std::min(p, centre - half), std::max(p, centre + half)};
}

SurveyCounts parse_survey_csv(const std::string& text) {
  SurveyCounts counts;
  bool seen_closer = false;
  bool seen_farther = false;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      fail(ErrorKind::Validation,
           "survey line " + std::to_string(line_no) + ": expected label,count");
    const std::string label = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    if (label == "label" && value == "count") continue;
    long long count = 0;
    const auto [ptr, ec] =
        std::from_chars(value.data(), value.data() + value.size(), count);
    if (ec != std::errc() || ptr != value.data() + value.size() || count < 0)
      fail(ErrorKind::Validation, "survey line " + std::to_string(line_no) +
                                      ": count must be a non-negative integer");
    if (label == "closer") {
      counts.n_closer += count;
      seen_closer = true;
    } else if (label == "farther") {
      counts.n_farther += count;
      seen_farther = true;
    } else {
      fail(ErrorKind::Validation, "survey line " + std::to_string(line_no) +
                                      ": unknown label '" + label + "'");
    }
  }
  if (!seen_closer && !seen_farther)
    fail(ErrorKind::Validation, "survey file has no counts");
  if (counts.n_closer + counts.n_farther == 0)
    fail(ErrorKind::Validation, "survey counts sum to zero");
  return counts;
}

SurveyCounts read_survey_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_survey_csv(ss.str());
}

}  // namespace moon
