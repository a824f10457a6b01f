#pragma once

#include <filesystem>
#include <string>

namespace moon {

struct SurveyCounts {
  long long n_closer = 0;
  long long n_farther = 0;
};

struct ProportionEstimate {
  double proportion_closer;
  double ci_low;
  double ci_high;
};

/// Point estimate plus the Wilson score interval (z = 1.96 by default).
ProportionEstimate survey_proportions(const SurveyCounts& counts,
                                      double z = 1.96);

/// CSV with `label,count` rows; labels "closer" and "farther". A header row
/// `label,count` is optional.
SurveyCounts parse_survey_csv(const std::string& text);
SurveyCounts read_survey_csv(const std::filesystem::path& path);

}  // namespace moon
