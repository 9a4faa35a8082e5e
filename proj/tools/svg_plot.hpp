#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cbfed::cli {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

/// Log-log line plot of error series against h, with dashed reference lines
/// of slope 1 and 2. Non-positive values are skipped.
void write_loglog_svg(std::ostream& os, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series);

}  // namespace cbfed::cli
