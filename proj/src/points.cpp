#include "skelrepair/points.hpp"

namespace skelrepair {

void PeakConfig::validate() const {
  if (!(sigma > 0.0)) throw ConfigError("sigma must be > 0");
  if (window < 3 || window % 2 == 0) throw ConfigError("window must be odd and >= 3");
  if (!(peak_threshold >= 0.0 && peak_threshold <= 1.0)) throw ConfigError("peak_threshold must be in [0,1]");
  if (!(nms_radius >= 0.0)) throw ConfigError("nms_radius must be >= 0");
}

}  // namespace skelrepair
