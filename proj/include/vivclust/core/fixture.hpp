#pragma once

#include "vivclust/core/types.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace vivclust {

struct RiserFixture {
    RiserProperties riser;
    EigenfrequencyTable eigen;
};

// Helland-Hansen drilling riser. Table values verbatim; the buoyancy layout and
// the buoyancy-section mass are assumptions (only totals are published).
RiserFixture helland_hansen_fixture();

// Default top tension, midpoint of the estimated 3000-4000 kN range.
inline constexpr double kDefaultTopTension = 3.5e6;
inline constexpr double kBareOuterDiameter = 0.5334;
inline constexpr double kBuoyancyOuterDiameter = 1.13;

// Six sensor containers at z/L in {0.1, 0.25, 0.4, 0.55, 0.7, 0.85} (assumed).
std::vector<std::pair<std::string, double>> default_sensor_layout(double riser_length);

nlohmann::json to_json(const RiserProperties& props);
nlohmann::json to_json(const EigenfrequencyTable& table);
RiserProperties riser_from_json(const nlohmann::json& j);

}  // namespace vivclust
