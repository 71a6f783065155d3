#pragma once

#include "vivclust/core/types.hpp"

#include <string>
#include <vector>

namespace vivclust {

struct Violation {
    std::string field;
    std::string message;
    bool hard = true;
};

struct ValidationReport {
    std::string event_id;
    std::vector<Violation> violations;

    bool usable() const;
    std::string summary() const;
};

struct ValidationOptions {
    double riser_length = 682.75;
    double water_depth = 670.46;
    // Durations outside nominal * (1 +/- tolerance) are soft violations.
    double nominal_duration = 2040.0;
    double duration_tolerance = 0.10;
};

ValidationReport validate_event(const MeasurementEvent& event,
                                const ValidationOptions& options = {});

// Throws a validation Error listing every problem.
void require_valid_riser(const RiserProperties& props);

}  // namespace vivclust
