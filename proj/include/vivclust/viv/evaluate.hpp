#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace vivclust::viv {

struct PredictionPair {
    std::string event_id;
    int cluster = 0;
    double predicted_disp = 0.0;  // max displacement std along the riser, m
    double measured_disp = 0.0;
    double predicted_freq = 0.0;  // dominant frequency, Hz
    double measured_freq = 0.0;
};

struct ClusterError {
    int cluster = 0;
    std::size_t cases = 0;
    std::size_t disp_errors = 0;
    std::size_t freq_errors = 0;
    std::size_t undefined_ratio = 0;  // measured 0, predicted > 0 (counted as errors)
    double pct_disp_error = 0.0;
    double pct_freq_error = 0.0;
};

struct EvaluationOptions {
    double disp_factor = 1.5;
    double freq_tolerance = 0.03;  // Hz
};

// Share of cases per cluster whose displacement ratio falls outside
// [1/factor, factor] or whose frequency differs by more than the tolerance.
// Rows sorted by cluster. Throws a validation Error on empty input.
std::vector<ClusterError> evaluate_predictions(const std::vector<PredictionPair>& pairs,
                                               const EvaluationOptions& options = {});

}  // namespace vivclust::viv
