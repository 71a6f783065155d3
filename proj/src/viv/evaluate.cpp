#include "vivclust/viv/evaluate.hpp"

#include "vivclust/core/error.hpp"

#include <cmath>
#include <map>

namespace vivclust::viv {

std::vector<ClusterError> evaluate_predictions(const std::vector<PredictionPair>& pairs,
                                               const EvaluationOptions& options) {
    if (pairs.empty()) throw validation_error("no prediction pairs to evaluate");
    if (!(options.disp_factor >= 1.0) || !(options.freq_tolerance >= 0.0))
        throw validation_error("evaluation factor must be >= 1 and tolerance >= 0");
    std::map<int, ClusterError> rows;
    for (const auto& p : pairs) {
        ClusterError& row = rows[p.cluster];
        row.cluster = p.cluster;
        ++row.cases;
        bool disp_bad = false;
        if (p.measured_disp <= 0.0) {
            if (p.predicted_disp > 0.0) {
                disp_bad = true;
                ++row.undefined_ratio;
            }
        } else {
            const double ratio = p.predicted_disp / p.measured_disp;
            disp_bad = ratio > options.disp_factor || ratio < 1.0 / options.disp_factor;
        }
        if (disp_bad) ++row.disp_errors;
        if (std::abs(p.predicted_freq - p.measured_freq) > options.freq_tolerance) ++row.freq_errors;
    }
    std::vector<ClusterError> out;
    for (auto& [k, row] : rows) {
        row.pct_disp_error = 100.0 * static_cast<double>(row.disp_errors) / static_cast<double>(row.cases);
        row.pct_freq_error = 100.0 * static_cast<double>(row.freq_errors) / static_cast<double>(row.cases);
        out.push_back(row);
    }
    return out;
}

}  // namespace vivclust::viv
