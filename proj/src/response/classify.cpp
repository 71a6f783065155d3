#include "vivclust/response/classify.hpp"

#include "vivclust/core/dsp.hpp"
#include "vivclust/core/error.hpp"
#include "vivclust/response/spectral.hpp"
#include "vivclust/viv/riser_sim.hpp"

#include <algorithm>
#include <cmath>

namespace vivclust::response {

std::string to_string(ResponseLabel label) {
    switch (label) {
        case ResponseLabel::VivDominated: return "VivDominated";
        case ResponseLabel::WaveDominated: return "WaveDominated";
        case ResponseLabel::SmallResponse: return "SmallResponse";
        case ResponseLabel::Combined: return "Combined";
    }
    return "Combined";
}

ResponseLabel label_from_string(const std::string& s) {
    for (auto l : {ResponseLabel::VivDominated, ResponseLabel::WaveDominated,
                   ResponseLabel::SmallResponse, ResponseLabel::Combined})
        if (to_string(l) == s) return l;
    throw validation_error("unknown response label '" + s + "'");
}

ResponseLabel classify_event(const ResponseStats& stats, double f_strouhal,
                             const ClassifyThresholds& th) {
    const auto a = stats.sensors.find(th.ref_a);
    const auto b = stats.sensors.find(th.ref_b);
    if (a == stats.sensors.end() || b == stats.sensors.end())
        throw validation_error("reference sensors missing from response stats");
    const SensorStats& ref = a->second.peak_psd >= b->second.peak_psd ? a->second : b->second;
    const double p = ref.peak_psd;
    const double f = ref.peak_freq;
    const double dist = std::abs(f - f_strouhal);
    if (p > th.viv_peak && dist < th.strouhal_distance) return ResponseLabel::VivDominated;
    if (a->second.peak_psd < th.small_peak && b->second.peak_psd < th.small_peak)
        return ResponseLabel::SmallResponse;
    if (f >= th.wave_low && f <= th.wave_high && dist > th.strouhal_distance)
        return ResponseLabel::WaveDominated;
    return ResponseLabel::Combined;
}

namespace {

double safe_kurtosis(std::span<const double> x) {
    try {
        return kurtosis(x);
    } catch (const Error&) {
        return 0.0;
    }
}

}  // namespace

ResponseStats response_stats(const MeasurementEvent& event, const ModalBasis& basis, double angle,
                             const StatsOptions& options) {
    ResponseStats out;
    const auto main_rec = rotated_records(event, angle, 0);
    const auto cross_rec = rotated_records(event, angle, 1);
    std::size_t i = 0;
    for (const auto& [id, rec] : event.riser_acc) {
        SensorStats s;
        const auto& xm = main_rec[i].acc;
        const auto& xc = cross_rec[i].acc;
        ++i;
        s.acc_rms_main = dsp::rms(xm.values);
        s.acc_rms_cross = dsp::rms(xc.values);
        s.kurtosis_main = safe_kurtosis(xm.values);
        s.kurtosis_cross = safe_kurtosis(xc.values);
        const std::size_t seg = std::min(options.seg_len, dsp::segment_length_for(xc.size(), options.seg_len));
        const Peak pk = spectrum_peak(welch_psd(xc, seg, options.overlap), options.peak_f_min);
        s.peak_psd = pk.value;
        s.peak_freq = pk.freq;
        out.sensors[id] = s;
    }

    // Vessel sway is fitted as its own column and left out, so the displacement is
    // the riser's own deflection between its ends.
    const ModalBasis aug = with_top_sway(basis);
    const auto w_main = modal_reconstruct(main_rec, aug, options.reconstruct);
    const auto w_cross = modal_reconstruct(cross_rec, aug, options.reconstruct);
    std::vector<std::vector<double>> main_series;
    for (int g = 0; g < options.grid_points; ++g) {
        const double z = basis.length * g / std::max(1, options.grid_points - 1);
        main_series.push_back(w_main.at(z, basis.n_modes()));
        out.ydisp_max = std::max(out.ydisp_max, dsp::rms(w_cross.at(z, basis.n_modes())));
    }
    out.freq_dom = viv::dominant_frequency(main_series, w_main.dt, options.reconstruct.f_min);
    return out;
}

}  // namespace vivclust::response
