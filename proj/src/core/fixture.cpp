#include "vivclust/core/fixture.hpp"

#include "vivclust/core/error.hpp"

namespace vivclust {

namespace {

constexpr double kLength = 682.75;
constexpr double kSubmergedLength = 670.46;
constexpr double kBareMass = 720.53;
// Bare mass plus buoyancy modules; not published.
constexpr double kBuoyancyMass = 1150.0;
constexpr double kAxialStiffness = 5.42e9;
constexpr double kBendingStiffness = 1.82e8;
constexpr double kMudDensity = 1420.0;

RiserSegment make_segment(double z0, double z1, bool buoyancy) {
    return RiserSegment{z0,
                        z1,
                        buoyancy ? kBuoyancyOuterDiameter : kBareOuterDiameter,
                        buoyancy ? kBuoyancyMass : kBareMass,
                        kAxialStiffness,
                        kBendingStiffness};
}

}  // namespace

RiserFixture helland_hansen_fixture() {
    RiserFixture fx;
    auto& r = fx.riser;
    r.length = kLength;
    r.top_tension = kDefaultTopTension;
    r.mud_density = kMudDensity;
    r.water_depth = kSubmergedLength;
    // 34 m lower buoyancy, 100 m upper buoyancy, 503 m buoyancy in total.
    r.segments = {
        make_segment(0.0, 34.0, true),      make_segment(34.0, 60.0, false),
        make_segment(60.0, 429.0, true),    make_segment(429.0, 520.46, false),
        make_segment(520.46, 620.46, true), make_segment(620.46, kLength, false),
    };
    fx.eigen = {
        {1, {0.022, 0.031}}, {2, {0.047, 0.056}}, {3, {0.071, 0.079}},
        {4, {0.10, 0.11}},   {5, {0.12, 0.13}},
    };
    return fx;
}

std::vector<std::pair<std::string, double>> default_sensor_layout(double riser_length) {
    const double fractions[] = {0.10, 0.25, 0.40, 0.55, 0.70, 0.85};
    std::vector<std::pair<std::string, double>> out;
    int i = 1;
    for (double f : fractions) out.emplace_back("S" + std::to_string(i++), f * riser_length);
    return out;
}

nlohmann::json to_json(const RiserProperties& props) {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : props.segments) {
        segs.push_back({{"z_start", s.z_start},
                        {"z_end", s.z_end},
                        {"outer_diameter", s.outer_diameter},
                        {"mass_per_length", s.mass_per_length},
                        {"axial_stiffness", s.axial_stiffness},
                        {"bending_stiffness", s.bending_stiffness}});
    }
    return {{"length", props.length},
            {"segments", segs},
            {"top_tension", props.top_tension},
            {"mud_density", props.mud_density},
            {"water_depth", props.water_depth}};
}

nlohmann::json to_json(const EigenfrequencyTable& table) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [mode, band] : table)
        out.push_back({{"mode", mode}, {"f_low", band.f_low}, {"f_high", band.f_high}});
    return out;
}

RiserProperties riser_from_json(const nlohmann::json& j) {
    try {
        RiserProperties r;
        r.length = j.at("length").get<double>();
        r.top_tension = j.at("top_tension").get<double>();
        r.mud_density = j.at("mud_density").get<double>();
        r.water_depth = j.at("water_depth").get<double>();
        for (const auto& s : j.at("segments")) {
            r.segments.push_back({s.at("z_start").get<double>(), s.at("z_end").get<double>(),
                                  s.at("outer_diameter").get<double>(),
                                  s.at("mass_per_length").get<double>(),
                                  s.at("axial_stiffness").get<double>(),
                                  s.at("bending_stiffness").get<double>()});
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("malformed riser json: ") + e.what());
    }
}

}  // namespace vivclust
