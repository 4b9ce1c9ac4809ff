#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ratecast {

enum class TrafficModel { High, Low, Mixed };
enum class Placement { Near, Intermediate, Far };

// Radio geometry per placement ring: received power, the best usable MCS,
// and the PDCCH aggregation level needed for reliable control reception.
// Intermediate users sit between two levels and draw one per grant.
struct PlacementParams {
    double rsrp_dbm;
    unsigned mcs_cap;
    unsigned agg_lo;
    unsigned agg_hi;
};

inline PlacementParams placement_params(Placement p) {
    switch (p) {
        case Placement::Near: return {-80.0, 28, 1, 1};
        case Placement::Intermediate: return {-93.0, 19, 2, 4};
        case Placement::Far: return {-101.0, 10, 8, 8};
    }
    throw std::invalid_argument("placement_params");
}

// Reported signal quality degrades linearly with downlink load and with
// distance, clamped to the reportable range.
inline double rsrq_db(double load_fraction, Placement p) {
    const double offset = p == Placement::Near ? 0.0 : (p == Placement::Intermediate ? -3.0 : -6.0);
    const double q = -19.5 * load_fraction - 3.0 + offset;
    return std::min(-3.0, std::max(-19.5, q));
}

inline const char* placement_name(Placement p) {
    switch (p) {
        case Placement::Near: return "near";
        case Placement::Intermediate: return "intermediate";
        case Placement::Far: return "far";
    }
    return "?";
}

inline Placement placement_from_name(const std::string& s) {
    if (s == "near") return Placement::Near;
    if (s == "intermediate") return Placement::Intermediate;
    if (s == "far") return Placement::Far;
    throw std::invalid_argument("placement_from_name: " + s);
}

inline const char* traffic_name(TrafficModel t) {
    switch (t) {
        case TrafficModel::High: return "high";
        case TrafficModel::Low: return "low";
        case TrafficModel::Mixed: return "mixed";
    }
    return "?";
}

inline TrafficModel traffic_from_name(const std::string& s) {
    if (s == "high") return TrafficModel::High;
    if (s == "low") return TrafficModel::Low;
    if (s == "mixed") return TrafficModel::Mixed;
    throw std::invalid_argument("traffic_from_name: " + s);
}

}  // namespace ratecast
