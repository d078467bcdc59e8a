#include "quakedss/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace quakedss::geo {

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    constexpr double kDeg = std::numbers::pi / 180.0;
    double dlat = (lat2 - lat1) * kDeg;
    double dlon = (lon2 - lon1) * kDeg;
    double s_lat = std::sin(dlat / 2.0);
    double s_lon = std::sin(dlon / 2.0);
    double a = s_lat * s_lat + std::cos(lat1 * kDeg) * std::cos(lat2 * kDeg) * s_lon * s_lon;
    // rounding can push a just above 1 for antipodal points
    a = std::clamp(a, 0.0, 1.0);
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(a));
}

} // namespace quakedss::geo
