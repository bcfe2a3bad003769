#include "homeguard/localization.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace homeguard {

namespace {

constexpr double kCollinearDetThreshold = 1e-9;

double range_residual(const std::vector<RangedAnchor>& ranges, double x, double y) {
    double sum = 0.0;
    for (const auto& r : ranges) {
        const double mismatch = std::hypot(x - r.anchor.x, y - r.anchor.y) - r.distance_m;
        sum += mismatch * mismatch;
    }
    return std::sqrt(sum / static_cast<double>(ranges.size()));
}

void check_ranges(const std::vector<RangedAnchor>& ranges) {
    if (ranges.size() < 3)
        throw std::invalid_argument("trilateration needs at least 3 anchors, got " +
                                    std::to_string(ranges.size()));
    for (const auto& r : ranges)
        if (r.distance_m < 0.0)
            throw std::invalid_argument("trilateration: negative distance for anchor \"" +
                                        r.anchor.id + "\"");
}

}  // namespace

PositionEstimate trilaterate(const std::vector<RangedAnchor>& ranges) {
    check_ranges(ranges);

    const auto& ref = ranges.front();
    const double x0 = ref.anchor.x, y0 = ref.anchor.y, d0 = ref.distance_m;

    double saa = 0.0, sab = 0.0, sbb = 0.0, sac = 0.0, sbc = 0.0;
    for (std::size_t i = 1; i < ranges.size(); ++i) {
        const auto& r = ranges[i];
        const double a = 2.0 * (r.anchor.x - x0);
        const double b = 2.0 * (r.anchor.y - y0);
        const double c = (d0 * d0 - r.distance_m * r.distance_m) +
                         (r.anchor.x * r.anchor.x - x0 * x0) +
                         (r.anchor.y * r.anchor.y - y0 * y0);
        saa += a * a;
        sab += a * b;
        sbb += b * b;
        sac += a * c;
        sbc += b * c;
    }

    const double det = saa * sbb - sab * sab;
    if (std::abs(det) < kCollinearDetThreshold)
        throw std::invalid_argument("trilateration: anchors are collinear (degenerate system)");

    PositionEstimate est;
    est.x = (sbb * sac - sab * sbc) / det;
    est.y = (saa * sbc - sab * sac) / det;
    est.residual = range_residual(ranges, est.x, est.y);
    return est;
}

PositionEstimate trilaterate_oracle(const std::vector<RangedAnchor>& ranges,
                                    const Workspace& area, double resolution_m) {
    if (!(resolution_m > 0.0))
        throw std::invalid_argument("trilaterate_oracle: resolution must be positive");
    check_ranges(ranges);

    const auto cells = [](double extent, double res) {
        return static_cast<std::size_t>(std::ceil(extent / res));
    };
    const std::size_t nx = std::max<std::size_t>(1, cells(area.width, resolution_m));
    const std::size_t ny = std::max<std::size_t>(1, cells(area.height, resolution_m));

    double best = std::numeric_limits<double>::infinity();
    double best_x = 0.0, best_y = 0.0;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        const double y = (static_cast<double>(iy) + 0.5) * resolution_m;
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double x = (static_cast<double>(ix) + 0.5) * resolution_m;
            double cost = 0.0;
            for (const auto& r : ranges) {
                const double mismatch =
                    std::hypot(x - r.anchor.x, y - r.anchor.y) - r.distance_m;
                cost += mismatch * mismatch;
            }
            if (cost < best) {
                best = cost;
                best_x = x;
                best_y = y;
            }
        }
    }

    PositionEstimate est;
    est.x = best_x;
    est.y = best_y;
    est.residual = range_residual(ranges, best_x, best_y);
    return est;
}

PositionEstimate localize_device(const std::map<std::string, double>& rssi_by_anchor,
                                 const std::vector<Anchor>& anchors,
                                 const RadioProfile& profile) {
    std::vector<RangedAnchor> ranges;
    ranges.reserve(rssi_by_anchor.size());
    for (const auto& [id, rssi] : rssi_by_anchor) {
        const Anchor* found = nullptr;
        for (const auto& a : anchors)
            if (a.id == id) {
                found = &a;
                break;
            }
        if (!found)
            throw std::invalid_argument("localize_device: unknown anchor id \"" + id + "\"");
        ranges.push_back({*found, distance_from_rssi(profile, rssi)});
    }
    return trilaterate(ranges);
}

std::vector<Anchor> corner_anchors(const Workspace& area) {
    return {{"a0", 0.0, 0.0},
            {"a1", area.width, 0.0},
            {"a2", 0.0, area.height},
            {"a3", area.width, area.height}};
}

}  // namespace homeguard
