#pragma once

#include <map>
#include <string>
#include <vector>

#include "homeguard/radio.hpp"

namespace homeguard {

// Fixed reference node with a known position.
struct Anchor {
    std::string id;
    double x = 0.0;
    double y = 0.0;
};

// Rectangular region with origin (0,0); the default mirrors a 4x3 m room.
struct Workspace {
    double width = 4.0;
    double height = 3.0;

    bool contains(double x, double y, double margin = 0.0) const {
        return x >= -margin && x <= width + margin && y >= -margin && y <= height + margin;
    }
};

struct PositionEstimate {
    double x = 0.0;
    double y = 0.0;
    double residual = 0.0;  // RMS distance mismatch over the anchors, metres
};

struct RangedAnchor {
    Anchor anchor;
    double distance_m = 0.0;
};

// Least-squares solution of the linearized circle system: the first anchor's
// circle equation is subtracted from the rest, and the resulting linear
// system in (x, y) is solved by 2x2 normal equations. Throws on fewer than 3
// anchors, negative distances, or a collinear (rank-deficient) geometry.
PositionEstimate trilaterate(const std::vector<RangedAnchor>& ranges);

// Brute-force argmin of the squared distance mismatch over a grid of cell
// centers covering the workspace. Verification oracle for trilaterate.
PositionEstimate trilaterate_oracle(const std::vector<RangedAnchor>& ranges,
                                    const Workspace& area, double resolution_m);

// RSSI map -> distances via the inverse path-loss model -> trilateration.
// Every reported anchor id must be known; at least 3 reports required.
PositionEstimate localize_device(const std::map<std::string, double>& rssi_by_anchor,
                                 const std::vector<Anchor>& anchors,
                                 const RadioProfile& profile);

// Default deployment: one anchor in each corner of the workspace.
std::vector<Anchor> corner_anchors(const Workspace& area);

}  // namespace homeguard
