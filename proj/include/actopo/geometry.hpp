#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "actopo/matrix.hpp"
#include "actopo/pointcloud.hpp"

namespace actopo {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

struct Projection {
    std::vector<Point2> coords;
    std::array<double, 2> explained{};  // fraction of total variance, 0 if the cloud has none
    std::array<double, 2> variances{};  // eigenvalues of the sample covariance (N - 1)
};

/// Centered projection onto the top two principal axes. Each axis is signed so
/// its largest-magnitude loading is positive. Missing axes (d < 2) are zero.
Projection pca_project(const LabeledPointCloud& cloud);
Projection pca_project(const Matrix& points);

/// Counter-clockwise monotone-chain hull with collinear points dropped.
/// 1 distinct point -> 1 vertex; a collinear set -> its 2 endpoints.
std::vector<Point2> convex_hull(std::vector<Point2> points);

/// Inside or on the hull within `slack` (distance outside the nearest edge).
bool hull_contains(const std::vector<Point2>& hull, Point2 p, double slack = 1e-9);

}  // namespace actopo
