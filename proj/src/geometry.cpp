#include "actopo/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "actopo/error.hpp"

namespace actopo {

Projection pca_project(const Matrix& points) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    if (n < 2) {
        throw InsufficientDataError("PCA needs at least 2 points (N = " + std::to_string(n) + ")");
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < d; ++t) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = points(i, t);
        }
    }
    x.rowwise() -= x.colwise().mean();
    Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
    cov = (0.5 * (cov + cov.transpose())).eval();

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw ConditioningError("PCA eigendecomposition did not converge");
    }
    // Eigen returns ascending eigenvalues.
    const Eigen::VectorXd values = eig.eigenvalues().cwiseMax(0.0);
    const double total = values.sum();
    const auto axes = std::min<std::size_t>(2, d);

    Projection out;
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), 2);
    for (std::size_t a = 0; a < axes; ++a) {
        const auto col = static_cast<Eigen::Index>(d - 1 - a);
        Eigen::VectorXd v = eig.eigenvectors().col(col);
        Eigen::Index arg = 0;
        for (Eigen::Index t = 1; t < v.size(); ++t) {
            if (std::abs(v(t)) > std::abs(v(arg))) {
                arg = t;
            }
        }
        if (v(arg) < 0.0) {
            v = -v;
        }
        basis.col(static_cast<Eigen::Index>(a)) = v;
        out.variances[a] = values(col);
        out.explained[a] = total > 0.0 ? values(col) / total : 0.0;
    }
    const Eigen::MatrixXd proj = x * basis;
    out.coords.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.coords[i] = {proj(static_cast<Eigen::Index>(i), 0), proj(static_cast<Eigen::Index>(i), 1)};
    }
    return out;
}

Projection pca_project(const LabeledPointCloud& cloud) {
    return pca_project(cloud.points());
}

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double segment_distance(Point2 a, Point2 b, Point2 p) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

}  // namespace

std::vector<Point2> convex_hull(std::vector<Point2> points) {
    if (points.empty()) {
        throw ParameterError("convex hull of an empty point set");
    }
    std::sort(points.begin(), points.end(),
              [](const Point2& a, const Point2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.size() < 3) {
        return points;
    }
    std::vector<Point2> hull(2 * points.size());
    std::size_t k = 0;
    for (const auto& p : points) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) {
            --k;
        }
        hull[k++] = p;
    }
    for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0.0) {
            --k;
        }
        hull[k++] = points[i];
    }
    hull.resize(k - 1);
    // All collinear: the chain degenerates to the two endpoints.
    return hull;
}

bool hull_contains(const std::vector<Point2>& hull, Point2 p, double slack) {
    if (hull.empty()) {
        return false;
    }
    if (hull.size() == 1) {
        return std::hypot(p.x - hull[0].x, p.y - hull[0].y) <= slack;
    }
    if (hull.size() == 2) {
        return segment_distance(hull[0], hull[1], p) <= slack;
    }
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point2& a = hull[i];
        const Point2& b = hull[(i + 1) % hull.size()];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        if (cross(a, b, p) / len < -slack) {
            return false;
        }
    }
    return true;
}

}  // namespace actopo
