#include "tllreach/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "tllreach/errors.hpp"

namespace tllreach {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

std::vector<Vector> polygon_vertices(const HPolytope& P, double tol) {
    if (P.dim() != 2) throw ArgumentError("polygon_vertices: planar polytopes only");
    std::vector<Vector> pts;
    for (Eigen::Index i = 0; i < P.C.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < P.C.rows(); ++j) {
            Eigen::Matrix2d M;
            M << P.C(i, 0), P.C(i, 1), P.C(j, 0), P.C(j, 1);
            if (std::abs(M.determinant()) < 1e-12) continue;
            const Eigen::Vector2d x = M.partialPivLu().solve(Eigen::Vector2d(P.d(i), P.d(j)));
            if (P.max_violation(x) <= tol) pts.emplace_back(x);
        }
    }
    if (pts.empty()) return pts;
    Vector c = Vector::Zero(2);
    for (const auto& p : pts) c += p;
    c /= static_cast<double>(pts.size());
    std::sort(pts.begin(), pts.end(), [&](const Vector& a, const Vector& b) {
        return std::atan2(a(1) - c(1), a(0) - c(0)) < std::atan2(b(1) - c(1), b(0) - c(0));
    });
    std::vector<Vector> unique;
    for (const auto& p : pts) {
        if (unique.empty() || (p - unique.back()).norm() > 1e-9) unique.push_back(p);
    }
    if (unique.size() > 1 && (unique.front() - unique.back()).norm() <= 1e-9) unique.pop_back();
    return unique;
}

std::string render_svg(const HPolytope& initial_set, const std::vector<Box>& boxes, const ReachSet* exact) {
    if (initial_set.dim() != 2) throw ArgumentError("render_svg: only planar systems can be drawn");
    std::vector<std::vector<Vector>> polys;
    polys.push_back(polygon_vertices(initial_set));
    std::vector<std::vector<Vector>> pieces;
    if (exact) {
        for (const auto& p : exact->pieces) pieces.push_back(polygon_vertices(p.polytope));
    }

    Box view = Box::empty(2);
    auto grow = [&](const std::vector<Vector>& pts) {
        for (const auto& p : pts) view.merge(Box(p, p));
    };
    for (const auto& p : polys) grow(p);
    for (const auto& p : pieces) grow(p);
    for (const auto& b : boxes) view.merge(b);
    if (view.is_empty()) view = Box(Vector::Zero(2), Vector::Ones(2));
    const double span = std::max({view.width()(0), view.width()(1), 1e-9});
    view = view.inflated(0.05 * span);

    const double size = 600.0;
    const double scale = size / std::max(view.width()(0), view.width()(1));
    auto px = [&](double x) { return (x - view.lo(0)) * scale; };
    auto py = [&](double y) { return (view.hi(1) - y) * scale; };
    auto points = [&](const std::vector<Vector>& pts) {
        std::string s;
        for (const auto& p : pts) s += fmt(px(p(0))) + "," + fmt(py(p(1))) + " ";
        return s;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(view.width()(0) * scale) << "\" height=\""
        << fmt(view.width()(1) * scale) << "\">\n";
    svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "  <polygon points=\"" << points(polys.front())
        << "\" fill=\"#bbbbbb\" fill-opacity=\"0.6\" stroke=\"black\" stroke-width=\"1\"><title>X0</title></polygon>\n";
    for (const auto& p : pieces) {
        svg << "  <polygon points=\"" << points(p)
            << "\" fill=\"#ffbb78\" fill-opacity=\"0.5\" stroke=\"#ff7f0e\" stroke-width=\"0.5\"/>\n";
    }
    for (std::size_t t = 0; t < boxes.size(); ++t) {
        const Box& b = boxes[t];
        if (b.is_empty()) continue;
        svg << "  <rect x=\"" << fmt(px(b.lo(0))) << "\" y=\"" << fmt(py(b.hi(1))) << "\" width=\""
            << fmt(b.width()(0) * scale) << "\" height=\"" << fmt(b.width()(1) * scale) << "\" fill=\"none\" stroke=\""
            << kPalette[t % std::size(kPalette)] << "\" stroke-width=\"1.5\"><title>B" << (t + 1)
            << "</title></rect>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace tllreach
