#pragma once

// Minimal scatter-plot writer for 2-D visualization layouts. Emits plain SVG
// markup so plots stay dependency-free and diffable.

#include "elmvis/common.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace elmvis {

namespace detail {

inline std::string svg_coord(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

constexpr std::array<std::string_view, 10> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
};

} // namespace detail

// One circle per point row; labels (optional, display only) pick the fill
// color from a fixed 10-color palette. Output is a complete, valid SVG
// document with the data bounding box mapped into the canvas.
inline std::string scatter_svg(const Matrix& points, const std::vector<long>* labels = nullptr,
                               double canvas = 640.0) {
    if (points.cols() != 2)
        throw ArgumentError("scatter_svg: points must have exactly 2 columns");
    if (points.rows() < 1)
        throw ArgumentError("scatter_svg: no points");
    if (labels && static_cast<Index>(labels->size()) != points.rows())
        throw ArgumentError("scatter_svg: label count does not match point count");
    if (!(canvas > 0.0))
        throw ArgumentError("scatter_svg: canvas size must be positive");

    const double margin = canvas * 0.05;
    const double inner = canvas - 2.0 * margin;
    const double min_x = points.col(0).minCoeff();
    const double max_x = points.col(0).maxCoeff();
    const double min_y = points.col(1).minCoeff();
    const double max_y = points.col(1).maxCoeff();
    const double span_x = max_x - min_x;
    const double span_y = max_y - min_y;

    const auto map_x = [&](double x) {
        return span_x == 0.0 ? canvas / 2.0 : margin + inner * (x - min_x) / span_x;
    };
    const auto map_y = [&](double y) {
        // SVG's y axis points down; flip so larger coordinates plot higher.
        return span_y == 0.0 ? canvas / 2.0 : margin + inner * (max_y - y) / span_y;
    };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::svg_coord(canvas)
        << "\" height=\"" << detail::svg_coord(canvas) << "\" viewBox=\"0 0 "
        << detail::svg_coord(canvas) << ' ' << detail::svg_coord(canvas) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (Index i = 0; i < points.rows(); ++i) {
        std::string_view color = detail::kPalette[0];
        if (labels) {
            const long label = (*labels)[static_cast<std::size_t>(i)];
            if (label < 0)
                throw ArgumentError("scatter_svg: negative label at row " + std::to_string(i));
            color = detail::kPalette[static_cast<std::size_t>(label) % detail::kPalette.size()];
        }
        out << "<circle cx=\"" << detail::svg_coord(map_x(points(i, 0))) << "\" cy=\""
            << detail::svg_coord(map_y(points(i, 1))) << "\" r=\""
            << detail::svg_coord(std::max(2.0, canvas / 160.0)) << "\" fill=\"" << color
            << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace elmvis
