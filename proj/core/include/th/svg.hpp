#pragma once

#include <string>

#include "th/scene.hpp"
#include "th/tspace.hpp"

namespace th {

/// Planar drawing: boundary curves, tangency points (filled for the + side,
/// hollow for the - side) and the representative trajectory of every class
/// of the complex. Throws Error(Unsupported) unless the complex is exact_2d.
std::string render_svg(const Scene& scene, const QuotientComplex& complex, int size = 600);

}  // namespace th
