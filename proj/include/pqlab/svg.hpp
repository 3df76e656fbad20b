#pragma once

#include <string>

#include "pqlab/fields.hpp"

namespace pqlab {

inline constexpr int kContourLevels = 16;

/// Contour plot of u at levels (k + 1/2) max|u| / 16, k = 0..15, traced on
/// the P1 triangles. Output depends only on the field values.
std::string contour_svg(const ScalarField& u, const std::string& title);

void write_contour_svg(const std::string& path, const ScalarField& u, const std::string& title);

}  // namespace pqlab
