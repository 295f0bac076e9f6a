#pragma once

#include "fracstokes/spectral_grid.hpp"

namespace fracstokes::testing {

/// Heat flow (u_t = Laplacian u) of a centered Gaussian a exp(-|x|^2/(2w^2)) on R^N:
/// a (w^2/(w^2+2t))^{N/2} exp(-|x|^2 / (2(w^2+2t))), sampled on the grid.
ScalarField gaussian_heat_solution(const GridSpec& grid, double amplitude, double width, double t);

/// 1D heat kernel on the periodic box [-L, L), as an image sum truncated once
/// the images drop below 1e-14 of the leading term.
ScalarField periodized_heat_kernel(const GridSpec& grid, double t);

}  // namespace fracstokes::testing
