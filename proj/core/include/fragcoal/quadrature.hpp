#pragma once

#include <cstdint>
#include <functional>

namespace fragcoal {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    std::uint64_t evaluations = 0;
    bool converged = false;
};

// Adaptive Gauss-Kronrod (G7/K15) on [a,b], bisecting the panel with the
// largest error estimate until the total is below abs_tol. Endpoints are
// never evaluated.
QuadResult adaptive_gauss_kronrod(const std::function<double(double)>& f, double a,
                                  double b, double abs_tol,
                                  std::size_t max_panels = 2000);

// Single G7/K15 panel: returns the K15 value and |K15 - G7| as error proxy.
void gauss_kronrod_panel(const std::function<double(double)>& f, double a, double b,
                         double& k15, double& err);

}  // namespace fragcoal
