#include "fragcoal/quadrature.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace fragcoal {

namespace {

// QUADPACK 15-point Kronrod / 7-point Gauss pair on [-1,1].
constexpr double kK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kK15Weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kG7Weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

}  // namespace

void gauss_kronrod_panel(const std::function<double(double)>& f, double a, double b,
                         double& k15, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fv[8][2];
    for (int i = 0; i < 7; ++i) {
        fv[i][0] = f(mid - half * kK15Nodes[i]);
        fv[i][1] = f(mid + half * kK15Nodes[i]);
    }
    fv[7][0] = f(mid);
    fv[7][1] = 0.0;

    double sum15 = kK15Weights[7] * fv[7][0];
    for (int i = 0; i < 7; ++i) sum15 += kK15Weights[i] * (fv[i][0] + fv[i][1]);
    // Gauss points are the odd-index Kronrod nodes plus the centre.
    double sum7 = kG7Weights[3] * fv[7][0];
    for (int i = 0; i < 3; ++i) sum7 += kG7Weights[i] * (fv[2 * i + 1][0] + fv[2 * i + 1][1]);

    k15 = sum15 * half;
    err = std::abs((sum15 - sum7) * half);
}

QuadResult adaptive_gauss_kronrod(const std::function<double(double)>& f, double a,
                                  double b, double abs_tol, std::size_t max_panels) {
    if (!(b > a)) throw std::invalid_argument("adaptive_gauss_kronrod: need b > a");
    if (!(abs_tol > 0.0)) throw std::invalid_argument("adaptive_gauss_kronrod: need tol > 0");

    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    std::priority_queue<Panel> panels;
    QuadResult res;

    double v, e;
    gauss_kronrod_panel(f, a, b, v, e);
    res.evaluations += 15;
    panels.push({a, b, v, e});
    double total_v = v, total_e = e;

    while (total_e > abs_tol && panels.size() < max_panels) {
        Panel worst = panels.top();
        panels.pop();
        total_v -= worst.value;
        total_e -= worst.error;
        const double m = 0.5 * (worst.a + worst.b);
        double v1, e1, v2, e2;
        gauss_kronrod_panel(f, worst.a, m, v1, e1);
        gauss_kronrod_panel(f, m, worst.b, v2, e2);
        res.evaluations += 30;
        panels.push({worst.a, m, v1, e1});
        panels.push({m, worst.b, v2, e2});
        total_v += v1 + v2;
        total_e += e1 + e2;
        if (!std::isfinite(total_v))
            throw std::runtime_error("adaptive_gauss_kronrod: integrand diverged");
    }

    res.value = total_v;
    res.error = total_e;
    res.converged = total_e <= abs_tol;
    return res;
}

}  // namespace fragcoal
