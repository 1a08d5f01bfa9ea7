#include "kvmix/transport.hpp"

#include <algorithm>
#include <cmath>

namespace kvmix {

namespace {

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

// lerp keeps results inside [min(a,b), max(a,b)] for t in [0,1], and returns
// a exactly when t == 0 or a == b.
inline double lerp(double a, double b, double t) { return a + t * (b - a); }

// Bilinear sample at index-space position (px, py) with periodic wrap.
double sample(const ScalarField& f, double px, double py) {
    const int n = f.n;
    const double fx0 = std::floor(px);
    const double fy0 = std::floor(py);
    const int ix0 = wrap(int(fx0), n);
    const int iy0 = wrap(int(fy0), n);
    const int ix1 = ix0 + 1 == n ? 0 : ix0 + 1;
    const int iy1 = iy0 + 1 == n ? 0 : iy0 + 1;
    const double tx = px - fx0;
    const double ty = py - fy0;
    const double lo = lerp(f.at(ix0, iy0), f.at(ix1, iy0), tx);
    const double hi = lerp(f.at(ix0, iy1), f.at(ix1, iy1), tx);
    return lerp(lo, hi, ty);
}

} // namespace

DensityField transport(const DensityField& rho, const GridVectorField& v, double dt,
                       TransportStats* stats) {
    const int n = rho.n;
    require_shape(v, n, "transport velocity");
    const double h = 2.0 * M_PI / n;
    const double step = dt / h; // displacement in cells per unit velocity

    DensityField out(n);
    double max_disp = 0.0;
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const double vx0 = v.x.at(ix, iy);
            const double vy0 = v.y.at(ix, iy);
            // midpoint of the backward characteristic, velocity frozen in time
            const double mx = ix - 0.5 * step * vx0;
            const double my = iy - 0.5 * step * vy0;
            const double vxm = sample(v.x, mx, my);
            const double vym = sample(v.y, mx, my);
            const double px = ix - step * vxm;
            const double py = iy - step * vym;
            const double dispx = ix - px;
            const double dispy = iy - py;
            max_disp = std::max(max_disp, std::sqrt(dispx * dispx + dispy * dispy));
            out.at(ix, iy) = sample(rho, px, py);
        }
    }
    if (stats) {
        stats->max_displacement_cells = std::max(stats->max_displacement_cells, max_disp);
        if (max_disp > 4.0) stats->cfl_exceeded = true;
    }
    return out;
}

std::pair<double, double> density_extrema(const DensityField& rho) {
    double lo = rho.data[0], hi = rho.data[0];
    for (double v : rho.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

} // namespace kvmix
