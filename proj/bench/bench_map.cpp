#include <chrono>
#include <cstdio>
#include <numbers>
#include <vector>

#include "pgc/confmap.hpp"

using namespace pgc;
using std::numbers::pi;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t boundary_n = 2048, points_n = 20000;
    if (argc > 1) boundary_n = std::strtoul(argv[1], nullptr, 10);
    if (argc > 2) points_n = std::strtoul(argv[2], nullptr, 10);

    // Smooth star-shaped test domain.
    std::vector<cd> boundary(boundary_n);
    for (std::size_t k = 0; k < boundary_n; ++k) {
        const double t = 2.0 * pi * double(k) / double(boundary_n);
        boundary[k] = (1.0 + 0.25 * std::cos(5.0 * t)) * std::polar(1.0, t);
    }
    const auto t_build = std::chrono::steady_clock::now();
    const DiscreteConformalMap dm = disk_map(boundary, cd(0.1, 0.05));
    std::printf("build: n=%zu %.1f ms, accuracy %.2e\n", boundary_n, ms_since(t_build),
                dm.accuracy());

    std::vector<cd> pts(points_n);
    for (std::size_t k = 0; k < points_n; ++k) {
        const double t = 2.0 * pi * double(k) / double(points_n);
        pts[k] = 0.4 * std::polar(1.0 + 0.3 * std::sin(3.0 * t), t);
    }

    const auto t_serial = std::chrono::steady_clock::now();
    const std::vector<cd> serial = dm.evaluate_batch(pts, false);
    const double ms_serial = ms_since(t_serial);

    const auto t_par = std::chrono::steady_clock::now();
    const std::vector<cd> par = dm.evaluate_batch(pts, true);
    const double ms_par = ms_since(t_par);

    double dev = 0.0;
    for (std::size_t k = 0; k < points_n; ++k) dev = std::max(dev, std::abs(serial[k] - par[k]));
    std::printf("evaluate_batch: %zu points, serial %.1f ms, parallel %.1f ms, speedup %.2fx, "
                "max deviation %.2e\n",
                points_n, ms_serial, ms_par, ms_serial / ms_par, dev);

    const auto t_inv = std::chrono::steady_clock::now();
    const std::vector<cd> back = dm.invert_batch(serial, true);
    const double ms_inv = ms_since(t_inv);
    double rt = 0.0;
    for (std::size_t k = 0; k < points_n; ++k) rt = std::max(rt, std::abs(back[k] - pts[k]));
    std::printf("invert_batch: parallel %.1f ms, max round trip error %.2e\n", ms_inv, rt);
    return 0;
}
