#pragma once

#include <cstddef>
#include <stdexcept>

namespace rwave {

// Uniform space-time grid shared by the noise, solver, and norm modules.
// Row i covers time t0 + i*dt, column j covers position x0 + j*dx.
struct GridSpec {
    std::size_t t_count = 2;
    std::size_t x_count = 2;
    double dt = 1.0;
    double dx = 1.0;
    double t0 = 0.0;
    double x0 = 0.0;

    double t(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
    double x(std::size_t j) const { return x0 + static_cast<double>(j) * dx; }
    double t_end() const { return t(t_count - 1); }
    double x_end() const { return x(x_count - 1); }
    double x_extent() const { return static_cast<double>(x_count - 1) * dx; }
    std::size_t size() const { return t_count * x_count; }

    void validate() const {
        if (t_count < 1) throw std::invalid_argument("GridSpec: t_count must be >= 1");
        if (x_count < 2) throw std::invalid_argument("GridSpec: x_count must be >= 2");
        if (!(dt > 0.0)) throw std::invalid_argument("GridSpec: dt must be positive");
        if (!(dx > 0.0)) throw std::invalid_argument("GridSpec: dx must be positive");
    }

    bool operator==(const GridSpec&) const = default;
};

} // namespace rwave
