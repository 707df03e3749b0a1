#pragma once

#include "rwave/grid.hpp"

#include <vector>

namespace rwave {

// Non-owning view of a space-time field, row-major t_count * x_count.
struct FieldView {
    GridSpec grid;
    const double* data = nullptr;

    double at(std::size_t i, std::size_t j) const { return data[i * grid.x_count + j]; }
};

// Owning field on a grid.
struct Field {
    GridSpec grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const GridSpec& g) : grid(g), values(g.size(), 0.0) {}

    double at(std::size_t i, std::size_t j) const { return values[i * grid.x_count + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * grid.x_count + j]; }
    FieldView view() const { return {grid, values.data()}; }
};

} // namespace rwave
