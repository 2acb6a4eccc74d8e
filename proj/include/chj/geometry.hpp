#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "chj/types.hpp"

namespace chj {

/// Flat torus T^d, d in {1, 2}, sampled on a uniform periodic grid.
///
/// Node i on axis a sits at i * period[a] / resolution[a]. The seam node
/// i = resolution[a] is the same point as node 0 and is not stored.
class TorusSpec {
public:
    TorusSpec() : TorusSpec(1, 256) {}

    /// Isotropic torus: same period and resolution on every axis.
    TorusSpec(int dim, int resolution, double period = 1.0);
    TorusSpec(int dim, std::array<int, kMaxDim> resolution, Vec period);

    int dim() const { return dim_; }
    double period(int axis) const { return period_[axis]; }
    const Vec& periods() const { return period_; }
    int resolution(int axis) const { return resolution_[axis]; }
    double spacing(int axis) const { return period_[axis] / resolution_[axis]; }

    /// Largest mesh spacing over the active axes.
    double max_spacing() const;

    std::size_t node_count() const;

    /// Row-major index with axis 0 fastest.
    std::size_t flat_index(std::array<int, kMaxDim> multi) const {
        return static_cast<std::size_t>(multi[0]) +
               static_cast<std::size_t>(resolution_[0]) * static_cast<std::size_t>(multi[1]);
    }
    std::array<int, kMaxDim> multi_index(std::size_t flat) const;
    Vec node_point(std::size_t flat) const;

    /// Wraps every active coordinate into [0, period).
    Vec wrap(const Vec& x) const;

    bool operator==(const TorusSpec&) const = default;

private:
    int dim_;
    std::array<int, kMaxDim> resolution_;
    Vec period_;
};

/// Wraps a scalar into [0, period).
double wrap_coordinate(double x, double period);

/// Minimal signed displacement from a to b on each active axis, in
/// [-period/2, period/2). The half-period tie maps to -period/2.
Vec wrap_displacement(const Vec& a, const Vec& b, const TorusSpec& spec);
double wrap_displacement(double a, double b, double period);

/// Periodic sampled scalar field on a torus.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(TorusSpec spec, double fill = 0.0);
    GridFunction(TorusSpec spec, std::vector<double> values);

    /// Samples fn at every node.
    static GridFunction sample(const TorusSpec& spec, const std::function<double(const Vec&)>& fn);

    const TorusSpec& spec() const { return spec_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    double min() const;
    double max() const;

private:
    TorusSpec spec_;
    std::vector<double> values_;
};

/// Multilinear periodic interpolation. Exact at nodes.
double interpolate(const GridFunction& f, const Vec& x);

struct InterpolatedValue {
    double value = 0.0;
    Vec gradient{};  // gradient of the multilinear interpolant inside the cell
};
InterpolatedValue interpolate_with_gradient(const GridFunction& f, const Vec& x);

/// Backward (lower) and forward (upper) difference quotients at a node.
struct OneSidedGradient {
    Vec lower{};
    Vec upper{};

    Vec central() const { return 0.5 * (lower + upper); }
};

OneSidedGradient difference_quotients(const GridFunction& f, std::size_t node);

/// Writes the text format: a header line `torus d=<dim> period=<p> n=<res>`
/// followed by one value per line in storage order (17 significant digits).
/// Per-axis values are comma separated when the axes differ.
void write_grid_function(std::ostream& os, const GridFunction& f);
GridFunction read_grid_function(std::istream& is);

void save_grid_function(const std::string& path, const GridFunction& f);
GridFunction load_grid_function(const std::string& path);

}  // namespace chj
