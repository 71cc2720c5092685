#pragma once

/// \file grid.hpp
/// \brief Radial discretization of R^N.
///
/// Nodes 0 = r_0 < r_1 < ... < r_M = R. Integrals over R^N reduce to
/// |S^{N-1}| int_0^R f(r) r^{N-1} dr; the node weights already carry the
/// r^{N-1} |S^{N-1}| factor (composite trapezoid, with a third-order end
/// correction at r = R when the last cells are uniform). The Dirichlet form
/// int |u'|^2 is the piecewise-linear one, with the r^{N-1} measure of each
/// cell integrated exactly.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace choquard {

/// Mesh layout: geometric cells growing by `growth` from the origin until the
/// spacing reaches `max_ratio` times the first one, uniform afterwards.
/// `pins` are radii that must coincide with a node (e.g. a discontinuity).
struct GridSpec {
    std::size_t cells = 2048;
    double radius = 40.0;
    double max_ratio = 1e5;
    double growth = 1.015;
    std::vector<double> pins;
};

class RadialGrid;
using GridPtr = std::shared_ptr<const RadialGrid>;

class RadialGrid {
public:
    static GridPtr make(int dimension, const GridSpec& spec);
    static GridPtr uniform(int dimension, std::size_t cells, double radius);
    /// Grid on explicit nodes; nodes must start at 0 and increase strictly.
    static GridPtr from_nodes(int dimension, std::vector<double> nodes);

    int dimension() const { return dim_; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t cells() const { return nodes_.size() - 1; }
    double radius() const { return nodes_.back(); }
    double node(std::size_t i) const { return nodes_[i]; }
    double spacing(std::size_t cell) const { return nodes_[cell + 1] - nodes_[cell]; }

    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }
    /// |S^{N-1}| int_{r_j}^{r_{j+1}} r^{N-1} dr for every cell j.
    std::span<const double> cell_masses() const { return cell_masses_; }

    /// Control volume [lo, hi] of node i (half cells on each side).
    std::pair<double, double> dual_cell(std::size_t i) const;

    /// Index of the first node with r_i >= r (size() if none).
    std::size_t lower_index(double r) const;

    /// FNV-1a hash of the dimension and node coordinates.
    std::uint64_t fingerprint() const { return fingerprint_; }

    /// K u, where u^T K u is the discrete Dirichlet energy int |u'|^2.
    std::vector<double> apply_stiffness(std::span<const double> u) const;
    /// Solves (K + kappa diag(w)) x = rhs; the H^1 Riesz map used for Sobolev gradients.
    std::vector<double> solve_shifted(double kappa, std::span<const double> rhs) const;
    /// Discrete -Delta u = (K u)_i / w_i; zero where the weight vanishes (r = 0).
    std::vector<double> negative_laplacian(std::span<const double> u) const;

private:
    RadialGrid(int dimension, std::vector<double> nodes);

    int dim_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> cell_masses_;
    std::uint64_t fingerprint_ = 0;
};

bool operator==(const RadialGrid& a, const RadialGrid& b);

/// Sampled radial profile u(r_i) on a shared grid.
class RadialFunction {
public:
    RadialFunction(GridPtr grid, std::vector<double> values);

    static RadialFunction zero(GridPtr grid);
    static RadialFunction sample(GridPtr grid, const std::function<double(double)>& f);

    const RadialGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    RadialFunction& operator+=(const RadialFunction& other);
    RadialFunction& operator*=(double s);

private:
    GridPtr grid_;
    std::vector<double> values_;
};

RadialFunction operator+(RadialFunction a, const RadialFunction& b);
RadialFunction operator*(double s, RadialFunction a);

/// Throws std::invalid_argument unless both functions live on the same grid.
void require_same_grid(const RadialGrid& a, const RadialGrid& b);

double integrate(const RadialFunction& u);

struct H1Parts {
    double kinetic = 0;  ///< int |grad u|^2
    double mass = 0;     ///< int u^2
};

H1Parts h1_seminorms(const RadialFunction& u);
double h1_norm(const RadialFunction& u);
double lq_norm(const RadialFunction& u, double q);

/// u_tau(r) = u(r / tau) by linear interpolation, zero beyond the grid radius.
RadialFunction dilate(const RadialFunction& u, double tau);

/// |u(R)| / max |u|; zero for the zero profile.
double truncation_ratio(const RadialFunction& u);

/// CSV with header `r,u`, 17 significant digits.
void write_profile_csv(std::ostream& out, const RadialFunction& u);
RadialFunction read_profile_csv(std::istream& in, int dimension);

}  // namespace choquard
