#pragma once

/// \file riesz.hpp
/// \brief Riesz potential I_alpha * v restricted to radial functions.

#include "choquard/grid.hpp"
#include "choquard/specfun.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <span>
#include <vector>

namespace choquard {

/// k(r, s) = A_alpha(N) |S^{N-2}| int_0^pi (r^2 + s^2 - 2 r s cos t)^{(alpha-N)/2} sin^{N-2} t dt.
/// (I_alpha * v)(r) = int_0^inf k(r, s) v(s) s^{N-1} ds for radial v; for N = 3, alpha = 2
/// this is 1 / max(r, s). Requires r + s > 0 and r != s.
double radial_kernel(const DimensionPair& d, double r, double s);

struct KernelOptions {
    unsigned threads = 1;
    /// Halvings toward the singular point in the diagonal self-cell.
    int self_cell_depth = 16;
};

class RieszOperator {
public:
    static RieszOperator build(const DimensionPair& d, GridPtr grid, const KernelOptions& opts = {});

    /// Loads a kernel written by save(); falls back to build() (and saves) when the
    /// file is missing or was produced for a different (N, alpha, grid).
    static RieszOperator cached(const DimensionPair& d, GridPtr grid, const std::filesystem::path& file,
                                const KernelOptions& opts = {});
    void save(const std::filesystem::path& file) const;

    const DimensionPair& dims() const { return d_; }
    const RadialGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    /// Row-major weighted kernel W with (I_alpha * v)(r_i) ~ sum_j W_ij v_j.
    const Eigen::MatrixXd& weighted() const { return w_; }

    RadialFunction apply(const RadialFunction& v) const;
    /// Raw product on a value array of matching length.
    std::vector<double> apply(std::span<const double> v) const;

    /// int (I_alpha * u) v.
    double pairing(const RadialFunction& u, const RadialFunction& v) const;

private:
    RieszOperator(DimensionPair d, GridPtr grid, Eigen::MatrixXd w) : d_(d), grid_(std::move(grid)), w_(std::move(w)) {}

    DimensionPair d_;
    GridPtr grid_;
    Eigen::MatrixXd w_;
};

/// A_alpha^{-1} pairing(u, u) / ||u||_{2N/(N+alpha)}^2; bounded by C_alpha(N).
double hls_quotient(const RieszOperator& op, const RadialFunction& u);

struct OptimizerRatio {
    double ratio = 0;
    /// Fraction of ||h||_{2N/(N+alpha)}^{2N/(N+alpha)} lying beyond the grid radius.
    double tail_mass = 0;
};

/// hls_quotient of h(r) = (1 + r^2)^{-(N+alpha)/2}, the extremal of the sharp HLS inequality.
/// Throws std::runtime_error when the grid truncates more than `max_tail` of h.
OptimizerRatio hls_optimizer_ratio(const RieszOperator& op, double max_tail = 1e-4);

}  // namespace choquard
