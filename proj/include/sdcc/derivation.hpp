#pragma once

// Discrete factors from raw features: quantile bins, predicate factors and
// grid regions over a min-max scaled two-component PCA projection.

#include <array>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sdcc/error.hpp"

namespace sdcc {

/// Cut points at fixed quantile levels. Bin i covers [edges[i-1], edges[i]),
/// bin 0 is unbounded below and the last bin is unbounded above.
struct QuantileBinning {
    std::vector<double> levels;
    std::vector<double> edges;

    std::size_t bin_count() const noexcept { return edges.size() + 1; }
};

/// Linear-interpolation quantiles at rank (n-1)*q of the sorted sample.
QuantileBinning fit_quantile_bins(std::span<const double> values, std::span<const double> levels);

std::size_t assign_bin(double x, const QuantileBinning& binning);

struct PredicateFactor {
    std::string name;
    std::string source;              // column the labels come from
    std::vector<std::string> domain; // admissible source labels
    std::set<std::string> true_set;
};

/// label -> (label in true_set); an unknown label is a Validation error.
std::vector<bool> apply_predicate(std::span<const std::string> labels, const PredicateFactor& spec);

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

struct Projection2D {
    Eigen::VectorXd mean;                // d
    Eigen::Matrix<double, Eigen::Dynamic, 2> components; // d x 2, orthonormal columns
    std::array<double, 2> explained_variance{};
    std::array<double, 2> axis_min{};
    std::array<double, 2> axis_max{};

    Eigen::Index dimension() const noexcept { return mean.size(); }
};

/// Top two principal components of the sample covariance (rows are samples).
///
/// Each component is sign-normalised so its largest-magnitude coordinate is
/// positive, ties going to the lowest index. Throws DegenerateProjection when
/// the two components are not uniquely determined: equal leading eigenvalues,
/// or, for d > 2, a second eigenvalue tied with the third.
Projection2D fit_projection(const Eigen::Ref<const Eigen::MatrixXd>& embeddings);

/// Projects rows onto the fitted components and min-max scales each axis
/// with the fitted range. Points outside that range are clamped into [0, 1];
/// an axis whose fitted min equals its max maps to 0.5.
std::vector<Point2> project_and_scale(const Eigen::Ref<const Eigen::MatrixXd>& embeddings,
                                      const Projection2D& projection);

/// n x n equal cells over the unit square, ids row-major from the origin.
struct GridPartition {
    std::size_t cells_per_axis = 5;

    std::size_t region_count() const noexcept { return cells_per_axis * cells_per_axis; }
};

/// floor(y*n)*n + floor(x*n), with coordinates equal to 1.0 kept in the last
/// cell. Coordinates outside [0, 1] are a Validation error.
std::size_t region_of(Point2 point, const GridPartition& grid);

} // namespace sdcc
