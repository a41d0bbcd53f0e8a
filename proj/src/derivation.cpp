#include "sdcc/derivation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <Eigen/Eigenvalues>

namespace sdcc {

namespace {

constexpr double kEigenTieTolerance = 1e-9;
constexpr double kDegenerateAxisTolerance = 1e-12;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x))
        throw Error(ErrorKind::Ingestion, std::string("non-finite ") + what);
}

// Largest-|loading| coordinate positive; near-equal magnitudes resolve to
// the lowest index.
void normalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
    const double top = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) >= top - 1e-12) {
            if (v[i] < 0)
                v = -v;
            return;
        }
    }
}

// Shared by fitting and transforming so the fitted extremes reproduce
// bit-for-bit.
double project_row(const Eigen::Ref<const Eigen::MatrixXd>& rows, Eigen::Index r,
                   const Projection2D& p, int axis) {
    double acc = 0.0;
    for (Eigen::Index c = 0; c < p.mean.size(); ++c)
        acc += (rows(r, c) - p.mean[c]) * p.components(c, axis);
    return acc;
}

} // namespace

QuantileBinning fit_quantile_bins(std::span<const double> values, std::span<const double> levels) {
    if (values.empty())
        throw Error(ErrorKind::Fit, "cannot fit quantile bins on an empty sample");
    if (levels.empty())
        throw Error(ErrorKind::Validation, "at least one quantile level is required");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > 0.0 && levels[i] < 1.0))
            throw Error(ErrorKind::Validation, "quantile levels must lie in (0, 1)");
        if (i > 0 && !(levels[i] > levels[i - 1]))
            throw Error(ErrorKind::Validation, "quantile levels must be strictly ascending");
    }
    for (double v : values)
        require_finite(v, "value in quantile fitting sample");

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();

    QuantileBinning out;
    out.levels.assign(levels.begin(), levels.end());
    out.edges.reserve(levels.size());
    for (double q : levels) {
        const double rank = static_cast<double>(n - 1) * q;
        const auto lo = static_cast<std::size_t>(std::floor(rank));
        const std::size_t hi = std::min(lo + 1, n - 1);
        const double frac = rank - static_cast<double>(lo);
        out.edges.push_back(sorted[lo] + frac * (sorted[hi] - sorted[lo]));
    }
    return out;
}

std::size_t assign_bin(double x, const QuantileBinning& binning) {
    require_finite(x, "value passed to assign_bin");
    const auto it = std::upper_bound(binning.edges.begin(), binning.edges.end(), x);
    return static_cast<std::size_t>(it - binning.edges.begin());
}

std::vector<bool> apply_predicate(std::span<const std::string> labels, const PredicateFactor& spec) {
    const std::unordered_set<std::string> domain(spec.domain.begin(), spec.domain.end());
    for (const auto& t : spec.true_set) {
        if (!domain.contains(t))
            throw Error(ErrorKind::Validation, "predicate '" + spec.name + "' true-set label '" +
                                                   t + "' is not in the source domain");
    }
    std::vector<bool> out;
    out.reserve(labels.size());
    for (const auto& label : labels) {
        if (!domain.contains(label))
            throw Error(ErrorKind::Validation, "predicate '" + spec.name + "': unknown " +
                                                   spec.source + " label '" + label + "'");
        out.push_back(spec.true_set.contains(label));
    }
    return out;
}

Projection2D fit_projection(const Eigen::Ref<const Eigen::MatrixXd>& embeddings) {
    const Eigen::Index n = embeddings.rows();
    const Eigen::Index d = embeddings.cols();
    if (n < 3)
        throw Error(ErrorKind::Fit, "projection needs at least 3 samples");
    if (d < 2)
        throw Error(ErrorKind::Fit, "projection needs at least 2 dimensions");
    if (!embeddings.allFinite())
        throw Error(ErrorKind::Ingestion, "non-finite entry in embedding matrix");

    Projection2D p;
    p.mean = embeddings.colwise().mean().transpose();
    const Eigen::MatrixXd centered = embeddings.rowwise() - p.mean.transpose();
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::DegenerateProjection, "covariance eigendecomposition failed");
    const auto& evals = solver.eigenvalues(); // ascending
    const double l1 = evals[d - 1];
    const double l2 = evals[d - 2];
    if (!(l1 > 0.0))
        throw Error(ErrorKind::DegenerateProjection, "embeddings have zero variance");
    if (l1 - l2 <= kEigenTieTolerance * l1)
        throw Error(ErrorKind::DegenerateProjection,
                    "leading eigenvalues are tied; first component is not unique");
    if (d > 2 && l2 - evals[d - 3] <= kEigenTieTolerance * l1)
        throw Error(ErrorKind::DegenerateProjection,
                    "second and third eigenvalues are tied; second component is not unique");

    p.components.resize(d, 2);
    p.components.col(0) = solver.eigenvectors().col(d - 1).normalized();
    Eigen::VectorXd second = solver.eigenvectors().col(d - 2);
    second -= second.dot(p.components.col(0)) * p.components.col(0);
    p.components.col(1) = second.normalized();
    normalize_sign(p.components.col(0));
    normalize_sign(p.components.col(1));
    p.explained_variance = {l1, std::max(l2, 0.0)};

    for (int axis = 0; axis < 2; ++axis) {
        double lo = project_row(embeddings, 0, p, axis);
        double hi = lo;
        for (Eigen::Index r = 1; r < n; ++r) {
            const double v = project_row(embeddings, r, p, axis);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        p.axis_min[axis] = lo;
        p.axis_max[axis] = hi;
    }
    // A second axis whose spread is rounding noise relative to the first is
    // collapsed so it scales to the midpoint.
    const double span0 = p.axis_max[0] - p.axis_min[0];
    if (p.axis_max[1] - p.axis_min[1] <= kDegenerateAxisTolerance * span0)
        p.axis_max[1] = p.axis_min[1];
    return p;
}

std::vector<Point2> project_and_scale(const Eigen::Ref<const Eigen::MatrixXd>& embeddings,
                                      const Projection2D& projection) {
    if (embeddings.cols() != projection.dimension())
        throw Error(ErrorKind::Validation,
                    "embedding dimension " + std::to_string(embeddings.cols()) +
                        " does not match projection dimension " +
                        std::to_string(projection.dimension()));
    if (!embeddings.allFinite())
        throw Error(ErrorKind::Ingestion, "non-finite entry in embedding matrix");

    const auto scale = [&](double v, int axis) {
        const double lo = projection.axis_min[axis];
        const double hi = projection.axis_max[axis];
        if (!(hi > lo))
            return 0.5;
        return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
    };

    std::vector<Point2> out;
    out.reserve(static_cast<std::size_t>(embeddings.rows()));
    for (Eigen::Index r = 0; r < embeddings.rows(); ++r) {
        out.push_back({scale(project_row(embeddings, r, projection, 0), 0),
                       scale(project_row(embeddings, r, projection, 1), 1)});
    }
    return out;
}

std::size_t region_of(Point2 point, const GridPartition& grid) {
    if (grid.cells_per_axis == 0)
        throw Error(ErrorKind::Validation, "grid needs at least one cell per axis");
    const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(point.x) || !in_unit(point.y))
        throw Error(ErrorKind::Validation, "grid coordinates must lie in [0, 1]");
    const std::size_t n = grid.cells_per_axis;
    const auto cell = [n](double v) {
        return std::min(static_cast<std::size_t>(std::floor(v * static_cast<double>(n))), n - 1);
    };
    return cell(point.y) * n + cell(point.x);
}

} // namespace sdcc
