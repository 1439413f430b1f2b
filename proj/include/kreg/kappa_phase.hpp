#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "kreg/batch.hpp"
#include "kreg/check_report.hpp"
#include "kreg/linalg.hpp"

namespace kreg {

/// Deformation and Kepler constants. gamma is derived (gamma = alpha - 1) and
/// never stored, so the realization constraint cannot be violated.
struct KappaParams {
    double a = 0.0;
    double alpha = 1.0;
    double beta = 0.0;
    double p0 = 1.0;
    double m = 1.0;
    double C = 1.0;

    double gamma() const noexcept { return alpha - 1.0; }
    /// Spatial scale factor 1 + alpha a p0 of the reduced realization.
    double lambda() const noexcept { return 1.0 + alpha * a * p0; }

    /// Throws InvalidParams unless a >= 0, m > 0, C > 0 and all finite.
    void validate() const;

    /// Validated construction; p0 defaults to m (rest-mass value).
    static KappaParams make(double a, double alpha, double m = 1.0, double C = 1.0, double beta = 0.0);
};

enum class Chart { Commutative, KappaRealized, Kepler, SpherePulled };

std::string_view to_string(Chart chart) noexcept;
Chart chart_from_string(std::string_view name);

/// (position, momentum) in d = 2 or 3 dimensions, tagged with its chart.
class PhasePoint {
public:
    PhasePoint(Vec position, Vec momentum, Chart chart);

    const Vec& position() const noexcept { return position_; }
    const Vec& momentum() const noexcept { return momentum_; }
    Chart chart() const noexcept { return chart_; }
    Eigen::Index dim() const noexcept { return position_.size(); }

    /// Flat (position, momentum) vector, the layout used by the bracket engine.
    Vec flat() const { return concat(position_, momentum_); }
    static PhasePoint from_flat(const Vec& z, Chart chart);

    /// Throws ChartMismatch if this point is not in `expected`.
    const PhasePoint& require(Chart expected) const;

    /// Componentwise difference; both points must share a chart.
    double max_abs_diff(const PhasePoint& other) const;

private:
    Vec position_;
    Vec momentum_;
    Chart chart_;
};

/// Full (d+1)-dimensional point: index 0 holds x^0 and p^0.
struct FullPhasePoint {
    Vec x;
    Vec p;

    Vec flat() const { return concat(x, p); }
    static FullPhasePoint from_flat(const Vec& z);
};

/// Signature used for x.p and p.p inside the time components. (a.p) is always a p^0.
enum class Metric { Euclidean, MostlyMinus, MostlyPlus };

struct RealizationCoefficients {
    double alpha = 1.0;
    double beta = 0.0;
    double gamma = 0.0;
};

PhasePoint realize_spatial(const PhasePoint& pt, const KappaParams& params);
/// Inverse of realize_spatial (division by lambda). Throws InvalidParams if lambda vanishes.
PhasePoint unrealize_spatial(const PhasePoint& pt, const KappaParams& params);

FullPhasePoint realize_full(const FullPhasePoint& fp, double a, const RealizationCoefficients& c,
                            Metric metric = Metric::Euclidean);
FullPhasePoint realize_full(const FullPhasePoint& fp, const KappaParams& params, Metric metric = Metric::Euclidean);

/// Bracket relations of the realization at `n_points` seeded random points:
/// spatial (p0 a constant) and full (p^0 a phase variable) interpretations.
std::vector<CheckReport> bracket_audit(const KappaParams& params, std::size_t n_points, std::uint64_t seed,
                                       batch::Exec exec = batch::default_exec());

}  // namespace kreg
