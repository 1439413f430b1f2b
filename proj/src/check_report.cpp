#include "kreg/check_report.hpp"

#include <algorithm>
#include <cmath>

namespace kreg {

CheckReport summarize(std::string name, std::span<const double> residuals, double tolerance)
{
    CheckReport r;
    r.identity_name = std::move(name);
    r.n_points = residuals.size();
    r.tolerance = tolerance;
    bool finite = true;
    double sum = 0.0;
    for (double v : residuals) {
        if (!std::isfinite(v)) {
            finite = false;
            continue;
        }
        r.max_residual = std::max(r.max_residual, v);
        sum += v;
    }
    r.mean_residual = residuals.empty() ? 0.0 : sum / static_cast<double>(residuals.size());
    if (!finite) {
        r.max_residual = INFINITY;
    }
    r.pass = finite && !residuals.empty() && r.max_residual < tolerance;
    return r;
}

bool all_pass(std::span<const CheckReport> reports)
{
    return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });
}

}  // namespace kreg
