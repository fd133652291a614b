#ifndef SONINE_FIT_HPP
#define SONINE_FIT_HPP

#include <cmath>
#include <span>
#include <vector>

#include "sonine/errors.hpp"

namespace sonine {

/// Least-squares slope of y against x.
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs >= 2 matched points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw DomainError("slope fit needs distinct abscissae");
    return sxy / sxx;
}

/// Convergence order p in err ~ C step^p, fitted in log-log coordinates.
inline double fit_order(std::span<const double> steps, std::span<const double> errors) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        lx.push_back(std::log(steps[i]));
        ly.push_back(std::log(errors[i]));
    }
    return fit_slope(lx, ly);
}

}  // namespace sonine

#endif  // SONINE_FIT_HPP
