#include <cmath>
#include <stdexcept>

#include "mcao/attenuate.hpp"

namespace mcao {

GammaSchedule gamma_schedule(int T) {
    if (T < 1) throw std::invalid_argument("gamma_schedule: T must be positive");
    GammaSchedule g;
    g.T = T;
    g.gamma.resize(std::size_t(T) + 1);
    g.gamma[0] = 1.0;
    for (int t = 1; t <= T; ++t) g.gamma[t] = g.gamma[t - 1] + std::expm1(-g.gamma[t - 1]) / T;
    return g;
}

double GammaSchedule::ratio() const {
    double s = 0.0;
    for (int t = 0; t < T; ++t) s += -std::expm1(-gamma[t]);
    return s / T;
}

double h_limit(double z) { return std::log((std::exp(1.0) - 1.0) * std::exp(-z) + 1.0); }

}  // namespace mcao
