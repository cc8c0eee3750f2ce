#include "mcao/rounding.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mcao {

namespace {
constexpr double kSnap = 1e-12;

double snap(double v) {
    if (v < kSnap) return 0.0;
    if (v > 1.0 - kSnap) return 1.0;
    return v;
}

bool fractional(double v) { return v > 0.0 && v < 1.0; }
}  // namespace

std::vector<int> gkps_round(const std::vector<double>& zin, Rng& rng) {
    const std::size_t N = zin.size();
    std::vector<double> z(N);
    double total = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        if (!(zin[i] >= -kSnap && zin[i] <= 1.0 + kSnap))
            throw std::invalid_argument("gkps_round: weight " + std::to_string(zin[i]) + " outside [0,1]");
        z[i] = snap(zin[i]);
        total += zin[i];
    }
    // Pairwise transfers between the two lowest-index fractional entries.
    // Each transfer leaves the pair sum and both expectations unchanged and
    // makes at least one of the two integral.
    std::size_t a = 0;
    while (a < N && !fractional(z[a])) ++a;
    std::size_t b = a + 1;
    while (true) {
        while (b < N && !fractional(z[b])) ++b;
        if (a >= N || b >= N) break;
        double up = std::min(1.0 - z[a], z[b]);    // a gains, b loses
        double down = std::min(z[a], 1.0 - z[b]);  // a loses, b gains
        if (uniform01(rng) < down / (up + down)) {
            z[a] += up;
            z[b] -= up;
        } else {
            z[a] -= down;
            z[b] += down;
        }
        z[a] = snap(z[a]);
        z[b] = snap(z[b]);
        if (!fractional(z[a])) {
            if (fractional(z[b])) {
                a = b;
            } else {
                a = b + 1;
                while (a < N && !fractional(z[a])) ++a;
            }
            b = a + 1;
        } else {
            ++b;
        }
    }
    std::vector<int> Z(N);
    for (std::size_t i = 0; i < N; ++i) {
        if (fractional(z[i]))
            Z[i] = uniform01(rng) < z[i] ? 1 : 0;
        else
            Z[i] = z[i] >= 1.0 ? 1 : 0;
    }
    long sum = 0;
    for (int v : Z) sum += v;
    if (double(sum) > std::ceil(total - 1e-9) + 1e-9) throw std::logic_error("gkps_round: degree preservation violated");
    return Z;
}

std::vector<int> gkps_round(const std::vector<double>& z, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0);
    return gkps_round(z, rng);
}

}  // namespace mcao
