#include "meshfill/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "meshfill/error.hpp"

namespace meshfill {

namespace {

double simpson(auto&& f, double a, double b, int intervals) {
    if (b <= a) return 0.0;
    const int m = intervals + intervals % 2;
    const double h = (b - a) / m;
    double sum = f(a) + f(b);
    for (int k = 1; k < m; ++k) sum += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

constexpr int kIntervals = 2000;

}  // namespace

void PhaseParams::validate() const {
    if (!(S > 0.0 && u > 0.0 && d > 0.0 && N > 0.0))
        throw DomainError("phase parameters must all be positive");
}

double initial_bandwidth(const PhaseParams& p, double t) {
    p.validate();
    if (t < 0.0) throw DomainError("initial_bandwidth: t must be non-negative");
    return p.d * std::exp(p.d / p.S * t);
}

double t_prime(const PhaseParams& p) {
    p.validate();
    const double ratio = p.u * p.N / (p.d + p.u);
    if (ratio < 1.0) throw DomainError("t_prime: uN/(d+u) is below 1");
    return p.S / p.d * std::log(ratio);
}

double final_bandwidth(const PhaseParams& p, double t) {
    const double tp = t_prime(p);
    if (t < tp) throw DomainError("final_bandwidth: t precedes t'");
    return peak_bandwidth(p) * std::exp(-(p.u / p.S) * (t - tp));
}

double peak_bandwidth(const PhaseParams& p) {
    p.validate();
    return p.d * p.u * p.N / (p.d + p.u);
}

double fill_time(const PhaseParams& p) { return t_prime(p) + p.S / p.u; }

double system_bandwidth_bound(double sum_d, double sum_u) {
    if (sum_d < 0.0 || sum_u < 0.0) throw DomainError("system_bandwidth_bound: negative capacity");
    return std::min(sum_d, sum_u);
}

double integrated_volume(const PhaseParams& p, double T, FinalPhase phase) {
    const double tp = t_prime(p);
    const auto rise = [&](double t) { return initial_bandwidth(p, t); };
    double v = simpson(rise, 0.0, std::min(T, tp), kIntervals);
    if (T > tp) {
        if (phase == FinalPhase::constant) {
            const double peak = peak_bandwidth(p);
            v += simpson([peak](double) { return peak; }, tp, T, 2);
        } else {
            v += simpson([&](double t) { return final_bandwidth(p, t); }, tp, T, kIntervals);
        }
    }
    return v;
}

double solve_fill_time(const PhaseParams& p, FinalPhase phase) {
    const double target = p.S * p.N;
    double lo = 0.0;
    double hi = std::max(t_prime(p), p.S / p.u);
    // The decay tail is negligible after a few dozen time constants.
    const double limit = t_prime(p) + 60.0 * p.S / p.u;
    while (integrated_volume(p, hi, phase) < target) {
        if (hi >= limit) throw DomainError("solve_fill_time: volume never reaches S*N");
        hi = std::min(2.0 * hi, limit);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (integrated_volume(p, mid, phase) < target ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace meshfill
