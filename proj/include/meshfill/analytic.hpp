#pragma once

namespace meshfill {

/// Uniform-capacity phase model. S in bytes, u (client) and d (server) in
/// bytes/second, N nodes.
struct PhaseParams {
    double S = 5e9;
    double u = 1.5e6;
    double d = 1.5e6;
    double N = 100;

    /// Throws DomainError unless every field is strictly positive.
    void validate() const;
};

/// d * exp(d t / S). Throws DomainError for t < 0.
double initial_bandwidth(const PhaseParams& p, double t);

/// (S/d) ln(uN/(d+u)). Throws DomainError when uN/(d+u) < 1.
double t_prime(const PhaseParams& p);

/// Exponential decay after the peak: (ud/(u+d)) N exp(-(u/S)(t - t')).
/// Throws DomainError for t < t'.
double final_bandwidth(const PhaseParams& p, double t);

/// d u N / (d + u).
double peak_bandwidth(const PhaseParams& p);

/// t' + S/u.
double fill_time(const PhaseParams& p);

/// min(sum_d, sum_u). Throws DomainError on negative input.
double system_bandwidth_bound(double sum_d, double sum_u);

/// Shape of B(t) after t' used when solving S N = integral of B.
enum class FinalPhase {
    decay,     // final_bandwidth
    constant,  // peak_bandwidth held until the end
};

/// Integral of B over [0, T] by composite Simpson, B = initial_bandwidth
/// before t' and the chosen final phase after it.
double integrated_volume(const PhaseParams& p, double T, FinalPhase phase);

/// Smallest T with integrated_volume(T) = S N, found by bisection.
/// Throws DomainError when the volume never reaches S N (the decay form
/// saturates at S (N - 1)).
double solve_fill_time(const PhaseParams& p, FinalPhase phase);

}  // namespace meshfill
