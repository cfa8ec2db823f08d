#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qvdp/params.hpp"
#include "qvdp/types.hpp"

// Euler-Maruyama for the semiclassical Langevin equations (units of 1/gamma1 for dt).
namespace qvdp::langevin {

enum class Scheme { EulerMaruyama };
enum class Process { Phase, Intensity, Amplitude };
enum class Execution { Parallel, Serial };

const char* to_string(Process process);

struct LangevinConfig {
    double dt = 1e-3;
    long n_steps = 1000;
    int n_trajectories = 100;
    std::uint64_t seed = 1;
    int record_every = 1;
    bool noise = true;
    Scheme scheme = Scheme::EulerMaruyama;
    double initial = 0.0;         // phi(0) or dN(0)
    Complex initial_alpha = 0.0;  // amplitude runs

    // dt > 0, dt <= 1e-3 max(1, gamma1/Omega) / gamma1, counts positive.
    void validate(const ModelParams& params) const;
};

double max_dt(const ModelParams& params);

struct TrajectoryEnsemble {
    Process process = Process::Phase;
    ModelParams params;
    LangevinConfig config;
    std::vector<double> times;
    std::vector<std::vector<double>> paths;           // phase (unwrapped) or dN
    std::vector<std::vector<Complex>> amplitude_paths; // amplitude runs
    std::vector<std::uint64_t> stream_ids;            // trajectory index of each RNG stream

    int size() const { return static_cast<int>(stream_ids.size()); }
};

// RNG stream of trajectory `index`: mt19937_64 seeded through seed_seq from (seed, index).
std::uint64_t stream_first_draw(std::uint64_t seed, std::uint64_t index);

TrajectoryEnsemble simulate_phase(const ModelParams& params, const LangevinConfig& config,
                                  Execution exec = Execution::Parallel);
TrajectoryEnsemble simulate_intensity(const ModelParams& params, const LangevinConfig& config,
                                      Execution exec = Execution::Parallel);
TrajectoryEnsemble simulate_amplitude(const ModelParams& params, const LangevinConfig& config,
                                      Execution exec = Execution::Parallel);

struct Estimate {
    std::string name;
    double value = 0.0;
    double std_error = 0.0;
};

struct JumpRateEstimate {
    long left_jumps = 0;
    long right_jumps = 0;
    double total_time = 0.0;
    double jump_rate = 0.0;          // jumps per unit time per trajectory
    double jump_rate_stderr = 0.0;
    double relaxation_rate = 0.0;    // 2 * jump_rate, comparable with Gamma_gap
    double relaxation_stderr = 0.0;
    double directionality = 0.0;     // minority / majority counts
    double predicted_suppression = 0.0;
    bool low_statistics = false;     // fewer than 100 jumps
};

// A jump is registered when the phase enters the core (|phi - phi_min| < core_radius)
// of a different well than the last one visited.
JumpRateEstimate estimate_jump_rate(const TrajectoryEnsemble& ens, double core_radius = 0.2);

struct LifetimeEstimate {
    double rate = 0.0;
    double rate_stderr = 0.0;
    double fit_start = 0.0;
    double fit_end = 0.0;
    std::vector<double> times;
    std::vector<double> magnitude;  // |E e^{i phi(t)}|
};

// Exponential fit to |E e^{i phi}| while it stays above max(floor, 5/sqrt(N)).
LifetimeEstimate estimate_oscillation_lifetime(const TrajectoryEnsemble& ens, double t_skip = 0.0,
                                               double floor = 0.05);

// Ensemble variance averaged over times >= t_min.
Estimate estimate_stationary_variance(const TrajectoryEnsemble& ens, double t_min);
// 1/rate of the exponential decay of the stationary autocorrelation.
Estimate estimate_autocorrelation_time(const TrajectoryEnsemble& ens, double t_min, double max_lag);
// Slope of Var[phi(t) - phi(0)] against t.
Estimate estimate_phase_diffusion(const TrajectoryEnsemble& ens);
// Var of the one-step residual phi_{k+1} - phi_k - f(phi_k) dt, divided by dt; needs record_every == 1.
Estimate estimate_noise_intensity(const TrajectoryEnsemble& ens);
// Time-and-ensemble mean of |alpha|^2 over t >= t_min.
Estimate estimate_mean_intensity(const TrajectoryEnsemble& ens, double t_min);
// Histogram of arg(alpha) in [0, 2 pi) over t >= t_min; counts per bin.
std::vector<double> phase_histogram(const TrajectoryEnsemble& ens, int bins, double t_min);

}  // namespace qvdp::langevin
