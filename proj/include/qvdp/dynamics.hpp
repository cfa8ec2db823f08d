#pragma once

#include <string>
#include <vector>

#include "qvdp/fock.hpp"
#include "qvdp/params.hpp"
#include "qvdp/spectral.hpp"
#include "qvdp/types.hpp"

namespace qvdp::dynamics {

enum class Frame { Rotating, Lab, LabStroboscopic };
enum class Backend { Auto, Spectral, RungeKutta };
const char* to_string(Frame frame);
const char* to_string(Backend backend);

struct ObservableTrajectory {
    std::vector<double> times;
    std::vector<Complex> values;  // <a>(t)
    Frame frame = Frame::Rotating;
    ModelParams params;
    std::string initial_state;
};

struct Evolution {
    std::vector<double> times;
    std::vector<CMatrix> states;  // only when requested
    ObservableTrajectory amplitude;
    double max_trace_error = 0.0;
    Backend backend = Backend::RungeKutta;
};

struct EvolveOptions {
    Backend backend = Backend::Auto;
    double dt = 0.0;  // RK4 step; 0 picks a stable step from the generator bound
    bool keep_states = false;
    std::string initial_state = "custom";
};

Complex expect_a(const CMatrix& rho);

// Largest stable RK4 step for the rotating generator (crude spectral-radius bound).
double stable_rk4_step(const ModelParams& params, int d);

Evolution evolve_rotating_rk4(const CMatrix& rho0, const ModelParams& params, const std::vector<double>& t_grid,
                              const EvolveOptions& opts = {});
// rho(t) = sum_j Tr[l_j^dag rho0] r_j e^{lambda_j t}; needs every mode with vectors.
Evolution evolve_rotating_spectral(const CMatrix& rho0, const SpectralDecomposition& dec,
                                   const std::vector<double>& t_grid, const EvolveOptions& opts = {});
// Spectral when dec is given, complete and biorthonormal (and not overridden), RK4 otherwise.
Evolution evolve_rotating(const DensityMatrix& rho0, const ModelParams& params, const SpectralDecomposition* dec,
                          const std::vector<double>& t_grid, const EvolveOptions& opts = {});

// RK4 with H_L(t) at the stage times. dt must satisfy dt <= T/200.
Evolution evolve_lab(const DensityMatrix& rho0, const ModelParams& params, const std::vector<double>& t_grid,
                     double dt, const EvolveOptions& opts = {});

// P^n rho P^n
CMatrix stroboscopic_map(const CMatrix& rho_rotating, int n);
DensityMatrix stroboscopic_map(const DensityMatrix& rho_rotating, int n);

// <a>_L at t = nT, n = 0..n_max, via rotating RK4 evolution and the parity map.
ObservableTrajectory stroboscopic_series(const DensityMatrix& rho0, const ModelParams& params, int n_max,
                                         const EvolveOptions& opts = {});

struct OccupationRow {
    double n_ex = 0.0;
    double eta_ratio = 0.0;
    int cutoff = 0;
    double occupation_ratio = 0.0;  // <n>_ss / n_ex
    double meanfield_ratio = 0.0;   // 1 below eta_c, N_ss/n_ex above
};

OccupationRow stationary_occupation(double n_ex, double eta_ratio, double delta_ratio, int cutoff = 0);
std::vector<OccupationRow> stationary_occupation_scan(const std::vector<double>& n_ex_values,
                                                      const std::vector<double>& eta_ratios, double delta_ratio,
                                                      int cutoff = 0);

}  // namespace qvdp::dynamics
