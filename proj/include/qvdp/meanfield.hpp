#pragma once

#include <utility>
#include <vector>

#include "qvdp/params.hpp"
#include "qvdp/types.hpp"

namespace qvdp::meanfield {

struct MeanFieldState {
    Complex alpha;

    static MeanFieldState polar(double intensity, double phase);
    double intensity() const { return std::norm(alpha); }
    double phase() const;  // in [0, 2 pi)
};

// alpha' = -i delta alpha + (gamma1/2) alpha - gamma2 |alpha|^2 alpha - 2 eta conj(alpha)
Complex rhs(Complex alpha, const ModelParams& params);

struct Trajectory {
    std::vector<double> t;
    std::vector<Complex> alpha;
};

// Fixed-step RK4. dt must not exceed 1e-2 / gamma1.
Trajectory integrate(const MeanFieldState& initial, const ModelParams& params, double t_end, double dt,
                     int record_every = 1);

enum class Regime { LimitCycle, Bistable, Critical };

struct Bifurcation {
    Regime regime;
    double eta_c = 0.0;
    double omega = 0.0;                       // limit cycle only
    std::pair<Complex, Complex> fixed_points; // bistable only
};

Bifurcation classify(const ModelParams& params);
const char* to_string(Regime regime);

double limit_cycle_frequency(const ModelParams& params);
// Period of phi' = -delta + 2 eta sin(2 phi) over one 2 pi winding, by RK4.
double phase_period_numeric(const ModelParams& params, double dt);

std::pair<Complex, Complex> fixed_points(const ModelParams& params);

double average_intensity(const ModelParams& params);
// Time average of N over one period of the integrated cycle, after transients.
double average_intensity_numeric(const ModelParams& params, double dt);

double phase_potential(double phi, const ModelParams& params);
double phase_potential_d1(double phi, const ModelParams& params);
double phase_potential_d2(double phi, const ModelParams& params);

struct PotentialExtrema {
    std::vector<double> minima;  // in [0, 2 pi), ascending
    std::vector<double> maxima;
};
PotentialExtrema phase_extrema(const ModelParams& params);

}  // namespace qvdp::meanfield
