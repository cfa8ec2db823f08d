#include "qvdp/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qvdp/error.hpp"

namespace qvdp::meanfield {

namespace {

double wrap_2pi(double phi) {
    double w = std::fmod(phi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w;
}

}  // namespace

MeanFieldState MeanFieldState::polar(double intensity, double phase) {
    if (intensity < 0.0) throw Error(ErrorKind::InvalidArgument, "intensity must be >= 0");
    return {std::polar(std::sqrt(intensity), phase)};
}

double MeanFieldState::phase() const { return wrap_2pi(std::arg(alpha)); }

Complex rhs(Complex alpha, const ModelParams& p) {
    return -kI * p.delta * alpha + 0.5 * p.gamma1 * alpha - p.gamma2 * std::norm(alpha) * alpha -
           2.0 * p.eta * std::conj(alpha);
}

Trajectory integrate(const MeanFieldState& initial, const ModelParams& p, double t_end, double dt,
                     int record_every) {
    p.validate();
    if (!(dt > 0.0) || dt > 1e-2 / p.gamma1 * (1.0 + 1e-12))
        throw Error(ErrorKind::InvalidArgument, "dt must lie in (0, 1e-2/gamma1]");
    if (t_end < 0.0 || record_every < 1) throw Error(ErrorKind::InvalidArgument, "bad t_end or record stride");
    const long steps = static_cast<long>(std::llround(t_end / dt));
    const double guard = 10.0 * std::max(p.n_ex(), initial.intensity()) + 10.0;

    Trajectory tr;
    Complex a = initial.alpha;
    tr.t.push_back(0.0);
    tr.alpha.push_back(a);
    for (long k = 1; k <= steps; ++k) {
        const Complex k1 = rhs(a, p);
        const Complex k2 = rhs(a + 0.5 * dt * k1, p);
        const Complex k3 = rhs(a + 0.5 * dt * k2, p);
        const Complex k4 = rhs(a + dt * k3, p);
        a += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(std::norm(a)) || std::norm(a) > guard)
            throw Error(ErrorKind::Instability, "mean-field amplitude left the guard at t=" + std::to_string(k * dt));
        if (k % record_every == 0 || k == steps) {
            tr.t.push_back(k * dt);
            tr.alpha.push_back(a);
        }
    }
    return tr;
}

const char* to_string(Regime regime) {
    switch (regime) {
        case Regime::LimitCycle: return "limit_cycle";
        case Regime::Bistable: return "bistable";
        case Regime::Critical: return "critical";
    }
    return "unknown";
}

Bifurcation classify(const ModelParams& p) {
    Bifurcation b;
    b.eta_c = p.eta_c();
    const double disc = p.delta * p.delta - 4.0 * p.eta * p.eta;
    if (disc > 0.0) {
        b.regime = Regime::LimitCycle;
        b.omega = std::sqrt(disc);
    } else if (disc < 0.0) {
        b.regime = Regime::Bistable;
        b.fixed_points = fixed_points(p);
    } else {
        b.regime = Regime::Critical;
    }
    return b;
}

double limit_cycle_frequency(const ModelParams& p) {
    const double disc = p.delta * p.delta - 4.0 * p.eta * p.eta;
    if (!(disc > 0.0)) throw Error(ErrorKind::WrongRegime, "no limit cycle for eta >= eta_c");
    return std::sqrt(disc);
}

double phase_period_numeric(const ModelParams& p, double dt) {
    const double omega = limit_cycle_frequency(p);
    auto f = [&](double phi) { return -p.delta + 2.0 * p.eta * std::sin(2.0 * phi); };
    const double target = 2.0 * kPi;
    double phi = 0.0, t = 0.0;
    const long max_steps = static_cast<long>(100.0 * 2.0 * kPi / omega / dt) + 10;
    for (long k = 0; k < max_steps; ++k) {
        const double k1 = f(phi);
        const double k2 = f(phi + 0.5 * dt * k1);
        const double k3 = f(phi + 0.5 * dt * k2);
        const double k4 = f(phi + dt * k3);
        const double next = phi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (std::abs(next) >= target) {
            // Newton on the length tau of a partial RK4 step that lands on the target.
            double tau = dt * (target - std::abs(phi)) / (std::abs(next) - std::abs(phi));
            double phi_tau = phi;
            for (int it = 0; it < 50; ++it) {
                const double a1 = f(phi);
                const double a2 = f(phi + 0.5 * tau * a1);
                const double a3 = f(phi + 0.5 * tau * a2);
                const double a4 = f(phi + tau * a3);
                phi_tau = phi + tau / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
                const double err = std::abs(phi_tau) - target;
                const double slope = std::abs(f(phi_tau));
                const double step = err / slope;
                tau -= step;
                if (std::abs(step) < 1e-15 * (1.0 + t)) break;
            }
            return t + tau;
        }
        phi = next;
        t += dt;
    }
    throw Error(ErrorKind::NumericFailure, "phase did not complete a winding");
}

std::pair<Complex, Complex> fixed_points(const ModelParams& p) {
    const double disc = 4.0 * p.eta * p.eta - p.delta * p.delta;
    if (!(disc > 0.0)) throw Error(ErrorKind::WrongRegime, "fixed points need eta > eta_c");
    const double n_ss = p.gamma1 / (2.0 * p.gamma2) + std::sqrt(disc) / p.gamma2;
    const double phi_ss = 0.5 * (kPi - std::asin(p.delta / (2.0 * p.eta)));
    const Complex plus = std::polar(std::sqrt(n_ss), phi_ss);
    return {plus, -plus};
}

double average_intensity(const ModelParams& p) {
    limit_cycle_frequency(p);
    return p.gamma1 / (2.0 * p.gamma2);
}

double average_intensity_numeric(const ModelParams& p, double dt) {
    const double omega = limit_cycle_frequency(p);
    const double period = 2.0 * kPi / omega;
    // relax onto the cycle for 40/gamma1 first
    const double settle = 40.0 / p.gamma1;
    const Trajectory tr = integrate(MeanFieldState::polar(p.n_ex(), 0.0), p, settle + period, dt);
    // trapezoid over the final period
    double acc = 0.0, span = 0.0;
    for (std::size_t k = 1; k < tr.t.size(); ++k) {
        if (tr.t[k - 1] < settle - 1e-12) continue;
        const double h = tr.t[k] - tr.t[k - 1];
        acc += 0.5 * h * (std::norm(tr.alpha[k]) + std::norm(tr.alpha[k - 1]));
        span += h;
    }
    return acc / span;
}

double phase_potential(double phi, const ModelParams& p) { return p.delta * phi + p.eta * std::cos(2.0 * phi); }
double phase_potential_d1(double phi, const ModelParams& p) { return p.delta - 2.0 * p.eta * std::sin(2.0 * phi); }
double phase_potential_d2(double phi, const ModelParams& p) { return -4.0 * p.eta * std::cos(2.0 * phi); }

PotentialExtrema phase_extrema(const ModelParams& p) {
    PotentialExtrema ex;
    if (!(2.0 * p.eta > std::abs(p.delta))) return ex;
    // V' = 0  <=>  sin(2 phi) = delta / (2 eta)
    const double s = std::asin(p.delta / (2.0 * p.eta));
    const double roots[2] = {0.5 * s, 0.5 * (kPi - s)};
    for (int k = 0; k < 2; ++k)
        for (double r : roots) {
            const double phi = wrap_2pi(r + k * kPi);
            (phase_potential_d2(phi, p) > 0.0 ? ex.minima : ex.maxima).push_back(phi);
        }
    std::sort(ex.minima.begin(), ex.minima.end());
    std::sort(ex.maxima.begin(), ex.maxima.end());
    return ex;
}

}  // namespace qvdp::meanfield
