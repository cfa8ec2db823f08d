#include "qvdp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qvdp/error.hpp"
#include "qvdp/liouvillian.hpp"
#include "qvdp/meanfield.hpp"

namespace qvdp::dynamics {

const char* to_string(Frame frame) {
    switch (frame) {
        case Frame::Rotating: return "rotating";
        case Frame::Lab: return "lab";
        case Frame::LabStroboscopic: return "lab_stroboscopic";
    }
    return "unknown";
}

const char* to_string(Backend backend) {
    switch (backend) {
        case Backend::Auto: return "auto";
        case Backend::Spectral: return "spectral";
        case Backend::RungeKutta: return "rk4";
    }
    return "unknown";
}

Complex expect_a(const CMatrix& rho) {
    Complex s = 0.0;
    for (Eigen::Index m = 0; m + 1 < rho.rows(); ++m) s += std::sqrt(static_cast<double>(m + 1)) * rho(m + 1, m);
    return s;
}

double stable_rk4_step(const ModelParams& p, int d) {
    const double dd = d;
    const double bound = p.gamma2 * (dd - 1) * (dd - 2) + p.gamma1 * dd + std::abs(p.delta) * dd + 4.0 * p.eta * dd;
    return 2.0 / std::max(bound, 1e-12);
}

namespace {

void check_grid(const std::vector<double>& t) {
    if (t.empty()) throw Error(ErrorKind::InvalidArgument, "empty time grid");
    for (std::size_t k = 1; k < t.size(); ++k)
        if (!(t[k] > t[k - 1])) throw Error(ErrorKind::InvalidArgument, "time grid must be strictly increasing");
}

struct Rk4 {
    CMatrix k1, k2, k3, k4, tmp;

    template <class Apply>
    void step(CMatrix& rho, double h, Apply&& apply) {
        apply(0.0, rho, k1);
        tmp = rho + 0.5 * h * k1;
        apply(0.5 * h, tmp, k2);
        tmp = rho + 0.5 * h * k2;
        apply(0.5 * h, tmp, k3);
        tmp = rho + h * k3;
        apply(h, tmp, k4);
        rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
};

void record(Evolution& ev, double t, const CMatrix& rho, bool keep) {
    ev.times.push_back(t);
    ev.amplitude.times.push_back(t);
    ev.amplitude.values.push_back(expect_a(rho));
    ev.max_trace_error = std::max(ev.max_trace_error, std::abs(rho.trace() - 1.0));
    if (keep) ev.states.push_back(rho);
}

Evolution start(const ModelParams& p, Frame frame, const EvolveOptions& opts) {
    Evolution ev;
    ev.amplitude.frame = frame;
    ev.amplitude.params = p;
    ev.amplitude.initial_state = opts.initial_state;
    return ev;
}

}  // namespace

Evolution evolve_rotating_rk4(const CMatrix& rho0, const ModelParams& p, const std::vector<double>& t_grid,
                              const EvolveOptions& opts) {
    check_grid(t_grid);
    const int d = static_cast<int>(rho0.rows());
    const Generator g = rotating_generator(p, d);
    const double h_max = opts.dt > 0.0 ? opts.dt : 0.9 * stable_rk4_step(p, d);
    Evolution ev = start(p, Frame::Rotating, opts);
    ev.backend = Backend::RungeKutta;
    CMatrix rho = rho0;
    Rk4 rk;
    auto apply = [&](double, const CMatrix& x, CMatrix& out) { apply_generator(g, x, out); };
    record(ev, t_grid[0], rho, opts.keep_states);
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        const double span = t_grid[k] - t_grid[k - 1];
        const long steps = std::max(1L, static_cast<long>(std::ceil(span / h_max - 1e-9)));
        const double h = span / steps;
        for (long s = 0; s < steps; ++s) rk.step(rho, h, apply);
        if (!rho.allFinite()) throw Error(ErrorKind::Instability, "RK4 state diverged; reduce dt");
        record(ev, t_grid[k], rho, opts.keep_states);
    }
    return ev;
}

Evolution evolve_rotating_spectral(const CMatrix& rho0, const SpectralDecomposition& dec,
                                   const std::vector<double>& t_grid, const EvolveOptions& opts) {
    check_grid(t_grid);
    const int nm = dec.size();
    const int d = dec.cutoff;
    if (nm != d * d) throw Error(ErrorKind::InvalidArgument, "spectral propagation needs the full spectrum");
    std::vector<Complex> c(nm);
    for (int j = 0; j < nm; ++j) {
        const EigenMode& m = dec.modes[j];
        if (!m.right || !m.left || !m.biorthonormal)
            throw Error(ErrorKind::NumericFailure, "mode " + std::to_string(j) + " lacks biorthonormal vectors");
        c[j] = (m.left->adjoint() * rho0).trace();
    }
    Evolution ev = start(dec.params, Frame::Rotating, opts);
    ev.backend = Backend::Spectral;
    for (double t : t_grid) {
        CMatrix rho = CMatrix::Zero(d, d);
        for (int j = 0; j < nm; ++j) rho += (c[j] * std::exp(dec.modes[j].lambda * t)) * *dec.modes[j].right;
        record(ev, t, rho, opts.keep_states);
    }
    return ev;
}

Evolution evolve_rotating(const DensityMatrix& rho0, const ModelParams& p, const SpectralDecomposition* dec,
                          const std::vector<double>& t_grid, const EvolveOptions& opts) {
    bool spectral_ok = dec != nullptr && dec->size() == dec->cutoff * dec->cutoff;
    if (spectral_ok)
        for (const auto& m : dec->modes)
            if (!m.right || !m.left || !m.biorthonormal) {
                spectral_ok = false;
                break;
            }
    if (opts.backend == Backend::Spectral && !spectral_ok && dec == nullptr)
        throw Error(ErrorKind::InvalidArgument, "spectral backend needs a decomposition");
    if (opts.backend != Backend::RungeKutta && spectral_ok) return evolve_rotating_spectral(rho0.matrix(), *dec, t_grid, opts);
    // near an EP or without a full decomposition
    return evolve_rotating_rk4(rho0.matrix(), p, t_grid, opts);
}

Evolution evolve_lab(const DensityMatrix& rho0, const ModelParams& p, const std::vector<double>& t_grid, double dt,
                     const EvolveOptions& opts) {
    check_grid(t_grid);
    const double period = p.period();
    if (!(dt > 0.0) || dt > period / 200.0 * (1.0 + 1e-12))
        throw Error(ErrorKind::Resolution, "lab-frame dt must be in (0, T/200]");
    const int d = rho0.dim();
    Generator g = lab_generator(p, d, t_grid[0]);
    {
        const Generator later = lab_generator(p, d, t_grid[0] + period);
        if (std::abs(later.kappa - g.kappa) > 1e-13 * (1.0 + std::abs(g.kappa)))
            throw Error(ErrorKind::NumericFailure, "lab generator is not T-periodic");
    }
    const Complex kappa0 = Complex(0.0, p.eta);
    Evolution ev = start(p, Frame::Lab, opts);
    ev.backend = Backend::RungeKutta;
    CMatrix rho = rho0.matrix();
    Rk4 rk;
    double t = t_grid[0];
    auto apply = [&](double offset, const CMatrix& x, CMatrix& out) {
        g.kappa = kappa0 * std::polar(1.0, 2.0 * p.omega_s * (t + offset));
        apply_generator(g, x, out);
    };
    record(ev, t_grid[0], rho, opts.keep_states);
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        const double span = t_grid[k] - t_grid[k - 1];
        const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
        const double h = span / steps;
        for (long s = 0; s < steps; ++s) {
            t = t_grid[k - 1] + s * h;
            rk.step(rho, h, apply);
        }
        if (!rho.allFinite()) throw Error(ErrorKind::Instability, "lab RK4 state diverged; reduce dt");
        record(ev, t_grid[k], rho, opts.keep_states);
    }
    return ev;
}

CMatrix stroboscopic_map(const CMatrix& rho, int n) {
    if (n % 2 == 0) return rho;
    CMatrix out = rho;
    for (Eigen::Index j = 0; j < out.cols(); ++j)
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            if ((i + j) % 2 == 1) out(i, j) = -out(i, j);
    return out;
}

DensityMatrix stroboscopic_map(const DensityMatrix& rho, int n) { return DensityMatrix(stroboscopic_map(rho.matrix(), n)); }

ObservableTrajectory stroboscopic_series(const DensityMatrix& rho0, const ModelParams& p, int n_max,
                                         const EvolveOptions& opts) {
    if (n_max < 0) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 0");
    const double period = p.period();
    std::vector<double> grid(n_max + 1);
    for (int n = 0; n <= n_max; ++n) grid[n] = n * period;
    if (n_max == 0) grid.push_back(period);  // evolve needs an increasing grid; trimmed below
    EvolveOptions o = opts;
    o.keep_states = false;
    const Evolution ev = evolve_rotating_rk4(rho0.matrix(), p, grid, o);
    ObservableTrajectory tr;
    tr.frame = Frame::LabStroboscopic;
    tr.params = p;
    tr.initial_state = opts.initial_state;
    for (int n = 0; n <= n_max; ++n) {
        tr.times.push_back(grid[n]);
        // P a P = -a
        tr.values.push_back((n % 2 == 0 ? 1.0 : -1.0) * ev.amplitude.values[n]);
    }
    return tr;
}

OccupationRow stationary_occupation(double n_ex, double eta_ratio, double delta_ratio, int cutoff) {
    const ModelParams p = ModelParams::from_ratios(1.0, n_ex, delta_ratio, eta_ratio);
    OccupationRow row;
    row.n_ex = n_ex;
    row.eta_ratio = eta_ratio;
    row.cutoff = cutoff > 0 ? cutoff : cutoff_for(p);
    const FockSpace space(row.cutoff);
    const DensityMatrix rho = steady_state(p, space);
    row.occupation_ratio = rho.expect(space.n_op()).real() / n_ex;
    const auto b = meanfield::classify(p);
    row.meanfield_ratio = b.regime == meanfield::Regime::Bistable ? std::norm(b.fixed_points.first) / n_ex : 1.0;
    return row;
}

std::vector<OccupationRow> stationary_occupation_scan(const std::vector<double>& n_ex_values,
                                                      const std::vector<double>& eta_ratios, double delta_ratio,
                                                      int cutoff) {
    std::vector<OccupationRow> rows(n_ex_values.size() * eta_ratios.size());
    const int ne = static_cast<int>(eta_ratios.size());
    // grid points are independent; each steady state already uses the parallel assembly kernel
    for (std::size_t i = 0; i < n_ex_values.size(); ++i)
        for (int j = 0; j < ne; ++j) rows[i * ne + j] = stationary_occupation(n_ex_values[i], eta_ratios[j], delta_ratio, cutoff);
    return rows;
}

}  // namespace qvdp::dynamics
