#include "qvdp/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <string>

#include "qvdp/error.hpp"
#include "qvdp/meanfield.hpp"

namespace qvdp::langevin {

const char* to_string(Process process) {
    switch (process) {
        case Process::Phase: return "phase";
        case Process::Intensity: return "intensity";
        case Process::Amplitude: return "amplitude";
    }
    return "unknown";
}

double max_dt(const ModelParams& p) {
    const double disc = p.delta * p.delta - 4.0 * p.eta * p.eta;
    const double omega = disc > 0.0 ? std::sqrt(disc) : 0.0;
    const double scale = omega > 0.0 ? std::max(1.0, p.gamma1 / omega) : 1.0;
    return 1e-3 * scale / p.gamma1;
}

void LangevinConfig::validate(const ModelParams& p) const {
    p.validate();
    if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
    if (dt > max_dt(p) * (1.0 + 1e-12))
        throw Error(ErrorKind::InvalidArgument, "dt=" + std::to_string(dt) + " exceeds guard " + std::to_string(max_dt(p)));
    if (n_steps < 1 || n_trajectories < 1 || record_every < 1)
        throw Error(ErrorKind::InvalidArgument, "n_steps, n_trajectories and record_every must be >= 1");
}

namespace {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

TrajectoryEnsemble prepare(Process process, const ModelParams& p, const LangevinConfig& c) {
    c.validate(p);
    TrajectoryEnsemble e;
    e.process = process;
    e.params = p;
    e.config = c;
    for (long k = 0; k <= c.n_steps; ++k)
        if (k % c.record_every == 0 || k == c.n_steps) e.times.push_back(k * c.dt);
    e.stream_ids.resize(c.n_trajectories);
    for (int i = 0; i < c.n_trajectories; ++i) e.stream_ids[i] = static_cast<std::uint64_t>(i);
    return e;
}

// Runs kernel(i) for every trajectory; exceptions from worker threads are rethrown here.
template <class Kernel>
void run_all(int n, Execution exec, Kernel&& kernel) {
    if (exec == Execution::Serial) {
        for (int i = 0; i < n; ++i) kernel(i);
        return;
    }
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
        try {
            kernel(i);
        } catch (...) {
#pragma omp critical(qvdp_langevin_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

template <class Step>
void integrate_real(TrajectoryEnsemble& e, Execution exec, Step step) {
    const LangevinConfig& c = e.config;
    e.paths.assign(c.n_trajectories, {});
    run_all(c.n_trajectories, exec, [&](int i) {
        std::mt19937_64 rng = make_stream(c.seed, e.stream_ids[i]);
        std::normal_distribution<double> gauss;
        std::vector<double>& path = e.paths[i];
        path.reserve(e.times.size());
        double x = c.initial;
        path.push_back(x);
        for (long k = 1; k <= c.n_steps; ++k) {
            const double g = c.noise ? gauss(rng) : 0.0;
            x = step(x, g);
            if (k % c.record_every == 0 || k == c.n_steps) path.push_back(x);
        }
    });
}

}  // namespace

std::uint64_t stream_first_draw(std::uint64_t seed, std::uint64_t index) { return make_stream(seed, index)(); }

TrajectoryEnsemble simulate_phase(const ModelParams& p, const LangevinConfig& c, Execution exec) {
    TrajectoryEnsemble e = prepare(Process::Phase, p, c);
    const double dt = c.dt;
    const double sigma = std::sqrt(3.0 * p.gamma1 / (4.0 * p.n_ex()) * dt);
    integrate_real(e, exec, [&](double phi, double g) {
        return phi + (-p.delta + 2.0 * p.eta * std::sin(2.0 * phi)) * dt + sigma * g;
    });
    return e;
}

TrajectoryEnsemble simulate_intensity(const ModelParams& p, const LangevinConfig& c, Execution exec) {
    TrajectoryEnsemble e = prepare(Process::Intensity, p, c);
    const double dt = c.dt;
    const double sigma = std::sqrt(3.0 * p.gamma1 * p.n_ex() * dt);
    integrate_real(e, exec, [&](double x, double g) { return x - p.gamma1 * x * dt + sigma * g; });
    return e;
}

TrajectoryEnsemble simulate_amplitude(const ModelParams& p, const LangevinConfig& c, Execution exec) {
    TrajectoryEnsemble e = prepare(Process::Amplitude, p, c);
    const double dt = c.dt;
    // E|dW|^2 = 2 (3 gamma1/4) dt, E dW^2 = 0
    const double sigma = std::sqrt(0.75 * p.gamma1 * dt);
    const double guard = 10.0 * p.n_ex();
    e.amplitude_paths.assign(c.n_trajectories, {});
    run_all(c.n_trajectories, exec, [&](int i) {
        std::mt19937_64 rng = make_stream(c.seed, e.stream_ids[i]);
        std::normal_distribution<double> gauss;
        auto& path = e.amplitude_paths[i];
        path.reserve(e.times.size());
        Complex a = c.initial_alpha;
        path.push_back(a);
        for (long k = 1; k <= c.n_steps; ++k) {
            Complex dw = 0.0;
            if (c.noise) {
                const double g1 = gauss(rng);
                const double g2 = gauss(rng);
                dw = sigma * Complex(g1, g2);
            }
            a += meanfield::rhs(a, p) * dt + dw;
            if (!(std::norm(a) <= guard))
                throw Error(ErrorKind::Instability, "|alpha|^2 exceeded 10 n_ex in trajectory " + std::to_string(i));
            if (k % c.record_every == 0 || k == c.n_steps) path.push_back(a);
        }
    });
    return e;
}

namespace {

void require(const TrajectoryEnsemble& e, Process p) {
    if (e.process != p) throw Error(ErrorKind::InvalidArgument, std::string("estimator needs a ") + to_string(p) + " ensemble");
}

struct Line {
    double slope = 0.0, intercept = 0.0, slope_stderr = 0.0;
};

Line fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 3) throw Error(ErrorKind::InsufficientStatistics, "line fit needs at least three points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    Line l;
    l.slope = sxy / sxx;
    l.intercept = my - l.slope * mx;
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - l.intercept - l.slope * x[i];
        rss += r * r;
    }
    l.slope_stderr = std::sqrt(rss / (n - 2) / sxx);
    return l;
}

std::size_t first_index_at(const std::vector<double>& times, double t) {
    return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t - 1e-12) - times.begin());
}

}  // namespace

JumpRateEstimate estimate_jump_rate(const TrajectoryEnsemble& e, double core_radius) {
    require(e, Process::Phase);
    const ModelParams& p = e.params;
    if (!(2.0 * p.eta > std::abs(p.delta))) throw Error(ErrorKind::WrongRegime, "jump rate needs eta > eta_c");
    if (!(core_radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "core radius must be positive");
    const double phi_min = meanfield::phase_extrema(p).minima.front();

    JumpRateEstimate r;
    for (const auto& path : e.paths) {
        auto well = [&](double phi) { return std::lround((phi - phi_min) / kPi); };
        long last = well(path.front());
        for (double phi : path) {
            const long k = well(phi);
            if (k == last || std::abs(phi - (phi_min + k * kPi)) >= core_radius) continue;
            if (k < last) r.left_jumps += last - k;
            else r.right_jumps += k - last;
            last = k;
        }
    }
    r.total_time = e.size() * (e.times.back() - e.times.front());
    const long total = r.left_jumps + r.right_jumps;
    if (total == 0)
        throw Error(ErrorKind::InsufficientStatistics, "no jumps observed; raise n_steps or lower n_ex");
    r.jump_rate = total / r.total_time;
    r.jump_rate_stderr = std::sqrt(static_cast<double>(total)) / r.total_time;
    r.relaxation_rate = 2.0 * r.jump_rate;
    r.relaxation_stderr = 2.0 * r.jump_rate_stderr;
    r.directionality = static_cast<double>(std::min(r.left_jumps, r.right_jumps)) /
                       static_cast<double>(std::max(r.left_jumps, r.right_jumps));
    r.predicted_suppression = std::exp(-8.0 * p.n_ex() * std::abs(p.delta / p.gamma1) * kPi / 3.0);
    r.low_statistics = total < 100;
    return r;
}

LifetimeEstimate estimate_oscillation_lifetime(const TrajectoryEnsemble& e, double t_skip, double floor) {
    require(e, Process::Phase);
    if (!(2.0 * e.params.eta < std::abs(e.params.delta)) && e.params.eta != 0.0)
        throw Error(ErrorKind::WrongRegime, "oscillation lifetime needs eta < eta_c");
    LifetimeEstimate le;
    le.times = e.times;
    le.magnitude.resize(e.times.size());
    const int n = e.size();
    for (std::size_t k = 0; k < e.times.size(); ++k) {
        Complex m = 0.0;
        for (const auto& path : e.paths) m += std::polar(1.0, path[k]);
        le.magnitude[k] = std::abs(m) / n;
    }
    const double cut = std::max(floor, 5.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> x, y;
    for (std::size_t k = first_index_at(e.times, t_skip); k < e.times.size(); ++k) {
        if (le.magnitude[k] < cut) break;
        x.push_back(e.times[k]);
        y.push_back(std::log(le.magnitude[k]));
    }
    if (x.size() < 3)
        throw Error(ErrorKind::InsufficientStatistics, "envelope fell below " + std::to_string(cut) + " too early to fit");
    const Line l = fit_line(x, y);
    le.rate = -l.slope;
    le.rate_stderr = l.slope_stderr;
    le.fit_start = x.front();
    le.fit_end = x.back();
    return le;
}

Estimate estimate_stationary_variance(const TrajectoryEnsemble& e, double t_min) {
    if (e.process == Process::Amplitude) throw Error(ErrorKind::InvalidArgument, "variance needs a real ensemble");
    const std::size_t k0 = first_index_at(e.times, t_min);
    if (k0 >= e.times.size()) throw Error(ErrorKind::InsufficientStatistics, "no samples after t_min");
    // per-trajectory time averages of x and x^2; spread across trajectories gives the error
    const int n = e.size();
    std::vector<double> m1(n), m2(n);
    for (int i = 0; i < n; ++i) {
        double s1 = 0, s2 = 0;
        for (std::size_t k = k0; k < e.times.size(); ++k) {
            s1 += e.paths[i][k];
            s2 += e.paths[i][k] * e.paths[i][k];
        }
        const double cnt = static_cast<double>(e.times.size() - k0);
        m1[i] = s1 / cnt;
        m2[i] = s2 / cnt;
    }
    double mean = 0, second = 0;
    for (int i = 0; i < n; ++i) {
        mean += m1[i];
        second += m2[i];
    }
    mean /= n;
    second /= n;
    Estimate est{"stationary_variance", second - mean * mean, 0.0};
    if (n > 1) {
        double v = 0;
        for (int i = 0; i < n; ++i) v += (m2[i] - second) * (m2[i] - second);
        est.std_error = std::sqrt(v / (n - 1) / n);
    }
    return est;
}

Estimate estimate_autocorrelation_time(const TrajectoryEnsemble& e, double t_min, double max_lag) {
    if (e.process == Process::Amplitude) throw Error(ErrorKind::InvalidArgument, "autocorrelation needs a real ensemble");
    const std::size_t k0 = first_index_at(e.times, t_min);
    const double h = e.config.dt * e.config.record_every;
    const std::size_t lags = static_cast<std::size_t>(max_lag / h);
    if (k0 + lags + 2 >= e.times.size()) throw Error(ErrorKind::InsufficientStatistics, "series too short for max_lag");
    double mean = 0;
    long cnt = 0;
    for (const auto& path : e.paths)
        for (std::size_t k = k0; k < path.size(); ++k, ++cnt) mean += path[k];
    mean /= cnt;
    std::vector<double> c(lags + 1, 0.0);
    for (std::size_t lag = 0; lag <= lags; ++lag) {
        double s = 0;
        long m = 0;
        for (const auto& path : e.paths)
            for (std::size_t k = k0; k + lag < path.size(); ++k, ++m) s += (path[k] - mean) * (path[k + lag] - mean);
        c[lag] = s / m;
    }
    std::vector<double> x, y;
    for (std::size_t lag = 0; lag <= lags; ++lag) {
        if (c[lag] <= 0.05 * c[0]) break;
        x.push_back(lag * h);
        y.push_back(std::log(c[lag] / c[0]));
    }
    const Line l = fit_line(x, y);
    const double rate = -l.slope;
    return {"autocorrelation_time", 1.0 / rate, l.slope_stderr / (rate * rate)};
}

Estimate estimate_phase_diffusion(const TrajectoryEnsemble& e) {
    require(e, Process::Phase);
    const int n = e.size();
    if (n < 2) throw Error(ErrorKind::InsufficientStatistics, "diffusion needs at least two trajectories");
    std::vector<double> x, y;
    for (std::size_t k = 1; k < e.times.size(); ++k) {
        double s1 = 0, s2 = 0;
        for (const auto& path : e.paths) {
            const double d = path[k] - path[0];
            s1 += d;
            s2 += d * d;
        }
        const double mean = s1 / n;
        x.push_back(e.times[k]);
        y.push_back((s2 - n * mean * mean) / (n - 1));
    }
    // Through the origin: Var = D t. Error from the spread of per-time ratios is
    // dominated by ensemble noise, estimated as sqrt(2/(n-1)) relative.
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += x[i] * y[i];
        sxx += x[i] * x[i];
    }
    const double slope = sxy / sxx;
    return {"phase_diffusion", slope, slope * std::sqrt(2.0 / (n - 1))};
}

Estimate estimate_noise_intensity(const TrajectoryEnsemble& e) {
    require(e, Process::Phase);
    if (e.config.record_every != 1) throw Error(ErrorKind::InvalidArgument, "noise intensity needs record_every = 1");
    const ModelParams& p = e.params;
    const double dt = e.config.dt;
    double s = 0, s2 = 0;
    long m = 0;
    for (const auto& path : e.paths)
        for (std::size_t k = 0; k + 1 < path.size(); ++k, ++m) {
            const double f = -p.delta + 2.0 * p.eta * std::sin(2.0 * path[k]);
            const double r = path[k + 1] - path[k] - f * dt;
            s += r;
            s2 += r * r;
        }
    const double var = s2 / m - (s / m) * (s / m);
    return {"noise_intensity", var / dt, var / dt * std::sqrt(2.0 / m)};
}

Estimate estimate_mean_intensity(const TrajectoryEnsemble& e, double t_min) {
    require(e, Process::Amplitude);
    const std::size_t k0 = first_index_at(e.times, t_min);
    const int n = e.size();
    std::vector<double> per(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (std::size_t k = k0; k < e.times.size(); ++k) per[i] += std::norm(e.amplitude_paths[i][k]);
        per[i] /= static_cast<double>(e.times.size() - k0);
    }
    double mean = 0;
    for (double v : per) mean += v;
    mean /= n;
    double var = 0;
    for (double v : per) var += (v - mean) * (v - mean);
    return {"mean_intensity", mean, n > 1 ? std::sqrt(var / (n - 1) / n) : 0.0};
}

std::vector<double> phase_histogram(const TrajectoryEnsemble& e, int bins, double t_min) {
    require(e, Process::Amplitude);
    if (bins < 1) throw Error(ErrorKind::InvalidArgument, "bins must be >= 1");
    std::vector<double> h(bins, 0.0);
    const std::size_t k0 = first_index_at(e.times, t_min);
    for (const auto& path : e.amplitude_paths)
        for (std::size_t k = k0; k < path.size(); ++k) {
            double phi = std::arg(path[k]);
            if (phi < 0) phi += 2.0 * kPi;
            const int b = std::min(bins - 1, static_cast<int>(phi / (2.0 * kPi) * bins));
            h[b] += 1.0;
        }
    return h;
}

}  // namespace qvdp::langevin
