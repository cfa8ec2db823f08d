#include "qvdp/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qvdp/dynamics.hpp"
#include "qvdp/error.hpp"
#include "qvdp/fock.hpp"
#include "qvdp/io.hpp"
#include "qvdp/langevin.hpp"
#include "qvdp/meanfield.hpp"
#include "qvdp/semiclassical.hpp"
#include "qvdp/spectral.hpp"

namespace qvdp::cli {

namespace {

namespace fs = std::filesystem;
using io::json;
using io::num;

constexpr const char* kExitCodes =
    "Exit codes: 0 ok, 2 usage (unknown flag, invalid parameter combination), 3 numeric failure,\n"
    "4 wrong regime or bad bracket, 5 insufficient statistics, 6 output not writable.";

struct Options {
    double gamma1 = 1.0;
    std::optional<double> nex;
    std::optional<double> gamma2;
    double delta_ratio = 0.1;
    std::optional<double> eta_ratio;
    std::optional<double> eta;
    double omega_s = 0.0;
    int cutoff = 0;
    int trunc_m = 64;
    double dt = 0.0;
    std::uint64_t seed = 1;
    std::string grid;
    std::string out = "qvdp_out";
    std::string format = "csv";

    std::string nex_list;
    int max_harmonic = 6;
    int modes = 4;
    std::string process = "phase";
    std::string estimator;
    int trajectories = 200;
    double t_end = 0.0;
    int record_every = 10;
    bool dump = false;
    double core_radius = 0.2;
    std::string frame = "rotating";
    std::string initial = "coherent";
    int samples = 201;
    int periods = 20;
    std::string method = "liouvillian";
    std::string bracket;
    bool diagnostics = false;
    int sidecar_modes = 0;
    int figure = 0;
    bool quick = false;
    std::string command_line;
};

Error usage(const std::string& what) { return Error(ErrorKind::InvalidArgument, what); }

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw usage("bad number '" + item + "' in list");
        }
    }
    return v;
}

std::vector<double> parse_grid(const std::string& s) {
    const auto a = s.find(':');
    const auto b = s.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) throw usage("grid must be start:stop:count");
    double start = 0, stop = 0;
    long count = 0;
    try {
        start = std::stod(s.substr(0, a));
        stop = std::stod(s.substr(a + 1, b - a - 1));
        count = std::stol(s.substr(b + 1));
    } catch (const std::exception&) {
        throw usage("grid must be start:stop:count");
    }
    if (count < 1) throw usage("grid count must be >= 1");
    std::vector<double> v(count);
    for (long i = 0; i < count; ++i) v[i] = count == 1 ? start : start + (stop - start) * i / (count - 1);
    return v;
}

std::pair<double, double> parse_pair(const std::string& s) {
    const auto a = s.find(':');
    if (a == std::string::npos) throw usage("expected lo:hi");
    try {
        return {std::stod(s.substr(0, a)), std::stod(s.substr(a + 1))};
    } catch (const std::exception&) {
        throw usage("expected lo:hi");
    }
}

double base_nex(const Options& o) {
    if (o.nex && o.gamma2) throw usage("give only one of --nex and --gamma2");
    if (o.gamma2) return o.gamma1 / (2.0 * *o.gamma2);
    return o.nex.value_or(10.0);
}

ModelParams make_params(const Options& o, std::optional<double> nex = {}, std::optional<double> eta_ratio = {}) {
    if (o.eta && o.eta_ratio) throw usage("give only one of --eta and --eta-ratio");
    const double n = nex.value_or(base_nex(o));
    const double r = eta_ratio.value_or(o.eta_ratio.value_or(0.0));
    ModelParams p = ModelParams::from_ratios(o.gamma1, n, o.delta_ratio, r, o.omega_s);
    if (o.eta && !eta_ratio) p.eta = *o.eta;
    p.validate();
    return p;
}

std::vector<double> nex_values(const Options& o) {
    if (o.nex_list.empty()) return {base_nex(o)};
    return parse_list(o.nex_list);
}

int cutoff_of(const Options& o, const ModelParams& p) { return o.cutoff > 0 ? o.cutoff : cutoff_for(p); }

// Collects artifacts of one subcommand in the output directory.
class Writer {
public:
    Writer(fs::path dir, std::string format) : dir_(std::move(dir)), format_(std::move(format)) {
        if (format_ != "csv" && format_ != "json") throw usage("--format must be csv or json");
        std::error_code ec;
        fs::create_directories(dir_, ec);
        const fs::path probe = dir_ / ".qvdp_write_probe";
        std::ofstream f(probe);
        if (!f) throw Error(ErrorKind::Io, "output directory not writable: " + dir_.string());
        f.close();
        fs::remove(probe, ec);
    }

    const fs::path& dir() const { return dir_; }
    const std::vector<std::string>& files() const { return files_; }

    void table(const std::string& stem, const io::CsvTable& t, const json& header) {
        if (format_ == "csv") {
            t.write(dir_ / (stem + ".csv"));
            files_.push_back(stem + ".csv");
            return;
        }
        // JSON mirror of the CSV: header fields plus columns and typed rows
        const std::string text = t.str();
        std::stringstream ss(text);
        std::string line;
        std::getline(ss, line);
        std::getline(ss, line);
        json j = header;
        json rows = json::array();
        while (std::getline(ss, line)) {
            json row = json::array();
            std::stringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ',')) {
                double x = 0;
                const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), x);
                if (r.ec == std::errc() && r.ptr == cell.data() + cell.size()) row.push_back(x);
                else row.push_back(cell);
            }
            rows.push_back(row);
        }
        j["rows"] = rows;
        write_json(stem + ".json", j);
    }

    void write_json(const std::string& name, const json& j) {
        io::write_atomic(dir_ / name, j.dump(2) + "\n");
        files_.push_back(name);
    }

    void add_file(const std::string& name) { files_.push_back(name); }

private:
    fs::path dir_;
    std::string format_;
    std::vector<std::string> files_;
};

json prov(const Options& o, const std::string& producer, const ModelParams& p, json extra = json::object()) {
    extra["command"] = o.command_line;
    return io::provenance(producer, p, extra);
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

// ---------------------------------------------------------------- spectrum

json cmd_spectrum(const Options& o, Writer& w) {
    const ModelParams p = make_params(o);
    const int d = cutoff_of(o, p);
    const FockSpace space(d);
    DiagonalizeOptions dopts;
    dopts.vectors = o.sidecar_modes > 0 ? ModeVectors::Leading : ModeVectors::None;
    dopts.leading = o.sidecar_modes;
    const SpectralDecomposition dec = diagonalize(p, space, dopts);
    json j = io::spectrum_json(dec, prov(o, "spectrum", p, {{"cutoff", d}}));
    if (o.sidecar_modes > 0) {
        std::vector<int> with;
        for (int k = 0; k < dec.size(); ++k)
            if (dec.modes[k].right) with.push_back(k);
        j["sidecar"] = io::write_mode_sidecar(w.dir() / "spectrum_modes.bin", dec, with);
        w.add_file("spectrum_modes.bin");
    }
    w.write_json("spectrum.json", j);
    if (o.format == "csv") {
        const json h = prov(o, "spectrum", p, {{"cutoff", d}});
        io::CsvTable t(h, {"index", "re", "im", "parity"});
        for (int k = 0; k < dec.size(); ++k)
            t.add_row({num(k), num(dec.modes[k].lambda.real()), num(dec.modes[k].lambda.imag()), num(dec.modes[k].parity)});
        w.table("spectrum", t, h);
    }
    const GapInfo g = liouvillian_gap(dec);
    return {{"cutoff", d},
            {"eigenvalues", dec.size()},
            {"lambda1", complex_json(g.lambda1)},
            {"lambda2", complex_json(g.lambda2)},
            {"gap", g.gamma1},
            {"parity1", g.parity},
            {"real_pair", g.real_pair}};
}

// ---------------------------------------------------------------- bands

json cmd_bands(const Options& o, Writer& w) {
    json summary = json::array();
    const auto nexs = nex_values(o);
    const ModelParams p0 = make_params(o, nexs.front());
    const json h = prov(o, "bands", p0, {{"nex_list", nexs}});
    io::CsvTable modes(h, {"n_ex", "harmonic", "band_frequency", "rank", "mode_index", "re", "im", "decay_rate", "parity"});
    io::CsvTable fund(h, {"n_ex", "cutoff", "harmonic", "fundamental_rate", "second_rate", "interband_gap",
                          "phase_fp_rate", "perturbative_rate"});
    for (double n : nexs) {
        const ModelParams p = make_params(o, n);
        const double omega = meanfield::limit_cycle_frequency(p);
        const int d = cutoff_of(o, p);
        DiagonalizeOptions dopts;
        dopts.vectors = ModeVectors::None;
        const SpectralDecomposition dec = diagonalize(p, FockSpace(d), dopts);
        const std::vector<Complex> vals = dec.eigenvalues();
        const BandStructure bs = band_structure(dec, omega, o.max_harmonic);

        const auto dl = semiclassical::Dimensionless::from(p);
        std::vector<Complex> fp = semiclassical::phase_spectrum(semiclassical::build_phase_fp(semiclassical::Sector::OddB, o.trunc_m, dl));
        const auto even = semiclassical::phase_spectrum(semiclassical::build_phase_fp(semiclassical::Sector::EvenA, o.trunc_m, dl));
        fp.insert(fp.end(), even.begin(), even.end());
        // FP rates are dimensionless; scale by gamma1
        for (auto& z : fp) z *= p.gamma1;
        const BandStructure fbs = cluster_bands(fp, omega, bs.tolerance, o.max_harmonic);
        std::vector<semiclassical::CnEntry> cn;
        try {
            cn = semiclassical::perturbative_cn(dl, o.trunc_m, o.max_harmonic);
        } catch (const Error&) {
        }

        for (std::size_t b = 0; b < bs.bands.size(); ++b) {
            for (std::size_t r = 0; r < bs.bands[b].size(); ++r) {
                const int k = bs.bands[b][r];
                modes.add_row({num(n), num(bs.harmonics[b]), num(bs.band_frequencies[b]), num(static_cast<int>(r)), num(k),
                               num(vals[k].real()), num(vals[k].imag()), num(-vals[k].real()), num(dec.modes[k].parity)});
            }
            const int hn = bs.harmonics[b];
            if (hn <= 0) continue;
            const double second = bs.second[b] >= 0 ? -vals[bs.second[b]].real() : std::nan("");
            const double pert = hn <= static_cast<int>(cn.size()) ? p.gamma1 * cn[hn - 1].c / p.n_ex() : std::nan("");
            fund.add_row({num(n), num(d), num(hn), num(-vals[bs.fundamental[b]].real()), num(second), num(bs.interband_gap[b]),
                          num(fbs.fundamental_rate(hn, fp)), num(pert)});
            summary.push_back({{"n_ex", n}, {"harmonic", hn}, {"fundamental_rate", -vals[bs.fundamental[b]].real()},
                               {"phase_fp_rate", fbs.fundamental_rate(hn, fp)}});
        }
    }
    w.table("bands", modes, h);
    w.table("bands_fundamental", fund, h);
    return {{"fundamental", summary}};
}

// ---------------------------------------------------------------- meanfield

json cmd_meanfield(const Options& o, Writer& w) {
    const ModelParams p = make_params(o);
    const meanfield::Bifurcation b = meanfield::classify(p);
    json summary = {{"regime", meanfield::to_string(b.regime)}, {"eta_c", b.eta_c}};
    if (b.regime == meanfield::Regime::LimitCycle) {
        summary["omega"] = b.omega;
        summary["average_intensity"] = meanfield::average_intensity(p);
    }
    if (b.regime == meanfield::Regime::Bistable) {
        summary["alpha_plus"] = complex_json(b.fixed_points.first);
        summary["alpha_minus"] = complex_json(b.fixed_points.second);
    }
    const double dt = o.dt > 0.0 ? o.dt : 1e-3 / p.gamma1;
    const double t_end = o.t_end > 0.0 ? o.t_end : 200.0 / p.gamma1;
    const meanfield::Trajectory tr =
        meanfield::integrate(meanfield::MeanFieldState::polar(p.n_ex(), 0.0), p, t_end, dt, std::max(1, o.record_every));
    const json h = prov(o, "meanfield", p, {{"dt", dt}, {"initial", "sqrt(n_ex), phase 0"}});
    io::CsvTable t(h, {"t", "re_alpha", "im_alpha", "N", "phi"});
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        const meanfield::MeanFieldState s{tr.alpha[k]};
        t.add_row({num(tr.t[k]), num(tr.alpha[k].real()), num(tr.alpha[k].imag()), num(s.intensity()), num(s.phase())});
    }
    w.table("meanfield_trajectory", t, h);

    if (!o.grid.empty()) {
        const json hb = prov(o, "meanfield_bifurcation", p);
        io::CsvTable bt(hb, {"eta_ratio", "regime", "omega", "n_ss", "phi_ss", "average_intensity"});
        for (double r : parse_grid(o.grid)) {
            const ModelParams q = p.with_eta_ratio(r);
            const auto bb = meanfield::classify(q);
            const bool bi = bb.regime == meanfield::Regime::Bistable;
            bt.add_row({num(r), meanfield::to_string(bb.regime), num(bb.omega), num(bi ? std::norm(bb.fixed_points.first) : std::nan("")),
                        num(bi ? meanfield::MeanFieldState{bb.fixed_points.first}.phase() : std::nan("")),
                        num(bb.regime == meanfield::Regime::LimitCycle ? q.n_ex() : std::nan(""))});
        }
        w.table("meanfield_bifurcation", bt, hb);
    }
    return summary;
}

// ---------------------------------------------------------------- semiclassical

json cmd_semiclassical(const Options& o, Writer& w) {
    using namespace semiclassical;
    const auto nexs = nex_values(o);
    const ModelParams p0 = make_params(o, nexs.front());
    const json h = prov(o, "semiclassical", p0, {{"trunc_m", o.trunc_m}, {"nex_list", nexs}});
    io::CsvTable spec(h, {"n_ex", "sector", "mode_index", "re_nu", "im_nu"});
    io::CsvTable gaps(h, {"n_ex", "phase_fp_gap", "kramers_gap", "kramers_left", "kramers_right"});
    json summary;
    bool bistable = false;
    for (double n : nexs) {
        const ModelParams p = make_params(o, n);
        const Dimensionless dl = Dimensionless::from(p);
        for (Sector s : {Sector::OddB, Sector::EvenA}) {
            const auto v = phase_spectrum_checked(s, o.trunc_m, dl).values;
            for (std::size_t k = 0; k < v.size(); ++k)
                spec.add_row({num(n), to_string(s), num(static_cast<long>(k)), num(v[k].real()), num(v[k].imag())});
        }
        if (2.0 * dl.eta > std::abs(dl.delta)) {
            bistable = true;
            const KramersRates kr = kramers_rates(dl);
            const double gap = phase_gap(dl, o.trunc_m);
            gaps.add_row({num(n), num(gap), num(kr.gamma_gap), num(kr.rate_left), num(kr.rate_right)});
            summary["kramers"].push_back({{"n_ex", n}, {"gamma_gap", kr.gamma_gap}, {"phase_fp_gap", gap},
                                          {"rate_left", kr.rate_left}, {"rate_right", kr.rate_right},
                                          {"suppression", kr.suppression}});
        }
    }
    w.table("semiclassical_spectrum", spec, h);
    if (bistable) w.table("kramers", gaps, h);

    if (!bistable) {
        io::CsvTable cn(h, {"eta_ratio", "n", "c_n"});
        std::vector<double> ratios = o.grid.empty() ? std::vector<double>{o.eta_ratio.value_or(p0.eta_ratio())} : parse_grid(o.grid);
        for (double r : ratios) {
            const Dimensionless dl = Dimensionless::from(p0.with_eta_ratio(r));
            const auto entries = perturbative_cn(dl, o.trunc_m, o.modes);
            json list = json::array();
            for (const auto& e : entries) {
                cn.add_row({num(r), num(e.harmonic), num(e.c)});
                list.push_back(e.c);
            }
            summary["c_n"].push_back({{"eta_ratio", r}, {"c", list}});
        }
        w.table("cn", cn, h);
    }
    return summary;
}

// ---------------------------------------------------------------- langevin

json cmd_langevin(const Options& o, Writer& w) {
    using namespace langevin;
    const ModelParams p = make_params(o);
    LangevinConfig c;
    c.dt = o.dt > 0.0 ? o.dt : std::min(1e-3 / p.gamma1, max_dt(p));
    const double t_end = o.t_end > 0.0 ? o.t_end : 100.0 / p.gamma1;
    c.n_steps = static_cast<long>(std::llround(t_end / c.dt));
    c.n_trajectories = o.trajectories;
    c.seed = o.seed;
    c.record_every = o.record_every;
    const bool bistable = 2.0 * p.eta > std::abs(p.delta);

    TrajectoryEnsemble ens;
    std::string estimator = o.estimator;
    if (o.process == "phase") {
        if (bistable) c.initial = meanfield::phase_extrema(p).minima.front();
        if (estimator.empty()) estimator = bistable ? "jump" : "lifetime";
        if (estimator == "noise") c.record_every = 1;
        ens = simulate_phase(p, c);
    } else if (o.process == "intensity") {
        if (estimator.empty()) estimator = "variance";
        ens = simulate_intensity(p, c);
    } else if (o.process == "amplitude") {
        c.initial_alpha = bistable ? meanfield::fixed_points(p).first : Complex(std::sqrt(p.n_ex()), 0.0);
        if (estimator.empty()) estimator = "intensity";
        ens = simulate_amplitude(p, c);
    } else {
        throw usage("--process must be phase, intensity or amplitude");
    }

    std::ostringstream ps;
    ps << "n_ex=" << p.n_ex() << ";delta=" << p.delta << ";eta=" << p.eta << ";gamma1=" << p.gamma1;
    const json h = prov(o, "langevin", p, {{"process", o.process}, {"dt", c.dt}, {"n_steps", c.n_steps},
                                           {"record_every", c.record_every}, {"seed", c.seed}});
    io::CsvTable t(h, {"estimator", "params", "value", "stderr", "n_trajectories", "seed"});
    json summary = {{"process", o.process}, {"estimator", estimator}};
    auto row = [&](const std::string& name, double v, double e) {
        t.add_row({name, ps.str(), num(v), num(e), num(c.n_trajectories), std::to_string(c.seed)});
        summary[name] = {{"value", v}, {"stderr", e}};
    };

    if (estimator == "jump") {
        const JumpRateEstimate r = estimate_jump_rate(ens, o.core_radius);
        row("jump_rate", r.jump_rate, r.jump_rate_stderr);
        row("relaxation_rate", r.relaxation_rate, r.relaxation_stderr);
        row("left_jumps", static_cast<double>(r.left_jumps), 0.0);
        row("right_jumps", static_cast<double>(r.right_jumps), 0.0);
        row("kramers_gap", semiclassical::kramers_rates(semiclassical::Dimensionless::from(p)).gamma_gap * p.gamma1, 0.0);
        if (r.low_statistics) summary["warning"] = "fewer than 100 jumps";
    } else if (estimator == "lifetime") {
        const LifetimeEstimate r = estimate_oscillation_lifetime(ens);
        row("oscillation_decay_rate", r.rate, r.rate_stderr);
    } else if (estimator == "diffusion") {
        const Estimate r = estimate_phase_diffusion(ens);
        row(r.name, r.value, r.std_error);
    } else if (estimator == "noise") {
        const Estimate r = estimate_noise_intensity(ens);
        row(r.name, r.value, r.std_error);
    } else if (estimator == "variance") {
        const Estimate r = estimate_stationary_variance(ens, 0.5 * t_end);
        row(r.name, r.value, r.std_error);
    } else if (estimator == "autocorr") {
        const Estimate r = estimate_autocorrelation_time(ens, 0.5 * t_end, 3.0 / p.gamma1);
        row(r.name, r.value, r.std_error);
    } else if (estimator == "intensity") {
        const Estimate r = estimate_mean_intensity(ens, 0.5 * t_end);
        row(r.name, r.value, r.std_error);
    } else {
        throw usage("unknown estimator '" + estimator + "'");
    }
    w.table("langevin_summary", t, h);

    if (o.dump) {
        const bool cplx = ens.process == Process::Amplitude;
        io::CsvTable raw(h, cplx ? std::vector<std::string>{"trajectory", "t", "re", "im"}
                                 : std::vector<std::string>{"trajectory", "t", "value"});
        for (int i = 0; i < ens.size(); ++i)
            for (std::size_t k = 0; k < ens.times.size(); ++k) {
                if (cplx)
                    raw.add_row({num(i), num(ens.times[k]), num(ens.amplitude_paths[i][k].real()), num(ens.amplitude_paths[i][k].imag())});
                else
                    raw.add_row({num(i), num(ens.times[k]), num(ens.paths[i][k])});
            }
        w.table("langevin_trajectories", raw, h);
    }
    return summary;
}

// ---------------------------------------------------------------- dynamics

DensityMatrix initial_state(const Options& o, const ModelParams& p, const FockSpace& space, std::string& label) {
    if (o.initial == "coherent") {
        label = "coherent(sqrt(n_ex))";
        return coherent_state(space, std::sqrt(p.n_ex()));
    }
    if (o.initial == "alpha-plus") {
        label = "coherent(alpha_plus)";
        return coherent_state(space, meanfield::fixed_points(p).first);
    }
    if (o.initial == "vacuum") {
        label = "vacuum";
        return fock_state(space, 0);
    }
    if (o.initial == "steady") {
        label = "steady_state";
        return steady_state(p, space);
    }
    throw usage("--initial must be coherent, alpha-plus, vacuum or steady");
}

json cmd_dynamics(const Options& o, Writer& w) {
    const ModelParams p = make_params(o);
    const int d = cutoff_of(o, p);
    const FockSpace space(d);
    std::string label;
    const DensityMatrix rho0 = initial_state(o, p, space, label);
    dynamics::EvolveOptions eo;
    eo.initial_state = label;
    eo.dt = o.dt;

    dynamics::ObservableTrajectory tr;
    double trace_err = 0.0;
    if (o.frame == "rotating") {
        const double t_end = o.t_end > 0.0 ? o.t_end : 100.0 / p.gamma1;
        std::vector<double> grid(std::max(2, o.samples));
        for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = t_end * k / (grid.size() - 1);
        const auto ev = dynamics::evolve_rotating(rho0, p, nullptr, grid, eo);
        tr = ev.amplitude;
        trace_err = ev.max_trace_error;
    } else if (o.frame == "lab") {
        const double period = p.period();
        const double t_end = o.t_end > 0.0 ? o.t_end : 10.0 * period;
        const double dt = o.dt > 0.0 ? o.dt : period / 400.0;
        std::vector<double> grid(std::max(2, o.samples));
        for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = t_end * k / (grid.size() - 1);
        const auto ev = dynamics::evolve_lab(rho0, p, grid, dt, eo);
        tr = ev.amplitude;
        trace_err = ev.max_trace_error;
    } else if (o.frame == "stroboscopic") {
        eo.dt = o.dt;
        tr = dynamics::stroboscopic_series(rho0, p, o.periods, eo);
    } else {
        throw usage("--frame must be rotating, lab or stroboscopic");
    }
    const json h = prov(o, "dynamics", p, {{"cutoff", d}, {"initial_state", label}, {"frame", dynamics::to_string(tr.frame)}});
    io::CsvTable t(h, {"t", "re", "im", "frame"});
    for (std::size_t k = 0; k < tr.times.size(); ++k)
        t.add_row({num(tr.times[k]), num(tr.values[k].real()), num(tr.values[k].imag()), dynamics::to_string(tr.frame)});
    const std::string stem = std::string("dynamics_") + dynamics::to_string(tr.frame);
    w.table(stem, t, h);
    return {{"frame", dynamics::to_string(tr.frame)}, {"samples", tr.times.size()}, {"cutoff", d},
            {"max_trace_error", trace_err}, {"final", complex_json(tr.values.back())}};
}

// ---------------------------------------------------------------- occupation

json cmd_occupation(const Options& o, Writer& w) {
    const std::vector<double> nexs = o.nex_list.empty() ? std::vector<double>{1, 5, 10, 20} : parse_list(o.nex_list);
    const std::vector<double> ratios = parse_grid(o.grid.empty() ? "0:3:31" : o.grid);
    const auto rows = dynamics::stationary_occupation_scan(nexs, ratios, o.delta_ratio, o.cutoff);
    const ModelParams p = make_params(o, nexs.front(), 0.0);
    const json h = prov(o, "occupation", p, {{"nex_list", nexs}});
    io::CsvTable t(h, {"n_ex", "eta_ratio", "cutoff", "occupation_ratio", "meanfield_ratio"});
    json summary = json::array();
    for (double n : nexs) {
        double dist = 0.0;
        for (const auto& r : rows)
            if (r.n_ex == n) dist = std::max(dist, std::abs(r.occupation_ratio - r.meanfield_ratio));
        summary.push_back({{"n_ex", n}, {"max_distance_to_meanfield", dist}});
    }
    for (const auto& r : rows)
        t.add_row({num(r.n_ex), num(r.eta_ratio), num(r.cutoff), num(r.occupation_ratio), num(r.meanfield_ratio)});
    w.table("occupation", t, h);
    return {{"curves", summary}};
}

// ---------------------------------------------------------------- ep

json cmd_ep(const Options& o, Writer& w) {
    const auto nexs = nex_values(o);
    const bool liou = o.method == "liouvillian";
    if (!liou && o.method != "semiclassical") throw usage("--method must be liouvillian or semiclassical");
    std::optional<std::pair<double, double>> bracket;
    if (!o.bracket.empty()) bracket = parse_pair(o.bracket);

    const ModelParams p0 = make_params(o, nexs.front(), 1.0);
    const double eta_c = p0.eta_c();
    if (!(eta_c > 0.0)) throw usage("EP search needs a nonzero detuning");
    const json h = prov(o, "ep", p0, {{"method", o.method}, {"nex_list", nexs}});
    io::CsvTable t(h, {"n_ex", "cutoff", "eta_ep", "eta_ep_over_eta_c", "re_l1_below", "im_l1_below", "re_l1_above",
                       "re_l2_above"});
    json points = json::array();
    std::vector<std::pair<double, double>> fit_points;
    for (double n : nexs) {
        const ModelParams p = make_params(o, n, 1.0);
        double lo = bracket ? bracket->first : 1.0;
        double hi = bracket ? bracket->second : 2.0;
        double eta_ep = 0;
        Complex l1b, l1a, l2a;
        int d = 0;
        if (liou) {
            d = o.cutoff > 0 ? o.cutoff : default_cutoff(n);
            const FockSpace space(d);
            EpOptions eo;
            eo.coalescence_diagnostic = o.diagnostics;
            const EpResult r = detect_ep(p, space, {lo * eta_c, hi * eta_c}, eo);
            eta_ep = r.eta_ep;
            l1b = r.lambda1_below;
            l1a = r.lambda1_above;
            l2a = r.lambda2_above;
            json pt = {{"n_ex", n}, {"cutoff", d}, {"eta_ep", eta_ep}, {"eta_ep_over_eta_c", eta_ep / eta_c}};
            for (const auto& [eta, ov] : r.coalescence) pt["coalescence"].push_back({eta / eta_c, ov});
            points.push_back(pt);
        } else {
            const auto dl = semiclassical::Dimensionless::from(p);
            const auto r = semiclassical::detect_ep_semiclassical(dl, {lo * dl.eta_c(), hi * dl.eta_c()}, o.trunc_m);
            eta_ep = r.eta_ep * p.gamma1;
            l1b = r.lambda1_below;
            l1a = r.lambda1_above;
            l2a = r.lambda2_above;
            points.push_back({{"n_ex", n}, {"eta_ep", eta_ep}, {"eta_ep_over_eta_c", eta_ep / eta_c}});
        }
        fit_points.emplace_back(n, eta_ep);
        t.add_row({num(n), num(d), num(eta_ep), num(eta_ep / eta_c), num(l1b.real()), num(l1b.imag()), num(l1a.real()),
                   num(l2a.real())});
    }
    json j = h;
    j["points"] = points;
    j["eta_ep_over_eta_c"] = fit_points.front().second / eta_c;
    if (fit_points.size() >= 4) {
        const PowerLawFit f = ep_scaling_fit(fit_points, eta_c);
        j["fit"] = {{"beta", f.beta}, {"beta_stderr", f.beta_stderr}, {"prefactor", f.prefactor}, {"points", f.points}};
    }
    w.write_json("ep.json", j);
    w.table("ep", t, h);
    json s = {{"eta_ep_over_eta_c", j["eta_ep_over_eta_c"]}, {"points", points}};
    if (j.contains("fit")) s["fit"] = j["fit"];
    return s;
}

// ---------------------------------------------------------------- ssb

json cmd_ssb(const Options& o, Writer& w) {
    const auto nexs = nex_values(o);
    const double ratio = o.eta_ratio.value_or(2.0);
    Options oo = o;
    oo.eta_ratio = ratio;
    const ModelParams p0 = make_params(oo, nexs.front());
    const json h = prov(o, "ssb", p0, {{"nex_list", nexs}});
    io::CsvTable t(h, {"n_ex", "cutoff", "lambda1", "trace_distance_ss_xi", "re_a_plus", "im_a_plus", "re_alpha_mf",
                       "im_alpha_mf", "re_rel_error"});
    json summary = json::array();
    for (double n : nexs) {
        const ModelParams p = make_params(oo, n);
        const int d = cutoff_of(o, p);
        DiagonalizeOptions dopts;
        dopts.vectors = ModeVectors::Leading;
        dopts.leading = 1;
        const SpectralDecomposition dec = diagonalize(p, FockSpace(d), dopts);
        const SymmetryBrokenPair s = symmetry_broken_states(dec);
        const Complex amf = meanfield::fixed_points(p).first;
        const double rel = std::abs(s.a_plus.real() - amf.real()) / std::abs(amf);
        t.add_row({num(n), num(d), num(dec.modes[1].lambda.real()), num(s.trace_distance_ss_xi), num(s.a_plus.real()),
                   num(s.a_plus.imag()), num(amf.real()), num(amf.imag()), num(rel)});
        summary.push_back({{"n_ex", n}, {"trace_distance", s.trace_distance_ss_xi}, {"re_rel_error", rel}});
    }
    w.table("ssb", t, h);
    return {{"points", summary}};
}

// ---------------------------------------------------------------- fig

json cmd_fig(const Options& base, const fs::path& root) {
    if (base.figure < 1 || base.figure > 7) throw usage("figure number must be 1..7");
    const bool q = base.quick;
    const fs::path dir = root / ("fig" + std::to_string(base.figure));
    json manifest;
    manifest["figure"] = base.figure;
    manifest["version"] = io::version();
    manifest["command"] = base.command_line;
    manifest["quick"] = q;
    json steps = json::array();
    std::vector<std::string> files;

    auto step = [&](const std::string& name, Options o, json (*fn)(const Options&, Writer&)) {
        Writer w(dir / name, "csv");
        o.format = "csv";
        const json s = fn(o, w);
        for (const auto& f : w.files()) files.push_back(name + "/" + f);
        steps.push_back({{"step", name}, {"summary", s}});
    };
    Options o = base;
    o.delta_ratio = base.delta_ratio;

    switch (base.figure) {
        case 1: {
            Options m = o;
            m.eta_ratio = 0.4;
            m.grid = q ? "0:3:13" : "0:3:61";
            step("meanfield", m, cmd_meanfield);
            Options oc = o;
            oc.nex_list = q ? "1,5" : "1,5,10,20";
            oc.grid = q ? "0:3:7" : "0:3:31";
            step("occupation", oc, cmd_occupation);
            break;
        }
        case 2: {
            for (double r : {0.4, 0.8}) {
                for (double n : q ? std::vector<double>{5} : std::vector<double>{5, 10, 20}) {
                    Options dy = o;
                    dy.eta_ratio = r;
                    dy.nex = n;
                    dy.frame = "rotating";
                    dy.t_end = q ? 40 : 200;
                    dy.samples = q ? 81 : 401;
                    step("dynamics_r" + io::num(r) + "_n" + io::num(n), dy, cmd_dynamics);
                    Options mf = dy;
                    mf.record_every = 100;
                    step("meanfield_r" + io::num(r) + "_n" + io::num(n), mf, cmd_meanfield);
                }
            }
            Options sp = o;
            sp.eta_ratio = 0.4;
            sp.nex = q ? 5 : 10;
            step("spectrum", sp, cmd_spectrum);
            Options b = o;
            b.eta_ratio = 0.4;
            b.nex_list = q ? "5" : "5,10,20";
            b.max_harmonic = 4;
            step("bands", b, cmd_bands);
            break;
        }
        case 3: {
            for (double r : {2.0, 3.0}) {
                for (double n : q ? std::vector<double>{5, 8} : std::vector<double>{5, 10, 15, 20}) {
                    Options sp = o;
                    sp.eta_ratio = r;
                    sp.nex = n;
                    step("spectrum_r" + io::num(r) + "_n" + io::num(n), sp, cmd_spectrum);
                }
                Options sc = o;
                sc.eta_ratio = r;
                sc.nex_list = q ? "5,8,10,20" : "5,10,15,20,30,40,60,80";
                step("kramers_r" + io::num(r), sc, cmd_semiclassical);
            }
            break;
        }
        case 4: {
            Options st = o;
            st.eta_ratio = 2.0;
            st.nex = q ? 5 : 20;
            st.omega_s = o.omega_s > 0 ? o.omega_s : 20.0 * kPi;
            st.initial = "alpha-plus";
            st.frame = "stroboscopic";
            st.periods = q ? 200 : 2000;
            step("stroboscopic", st, cmd_dynamics);
            Options lab = st;
            lab.frame = "lab";
            lab.t_end = 4.0 * kPi / st.omega_s * 2;
            lab.samples = 801;
            lab.cutoff = q ? 24 : 0;
            step("lab", lab, cmd_dynamics);
            Options sp = st;
            sp.frame = "rotating";
            step("spectrum", sp, cmd_spectrum);
            break;
        }
        case 5: {
            Options ep = o;
            ep.nex_list = q ? "5" : "20";
            step("ep_liouvillian", ep, cmd_ep);
            Options sc = o;
            sc.method = "semiclassical";
            sc.nex_list = q ? "500,1000,2000,5000" : "500,1000,2000,5000,10000";
            step("ep_semiclassical", sc, cmd_ep);
            Options scan = o;
            scan.nex = q ? 5 : 20;
            for (double r : parse_grid(q ? "0.8:1.6:3" : "0.8:2:13")) {
                scan.eta_ratio = r;
                step("spectrum_r" + io::num(r), scan, cmd_spectrum);
            }
            break;
        }
        case 6: {
            for (double r : {0.6, 0.9}) {
                Options sc = o;
                sc.eta_ratio = r;
                sc.nex_list = q ? "10,100" : "10,30,100,300,1000,3000,10000";
                sc.grid.clear();
                step("semiclassical_r" + io::num(r), sc, cmd_semiclassical);
            }
            break;
        }
        case 7: {
            Options s = o;
            s.eta_ratio = 2.0;
            s.nex_list = q ? "3,5" : "5,10,15,20";
            step("ssb", s, cmd_ssb);
            break;
        }
    }
    manifest["files"] = files;
    manifest["steps"] = steps;
    io::write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
    return {{"manifest", (dir / "manifest.json").string()}, {"files", files.size()}};
}

std::string join_args(const std::vector<std::string>& args) {
    std::string s = "qvdp";
    for (const auto& a : args) s += " " + a;
    return s;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    Options o;
    o.command_line = join_args(args);
    CLI::App app{"Squeezed quantum van der Pol oscillator: spectra, semiclassics, dynamics", "qvdp"};
    app.footer(kExitCodes);
    app.fallthrough();
    app.require_subcommand(1, 1);
    app.set_config("--config", "", "flat key=value file; command-line flags override it");

    app.add_option("--gamma1", o.gamma1, "amplification rate (unit of rates)")->capture_default_str();
    app.add_option("--nex", o.nex, "mean-field excitation number gamma1/(2 gamma2)");
    app.add_option("--gamma2", o.gamma2, "two-boson loss rate (alternative to --nex)");
    app.add_option("--delta-ratio", o.delta_ratio, "detuning / gamma1")->capture_default_str();
    app.add_option("--eta-ratio", o.eta_ratio, "squeezing / eta_c, eta_c = |delta|/2");
    app.add_option("--eta", o.eta, "squeezing strength (alternative to --eta-ratio)");
    app.add_option("--omega-s", o.omega_s, "half the drive frequency (lab frame)");
    app.add_option("--cutoff", o.cutoff, "Fock cutoff d (default: regime-aware heuristic)");
    app.add_option("--trunc-m", o.trunc_m, "Fourier truncation M of the phase operators")->capture_default_str();
    app.add_option("--dt", o.dt, "time step");
    app.add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    app.add_option("--grid", o.grid, "start:stop:count grid (eta/eta_c)");
    app.add_option("--out", o.out, "output directory")->capture_default_str();
    app.add_option("--format", o.format, "table format: csv or json")->capture_default_str();
    app.add_option("--nex-list", o.nex_list, "comma-separated n_ex values");

    auto* spectrum = app.add_subcommand("spectrum", "Liouvillian eigenvalues");
    spectrum->add_option("--sidecar-modes", o.sidecar_modes, "write this many leading modes per sector to a binary sidecar");
    auto* bands = app.add_subcommand("bands", "band table of the limit-cycle spectrum");
    bands->add_option("--max-harmonic", o.max_harmonic, "largest |n| clustered")->capture_default_str();
    auto* mf = app.add_subcommand("meanfield", "bifurcation data and mean-field trajectories");
    mf->add_option("--t-end", o.t_end, "trajectory length");
    mf->add_option("--record-every", o.record_every, "record stride")->capture_default_str();
    auto* sc = app.add_subcommand("semiclassical", "phase Fokker-Planck spectra, c_n and Kramers rates");
    sc->add_option("--modes", o.modes, "number of c_n constants")->capture_default_str();
    auto* lg = app.add_subcommand("langevin", "Langevin ensembles and estimators");
    lg->add_option("--process", o.process, "phase, intensity or amplitude")->capture_default_str();
    lg->add_option("--estimator", o.estimator, "jump, lifetime, diffusion, noise, variance, autocorr, intensity");
    lg->add_option("--trajectories", o.trajectories, "ensemble size")->capture_default_str();
    lg->add_option("--t-end", o.t_end, "simulated time");
    lg->add_option("--record-every", o.record_every, "record stride")->capture_default_str();
    lg->add_option("--core-radius", o.core_radius, "well core radius for jump counting (rad)")->capture_default_str();
    lg->add_flag("--dump-trajectories", o.dump, "also write every recorded sample");
    auto* dy = app.add_subcommand("dynamics", "rotating, lab and stroboscopic evolution");
    dy->add_option("--frame", o.frame, "rotating, lab or stroboscopic")->capture_default_str();
    dy->add_option("--initial", o.initial, "coherent, alpha-plus, vacuum or steady")->capture_default_str();
    dy->add_option("--t-end", o.t_end, "final time");
    dy->add_option("--samples", o.samples, "output samples")->capture_default_str();
    dy->add_option("--periods", o.periods, "stroboscopic periods")->capture_default_str();
    app.add_subcommand("occupation", "stationary occupation scan");
    auto* ep = app.add_subcommand("ep", "exceptional point bisection and scaling fit");
    ep->add_option("--method", o.method, "liouvillian or semiclassical")->capture_default_str();
    ep->add_option("--bracket", o.bracket, "lo:hi in units of eta_c (default 1:2)");
    ep->add_flag("--diagnostics", o.diagnostics, "eigenvector coalescence diagnostic");
    app.add_subcommand("ssb", "symmetry-broken states and trace distances");
    auto* fig = app.add_subcommand("fig", "data pipeline behind one figure, with manifest");
    fig->add_option("n", o.figure, "figure number 1..7")->required();
    fig->add_flag("--quick", o.quick, "reduced sizes for smoke runs");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        json summary;
        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "fig") {
            summary = cmd_fig(o, o.out);
        } else {
            Writer w(o.out, o.format);
            if (name == "spectrum") summary = cmd_spectrum(o, w);
            else if (name == "bands") summary = cmd_bands(o, w);
            else if (name == "meanfield") summary = cmd_meanfield(o, w);
            else if (name == "semiclassical") summary = cmd_semiclassical(o, w);
            else if (name == "langevin") summary = cmd_langevin(o, w);
            else if (name == "dynamics") summary = cmd_dynamics(o, w);
            else if (name == "occupation") summary = cmd_occupation(o, w);
            else if (name == "ep") summary = cmd_ep(o, w);
            else if (name == "ssb") summary = cmd_ssb(o, w);
            summary["files"] = w.files();
        }
        summary["command"] = name;
        std::cout << summary.dump(2) << "\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 6;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace qvdp::cli
