#include "qvdp/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <string>

#include "qvdp/error.hpp"
#include "qvdp/linalg.hpp"
#include "qvdp/meanfield.hpp"
#include "qvdp/spectral.hpp"

namespace qvdp::semiclassical {

Dimensionless Dimensionless::from(const ModelParams& p) {
    p.validate();
    return {p.delta / p.gamma1, p.eta / p.gamma1, p.n_ex()};
}

double Dimensionless::eta_c() const { return std::abs(delta) / 2.0; }

double Dimensionless::omega() const {
    const double disc = delta * delta - 4.0 * eta * eta;
    if (!(disc > 0.0)) throw Error(ErrorKind::WrongRegime, "no limit cycle for eta >= eta_c");
    return std::sqrt(disc);
}

std::vector<double> intensity_eigenvalues(int m_max, double gamma1) {
    if (m_max < 0) throw Error(ErrorKind::InvalidArgument, "m_max must be >= 0");
    std::vector<double> mu(m_max + 1);
    for (int m = 0; m <= m_max; ++m) mu[m] = -m * gamma1;
    return mu;
}

double intensity_stationary_sd(double n_ex) { return std::sqrt(1.5 * n_ex); }

double intensity_eigenfunction(int n, double dn, double n_ex) {
    const double w = 1.0 / (3.0 * n_ex);
    const double x = std::sqrt(w) * dn;
    return std::sqrt(w / kPi) * std::hermite(static_cast<unsigned>(n), x) * std::exp(-x * x);
}

double intensity_left_eigenfunction(int n, double dn, double n_ex) {
    const double w = 1.0 / (3.0 * n_ex);
    const double x = std::sqrt(w) * dn;
    return std::hermite(static_cast<unsigned>(n), x) / (std::pow(2.0, n) * std::tgamma(n + 1.0));
}

const char* to_string(Sector sector) { return sector == Sector::EvenA ? "even_a" : "odd_b"; }

CMatrix PhaseFPOperator::dense() const {
    const int n = size();
    CMatrix a = CMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        a(j, j) = diag(j);
        if (j > 0) a(j, j - 1) = lower(j);
        if (j + 1 < n) a(j, j + 1) = upper(j);
    }
    return a;
}

namespace {

// -3 k^2 / 8, the diffusion entry before division by n_ex.
double diffusion_entry(int k) { return -3.0 * k * k / 8.0; }

void check(const Dimensionless& p) {
    if (!(p.n_ex > 0.0) || !std::isfinite(p.n_ex)) throw Error(ErrorKind::InvalidArgument, "n_ex must be positive");
    if (p.eta < 0.0 || !std::isfinite(p.eta) || !std::isfinite(p.delta))
        throw Error(ErrorKind::InvalidArgument, "bad dimensionless parameters");
}

std::vector<Complex> sorted(std::vector<Complex> v) {
    std::vector<Complex> out;
    out.reserve(v.size());
    for (int j : spectral_order(v)) out.push_back(v[j]);
    return out;
}

}  // namespace

PhaseFPOperator build_phase_fp(Sector sector, int truncation, const Dimensionless& p) {
    check(p);
    if (truncation < 8) throw Error(ErrorKind::InvalidArgument, "truncation M must be >= 8");
    PhaseFPOperator op;
    op.sector = sector;
    op.truncation = truncation;
    op.params = p;
    if (sector == Sector::OddB) {
        for (int q = -truncation - 1; q <= truncation; ++q) op.wavenumbers.push_back(2 * q + 1);
    } else {
        for (int q = 0; q <= truncation; ++q) op.wavenumbers.push_back(2 * q);
    }
    const int n = static_cast<int>(op.wavenumbers.size());
    op.diag.resize(n);
    op.lower = CVector::Zero(n);
    op.upper = CVector::Zero(n);
    for (int j = 0; j < n; ++j) {
        const int k = op.wavenumbers[j];
        op.diag(j) = Complex(diffusion_entry(k) / p.n_ex, p.delta * k);
        if (j > 0) op.lower(j) = -p.eta * k;
        if (j + 1 < n) op.upper(j) = p.eta * k;
    }
    return op;
}

std::vector<Complex> phase_spectrum(const PhaseFPOperator& op) {
    if (op.sector == Sector::OddB) return sorted(linalg::eig(op.dense(), false, false).values);
    // Row q = 0 vanishes: spectrum is {0} plus the q >= 1 block and its conjugate.
    const CMatrix a = op.dense();
    const int n = op.size();
    const auto block = linalg::eig(CMatrix(a.bottomRightCorner(n - 1, n - 1)), false, false).values;
    std::vector<Complex> all{Complex(0.0)};
    for (const Complex& z : block) {
        all.push_back(z);
        all.push_back(std::conj(z));
    }
    return sorted(all);
}

ConvergedSpectrum phase_spectrum_checked(Sector sector, int truncation, const Dimensionless& p, double tol) {
    ConvergedSpectrum cs;
    cs.values = phase_spectrum(build_phase_fp(sector, truncation, p));
    const std::vector<Complex> wider = phase_spectrum(build_phase_fp(sector, truncation + 16, p));
    const std::size_t k = std::min<std::size_t>(6, cs.values.size());
    for (std::size_t j = 0; j < k; ++j) cs.leading_change = std::max(cs.leading_change, std::abs(cs.values[j] - wider[j]));
    cs.converged = cs.leading_change < tol;
    if (!cs.converged)
        std::cerr << "warning: phase FP truncation M=" << truncation << " not converged, leading change "
                  << cs.leading_change << "\n";
    return cs;
}

PerturbationSplit split_perturbation(const PhaseFPOperator& op) {
    PerturbationSplit s;
    s.n_ex = op.params.n_ex;
    s.h = op.dense();
    s.v.resize(op.size());
    for (int j = 0; j < op.size(); ++j) {
        s.v(j) = diffusion_entry(op.wavenumbers[j]);
        s.h(j, j) = Complex(0.0, s.h(j, j).imag());
    }
    return s;
}

std::vector<CnEntry> perturbative_cn(const Dimensionless& p, int truncation, int n_modes) {
    if (n_modes < 1) throw Error(ErrorKind::InvalidArgument, "n_modes must be >= 1");
    const double omega = p.omega();
    const double sign = p.delta >= 0.0 ? 1.0 : -1.0;

    auto solve_sector = [&](Sector sector) {
        PerturbationSplit s = split_perturbation(build_phase_fp(sector, truncation, p));
        if (sector == Sector::EvenA) {
            // drop the decoupled q = 0 row/column
            const int n = static_cast<int>(s.h.rows());
            s.h = CMatrix(s.h.bottomRightCorner(n - 1, n - 1));
            s.v = RVector(s.v.tail(n - 1));
        }
        return std::make_pair(s, linalg::eig(s.h, true, true));
    };
    const auto odd = solve_sector(Sector::OddB);
    const auto even = n_modes >= 2 ? solve_sector(Sector::EvenA) : odd;

    std::vector<CnEntry> out;
    for (int n = 1; n <= n_modes; ++n) {
        const auto& [split, es] = (n % 2 == 1) ? odd : even;
        const Complex target(0.0, sign * n * omega);
        int best = 0;
        for (int j = 1; j < static_cast<int>(es.values.size()); ++j)
            if (std::abs(es.values[j] - target) < std::abs(es.values[best] - target)) best = j;
        const CVector r = es.right.col(best);
        const CVector l = es.left.col(best);
        const Complex norm = l.dot(r);
        const Complex vr = l.dot(split.v.cast<Complex>().cwiseProduct(r));
        CnEntry e;
        e.harmonic = n;
        e.nu0 = es.values[best];
        e.nu0_mismatch = std::abs(e.nu0 - target) / omega;
        e.nu1 = vr / norm;
        e.c = -e.nu1.real();
        e.imaginary_part_flag = std::abs(e.nu1.imag()) > 1e-6 * std::abs(e.nu1);
        if (e.imaginary_part_flag)
            std::cerr << "note: nu1 for n=" << n << " has imaginary part " << e.nu1.imag() << "\n";
        if (e.nu0_mismatch > 1e-6)
            std::cerr << "note: unperturbed eigenvalue for n=" << n << " off i n Omega by " << e.nu0_mismatch
                      << " Omega\n";
        out.push_back(e);
    }
    return out;
}

namespace {

void require_bistable(const Dimensionless& p) {
    check(p);
    if (!(2.0 * p.eta > std::abs(p.delta))) throw Error(ErrorKind::WrongRegime, "Kramers rates need eta > eta_c");
}

KramersRates assemble(double prefactor_left, double prefactor_right, double b_left, double b_right, double n_ex) {
    const double diff = 3.0 / (8.0 * n_ex);
    KramersRates k;
    k.barrier_left = b_left;
    k.barrier_right = b_right;
    k.rate_left = prefactor_left * std::exp(-b_left / diff);
    k.rate_right = prefactor_right * std::exp(-b_right / diff);
    const double dominant = std::max(k.rate_left, k.rate_right);
    k.gamma_gap = 2.0 * dominant;
    k.suppression = std::min(k.rate_left, k.rate_right) / dominant;
    return k;
}

}  // namespace

KramersRates kramers_rates(const Dimensionless& p) {
    require_bistable(p);
    const double s = std::sqrt(4.0 * p.eta * p.eta - p.delta * p.delta);
    const double tilt = p.delta * std::asin(p.delta / (2.0 * p.eta));  // = |delta| asin(|delta|/2eta)
    const double half_c = s / kPi;                                     // C/2
    return assemble(half_c, half_c, s + tilt - p.delta * kPi / 2.0, s + tilt + p.delta * kPi / 2.0, p.n_ex);
}

KramersRates kramers_rates_from_potential(const Dimensionless& p) {
    require_bistable(p);
    ModelParams mp;
    mp.gamma1 = 1.0;
    mp.gamma2 = 1.0 / (2.0 * p.n_ex);
    mp.delta = p.delta;
    mp.eta = p.eta;
    const auto ex = meanfield::phase_extrema(mp);
    const double phi_m = ex.minima.front();
    double left = std::numeric_limits<double>::infinity(), right = left;
    for (double m : ex.maxima) {
        double dl = std::fmod(phi_m - m + 4.0 * kPi, 2.0 * kPi);
        double dr = std::fmod(m - phi_m + 4.0 * kPi, 2.0 * kPi);
        left = std::min(left, dl);
        right = std::min(right, dr);
    }
    const double v_m = meanfield::phase_potential(phi_m, mp);
    const double phi_l = phi_m - left, phi_r = phi_m + right;
    const double curv_m = meanfield::phase_potential_d2(phi_m, mp);
    auto pref = [&](double phi_max) {
        return std::sqrt(curv_m * std::abs(meanfield::phase_potential_d2(phi_max, mp))) / (2.0 * kPi);
    };
    return assemble(pref(phi_l), pref(phi_r), meanfield::phase_potential(phi_l, mp) - v_m,
                    meanfield::phase_potential(phi_r, mp) - v_m, p.n_ex);
}

std::pair<Complex, Complex> leading_odd_pair(const Dimensionless& p, int truncation) {
    const auto v = phase_spectrum(build_phase_fp(Sector::OddB, truncation, p));
    return {v[0], v[1]};
}

double phase_gap(const Dimensionless& p, int truncation) {
    const auto odd = phase_spectrum(build_phase_fp(Sector::OddB, truncation, p));
    const auto even = phase_spectrum(build_phase_fp(Sector::EvenA, truncation, p));
    // even[0] is the stationary zero
    return std::min(-odd[0].real(), -even[1].real());
}

EpScan detect_ep_semiclassical(const Dimensionless& base, std::pair<double, double> bracket, int truncation,
                               double rel_width) {
    double lo = bracket.first, hi = bracket.second;
    if (!(lo < hi) || lo < 0.0) throw Error(ErrorKind::InvalidArgument, "eta bracket must satisfy 0 <= lo < hi");
    const double tol = 1e-9 * std::max(std::abs(base.delta), 1e-300);
    int m = truncation;
    auto at = [&](double eta, int trunc) {
        Dimensionless q = base;
        q.eta = eta;
        return leading_odd_pair(q, trunc);
    };
    auto is_complex = [&](const std::pair<Complex, Complex>& v) { return std::abs(v.first.imag()) > tol; };
    auto below = at(lo, m), above = at(hi, m);
    if (!is_complex(below) || is_complex(above))
        throw Error(ErrorKind::Bracket, "leading odd pair must be complex at eta=" + std::to_string(lo) +
                                            " and real at eta=" + std::to_string(hi));
    // Far above the EP the truncated operator is strongly non-normal and can show
    // spurious complex pairs, so locate the lowest crossing by a geometric scan up
    // from lo and confirm the bracket ends with a doubled truncation.
    const double span = hi - lo;
    for (int k = 30; k >= 0; --k) {
        const double eta = lo + span * std::ldexp(1.0, -k);
        const auto v = at(eta, m);
        if (is_complex(v)) continue;
        if (is_complex(at(eta, 2 * m)) && m < 4096) {
            m *= 2;
            k = 31;
            continue;
        }
        hi = eta;
        above = v;
        if (k < 30) {
            lo = lo + span * std::ldexp(1.0, -(k + 1));
            below = at(lo, m);
        }
        break;
    }
    EpScan res;
    while ((hi - lo) > rel_width * 0.5 * (hi + lo)) {
        const double mid = 0.5 * (lo + hi);
        const auto v = at(mid, m);
        if (is_complex(v)) {
            lo = mid;
            below = v;
        } else {
            hi = mid;
            above = v;
        }
        ++res.iterations;
    }
    res.eta_lo = lo;
    res.eta_hi = hi;
    res.eta_ep = 0.5 * (lo + hi);
    res.lambda1_below = below.first;
    res.lambda2_below = below.second;
    res.lambda1_above = above.first;
    res.lambda2_above = above.second;
    return res;
}

}  // namespace qvdp::semiclassical
