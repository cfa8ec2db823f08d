#pragma once

#include <utility>
#include <vector>

#include "qvdp/params.hpp"
#include "qvdp/types.hpp"

// Decoupled semiclassical (truncated Wigner) eigenproblems. Internally
// dimensionless: tau = gamma1 t, delta~ = delta/gamma1, eta~ = eta/gamma1.
namespace qvdp::semiclassical {

struct Dimensionless {
    double delta = 0.1;
    double eta = 0.0;
    double n_ex = 10.0;

    static Dimensionless from(const ModelParams& p);
    double eta_c() const;
    double omega() const;  // sqrt(delta^2 - 4 eta^2), wrong-regime error otherwise
};

// Intensity (Ornstein-Uhlenbeck) problem.
std::vector<double> intensity_eigenvalues(int m_max, double gamma1 = 1.0);
double intensity_stationary_sd(double n_ex);
// psi_n(dN) = sqrt(w/pi) H_n(x) e^{-x^2}, x = sqrt(w) dN, w = 1/(3 n_ex), with
// physicists' Hermite H_n; psi_0 is the stationary Gaussian of variance 3 n_ex/2.
double intensity_eigenfunction(int n, double dn, double n_ex);
// H_n(x) / (2^n n!), so that the integral of left_m psi_n is delta_mn.
double intensity_left_eigenfunction(int n, double dn, double n_ex);

enum class Sector { EvenA, OddB };
const char* to_string(Sector sector);

// Tridiagonal truncation of the phase Fokker-Planck operator in Fourier space.
// OddB: k = 2q+1 with q = -M-1..M (size 2M+2), diag i delta k - 3k^2/(8 n),
//       couplings -eta k (to q-1) and +eta k (to q+1).
// EvenA: positive block q = 0..M (size M+1) of the k = 2q modes; row 0 vanishes.
struct PhaseFPOperator {
    Sector sector = Sector::OddB;
    int truncation = 0;
    Dimensionless params;
    std::vector<int> wavenumbers;  // Fourier index k of each row
    CVector diag;
    CVector lower;  // A(j, j-1), j >= 1
    CVector upper;  // A(j, j+1)

    int size() const { return static_cast<int>(diag.size()); }
    CMatrix dense() const;
};

PhaseFPOperator build_phase_fp(Sector sector, int truncation, const Dimensionless& params);

// Eigenvalues sorted by (-Re, |Im|, Im). For EvenA the conjugate negative-q block is
// appended so the returned list covers the whole even sector with exactly one zero.
std::vector<Complex> phase_spectrum(const PhaseFPOperator& op);

struct ConvergedSpectrum {
    std::vector<Complex> values;
    double leading_change = 0.0;  // max change of the 6 leading eigenvalues under M -> M+16
    bool converged = false;
};
ConvergedSpectrum phase_spectrum_checked(Sector sector, int truncation, const Dimensionless& params,
                                         double tol = 1e-10);

// Phi = H + V / n_ex: H is the drift part (diagonal imaginary + couplings),
// V the real diagonal diffusion part.
struct PerturbationSplit {
    CMatrix h;
    RVector v;
    double n_ex = 0.0;
};
PerturbationSplit split_perturbation(const PhaseFPOperator& op);

struct CnEntry {
    int harmonic = 0;
    double c = 0.0;              // -Re nu^(1)
    Complex nu1;
    Complex nu0;                 // unperturbed eigenvalue matched to i n Omega
    double nu0_mismatch = 0.0;   // |nu0 - i n Omega| / Omega
    bool imaginary_part_flag = false;  // |Im nu1| > 1e-6 |nu1|
};

// First-order c_n for n = 1..n_modes: odd n from the odd sector, even n from the
// even positive block.
std::vector<CnEntry> perturbative_cn(const Dimensionless& params, int truncation, int n_modes);

struct KramersRates {
    double rate_right = 0.0;  // over the right barrier
    double rate_left = 0.0;
    double gamma_gap = 0.0;   // 2 * dominant direction rate
    double suppression = 0.0; // minor / dominant
    double barrier_right = 0.0;
    double barrier_left = 0.0;
};

// Closed forms with D = 3/(8 n_ex), prefactor C = (2/pi) sqrt(4 eta^2 - delta^2).
KramersRates kramers_rates(const Dimensionless& params);
// Same from the potential extrema and curvatures (independent route).
KramersRates kramers_rates_from_potential(const Dimensionless& params);

struct EpScan {
    double eta_ep = 0.0;
    double eta_lo = 0.0;
    double eta_hi = 0.0;
    Complex lambda1_below, lambda2_below;
    Complex lambda1_above, lambda2_above;
    int iterations = 0;
};

// Bisection on the leading odd-sector pair of Phi (complex below, real above), started
// from the lowest crossing found by a geometric scan up from the lower bracket end.
// The truncation is doubled while the scan classification depends on it.
EpScan detect_ep_semiclassical(const Dimensionless& base, std::pair<double, double> eta_bracket,
                               int truncation = 64, double rel_width = 1e-6);

// Leading two eigenvalues of the odd sector.
std::pair<Complex, Complex> leading_odd_pair(const Dimensionless& params, int truncation);
// Smallest nonzero decay rate across both sectors.
double phase_gap(const Dimensionless& params, int truncation);

}  // namespace qvdp::semiclassical
