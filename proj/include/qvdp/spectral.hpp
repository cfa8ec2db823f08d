#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qvdp/fock.hpp"
#include "qvdp/liouvillian.hpp"
#include "qvdp/params.hpp"
#include "qvdp/types.hpp"

namespace qvdp {

enum class ModeVectors { None, Leading, All };

struct DiagonalizeOptions {
    bool sector_reduce = true;
    ModeVectors vectors = ModeVectors::All;
    int leading = 2;          // modes per sector that get vectors under ModeVectors::Leading
    long max_dim = 16384;     // full-path guard on D = d^2
    int max_sector = 8192;    // sector-path guard
};

struct EigenMode {
    Complex lambda;
    int parity = 1;
    std::optional<CMatrix> right;
    std::optional<CMatrix> left;
    bool biorthonormal = false;  // false near an EP, where Tr[l^dag r] ~ 0
};

struct SpectralDecomposition {
    std::vector<EigenMode> modes;  // sorted by (-Re, |Im|, Im)
    ModelParams params;
    int cutoff = 0;

    int size() const { return static_cast<int>(modes.size()); }
    Complex eigenvalue(int j) const { return modes.at(j).lambda; }
    std::vector<Complex> eigenvalues() const;
};

// Deterministic ordering by (-Re, |Im|, Im) on values quantized relative to the
// spectral radius, so conjugate pairs with rounding noise keep a stable order.
std::vector<int> spectral_order(const std::vector<Complex>& values);

// Sector-reduced path builds each parity block matrix-free from the rotating
// generator; the dense superoperator is never formed.
SpectralDecomposition diagonalize(const ModelParams& params, const FockSpace& space,
                                  const DiagonalizeOptions& opts = {});
// Path from an explicit superoperator (cross-checks at small d).
SpectralDecomposition diagonalize(const Superoperator& op, const ModelParams& params,
                                  const DiagonalizeOptions& opts = {});

// Sorted eigenvalues of one parity block, no vectors.
std::vector<Complex> sector_eigenvalues(const ModelParams& params, int d, Parity parity);

DensityMatrix steady_state(const SpectralDecomposition& dec);
// Null vector of the even block by inverse iteration; cheap when only rho_ss is needed.
DensityMatrix steady_state(const ModelParams& params, const FockSpace& space);
// max |L rho| entry
double generator_residual(const ModelParams& params, const CMatrix& rho);

struct GapInfo {
    double gamma1 = 0.0;  // -Re lambda_1
    int parity = 0;
    Complex lambda1;
    Complex lambda2;
    bool real_pair = false;  // both lambda_1 and lambda_2 real
};
GapInfo liouvillian_gap(const SpectralDecomposition& dec);

struct BandStructure {
    double omega = 0.0;
    double tolerance = 0.0;
    std::vector<int> harmonics;                // n for each band
    std::vector<std::vector<int>> bands;       // mode indices, ascending decay rate
    std::vector<double> band_frequencies;      // n * omega
    std::vector<int> fundamental;              // lowest-decay mode per band
    std::vector<int> second;                   // second-lowest, -1 if absent
    std::vector<double> interband_gap;         // Gamma(second) - Gamma(fundamental), NaN if absent

    // Decay rate of the fundamental mode at harmonic n, NaN if the band is missing.
    double fundamental_rate(int n, const std::vector<Complex>& values) const;
};

// Each mode joins the band of its nearest harmonic n = round(Im/omega), |n| <= max_harmonic,
// provided |Im - n omega| < max(0.25 omega, 3 gamma1/n_ex).
BandStructure cluster_bands(const std::vector<Complex>& values, double omega, double tolerance,
                            int max_harmonic);
BandStructure band_structure(const SpectralDecomposition& dec, double omega, int max_harmonic = 6);
double band_tolerance(double omega, double gamma1, double n_ex);

struct EpOptions {
    double rel_width = 1e-4;
    double imag_tol = 1e-6;        // relative to gamma1
    bool coalescence_diagnostic = false;
};

struct EpResult {
    double eta_ep = 0.0;
    double eta_lo = 0.0;  // last complex point
    double eta_hi = 0.0;  // last real point
    Complex lambda1_below, lambda2_below;
    Complex lambda1_above, lambda2_above;
    int iterations = 0;
    // (eta, |<r1, r2>| / (|r1| |r2|)) above the EP; tends to 1 on approach.
    std::vector<std::pair<double, double>> coalescence;
};

EpResult detect_ep(const ModelParams& params_base, const FockSpace& space, std::pair<double, double> eta_bracket,
                   const EpOptions& opts = {});

struct PowerLawFit {
    double beta = 0.0;       // y ~ prefactor * x^(-beta)
    double beta_stderr = 0.0;
    double prefactor = 0.0;
    int points = 0;
};

// Least squares of log(eta_EP - eta_c) against log n_ex.
PowerLawFit ep_scaling_fit(const std::vector<std::pair<double, double>>& etas_ep, double eta_c);
// Generic y = A x^(-beta) fit on positive data.
PowerLawFit power_law_fit(const std::vector<double>& x, const std::vector<double>& y);

struct SymmetryBrokenPair {
    DensityMatrix rho_plus;
    DensityMatrix rho_minus;
    DensityMatrix xi;
    DensityMatrix rho_ss;
    CMatrix r1;                        // (rho_plus - rho_minus) / 2
    double trace_distance_ss_xi = 0.0;
    Complex a_plus;                    // <a> in rho_plus
};

SymmetryBrokenPair symmetry_broken_states(const SpectralDecomposition& dec);

}  // namespace qvdp
