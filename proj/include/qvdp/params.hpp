#pragma once

namespace qvdp {

// Rates and frequencies of the squeezed van der Pol model. Units are set by
// the caller; the CLI uses gamma1 = 1.
struct ModelParams {
    double gamma1 = 1.0;   // linear amplification
    double gamma2 = 0.05;  // two-boson loss
    double delta = 0.1;    // detuning omega0 - omega_s (rotating frame)
    double eta = 0.0;      // squeezing strength
    double omega_s = 0.0;  // half the drive frequency; lab frame only

    // Build from dimensionless ratios:
    // n_ex = gamma1 / (2 gamma2), delta = delta_ratio * gamma1,
    // eta = eta_ratio * |delta| / 2.
    static ModelParams from_ratios(double gamma1, double n_ex, double delta_ratio,
                                   double eta_ratio, double omega_s = 0.0);

    double n_ex() const { return gamma1 / (2.0 * gamma2); }
    double eta_c() const;
    double eta_ratio() const;  // eta / eta_c, +inf if eta_c == 0 < eta
    double omega0() const { return delta + omega_s; }
    double period() const;     // T = pi / omega_s

    ModelParams with_eta(double eta_new) const;
    ModelParams with_eta_ratio(double ratio) const;

    // Throws InvalidArgument unless gamma1 > 0, gamma2 > 0, eta >= 0 and all finite.
    void validate() const;
};

}  // namespace qvdp
