#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "qvdp/error.hpp"
#include "qvdp/fock.hpp"
#include "qvdp/spectral.hpp"
#include "qvdp/semiclassical.hpp"

using namespace qvdp;
using namespace qvdp::semiclassical;

namespace {

Dimensionless dimless(double n_ex, double delta, double eta_ratio) {
    return Dimensionless::from(ModelParams::from_ratios(1.0, n_ex, delta, eta_ratio));
}

// Periodic central differences of dP/dt = -d/dphi[(-delta + 2 eta sin 2phi) P] + (3/(8n)) d2P/dphi2.
std::vector<Complex> finite_difference_spectrum(const Dimensionless& p, int n) {
    const double h = 2 * kPi / n;
    const double diff = 3.0 / (8.0 * p.n_ex);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    auto drift = [&](int j) { return -p.delta + 2 * p.eta * std::sin(2 * j * h); };
    for (int j = 0; j < n; ++j) {
        const int l = (j + n - 1) % n, r = (j + 1) % n;
        a(j, r) += -drift(r) / (2 * h) + diff / (h * h);
        a(j, l) += drift(l) / (2 * h) + diff / (h * h);
        a(j, j) += -2 * diff / (h * h);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    std::vector<Complex> v(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(v.begin(), v.end(), [](Complex x, Complex y) { return x.real() > y.real(); });
    return v;
}

std::vector<Complex> full_phase_spectrum(const Dimensionless& p, int m) {
    auto v = phase_spectrum(build_phase_fp(Sector::OddB, m, p));
    const auto e = phase_spectrum(build_phase_fp(Sector::EvenA, m, p));
    v.insert(v.end(), e.begin(), e.end());
    std::sort(v.begin(), v.end(), [](Complex x, Complex y) { return x.real() > y.real(); });
    return v;
}

}  // namespace

TEST_SUITE("semiclassical") {

TEST_CASE("intensity spectrum and eigenfunctions") {
    const auto mu = intensity_eigenvalues(3);
    REQUIRE(mu.size() == 4);
    CHECK(mu[0] == 0.0);
    CHECK(mu[3] == -3.0);
    CHECK(intensity_stationary_sd(10.0) == doctest::Approx(std::sqrt(15.0)));

    const double n_ex = 10.0;
    const double sd = intensity_stationary_sd(n_ex);
    const double h = sd / 400.0;
    double norm = 0.0;
    double overlap[3][3] = {};
    for (double x = -12 * sd; x <= 12 * sd; x += h) {
        norm += intensity_eigenfunction(0, x, n_ex) * h;
        for (int m = 0; m < 3; ++m)
            for (int k = 0; k < 3; ++k)
                overlap[m][k] += intensity_left_eigenfunction(m, x, n_ex) * intensity_eigenfunction(k, x, n_ex) * h;
    }
    CHECK(std::abs(norm - 1.0) < 1e-8);
    for (int m = 0; m < 3; ++m)
        for (int k = 0; k < 3; ++k) CHECK(std::abs(overlap[m][k] - (m == k ? 1.0 : 0.0)) < 1e-8);

    // OU generator d/dx(x P) + (3 n / 2) P'' applied by finite differences
    const double e = 1e-3 * sd;
    for (int n = 0; n < 4; ++n)
        for (double x : {-0.7 * sd, 0.2 * sd, 1.3 * sd}) {
            auto f = [&](double y) { return intensity_eigenfunction(n, y, n_ex); };
            const double d_xp = ((x + e) * f(x + e) - (x - e) * f(x - e)) / (2 * e);
            const double lap = (f(x + e) - 2 * f(x) + f(x - e)) / (e * e);
            const double lhs = d_xp + 1.5 * n_ex * lap;
            CHECK(std::abs(lhs + n * f(x)) < 1e-5 * (std::abs(f(0.0)) + std::abs(n * f(x))));
        }
}

TEST_CASE("free phase spectrum is the closed form") {
    for (double n_ex : {3.0, 50.0, 1e4}) {
        const Dimensionless p = dimless(n_ex, 0.1, 0.0);
        for (Sector s : {Sector::OddB, Sector::EvenA}) {
            const PhaseFPOperator op = build_phase_fp(s, 64, p);
            CHECK(op.lower.cwiseAbs().maxCoeff() == 0.0);
            CHECK(op.upper.cwiseAbs().maxCoeff() == 0.0);
            for (int j = 0; j < op.size(); ++j) {
                const double k = op.wavenumbers[j];
                const Complex nu(-3 * k * k / (8 * n_ex), 0.1 * k);
                if (!(s == Sector::EvenA && j == 0)) CHECK(std::abs(op.diag(j) - nu) <= 1e-12 * std::abs(nu));
            }
        }
    }
}

TEST_CASE("operator structure") {
    const Dimensionless p = dimless(20.0, 0.1, 0.6);
    const PhaseFPOperator odd = build_phase_fp(Sector::OddB, 16, p);
    CHECK(odd.size() == 34);
    CHECK(odd.wavenumbers.front() == -33);
    CHECK(odd.wavenumbers.back() == 33);
    const CMatrix a = odd.dense();
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (std::abs(i - j) > 1) CHECK(std::abs(a(i, j)) == 0.0);
    const PhaseFPOperator even = build_phase_fp(Sector::EvenA, 16, p);
    CHECK(even.size() == 17);
    CHECK(even.dense().row(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(build_phase_fp(Sector::OddB, 7, p), Error);

    const PerturbationSplit sp = split_perturbation(odd);
    CMatrix rebuilt = sp.h;
    rebuilt.diagonal() += sp.v.cast<Complex>() / sp.n_ex;
    CHECK((rebuilt - a).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spectral properties") {
    for (double r : {0.4, 2.0}) {
        const Dimensionless p = dimless(30.0, 0.1, r);
        const auto even = phase_spectrum(build_phase_fp(Sector::EvenA, 64, p));
        const auto odd = phase_spectrum(build_phase_fp(Sector::OddB, 64, p));
        int zeros = 0;
        for (const Complex& z : even) zeros += std::abs(z) < 1e-12;
        CHECK(zeros == 1);
        for (const Complex& z : even)
            if (std::abs(z) >= 1e-12) CHECK(z.real() < 0.0);
        for (const Complex& z : odd) CHECK(z.real() < 0.0);
        for (const auto* v : {&even, &odd}) {
            std::vector<Complex> c(v->size());
            std::transform(v->begin(), v->end(), c.begin(), [](Complex z) { return std::conj(z); });
            CHECK(oracle::multiset_distance(*v, c) < 1e-9);
        }
    }
    const ConvergedSpectrum cs = phase_spectrum_checked(Sector::OddB, 64, dimless(100.0, 0.1, 0.4));
    CHECK(cs.converged);
    CHECK(cs.leading_change < 1e-10);
}

TEST_CASE("Fourier operator matches a finite-difference discretization") {
    for (double r : {0.6, 2.0}) {
        const Dimensionless p = dimless(10.0, 0.1, r);
        const auto fourier = full_phase_spectrum(p, 64);
        const auto fd = finite_difference_spectrum(p, 800);
        for (int j = 1; j < 5; ++j) {
            // nearest finite-difference eigenvalue
            double best = 1e300;
            for (int k = 0; k < 12; ++k) best = std::min(best, std::abs(fd[k] - fourier[j]));
            CHECK(best / std::abs(fourier[j]) < 2e-3);
        }
    }
}

TEST_CASE("first-order decay constants") {
    const auto free = perturbative_cn(dimless(50.0, 0.1, 0.0), 64, 4);
    CHECK(std::abs(free[0].c - 0.375) < 1e-8);
    for (int n = 1; n <= 4; ++n) CHECK(std::abs(free[n - 1].c - 0.375 * n * n) < 1e-8);

    for (double r : {0.2, 0.4, 0.6}) {
        const auto cn = perturbative_cn(dimless(100.0, 0.1, r), 64, 4);
        for (int n = 2; n <= 4; ++n) {
            const double ratio = cn[n - 1].c / (n * n * cn[0].c);
            CHECK(ratio >= 0.99);
            CHECK(ratio <= 1.01);
        }
        for (const auto& e : cn) {
            CHECK(e.c > 0.0);
            CHECK(e.nu0_mismatch < 1e-6);
        }
        // n_ex-independent
        const auto other = perturbative_cn(dimless(3000.0, 0.1, r), 64, 2);
        CHECK(other[0].c == doctest::Approx(cn[0].c).epsilon(1e-10));
    }
    // negative detuning mirrors
    const auto neg = perturbative_cn(dimless(100.0, -0.1, 0.4), 64, 2);
    const auto pos = perturbative_cn(dimless(100.0, 0.1, 0.4), 64, 2);
    CHECK(neg[0].c == doctest::Approx(pos[0].c).epsilon(1e-10));
}

TEST_CASE("perturbative rates approach the exact phase spectrum") {
    // |nu_1 + c_1/n| shrinks faster than c_1/n as n_ex grows
    double prev = 1e300;
    for (double n_ex : {100.0, 1000.0, 10000.0}) {
        const Dimensionless p = dimless(n_ex, 0.1, 0.4);
        const double c1 = perturbative_cn(p, 64, 1)[0].c;
        const double exact = -leading_odd_pair(p, 64).first.real();
        const double rel = std::abs(exact - c1 / n_ex) / (c1 / n_ex);
        CHECK(rel < prev);
        prev = rel;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("Kramers rates") {
    const Dimensionless p = dimless(20.0, 0.1, 2.0);
    const KramersRates a = kramers_rates(p), b = kramers_rates_from_potential(p);
    CHECK(a.rate_left == doctest::Approx(b.rate_left).epsilon(1e-10));
    CHECK(a.rate_right == doctest::Approx(b.rate_right).epsilon(1e-10));
    CHECK(a.rate_left > a.rate_right);
    CHECK(a.gamma_gap == doctest::Approx(2 * a.rate_left));
    CHECK(a.suppression == doctest::Approx(a.rate_right / a.rate_left));

    const KramersRates m = kramers_rates(dimless(20.0, -0.1, 2.0));
    CHECK(m.rate_right == doctest::Approx(a.rate_left).epsilon(1e-12));
    CHECK(m.rate_left == doctest::Approx(a.rate_right).epsilon(1e-12));
    CHECK(m.gamma_gap == doctest::Approx(a.gamma_gap).epsilon(1e-12));

    Dimensionless sym = p;
    sym.delta = 1e-12;
    const KramersRates s = kramers_rates(sym);
    CHECK(s.rate_left == doctest::Approx(s.rate_right).epsilon(1e-9));
    CHECK_THROWS_AS(kramers_rates(dimless(20.0, 0.1, 0.5)), Error);

    // Kramers vs smallest decay rate of the phase operator
    const Dimensionless p3 = dimless(20.0, 0.1, 3.0);
    CHECK(std::abs(kramers_rates(p3).gamma_gap / phase_gap(p3, 64) - 1.0) < 0.2);
    // gap decays exponentially: ln(gap) roughly linear in n_ex
    const double g10 = phase_gap(dimless(10.0, 0.1, 2.0), 64);
    const double g20 = phase_gap(dimless(20.0, 0.1, 2.0), 64);
    const double g40 = phase_gap(dimless(40.0, 0.1, 2.0), 64);
    const double s1 = std::log(g20 / g10) / 10.0, s2 = std::log(g40 / g20) / 20.0;
    CHECK(s1 < 0.0);
    CHECK(std::abs(s2 / s1 - 1.0) < 0.2);
}

TEST_CASE("Kramers error shrinks at large n_ex") {
    double prev = 1e300;
    for (double n_ex : {20.0, 40.0, 80.0}) {
        const Dimensionless p = dimless(n_ex, 0.1, 2.0);
        const double err = std::abs(kramers_rates(p).gamma_gap / phase_gap(p, 96) - 1.0);
        CHECK(err < prev);
        prev = err;
    }
    for (double n_ex : {10.0, 20.0, 40.0, 80.0}) {
        const Dimensionless p = dimless(n_ex, 0.1, 2.0);
        CHECK(std::abs(kramers_rates(p).gamma_gap / phase_gap(p, 96) - 1.0) < 0.1);
    }
}

TEST_CASE("semiclassical exceptional point") {
    const Dimensionless p = dimless(5.0, 0.1, 1.0);
    const EpScan sc = detect_ep_semiclassical(p, {p.eta_c(), 4 * p.eta_c()});
    CHECK(sc.eta_ep > p.eta_c());
    CHECK(std::abs(sc.lambda1_below.imag()) > 1e-9);
    CHECK(std::abs(sc.lambda1_above.imag()) < 1e-9);

    const ModelParams mp = ModelParams::from_ratios(1.0, 5.0, 0.1, 1.0);
    const EpResult q = detect_ep(mp, FockSpace(default_cutoff(5.0)), {mp.eta_c(), 4 * mp.eta_c()});
    CHECK(sc.eta_ep >= q.eta_ep);

    try {
        detect_ep_semiclassical(p, {0.01 * p.eta_c(), 0.5 * p.eta_c()});
        FAIL("expected a bracket error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Bracket);
    }
}

TEST_CASE("exceptional point obeys the delta rescaling") {
    // Phi(2 delta, 2 eta, n) = 2 Phi(delta, eta, 2 n), so eta_EP / eta_c matches.
    // The wide bracket reaches the non-normal region where M = 64 shows spurious pairs.
    for (double n : {500.0, 10000.0}) {
        const Dimensionless a = dimless(n, 0.2, 1.0), b = dimless(2 * n, 0.1, 1.0);
        const double ra = detect_ep_semiclassical(a, {a.eta_c(), 2 * a.eta_c()}).eta_ep / a.eta_c();
        const double rb = detect_ep_semiclassical(b, {b.eta_c(), 2 * b.eta_c()}).eta_ep / b.eta_c();
        CHECK(ra == doctest::Approx(rb).epsilon(1e-5));
        CHECK(ra > 1.0);
        CHECK(ra < 1.05);
    }
}

}
