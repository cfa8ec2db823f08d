#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "qvdp/error.hpp"
#include "qvdp/fock.hpp"
#include "qvdp/liouvillian.hpp"

using namespace qvdp;

namespace {

ModelParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.05, 1.5);
    ModelParams p;
    p.gamma1 = u(rng);
    p.gamma2 = 0.2 * u(rng);
    p.delta = u(rng) - 0.75;
    p.eta = 0.5 * u(rng);
    p.omega_s = 3.0 + u(rng);
    return p;
}

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_SUITE("liouvillian") {

TEST_CASE("vectorization convention") {
    const int d = 3;
    CMatrix x(d, d);
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) x(m, n) = Complex(m, 10 * n);
    const CVector v = vec(x);
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) CHECK(v(vec_index(m, n, d)) == x(m, n));
    CHECK(unvec(v, d) == x);

    std::mt19937_64 rng(3);
    const CMatrix a = oracle::random_density(d, rng), b = oracle::random_density(d, rng);
    CHECK(max_abs(sandwich(a, b) - oracle::left_right(a, b)) < 1e-15);
}

TEST_CASE("all rates zero gives the zero map") {
    ModelParams p;
    p.gamma1 = p.gamma2 = p.eta = p.delta = 0.0;
    CHECK(max_abs(build_rotating_liouvillian(p, FockSpace(5)).matrix) == 0.0);
}

TEST_CASE("two-boson loss on small truncations") {
    ModelParams p;
    p.gamma1 = p.eta = p.delta = 0.0;
    p.gamma2 = 2.0;
    {
        const FockSpace s(2);
        const Superoperator l = build_rotating_liouvillian(p, s);
        CMatrix one = CMatrix::Zero(2, 2);
        one(1, 1) = 1.0;
        CHECK(max_abs(unvec(l.matrix * vec(one), 2)) == 0.0);
    }
    {
        // (g2/2) D[a^2] |2><2| = (g2/2)(4|0><0| - 4|2><2|) by hand
        const FockSpace s(3);
        const Superoperator l = build_rotating_liouvillian(p, s);
        CMatrix two = CMatrix::Zero(3, 3);
        two(2, 2) = 1.0;
        CMatrix expected = CMatrix::Zero(3, 3);
        expected(0, 0) = 4.0;
        expected(2, 2) = -4.0;
        CHECK(max_abs(unvec(l.matrix * vec(two), 3) - expected) < 1e-14);
        CHECK(std::abs((s.n_op() * unvec(l.matrix * vec(two), 3)).trace() + 8.0) < 1e-14);
    }
}

TEST_CASE("dense superoperator and matrix-free generator match the Kronecker oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const ModelParams p = random_params(rng);
        const int d = 4 + trial;
        const FockSpace s(d);
        const CMatrix ref = oracle::liouvillian(d, p.gamma1, p.gamma2, p.delta, p.eta);
        const Superoperator l = build_rotating_liouvillian(p, s);
        CHECK(max_abs(l.matrix - ref) < 1e-12);

        const CMatrix rho = oracle::random_density(d, rng);
        CMatrix out, out_serial;
        apply_generator(rotating_generator(p, d), rho, out);
        apply_generator_serial(rotating_generator(p, d), rho, out_serial);
        CHECK(max_abs(out - unvec(ref * oracle::vec(rho), d)) < 1e-12);
        CHECK(max_abs(out - out_serial) == 0.0);
    }
}

TEST_CASE("lab Hamiltonian") {
    ModelParams p = ModelParams::from_ratios(1.0, 10.0, 0.1, 2.0, 5.0);
    const FockSpace s(9);
    const CMatrix h0 = build_lab_hamiltonian(p, s, 0.0);
    CHECK(max_abs(h0 - h0.adjoint()) < 1e-14);
    CHECK(max_abs(h0 - build_rotating_hamiltonian(p, s) - p.omega_s * s.n_op()) < 1e-13);
    CHECK(max_abs(build_lab_hamiltonian(p, s, p.period()) - h0) < 1e-12);
    const double t = 0.37;
    const CMatrix ht = build_lab_hamiltonian(p, s, t);
    CHECK(max_abs(ht - ht.adjoint()) < 1e-14);

    ModelParams free = p;
    free.eta = 0.0;
    const CMatrix hf = build_lab_hamiltonian(free, s, t);
    CHECK(max_abs(hf - p.omega0() * s.n_op()) < 1e-14);

    ModelParams no_drive = p;
    no_drive.omega_s = 0.0;
    try {
        build_lab_hamiltonian(no_drive, s, 0.0);
        FAIL("expected missing drive frequency");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingDriveFrequency);
    }
}

TEST_CASE("lab generator matches the direct master equation and is T-periodic") {
    std::mt19937_64 rng(5);
    const ModelParams p = random_params(rng);
    const int d = 7;
    const FockSpace s(d);
    const CMatrix rho = oracle::random_density(d, rng);
    for (double t : {0.0, 0.21, 1.3}) {
        CMatrix out;
        apply_generator(lab_generator(p, d, t), rho, out);
        const CMatrix ref = oracle::apply(build_lab_hamiltonian(p, s, t), p.gamma1, p.gamma2, rho);
        CHECK(max_abs(out - ref) < 1e-12);

        const Generator g0 = lab_generator(p, d, t), g1 = lab_generator(p, d, t + p.period());
        CHECK(std::abs(g0.kappa - g1.kappa) < 1e-13);
        CHECK((g0.h - g1.h).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("parity superoperator") {
    const FockSpace s(5);
    const Superoperator z = parity_superoperator(s);
    const int dd = 25;
    CHECK(max_abs(z.matrix * z.matrix - CMatrix::Identity(dd, dd)) < 1e-13);
    CMatrix e00 = CMatrix::Zero(5, 5), e01 = CMatrix::Zero(5, 5);
    e00(0, 0) = 1.0;
    e01(0, 1) = 1.0;
    CHECK(max_abs(unvec(z.matrix * vec(e00), 5) - e00) == 0.0);
    CHECK(max_abs(unvec(z.matrix * vec(e01), 5) + e01) == 0.0);

    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 4; ++trial) {
        const Superoperator l = build_rotating_liouvillian(random_params(rng), s);
        CHECK(max_abs(z.matrix * l.matrix - l.matrix * z.matrix) < 1e-12);
    }
}

TEST_CASE("parity sectors") {
    const ParitySectors s2 = parity_sectors(FockSpace(2));
    CHECK(std::set<int>(s2.even.begin(), s2.even.end()) == std::set<int>{vec_index(0, 0, 2), vec_index(1, 1, 2)});
    CHECK(std::set<int>(s2.odd.begin(), s2.odd.end()) == std::set<int>{vec_index(0, 1, 2), vec_index(1, 0, 2)});
    const ParitySectors s3 = parity_sectors(FockSpace(3));
    CHECK(s3.even.size() == 5);
    CHECK(s3.odd.size() == 4);
    const ParitySectors s6 = parity_sectors(FockSpace(6));
    CHECK(s6.even.size() == 18);
    CHECK(s6.odd.size() == 18);

    std::mt19937_64 rng(8);
    const FockSpace s(6);
    const CMatrix l = build_rotating_liouvillian(random_params(rng), s).matrix;
    double off = 0.0;
    for (int i : s6.even)
        for (int j : s6.odd) off = std::max({off, std::abs(l(i, j)), std::abs(l(j, i))});
    CHECK(off < 1e-14);
}

TEST_CASE("trace preservation") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 6; ++trial) {
        const ModelParams p = random_params(rng);
        const int d = 6 + trial;
        CMatrix out;
        apply_generator(rotating_generator(p, d), oracle::random_density(d, rng), out);
        CHECK(std::abs(out.trace()) < 1e-11);
    }
}

TEST_CASE("sector basis is orthonormal and the sector matrix is the projected Liouvillian") {
    std::mt19937_64 rng(17);
    const ModelParams p = random_params(rng);
    const int d = 7;
    const CMatrix ref = oracle::liouvillian(d, p.gamma1, p.gamma2, p.delta, p.eta);
    const Superoperator op{ref, d, Vectorization::ColumnStacking};
    int total = 0;
    for (Parity par : {Parity::Even, Parity::Odd}) {
        const SectorBasis b(d, par);
        total += b.size();
        CMatrix gram(b.size(), b.size());
        for (int i = 0; i < b.size(); ++i)
            for (int j = 0; j < b.size(); ++j) gram(i, j) = (b.element_matrix(i).adjoint() * b.element_matrix(j)).trace();
        CHECK(max_abs(gram - CMatrix::Identity(b.size(), b.size())) < 1e-14);
        for (int j = 0; j < b.size(); ++j) {
            const CMatrix e = b.element_matrix(j);
            CHECK(max_abs(e - e.adjoint()) == 0.0);
        }

        const Generator g = rotating_generator(p, d);
        const RMatrix r = build_sector_matrix(g, b);
        CHECK((r - build_sector_matrix_serial(g, b)).cwiseAbs().maxCoeff() == 0.0);
        CHECK((r - project_to_sector(op, b)).cwiseAbs().maxCoeff() < 1e-12);

        // coefficients round trip for a Hermitian matrix in the sector
        CMatrix x = CMatrix::Zero(d, d);
        for (int j = 0; j < b.size(); ++j) x += (0.1 * j - 0.3) * b.element_matrix(j);
        CHECK((b.to_matrix(b.coefficients(x)) - x).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((b.real_coefficients(x).cast<Complex>() - b.coefficients(x)).cwiseAbs().maxCoeff() < 1e-14);
    }
    CHECK(total == d * d);
}

}
