#include "qvdp/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qvdp/error.hpp"

namespace qvdp {

FockSpace::FockSpace(int d) : d_(d) {
    if (d < 2) throw Error(ErrorKind::InvalidDimension, "cutoff must be >= 2, got " + std::to_string(d));
    a_ = CMatrix::Zero(d, d);
    for (int m = 0; m + 1 < d; ++m) a_(m, m + 1) = std::sqrt(static_cast<double>(m + 1));
    a_dag_ = a_.adjoint();
    n_ = CMatrix::Zero(d, d);
    parity_ = CMatrix::Zero(d, d);
    for (int m = 0; m < d; ++m) {
        n_(m, m) = static_cast<double>(m);
        parity_(m, m) = (m % 2 == 0) ? 1.0 : -1.0;
    }
}

FockSpace build_fock_space(int d) { return FockSpace(d); }

double min_eigenvalue(const CMatrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

DensityMatrix::DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols() || rho_.rows() < 1)
        throw Error(ErrorKind::InvalidDimension, "density matrix must be square");
    if (!rho_.allFinite()) throw Error(ErrorKind::Domain, "density matrix has non-finite entries");
    const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12) throw Error(ErrorKind::Domain, "density matrix not Hermitian: " + std::to_string(herm));
    const Complex tr = rho_.trace();
    if (std::abs(tr - 1.0) > 1e-10) throw Error(ErrorKind::Domain, "density matrix trace != 1");
    const double lmin = min_eigenvalue(rho_);
    if (lmin < -1e-9) throw Error(ErrorKind::Domain, "density matrix not PSD, min eigenvalue " + std::to_string(lmin));
}

DensityMatrix DensityMatrix::from_hermitized(const CMatrix& m) {
    CMatrix h = 0.5 * (m + m.adjoint());
    const double tr = h.trace().real();
    if (!(std::abs(tr) > 0.0)) throw Error(ErrorKind::Domain, "zero trace");
    h /= tr;
    // exact hermiticity after scaling
    h = 0.5 * (h + h.adjoint()).eval();
    return DensityMatrix(std::move(h));
}

DensityMatrix coherent_state(const FockSpace& space, Complex alpha) {
    const int d = space.dim();
    const double n = std::norm(alpha);
    // Poisson weight that the truncation drops: 1 - sum_{k<d} e^{-n} n^k / k!
    CVector psi(d);
    double logfact = 0.0;
    double kept = 0.0;
    for (int k = 0; k < d; ++k) {
        if (k > 0) logfact += std::log(static_cast<double>(k));
        // |alpha|^k e^{-|alpha|^2/2} / sqrt(k!) with the phase of alpha^k
        const double logmag = (n > 0.0 ? k * 0.5 * std::log(n) : (k == 0 ? 0.0 : -INFINITY)) - 0.5 * n - 0.5 * logfact;
        const double mag = std::exp(logmag);
        psi(k) = mag * std::polar(1.0, k * std::arg(alpha));
        kept += mag * mag;
    }
    const double tail = std::max(0.0, 1.0 - kept);
    if (n > d / 4.0 && tail > 1e-10)
        throw Error(ErrorKind::TruncationOverflow,
                    "|alpha|^2 = " + std::to_string(n) + " too large for cutoff " + std::to_string(d));
    psi /= psi.norm();
    CMatrix rho = psi * psi.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho));
}

DensityMatrix fock_state(const FockSpace& space, int n) {
    if (n < 0 || n >= space.dim()) throw Error(ErrorKind::TruncationOverflow, "Fock index outside cutoff");
    CMatrix rho = CMatrix::Zero(space.dim(), space.dim());
    rho(n, n) = 1.0;
    return DensityMatrix(std::move(rho));
}

int default_cutoff(double n_ex) {
    if (!(n_ex > 0.0)) throw Error(ErrorKind::InvalidArgument, "n_ex must be positive");
    return std::max(16, static_cast<int>(std::ceil(n_ex + 8.0 * std::sqrt(n_ex) + 8.0)));
}

int cutoff_for(const ModelParams& params) {
    const double n_ex = params.n_ex();
    double n_mean = n_ex;
    const double disc = 4.0 * params.eta * params.eta - params.delta * params.delta;
    if (disc > 0.0) n_mean = n_ex + std::sqrt(disc) / params.gamma2;
    return std::max(default_cutoff(n_ex), default_cutoff(n_mean));
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
    CMatrix diff = a - b;
    diff = 0.5 * (diff + diff.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(diff, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qvdp
