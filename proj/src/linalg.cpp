#include "qvdp/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "qvdp/error.hpp"

namespace qvdp::linalg {

EigenSystem eig(const RMatrix& a, bool want_right, bool want_left) {
    if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidDimension, "eig needs a square matrix");
    if (!a.allFinite()) throw Error(ErrorKind::NumericFailure, "eig: matrix has non-finite entries");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    RMatrix work = a;
    RVector wr(n), wi(n);
    RMatrix vl(want_left ? n : 1, want_left ? n : 1);
    RMatrix vr(want_right ? n : 1, want_right ? n : 1);
    const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, want_left ? 'V' : 'N', want_right ? 'V' : 'N', n,
                                          work.data(), n, wr.data(), wi.data(), vl.data(), vl.rows(),
                                          vr.data(), vr.rows());
    if (info != 0)
        throw Error(ErrorKind::NumericFailure, "dgeev failed, info=" + std::to_string(info) +
                                                   ", n=" + std::to_string(n) +
                                                   ", max|a|=" + std::to_string(a.cwiseAbs().maxCoeff()));
    EigenSystem out;
    out.values.resize(n);
    for (lapack_int j = 0; j < n; ++j) out.values[j] = Complex(wr(j), wi(j));

    // Conjugate pairs come as consecutive columns (re, im).
    auto unpack = [&](const RMatrix& v) {
        CMatrix c(n, n);
        for (lapack_int j = 0; j < n; ++j) {
            if (wi(j) == 0.0) {
                c.col(j) = v.col(j).cast<Complex>();
            } else {
                c.col(j) = v.col(j).cast<Complex>() + kI * v.col(j + 1).cast<Complex>();
                c.col(j + 1) = c.col(j).conjugate();
                ++j;
            }
        }
        return c;
    };
    if (want_right) out.right = unpack(vr);
    if (want_left) out.left = unpack(vl);
    return out;
}

EigenSystem eig(const CMatrix& a, bool want_right, bool want_left) {
    if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidDimension, "eig needs a square matrix");
    if (!a.allFinite()) throw Error(ErrorKind::NumericFailure, "eig: matrix has non-finite entries");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    CMatrix work = a;
    CVector w(n);
    CMatrix vl(want_left ? n : 1, want_left ? n : 1);
    CMatrix vr(want_right ? n : 1, want_right ? n : 1);
    const lapack_int info = LAPACKE_zgeev(
        LAPACK_COL_MAJOR, want_left ? 'V' : 'N', want_right ? 'V' : 'N', n,
        reinterpret_cast<lapack_complex_double*>(work.data()), n, reinterpret_cast<lapack_complex_double*>(w.data()),
        reinterpret_cast<lapack_complex_double*>(vl.data()), vl.rows(),
        reinterpret_cast<lapack_complex_double*>(vr.data()), vr.rows());
    if (info != 0)
        throw Error(ErrorKind::NumericFailure, "zgeev failed, info=" + std::to_string(info) +
                                                   ", n=" + std::to_string(n));
    EigenSystem out;
    out.values.assign(w.data(), w.data() + n);
    if (want_right) out.right = std::move(vr);
    if (want_left) out.left = std::move(vl);
    return out;
}

CVector inverse_iteration(const RMatrix& a, Complex shift, bool left, int iterations) {
    const Eigen::Index n = a.rows();
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    // Nudge off the eigenvalue so the factorization stays finite.
    const Complex sigma = shift + Complex(1e-12 * scale, 1e-12 * scale);
    CMatrix m = a.cast<Complex>();
    if (left) m.adjointInPlace();
    const Complex s = left ? std::conj(sigma) : sigma;
    m.diagonal().array() -= s;
    Eigen::PartialPivLU<CMatrix> lu(m);

    std::mt19937_64 rng(0x5eedULL + static_cast<unsigned long long>(n));
    std::normal_distribution<double> g;
    CVector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = Complex(g(rng), g(rng));
    x.normalize();
    for (int it = 0; it < iterations; ++it) {
        x = lu.solve(x);
        const double nx = x.norm();
        if (!std::isfinite(nx) || nx == 0.0) throw Error(ErrorKind::NumericFailure, "inverse iteration diverged");
        x /= nx;
    }
    return x;
}

}  // namespace qvdp::linalg
