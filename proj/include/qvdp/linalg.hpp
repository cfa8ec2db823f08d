#pragma once

#include <vector>

#include "qvdp/types.hpp"

namespace qvdp::linalg {

// Columns of right/left hold the eigenvectors; left[:, j]^H A = lambda_j left[:, j]^H.
struct EigenSystem {
    std::vector<Complex> values;
    CMatrix right;
    CMatrix left;
};

// LAPACK dgeev / zgeev. Throws NumericFailure on non-convergence.
EigenSystem eig(const RMatrix& a, bool want_right, bool want_left);
EigenSystem eig(const CMatrix& a, bool want_right, bool want_left);

// Shifted inverse iteration on a real matrix; returns the right (or left,
// when left = true) eigenvector belonging to the eigenvalue closest to shift.
CVector inverse_iteration(const RMatrix& a, Complex shift, bool left, int iterations = 3);

// Multiplies random matrices through the linked BLAS and compares with a naive product.
bool blas_self_test();

// Call first thing in main(). If the autodetected BLAS kernels give wrong results,
// re-executes the program once per fallback OpenBLAS core type; throws NumericFailure
// when none of them passes. No-op when the self-test passes.
void ensure_reliable_blas(char** argv);

}  // namespace qvdp::linalg
