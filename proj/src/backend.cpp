#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "qvdp/error.hpp"
#include "qvdp/linalg.hpp"

extern "C" void dgemm_(const char* ta, const char* tb, const int* m, const int* n, const int* k, const double* alpha,
                       const double* a, const int* lda, const double* b, const int* ldb, const double* beta, double* c,
                       const int* ldc);

namespace qvdp::linalg {

bool blas_self_test() {
    // Large enough to reach the blocked kernels.
    const int n = 320;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> a(n * n), b(n * n), c(n * n, 0.0);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    const double one = 1.0, zero = 0.0;
    dgemm_("N", "N", &n, &n, &n, &one, a.data(), &n, b.data(), &n, &zero, c.data(), &n);
    double err = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += a[i + k * n] * b[k + j * n];
            err = std::max(err, std::abs(s - c[i + j * n]));
        }
    return err < 1e-10 * n;
}

void ensure_reliable_blas(char** argv) {
    if (blas_self_test()) return;
    static const char* const fallbacks[] = {"SkylakeX", "Haswell", "Prescott"};
    const char* attempt_env = std::getenv("QVDP_BLAS_ATTEMPT");
    const int attempt = attempt_env ? std::atoi(attempt_env) : 0;
    const bool user_choice = std::getenv("OPENBLAS_CORETYPE") && !attempt_env;
    if (user_choice || attempt >= 3)
        throw Error(ErrorKind::NumericFailure, "linked BLAS fails its self-test; try another OPENBLAS_CORETYPE");
#ifdef __linux__
    setenv("OPENBLAS_CORETYPE", fallbacks[attempt], 1);
    setenv("QVDP_BLAS_ATTEMPT", std::to_string(attempt + 1).c_str(), 1);
    execv("/proc/self/exe", argv);
#endif
    throw Error(ErrorKind::NumericFailure, "linked BLAS fails its self-test and re-exec is unavailable");
}

}  // namespace qvdp::linalg
