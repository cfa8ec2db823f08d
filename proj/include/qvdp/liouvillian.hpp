#pragma once

#include <vector>

#include "qvdp/fock.hpp"
#include "qvdp/params.hpp"
#include "qvdp/types.hpp"

namespace qvdp {

// Column stacking: rho(m, n) sits at index m + n*d, so vec(A rho B) = (B^T kron A) vec(rho).
enum class Vectorization { ColumnStacking };

struct Superoperator {
    CMatrix matrix;
    int cutoff = 0;
    Vectorization convention = Vectorization::ColumnStacking;
};

CVector vec(const CMatrix& rho);
CMatrix unvec(const CVector& v, int d);
inline int vec_index(int m, int n, int d) { return m + n * d; }

// Matrix of rho -> left * rho * right.
CMatrix sandwich(const CMatrix& left, const CMatrix& right);

CMatrix build_rotating_hamiltonian(const ModelParams& params, const FockSpace& space);
CMatrix build_lab_hamiltonian(const ModelParams& params, const FockSpace& space, double t);

Superoperator build_rotating_liouvillian(const ModelParams& params, const FockSpace& space);
Superoperator parity_superoperator(const FockSpace& space);

struct ParitySectors {
    std::vector<int> even;  // vec indices with m - n even
    std::vector<int> odd;
};
ParitySectors parity_sectors(const FockSpace& space);

// Coefficients of the Lindblad generator
//   L rho = -i[H, rho] + (gamma1/2) D[a^dag] rho + (gamma2/2) D[a^2] rho
// with H = diag(h) + kappa a^2 + conj(kappa) a^dag^2. Rotating frame:
// h_m = delta m, kappa = i eta. Lab frame: h_m = omega0 m, kappa = i eta e^{2 i omega_s t}.
struct Generator {
    int d = 0;
    RVector h;
    Complex kappa;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
};

Generator rotating_generator(const ModelParams& params, int d);
Generator lab_generator(const ModelParams& params, int d, double t);

// out = L(rho), matrix-free, O(d^2). The plain version splits columns over
// OpenMP threads; the serial one is the reference.
void apply_generator(const Generator& g, const CMatrix& rho, CMatrix& out);
void apply_generator_serial(const Generator& g, const CMatrix& rho, CMatrix& out);

enum class Parity { Even = 1, Odd = -1 };

// Orthonormal Hermitian basis of one parity sector: E_mm, (E_mn + E_nm)/sqrt2
// and i(E_mn - E_nm)/sqrt2 for m < n. The Liouvillian restricted to the sector
// is a real matrix in this basis, with the same spectrum.
class SectorBasis {
public:
    enum class Kind { Diag, Sym, Anti };
    struct Element {
        int m;
        int n;
        Kind kind;
    };

    SectorBasis(int d, Parity parity);

    int cutoff() const { return d_; }
    Parity parity() const { return parity_; }
    int size() const { return static_cast<int>(elements_.size()); }
    const std::vector<Element>& elements() const { return elements_; }

    CMatrix element_matrix(int j) const;
    // sum_j c_j B_j for complex coefficients.
    CMatrix to_matrix(const CVector& c) const;
    // Tr(B_j X) for every j.
    CVector coefficients(const CMatrix& x) const;
    // Same, assuming X Hermitian (real result).
    RVector real_coefficients(const CMatrix& x) const;

private:
    int d_;
    Parity parity_;
    std::vector<Element> elements_;
};

// R_ij = Tr(B_i L(B_j)).
RMatrix build_sector_matrix(const Generator& g, const SectorBasis& basis);
RMatrix build_sector_matrix_serial(const Generator& g, const SectorBasis& basis);
// Same projection from an explicit superoperator matrix.
RMatrix project_to_sector(const Superoperator& op, const SectorBasis& basis);

}  // namespace qvdp
