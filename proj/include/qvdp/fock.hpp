#pragma once

#include "qvdp/params.hpp"
#include "qvdp/types.hpp"

namespace qvdp {

// Truncated bosonic operators on span{|0>, ..., |d-1>}. Immutable.
class FockSpace {
public:
    explicit FockSpace(int d);

    int dim() const { return d_; }
    const CMatrix& a() const { return a_; }
    const CMatrix& a_dag() const { return a_dag_; }
    const CMatrix& n_op() const { return n_; }
    const CMatrix& parity() const { return parity_; }

private:
    int d_;
    CMatrix a_, a_dag_, n_, parity_;
};

FockSpace build_fock_space(int d);

// Density matrix whose invariants (hermiticity 1e-12, unit trace 1e-10,
// min eigenvalue >= -1e-9) are checked on construction.
class DensityMatrix {
public:
    explicit DensityMatrix(CMatrix rho);

    // Hermitizes and renormalizes before checking.
    static DensityMatrix from_hermitized(const CMatrix& m);

    int dim() const { return static_cast<int>(rho_.rows()); }
    const CMatrix& matrix() const { return rho_; }
    Complex expect(const CMatrix& op) const { return (op * rho_).trace(); }

private:
    CMatrix rho_;
};

DensityMatrix coherent_state(const FockSpace& space, Complex alpha);
DensityMatrix fock_state(const FockSpace& space, int n);

// max(16, ceil(n_ex + 8 sqrt(n_ex) + 8))
int default_cutoff(double n_ex);

// default_cutoff applied to max(n_ex, N_ss): the bistable fixed points sit at
// N_ss = n_ex + sqrt(4 eta^2 - delta^2)/gamma2 which exceeds n_ex.
int cutoff_for(const ModelParams& params);

// 0.5 Tr|a - b| for Hermitian a, b.
double trace_distance(const CMatrix& a, const CMatrix& b);
double min_eigenvalue(const CMatrix& hermitian);

}  // namespace qvdp
