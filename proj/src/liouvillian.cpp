#include "qvdp/liouvillian.hpp"

#include <cmath>

#include "qvdp/error.hpp"

namespace qvdp {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void check_rates(const ModelParams& p) {
    if (!(std::isfinite(p.gamma1) && std::isfinite(p.gamma2) && std::isfinite(p.delta) &&
          std::isfinite(p.eta) && std::isfinite(p.omega_s)))
        throw Error(ErrorKind::InvalidArgument, "non-finite model parameter");
    if (p.gamma1 < 0.0 || p.gamma2 < 0.0 || p.eta < 0.0)
        throw Error(ErrorKind::InvalidArgument, "rates must be non-negative");
}

Generator make_generator(int d, RVector h, Complex kappa, double gamma1, double gamma2) {
    if (d < 2) throw Error(ErrorKind::InvalidDimension, "cutoff must be >= 2");
    Generator g;
    g.d = d;
    g.h = std::move(h);
    g.kappa = kappa;
    g.gamma1 = gamma1;
    g.gamma2 = gamma2;
    return g;
}

// sqrt((m+1)(m+2)) = <m|a^2|m+2>
inline double s2(int m) { return std::sqrt(static_cast<double>(m + 1) * (m + 2)); }

inline void apply_column(const Generator& g, const CMatrix& rho, CMatrix& out, int n) {
    const int d = g.d;
    const Complex k = g.kappa;
    const Complex kc = std::conj(g.kappa);
    const double g1 = 0.5 * g.gamma1;
    const double g2 = 0.5 * g.gamma2;
    const double sn = std::sqrt(static_cast<double>(n));
    const double en = (n < d - 1) ? n + 1.0 : 0.0;  // (a a^dag)_nn in the truncation
    const double fn = static_cast<double>(n) * (n - 1);
    const double hn = g.h(n);
    const Complex kn_lo = (n >= 2) ? k * s2(n - 2) : Complex(0.0);
    const Complex kn_hi = (n + 2 < d) ? kc * s2(n) : Complex(0.0);
    const double s2n = (n + 2 < d) ? s2(n) : 0.0;

    for (int m = 0; m < d; ++m) {
        const Complex r = rho(m, n);
        Complex hr = g.h(m) * r;
        if (m + 2 < d) hr += k * s2(m) * rho(m + 2, n);
        if (m >= 2) hr += kc * s2(m - 2) * rho(m - 2, n);
        Complex rh = r * hn;
        if (n >= 2) rh += rho(m, n - 2) * kn_lo;
        if (n + 2 < d) rh += rho(m, n + 2) * kn_hi;

        Complex v = -kI * (hr - rh);

        const double em = (m < d - 1) ? m + 1.0 : 0.0;
        Complex gain = 0.0;
        if (m >= 1 && n >= 1) gain = 2.0 * std::sqrt(static_cast<double>(m)) * sn * rho(m - 1, n - 1);
        v += g1 * (gain - (em + en) * r);

        const double fm = static_cast<double>(m) * (m - 1);
        Complex loss = 0.0;
        if (m + 2 < d && n + 2 < d) loss = 2.0 * s2(m) * s2n * rho(m + 2, n + 2);
        v += g2 * (loss - (fm + fn) * r);

        out(m, n) = v;
    }
}

void check_shapes(const Generator& g, const CMatrix& rho, CMatrix& out) {
    if (rho.rows() != g.d || rho.cols() != g.d)
        throw Error(ErrorKind::InvalidDimension, "state does not match generator cutoff");
    if (out.rows() != g.d || out.cols() != g.d) out.resize(g.d, g.d);
}

}  // namespace

CVector vec(const CMatrix& rho) {
    return Eigen::Map<const CVector>(rho.data(), rho.size());
}

CMatrix unvec(const CVector& v, int d) {
    if (v.size() != static_cast<Eigen::Index>(d) * d)
        throw Error(ErrorKind::InvalidDimension, "vector length is not d^2");
    return Eigen::Map<const CMatrix>(v.data(), d, d);
}

CMatrix sandwich(const CMatrix& left, const CMatrix& right) {
    // (right^T kron left)
    const CMatrix rt = right.transpose();
    const Eigen::Index p = rt.rows(), q = rt.cols(), r = left.rows(), s = left.cols();
    CMatrix out(p * r, q * s);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < q; ++j) out.block(i * r, j * s, r, s) = rt(i, j) * left;
    return out;
}

CMatrix build_rotating_hamiltonian(const ModelParams& params, const FockSpace& space) {
    const CMatrix a2 = space.a() * space.a();
    const CMatrix ad2 = space.a_dag() * space.a_dag();
    return params.delta * space.n_op() + kI * params.eta * (a2 - ad2);
}

CMatrix build_lab_hamiltonian(const ModelParams& params, const FockSpace& space, double t) {
    if (!(params.omega_s > 0.0))
        throw Error(ErrorKind::MissingDriveFrequency, "lab frame needs omega_s > 0");
    const CMatrix a2 = space.a() * space.a();
    const CMatrix ad2 = space.a_dag() * space.a_dag();
    const Complex ph = std::polar(1.0, 2.0 * params.omega_s * t);
    CMatrix h = params.omega0() * space.n_op() + kI * params.eta * (ph * a2 - std::conj(ph) * ad2);
    return 0.5 * (h + h.adjoint());
}

Superoperator build_rotating_liouvillian(const ModelParams& params, const FockSpace& space) {
    check_rates(params);
    const int d = space.dim();
    const CMatrix id = CMatrix::Identity(d, d);
    const CMatrix h = build_rotating_hamiltonian(params, space);

    auto dissipator = [&](const CMatrix& l) {
        const CMatrix ldl = l.adjoint() * l;
        return CMatrix(2.0 * sandwich(l, l.adjoint()) - sandwich(ldl, id) - sandwich(id, ldl));
    };

    Superoperator op;
    op.cutoff = d;
    op.matrix = -kI * (sandwich(h, id) - sandwich(id, h));
    op.matrix += 0.5 * params.gamma1 * dissipator(space.a_dag());
    op.matrix += 0.5 * params.gamma2 * dissipator(space.a() * space.a());
    return op;
}

Superoperator parity_superoperator(const FockSpace& space) {
    Superoperator op;
    op.cutoff = space.dim();
    op.matrix = sandwich(space.parity(), space.parity());
    return op;
}

ParitySectors parity_sectors(const FockSpace& space) {
    const int d = space.dim();
    ParitySectors s;
    for (int n = 0; n < d; ++n)
        for (int m = 0; m < d; ++m) ((m - n) % 2 == 0 ? s.even : s.odd).push_back(vec_index(m, n, d));
    return s;
}

Generator rotating_generator(const ModelParams& params, int d) {
    check_rates(params);
    RVector h(d);
    for (int m = 0; m < d; ++m) h(m) = params.delta * m;
    return make_generator(d, std::move(h), kI * params.eta, params.gamma1, params.gamma2);
}

Generator lab_generator(const ModelParams& params, int d, double t) {
    check_rates(params);
    if (!(params.omega_s > 0.0))
        throw Error(ErrorKind::MissingDriveFrequency, "lab frame needs omega_s > 0");
    RVector h(d);
    for (int m = 0; m < d; ++m) h(m) = params.omega0() * m;
    const Complex kappa = kI * params.eta * std::polar(1.0, 2.0 * params.omega_s * t);
    return make_generator(d, std::move(h), kappa, params.gamma1, params.gamma2);
}

void apply_generator(const Generator& g, const CMatrix& rho, CMatrix& out) {
    check_shapes(g, rho, out);
#pragma omp parallel for schedule(static)
    for (int n = 0; n < g.d; ++n) apply_column(g, rho, out, n);
}

void apply_generator_serial(const Generator& g, const CMatrix& rho, CMatrix& out) {
    check_shapes(g, rho, out);
    for (int n = 0; n < g.d; ++n) apply_column(g, rho, out, n);
}

SectorBasis::SectorBasis(int d, Parity parity) : d_(d), parity_(parity) {
    if (d < 2) throw Error(ErrorKind::InvalidDimension, "cutoff must be >= 2");
    const int want = (parity == Parity::Even) ? 0 : 1;
    if (want == 0)
        for (int m = 0; m < d; ++m) elements_.push_back({m, m, Kind::Diag});
    for (int m = 0; m < d; ++m)
        for (int n = m + 1; n < d; ++n)
            if ((n - m) % 2 == want) {
                elements_.push_back({m, n, Kind::Sym});
                elements_.push_back({m, n, Kind::Anti});
            }
}

CMatrix SectorBasis::element_matrix(int j) const {
    CVector c = CVector::Zero(size());
    c(j) = 1.0;
    return to_matrix(c);
}

CMatrix SectorBasis::to_matrix(const CVector& c) const {
    if (c.size() != size()) throw Error(ErrorKind::InvalidDimension, "coefficient vector size mismatch");
    CMatrix x = CMatrix::Zero(d_, d_);
    for (int j = 0; j < size(); ++j) {
        const Element& e = elements_[j];
        switch (e.kind) {
            case Kind::Diag: x(e.m, e.m) += c(j); break;
            case Kind::Sym:
                x(e.m, e.n) += kInvSqrt2 * c(j);
                x(e.n, e.m) += kInvSqrt2 * c(j);
                break;
            case Kind::Anti:
                x(e.m, e.n) += kI * kInvSqrt2 * c(j);
                x(e.n, e.m) -= kI * kInvSqrt2 * c(j);
                break;
        }
    }
    return x;
}

CVector SectorBasis::coefficients(const CMatrix& x) const {
    CVector c(size());
    for (int j = 0; j < size(); ++j) {
        const Element& e = elements_[j];
        switch (e.kind) {
            case Kind::Diag: c(j) = x(e.m, e.m); break;
            case Kind::Sym: c(j) = kInvSqrt2 * (x(e.m, e.n) + x(e.n, e.m)); break;
            case Kind::Anti: c(j) = kI * kInvSqrt2 * (x(e.n, e.m) - x(e.m, e.n)); break;
        }
    }
    return c;
}

RVector SectorBasis::real_coefficients(const CMatrix& x) const {
    RVector c(size());
    const double r2 = std::sqrt(2.0);
    for (int j = 0; j < size(); ++j) {
        const Element& e = elements_[j];
        switch (e.kind) {
            case Kind::Diag: c(j) = x(e.m, e.m).real(); break;
            case Kind::Sym: c(j) = r2 * x(e.m, e.n).real(); break;
            case Kind::Anti: c(j) = r2 * x(e.m, e.n).imag(); break;
        }
    }
    return c;
}

namespace {

void set_element(const SectorBasis::Element& e, CMatrix& b) {
    switch (e.kind) {
        case SectorBasis::Kind::Diag: b(e.m, e.m) = 1.0; break;
        case SectorBasis::Kind::Sym:
            b(e.m, e.n) = kInvSqrt2;
            b(e.n, e.m) = kInvSqrt2;
            break;
        case SectorBasis::Kind::Anti:
            b(e.m, e.n) = kI * kInvSqrt2;
            b(e.n, e.m) = -kI * kInvSqrt2;
            break;
    }
}

void check_basis(const Generator& g, const SectorBasis& basis) {
    if (g.d != basis.cutoff()) throw Error(ErrorKind::InvalidDimension, "basis and generator cutoff differ");
}

}  // namespace

RMatrix build_sector_matrix(const Generator& g, const SectorBasis& basis) {
    check_basis(g, basis);
    const int s = basis.size();
    const int d = g.d;
    RMatrix r(s, s);
#pragma omp parallel
    {
        CMatrix b = CMatrix::Zero(d, d);
        CMatrix lb(d, d);
#pragma omp for schedule(dynamic, 32)
        for (int j = 0; j < s; ++j) {
            const auto& e = basis.elements()[j];
            set_element(e, b);
            apply_generator_serial(g, b, lb);
            r.col(j) = basis.real_coefficients(lb);
            b(e.m, e.n) = 0.0;
            b(e.n, e.m) = 0.0;
        }
    }
    return r;
}

RMatrix build_sector_matrix_serial(const Generator& g, const SectorBasis& basis) {
    check_basis(g, basis);
    const int s = basis.size();
    RMatrix r(s, s);
    CMatrix lb(g.d, g.d);
    for (int j = 0; j < s; ++j) {
        apply_generator_serial(g, basis.element_matrix(j), lb);
        r.col(j) = basis.real_coefficients(lb);
    }
    return r;
}

RMatrix project_to_sector(const Superoperator& op, const SectorBasis& basis) {
    const int d = basis.cutoff();
    if (op.cutoff != d) throw Error(ErrorKind::InvalidDimension, "basis and superoperator cutoff differ");
    const int s = basis.size();
    RMatrix r(s, s);
    for (int j = 0; j < s; ++j) {
        const CVector lb = op.matrix * vec(basis.element_matrix(j));
        r.col(j) = basis.coefficients(unvec(lb, d)).real();
    }
    return r;
}

}  // namespace qvdp
