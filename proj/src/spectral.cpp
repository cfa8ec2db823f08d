#include "qvdp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "qvdp/error.hpp"
#include "qvdp/linalg.hpp"
#include "qvdp/meanfield.hpp"

namespace qvdp {

std::vector<Complex> SpectralDecomposition::eigenvalues() const {
    std::vector<Complex> v;
    v.reserve(modes.size());
    for (const auto& m : modes) v.push_back(m.lambda);
    return v;
}

std::vector<int> spectral_order(const std::vector<Complex>& values) {
    double radius = 0.0;
    for (const Complex& z : values) radius = std::max(radius, std::abs(z));
    const double q = 1e-11 * (1.0 + radius);
    using Key = std::tuple<long long, long long, long long>;
    std::vector<Key> keys;
    keys.reserve(values.size());
    for (const Complex& z : values)
        keys.emplace_back(std::llround(-z.real() / q), std::llround(std::abs(z.imag()) / q), std::llround(z.imag() / q));
    std::vector<int> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return keys[a] < keys[b]; });
    return idx;
}

namespace {

// Scale l so that Tr[l^dag r] = 1 with |r|_F = 1; leave both unnormalized near an EP.
void biorthonormalize(EigenMode& mode) {
    CMatrix& r = *mode.right;
    CMatrix& l = *mode.left;
    r /= r.norm();
    l /= l.norm();
    const Complex overlap = (l.adjoint() * r).trace();
    if (std::abs(overlap) < 1e-6) {
        mode.biorthonormal = false;
        return;
    }
    l /= std::conj(overlap);
    mode.biorthonormal = true;
}

std::vector<EigenMode> diagonalize_block(const RMatrix& r, const SectorBasis& basis, const DiagonalizeOptions& opts) {
    const int parity = static_cast<int>(basis.parity());
    const bool all = opts.vectors == ModeVectors::All;
    linalg::EigenSystem es = linalg::eig(r, all, all);
    const std::vector<int> order = spectral_order(es.values);

    std::vector<EigenMode> modes;
    modes.reserve(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const int j = order[k];
        EigenMode m;
        m.lambda = es.values[j];
        m.parity = parity;
        const bool want = all || (opts.vectors == ModeVectors::Leading && static_cast<int>(k) < opts.leading);
        if (want) {
            CVector x, u;
            if (all) {
                x = es.right.col(j);
                u = es.left.col(j);
            } else {
                x = linalg::inverse_iteration(r, m.lambda, false);
                u = linalg::inverse_iteration(r, m.lambda, true);
            }
            m.right = basis.to_matrix(x);
            m.left = basis.to_matrix(u);
            biorthonormalize(m);
        }
        modes.push_back(std::move(m));
    }
    return modes;
}

SpectralDecomposition merge(std::vector<EigenMode> a, std::vector<EigenMode> b, const ModelParams& params, int d) {
    SpectralDecomposition dec;
    dec.params = params;
    dec.cutoff = d;
    std::vector<EigenMode> all = std::move(a);
    for (auto& m : b) all.push_back(std::move(m));
    std::vector<Complex> values;
    for (const auto& m : all) values.push_back(m.lambda);
    for (int j : spectral_order(values)) dec.modes.push_back(std::move(all[j]));
    return dec;
}

void check_sector_size(const SectorBasis& basis, const DiagonalizeOptions& opts) {
    if (basis.size() > opts.max_sector)
        throw Error(ErrorKind::InvalidArgument, "sector size " + std::to_string(basis.size()) +
                                                    " exceeds max_sector " + std::to_string(opts.max_sector));
}

}  // namespace

SpectralDecomposition diagonalize(const ModelParams& params, const FockSpace& space, const DiagonalizeOptions& opts) {
    const int d = space.dim();
    if (!opts.sector_reduce) return diagonalize(build_rotating_liouvillian(params, space), params, opts);
    const Generator g = rotating_generator(params, d);
    std::vector<EigenMode> blocks[2];
    const Parity parities[2] = {Parity::Even, Parity::Odd};
    for (int s = 0; s < 2; ++s) {
        const SectorBasis basis(d, parities[s]);
        check_sector_size(basis, opts);
        blocks[s] = diagonalize_block(build_sector_matrix(g, basis), basis, opts);
    }
    return merge(std::move(blocks[0]), std::move(blocks[1]), params, d);
}

SpectralDecomposition diagonalize(const Superoperator& op, const ModelParams& params, const DiagonalizeOptions& opts) {
    const int d = op.cutoff;
    const long big_d = static_cast<long>(d) * d;
    if (op.matrix.rows() != big_d || op.matrix.cols() != big_d)
        throw Error(ErrorKind::InvalidDimension, "superoperator shape does not match cutoff");
    if (!op.matrix.allFinite()) throw Error(ErrorKind::NumericFailure, "superoperator has non-finite entries");

    if (opts.sector_reduce) {
        std::vector<EigenMode> blocks[2];
        const Parity parities[2] = {Parity::Even, Parity::Odd};
        for (int s = 0; s < 2; ++s) {
            const SectorBasis basis(d, parities[s]);
            check_sector_size(basis, opts);
            blocks[s] = diagonalize_block(project_to_sector(op, basis), basis, opts);
        }
        return merge(std::move(blocks[0]), std::move(blocks[1]), params, d);
    }

    if (big_d > opts.max_dim)
        throw Error(ErrorKind::InvalidArgument, "D = " + std::to_string(big_d) + " exceeds max_dim");
    const bool vectors = opts.vectors != ModeVectors::None;
    // Vectors are needed for the parity labels either way.
    linalg::EigenSystem es = linalg::eig(op.matrix, true, vectors);
    const FockSpace space(d);
    const CMatrix z2 = parity_superoperator(space).matrix;

    SpectralDecomposition dec;
    dec.params = params;
    dec.cutoff = d;
    const std::vector<int> order = spectral_order(es.values);
    for (std::size_t k = 0; k < order.size(); ++k) {
        const int j = order[k];
        EigenMode m;
        m.lambda = es.values[j];
        const CVector x = es.right.col(j);
        const double z = (x.adjoint() * z2 * x)(0, 0).real() / x.squaredNorm();
        m.parity = z >= 0.0 ? 1 : -1;
        const bool want = opts.vectors == ModeVectors::All ||
                          (opts.vectors == ModeVectors::Leading && static_cast<int>(k) < 2 * opts.leading);
        if (want) {
            m.right = unvec(x, d);
            m.left = unvec(es.left.col(j), d);
            biorthonormalize(m);
        }
        dec.modes.push_back(std::move(m));
    }
    return dec;
}

std::vector<Complex> sector_eigenvalues(const ModelParams& params, int d, Parity parity) {
    const SectorBasis basis(d, parity);
    const RMatrix r = build_sector_matrix(rotating_generator(params, d), basis);
    linalg::EigenSystem es = linalg::eig(r, false, false);
    std::vector<Complex> out;
    out.reserve(es.values.size());
    for (int j : spectral_order(es.values)) out.push_back(es.values[j]);
    return out;
}

double generator_residual(const ModelParams& params, const CMatrix& rho) {
    CMatrix out;
    apply_generator(rotating_generator(params, static_cast<int>(rho.rows())), rho, out);
    return out.cwiseAbs().maxCoeff();
}

namespace {

// Remove the arbitrary global phase of a mode that should be Hermitian up to phase.
CMatrix hermitian_part_phase_fixed(const CMatrix& r) {
    const Complex rr = (r * r).trace();
    Complex phase = 1.0;
    if (std::abs(rr) > 0.0) phase = std::sqrt(rr / std::abs(rr));
    const CMatrix h = r / phase;
    return 0.5 * (h + h.adjoint());
}

}  // namespace

DensityMatrix steady_state(const SpectralDecomposition& dec) {
    if (dec.modes.empty()) throw Error(ErrorKind::InvalidArgument, "empty decomposition");
    const EigenMode& m0 = dec.modes[0];
    if (std::abs(m0.lambda) >= 1e-8)
        throw Error(ErrorKind::NumericFailure, "no zero eigenvalue, |lambda_0| = " + std::to_string(std::abs(m0.lambda)));
    if (!m0.right) throw Error(ErrorKind::InvalidArgument, "decomposition lacks the lambda_0 right mode");
    for (std::size_t j = 1; j < dec.modes.size(); ++j)
        if (dec.modes[j].parity == 1 && std::abs(dec.modes[j].lambda) < 1e-8) {
            std::cerr << "warning: zero eigenvalue is degenerate at n_ex=" << dec.params.n_ex() << "\n";
            break;
        }
    const CMatrix h = hermitian_part_phase_fixed(*m0.right);
    return DensityMatrix::from_hermitized(h);
}

DensityMatrix steady_state(const ModelParams& params, const FockSpace& space) {
    const int d = space.dim();
    const SectorBasis basis(d, Parity::Even);
    const RMatrix r = build_sector_matrix(rotating_generator(params, d), basis);
    // The real null vector, computed in real arithmetic.
    RMatrix m = r;
    const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
    m.diagonal().array() -= 1e-13 * scale;
    Eigen::PartialPivLU<RMatrix> lu(m);
    RVector x = RVector::Ones(r.rows());
    for (int it = 0; it < 3; ++it) {
        x = lu.solve(x);
        x /= x.norm();
    }
    if (!x.allFinite()) throw Error(ErrorKind::NumericFailure, "steady-state inverse iteration failed");
    return DensityMatrix::from_hermitized(basis.to_matrix(x.cast<Complex>()));
}

GapInfo liouvillian_gap(const SpectralDecomposition& dec) {
    if (dec.modes.size() < 3) throw Error(ErrorKind::InvalidArgument, "need at least three modes");
    GapInfo g;
    g.lambda1 = dec.modes[1].lambda;
    g.lambda2 = dec.modes[2].lambda;
    g.gamma1 = -g.lambda1.real();
    g.parity = dec.modes[1].parity;
    const double tol = 1e-9 * (1.0 + std::abs(g.lambda2));
    g.real_pair = std::abs(g.lambda1.imag()) <= tol && std::abs(g.lambda2.imag()) <= tol;
    return g;
}

double band_tolerance(double omega, double gamma1, double n_ex) { return std::max(0.25 * omega, 3.0 * gamma1 / n_ex); }

BandStructure cluster_bands(const std::vector<Complex>& values, double omega, double tolerance, int max_harmonic) {
    if (!(omega > 0.0)) throw Error(ErrorKind::WrongRegime, "band structure needs omega > 0");
    BandStructure bs;
    bs.omega = omega;
    bs.tolerance = tolerance;
    const int nb = 2 * max_harmonic + 1;
    std::vector<std::vector<int>> members(nb);
    for (std::size_t j = 0; j < values.size(); ++j) {
        const double eps = values[j].imag();
        const long n = std::lround(eps / omega);
        if (std::abs(n) > max_harmonic) continue;
        if (std::abs(eps - n * omega) >= tolerance) continue;
        members[n + max_harmonic].push_back(static_cast<int>(j));
    }
    for (int b = 0; b < nb; ++b) {
        auto& mem = members[b];
        if (mem.empty()) continue;
        std::stable_sort(mem.begin(), mem.end(),
                         [&](int x, int y) { return values[x].real() > values[y].real(); });
        const int n = b - max_harmonic;
        bs.harmonics.push_back(n);
        bs.band_frequencies.push_back(n * omega);
        bs.fundamental.push_back(mem[0]);
        if (mem.size() > 1) {
            bs.second.push_back(mem[1]);
            bs.interband_gap.push_back(values[mem[0]].real() - values[mem[1]].real());
        } else {
            bs.second.push_back(-1);
            bs.interband_gap.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        bs.bands.push_back(std::move(mem));
    }
    return bs;
}

double BandStructure::fundamental_rate(int n, const std::vector<Complex>& values) const {
    for (std::size_t b = 0; b < harmonics.size(); ++b)
        if (harmonics[b] == n) return -values.at(fundamental[b]).real();
    return std::numeric_limits<double>::quiet_NaN();
}

BandStructure band_structure(const SpectralDecomposition& dec, double omega, int max_harmonic) {
    if (!(omega > 0.0)) throw Error(ErrorKind::WrongRegime, "band structure needs omega > 0");
    const double tol = band_tolerance(omega, dec.params.gamma1, dec.params.n_ex());
    return cluster_bands(dec.eigenvalues(), omega, tol, max_harmonic);
}

namespace {

struct OddLeading {
    Complex l1, l2;
    RMatrix r;
};

OddLeading odd_leading(const ModelParams& params, int d, bool keep_matrix) {
    const SectorBasis basis(d, Parity::Odd);
    OddLeading out;
    RMatrix r = build_sector_matrix(rotating_generator(params, d), basis);
    linalg::EigenSystem es = linalg::eig(r, false, false);
    const std::vector<int> order = spectral_order(es.values);
    out.l1 = es.values[order[0]];
    out.l2 = es.values[order[1]];
    if (keep_matrix) out.r = std::move(r);
    return out;
}

double overlap_of_leading_pair(const OddLeading& ol) {
    const CVector x1 = linalg::inverse_iteration(ol.r, ol.l1, false);
    const CVector x2 = linalg::inverse_iteration(ol.r, ol.l2, false);
    return std::abs(x1.dot(x2)) / (x1.norm() * x2.norm());
}

}  // namespace

EpResult detect_ep(const ModelParams& base, const FockSpace& space, std::pair<double, double> bracket,
                   const EpOptions& opts) {
    double lo = bracket.first, hi = bracket.second;
    if (!(lo < hi) || lo < 0.0) throw Error(ErrorKind::InvalidArgument, "eta bracket must satisfy 0 <= lo < hi");
    const int d = space.dim();
    const double tol = opts.imag_tol * base.gamma1;
    auto is_complex = [&](const OddLeading& ol) { return std::abs(ol.l1.imag()) > tol; };

    OddLeading at_lo = odd_leading(base.with_eta(lo), d, false);
    OddLeading at_hi = odd_leading(base.with_eta(hi), d, false);
    if (!is_complex(at_lo) || is_complex(at_hi))
        throw Error(ErrorKind::Bracket, "leading odd pair must be complex at eta=" + std::to_string(lo) +
                                            " and real at eta=" + std::to_string(hi));
    EpResult res;
    while ((hi - lo) > opts.rel_width * 0.5 * (hi + lo)) {
        const double mid = 0.5 * (lo + hi);
        OddLeading at_mid = odd_leading(base.with_eta(mid), d, false);
        if (is_complex(at_mid)) {
            lo = mid;
            at_lo = std::move(at_mid);
        } else {
            hi = mid;
            at_hi = std::move(at_mid);
        }
        ++res.iterations;
    }
    res.eta_lo = lo;
    res.eta_hi = hi;
    res.eta_ep = 0.5 * (lo + hi);
    res.lambda1_below = at_lo.l1;
    res.lambda2_below = at_lo.l2;
    res.lambda1_above = at_hi.l1;
    res.lambda2_above = at_hi.l2;
    if (opts.coalescence_diagnostic) {
        for (double rel : {1e-1, 1e-2, 1e-3}) {
            const double eta = res.eta_ep * (1.0 + rel);
            const OddLeading ol = odd_leading(base.with_eta(eta), d, true);
            res.coalescence.emplace_back(eta, overlap_of_leading_pair(ol));
        }
    }
    return res;
}

PowerLawFit power_law_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "x and y lengths differ");
    const int n = static_cast<int>(x.size());
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "power-law fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error(ErrorKind::Domain, "power-law fit needs positive data");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double mx = sx / n, my = sy / n;
    const double vxx = sxx - n * mx * mx;
    if (!(vxx > 0.0)) throw Error(ErrorKind::Domain, "power-law fit needs distinct x values");
    const double slope = (sxy - n * mx * my) / vxx;
    const double intercept = my - slope * mx;
    double rss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = std::log(y[i]) - (intercept + slope * std::log(x[i]));
        rss += e * e;
    }
    PowerLawFit f;
    f.beta = -slope;
    f.prefactor = std::exp(intercept);
    f.points = n;
    f.beta_stderr = n > 2 ? std::sqrt(rss / (n - 2) / vxx) : 0.0;
    return f;
}

PowerLawFit ep_scaling_fit(const std::vector<std::pair<double, double>>& etas_ep, double eta_c) {
    if (etas_ep.size() < 4) throw Error(ErrorKind::InvalidArgument, "EP scaling fit needs at least four points");
    std::vector<double> x, y;
    for (const auto& [n_ex, eta_ep] : etas_ep) {
        if (!(eta_ep - eta_c > 0.0)) throw Error(ErrorKind::Domain, "eta_EP must exceed eta_c");
        x.push_back(n_ex);
        y.push_back(eta_ep - eta_c);
    }
    return power_law_fit(x, y);
}

SymmetryBrokenPair symmetry_broken_states(const SpectralDecomposition& dec) {
    if (dec.modes.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two modes");
    const EigenMode& m1 = dec.modes[1];
    if (std::abs(m1.lambda.imag()) > 1e-9 * (1.0 + std::abs(m1.lambda)))
        throw Error(ErrorKind::WrongRegime, "lambda_1 is complex; below the exceptional point");
    if (m1.parity != -1) throw Error(ErrorKind::WrongRegime, "lambda_1 is not parity odd");
    if (!m1.right) throw Error(ErrorKind::InvalidArgument, "decomposition lacks the lambda_1 right mode");
    const DensityMatrix rho_ss = steady_state(dec);

    // Jordan split r1 = P - N into orthogonal positive parts.
    const CMatrix h = hermitian_part_phase_fixed(*m1.right);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const RVector w = es.eigenvalues();
    const CMatrix& v = es.eigenvectors();
    const RVector wp = w.cwiseMax(0.0);
    const RVector wn = (-w).cwiseMax(0.0);
    CMatrix p = v * wp.cast<Complex>().asDiagonal() * v.adjoint();
    CMatrix n = v * wn.cast<Complex>().asDiagonal() * v.adjoint();

    DensityMatrix plus = DensityMatrix::from_hermitized(p);
    DensityMatrix minus = DensityMatrix::from_hermitized(n);

    const FockSpace space(dec.cutoff);
    const Complex alpha_plus = meanfield::fixed_points(dec.params).first;
    if ((std::conj(alpha_plus) * plus.expect(space.a())).real() < 0.0) std::swap(plus, minus);

    const CMatrix xi = 0.5 * (plus.matrix() + minus.matrix());
    const CMatrix r1 = 0.5 * (plus.matrix() - minus.matrix());
    const Complex a_plus = plus.expect(space.a());
    const double dist = trace_distance(rho_ss.matrix(), xi);
    return SymmetryBrokenPair{plus, minus, DensityMatrix::from_hermitized(xi), rho_ss, r1, dist, a_plus};
}

}  // namespace qvdp
