#include "vibronic/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>

#include "vibronic/kernels.hpp"

namespace vibronic {
namespace {

constexpr cplx kI{0.0, 1.0};

// (i)^n for integer n >= 0, exact.
cplx i_pow(int n) {
  switch (n & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

double minus_one_pow(int k) { return (k & 1) ? -1.0 : 1.0; }

struct Raising {
  Electronic from;
  Electronic to;
  int ion;  // 1 or 2
};

// S_{+1} raises the first label, S_{+2} the second.
constexpr std::array<Raising, 4> kRaisings{{{Electronic::dd, Electronic::ud, 1},
                                            {Electronic::du, Electronic::uu, 1},
                                            {Electronic::dd, Electronic::du, 2},
                                            {Electronic::ud, Electronic::uu, 2}}};

cplx ion_phase(int ion, double phase0) {
  return std::polar(1.0, ion == 1 ? 0.5 * phase0 : -0.5 * phase0);
}

}  // namespace

void BichromaticParams::validate() const {
  if (k < 0 || k_prime < 0) throw Error("sideband orders must be non-negative");
  modes.validate();
}

double effective_phi(const BichromaticParams& p) { return p.phi + std::arg(p.omega); }

double omega_k_scale(int k, cplx omega, double delta, double eta) {
  if (delta == 0.0) throw SingularParameter("omega_k_scale: delta = 0 makes the dispersive coupling singular");
  return 2.0 * std::norm(omega) * minus_one_pow(k) * std::pow(eta, 2 * k) / delta;
}

double rabi_effective(int n_c, int n_r, const BichromaticParams& p) {
  if (!p.symmetric())
    throw Error("rabi_effective: requires k = k' and delta = delta'");
  const double scale = omega_k_scale(p.k, p.omega, p.delta, p.modes.eta);
  const double f = coupling_f(n_c, n_r, p.k, p.modes);
  const double bracket = falling_factorial(n_c, p.k) - rising_factorial(n_c, p.k);
  return scale * f * f * bracket;
}

RabiSpectrum rabi_spectrum(const BichromaticParams& p, int n_c_max, int n_r_max) {
  RabiSpectrum s{p, n_c_max, n_r_max, {}};
  s.values.reserve(static_cast<std::size_t>((n_c_max + 1) * (n_r_max + 1)));
  for (int nc = 0; nc <= n_c_max; ++nc)
    for (int nr = 0; nr <= n_r_max; ++nr) s.values.push_back(rabi_effective(nc, nr, p));
  return s;
}

CMatrix build_bichromatic_H(double t, const BichromaticParams& p, const HilbertConfig& cfg) {
  CMatrix m = CMatrix::Zero(cfg.dim(), cfg.dim());
  const cplx laser = std::polar(1.0, p.phi);
  const cplx blue = i_pow(p.k) * std::pow(p.modes.eta, p.k) * std::polar(1.0, p.delta * t);
  const cplx red =
      i_pow(p.k_prime) * std::pow(p.modes.eta, p.k_prime) * std::polar(1.0, -p.delta_prime * t);

  for (const Raising& r : kRaisings) {
    const cplx pre = p.omega * laser * ion_phase(r.ion, p.phi0);
    for (int nc = 0; nc <= cfg.n_max_c; ++nc)
      for (int nr = 0; nr <= cfg.n_max_r; ++nr) {
        const int col = cfg.index(r.from, nc, nr);
        // a^dagger^k F_k |n>: F_k evaluated before raising
        if (nc + p.k <= cfg.n_max_c) {
          const double amp =
              coupling_f(nc, nr, p.k, p.modes) * std::sqrt(rising_factorial(nc, p.k));
          m(cfg.index(r.to, nc + p.k, nr), col) += pre * blue * amp;
        }
        // F_k' a^k' |n>: F_k' evaluated after lowering
        if (nc - p.k_prime >= 0) {
          const int lowered = nc - p.k_prime;
          const double amp = coupling_f(lowered, nr, p.k_prime, p.modes) *
                             std::sqrt(falling_factorial(nc, p.k_prime));
          m(cfg.index(r.to, lowered, nr), col) += pre * red * amp;
        }
      }
  }
  return m + m.adjoint();
}

double max_vibronic_rabi(const BichromaticParams& p, int n_c_max, int n_r_max) {
  double worst = 0.0;
  for (int nc = 0; nc <= n_c_max; ++nc)
    for (int nr = 0; nr <= n_r_max; ++nr)
      worst = std::max(worst, std::pow(p.modes.eta, p.k) * std::abs(p.omega) *
                                  std::abs(coupling_f(nc, nr, p.k, p.modes)));
  return worst;
}

CMatrix build_effective_H(const BichromaticParams& p, const HilbertConfig& cfg, Diagnostics* diag) {
  if (p.delta == 0.0) throw SingularParameter("build_effective_H: delta = 0");
  if (!p.symmetric()) throw Error("build_effective_H: requires k = k' and delta = delta'");

  const double vibronic = max_vibronic_rabi(p, cfg.n_max_c, cfg.n_max_r);
  if (std::abs(p.delta) < 10.0 * vibronic) {
    std::ostringstream os;
    os << "adiabaticity: |delta| / max vibronic Rabi frequency = " << std::abs(p.delta) / vibronic
       << " < 10; dispersive elimination is not reliable";
    warn(diag, os.str());
  }

  CMatrix h = CMatrix::Zero(cfg.dim(), cfg.dim());
  const double sign = minus_one_pow(p.k);
  const cplx two_photon = std::polar(1.0, 2.0 * effective_phi(p));
  const cplx exchange = std::polar(1.0, p.phi0);  // S'_{+1} S'_{-2} carries e^{i phi0}
  for (int nc = 0; nc <= cfg.n_max_c; ++nc)
    for (int nr = 0; nr <= cfg.n_max_r; ++nr) {
      const double w = rabi_effective(nc, nr, p);
      const int dd = cfg.index(Electronic::dd, nc, nr);
      const int du = cfg.index(Electronic::du, nc, nr);
      const int ud = cfg.index(Electronic::ud, nc, nr);
      const int uu = cfg.index(Electronic::uu, nc, nr);
      h(uu, dd) = w * two_photon;
      h(dd, uu) = w * std::conj(two_photon);
      h(ud, du) = sign * w * exchange;
      h(du, ud) = sign * w * std::conj(exchange);
      // (1/2 + h.c.) self-energy, the same on all four electronic states
      for (int idx : {dd, du, ud, uu}) h(idx, idx) = sign * w;
    }
  return h;
}

CMatrix build_carrier_H(const CarrierParams& p, const HilbertConfig& cfg) {
  CMatrix m = CMatrix::Zero(cfg.dim(), cfg.dim());
  const cplx laser = std::polar(1.0, p.varphi);
  for (const Raising& r : kRaisings) {
    const cplx pre = p.omega * laser * ion_phase(r.ion, p.varphi0);
    for (int nc = 0; nc <= cfg.n_max_c; ++nc)
      for (int nr = 0; nr <= cfg.n_max_r; ++nr)
        m(cfg.index(r.to, nc, nr), cfg.index(r.from, nc, nr)) +=
            pre * coupling_f(nc, nr, 0, p.modes);
  }
  return m + m.adjoint();
}

// ---------------------------------------------------------------------------

HermitianPropagator::HermitianPropagator(const CMatrix& h) {
  if (h.rows() != h.cols()) throw DimensionMismatch("Hamiltonian must be square");
  const double scale = h.norm();
  if ((h - h.adjoint()).norm() > 1e-10 * std::max(scale, 1e-300) && scale > 0.0)
    throw NumericalError("propagate: Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("propagate: eigendecomposition failed");
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
}

JointState HermitianPropagator::evolve(const JointState& psi0, double t) const {
  if (psi0.amplitudes.size() != evecs_.rows())
    throw DimensionMismatch("propagate: state and Hamiltonian dimensions differ");
  CVector coeffs = evecs_.adjoint() * psi0.amplitudes;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs[i] *= std::polar(1.0, -evals_[i] * t);
  return {psi0.config, evecs_ * coeffs};
}

CMatrix HermitianPropagator::unitary(double t) const {
  CVector phases(evals_.size());
  for (Eigen::Index i = 0; i < evals_.size(); ++i) phases[i] = std::polar(1.0, -evals_[i] * t);
  return evecs_ * phases.asDiagonal() * evecs_.adjoint();
}

JointState propagate_const(const CMatrix& h, const JointState& psi0, double t) {
  return HermitianPropagator(h).evolve(psi0, t);
}

namespace {

std::size_t step_count(double t, double dt_max) {
  if (!(dt_max > 0.0)) throw Error("propagate_timedep: dt_max must be > 0");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::abs(t) / dt_max)));
}

JointState midpoint_generic(const HamiltonianBuilder& builder, const JointState& psi0, double t,
                            std::size_t steps) {
  const double dt = t / static_cast<double>(steps);
  JointState psi = psi0;
  for (std::size_t s = 0; s < steps; ++s) {
    const double t_mid = (static_cast<double>(s) + 0.5) * dt;
    psi = HermitianPropagator(builder(t_mid)).evolve(psi, dt);
  }
  return psi;
}

void report_halving(TimeDepResult& out, const JointState& fine, const TimeDepOptions& opts,
                    Diagnostics* diag) {
  out.halving_change = (out.state.amplitudes - fine.amplitudes).norm();
  if (out.halving_change > opts.tolerance) {
    std::ostringstream os;
    os << "propagate_timedep: halving dt changed the final state by " << out.halving_change
       << " > tolerance " << opts.tolerance;
    warn(diag, os.str());
  }
}

}  // namespace

TimeDepResult propagate_timedep(const HamiltonianBuilder& builder, const JointState& psi0,
                                double t, const TimeDepOptions& opts, Diagnostics* diag) {
  const std::size_t steps = step_count(t, opts.dt_max);
  TimeDepResult out{midpoint_generic(builder, psi0, t, steps), steps, -1.0};
  if (opts.check_halving) report_halving(out, midpoint_generic(builder, psi0, t, 2 * steps), opts, diag);
  return out;
}

namespace {

HermitianPropagator rotating_frame_propagator(const BichromaticParams& p, const HilbertConfig& cfg,
                                              const CMatrix& h0) {
  if (!p.symmetric() || p.k < 1)
    throw Error("BichromaticEvolution: requires a symmetric drive with k >= 1");
  CMatrix h = h0;
  const double rate = p.delta / p.k;
  for (int e = 0; e < kElectronicDim; ++e)
    for (int nc = 0; nc <= cfg.n_max_c; ++nc)
      for (int nr = 0; nr <= cfg.n_max_r; ++nr) {
        const int i = cfg.index(static_cast<Electronic>(e), nc, nr);
        h(i, i) += rate * nc;
      }
  return HermitianPropagator(h);
}

}  // namespace

BichromaticEvolution::BichromaticEvolution(const BichromaticParams& p, const HilbertConfig& cfg)
    : params_(p),
      cfg_(cfg),
      h0_(build_bichromatic_H(0.0, p, cfg)),
      rotating_(rotating_frame_propagator(p, cfg, h0_)),
      n_c_(cfg.dim()) {
  for (int e = 0; e < kElectronicDim; ++e)
    for (int nc = 0; nc <= cfg.n_max_c; ++nc)
      for (int nr = 0; nr <= cfg.n_max_r; ++nr)
        n_c_[cfg.index(static_cast<Electronic>(e), nc, nr)] = nc;
}

CVector BichromaticEvolution::frame_phases(double t) const {
  CVector ph(n_c_.size());
  const double rate = params_.delta / params_.k;
  for (Eigen::Index i = 0; i < n_c_.size(); ++i) ph[i] = std::polar(1.0, rate * t * n_c_[i]);
  return ph;
}

JointState BichromaticEvolution::exact(const JointState& psi0, double t) const {
  JointState chi = rotating_.evolve(psi0, t);
  chi.amplitudes = frame_phases(t).cwiseProduct(chi.amplitudes);
  return chi;
}

JointState BichromaticEvolution::midpoint_run(const JointState& psi0, double t,
                                              std::size_t steps) const {
  const double dt = t / static_cast<double>(steps);
  // Row-major copy of exp(-i H(0) dt) for the matvec kernel.
  const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> u =
      HermitianPropagator(h0_).unitary(dt);
  const auto& k = kernels::active();
  const std::size_t n = static_cast<std::size_t>(u.rows());
  CVector psi = psi0.amplitudes;
  CVector tmp(psi.size());
  for (std::size_t s = 0; s < steps; ++s) {
    const CVector rot = frame_phases((static_cast<double>(s) + 0.5) * dt);
    tmp = rot.conjugate().cwiseProduct(psi);
    k.cmatvec({u.data(), n * n}, n, n, {tmp.data(), n}, {psi.data(), n});
    psi = rot.cwiseProduct(psi);
  }
  return {psi0.config, psi};
}

TimeDepResult BichromaticEvolution::midpoint(const JointState& psi0, double t,
                                             const TimeDepOptions& opts, Diagnostics* diag) const {
  const std::size_t steps = step_count(t, opts.dt_max);
  TimeDepResult out{midpoint_run(psi0, t, steps), steps, -1.0};
  if (opts.check_halving) report_halving(out, midpoint_run(psi0, t, 2 * steps), opts, diag);
  return out;
}

// ---------------------------------------------------------------------------

std::array<cplx, 2> closed_form_dispersive(int n_c, int n_r, const BichromaticParams& p, double t) {
  const double w = rabi_effective(n_c, n_r, p);
  const double sign = minus_one_pow(p.k);
  const cplx global = std::polar(1.0, -sign * w * t);
  // With delta > 0, sign(w) = (-1)^(k+1) and -i sin(w t) = i (-1)^k sin(|w| t).
  return {global * std::cos(w * t),
          global * (-kI) * std::polar(1.0, 2.0 * effective_phi(p)) * std::sin(w * t)};
}

std::array<cplx, 4> carrier_block(const CarrierParams& p, int n_c, int n_r, double t0,
                                  const std::array<cplx, 4>& in) {
  const cplx omega0 = p.omega * coupling_f(n_c, n_r, 0, p.modes);
  const double theta = std::abs(omega0) * t0;
  const double laser = p.varphi + std::arg(omega0);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  // Single-ion rotation in the (down, up) basis, out x in.
  auto ion = [&](double angle) {
    Eigen::Matrix2cd u;
    u << c, -kI * s * std::polar(1.0, -angle), -kI * s * std::polar(1.0, angle), c;
    return u;
  };
  const Eigen::Matrix2cd u1 = ion(laser + 0.5 * p.varphi0);
  const Eigen::Matrix2cd u2 = ion(laser - 0.5 * p.varphi0);
  std::array<cplx, 4> out{};
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2)
      for (int r1 = 0; r1 < 2; ++r1)
        for (int r2 = 0; r2 < 2; ++r2)
          out[2 * s1 + s2] += u1(s1, r1) * u2(s2, r2) * in[2 * r1 + r2];
  return out;
}

std::array<cplx, 4> closed_form_carrier(BellSign sign, const CarrierParams& p, int n_c, int n_r,
                                        double t0) {
  const cplx omega0 = p.omega * coupling_f(n_c, n_r, 0, p.modes);
  const double theta = std::abs(omega0) * t0;
  const double laser = p.varphi + std::arg(omega0);
  const double pm = sign == BellSign::plus ? 1.0 : -1.0;
  const double c2 = std::cos(theta) * std::cos(theta);
  const double s2 = std::sin(theta) * std::sin(theta);
  const double r = 1.0 / std::numbers::sqrt2;
  const cplx e = std::polar(1.0, laser);
  const cplx mix = -0.5 * kI * std::sin(2.0 * theta) * (e + pm * std::conj(e));
  return {r * (c2 - pm * s2 * std::conj(e * e)),   // |dd>
          r * mix * std::polar(1.0, -0.5 * p.varphi0),  // |du>
          r * mix * std::polar(1.0, 0.5 * p.varphi0),   // |ud>
          r * (pm * c2 - s2 * e * e)};                  // |uu>
}

std::vector<std::string> resonance_guard(const BichromaticParams& p, double tolerance) {
  std::vector<std::string> out;
  const double nu = p.modes.nu;
  const double nu_r = std::sqrt(3.0) * nu;
  if (p.delta != 0.0 && p.symmetric()) {
    if (tolerance < 0.0) tolerance = 10.0 * std::abs(rabi_effective(0, 0, p));
    if (p.k > 1) {
      for (int m = 1; m <= 2 * p.k; ++m) {
        const double miss = std::abs(p.k * nu - p.delta - m * nu_r);
        if (miss < tolerance) {
          std::ostringstream os;
          os << "resonance: k nu - delta = " << p.k * nu - p.delta << " lies within " << miss
             << " of the stretch sideband m = " << m << " (m sqrt(3) nu); both modes may be driven";
          out.push_back(os.str());
        }
      }
    }
  }
  if (p.k >= 1) {
    const double vibronic = std::pow(p.modes.eta, p.k) * std::abs(p.omega) *
                            std::abs(coupling_f(0, 0, p.k, p.modes));
    if (std::abs(p.delta) < 10.0 * vibronic) {
      std::ostringstream os;
      os << "adiabaticity: |delta| = " << std::abs(p.delta) << " is below 10 x the vibronic Rabi "
         << "frequency " << vibronic;
      out.push_back(os.str());
    }
  }
  if (std::abs(p.delta) > 0.2 * nu || std::abs(p.delta_prime) > 0.2 * nu) {
    out.push_back("rotating-wave: |delta| > 0.2 nu; neglected sideband terms are not small");
  }
  return out;
}

}  // namespace vibronic
