#include "vibronic/fockspace.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

#include "vibronic/kernels.hpp"

namespace vibronic {

void HilbertConfig::validate() const {
  if (n_max_c < 0 || n_max_r < 0)
    throw Error("HilbertConfig: Fock cutoffs must be non-negative");
}

double ModeParams::default_eta_r(double eta) { return eta * std::pow(3.0, -0.25); }

void ModeParams::validate() const {
  if (!(eta > 0.0)) throw Error("ModeParams: eta must be > 0");
  if (!(eta_r > 0.0)) throw Error("ModeParams: eta_r must be > 0");
  if (!(nu > 0.0)) throw Error("ModeParams: nu must be > 0");
}

JointState JointState::basis(const HilbertConfig& cfg, Electronic e, int n_c, int n_r) {
  if (!cfg.contains(n_c, n_r)) throw DimensionMismatch("basis state outside the truncated space");
  JointState s{cfg, CVector::Zero(cfg.dim())};
  s.amplitudes[cfg.index(e, n_c, n_r)] = 1.0;
  return s;
}

JointState JointState::product(const HilbertConfig& cfg, const std::array<cplx, 4>& electronic,
                               const CVector& vib) {
  if (vib.size() != cfg.vib_dim()) throw DimensionMismatch("vibrational vector size mismatch");
  JointState s{cfg, CVector::Zero(cfg.dim())};
  for (int e = 0; e < kElectronicDim; ++e)
    s.amplitudes.segment(e * cfg.vib_dim(), cfg.vib_dim()) = electronic[e] * vib;
  return s;
}

DensityCheck check_density(const VibDensity& rho) {
  DensityCheck out;
  const CMatrix& m = rho.matrix;
  out.hermiticity_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
  out.trace_error = std::abs(m.trace() - cplx(1.0));
  const CMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  return out;
}

namespace {

// Marginal populations of each mode.
void marginals(const HilbertConfig& cfg, const Eigen::VectorXd& pops, Eigen::VectorXd& pc,
               Eigen::VectorXd& pr) {
  pc = Eigen::VectorXd::Zero(cfg.n_max_c + 1);
  pr = Eigen::VectorXd::Zero(cfg.n_max_r + 1);
  for (int nc = 0; nc <= cfg.n_max_c; ++nc)
    for (int nr = 0; nr <= cfg.n_max_r; ++nr) {
      const double p = pops[cfg.vib_index(nc, nr)];
      pc[nc] += p;
      pr[nr] += p;
    }
}

bool guard_mode(const Eigen::VectorXd& p, const char* name, double threshold, Diagnostics* diag) {
  const int top = static_cast<int>(p.size()) - 1;
  if (top == 0) return true;
  double tail = p[top];
  if (top >= 2) tail += p[top - 1];
  if (tail > threshold) {
    std::ostringstream os;
    os << "truncation: mode " << name << " holds population " << tail
       << " in its top two Fock levels (n_max = " << top << ")";
    warn(diag, os.str());
    return false;
  }
  return true;
}

bool guard(const HilbertConfig& cfg, const Eigen::VectorXd& pops, Diagnostics* diag,
           double threshold) {
  Eigen::VectorXd pc, pr;
  marginals(cfg, pops, pc, pr);
  const bool ok_c = guard_mode(pc, "c", threshold, diag);
  const bool ok_r = guard_mode(pr, "r", threshold, diag);
  return ok_c && ok_r;
}

}  // namespace

bool check_truncation(const VibDensity& rho, Diagnostics* diag, double threshold) {
  return guard(rho.config, rho.populations(), diag, threshold);
}

bool check_truncation(const JointState& psi, Diagnostics* diag, double threshold) {
  const int vd = psi.config.vib_dim();
  Eigen::VectorXd pops = Eigen::VectorXd::Zero(vd);
  for (int e = 0; e < kElectronicDim; ++e)
    pops += psi.amplitudes.segment(e * vd, vd).cwiseAbs2();
  return guard(psi.config, pops, diag, threshold);
}

double laguerre(int n, int k, double x) {
  if (n <= 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + k - x;
  for (int m = 1; m < n; ++m) {
    const double next = ((2.0 * m + 1.0 + k - x) * cur - (m + k) * prev) / (m + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double falling_factorial(int n, int k) {
  if (n < k) return 0.0;
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= static_cast<double>(n - i);
  return r;
}

double rising_factorial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= static_cast<double>(n + i);
  return r;
}

double coupling_f(int n_c, int n_r, int k, const ModeParams& modes) {
  const double eta2 = modes.eta * modes.eta;
  const double etar2 = modes.eta_r * modes.eta_r;
  double ratio = 1.0;  // n_c! / (n_c + k)!
  for (int i = 1; i <= k; ++i) ratio /= static_cast<double>(n_c + i);
  return std::exp(-0.5 * (eta2 + etar2)) * ratio * laguerre(n_c, k, eta2) * laguerre(n_r, 0, etar2);
}

CMatrix annihilation(int levels) {
  CMatrix a = CMatrix::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

ModeOperators mode_operators(const HilbertConfig& cfg) {
  const CMatrix ac = annihilation(cfg.levels(Mode::c));
  const CMatrix ar = annihilation(cfg.levels(Mode::r));
  const CMatrix ic = CMatrix::Identity(cfg.levels(Mode::c), cfg.levels(Mode::c));
  const CMatrix ir = CMatrix::Identity(cfg.levels(Mode::r), cfg.levels(Mode::r));
  const int vd = cfg.vib_dim();

  // Kronecker lift: (electronic identity) x A_c x A_r, with n_r fastest.
  auto lift = [&](const CMatrix& mc, const CMatrix& mr) {
    CMatrix vib = CMatrix::Zero(vd, vd);
    for (int i = 0; i < mc.rows(); ++i)
      for (int j = 0; j < mc.cols(); ++j)
        if (mc(i, j) != cplx(0.0))
          vib.block(i * mr.rows(), j * mr.cols(), mr.rows(), mr.cols()) = mc(i, j) * mr;
    CMatrix full = CMatrix::Zero(cfg.dim(), cfg.dim());
    for (int e = 0; e < kElectronicDim; ++e) full.block(e * vd, e * vd, vd, vd) = vib;
    return full;
  };

  ModeOperators ops;
  ops.a = lift(ac, ir);
  ops.a_dag = ops.a.adjoint();
  ops.n_c = ops.a_dag * ops.a;
  ops.b = lift(ic, ar);
  ops.b_dag = ops.b.adjoint();
  ops.n_r = ops.b_dag * ops.b;
  return ops;
}

CMatrix displacement(cplx alpha, Mode mode, const HilbertConfig& cfg, Diagnostics* diag) {
  const int levels = cfg.levels(mode);
  const int n_max = levels - 1;
  if (std::norm(alpha) > n_max / 4.0) {
    std::ostringstream os;
    os << "displacement: |alpha|^2 = " << std::norm(alpha) << " exceeds n_max/4 = " << n_max / 4.0
       << " for mode " << (mode == Mode::c ? 'c' : 'r') << "; truncation unreliable";
    warn(diag, os.str());
  }
  if (alpha == cplx(0.0)) return CMatrix::Identity(levels, levels);
  // alpha a^dag - conj(alpha) a = -i G with G Hermitian.
  const CMatrix a = annihilation(levels);
  const CMatrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
  const CMatrix herm = cplx(0.0, 1.0) * gen;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (herm + herm.adjoint()));
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<cplx>() * cplx(0.0, -1.0)).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

CVector coherent_amplitudes(cplx alpha, int levels) {
  CVector v(levels);
  v[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < levels; ++n) v[n] = v[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  return v;
}

// n_r fastest, matching HilbertConfig::vib_index.
CVector kron(const CVector& c, const CVector& r) {
  CVector v(c.size() * r.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) v.segment(i * r.size(), r.size()) = c[i] * r;
  return v;
}

Eigen::VectorXd thermal_weights(double nbar, int levels) {
  Eigen::VectorXd w(levels);
  if (nbar == 0.0) {
    w.setZero();
    w[0] = 1.0;
    return w;
  }
  const double q = nbar / (nbar + 1.0);
  w[0] = 1.0 / (nbar + 1.0);
  for (int n = 1; n < levels; ++n) w[n] = w[n - 1] * q;
  return w;
}

}  // namespace

CVector make_vib_vector(const StateSpec& spec, const HilbertConfig& cfg) {
  cfg.validate();
  CVector v = CVector::Zero(cfg.vib_dim());
  if (const auto* f = std::get_if<FockSpec>(&spec)) {
    if (!cfg.contains(f->n_c, f->n_r)) throw Error("fock state outside the truncated space");
    v[cfg.vib_index(f->n_c, f->n_r)] = 1.0;
  } else if (const auto* c = std::get_if<CoherentSpec>(&spec)) {
    v = kron(coherent_amplitudes(c->alpha_c, cfg.levels(Mode::c)),
             coherent_amplitudes(c->alpha_r, cfg.levels(Mode::r)));
    v /= v.norm();
  } else if (const auto* s = std::get_if<SuperpositionSpec>(&spec)) {
    for (const auto& [nc, nr, amp] : s->terms) {
      if (!cfg.contains(nc, nr)) throw Error("superposition term outside the truncated space");
      v[cfg.vib_index(nc, nr)] += amp;
    }
    const double norm = v.norm();
    if (norm == 0.0) throw Error("superposition amplitudes have zero total norm");
    v /= norm;
  } else {
    throw Error("thermal state has no pure-vector representation");
  }
  return v;
}

VibDensity make_vib_state(const StateSpec& spec, const HilbertConfig& cfg, Diagnostics* diag) {
  cfg.validate();
  VibDensity rho{cfg, CMatrix::Zero(cfg.vib_dim(), cfg.vib_dim())};
  if (const auto* t = std::get_if<ThermalSpec>(&spec)) {
    if (t->nbar_c < 0.0 || t->nbar_r < 0.0) throw Error("thermal state: negative mean occupation");
    const Eigen::VectorXd wc = thermal_weights(t->nbar_c, cfg.levels(Mode::c));
    const Eigen::VectorXd wr = thermal_weights(t->nbar_r, cfg.levels(Mode::r));
    const double total = wc.sum() * wr.sum();
    for (int nc = 0; nc <= cfg.n_max_c; ++nc)
      for (int nr = 0; nr <= cfg.n_max_r; ++nr) {
        const int i = cfg.vib_index(nc, nr);
        rho.matrix(i, i) = wc[nc] * wr[nr] / total;
      }
  } else {
    const CVector v = make_vib_vector(spec, cfg);
    rho.matrix = v * v.adjoint();
  }
  check_truncation(rho, diag);
  return rho;
}

double fidelity(const JointState& state, const JointState& target) {
  if (!(state.config == target.config) || state.amplitudes.size() != target.amplitudes.size())
    throw DimensionMismatch("fidelity: states live on different Hilbert spaces");
  const auto& k = kernels::active();
  const cplx overlap =
      k.cdot({target.amplitudes.data(), static_cast<std::size_t>(target.amplitudes.size())},
             {state.amplitudes.data(), static_cast<std::size_t>(state.amplitudes.size())});
  return std::norm(overlap);
}

Eigen::Matrix4cd reduce_electronic(const JointState& psi) {
  const int vd = psi.config.vib_dim();
  Eigen::Matrix4cd out;
  for (int e = 0; e < kElectronicDim; ++e)
    for (int f = 0; f < kElectronicDim; ++f)
      out(e, f) = psi.amplitudes.segment(f * vd, vd).dot(psi.amplitudes.segment(e * vd, vd));
  return out;
}

VibDensity reduce_vibrational(const JointState& psi) {
  const int vd = psi.config.vib_dim();
  VibDensity rho{psi.config, CMatrix::Zero(vd, vd)};
  for (int e = 0; e < kElectronicDim; ++e) {
    const auto seg = psi.amplitudes.segment(e * vd, vd);
    rho.matrix += seg * seg.adjoint();
  }
  return rho;
}

double trace_distance(const VibDensity& a, const VibDensity& b) {
  if (a.matrix.rows() != b.matrix.rows())
    throw DimensionMismatch("trace_distance: density matrices differ in size");
  const CMatrix d = a.matrix - b.matrix;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace vibronic
