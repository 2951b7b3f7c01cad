#include "vibronic/tomography.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "vibronic/kernels.hpp"
#include "vibronic/nnls.hpp"

namespace vibronic {
namespace {

constexpr double kCollisionTolerance = 1e-12;

CMatrix kron(const CMatrix& c, const CMatrix& r) {
  CMatrix out(c.rows() * r.rows(), c.cols() * r.cols());
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      out.block(i * r.rows(), j * r.cols(), r.rows(), r.cols()) = c(i, j) * r;
  return out;
}

struct Collision {
  int i, j;
};

std::vector<Collision> collisions(const std::vector<double>& w) {
  std::vector<int> order(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w[a] < w[b]; });
  std::vector<Collision> out;
  for (std::size_t s = 1; s < order.size(); ++s) {
    const double a = w[order[s - 1]];
    const double b = w[order[s]];
    if (b - a <= kCollisionTolerance * std::max(std::abs(a), std::abs(b)))
      out.push_back({std::min(order[s - 1], order[s]), std::max(order[s - 1], order[s])});
  }
  return out;
}

std::string grid_label(int index, int n_r_max) {
  std::ostringstream os;
  os << "(" << index / (n_r_max + 1) << "," << index % (n_r_max + 1) << ")";
  return os.str();
}

Eigen::MatrixXd design_matrix(const std::vector<double>& freqs, std::span<const double> taus) {
  // Row-major fill from the kernel, then copied into Eigen's column-major storage.
  std::vector<double> buf(taus.size() * freqs.size());
  kernels::active().cos2_design(freqs, taus, buf);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(taus.size()), static_cast<Eigen::Index>(freqs.size()));
  for (std::size_t i = 0; i < taus.size(); ++i)
    for (std::size_t j = 0; j < freqs.size(); ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = buf[i * freqs.size() + j];
  return a;
}

double condition_of(const Eigen::MatrixXd& a) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0.0;
  const double smin = s[s.size() - 1];
  return smin > 0.0 ? s[0] / smin : std::numeric_limits<double>::infinity();
}

}  // namespace

void SignalRecord::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i > 0 && !(samples[i].tau > samples[i - 1].tau))
      throw Error("signal record: taus must be strictly increasing");
    if (!(samples[i].p_dd >= 0.0 && samples[i].p_dd <= 1.0))
      throw Error("signal record: p_dd outside [0, 1]");
  }
}

double PopulationEstimate::total() const {
  double s = 0.0;
  for (double v : pi) s += v;
  return s;
}

double wigner_scale() { return 4.0 / (std::numbers::pi * std::numbers::pi); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

VibDensity displace_vib(const VibDensity& rho, cplx alpha_c, cplx alpha_r, Diagnostics* diag) {
  const HilbertConfig& cfg = rho.config;
  const CMatrix d = kron(displacement(alpha_c, Mode::c, cfg, diag),
                         displacement(alpha_r, Mode::r, cfg, diag));
  VibDensity out{cfg, d.adjoint() * rho.matrix * d};
  const double drift = std::abs(out.matrix.trace() - rho.matrix.trace());
  if (drift > 1e-8) {
    std::ostringstream os;
    os << "displacement: trace changed by " << drift << "; increase the Fock cutoff";
    warn(diag, os.str());
  }
  check_truncation(out, diag);
  return out;
}

std::vector<double> fit_frequencies(const BichromaticParams& p, int n_c_max, int n_r_max) {
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>((n_c_max + 1) * (n_r_max + 1)));
  for (int nc = 0; nc <= n_c_max; ++nc)
    for (int nr = 0; nr <= n_r_max; ++nr) w.push_back(std::abs(rabi_effective(nc, nr, p)));
  return w;
}

SignalRecord synth_signal(const VibDensity& rho, std::span<const double> taus,
                          const BichromaticParams& p, std::uint64_t shots, std::uint64_t seed) {
  const HilbertConfig& cfg = rho.config;
  const std::vector<double> freqs = fit_frequencies(p, cfg.n_max_c, cfg.n_max_r);
  const Eigen::VectorXd pops = rho.populations();
  const std::vector<double> weights(pops.data(), pops.data() + pops.size());
  std::vector<double> exact(taus.size());
  kernels::active().cos2_signal(freqs, weights, taus, exact);

  SignalRecord rec{{}, p, seed};
  rec.samples.reserve(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double prob = std::clamp(exact[i], 0.0, 1.0);
    double value = prob;
    if (shots > 0) {
      std::mt19937_64 gen(derive_seed(seed, i));
      std::binomial_distribution<std::uint64_t> draw(shots, prob);
      value = static_cast<double>(draw(gen)) / static_cast<double>(shots);
    }
    rec.samples.push_back({taus[i], value, shots});
  }
  rec.validate();
  return rec;
}

PopulationEstimate invert_populations(const SignalRecord& record, int n_fit_c, int n_fit_r,
                                      double ridge) {
  if (n_fit_c < 0 || n_fit_r < 0) throw Error("invert_populations: negative fit grid");
  if (ridge < 0.0) throw Error("invert_populations: ridge must be >= 0");
  record.validate();
  const std::vector<double> freqs = fit_frequencies(record.params, n_fit_c, n_fit_r);
  const auto unknowns = static_cast<Eigen::Index>(freqs.size());
  if (static_cast<Eigen::Index>(record.samples.size()) < unknowns) {
    std::ostringstream os;
    os << "invert_populations: " << record.samples.size() << " samples for " << unknowns
       << " unknowns";
    throw Error(os.str());
  }

  if (const auto hits = collisions(freqs); !hits.empty()) {
    std::ostringstream os;
    os << "invert_populations: fit frequencies coincide for";
    for (const Collision& c : hits)
      os << " " << grid_label(c.i, n_fit_r) << "~" << grid_label(c.j, n_fit_r);
    throw DegenerateDesign(os.str());
  }

  std::vector<double> taus;
  Eigen::VectorXd b(static_cast<Eigen::Index>(record.samples.size()));
  for (std::size_t i = 0; i < record.samples.size(); ++i) {
    taus.push_back(record.samples[i].tau);
    b[static_cast<Eigen::Index>(i)] = record.samples[i].p_dd;
  }
  const Eigen::MatrixXd a = design_matrix(freqs, taus);
  const double cond = condition_of(a);
  if (!(cond < 1e12)) {
    std::ostringstream os;
    os << "invert_populations: design matrix is rank deficient (condition number " << cond
       << "); the tau grid does not resolve the fit frequencies";
    throw DegenerateDesign(os.str());
  }

  NnlsResult sol;
  if (ridge > 0.0) {
    Eigen::MatrixXd aug(a.rows() + unknowns, unknowns);
    aug << a, std::sqrt(ridge) * Eigen::MatrixXd::Identity(unknowns, unknowns);
    Eigen::VectorXd baug(a.rows() + unknowns);
    baug << b, Eigen::VectorXd::Zero(unknowns);
    sol = nnls(aug, baug);
  } else {
    sol = nnls(a, b);
  }
  if (!sol.converged) throw NumericalError("invert_populations: NNLS did not converge");

  // Populations of a sub-grid cannot exceed unit total; noise can push the fit above it.
  const double total = sol.x.sum();
  if (total > 1.0) sol.x /= total;

  PopulationEstimate est;
  est.n_fit_c = n_fit_c;
  est.n_fit_r = n_fit_r;
  est.pi.assign(sol.x.data(), sol.x.data() + sol.x.size());
  est.residual_norm = (a * sol.x - b).norm();
  est.condition_number = cond;
  return est;
}

double wigner_from_populations(const PopulationEstimate& est) {
  double s = 0.0;
  for (int nc = 0; nc <= est.n_fit_c; ++nc)
    for (int nr = 0; nr <= est.n_fit_r; ++nr) s += ((nc + nr) & 1 ? -1.0 : 1.0) * est.at(nc, nr);
  return wigner_scale() * s;
}

double wigner_from_density(const VibDensity& displaced) {
  const HilbertConfig& cfg = displaced.config;
  double s = 0.0;
  for (int nc = 0; nc <= cfg.n_max_c; ++nc)
    for (int nr = 0; nr <= cfg.n_max_r; ++nr)
      s += ((nc + nr) & 1 ? -1.0 : 1.0) * displaced.population(nc, nr);
  return wigner_scale() * s;
}

double wigner_direct(const VibDensity& rho, cplx alpha_c, cplx alpha_r, Diagnostics* diag) {
  return wigner_from_density(displace_vib(rho, alpha_c, alpha_r, diag));
}

std::vector<ProtocolPoint> protocol_run(const VibDensity& rho,
                                        std::span<const std::pair<cplx, cplx>> alphas,
                                        std::span<const double> taus, const BichromaticParams& p,
                                        std::uint64_t shots, std::uint64_t seed,
                                        const ProtocolOptions& opts) {
  const HilbertConfig& cfg = rho.config;
  if (opts.n_fit_c > cfg.n_max_c - 2 || opts.n_fit_r > std::max(0, cfg.n_max_r - 2))
    throw Error("protocol_run: fit grid must satisfy N_fit <= N_max - 2");

  std::vector<ProtocolPoint> out(alphas.size());
  auto run_point = [&](std::size_t i) {
    ProtocolPoint& pt = out[i];
    const auto [ac, ar] = alphas[i];
    const VibDensity displaced = displace_vib(rho, ac, ar, &pt.diagnostics);
    pt.record = synth_signal(displaced, taus, p, shots, derive_seed(seed, i));
    pt.estimate = invert_populations(pt.record, opts.n_fit_c, opts.n_fit_r, opts.ridge);
    pt.point = {ac, ar, wigner_from_populations(pt.estimate)};
  };

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(1, opts.threads)), alphas.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < alphas.size(); ++i) run_point(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(alphas.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < alphas.size(); i = next++) {
        try {
          run_point(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

ConditionReport condition_report(const BichromaticParams& p, int n_fit_c, int n_fit_r,
                                 std::span<const double> taus) {
  ConditionReport rep;
  const std::vector<double> w = fit_frequencies(p, n_fit_c, n_fit_r);
  std::vector<int> order(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w[a] < w[b]; });

  rep.min_gap = std::numeric_limits<double>::infinity();
  rep.min_relative_gap = std::numeric_limits<double>::infinity();
  for (std::size_t s = 1; s < order.size(); ++s) {
    const double lo = w[order[s - 1]];
    const double hi = w[order[s]];
    const double gap = hi - lo;
    if (gap < rep.min_gap) {
      rep.min_gap = gap;
      rep.closest_pair = {order[s - 1], order[s]};
    }
    const double rel = hi > 0.0 ? gap / hi : 0.0;
    rep.min_relative_gap = std::min(rep.min_relative_gap, rel);
  }
  if (order.size() < 2) {
    rep.min_gap = rep.min_relative_gap = 0.0;
  }

  rep.recommended_tau_span =
      rep.min_gap > 0.0 ? std::numbers::pi / rep.min_gap : std::numeric_limits<double>::infinity();
  if (!taus.empty()) {
    rep.tau_span = taus.back() - taus.front();
    rep.condition_number = condition_of(design_matrix(w, taus));
  }

  if (p.k == 0 || rep.min_relative_gap <= kCollisionTolerance) {
    std::ostringstream os;
    os << "degenerate: fit frequencies " << grid_label(rep.closest_pair.first, n_fit_r) << " and "
       << grid_label(rep.closest_pair.second, n_fit_r) << " coincide";
    if (p.k == 0) os << " (k = 0: the sideband bracket vanishes for every Fock state)";
    rep.notes.push_back(os.str());
  } else if (rep.min_relative_gap < 1e-3) {
    std::ostringstream os;
    os << "near-degenerate: min relative gap " << rep.min_relative_gap;
    rep.notes.push_back(os.str());
  }
  const bool span_ok = rep.tau_span >= rep.recommended_tau_span * (1.0 - 1e-12);
  const bool cond_ok = rep.condition_number < kConditionThreshold;
  rep.resolved = !taus.empty() && span_ok && cond_ok && rep.min_relative_gap > kCollisionTolerance;
  if (!taus.empty() && (!span_ok || !cond_ok)) {
    std::ostringstream os;
    os << "poorly identified: condition number " << rep.condition_number << ", tau span "
       << rep.tau_span << "; recommend a span of at least " << rep.recommended_tau_span;
    rep.notes.push_back(os.str());
  }
  return rep;
}

std::vector<double> tau_grid(const BichromaticParams& p, int n_fit_c, int n_fit_r, int count) {
  if (count < 2) throw Error("tau_grid: need at least two samples");
  const ConditionReport rep = condition_report(p, n_fit_c, n_fit_r, {});
  if (!std::isfinite(rep.recommended_tau_span))
    throw DegenerateDesign("tau_grid: fit frequencies are degenerate; no finite span resolves them");
  std::vector<double> taus(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) taus[static_cast<std::size_t>(j)] = rep.recommended_tau_span * j / (count - 1);
  return taus;
}

std::vector<double> default_tau_grid(const BichromaticParams& p, int n_fit_c, int n_fit_r) {
  return tau_grid(p, n_fit_c, n_fit_r, 4 * (n_fit_c + 1) * (n_fit_r + 1));
}

}  // namespace vibronic
