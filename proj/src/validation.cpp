#include "vibronic/validation.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "vibronic/runner.hpp"

namespace vibronic::validation {

namespace {

constexpr double kPi = std::numbers::pi;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fix(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

int uniform_int(std::mt19937_64& g, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }

BichromaticParams random_drive(std::mt19937_64& g) {
  BichromaticParams p;
  p.k = p.k_prime = uniform_int(g, 1, 2);
  p.modes = ModeParams::from_eta(uniform(g, 0.05, 0.3));
  p.delta = p.delta_prime = (uniform_int(g, 0, 1) ? 1.0 : -1.0) * uniform(g, 0.05, 0.3);
  p.omega = std::polar(uniform(g, 0.005, 0.05), uniform(g, -kPi, kPi));
  p.phi = uniform(g, -kPi, kPi);
  p.phi0 = uniform(g, -kPi, kPi);
  return p;
}

CVector embed(const HilbertConfig& cfg, const std::array<cplx, 4>& el, int nc, int nr) {
  CVector v = CVector::Zero(cfg.dim());
  for (int e = 0; e < kElectronicDim; ++e) v[cfg.index(static_cast<Electronic>(e), nc, nr)] = el[e];
  return v;
}

const VibDensity tomo_state(const HilbertConfig& cfg) {
  const double r = 1.0 / std::numbers::sqrt2;
  return make_vib_state(SuperpositionSpec{{{0, 0, r}, {2, 0, r}}}, cfg);
}

BichromaticParams tomo_drive() {
  BichromaticParams p;
  p.modes = ModeParams::from_eta(0.23);
  p.omega = 0.05;
  p.delta = p.delta_prime = 0.1;
  return p;
}

std::vector<std::pair<cplx, cplx>> tomo_alphas() {
  return {{-1.0, 0.0}, {-0.5, 0.0}, {0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}};
}

}  // namespace

CheckResult closed_form_equivalence(std::uint64_t seed) {
  std::mt19937_64 g(derive_seed(seed, 1));
  const HilbertConfig cfg{8, 8};
  double err_disp = 0.0, err_carrier = 0.0;
  for (int draw = 0; draw < 50; ++draw) {
    const BichromaticParams p = random_drive(g);
    const int nc = uniform_int(g, 0, 8), nr = uniform_int(g, 0, 8);
    const double w = std::abs(rabi_effective(nc, nr, p));
    const double t = uniform(g, 0.0, 4.0 * kPi / std::max(w, 1e-6));
    const JointState psi0{cfg, embed(cfg, {1.0, 0.0, 0.0, 0.0}, nc, nr)};
    const JointState out = propagate_const(build_effective_H(p, cfg), psi0, t);
    const auto cf = closed_form_dispersive(nc, nr, p, t);
    err_disp = std::max(err_disp, (out.amplitudes - embed(cfg, {cf[0], 0.0, 0.0, cf[1]}, nc, nr)).cwiseAbs().maxCoeff());

    CarrierParams c;
    c.modes = p.modes;
    c.omega = std::polar(uniform(g, 0.01, 0.1), uniform(g, -kPi, kPi));
    c.varphi = uniform(g, -kPi, kPi);
    c.varphi0 = uniform(g, -kPi, kPi);
    const BellSign sign = uniform_int(g, 0, 1) ? BellSign::plus : BellSign::minus;
    const double t0 = uniform(g, 0.0, 100.0);
    const double r = 1.0 / std::numbers::sqrt2;
    const JointState in{cfg, embed(cfg, {r, 0.0, 0.0, sign == BellSign::plus ? r : -r}, nc, nr)};
    const JointState cout = propagate_const(build_carrier_H(c, cfg), in, t0);
    const auto cc = closed_form_carrier(sign, c, nc, nr, t0);
    err_carrier = std::max(err_carrier, (cout.amplitudes - embed(cfg, cc, nc, nr)).cwiseAbs().maxCoeff());
  }
  return {1, "closed_form_equivalence", err_disp <= 1e-10 && err_carrier <= 1e-10,
          "50 draws; max amplitude error dispersive " + sci(err_disp) + ", carrier " + sci(err_carrier) +
              " (tol 1e-10)"};
}

CheckResult decoupling(std::uint64_t seed) {
  std::mt19937_64 g(derive_seed(seed, 2));
  const HilbertConfig cfg{6, 4};
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  for (int draw = 0; draw < 5; ++draw) {
    const BichromaticParams p = random_drive(g);
    CVector vib(cfg.vib_dim());
    for (auto& a : vib) a = {gauss(g), gauss(g)};
    vib.normalize();
    const JointState psi0 = JointState::product(cfg, {1.0, 0.0, 0.0, 0.0}, vib);
    const HermitianPropagator prop(build_effective_H(p, cfg));
    const double w00 = std::abs(rabi_effective(0, 0, p));
    for (int i = 0; i < 100; ++i) {
      const double t = (i + 1) * 0.37 / w00;
      const JointState s = prop.evolve(psi0, t);
      const Eigen::Matrix4cd rho = reduce_electronic(s);
      worst = std::max(worst, rho(1, 1).real() + rho(2, 2).real());
    }
  }
  return {2, "decoupling", worst < 1e-12,
          "5 random states x 100 times; max single-excitation population " + sci(worst) + " (< 1e-12)"};
}

CheckResult bell_generation() {
  double worst_phi = 0.0, worst_time = 0.0, worst_psi = 0.0, max_overlap = 0.0;
  const HilbertConfig cfg{4, 3};
  for (int k = 1; k <= 2; ++k)
    for (const FockSpec vib : {FockSpec{0, 0}, FockSpec{2, 1}}) {
      BichromaticParams p;
      p.k = p.k_prime = k;
      p.modes = ModeParams::from_eta(0.15);
      p.delta = p.delta_prime = 0.2;
      p.omega = std::polar(0.03, 0.4);
      p.phi = 0.3;
      p.phi0 = 1.1;
      const double w = std::abs(rabi_effective(vib.n_c, vib.n_r, p));
      for (const BellSign s : {BellSign::plus, BellSign::minus}) {
        const BellResult r = make_phi(s, p, cfg, vib, Engine::effective);
        worst_phi = std::max(worst_phi, std::abs(1.0 - r.fidelity));
        const double t = r.sequence.total_duration();
        const double expect_a = kPi / (4.0 * w), expect_b = 3.0 * kPi / (4.0 * w);
        worst_time = std::max(worst_time, std::min(std::abs(t - expect_a), std::abs(t - expect_b)) / t);
      }
      CarrierParams c;
      c.modes = p.modes;
      c.omega = std::polar(0.02, -0.2);
      c.varphi0 = 0.7;
      for (const BellSign start : {BellSign::plus, BellSign::minus}) {
        const BellResult a = make_psi(start, p, c, cfg, vib, Engine::effective);
        CarrierParams c2 = c;
        c2.varphi0 += kPi;
        const BellResult b = make_psi(start, p, c2, cfg, vib, Engine::effective);
        worst_psi = std::max({worst_psi, std::abs(1.0 - a.fidelity), std::abs(1.0 - b.fidelity)});
        max_overlap = std::max(max_overlap, fidelity(a.state, b.state));
      }
    }
  const bool ok = worst_phi <= 1e-10 && worst_time <= 1e-12 && worst_psi <= 1e-10 && max_overlap < 1e-10;
  return {3, "bell_generation", ok,
          "max |1-F| Phi " + sci(worst_phi) + ", Psi " + sci(worst_psi) + "; pulse-time rel. error " +
              sci(worst_time) + "; |<Psi(phi0)|Psi(phi0+pi)>|^2 " + sci(max_overlap)};
}

CheckResult adiabatic_validity() {
  const auto start = std::chrono::steady_clock::now();
  const HilbertConfig cfg{10, 10};
  BichromaticParams p;
  p.modes = ModeParams::from_eta(0.1);
  p.omega = 0.05;
  const double base = 20.0 * p.modes.eta * std::abs(p.omega);
  double infid[2];
  for (int i = 0; i < 2; ++i) {
    p.delta = p.delta_prime = base * (i == 0 ? 1.0 : 2.0);
    infid[i] = 1.0 - make_phi(BellSign::plus, p, cfg, FockSpec{0, 0}, Engine::exact).fidelity;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double ratio = infid[0] / infid[1];
  const bool ok = 1.0 - infid[0] >= 0.99 && ratio >= 2.5 && ratio <= 6.0 && seconds < 60.0;
  return {4, "adiabatic_validity", ok,
          "F(t+) = " + fix(1.0 - infid[0]) + " (need >= 0.99); infidelity ratio on doubling delta " +
              fix(ratio, 3) + " (need [2.5, 6]); " + fix(seconds, 2) + " s"};
}

CheckResult rabi_spectrum_distinct() {
  BichromaticParams p;
  p.modes = ModeParams::from_eta(0.23);
  p.omega = 0.05;
  p.delta = p.delta_prime = 0.1;
  const RabiSpectrum s = rabi_spectrum(p, 25, 25);
  std::vector<double> v = s.values;
  const bool one_sign = std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; }) ||
                        std::all_of(v.begin(), v.end(), [](double x) { return x < 0.0; });
  for (double& x : v) x = std::abs(x);
  std::sort(v.begin(), v.end());
  double min_rel = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < v.size(); ++i) min_rel = std::min(min_rel, (v[i] - v[i - 1]) / v[i]);
  const bool ok = v.size() == 676 && one_sign && min_rel > 1e-6;
  return {5, "rabi_spectrum_distinct", ok,
          std::to_string(v.size()) + " values, single sign " + (one_sign ? "yes" : "no") +
              ", min relative gap " + sci(min_rel) + " (> 1e-6)"};
}

CheckResult lamb_dicke_robustness() {
  BichromaticParams p;
  p.omega = 0.01;
  p.delta = p.delta_prime = 0.1;
  p.modes = ModeParams::from_eta(0.02);
  const double f = thermal_bell_scan(0.5, 0.5, p, HilbertConfig{16, 16});
  auto dispersion = [&](double eta) {
    BichromaticParams q = p;
    q.modes = ModeParams::from_eta(eta);
    const RabiSpectrum s = rabi_spectrum(q, 10, 10);
    double d = 0.0;
    for (double x : s.values) d = std::max(d, std::abs(x / s.at(0, 0) - 1.0));
    return d;
  };
  const double d1 = dispersion(0.01), d2 = dispersion(0.02);
  const bool ok = f >= 0.999 && d1 <= 0.3 * d2;
  return {6, "lamb_dicke_robustness", ok,
          "thermal Phi+ fidelity " + fix(f, 8) + " (>= 0.999); dispersion eta=0.01 / eta=0.02 = " +
              fix(d1 / d2, 4) + " (<= 0.3)"};
}

CheckResult wigner_oracles() {
  const HilbertConfig cfg{20, 20};
  const VibDensity vac = make_vib_state(FockSpec{0, 0}, cfg);
  const double origin_err = std::abs(wigner_direct(vac, 0.0, 0.0) - 4.0 / (kPi * kPi));
  double worst = 0.0;
  for (int i = 0; i < 9; ++i) {
    const cplx ac = std::polar(0.125 * i, 0.7 * i), ar = std::polar(1.0 - 0.1 * i, -1.3 * i);
    const double expect = 4.0 / (kPi * kPi) * std::exp(-2.0 * std::norm(ac) - 2.0 * std::norm(ar));
    worst = std::max(worst, std::abs(wigner_direct(vac, ac, ar) - expect));
  }
  return {7, "wigner_oracles", origin_err <= 1e-10 && worst <= 1e-8,
          "W(0,0) error " + sci(origin_err) + " (1e-10); displaced vacuum max error " + sci(worst) + " (1e-8)"};
}

CheckResult tomography_noiseless() {
  const HilbertConfig cfg{20, 2};
  const VibDensity rho = tomo_state(cfg);
  const BichromaticParams p = tomo_drive();
  ProtocolOptions opts;
  opts.n_fit_c = 18;
  const auto alphas = tomo_alphas();
  const std::vector<double> taus = default_tau_grid(p, opts.n_fit_c, opts.n_fit_r);
  const auto pts = protocol_run(rho, alphas, taus, p, 0, 0, opts);
  double w_err = 0.0, pop_err = 0.0;
  for (const ProtocolPoint& pt : pts) {
    w_err = std::max(w_err, std::abs(pt.point.w - wigner_direct(rho, pt.point.alpha_c, pt.point.alpha_r)));
    const VibDensity d = displace_vib(rho, pt.point.alpha_c, pt.point.alpha_r);
    for (int nc = 0; nc <= opts.n_fit_c; ++nc)
      pop_err = std::max(pop_err, std::abs(pt.estimate.at(nc, 0) - d.population(nc, 0)));
  }
  return {8, "tomography_noiseless", w_err <= 1e-6 && pop_err <= 1e-6,
          "5 points, " + std::to_string(taus.size()) + " taus; max Wigner error " + sci(w_err) +
              ", max population error " + sci(pop_err) + " (1e-6)"};
}

CheckResult tomography_shot_noise(std::uint64_t seed) {
  const HilbertConfig cfg{20, 2};
  const VibDensity rho = tomo_state(cfg);
  const BichromaticParams p = tomo_drive();
  ProtocolOptions opts;
  opts.n_fit_c = 10;
  const auto alphas = tomo_alphas();
  const std::vector<double> taus = tau_grid(p, opts.n_fit_c, opts.n_fit_r, 60);

  std::vector<double> direct;
  std::vector<VibDensity> displaced;
  for (const auto& [ac, ar] : alphas) {
    direct.push_back(wigner_direct(rho, ac, ar));
    displaced.push_back(displace_vib(rho, ac, ar));
  }

  constexpr int kRepeats = 20;
  double max_pop = 0.0, max_w = 0.0, sq[2] = {0.0, 0.0};
  for (int rep = 0; rep < kRepeats; ++rep)
    for (int s = 0; s < 2; ++s) {
      const std::uint64_t shots = s == 0 ? 10000 : 40000;
      const auto pts = protocol_run(rho, alphas, taus, p, shots, derive_seed(seed, 9000 + rep), opts);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double e = pts[i].point.w - direct[i];
        sq[s] += e * e;
        if (rep == 0 && s == 0) {
          max_w = std::max(max_w, std::abs(e));
          for (int nc = 0; nc <= opts.n_fit_c; ++nc)
            max_pop = std::max(max_pop, std::abs(pts[i].estimate.at(nc, 0) - displaced[i].population(nc, 0)));
        }
      }
    }
  const double ratio = std::sqrt(sq[0] / sq[1]);
  const bool ok = max_pop <= 0.05 && max_w <= 0.08 && ratio >= 1.6 && ratio <= 2.6;
  return {9, "tomography_shot_noise", ok,
          "1e4 shots, 60 taus: max population error " + fix(max_pop, 4) + " (0.05), max Wigner error " +
              fix(max_w, 4) + " (0.08); RMS ratio 1e4/4e4 shots over " + std::to_string(kRepeats) +
              " seeds " + fix(ratio, 3) + " ([1.6, 2.6])"};
}

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "vibronic_validate_XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw Error("cannot create temporary directory");
    path = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace

CheckResult determinism(std::uint64_t seed) {
  const std::string common =
      "[hilbert]\nn_max_c = 12\nn_max_r = 2\n[modes]\neta = 0.23\n"
      "[drive]\nk = 1\ndelta = 0.1\nomega = 0.05\nphi = 0.2\n";
  const std::string state = "[state]\nkind = superposition\nterms = 0:0:1:0, 2:0:1:0\n";
  const std::string tomo = "[tomo]\nshots = 10000\ntau_count = 40\nn_fit_c = 8\nalphas = -0.5:0:0:0, 0:0:0:0, 0.5:0.25:0:0\n";
  const std::vector<std::pair<std::string, std::string>> configs{
      {"spectrum", "[run]\nmode = spectrum\n[modes]\neta = 0.23\n[drive]\ndelta = 0.1\nomega = 0.05\n"
                   "[spectrum]\nn_c_max = 25\nn_r_max = 25\n"},
      {"evolve", "[run]\nmode = evolve\n" + common + state + "[evolve]\nt = 40\nengine = exact\n"},
      {"bell-phi", "[run]\nmode = bell-phi\n" + common + "[bell]\nsign = minus\n"},
      {"bell-psi", "[run]\nmode = bell-psi\n" + common + "[carrier]\nomega = 0.02\nvarphi0 = 0.7\n"},
      {"tomo-synth", "[run]\nmode = tomo-synth\n" + common + state + tomo},
      {"wigner", "[run]\nmode = wigner\nthreads = 2\n" + common + state + tomo},
  };

  TempDir tmp;
  std::size_t files = 0;
  std::vector<std::string> bad;
  std::ostringstream sink;
  auto run_pair = [&](const std::string& name, const std::string& text) {
    const auto cfg_path = tmp.path / (name + ".cfg");
    std::ofstream(cfg_path, std::ios::binary) << text;
    for (const char* rep : {"a", "b"}) {
      cli::RunOptions o{tmp.path / name / rep, true};
      if (cli::run_file(cfg_path, o, seed, std::nullopt, sink, sink) != 0) bad.push_back(name + " (exit)");
    }
    for (const auto& entry : std::filesystem::directory_iterator(tmp.path / name / "a")) {
      ++files;
      const auto other = tmp.path / name / "b" / entry.path().filename();
      if (!std::filesystem::exists(other) || slurp(entry.path()) != slurp(other))
        bad.push_back(name + "/" + entry.path().filename().string());
    }
  };
  for (const auto& [name, text] : configs) run_pair(name, text);
  run_pair("tomo-invert", "[run]\nmode = tomo-invert\n[tomo]\nn_fit_c = 8\nrecord = " +
                              (tmp.path / "tomo-synth" / "a" / "signal_001.csv").string() + "\n");

  std::string detail = std::to_string(configs.size() + 1) + " modes, " + std::to_string(files) +
                       " files compared byte for byte";
  for (const std::string& b : bad) detail += "; mismatch " + b;
  return {10, "determinism", bad.empty() && files > 0, detail};
}

std::vector<CheckResult> run_all(std::uint64_t seed) {
  return {closed_form_equivalence(seed), decoupling(seed),          bell_generation(),
          adiabatic_validity(),          rabi_spectrum_distinct(),  lamb_dicke_robustness(),
          wigner_oracles(),              tomography_noiseless(),    tomography_shot_noise(seed),
          determinism(seed)};
}

}  // namespace vibronic::validation
