#include "vibronic/runner.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vibronic/validation.hpp"

namespace vibronic::cli {

namespace {

using io::format_real;

const char* electronic_name(int e) {
  static const char* names[] = {"dd", "du", "ud", "uu"};
  return names[e];
}

class Output {
 public:
  Output(const RunConfig& cfg, const std::filesystem::path& dir) : cfg_(cfg), dir_(dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw io::IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  /// Header, optional column line, then the body.
  void write(const std::string& name, const std::string& columns, const std::string& body) const {
    std::ostringstream os;
    io::HeaderFields fields{{"run.mode", std::string(mode_name(cfg_.mode))}};
    for (const auto& f : cfg_.resolved)
      if (f.first != "run.mode") fields.push_back(f);
    io::write_header(os, fields);
    if (!columns.empty()) os << "# columns = " << columns << '\n';
    os << body;
    const std::filesystem::path path = dir_ / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io::IoError("cannot open " + path.string() + " for writing");
    f << os.str();
    f.close();
    if (!f) throw io::IoError("write failed for " + path.string());
  }

 private:
  const RunConfig& cfg_;
  std::filesystem::path dir_;
};

std::string amplitude_rows(const JointState& psi) {
  std::ostringstream os;
  const HilbertConfig& h = psi.config;
  for (int e = 0; e < kElectronicDim; ++e)
    for (int nc = 0; nc <= h.n_max_c; ++nc)
      for (int nr = 0; nr <= h.n_max_r; ++nr) {
        const cplx a = psi.amplitude(static_cast<Electronic>(e), nc, nr);
        os << electronic_name(e) << ',' << nc << ',' << nr << ',' << format_real(a.real()) << ','
           << format_real(a.imag()) << '\n';
      }
  return os.str();
}

std::vector<double> resolve_taus(const RunConfig& cfg) {
  if (!cfg.taus.empty()) return cfg.taus;
  if (cfg.tau_count > 0) return tau_grid(cfg.drive, cfg.n_fit_c, cfg.n_fit_r, cfg.tau_count);
  return default_tau_grid(cfg.drive, cfg.n_fit_c, cfg.n_fit_r);
}

void report(const Diagnostics& diag, std::ostream& err) {
  for (const std::string& w : diag.warnings) err << "warning: " << w << '\n';
}

void run_spectrum(const RunConfig& cfg, const Output& out, std::ostream& summary) {
  const RabiSpectrum s = rabi_spectrum(cfg.drive, cfg.grid_n_c, cfg.grid_n_r);
  std::ostringstream os;
  for (int nc = 0; nc <= cfg.grid_n_c; ++nc)
    for (int nr = 0; nr <= cfg.grid_n_r; ++nr)
      os << nc << ',' << nr << ',' << format_real(s.at(nc, nr)) << '\n';
  out.write("spectrum.csv", "n_c,n_r,rabi", os.str());
  summary << "spectrum: " << s.values.size() << " rows\n";
}

void run_evolve(const RunConfig& cfg, const Output& out, std::ostream& summary, Diagnostics& diag) {
  if (std::holds_alternative<ThermalSpec>(cfg.state))
    throw Error("evolve needs a pure vibrational state (fock, coherent or superposition)");
  std::array<cplx, 4> el{};
  el[0] = 1.0;
  const JointState psi0 = JointState::product(cfg.hilbert, el, make_vib_vector(cfg.state, cfg.hilbert));
  JointState psi;
  if (cfg.engine == Engine::effective) {
    psi = propagate_const(build_effective_H(cfg.drive, cfg.hilbert, &diag), psi0, cfg.t);
  } else {
    for (const std::string& w : resonance_guard(cfg.drive)) diag.warn(w);
    if (cfg.drive.symmetric()) {
      psi = BichromaticEvolution(cfg.drive, cfg.hilbert).exact(psi0, cfg.t);
    } else {
      TimeDepOptions o;
      o.dt_max = cfg.dt_max;
      const BichromaticParams p = cfg.drive;
      const HilbertConfig h = cfg.hilbert;
      psi = propagate_timedep([&](double t) { return build_bichromatic_H(t, p, h); }, psi0, cfg.t, o, &diag)
                .state;
    }
  }
  check_truncation(psi, &diag);
  out.write("evolve.csv", "electronic,n_c,n_r,re,im", amplitude_rows(psi));

  const Eigen::Matrix4cd rho = reduce_electronic(psi);
  std::ostringstream os;
  for (int e = 0; e < kElectronicDim; ++e) os << electronic_name(e) << ',' << format_real(rho(e, e).real()) << '\n';
  out.write("evolve_populations.csv", "electronic,population", os.str());
  summary << "evolve: t = " << format_real(cfg.t) << ", P_dd = " << format_real(rho(0, 0).real())
          << ", P_uu = " << format_real(rho(3, 3).real()) << '\n';
}

void run_bell(const RunConfig& cfg, const Output& out, std::ostream& summary, Diagnostics& diag) {
  const FockSpec vib = std::get<FockSpec>(cfg.state);
  const bool phi = cfg.mode == RunMode::bell_phi;
  const BellResult res = phi ? make_phi(cfg.sign, cfg.drive, cfg.hilbert, vib, cfg.engine, &diag)
                             : make_psi(cfg.sign, cfg.drive, cfg.carrier, cfg.hilbert, vib, cfg.engine, &diag);
  out.write("bell_state.csv", "electronic,n_c,n_r,re,im", amplitude_rows(res.state));

  std::ostringstream seq;
  for (std::size_t i = 0; i < res.sequence.pulses.size(); ++i) {
    const Pulse& p = res.sequence.pulses[i];
    seq << i << ',';
    if (p.kind == PulseKind::dispersive) {
      const auto& d = std::get<BichromaticParams>(p.params);
      seq << "dispersive," << format_real(p.duration) << ',' << format_real(d.omega.real()) << ','
          << format_real(d.omega.imag()) << ',' << format_real(d.phi) << ',' << format_real(d.phi0);
    } else {
      const auto& c = std::get<CarrierParams>(p.params);
      seq << "carrier," << format_real(p.duration) << ',' << format_real(c.omega.real()) << ','
          << format_real(c.omega.imag()) << ',' << format_real(c.varphi) << ',' << format_real(c.varphi0);
    }
    seq << ',' << format_real(p.block_phase.real()) << ',' << format_real(p.block_phase.imag()) << '\n';
  }
  out.write("bell_sequence.csv", "index,kind,duration,omega_re,omega_im,phase,phase0,block_phase_re,block_phase_im",
            seq.str());

  std::ostringstream s;
  s << (phi ? "phi" : "psi") << ',' << (cfg.sign == BellSign::plus ? "plus" : "minus") << ','
    << (cfg.engine == Engine::effective ? "effective" : "exact") << ',' << format_real(res.fidelity) << ','
    << format_real(res.sequence.total_duration()) << '\n';
  out.write("bell_summary.csv", "family,sign,engine,fidelity,total_duration", s.str());

  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", res.fidelity);
  summary << (phi ? "bell-phi" : "bell-psi") << ": fidelity = " << buf
          << ", duration = " << format_real(res.sequence.total_duration()) << '\n';
}

void run_tomo_synth(const RunConfig& cfg, const Output& out, std::ostream& summary, Diagnostics& diag) {
  const VibDensity rho = make_vib_state(cfg.state, cfg.hilbert, &diag);
  check_truncation(rho, &diag);
  const std::vector<double> taus = resolve_taus(cfg);
  for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
    const auto [ac, ar] = cfg.alphas[i];
    const VibDensity displaced = displace_vib(rho, ac, ar, &diag);
    const SignalRecord rec = synth_signal(displaced, taus, cfg.drive, cfg.shots, derive_seed(cfg.seed, i));
    std::ostringstream os;
    os << "# point.index = " << i << '\n'
       << "# point.alpha_c = " << format_real(ac.real()) << ',' << format_real(ac.imag()) << '\n'
       << "# point.alpha_r = " << format_real(ar.real()) << ',' << format_real(ar.imag()) << '\n';
    io::write_record(os, rec);
    char name[32];
    std::snprintf(name, sizeof name, "signal_%03zu.csv", i);
    out.write(name, "", os.str());
  }
  summary << "tomo-synth: " << cfg.alphas.size() << " records of " << taus.size() << " samples\n";
}

std::string population_rows(const PopulationEstimate& est) {
  std::ostringstream os;
  for (int nc = 0; nc <= est.n_fit_c; ++nc)
    for (int nr = 0; nr <= est.n_fit_r; ++nr) os << nc << ',' << nr << ',' << format_real(est.at(nc, nr)) << '\n';
  return os.str();
}

void run_tomo_invert(const RunConfig& cfg, const Output& out, std::ostream& summary, Diagnostics& diag) {
  std::ifstream in(cfg.record_path, std::ios::binary);
  if (!in) throw io::IoError("cannot open record " + cfg.record_path);
  const SignalRecord rec = io::read_record(in);
  std::vector<double> taus;
  for (const SignalSample& s : rec.samples) taus.push_back(s.tau);
  const ConditionReport cond = condition_report(rec.params, cfg.n_fit_c, cfg.n_fit_r, taus);
  for (const std::string& n : cond.notes) diag.warn(n);
  const PopulationEstimate est = invert_populations(rec, cfg.n_fit_c, cfg.n_fit_r, cfg.ridge);
  std::ostringstream os;
  os << "# estimate.residual_norm = " << format_real(est.residual_norm) << '\n'
     << "# estimate.condition_number = " << format_real(est.condition_number) << '\n'
     << "# estimate.total = " << format_real(est.total()) << '\n'
     << "# estimate.wigner = " << format_real(wigner_from_populations(est)) << '\n'
     << "# columns = n_c,n_r,pi\n"
     << population_rows(est);
  out.write("populations.csv", "", os.str());
  summary << "tomo-invert: W = " << format_real(wigner_from_populations(est))
          << ", residual = " << format_real(est.residual_norm) << '\n';
}

void run_wigner(const RunConfig& cfg, const Output& out, std::ostream& summary, Diagnostics& diag) {
  const VibDensity rho = make_vib_state(cfg.state, cfg.hilbert, &diag);
  check_truncation(rho, &diag);
  const std::vector<double> taus = resolve_taus(cfg);
  const ConditionReport cond = condition_report(cfg.drive, cfg.n_fit_c, cfg.n_fit_r, taus);
  for (const std::string& n : cond.notes) diag.warn(n);

  ProtocolOptions opts;
  opts.n_fit_c = cfg.n_fit_c;
  opts.n_fit_r = cfg.n_fit_r;
  opts.ridge = cfg.ridge;
  opts.threads = cfg.threads;
  const std::vector<ProtocolPoint> pts = protocol_run(rho, cfg.alphas, taus, cfg.drive, cfg.shots, cfg.seed, opts);

  std::vector<WignerPoint> wp;
  std::ostringstream check, pops;
  double max_err = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const ProtocolPoint& pt = pts[i];
    diag.append(pt.diagnostics);
    wp.push_back(pt.point);
    const double direct = wigner_direct(rho, pt.point.alpha_c, pt.point.alpha_r);
    max_err = std::max(max_err, std::abs(direct - pt.point.w));
    check << format_real(pt.point.alpha_c.real()) << ',' << format_real(pt.point.alpha_c.imag()) << ','
          << format_real(pt.point.alpha_r.real()) << ',' << format_real(pt.point.alpha_r.imag()) << ','
          << format_real(pt.point.w) << ',' << format_real(direct) << '\n';
    for (int nc = 0; nc <= pt.estimate.n_fit_c; ++nc)
      for (int nr = 0; nr <= pt.estimate.n_fit_r; ++nr)
        pops << i << ',' << nc << ',' << nr << ',' << format_real(pt.estimate.at(nc, nr)) << '\n';
  }
  std::ostringstream rows;
  io::write_wigner_rows(rows, wp);
  out.write("wigner.csv", "re_ac,im_ac,re_ar,im_ar,w", rows.str());
  out.write("wigner_check.csv", "re_ac,im_ac,re_ar,im_ar,w,w_direct", check.str());
  out.write("wigner_populations.csv", "point,n_c,n_r,pi", pops.str());
  summary << "wigner: " << pts.size() << " points, max |w - w_direct| = " << format_real(max_err)
          << ", design condition = " << format_real(cond.condition_number) << '\n';
}

int run_validate(const RunConfig& cfg, const Output& out, std::ostream& summary) {
  const std::vector<validation::CheckResult> results = validation::run_all(cfg.seed);
  std::ostringstream os;
  bool ok = true;
  for (const validation::CheckResult& r : results) {
    ok = ok && r.passed;
    os << r.id << ',' << r.name << ',' << (r.passed ? "pass" : "fail") << ",\"" << r.detail << "\"\n";
    summary << (r.passed ? "PASS " : "FAIL ") << r.id << ' ' << r.name << ": " << r.detail << '\n';
  }
  out.write("validate.csv", "id,name,result,detail", os.str());
  return ok ? kOk : kNumericalError;
}

}  // namespace

int run(const RunConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  std::ostringstream null_sink;
  std::ostream& summary = opts.quiet ? static_cast<std::ostream&>(null_sink) : out;
  Diagnostics diag;
  int code = kOk;
  try {
    const Output files(cfg, opts.out_dir);
    switch (cfg.mode) {
      case RunMode::spectrum: run_spectrum(cfg, files, summary); break;
      case RunMode::evolve: run_evolve(cfg, files, summary, diag); break;
      case RunMode::bell_phi:
      case RunMode::bell_psi: run_bell(cfg, files, summary, diag); break;
      case RunMode::tomo_synth: run_tomo_synth(cfg, files, summary, diag); break;
      case RunMode::tomo_invert: run_tomo_invert(cfg, files, summary, diag); break;
      case RunMode::wigner: run_wigner(cfg, files, summary, diag); break;
      case RunMode::validate: code = run_validate(cfg, files, summary); break;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    code = kConfigError;
  } catch (const io::IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    code = kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    code = kNumericalError;
  }
  report(diag, err);
  return code;
}

int run_file(const std::filesystem::path& config_path, const RunOptions& opts,
             std::optional<std::uint64_t> seed, std::optional<int> threads, std::ostream& out,
             std::ostream& err) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    err << "i/o error: cannot open config " << config_path.string() << '\n';
    return kIoError;
  }
  std::ostringstream text;
  text << in.rdbuf();
  RunConfig cfg;
  try {
    cfg = parse_config(text.str());
    apply_overrides(cfg, seed, threads);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  return run(cfg, opts, out, err);
}

}  // namespace vibronic::cli
