#include "vibronic/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace vibronic::cli {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"run", {"mode", "seed", "threads"}},
      {"hilbert", {"n_max_c", "n_max_r"}},
      {"modes", {"eta", "eta_r", "nu"}},
      {"drive", {"k", "k_prime", "delta", "delta_prime", "omega", "omega_im", "phi", "phi0"}},
      {"carrier", {"omega", "omega_im", "varphi", "varphi0"}},
      {"state",
       {"kind", "n_c", "n_r", "nbar_c", "nbar_r", "alpha_c_re", "alpha_c_im", "alpha_r_re",
        "alpha_r_im", "terms"}},
      {"spectrum", {"n_c_max", "n_r_max"}},
      {"evolve", {"engine", "t", "dt_max", "electronic"}},
      {"bell", {"sign", "engine"}},
      {"tomo", {"taus", "tau_count", "shots", "n_fit_c", "n_fit_r", "ridge", "alphas", "record"}},
  };
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, sep);) out.push_back(trim(part));
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

struct Range {
  std::function<bool(double)> ok;
  const char* text;
};

const Range kAny{[](double) { return true; }, "finite"};
const Range kPositive{[](double v) { return v > 0.0; }, "> 0"};
const Range kNonNegative{[](double v) { return v >= 0.0; }, ">= 0"};
const Range kNonZero{[](double v) { return v != 0.0; }, "!= 0"};

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries, io::HeaderFields& echo)
      : entries_(std::move(entries)), echo_(echo) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string text(const std::string& key, std::optional<std::string> def) {
    const Entry* e = find(key);
    std::string v;
    if (e) {
      v = e->value;
    } else if (def) {
      v = *def;
    } else {
      missing(key);
    }
    echo_.emplace_back(key, v);
    return v;
  }

  double real(const std::string& key, std::optional<double> def, const Range& r = kAny) {
    const Entry* e = find(key);
    double v = 0.0;
    if (e) {
      v = parse_real(e->value, key, e->line);
      if (!r.ok(v))
        throw ConfigError("line " + std::to_string(e->line) + ": " + key + " = " + e->value +
                          " out of range (must be " + r.text + ")");
    } else if (def) {
      v = *def;
    } else {
      missing(key);
    }
    echo_.emplace_back(key, io::format_real(v));
    return v;
  }

  long long integer(const std::string& key, std::optional<long long> def, long long lo, long long hi) {
    const Entry* e = find(key);
    long long v = 0;
    if (e) {
      v = parse_int(e->value, key, e->line);
      if (v < lo || v > hi)
        throw ConfigError("line " + std::to_string(e->line) + ": " + key + " = " + e->value +
                          " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    } else if (def) {
      v = *def;
    } else {
      missing(key);
    }
    echo_.emplace_back(key, std::to_string(v));
    return v;
  }

  std::uint64_t u64(const std::string& key, std::uint64_t def) {
    const Entry* e = find(key);
    std::uint64_t v = def;
    if (e) {
      const auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
      if (ec != std::errc() || ptr != e->value.data() + e->value.size())
        throw ConfigError("line " + std::to_string(e->line) + ": " + key +
                          " expects a non-negative integer, got '" + e->value + "'");
    }
    echo_.emplace_back(key, std::to_string(v));
    return v;
  }

  template <class T>
  T choice(const std::string& key, std::optional<std::string> def,
           const std::vector<std::pair<std::string, T>>& options) {
    const Entry* e = find(key);
    const std::string v = e ? e->value : def ? *def : (missing(key), std::string());
    for (const auto& [name, value] : options)
      if (name == v) {
        echo_.emplace_back(key, v);
        return value;
      }
    std::string allowed;
    for (const auto& o : options) allowed += (allowed.empty() ? "" : " | ") + o.first;
    throw ConfigError("line " + std::to_string(e ? e->line : 0) + ": " + key + " = " + v +
                      " is not one of " + allowed);
  }

  int line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  static double parse_real(const std::string& s, const std::string& key, int line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      throw ConfigError("line " + std::to_string(line) + ": " + key + " expects a finite number, got '" +
                        s + "'");
    return v;
  }

  static long long parse_int(const std::string& s, const std::string& key, int line) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ConfigError("line " + std::to_string(line) + ": " + key + " expects an integer, got '" + s +
                        "'");
    return v;
  }

 private:
  const Entry* find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }
  [[noreturn]] static void missing(const std::string& key) {
    throw ConfigError("missing required key " + key);
  }

  std::map<std::string, Entry> entries_;
  io::HeaderFields& echo_;
};

std::map<std::string, Entry> tokenize(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::string section;
  std::istringstream in{std::string(text)};
  int lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    std::string line = raw;
    if (const auto c = line.find_first_of("#;"); c != std::string::npos) line.resize(c);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header '" + line + "'");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!schema().count(section)) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (section.empty()) throw ConfigError(where + "key " + key + " appears before any [section]");
    if (key.empty()) throw ConfigError(where + "empty key");
    if (!schema().at(section).count(key))
      throw ConfigError(where + "unknown key " + key + " in [" + section + "]");
    if (value.empty()) throw ConfigError(where + "key " + section + "." + key + " has no value");
    const std::string full = section + "." + key;
    const auto [it, inserted] = entries.emplace(full, Entry{value, lineno});
    if (!inserted)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key " + full +
                        " (first defined on line " + std::to_string(it->second.line) + ")");
  }
  return entries;
}

cplx read_complex(Reader& r, const std::string& re, const std::string& im, std::optional<double> def_re) {
  const double a = r.real(re, def_re);
  const double b = r.real(im, 0.0);
  return {a, b};
}

StateSpec read_state(Reader& r, const HilbertConfig& h, bool required) {
  using Kind = int;
  const Kind kind = r.choice<Kind>("state.kind", required ? std::nullopt : std::optional<std::string>("fock"),
                                   {{"fock", 0}, {"thermal", 1}, {"coherent", 2}, {"superposition", 3}});
  switch (kind) {
    case 0: {
      FockSpec f;
      f.n_c = static_cast<int>(r.integer("state.n_c", 0, 0, h.n_max_c));
      f.n_r = static_cast<int>(r.integer("state.n_r", 0, 0, h.n_max_r));
      return f;
    }
    case 1:
      return ThermalSpec{r.real("state.nbar_c", 0.0, kNonNegative), r.real("state.nbar_r", 0.0, kNonNegative)};
    case 2: {
      CoherentSpec c;
      c.alpha_c = read_complex(r, "state.alpha_c_re", "state.alpha_c_im", 0.0);
      c.alpha_r = read_complex(r, "state.alpha_r_re", "state.alpha_r_im", 0.0);
      return c;
    }
    default: {
      const std::string text = r.text("state.terms", std::nullopt);
      const int line = r.line_of("state.terms");
      SuperpositionSpec s;
      for (const std::string& term : split(text, ',')) {
        const auto f = split(term, ':');
        if (f.size() != 4)
          throw ConfigError("line " + std::to_string(line) +
                            ": state.terms entries are n_c:n_r:re:im, got '" + term + "'");
        const long long nc = Reader::parse_int(f[0], "state.terms", line);
        const long long nr = Reader::parse_int(f[1], "state.terms", line);
        if (!h.contains(static_cast<int>(nc), static_cast<int>(nr)))
          throw ConfigError("line " + std::to_string(line) + ": state.terms level (" + f[0] + "," + f[1] +
                            ") outside the Hilbert space");
        s.terms.emplace_back(static_cast<int>(nc), static_cast<int>(nr),
                             cplx{Reader::parse_real(f[2], "state.terms", line),
                                  Reader::parse_real(f[3], "state.terms", line)});
      }
      double norm = 0.0;
      for (const auto& t : s.terms) norm += std::norm(std::get<2>(t));
      if (norm == 0.0) throw ConfigError("line " + std::to_string(line) + ": state.terms has zero norm");
      return s;
    }
  }
}

void read_drive(Reader& r, RunConfig& cfg) {
  BichromaticParams& p = cfg.drive;
  p.k = static_cast<int>(r.integer("drive.k", 1, 0, 8));
  p.k_prime = static_cast<int>(r.integer("drive.k_prime", p.k, 0, 8));
  p.delta = r.real("drive.delta", std::nullopt, kNonZero);
  p.delta_prime = r.real("drive.delta_prime", p.delta, kNonZero);
  p.omega = read_complex(r, "drive.omega", "drive.omega_im", std::nullopt);
  if (p.omega == cplx{}) throw ConfigError("line " + std::to_string(r.line_of("drive.omega")) +
                                           ": drive.omega out of range (|omega| must be > 0)");
  p.phi = r.real("drive.phi", 0.0);
  p.phi0 = r.real("drive.phi0", 0.0);
}

void read_modes(Reader& r, RunConfig& cfg) {
  ModeParams m;
  m.eta = r.real("modes.eta", std::nullopt, kPositive);
  m.eta_r = r.real("modes.eta_r", ModeParams::default_eta_r(m.eta), kPositive);
  m.nu = r.real("modes.nu", 1.0, kPositive);
  cfg.drive.modes = m;
  cfg.carrier.modes = m;
}

void read_hilbert(Reader& r, RunConfig& cfg) {
  cfg.hilbert.n_max_c = static_cast<int>(r.integer("hilbert.n_max_c", std::nullopt, 0, 60));
  cfg.hilbert.n_max_r = static_cast<int>(r.integer("hilbert.n_max_r", std::nullopt, 0, 60));
}

void read_carrier(Reader& r, RunConfig& cfg) {
  cfg.carrier.omega = read_complex(r, "carrier.omega", "carrier.omega_im", std::nullopt);
  if (cfg.carrier.omega == cplx{})
    throw ConfigError("line " + std::to_string(r.line_of("carrier.omega")) +
                      ": carrier.omega out of range (|omega| must be > 0)");
  cfg.carrier.varphi = r.real("carrier.varphi", 0.0);
  cfg.carrier.varphi0 = r.real("carrier.varphi0", 0.0);
}

void read_tomo(Reader& r, RunConfig& cfg) {
  const std::string taus = r.text("tomo.taus", std::string("auto"));
  if (taus != "auto") {
    const int line = r.line_of("tomo.taus");
    for (const std::string& t : split(taus, ',')) {
      const double v = Reader::parse_real(t, "tomo.taus", line);
      if (v < 0.0 || (!cfg.taus.empty() && v <= cfg.taus.back()))
        throw ConfigError("line " + std::to_string(line) +
                          ": tomo.taus out of range (must be >= 0 and strictly increasing)");
      cfg.taus.push_back(v);
    }
  }
  cfg.tau_count = static_cast<int>(r.integer("tomo.tau_count", 0, 0, 100000));
  if (cfg.tau_count == 1)
    throw ConfigError("line " + std::to_string(r.line_of("tomo.tau_count")) +
                      ": tomo.tau_count out of range (0 or >= 2)");
  cfg.shots = r.u64("tomo.shots", 0);
  const int fit_c_max = std::max(0, cfg.hilbert.n_max_c - 2);
  const int fit_r_max = std::max(0, cfg.hilbert.n_max_r - 2);
  cfg.n_fit_c = static_cast<int>(r.integer("tomo.n_fit_c", std::min(10, fit_c_max), 0, fit_c_max));
  cfg.n_fit_r = static_cast<int>(r.integer("tomo.n_fit_r", 0, 0, fit_r_max));
  cfg.ridge = r.real("tomo.ridge", 0.0, kNonNegative);

  const std::string alphas = r.text("tomo.alphas", std::string("0:0:0:0"));
  const int line = r.line_of("tomo.alphas");
  cfg.alphas.clear();
  for (const std::string& a : split(alphas, ',')) {
    const auto f = split(a, ':');
    if (f.size() != 4)
      throw ConfigError("line " + std::to_string(line) +
                        ": tomo.alphas entries are re_c:im_c:re_r:im_r, got '" + a + "'");
    double v[4];
    for (int i = 0; i < 4; ++i) v[i] = Reader::parse_real(f[i], "tomo.alphas", line);
    cfg.alphas.emplace_back(cplx{v[0], v[1]}, cplx{v[2], v[3]});
  }
}

}  // namespace

std::string_view mode_name(RunMode m) {
  switch (m) {
    case RunMode::spectrum: return "spectrum";
    case RunMode::evolve: return "evolve";
    case RunMode::bell_phi: return "bell-phi";
    case RunMode::bell_psi: return "bell-psi";
    case RunMode::tomo_synth: return "tomo-synth";
    case RunMode::tomo_invert: return "tomo-invert";
    case RunMode::wigner: return "wigner";
    case RunMode::validate: return "validate";
  }
  return "unknown";
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  Reader r(tokenize(text), cfg.resolved);

  cfg.mode = r.choice<RunMode>("run.mode", std::nullopt,
                               {{"spectrum", RunMode::spectrum},
                                {"evolve", RunMode::evolve},
                                {"bell-phi", RunMode::bell_phi},
                                {"bell-psi", RunMode::bell_psi},
                                {"tomo-synth", RunMode::tomo_synth},
                                {"tomo-invert", RunMode::tomo_invert},
                                {"wigner", RunMode::wigner},
                                {"validate", RunMode::validate}});
  cfg.seed = r.u64("run.seed", 0);
  cfg.threads = static_cast<int>(r.integer("run.threads", 1, 1, 256));

  const std::vector<std::pair<std::string, Engine>> engines{{"effective", Engine::effective},
                                                            {"exact", Engine::exact}};
  switch (cfg.mode) {
    case RunMode::validate:
      break;
    case RunMode::spectrum:
      read_modes(r, cfg);
      read_drive(r, cfg);
      cfg.grid_n_c = static_cast<int>(r.integer("spectrum.n_c_max", std::nullopt, 0, 1000));
      cfg.grid_n_r = static_cast<int>(r.integer("spectrum.n_r_max", std::nullopt, 0, 1000));
      break;
    case RunMode::evolve:
      read_hilbert(r, cfg);
      read_modes(r, cfg);
      read_drive(r, cfg);
      cfg.state = read_state(r, cfg.hilbert, true);
      cfg.engine = r.choice<Engine>("evolve.engine", std::string("effective"), engines);
      cfg.t = r.real("evolve.t", std::nullopt, kNonNegative);
      cfg.dt_max = r.real("evolve.dt_max", 0.01, kPositive);
      break;
    case RunMode::bell_phi:
    case RunMode::bell_psi: {
      read_hilbert(r, cfg);
      read_modes(r, cfg);
      read_drive(r, cfg);
      if (cfg.mode == RunMode::bell_psi) read_carrier(r, cfg);
      const StateSpec s = read_state(r, cfg.hilbert, false);
      if (!std::holds_alternative<FockSpec>(s))
        throw ConfigError("line " + std::to_string(r.line_of("state.kind")) +
                          ": state.kind must be fock for Bell generation");
      cfg.state = s;
      cfg.sign = r.choice<BellSign>("bell.sign", std::string("plus"),
                                    {{"plus", BellSign::plus}, {"minus", BellSign::minus}});
      cfg.engine = r.choice<Engine>("bell.engine", std::string("effective"), engines);
      break;
    }
    case RunMode::tomo_synth:
    case RunMode::wigner:
      read_hilbert(r, cfg);
      read_modes(r, cfg);
      read_drive(r, cfg);
      if (!cfg.drive.symmetric())
        throw ConfigError("line " + std::to_string(r.line_of("drive.k_prime")) +
                          ": tomography requires k_prime = k and delta_prime = delta");
      cfg.state = read_state(r, cfg.hilbert, true);
      read_tomo(r, cfg);
      break;
    case RunMode::tomo_invert:
      cfg.record_path = r.text("tomo.record", std::nullopt);
      cfg.n_fit_c = static_cast<int>(r.integer("tomo.n_fit_c", 10, 0, 60));
      cfg.n_fit_r = static_cast<int>(r.integer("tomo.n_fit_r", 0, 0, 60));
      cfg.ridge = r.real("tomo.ridge", 0.0, kNonNegative);
      break;
  }
  return cfg;
}

void apply_overrides(RunConfig& cfg, std::optional<std::uint64_t> seed, std::optional<int> threads) {
  auto set = [&](const std::string& key, const std::string& value) {
    for (auto& [k, v] : cfg.resolved)
      if (k == key) {
        v = value;
        return;
      }
    cfg.resolved.emplace_back(key, value);
  };
  if (seed) {
    cfg.seed = *seed;
    set("run.seed", std::to_string(*seed));
  }
  if (threads) {
    if (*threads < 1 || *threads > 256) throw ConfigError("--threads out of range [1, 256]");
    cfg.threads = *threads;
    set("run.threads", std::to_string(*threads));
  }
}

}  // namespace vibronic::cli
