#include "vibronic/record_io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace vibronic::io {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_header(std::ostream& os, const HeaderFields& fields) {
  os << "# vibronic_version = " << VIBRONIC_VERSION << '\n';
  for (const auto& [k, v] : fields) os << "# " << k << " = " << v << '\n';
}

void write_record(std::ostream& os, const SignalRecord& rec) {
  const BichromaticParams& p = rec.params;
  const HeaderFields fields{
      {"record.k", std::to_string(p.k)},
      {"record.k_prime", std::to_string(p.k_prime)},
      {"record.delta", format_real(p.delta)},
      {"record.delta_prime", format_real(p.delta_prime)},
      {"record.omega_re", format_real(p.omega.real())},
      {"record.omega_im", format_real(p.omega.imag())},
      {"record.phi", format_real(p.phi)},
      {"record.phi0", format_real(p.phi0)},
      {"record.eta", format_real(p.modes.eta)},
      {"record.eta_r", format_real(p.modes.eta_r)},
      {"record.nu", format_real(p.modes.nu)},
      {"record.seed", std::to_string(rec.seed)},
      {"record.columns", "tau,p_dd,shots"},
  };
  for (const auto& [k, v] : fields) os << "# " << k << " = " << v << '\n';
  for (const SignalSample& s : rec.samples)
    os << format_real(s.tau) << ',' << format_real(s.p_dd) << ',' << s.shots << '\n';
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_real(const std::string& s, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty())
    throw IoError("record line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& s, int line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw IoError("record line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

}  // namespace

SignalRecord read_record(std::istream& is) {
  std::map<std::string, std::pair<std::string, int>> header;
  SignalRecord rec;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto eq = t.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(std::string_view(t).substr(1, eq - 1));
      if (key.rfind("record.", 0) == 0) header[key.substr(7)] = {trim(t.substr(eq + 1)), lineno};
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(t);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(trim(c));
    if (cols.size() != 3)
      throw IoError("record line " + std::to_string(lineno) + ": expected tau,p_dd,shots");
    rec.samples.push_back({to_real(cols[0], lineno), to_real(cols[1], lineno), to_u64(cols[2], lineno)});
  }

  auto need = [&](const char* key) -> const std::pair<std::string, int>& {
    const auto it = header.find(key);
    if (it == header.end()) throw IoError(std::string("record: missing header field record.") + key);
    return it->second;
  };
  auto real = [&](const char* key) {
    const auto& [v, l] = need(key);
    return to_real(v, l);
  };
  auto integer = [&](const char* key) {
    const auto& [v, l] = need(key);
    return static_cast<int>(to_u64(v, l));
  };
  BichromaticParams& p = rec.params;
  p.k = integer("k");
  p.k_prime = integer("k_prime");
  p.delta = real("delta");
  p.delta_prime = real("delta_prime");
  p.omega = {real("omega_re"), real("omega_im")};
  p.phi = real("phi");
  p.phi0 = real("phi0");
  p.modes = {real("eta"), real("eta_r"), real("nu")};
  {
    const auto& [v, l] = need("seed");
    rec.seed = to_u64(v, l);
  }
  try {
    rec.validate();
  } catch (const Error& e) {
    throw IoError(e.what());
  }
  return rec;
}

void write_wigner_rows(std::ostream& os, const std::vector<WignerPoint>& points) {
  for (const WignerPoint& w : points)
    os << format_real(w.alpha_c.real()) << ',' << format_real(w.alpha_c.imag()) << ','
       << format_real(w.alpha_r.real()) << ',' << format_real(w.alpha_r.imag()) << ','
       << format_real(w.w) << '\n';
}

}  // namespace vibronic::io
