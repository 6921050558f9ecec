#include "gaplab/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gaplab {

int RunConfig::resolved_threads() const {
  if (threads > 0) return threads;
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  auto b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

struct Entry {
  std::string value;
  int line;
};

using Sections = std::map<std::string, std::vector<std::pair<std::string, Entry>>>;

int to_int(const Entry& e) {
  std::size_t pos = 0;
  int v = std::stoi(e.value, &pos);
  if (pos != e.value.size())
    throw std::invalid_argument("config line " + std::to_string(e.line) + ": bad integer '" +
                                e.value + "'");
  return v;
}

double to_double(const Entry& e) {
  std::size_t pos = 0;
  double v = std::stod(e.value, &pos);
  if (pos != e.value.size())
    throw std::invalid_argument("config line " + std::to_string(e.line) + ": bad number '" +
                                e.value + "'");
  return v;
}

RationalFlux to_flux(const std::string& tok, int line) {
  auto slash = tok.find('/');
  if (slash == std::string::npos) return RationalFlux(std::stoll(tok), 1);
  std::int64_t p = std::stoll(tok.substr(0, slash));
  std::int64_t q = std::stoll(tok.substr(slash + 1));
  if (q < 1)
    throw std::invalid_argument("config line " + std::to_string(line) + ": bad flux '" + tok +
                                "'");
  return RationalFlux(p, q);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  Sections sections;
  std::istringstream is(text);
  std::string line, section = "run";
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      sections[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    sections[section].emplace_back(trim(line.substr(0, eq)),
                                   Entry{trim(line.substr(eq + 1)), lineno});
  }

  static const std::map<std::string, std::set<std::string>> kSchema = {
      {"run", {"backend", "qmax", "out", "threads", "seed"}},
      {"spectral", {"kgrid1", "kgrid2", "delta_gap"}},
      {"continuum", {"grid", "bands"}},
      {"potential", {"kind", "amplitude", "coeff"}},
      {"field", {"mean", "harmonic"}},
      {"patches", {"radius", "normgap_radius"}},
      {"ladders", {"epsilon", "lambda", "normgap_s", "normgap_L0"}},
      {"tracks", {"fluxes", "band"}},
      {"wannier", {"kgrid", "window", "staggered"}},
      {"adiabatic", {"window", "flux_denom"}},
  };
  for (const auto& [sec, entries] : sections) {
    auto it = kSchema.find(sec);
    if (it == kSchema.end())
      throw std::invalid_argument("config: unknown section [" + sec + "]");
    for (const auto& [key, entry] : entries)
      if (!it->second.count(key))
        throw std::invalid_argument("config line " + std::to_string(entry.line) +
                                    ": unknown key '" + key + "' in [" + sec + "]");
  }

  RunConfig cfg;
  const auto get = [&](const std::string& sec, const std::string& key) -> const Entry* {
    auto it = sections.find(sec);
    if (it == sections.end()) return nullptr;
    const Entry* found = nullptr;
    for (const auto& [k, e] : it->second)
      if (k == key) found = &e;
    return found;
  };
  const auto get_all = [&](const std::string& sec, const std::string& key) {
    std::vector<Entry> out;
    auto it = sections.find(sec);
    if (it == sections.end()) return out;
    for (const auto& [k, e] : it->second)
      if (k == key) out.push_back(e);
    return out;
  };

  if (const Entry* e = get("run", "backend")) {
    if (e->value == "lattice")
      cfg.backend = Backend::Lattice;
    else if (e->value == "continuum")
      cfg.backend = Backend::Continuum;
    else
      throw std::invalid_argument("config line " + std::to_string(e->line) +
                                  ": backend must be lattice or continuum");
  }
  if (const Entry* e = get("run", "qmax")) cfg.qmax = to_int(*e);
  if (const Entry* e = get("run", "out")) cfg.out_dir = e->value;
  if (const Entry* e = get("run", "threads")) cfg.threads = to_int(*e);
  if (const Entry* e = get("run", "seed")) cfg.seed = std::stoull(e->value);
  if (const Entry* e = get("spectral", "kgrid1")) cfg.kgrid1 = to_int(*e);
  if (const Entry* e = get("spectral", "kgrid2")) cfg.kgrid2 = to_int(*e);
  if (const Entry* e = get("spectral", "delta_gap")) cfg.delta_gap = to_double(*e);
  if (const Entry* e = get("continuum", "grid")) cfg.continuum_grid = to_int(*e);
  if (const Entry* e = get("continuum", "bands")) cfg.continuum_bands = to_int(*e);

  if (const Entry* e = get("potential", "kind")) {
    if (e->value == "none") {
      cfg.potential = PotentialSpec::none();
    } else if (e->value == "cosine") {
      double amp = 0.0;
      if (const Entry* a = get("potential", "amplitude")) amp = to_double(*a);
      cfg.potential = PotentialSpec::cosine(amp);
    } else if (e->value == "fourier-list") {
      cfg.potential.kind = PotentialKind::FourierList;
      for (const Entry& c : get_all("potential", "coeff")) {
        std::istringstream cs(c.value);
        PotentialCoeff pc;
        if (!(cs >> pc.m1 >> pc.m2 >> pc.amplitude))
          throw std::invalid_argument("config line " + std::to_string(c.line) +
                                      ": coeff needs 'm1 m2 amplitude'");
        cfg.potential.coefficients.push_back(pc);
      }
    } else {
      throw std::invalid_argument("config line " + std::to_string(e->line) +
                                  ": potential kind must be none, cosine or fourier-list");
    }
  }

  if (const Entry* e = get("field", "mean")) cfg.field.mean = to_double(*e);
  for (const Entry& h : get_all("field", "harmonic")) {
    std::istringstream hs(h.value);
    FieldHarmonic fh;
    std::string trig = "cos";
    if (!(hs >> fh.n1 >> fh.n2 >> fh.amplitude))
      throw std::invalid_argument("config line " + std::to_string(h.line) +
                                  ": harmonic needs 'n1 n2 amplitude [sin|cos]'");
    hs >> trig;
    if (trig == "sin")
      fh.use_sin = true;
    else if (trig != "cos")
      throw std::invalid_argument("config line " + std::to_string(h.line) +
                                  ": trig must be sin or cos");
    cfg.field.harmonics.push_back(fh);
  }
  cfg.field.validate();

  if (const Entry* e = get("patches", "radius")) cfg.patch_radius = to_int(*e);
  if (const Entry* e = get("patches", "normgap_radius")) cfg.normgap_radius = to_int(*e);

  const auto parse_doubles = [&](const Entry& e) {
    std::vector<double> v;
    std::istringstream vs(e.value);
    double x;
    while (vs >> x) v.push_back(x);
    if (v.empty())
      throw std::invalid_argument("config line " + std::to_string(e.line) + ": empty list");
    return v;
  };
  if (const Entry* e = get("ladders", "epsilon")) cfg.epsilon_ladder = parse_doubles(*e);
  if (const Entry* e = get("ladders", "lambda")) cfg.lambda_ladder = parse_doubles(*e);
  if (const Entry* e = get("ladders", "normgap_s")) {
    cfg.normgap_steps.clear();
    for (double d : parse_doubles(*e)) cfg.normgap_steps.push_back(static_cast<int>(d));
  }
  if (const Entry* e = get("ladders", "normgap_L0")) cfg.normgap_L0 = to_int(*e);

  if (const Entry* e = get("tracks", "fluxes")) {
    cfg.track_fluxes.clear();
    std::istringstream fs(e->value);
    std::string tok;
    while (fs >> tok) cfg.track_fluxes.push_back(to_flux(tok, e->line));
    if (cfg.track_fluxes.empty())
      throw std::invalid_argument("config line " + std::to_string(e->line) +
                                  ": empty flux list");
  }
  if (const Entry* e = get("tracks", "band")) cfg.track_band = to_int(*e);
  if (const Entry* e = get("wannier", "kgrid")) cfg.wannier_kgrid = to_int(*e);
  if (const Entry* e = get("wannier", "window")) cfg.wannier_window = to_int(*e);
  if (const Entry* e = get("wannier", "staggered")) cfg.staggered_amplitude = to_double(*e);
  if (const Entry* e = get("adiabatic", "window")) cfg.adiabatic_window = to_int(*e);
  if (const Entry* e = get("adiabatic", "flux_denom")) cfg.adiabatic_flux_denom = to_int(*e);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace gaplab
