#include "gaplab/experiments.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace gaplab {

namespace {

using nlohmann::json;

SpectralIsland seed_island(const RunConfig& cfg, const RationalFlux& flux, int band) {
  BandStructureOptions opts;
  opts.kgrid1 = cfg.kgrid1;
  opts.kgrid2 = cfg.kgrid2;
  opts.continuum_N = cfg.continuum_grid;
  opts.continuum_bands = cfg.continuum_bands;
  opts.threads = cfg.resolved_threads();
  BandStructure bs = band_structure(flux, cfg.potential, cfg.backend, opts);
  return island_containing(detect_islands(bs, cfg.delta_gap), band);
}

FrameGridOptions frame_opts(const RunConfig& cfg) {
  FrameGridOptions f;
  f.kgrid1 = std::max(8, cfg.kgrid1 / 2);
  f.kgrid2 = std::max(8, cfg.kgrid2 / 2);
  f.continuum_N = cfg.continuum_grid;
  f.threads = cfg.resolved_threads();
  return f;
}

TrackOptions track_opts(const RunConfig& cfg) {
  TrackOptions t;
  t.delta_gap = cfg.delta_gap;
  t.bands.kgrid1 = cfg.kgrid1;
  t.bands.kgrid2 = cfg.kgrid2;
  t.bands.continuum_N = cfg.continuum_grid;
  t.bands.continuum_bands = cfg.continuum_bands;
  t.bands.threads = cfg.resolved_threads();
  return t;
}

void ensure_outdir(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

json rational_json(const Rational& r) {
  return json{{"num", r.num()}, {"den", r.den()}, {"value", r.value()}};
}

void write_json(const RunConfig& cfg, const std::string& name, const json& j) {
  write_text_file(out_path(cfg, name), j.dump(2) + "\n");
}

std::string manifest_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

ButterflyData compute_butterfly(const RunConfig& cfg) {
  ButterflyData data;
  BandStructureOptions bopts;
  bopts.kgrid1 = cfg.kgrid1;
  bopts.kgrid2 = cfg.kgrid2;
  bopts.continuum_N = cfg.continuum_grid;
  bopts.continuum_bands = cfg.continuum_bands;
  bopts.threads = cfg.resolved_threads();
  FrameGridOptions fopts = frame_opts(cfg);

  for (const RationalFlux& flux : farey_fluxes(cfg.qmax)) {
    try {
      BandStructure bs = band_structure(flux, cfg.potential, cfg.backend, bopts);
      std::vector<EnergyInterval> bands;
      for (Eigen::Index m = 0; m < bs.nbands(); ++m)
        bands.push_back({bs.band_min(m), bs.band_max(m)});
      auto islands = detect_islands(bs, cfg.delta_gap);

      std::vector<IslandRow> rows;
      std::int64_t cumulative = 0;
      std::int64_t bands_below = 0;
      for (const auto& isl : islands) {
        IslandRow row;
        row.flux = flux;
        row.m_lo = isl.m_lo;
        row.m_hi = isl.m_hi;
        row.ids = ids_of_island(isl);
        ChernEstimate ch = chern_kspace(flux, isl, cfg.potential, cfg.backend, fopts);
        row.c1 = ch.rounded;
        row.ch_residual = ch.residual;
        row.c0 = row.ids - Rational(row.c1) * flux.phi();
        cumulative += row.c1;
        bands_below += isl.num_bands();
        if (isl.upper_gap) {
          row.has_upper_gap = true;
          row.gap_lo = isl.upper_gap->lo;
          row.gap_hi = isl.upper_gap->hi;
          row.gap_c1 = cumulative;
          row.gap_c0 = Rational(bands_below, flux.q) - Rational(cumulative) * flux.phi();
          // emit-time Diophantine recheck: q I - c1 p must be an integer
          Rational residue = Rational(flux.q) * Rational(bands_below, flux.q) -
                             Rational(cumulative * flux.p);
          if (!residue.is_integer())
            throw std::runtime_error("butterfly: Diophantine identity violated at flux " +
                                     flux.phi().str());
          // and the TKNN cross-check pins the cumulative Chern number
          GapLabel tknn = tknn_label(bands_below, flux);
          if (tknn.c1 != cumulative)
            throw std::runtime_error(
                "butterfly: TKNN cross-check failed at flux " + flux.phi().str() + ": gap " +
                std::to_string(bands_below) + " has cumulative Chern " +
                std::to_string(cumulative) + " but Diophantine solution " +
                std::to_string(tknn.c1));
        }
        rows.push_back(row);
      }
      data.fluxes.push_back(flux);
      data.bands.push_back(std::move(bands));
      data.rows.insert(data.rows.end(), rows.begin(), rows.end());
    } catch (const std::exception& e) {
      data.failures.push_back("flux " + flux.phi().str() + ": " + e.what());
    }
  }
  return data;
}

LemmaDecay mainlemma_decay(const RationalFlux& flux, const SpectralIsland& island,
                           const PotentialSpec& V, const std::vector<int>& L_list) {
  if (!island.upper_gap)
    throw std::invalid_argument("mainlemma_decay: island needs an upper bounding gap");
  LemmaDecay out;
  // gap-interior counting energy, off the midpoint so the boundary term of
  // the counting function is visible
  out.count_energy = island.upper_gap->lo + 0.25 * island.upper_gap->width();
  const double ids = ids_of_island(island).value();
  for (int L : L_list) {
    SampleOperator patch = sample_hamiltonian(L, flux, 0.0, {}, V, Geometry::Patch);
    RealVector ev = eigvals(patch.dense());
    const auto below = static_cast<double>((ev.array() < out.count_energy).count());
    const double torus_count = ids * L * L;  // covariant diagonal, exact
    out.L.push_back(L);
    out.D.push_back(std::abs(torus_count - below) / (static_cast<double>(L) * L));
  }
  for (std::size_t i = 0; i + 1 < out.D.size(); ++i)
    out.ratios.push_back(out.D[i + 1] / out.D[i]);
  return out;
}

int run_butterfly(const RunConfig& cfg, std::ostream& log) {
  ensure_outdir(cfg);
  ButterflyData data = compute_butterfly(cfg);
  write_butterfly_csv(data, out_path(cfg, "butterfly.csv"));
  write_labels_csv(data.rows, out_path(cfg, "labels.csv"));
  write_text_file(out_path(cfg, "butterfly.svg"), butterfly_svg(data));
  write_text_file(out_path(cfg, "wannier_diagram.svg"), wannier_diagram_svg(data));

  json manifest;
  manifest["generated"] = manifest_timestamp();
  manifest["qmax"] = cfg.qmax;
  manifest["kgrid"] = {cfg.kgrid1, cfg.kgrid2};
  manifest["delta_gap"] = cfg.delta_gap;
  manifest["backend"] = cfg.backend == Backend::Lattice ? "lattice" : "continuum";
  manifest["island_matching"] = "hausdorff-greedy";
  manifest["fluxes"] = data.fluxes.size();
  manifest["islands"] = data.rows.size();
  manifest["failures"] = data.failures;
  write_json(cfg, "manifest.json", manifest);

  log << "butterfly: " << data.fluxes.size() << " fluxes, " << data.rows.size()
      << " islands, " << data.failures.size() << " failures -> " << cfg.out_dir << "\n";
  for (const auto& f : data.failures) log << "  failed: " << f << "\n";
  return data.failures.empty() ? 0 : 1;
}

int run_streda(const RunConfig& cfg, std::ostream& log) {
  ensure_outdir(cfg);
  SpectralIsland seed = seed_island(cfg, cfg.track_fluxes.front(), cfg.track_band);
  IslandTrack track =
      track_island(cfg.track_fluxes, cfg.potential, cfg.backend, seed, track_opts(cfg));
  bool pass = !track.aborted && track.size() >= 3;

  json rep;
  rep["experiment"] = "streda";
  rep["aborted"] = track.aborted;
  if (track.aborted) rep["abort_reason"] = track.abort_reason;
  rep["max_hausdorff_jump"] = track.max_hausdorff_jump;
  for (std::size_t i = 0; i < track.size(); ++i) {
    rep["track"].push_back({{"flux", track.fluxes[i].phi().str()},
                            {"m_lo", track.islands[i].m_lo},
                            {"m_hi", track.islands[i].m_hi},
                            {"ids", rational_json(track.ids(i))}});
  }
  if (pass) {
    GapLabel label = diophantine_label(track);
    ChernEstimate ch = chern_kspace(track.fluxes.front(), track.islands.front(),
                                    cfg.potential, cfg.backend, frame_opts(cfg));
    StredaReport streda = streda_check(track, label, ch.value);
    rep["label"] = {{"c0", rational_json(label.c0)}, {"c1", label.c1}};
    rep["chern"] = {{"value", ch.value}, {"rounded", ch.rounded}, {"residual", ch.residual}};
    for (const auto& s : streda.slopes) rep["slopes"].push_back(rational_json(s));
    rep["slopes_exact"] = streda.slopes_exact;
    rep["max_dev_from_chern"] = streda.max_dev_from_chern;
    pass = streda.slopes_exact && std::abs(ch.value - static_cast<double>(label.c1)) < 1e-6 &&
           ch.residual < 1e-6;
  }
  rep["pass"] = pass;
  write_json(cfg, "streda.json", rep);
  log << "streda: " << (pass ? "ok" : "FAILED") << " (" << out_path(cfg, "streda.json")
      << ")\n";
  return pass ? 0 : 1;
}

int run_normgap(const RunConfig& cfg, std::ostream& log) {
  ensure_outdir(cfg);
  const RationalFlux base = cfg.track_fluxes.back();
  SpectralIsland island = seed_island(cfg, base, cfg.track_band);
  ChernEstimate ch =
      chern_kspace(base, island, cfg.potential, cfg.backend, frame_opts(cfg));

  json rep;
  rep["experiment"] = "normgap";
  rep["base_flux"] = base.phi().str();
  rep["island"] = {{"m_lo", island.m_lo}, {"m_hi", island.m_hi}};
  rep["c1"] = ch.rounded;
  rep["patch_radius"] = cfg.normgap_radius;
  bool pass = true;
  if (ch.rounded == 0) {
    rep["branch"] = "not-applicable (c1 = 0; the Corollary needs the localized "
                    "Wannier-basis argument, see the wannier experiment)";
  } else {
    rep["branch"] = "c1 != 0";
    rep["ladder_L0"] = cfg.normgap_L0;
    NormGapReport ng = norm_gap_experiment(base, island, ch.rounded, cfg.potential,
                                           cfg.normgap_steps, cfg.normgap_radius,
                                           cfg.normgap_L0, {});
    for (const auto& pt : ng.points) {
      rep["points"].push_back({{"epsilon", pt.epsilon},
                               {"shifted_flux", pt.shifted_flux.phi().str()},
                               {"patch_norm", pt.patch_norm},
                               {"strong_proxy", pt.strong_proxy}});
      if (pt.epsilon != 0.0)
        pass = pass && pt.patch_norm >= 0.9 && pt.strong_proxy <= 0.1;
    }
  }
  rep["pass"] = pass;
  write_json(cfg, "normgap.json", rep);
  log << "normgap: " << (pass ? "ok" : "FAILED") << " (" << out_path(cfg, "normgap.json")
      << ")\n";
  return pass ? 0 : 1;
}

namespace {

json adiabatic_case(const RunConfig& cfg, const std::string& name, const FieldProfile& field,
                    std::int64_t c1, const SpectralIsland& island, bool& pass) {
  ExpansionOptions opts;
  opts.window = cfg.adiabatic_window;
  opts.flux_denom = cfg.adiabatic_flux_denom;
  opts.kgrid = 12;
  opts.delta_gap = cfg.delta_gap;
  opts.threads = cfg.resolved_threads();
  const RationalFlux base = island.flux;

  ExpansionReport rep = expansion_fit(base, island, c1, field, cfg.potential,
                                      cfg.lambda_ladder, opts);
  std::vector<double> half;
  for (double l : cfg.lambda_ladder) half.push_back(0.5 * l);
  ExpansionReport rep_half = expansion_fit(base, island, c1, field, cfg.potential, half, opts);

  json j;
  j["case"] = name;
  j["base_flux"] = base.phi().str();
  j["mean_field"] = mean_flux(field);
  j["island"] = {{"m_lo", island.m_lo}, {"m_hi", island.m_hi}};
  for (const auto& pt : rep.points)
    j["points"].push_back({{"lambda_target", pt.lambda_target},
                           {"lambda_used", pt.lambda_used},
                           {"density", pt.density},
                           {"method", pt.method}});
  j["fit"] = {{"intercept", rep.intercept}, {"slope", rep.slope}};
  j["predicted_slope"] = rep.predicted_slope;
  j["baseline"] = rep.baseline;
  j["max_residual"] = rep.max_residual;
  j["max_residual_half_ladder"] = rep_half.max_residual;

  const double tol = std::max(0.1 * std::abs(rep.predicted_slope), 1e-3);
  const bool slope_ok = std::abs(rep.slope - rep.predicted_slope) <= tol;
  // residual of the linear fit is quadratic in lambda: halving the ladder
  // should shrink it about fourfold; exactly-linear and period-averaged cases
  // sit at the resolution floor instead
  const bool residual_ok = rep.max_residual <= 1e-5 ||
                           (rep_half.max_residual > 0 &&
                            rep.max_residual / rep_half.max_residual >= 2.0 &&
                            rep.max_residual / rep_half.max_residual <= 8.0);
  j["slope_ok"] = slope_ok;
  j["residual_quadratic_ok"] = residual_ok;
  pass = pass && slope_ok && residual_ok;
  return j;
}

}  // namespace

int run_adiabatic(const RunConfig& cfg, std::ostream& log) {
  ensure_outdir(cfg);
  const RationalFlux base = cfg.track_fluxes.back();
  SpectralIsland island = seed_island(cfg, base, cfg.track_band);
  ChernEstimate ch = chern_kspace(base, island, cfg.potential, cfg.backend, frame_opts(cfg));

  bool pass = true;
  json rep;
  rep["experiment"] = "adiabatic";
  rep["c1"] = ch.rounded;
  FieldProfile constant =
      cfg.field.is_constant() && cfg.field.mean != 0.0 ? cfg.field : FieldProfile::constant(1.0);
  rep["cases"].push_back(adiabatic_case(cfg, "constant-field", constant, ch.rounded, island, pass));
  FieldProfile zero_mean;
  if (!cfg.field.is_constant() && cfg.field.mean == 0.0) {
    zero_mean = cfg.field;
  } else {
    zero_mean.mean = 0.0;
    zero_mean.harmonics = {{1, 0, 1.0, true}};
  }
  rep["cases"].push_back(adiabatic_case(cfg, "zero-mean-field", zero_mean, ch.rounded, island, pass));
  rep["pass"] = pass;
  write_json(cfg, "adiabatic.json", rep);
  log << "adiabatic: " << (pass ? "ok" : "FAILED") << " (" << out_path(cfg, "adiabatic.json")
      << ")\n";
  return pass ? 0 : 1;
}

int run_wannier(const RunConfig& cfg, std::ostream& log) {
  ensure_outdir(cfg);
  bool pass = true;
  json rep;
  rep["experiment"] = "wannier";

  // constructive branch: staggered flux-1/2 lowest band (Chern 0)
  const RationalFlux half(1, 2);
  PotentialSpec v = PotentialSpec::staggered(cfg.staggered_amplitude);
  BandStructureOptions bopts;
  bopts.kgrid1 = cfg.kgrid1;
  bopts.kgrid2 = cfg.kgrid2;
  bopts.threads = cfg.resolved_threads();
  BandStructure bs = band_structure(half, v, Backend::Lattice, bopts);
  SpectralIsland isl = island_containing(detect_islands(bs, cfg.delta_gap), 0);
  FrameGridOptions fopts;
  fopts.kgrid1 = fopts.kgrid2 = cfg.wannier_kgrid;
  fopts.threads = cfg.resolved_threads();
  ChernEstimate ch = chern_kspace(half, isl, v, Backend::Lattice, fopts);
  pass = pass && ch.rounded == 0;

  ZakFiberGrid z = bfz_fibers(half, isl, v, fopts);
  ChernEstimate chz = chern_zak(z);
  SmoothFrame frame = smooth_frame(z);
  WannierOptions wopts;
  wopts.window = cfg.wannier_window;
  WannierSet ws = wannier_functions(frame, wopts);
  DecaySummary decay = decay_profile(ws);
  ProjectOptions popts;
  popts.torus_side = std::max(32, 4 * ((cfg.wannier_window + 1) / 2) * 2);
  ProjectionKernel direct = project_island_kernel(half, isl, v, 6, popts);
  PatchKernel rec = reconstruct_kernel(ws, 6);
  const double rec_err = (rec.K - direct.K).cwiseAbs().maxCoeff();

  rep["staggered"] = {{"flux", half.phi().str()},
                      {"amplitude", cfg.staggered_amplitude},
                      {"chern", ch.rounded},
                      {"chern_zak", chz.rounded},
                      {"zak_certificate", z.zak_certificate},
                      {"min_overlap_det", frame.min_overlap_det},
                      {"boundary_winding", frame.boundary_winding},
                      {"orthonormality_residual", ws.orthonormality_residual},
                      {"reconstruction_error", rec_err},
                      {"alpha_min", decay.alpha_min},
                      {"r2_min", decay.r2_min}};
  pass = pass && chz.rounded == ch.rounded && frame.min_overlap_det >= 0.5 &&
         ws.orthonormality_residual <= 1e-8 && rec_err <= 1e-4 && decay.alpha_min > 0 &&
         decay.r2_min >= 0.98;
  write_wannier_csv(ws, out_path(cfg, "wannier.csv"));

  // obstruction dichotomy over the q <= 8 gap table
  FrameGridOptions table_opts;
  table_opts.kgrid1 = table_opts.kgrid2 = 16;
  table_opts.threads = cfg.resolved_threads();
  for (const RationalFlux& flux : farey_fluxes(std::min(cfg.qmax, 8))) {
    if (flux.q < 2) continue;
    BandStructure tbs = band_structure(flux, {}, Backend::Lattice, bopts);
    for (const auto& island : detect_islands(tbs, cfg.delta_gap)) {
      ChernEstimate c = chern_kspace(flux, island, {}, Backend::Lattice, table_opts);
      bool obstructed = false;
      std::string what;
      try {
        smooth_frame(bfz_fibers(flux, island, {}, table_opts));
      } catch (const std::exception& e) {
        obstructed = true;
        what = e.what();
      }
      const bool consistent = obstructed == (c.rounded != 0);
      rep["obstruction_table"].push_back({{"flux", flux.phi().str()},
                                          {"m_lo", island.m_lo},
                                          {"m_hi", island.m_hi},
                                          {"chern", c.rounded},
                                          {"obstructed", obstructed},
                                          {"consistent", consistent}});
      pass = pass && consistent;
    }
  }
  rep["pass"] = pass;
  write_json(cfg, "wannier.json", rep);
  log << "wannier: " << (pass ? "ok" : "FAILED") << " (" << out_path(cfg, "wannier.json")
      << ")\n";
  return pass ? 0 : 1;
}

int run_purify(const RunConfig& cfg, std::ostream& log) {
  ensure_outdir(cfg);
  bool pass = true;
  const RationalFlux base = cfg.track_fluxes.back();
  SpectralIsland island = seed_island(cfg, base, cfg.track_band);
  const int R = cfg.patch_radius;

  ProjectionKernel raw = project_island_kernel(base, island, cfg.potential, R, {});
  ProjectionKernel P = purify_projection(dress_kernel(raw, 0.0));

  json rep;
  rep["experiment"] = "purify";
  rep["base_flux"] = base.phi().str();
  rep["patch_radius"] = R;
  rep["kernel"] = {{"decay_alpha", raw.decay.alpha},
                   {"decay_C", raw.decay.C},
                   {"decay_r2", raw.decay.r2},
                   {"idempotency_residual_raw", raw.idempotency_residual},
                   {"idempotency_residual_projected", P.idempotency_residual}};
  pass = pass && P.idempotency_residual <= 1e-12 && raw.decay.alpha > 0;

  // defect ladder: diagonal pinned at its eps = 0 value, off-diagonal O(eps)
  double kmin = 1e300, kmax = 0.0;
  DefectReport at0 = defect_operator(dress_kernel(P, 0.0), P.decay);
  for (double eps : cfg.epsilon_ladder) {
    DefectReport d = defect_operator(dress_kernel(P, eps), P.decay);
    rep["defect_ladder"].push_back({{"eps", eps},
                                    {"diag_sup", d.diag_sup},
                                    {"offdiag_sup", d.offdiag_sup},
                                    {"empirical_K", d.empirical_K}});
    kmin = std::min(kmin, d.empirical_K);
    kmax = std::max(kmax, d.empirical_K);
    pass = pass && std::abs(d.diag_sup - at0.diag_sup) <= 1e-12;
  }
  rep["defect_K_spread"] = kmax / kmin;
  pass = pass && kmax / kmin <= 2.0;

  // purification: exact projections and the second-order inverse-sqrt remainder
  auto remainder_sup = [&](double eps) {
    AlmostProjection ap = dress_kernel(P, eps);
    Matrix delta = ap.K * ap.K - ap.K;
    ProjectionKernel pur = purify_projection(ap);
    Matrix rem = pur.K - (ap.K - 2.0 * ap.K * delta + delta);
    auto inner = pur.inner_indices(R / 2);
    double sup = 0.0;
    for (auto i : inner)
      for (auto j : inner) sup = std::max(sup, std::abs(rem(i, j)));
    return sup;
  };
  for (std::size_t i = 0; i + 1 < cfg.epsilon_ladder.size(); ++i) {
    const double a = cfg.epsilon_ladder[i], b = cfg.epsilon_ladder[i + 1];
    if (std::abs(a - 2.0 * b) > 1e-12) continue;
    const double ratio = remainder_sup(a) / remainder_sup(b);
    rep["aux_second_order_ratios"].push_back({{"eps", a}, {"ratio", ratio}});
    pass = pass && ratio >= 3.0 && ratio <= 5.0;
  }
  ProjectionKernel pur0 = purify_projection(dress_kernel(P, cfg.epsilon_ladder.front()));
  rep["purified_idempotency_residual"] = pur0.idempotency_residual;
  pass = pass && pur0.idempotency_residual <= 1e-12;

  // Kato-Nagy between the base projection and the purified dressed one
  KatoNagyResult kn = kato_nagy(P, pur0);
  rep["kato_nagy"] = {{"distance", kn.projection_distance},
                      {"unitarity_residual", kn.unitarity_residual},
                      {"intertwining_residual", kn.intertwining_residual},
                      {"u_minus_one_alpha", kn.u_minus_one_decay.alpha}};
  pass = pass && kn.unitarity_residual <= 1e-10 && kn.intertwining_residual <= 1e-10;

  // measured constant of the dressed-kernel comparison at an admissible step
  {
    const int L0 = cfg.normgap_L0;
    const double eps = kTwoPi / L0;
    RationalFlux shifted(base.p * L0 + base.q, base.q * static_cast<std::int64_t>(L0));
    ChernEstimate ch = chern_kspace(base, island, cfg.potential, cfg.backend, frame_opts(cfg));
    const Rational c0 = ids_of_island(island) - Rational(ch.rounded) * base.phi();
    const Rational bands = (c0 + Rational(ch.rounded) * shifted.phi()) * Rational(shifted.q);
    BandStructureOptions bopts;
    bopts.threads = cfg.resolved_threads();
    BandStructure sbs = band_structure(shifted, cfg.potential, Backend::Lattice, bopts);
    SpectralIsland shifted_island =
        island_below_gap(sbs, static_cast<int>(bands.num()), cfg.delta_gap);
    ProjectionKernel truth =
        project_island_kernel(shifted, shifted_island, cfg.potential, R, {});
    AlmostProjection dressed = dress_kernel(raw, eps);
    const double K_hc5 = (truth.K - dressed.K).cwiseAbs().maxCoeff() / eps;
    rep["dressing_error_constant"] = {{"eps", eps}, {"K", K_hc5}};
  }

  // boundary-term decay of the trace comparison (torus vs patch eigencounts)
  LemmaDecay lemma = mainlemma_decay(base, island, cfg.potential, {8, 16, 32});
  rep["mainlemma"] = {{"count_energy", lemma.count_energy}};
  for (std::size_t i = 0; i < lemma.L.size(); ++i)
    rep["mainlemma"]["points"].push_back({{"L", lemma.L[i]}, {"D", lemma.D[i]}});
  for (double r : lemma.ratios) {
    rep["mainlemma"]["ratios"].push_back(r);
    pass = pass && r >= 0.3 && r <= 0.7;
  }

  // negative control: dressing preserves the diagonal, so window traces agree
  {
    AlmostProjection dressed = dress_kernel(P, 0.05);
    PatchKernel Q;
    Q.R = P.R;
    Q.flux = P.flux;
    Q.K = dressed.K;
    auto zeros = trace_comparison(P, Q, {4, 8});
    rep["trace_negative_control"] = zeros;
    for (double z : zeros) pass = pass && z <= 1e-12;
  }

  rep["pass"] = pass;
  write_json(cfg, "purify.json", rep);
  log << "purify: " << (pass ? "ok" : "FAILED") << " (" << out_path(cfg, "purify.json")
      << ")\n";
  return pass ? 0 : 1;
}

int run_experiment(const std::string& name, const RunConfig& cfg, std::ostream& log) {
  if (name == "streda") return run_streda(cfg, log);
  if (name == "normgap") return run_normgap(cfg, log);
  if (name == "adiabatic") return run_adiabatic(cfg, log);
  if (name == "wannier") return run_wannier(cfg, log);
  if (name == "purify") return run_purify(cfg, log);
  if (name == "butterfly") return run_butterfly(cfg, log);
  log << "unknown experiment '" << name << "'\n";
  return 2;
}

}  // namespace gaplab
