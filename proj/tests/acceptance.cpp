// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Tolerances are pinned here, in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gaplab/experiments.hpp"
#include "gaplab/wannier.hpp"

using namespace gaplab;

namespace {

struct Harness {
  int failures = 0;

  void run(int id, const std::string& name, const std::function<void(std::ostringstream&)>& fn) {
    std::ostringstream notes;
    bool ok = true;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(notes);
    } catch (const std::exception& e) {
      ok = false;
      notes << " EXCEPTION: " << e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string text = notes.str();
    if (text.find("VIOLATION") != std::string::npos) ok = false;
    std::printf("[%s] criterion %2d: %s (%.1fs)%s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                dt, text.empty() ? "" : ("  --" + text).c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

void require(std::ostringstream& notes, bool cond, const std::string& what) {
  if (!cond) notes << " VIOLATION: " << what << ";";
}

SpectralIsland lowest_island(const RationalFlux& flux, const PotentialSpec& V = {}) {
  BandStructure bs = band_structure(flux, V, Backend::Lattice, {});
  return island_containing(detect_islands(bs, 1e-3), 0);
}

IslandTrack make_track(const std::vector<RationalFlux>& fluxes, int band) {
  BandStructure bs = band_structure(fluxes.front(), {}, Backend::Lattice, {});
  SpectralIsland seed = island_containing(detect_islands(bs, 1e-3), band);
  return track_island(fluxes, {}, Backend::Lattice, seed, {});
}

ProjectionKernel shrink_patch(const ProjectionKernel& k, int r) {
  ProjectionKernel out;
  out.R = r;
  out.flux = k.flux;
  out.K = k.restricted(r);
  out.decay = out.decay_fit(std::max(2, r / 2));
  return out;
}

}  // namespace

int main() {
  RunConfig cfg;  // defaults pin every tolerance used below
  cfg.threads = cfg.resolved_threads();
  Harness h;

  // ---- 1. gap-labelling identity over the q <= 10 Farey sweep -------------
  ButterflyData butterfly;
  h.run(1, "gap labelling q*I - c1*p integer for all gaps, q <= 10", [&](auto& notes) {
    cfg.qmax = 10;
    butterfly = compute_butterfly(cfg);
    require(notes, butterfly.failures.empty(), "sweep had per-flux failures");
    int gaps = 0;
    for (const auto& r : butterfly.rows) {
      const Rational qI = Rational(r.flux.q) * r.ids;
      require(notes, qI.is_integer(), "q*I not integer at " + r.flux.phi().str());
      require(notes, (qI - Rational(r.c1 * r.flux.p)).is_integer(),
              "q*I - c1*p not integer at " + r.flux.phi().str());
      require(notes, r.ch_residual <= 1e-6, "Chern residual at " + r.flux.phi().str());
      if (r.has_upper_gap) {
        ++gaps;
        const Rational below = r.gap_c0 + Rational(r.gap_c1) * r.flux.phi();
        require(notes, (Rational(r.flux.q) * below).is_integer(),
                "gap label identity at " + r.flux.phi().str());
      }
    }
    notes << " " << gaps << " gaps over " << butterfly.fluxes.size() << " fluxes";
  });

  // ---- 2. exact-rational linearity of accepted tracks ----------------------
  std::vector<IslandTrack> tracks;
  std::vector<GapLabel> labels;
  h.run(2, "I = c0 + c1*phi exactly on every accepted track, c1 integer", [&](auto& notes) {
    const std::vector<std::vector<RationalFlux>> flux_sets = {
        {{1, 5}, {1, 4}, {1, 3}}, {{1, 7}, {1, 6}, {1, 5}}, {{1, 6}, {1, 5}, {1, 4}}};
    for (const auto& fluxes : flux_sets) {
      for (int band : {0, -1}) {  // lowest island and top island
        BandStructure bs = band_structure(fluxes.front(), {}, Backend::Lattice, {});
        auto islands = detect_islands(bs, 1e-3);
        SpectralIsland seed =
            band == 0 ? islands.front() : islands.back();
        IslandTrack track = track_island(fluxes, {}, Backend::Lattice, seed, {});
        require(notes, !track.aborted, "track aborted at " + track.last_good_flux.phi().str());
        GapLabel label = diophantine_label(track);  // throws on any violation
        for (std::size_t i = 0; i < track.size(); ++i)
          require(notes, track.ids(i) == label.c0 + Rational(label.c1) * track.fluxes[i].phi(),
                  "fit mismatch");
        tracks.push_back(track);
        labels.push_back(label);
      }
    }
    // the all-bands track has the constant label (1, 0)
    IslandTrack all;
    for (auto f : {RationalFlux{1, 5}, {1, 4}, {1, 3}}) {
      BandStructure bs = band_structure(f, {}, Backend::Lattice, {});
      all.fluxes.push_back(f);
      all.islands.push_back(detect_islands(bs, 100.0).front());
    }
    GapLabel lab = diophantine_label(all);
    require(notes, lab.c1 == 0 && lab.c0 == Rational(1), "all-bands label");
    tracks.push_back(all);
    labels.push_back(lab);
    notes << " " << tracks.size() << " accepted tracks";
  });

  // ---- 3. Streda formula: exact slopes matching the Chern number -----------
  h.run(3, "finite-difference dI/dphi = c1 exactly and = chern_kspace to 1e-6",
        [&](auto& notes) {
          require(notes, !tracks.empty(), "no tracks from criterion 2");
          for (std::size_t t = 0; t < tracks.size(); ++t) {
            if (tracks[t].size() < 3) continue;
            ChernEstimate ch = chern_kspace(tracks[t].fluxes.front(), tracks[t].islands.front(),
                                            {}, Backend::Lattice, {});
            StredaReport rep = streda_check(tracks[t], labels[t], ch.value);
            require(notes, rep.slopes_exact, "non-exact rational slope");
            require(notes, rep.max_dev_from_chern < 1e-6, "slope vs chern deviation");
            require(notes, ch.rounded == labels[t].c1, "chern != fitted c1");
          }
        });

  // ---- 4. Chern consistency: TKNN cross-check and null sum -----------------
  h.run(4, "chern_kspace = TKNN solution for every gap and sums to zero, q <= 10",
        [&](auto& notes) {
          std::int64_t checked = 0;
          for (const RationalFlux& flux : farey_fluxes(10)) {
            BandStructure bs = band_structure(flux, {}, Backend::Lattice, {});
            auto islands = detect_islands(bs, 1e-3);
            std::int64_t cumulative = 0, below = 0;
            for (const auto& isl : islands) {
              cumulative += chern_kspace(flux, isl, {}, Backend::Lattice, {}).rounded;
              below += isl.num_bands();
              if (isl.upper_gap) {
                GapLabel tknn = tknn_label(below, flux);
                require(notes, tknn.c1 == cumulative,
                        "TKNN mismatch at " + flux.phi().str());
                ++checked;
              }
            }
            require(notes, cumulative == 0, "Chern null-sum at " + flux.phi().str());
          }
          notes << " " << checked << " gaps cross-checked";
        });

  // ---- 5. real-space Chern character ---------------------------------------
  h.run(5, "real-space Chern within 0.05 of c1 at R=12, improving from R=8",
        [&](auto& notes) {
          for (auto pq : {std::pair<int, int>{1, 3}, {1, 5}}) {
            RationalFlux flux(pq.first, pq.second);
            SpectralIsland isl = lowest_island(flux);
            ProjectionKernel k12 = project_island_kernel(flux, isl, {}, 12, {});
            ChernEstimate big = chern_realspace(k12);
            ChernEstimate small = chern_realspace(shrink_patch(k12, 8));
            const double err12 = std::abs(big.value - 1.0);
            const double err8 = std::abs(small.value - 1.0);
            require(notes, err12 <= 0.05,
                    "|Ch_real - c1| = " + std::to_string(err12) + " at " + flux.phi().str());
            require(notes, err12 <= err8, "R=12 error above R=8 error");
            notes << " " << flux.phi().str() << ": err12=" << fmt(err12)
                  << " err8=" << fmt(err8);
          }
        });

  // ---- 6. continuum Landau island ------------------------------------------
  h.run(6, "continuum b=2*pi/3: rank-1 island, IDS 1/3, Chern +1, flat to 2%",
        [&](auto& notes) {
          RationalFlux third(1, 3);
          BandStructureOptions bopts;
          bopts.kgrid1 = bopts.kgrid2 = 8;
          bopts.continuum_N = 24;
          bopts.continuum_bands = 3;
          bopts.threads = cfg.resolved_threads();
          BandStructure bs = band_structure(third, {}, Backend::Continuum, bopts);
          SpectralIsland isl = island_containing(detect_islands(bs, 0.5), 0);
          require(notes, isl.num_bands() == 1, "fiber rank != 1");
          require(notes, ids_of_island(isl) == Rational(1, 3), "IDS != 1/3");
          const double flat = bs.band_max(0) - bs.band_min(0);
          require(notes, flat <= 0.02 * third.b(), "band flatness " + std::to_string(flat));
          const double e0 = bs.band_min(0);
          require(notes, std::abs(e0 - third.b()) / third.b() <= 0.05,
                  "lowest level vs first Landau level");
          FrameGridOptions fopts;
          fopts.kgrid1 = fopts.kgrid2 = 8;
          fopts.continuum_N = 24;
          fopts.threads = cfg.resolved_threads();
          ChernEstimate ch = chern_kspace(third, isl, {}, Backend::Continuum, fopts);
          require(notes, ch.rounded == 1 && ch.residual <= 1e-6, "continuum Chern != +1");
        });

  // ---- 7. purification and the Kato-Nagy unitary ----------------------------
  h.run(7, "purified projections to 1e-12, Kato-Nagy to 1e-10, 2nd-order ratio in [3,5]",
        [&](auto& notes) {
          RationalFlux third(1, 3);
          SpectralIsland isl = lowest_island(third);
          ProjectionKernel raw = project_island_kernel(third, isl, {}, 10, {});
          ProjectionKernel P = purify_projection(dress_kernel(raw, 0.0));
          require(notes, P.idempotency_residual <= 1e-12, "base projection idempotency");
          ProjectionKernel Q = purify_projection(dress_kernel(P, 0.005));
          require(notes, Q.idempotency_residual <= 1e-12, "purified idempotency");
          // eps small enough that no dressed eigenvalue is carried across 1/2
          // (eps * patch area / 2 pi well below one flux quantum)
          KatoNagyResult kn = kato_nagy(P, Q);
          require(notes, kn.unitarity_residual <= 1e-10, "Kato-Nagy unitarity");
          require(notes, kn.intertwining_residual <= 1e-10, "Kato-Nagy intertwining");
          auto remainder_sup = [&](double eps) {
            AlmostProjection ap = dress_kernel(P, eps);
            Matrix delta = ap.K * ap.K - ap.K;
            Matrix rem = purify_projection(ap).K - (ap.K - 2.0 * ap.K * delta + delta);
            double sup = 0.0;
            for (auto i : P.inner_indices(5))
              for (auto j : P.inner_indices(5)) sup = std::max(sup, std::abs(rem(i, j)));
            return sup;
          };
          const double r1 = remainder_sup(0.02) / remainder_sup(0.01);
          const double r2 = remainder_sup(0.01) / remainder_sup(0.005);
          require(notes, r1 >= 3.0 && r1 <= 5.0, "eps-ladder ratio " + std::to_string(r1));
          require(notes, r2 >= 3.0 && r2 <= 5.0, "eps-ladder ratio " + std::to_string(r2));
          notes << " ratios " << fmt(r1) << ", " << fmt(r2);
        });

  // ---- 8. Lemma MainLemma boundary-term decay -------------------------------
  h.run(8, "|Tr(chi_L P1) - Tr(chi_L P2)|/L^2 halves over L in {8,16,32}",
        [&](auto& notes) {
          RationalFlux third(1, 3);
          LemmaDecay lemma = mainlemma_decay(third, lowest_island(third), {}, {8, 16, 32});
          for (double r : lemma.ratios) {
            require(notes, r >= 0.3 && r <= 0.7, "ratio " + std::to_string(r));
            notes << " ratio=" << fmt(r);
          }
        });

  // ---- 9. norm discontinuity at finite size ---------------------------------
  h.run(9, "patch norm >= 0.9 with strong proxy <= 0.1 across the eps ladder",
        [&](auto& notes) {
          RationalFlux third(1, 3);
          SpectralIsland isl = lowest_island(third);
          NormGapReport rep =
              norm_gap_experiment(third, isl, 1, {}, cfg.normgap_steps, 16, cfg.normgap_L0, {});
          for (const auto& pt : rep.points) {
            require(notes, pt.patch_norm >= 0.9,
                    "patch norm " + std::to_string(pt.patch_norm) + " at eps " +
                        std::to_string(pt.epsilon));
            require(notes, pt.strong_proxy <= 0.1,
                    "strong proxy " + std::to_string(pt.strong_proxy) + " at eps " +
                        std::to_string(pt.epsilon));
            notes << " (eps=" << fmt(pt.epsilon) << ": norm=" << fmt(pt.patch_norm)
                  << " proxy=" << fmt(pt.strong_proxy) << ")";
          }
        });

  // ---- 10. slowly varying field expansion -----------------------------------
  h.run(10, "adiabatic slope within 10% of <B>c1/(2 pi); residuals O(lambda^2)",
        [&](auto& notes) {
          RationalFlux third(1, 3);
          SpectralIsland isl = lowest_island(third);
          ExpansionOptions opts;
          opts.window = 60;
          opts.kgrid = 16;
          opts.threads = cfg.resolved_threads();

          ExpansionReport c = expansion_fit(third, isl, 1, FieldProfile::constant(1.0), {},
                                            {0.02, 0.05, 0.1}, opts);
          require(notes,
                  std::abs(c.slope - c.predicted_slope) <= 0.1 * std::abs(c.predicted_slope),
                  "constant-field slope " + std::to_string(c.slope));
          require(notes, c.max_residual <= 1e-9, "constant-field residual not linear-exact");

          FieldProfile zero;
          zero.mean = 0.0;
          zero.harmonics = {{1, 0, 1.0, true}};
          ExpansionReport z =
              expansion_fit(third, isl, 1, zero, {}, {0.02, 0.05, 0.1}, opts);
          require(notes, std::abs(z.slope) <= 1e-3,
                  "zero-mean slope " + std::to_string(z.slope));
          ExpansionReport zh =
              expansion_fit(third, isl, 1, zero, {}, {0.01, 0.025, 0.05}, opts);
          const double ratio = z.max_residual / std::max(zh.max_residual, 1e-300);
          // along the Diophantine line both orders vanish after period
          // averaging, so residuals at the resolution floor (<= 1e-5, four
          // orders under the lambda^2 scale) are consistent with O(lambda^2)
          require(notes, z.max_residual <= 1e-5 || (ratio >= 2.0 && ratio <= 8.0),
                  "residuals " + std::to_string(z.max_residual) + " with ratio " +
                      std::to_string(ratio));
          notes << " slopes " << fmt(c.slope) << " (pred " << fmt(c.predicted_slope) << "), "
                << fmt(z.slope) << "; residuals " << fmt(z.max_residual) << " / "
                << fmt(zh.max_residual);
        });

  // ---- 11. Wannier dichotomy -------------------------------------------------
  h.run(11, "smooth frames + localized Wannier iff Chern = 0, over the q <= 8 table",
        [&](auto& notes) {
          // constructive branch: staggered flux 1/2, lowest band
          RationalFlux half(1, 2);
          PotentialSpec v = PotentialSpec::staggered(3.0);
          SpectralIsland isl = lowest_island(half, v);
          FrameGridOptions fopts;
          fopts.kgrid1 = fopts.kgrid2 = 32;
          fopts.threads = cfg.resolved_threads();
          ChernEstimate ch = chern_kspace(half, isl, v, Backend::Lattice, fopts);
          require(notes, ch.rounded == 0, "staggered island not trivial");
          SmoothFrame frame = smooth_frame(bfz_fibers(half, isl, v, fopts));
          WannierOptions wopts;
          wopts.window = 10;
          WannierSet ws = wannier_functions(frame, wopts);
          DecaySummary decay = decay_profile(ws);
          require(notes, decay.alpha_min > 0 && decay.r2_min >= 0.98,
                  "decay fit r2 " + std::to_string(decay.r2_min));
          ProjectOptions popts;
          popts.torus_side = 32;
          ProjectionKernel direct = project_island_kernel(half, isl, v, 6, popts);
          PatchKernel rec = reconstruct_kernel(ws, 6);
          const double rec_err = (rec.K - direct.K).cwiseAbs().maxCoeff();
          require(notes, rec_err <= 1e-4, "reconstruction error " + std::to_string(rec_err));
          notes << " reconstruction=" << fmt(rec_err) << " r2=" << fmt(decay.r2_min);

          // obstruction branch: every Chern island of the q <= 8 table refuses
          FrameGridOptions topts;
          topts.kgrid1 = topts.kgrid2 = 16;
          topts.threads = cfg.resolved_threads();
          int obstructed = 0;
          for (const RationalFlux& flux : farey_fluxes(8)) {
            if (flux.q < 2) continue;
            BandStructure bs = band_structure(flux, {}, Backend::Lattice, {});
            for (const auto& island : detect_islands(bs, 1e-3)) {
              ChernEstimate c = chern_kspace(flux, island, {}, Backend::Lattice, topts);
              if (c.rounded == 0) continue;
              bool threw = false;
              try {
                smooth_frame(bfz_fibers(flux, island, {}, topts));
              } catch (const std::runtime_error&) {
                threw = true;
              }
              require(notes, threw,
                      "no obstruction for Chern island at " + flux.phi().str());
              ++obstructed;
            }
          }
          notes << "; " << obstructed << " Chern islands obstructed";
        });

  if (h.failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", h.failures);
  return 1;
}
