#pragma once

// Subcommand drivers. Each writes its files into out_dir and returns their
// paths; progress goes to `log`.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "qam/cli/config.hpp"
#include "qam/cli/formats.hpp"
#include "qam/experiments.hpp"

namespace qam::cli {

struct Context {
  std::string out_dir = ".";
  unsigned threads = 1;
  std::ostream* log = nullptr;

  std::string path(const std::string& name) const {
    return (std::filesystem::path(out_dir) / name).string();
  }
  void say(const std::string& s) const {
    if (log) *log << s << "\n";
  }
};

inline FileHeader header_for(const RunConfig& c) {
  FileHeader h;
  h.experiment = to_string(c.experiment);
  h.seed = c.seed;
  h.config = c.canonical;
  return h;
}

inline void ensure_dir(const std::string& d) {
  std::error_code ec;
  std::filesystem::create_directories(d, ec);
  if (ec) throw IoError("cannot create output directory '" + d + "': " + ec.message());
}

namespace detail {

struct Initial {
  qkp::Ensemble ensemble;
  bool single = true;
  std::optional<pseudo::PeriodicOrbit> orbit;
};

inline Initial make_initial(const InitialConfig& ic, const SystemParams& s, std::uint64_t seed) {
  Initial out;
  switch (ic.kind) {
    case InitialKind::plane_wave:
      out.ensemble = qkp::single(qkp::plane_wave(ic.n0, s.beta, qkp::Ladder::centered(ic.n0, ic.ladder_size)));
      break;
    case InitialKind::coherent:
    case InitialKind::band_packet: {
      double th = ic.vartheta0;
      std::optional<spinor::BandData> bd;
      if (ic.orbit || ic.kind == InitialKind::band_packet) bd = spinor::band_structure(s);
      if (ic.orbit) {
        out.orbit = experiments::launch_orbit(s, *bd, ic.band, (*ic.orbit)[0], (*ic.orbit)[1]);
        th = out.orbit->points.front().vartheta;
      }
      if (ic.kind == InitialKind::coherent)
        out.ensemble = qkp::single(qkp::coherent_state(s, th, ic.I0, s.beta, ic.ladder_size));
      else
        out.ensemble = qkp::single(spinor::band_coherent_state(*bd, ic.band, th, ic.N0,
                                                               qkp::coherent_sigma(s), s.beta, ic.ladder_size));
      break;
    }
    case InitialKind::gaussian_ensemble:
      out.single = false;
      out.ensemble = qkp::sample_gaussian_ensemble(
          ic.fwhm, ic.count, seed,
          ic.beta_policy == "fixed" ? qkp::BetaPolicy::fixed : qkp::BetaPolicy::fractional, ic.mean, s.beta,
          ic.ladder_size);
      break;
  }
  return out;
}

inline qkp::UniformAxis vartheta_axis(std::size_t n) {
  return {-kPi, kTwoPi / static_cast<double>(n), n};
}

inline qkp::UniformAxis I_axis(const HusimiGridConfig& h) {
  return {h.I_min, (h.I_max - h.I_min) / static_cast<double>(h.I_points - 1), h.I_points};
}

inline std::string pair_str(long a, long b) { return std::to_string(a) + "_" + std::to_string(b); }

}  // namespace detail

/// simulate and husimi: evolve, write histograms and/or Husimi grids at the
/// recorded kicks.
inline std::vector<std::string> run_simulate(const RunConfig& c, const Context& ctx) {
  const auto s = c.system.build();
  auto init = detail::make_initial(*c.initial, s, c.seed);
  const auto& members = init.ensemble.members;
  if (init.orbit)
    ctx.say("launch point vartheta=" + fmt_double(init.orbit->points.front().vartheta) +
            " J=" + fmt_double(init.orbit->points.front().J));

  std::vector<std::vector<qkp::RotorState>> snaps(members.size());
  parallel_for(members.size(), ctx.threads, [&](std::size_t i) {
    qkp::Recorder rec(c.record);
    qkp::evolve(members[i], c.kicks, s, &rec);
    snaps[i] = rec.snapshots();
  });
  std::vector<long> times = qkp::Recorder(c.record).schedule();

  std::vector<std::string> files;
  const FileHeader base = header_for(c);
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const long t = times[ti];
    qkp::Ensemble e;
    for (const auto& sn : snaps) e.members.push_back(sn.at(ti));
    e.weights = init.ensemble.weights;

    if (c.experiment == Experiment::simulate) {
      std::optional<qkp::MomentumRange> range;
      if (c.momentum_range) range = qkp::MomentumRange{(*c.momentum_range)[0], (*c.momentum_range)[1]};
      const auto h = qkp::momentum_distribution(e, s, c.bin_width, c.gauge, range);
      FileHeader fh = base;
      fh.extra = {{"kick", std::to_string(t)}, {"gauge", qkp::to_string(c.gauge)}};
      CsvWriter w(fh, {"momentum_lo", "momentum_hi", "probability"});
      for (std::size_t b = 0; b < h.bins(); ++b) w.row(std::vector<double>{h.edge(b), h.edge(b + 1), h.prob[b]});
      files.push_back(ctx.path("momentum_t" + std::to_string(t) + ".csv"));
      write_file(files.back(), w.str());
    }
    if (c.husimi) {
      const auto g = qkp::husimi(e.members.front(), detail::vartheta_axis(c.husimi->vartheta_points),
                                 detail::I_axis(*c.husimi), s);
      auto hj = base.to_json();
      hj["kick"] = t;
      hj["rows"] = "I";
      hj["cols"] = "vartheta";
      files.push_back(ctx.path("husimi_t" + std::to_string(t) + ".qgrid"));
      write_file(files.back(), encode_grid(g, hj));
      const auto [r, col] = qkp::argmax(g);
      ctx.say("t=" + std::to_string(t) + " husimi peak vartheta=" + fmt_double(g.x0 + g.dx * col) +
              " I=" + fmt_double(g.y0 + g.dy * r));
    }
    ctx.say("t=" + std::to_string(t) + " written");
  }
  return files;
}

inline std::vector<std::string> run_scan_tau(const RunConfig& c, const Context& ctx) {
  const auto s = c.system.build();
  const auto& ic = *c.initial;
  experiments::EnsembleSpec es;
  es.fwhm = ic.fwhm;
  es.count = ic.count;
  es.seed = c.seed;
  es.policy = ic.beta_policy == "fixed" ? qkp::BetaPolicy::fixed : qkp::BetaPolicy::fractional;
  es.mean = ic.mean;
  es.fixed_beta = s.beta;
  es.ladder_size = ic.ladder_size;
  const auto r = experiments::scan_tau(s, c.tau_grid, es, c.kicks, c.bin_width,
                                       {(*c.momentum_range)[0], (*c.momentum_range)[1]}, c.gauge, ctx.threads);
  std::vector<std::string> files;
  auto hj = header_for(c).to_json();
  hj["rows"] = "momentum";
  hj["cols"] = "tau_over_2pi";
  hj["kick"] = c.kicks;
  files.push_back(ctx.path("density.qgrid"));
  write_file(files.back(), encode_grid(r.density, hj));

  {
    CsvWriter w(header_for(c), {"column", "tau_over_2pi"});
    for (std::size_t i = 0; i < c.tau_grid.size(); ++i)
      w.row(std::vector<std::string>{std::to_string(i), fmt_double(c.tau_grid[i])});
    files.push_back(ctx.path("tau_points.csv"));
    write_file(files.back(), w.str());
  }
  if (!c.modes.empty()) {
    std::vector<spectro::Mode> modes;
    for (const auto& m : c.modes) modes.push_back({m[0], m[1], 0});
    const auto curves =
        spectro::mode_curves(c.tau_grid, s.p, s.q, modes, static_cast<double>(c.kicks), s.g);
    CsvWriter w(header_for(c), {"r", "s", "tau_over_2pi", "momentum"});
    for (std::size_t m = 0; m < modes.size(); ++m)
      for (const auto& pt : curves[m])
        w.row(std::vector<std::string>{std::to_string(modes[m].r), std::to_string(modes[m].s),
                                       fmt_double(pt.tau_over_2pi), fmt_double(pt.momentum)});
    files.push_back(ctx.path("curves.csv"));
    write_file(files.back(), w.str());
  }
  ctx.say("scanned " + std::to_string(c.tau_grid.size()) + " periods");
  return files;
}

inline std::vector<std::string> run_portrait(const RunConfig& c, const Context& ctx) {
  const auto s = c.system.build();
  const auto bd = spinor::band_structure(s);
  const auto mp = pseudo::make_map_params(s, bd, c.band);
  std::vector<pseudo::TorusPoint> seeds;
  for (const auto& p : c.seeds) seeds.push_back({p[0], p[1]});
  if (seeds.empty()) seeds = pseudo::seed_grid(c.seed_grid[0], c.seed_grid[1]);

  std::vector<std::vector<pseudo::PortraitPoint>> per(seeds.size());
  parallel_for(seeds.size(), ctx.threads, [&](std::size_t i) {
    per[i] = pseudo::phase_portrait(mp, {seeds[i]}, c.iterations);
    for (auto& p : per[i]) p.seed = i;
  });
  FileHeader fh = header_for(c);
  fh.extra = {{"band", std::to_string(c.band)}, {"varrho", fmt_double(mp.varrho)}};
  CsvWriter w(fh, {"seed", "iteration", "vartheta", "J"});
  for (const auto& v : per)
    for (const auto& p : v)
      w.row(std::vector<std::string>{std::to_string(p.seed), std::to_string(p.iter), fmt_double(p.vartheta),
                                     fmt_double(p.J)});
  std::vector<std::string> files{ctx.path("portrait.csv")};
  write_file(files.back(), w.str());

  if (!c.orbits.empty()) {
    CsvWriter o(fh, {"r", "s", "found", "point", "vartheta", "J", "trace", "residue", "stable", "acceleration"});
    for (const auto& rs : c.orbits) {
      const auto orb = pseudo::find_periodic_orbit(rs[0], rs[1], mp);
      const double a = pseudo::orbit_acceleration(rs[0], rs[1], s).a;
      if (!orb) {
        o.row(std::vector<std::string>{std::to_string(rs[0]), std::to_string(rs[1]), "0", "-1", "nan", "nan",
                                       "nan", "nan", "0", fmt_double(a)});
        ctx.say("(" + std::to_string(rs[0]) + "," + std::to_string(rs[1]) + ") orbit not found");
        continue;
      }
      for (std::size_t i = 0; i < orb->points.size(); ++i)
        o.row(std::vector<std::string>{std::to_string(rs[0]), std::to_string(rs[1]), "1", std::to_string(i),
                                       fmt_double(orb->points[i].vartheta), fmt_double(orb->points[i].J),
                                       fmt_double(orb->trace), fmt_double(orb->residue),
                                       orb->stable ? "1" : "0", fmt_double(a)});
      ctx.say("(" + std::to_string(rs[0]) + "," + std::to_string(rs[1]) + ") residue " + fmt_double(orb->residue));
    }
    files.push_back(ctx.path("orbits.csv"));
    write_file(files.back(), o.str());
  }
  return files;
}

inline std::vector<std::string> run_bands(const RunConfig& c, const Context& ctx) {
  const auto s = c.system.build();
  std::vector<spinor::BandData> all(c.k_values.size());
  spinor::BandOptions opt;
  opt.M = c.band_grid;
  parallel_for(all.size(), ctx.threads, [&](std::size_t i) {
    all[i] = spinor::band_structure(c.k_values[i], s.p, s.q, s.beta0, opt);
  });

  std::vector<std::string> files;
  FileHeader fh = header_for(c);
  CsvWriter pot(fh, {"k", "band", "winding", "width", "alpha", "gamma", "varsigma", "closed", "avoided_crossing"});
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& bd = all[i];
    std::vector<std::string> cols{"vartheta"};
    for (int j = 0; j < s.q; ++j) cols.push_back("omega_" + std::to_string(j));
    if (!bd.seam_permutation)
      for (int j = 0; j < s.q; ++j) cols.push_back("B_" + std::to_string(j));
    FileHeader h = fh;
    h.extra = {{"k", fmt_double(bd.k)}};
    CsvWriter w(h, cols);
    for (std::size_t m = 0; m < bd.M; ++m) {
      std::vector<double> row{bd.vartheta[m]};
      for (const auto& b : bd.bands) row.push_back(b.omega[m]);
      if (!bd.seam_permutation)
        for (const auto& b : bd.bands) row.push_back(b.pot.B[m]);
      w.row(row);
    }
    files.push_back(ctx.path("bands_" + std::to_string(i) + ".csv"));
    write_file(files.back(), w.str());

    for (int j = 0; j < s.q; ++j) {
      const auto& b = bd.bands[static_cast<std::size_t>(j)];
      const bool closed = !bd.seam_permutation;
      pot.row(std::vector<std::string>{fmt_double(bd.k), std::to_string(j), std::to_string(b.winding),
                                       fmt_double(spinor::band_width(bd, j)),
                                       closed ? fmt_double(b.pot.alpha) : "nan",
                                       closed ? fmt_double(b.pot.gamma) : "nan",
                                       closed ? fmt_double(b.pot.varsigma) : "nan", closed ? "1" : "0",
                                       b.avoided_crossing ? "1" : "0"});
    }
    ctx.say("k=" + fmt_double(bd.k) + (bd.seam_permutation ? " (bands permute at the seam)" : ""));
  }
  files.push_back(ctx.path("potentials.csv"));
  write_file(files.back(), pot.str());
  return files;
}

inline std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

inline std::vector<std::string> run_farey(const RunConfig& c, const Context& ctx) {
  FileHeader fh = header_for(c);
  CsvWriter w(fh, {"p", "q", "omega_star", "distance", "visible", "cf_anchor", "cf_sign", "cf_terms", "convergents"});
  for (const auto& pq : c.resonances) {
    const auto rec = spectro::resonance_visibility(static_cast<int>(pq[0]), static_cast<int>(pq[1]), c.system.g,
                                                   c.max_terms, c.threshold);
    std::vector<std::string> terms, conv;
    for (auto t : rec.cf.terms) terms.push_back(std::to_string(t));
    for (const auto& f : rec.convergents) conv.push_back(f.str());
    w.row(std::vector<std::string>{std::to_string(rec.p), std::to_string(rec.q), fmt_double(rec.omega_star),
                                   fmt_double(rec.distance), rec.visible ? "1" : "0",
                                   std::to_string(rec.cf.anchor), std::to_string(rec.cf.sign), join(terms, " "),
                                   join(conv, " ")});
    ctx.say(std::to_string(rec.p) + "/" + std::to_string(rec.q) + " Omega*=" + fmt_double(rec.omega_star) +
            (rec.visible ? " visible" : ""));
  }
  std::vector<std::string> files{ctx.path("resonances.csv")};
  write_file(files.back(), w.str());

  if (!c.mediants.empty()) {
    CsvWriter m(fh, {"a", "b", "step", "mediant", "value"});
    for (const auto& ab : c.mediants) {
      const spectro::Fraction a(ab[0][0], ab[0][1]), b(ab[1][0], ab[1][1]);
      const auto chain = spectro::mediant_chain(a, b, c.mediant_steps);
      for (std::size_t i = 0; i < chain.size(); ++i)
        m.row(std::vector<std::string>{a.str(), b.str(), std::to_string(i + 1), chain[i].str(),
                                       fmt_double(chain[i].value())});
    }
    files.push_back(ctx.path("mediants.csv"));
    write_file(files.back(), m.str());
  }
  return files;
}

inline std::vector<std::string> run_beta_scan(const RunConfig& c, const Context& ctx) {
  const auto s = c.system.build();
  experiments::BetaScanOptions opt;
  opt.band = c.band;
  opt.r = c.mode[0];
  opt.s = c.mode[1];
  opt.kicks = c.kicks;
  opt.box_width = c.box_width;
  opt.N0 = c.N0;
  opt.threads = ctx.threads;
  const auto r = experiments::beta_scan(s, c.beta_grid, opt);
  const auto pred = experiments::predicted_betas(s, c.band, c.N0, r.orbit.points.front().J, c.windings);

  FileHeader fh = header_for(c);
  fh.extra = {{"acceleration", fmt_double(r.acceleration)},
              {"box_center", fmt_double(r.box_center)},
              {"launch_vartheta", fmt_double(r.orbit.points.front().vartheta)},
              {"launch_J", fmt_double(r.orbit.points.front().J)}};
  CsvWriter w(fh, {"beta", "probability"});
  for (std::size_t i = 0; i < r.beta.size(); ++i) w.row(std::vector<double>{r.beta[i], r.probability[i]});
  std::vector<std::string> files{ctx.path("beta_scan.csv")};
  write_file(files.back(), w.str());

  CsvWriter p(fh, {"nu", "n", "beta"});
  for (const auto& b : pred)
    p.row(std::vector<std::string>{std::to_string(b.nu), std::to_string(b.n), fmt_double(b.beta)});
  files.push_back(ctx.path("predicted_beta.csv"));
  write_file(files.back(), p.str());

  const auto peaks = experiments::periodic_local_maxima(r.probability);
  for (std::size_t i = 0; i < std::min<std::size_t>(3, peaks.size()); ++i)
    ctx.say("peak beta=" + fmt_double(r.beta[peaks[i]]) + " P=" + fmt_double(r.probability[peaks[i]]));
  return files;
}

inline std::vector<std::string> run(const RunConfig& c, const Context& ctx) {
  ensure_dir(ctx.out_dir);
  switch (c.experiment) {
    case Experiment::simulate:
    case Experiment::husimi: return run_simulate(c, ctx);
    case Experiment::scan_tau: return run_scan_tau(c, ctx);
    case Experiment::portrait: return run_portrait(c, ctx);
    case Experiment::bands: return run_bands(c, ctx);
    case Experiment::farey: return run_farey(c, ctx);
    case Experiment::beta_scan: return run_beta_scan(c, ctx);
  }
  return {};
}

/// Exit codes of the command-line contract.
enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3, kIoError = 4 };

}  // namespace qam::cli
