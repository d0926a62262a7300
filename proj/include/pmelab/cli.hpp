#pragma once

#include <cmath>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pmelab/elliptic.hpp"
#include "pmelab/eigensolver.hpp"
#include "pmelab/io.hpp"
#include "pmelab/parallel.hpp"
#include "pmelab/profile.hpp"
#include "pmelab/simulator.hpp"
#include "pmelab/spectrum.hpp"

namespace pme::cli {

using nlohmann::ordered_json;

inline ordered_json params_json(const Parameters& p) {
  ordered_json j;
  j["m"] = p.m;
  j["dim"] = p.dim;
  j["alpha"] = p.alpha;
  return j;
}

inline CsvTable spectrum_csv(const std::vector<SpectrumEntry>& table) {
  CsvTable t;
  t.header = {"ell", "k", "lambda", "multiplicity", "degree"};
  for (const auto& e : table)
    t.rows.push_back({std::to_string(e.ell), std::to_string(e.k),
                      format_double(e.lambda), std::to_string(e.multiplicity),
                      std::to_string(e.degree)});
  return t;
}

inline ordered_json spectrum_json(const std::vector<SpectrumEntry>& table) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : table) {
    ordered_json j;
    j["ell"] = e.ell;
    j["k"] = e.k;
    j["lambda"] = e.lambda;
    j["multiplicity"] = e.multiplicity;
    j["degree"] = e.degree;
    arr.push_back(j);
  }
  return arr;
}

inline CsvTable comparison_csv(const SpectrumComparison& cmp) {
  CsvTable t;
  t.header = {"ell", "k", "lambda_closed", "lambda_numeric", "rel_error"};
  for (const auto& r : cmp.rows)
    t.rows.push_back({std::to_string(cmp.ell), std::to_string(r.k),
                      format_double(r.lambda_closed), format_double(r.lambda_numeric),
                      format_double(r.rel_error)});
  return t;
}

inline std::pair<int, int> parse_mode(const std::string& mode, int dim) {
  if (mode == "translation") {
    if (dim != 1)
      throw std::invalid_argument(
          "mode translation needs --dim 1 (non-radial modes are out of scope)");
    return {1, 0};
  }
  if (mode == "dilation") return {0, 1};
  if (mode.rfind("lk:", 0) == 0) {
    const auto comma = mode.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("mode lk:L,K needs two integers");
    const int l = std::stoi(mode.substr(3, comma - 3));
    const int k = std::stoi(mode.substr(comma + 1));
    return {l, k};
  }
  throw std::invalid_argument("unknown mode: " + mode);
}

/// Random polynomial with coefficients in [-1,1]; seeded, reproducible.
inline Polynomial random_polynomial(std::mt19937_64& rng, int max_degree) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> c(max_degree + 1);
  for (auto& v : c) v = unif(rng);
  return Polynomial(std::move(c));
}

/// Entry point used by the binary and by the tests. `argv` excludes the
/// program name. Exit codes: 0 ok, 1 validation/usage, 2 numerical or I/O.
inline int run_command(const std::vector<std::string>& argv, std::ostream& out,
                       std::ostream& err) {
  CLI::App app{"pmelab: spectrum of the confined porous-medium linearization"};
  app.require_subcommand(1);

  // ---- spectrum
  auto* sc_spec = app.add_subcommand("spectrum", "closed-form eigenvalue table");
  double m = 2.0;
  int dim = 1, lmax = 3, kmax = 3;
  std::string format = "csv", out_path;
  sc_spec->add_option("--m", m, "exponent m > 1")->required();
  sc_spec->add_option("--dim", dim, "space dimension N >= 1")->required();
  sc_spec->add_option("--lmax", lmax, "max spherical degree")->required();
  sc_spec->add_option("--kmax", kmax, "max radial index")->required();
  sc_spec->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  sc_spec->add_option("--out", out_path, "output path (default: stdout)");

  // ---- eigenfunction
  auto* sc_ef = app.add_subcommand("eigenfunction", "radial eigenfunction samples");
  int ell = 0, kk = 1, samples = 201;
  sc_ef->add_option("--m", m)->required();
  sc_ef->add_option("--dim", dim)->required();
  sc_ef->add_option("--l", ell)->required();
  sc_ef->add_option("--k", kk)->required();
  sc_ef->add_option("--samples", samples)->check(CLI::PositiveNumber);
  sc_ef->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  sc_ef->add_option("--out", out_path);

  // ---- verify-eigensolve
  auto* sc_ve = app.add_subcommand("verify-eigensolve",
                                   "closed form vs discretized spectrum");
  int elements = 128, degree = 3, count = 4;
  sc_ve->add_option("--m", m)->required();
  sc_ve->add_option("--dim", dim)->required();
  sc_ve->add_option("--l", ell)->required();
  sc_ve->add_option("--elements", elements)->required();
  sc_ve->add_option("--degree", degree)->required();
  sc_ve->add_option("--count", count)->required();
  sc_ve->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  sc_ve->add_option("--out", out_path);

  // ---- simulate
  auto* sc_sim = app.add_subcommand("simulate", "nonlinear mode-decay run");
  std::string mode = "translation", manifest_path;
  double amplitude = 0.05, tmax = 3.0, observe_every = 0.02, box = 1.5;
  int cells = 512;
  sc_sim->add_option("--m", m)->required();
  sc_sim->add_option("--dim", dim)->required();
  sc_sim->add_option("--mode", mode, "translation | dilation | lk:L,K")->required();
  sc_sim->add_option("--amplitude", amplitude, "displacement amplitude s")->required();
  sc_sim->add_option("--tmax", tmax)->required();
  sc_sim->add_option("--cells", cells)->check(CLI::PositiveNumber);
  sc_sim->add_option("--observe-every", observe_every)->check(CLI::PositiveNumber);
  sc_sim->add_option("--box", box)->check(CLI::PositiveNumber);
  double fit_floor = 0.0;
  sc_sim->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  sc_sim->add_option("--out", out_path);
  sc_sim->add_option("--manifest", manifest_path, "write run manifest JSON here");
  sc_sim->add_option("--fit-floor", fit_floor,
                     "scheme drift floor; points within 10x are excluded from the fit");

  // ---- check-hardy
  auto* sc_hardy = app.add_subcommand("check-hardy", "Hardy-Poincare ratio sweep");
  double pexp = 2.0;
  unsigned long long seed = 1;
  int nsamples = 100;
  sc_hardy->add_option("--m", m)->required();
  sc_hardy->add_option("--dim", dim)->required();
  sc_hardy->add_option("--p", pexp)->required();
  sc_hardy->add_option("--samples", nsamples)->check(CLI::PositiveNumber);
  sc_hardy->add_option("--seed", seed)->required();
  sc_hardy->add_option("--out", out_path);

  // ---- poisson
  auto* sc_poisson = app.add_subcommand("poisson", "manufactured-solution check");
  bool manufactured = false;
  sc_poisson->add_option("--m", m)->required();
  sc_poisson->add_option("--dim", dim)->required();
  sc_poisson->add_option("--l", ell)->required();
  sc_poisson->add_flag("--manufactured", manufactured,
                       "solve with a manufactured source and report the error");
  sc_poisson->add_option("--elements", elements)->check(CLI::PositiveNumber);
  sc_poisson->add_option("--degree", degree)->check(CLI::PositiveNumber);
  sc_poisson->add_option("--out", out_path);

  // ---- crossings
  auto* sc_cross = app.add_subcommand("crossings", "eigenvalue level crossing in m");
  int l1 = 3, k1 = 0, l2 = 0, k2 = 1;
  sc_cross->add_option("--dim", dim)->required();
  sc_cross->add_option("--l1", l1)->required();
  sc_cross->add_option("--k1", k1)->required();
  sc_cross->add_option("--l2", l2)->required();
  sc_cross->add_option("--k2", k2)->required();
  sc_cross->add_option("--out", out_path);

  std::vector<char*> cargs;
  std::vector<std::string> storage;
  storage.push_back("pme_lab");
  for (const auto& a : argv) storage.push_back(a);
  for (auto& s : storage) cargs.push_back(s.data());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (sc_spec->parsed()) {
      const Parameters p(m, dim);
      const auto table = spectrum_table(p, lmax, kmax);
      if (format == "csv")
        write_report(spectrum_csv(table).str(), out_path, out);
      else
        write_report(spectrum_json(table), out_path, out);
      return 0;
    }

    if (sc_ef->parsed()) {
      const Parameters p(m, dim);
      const Polynomial f = radial_eigenfunction(p, ell, kk);
      CsvTable t;
      t.header = {"r", "f", "delta_rho"};
      ordered_json arr = ordered_json::array();
      for (int i = 0; i < samples; ++i) {
        const double r = static_cast<double>(i) / (samples - 1);
        const double fv = f(r);
        const double dv = delta_rho_eigenfunction(p, ell, kk, r);
        if (format == "csv") {
          t.rows.push_back({format_double(r), format_double(fv), format_double(dv)});
        } else {
          ordered_json row;
          row["r"] = r;
          row["f"] = fv;
          row["delta_rho"] = dv;
          arr.push_back(row);
        }
      }
      if (format == "csv")
        write_report(t.str(), out_path, out);
      else {
        ordered_json j;
        j["params"] = params_json(p);
        j["ell"] = ell;
        j["k"] = kk;
        j["lambda"] = eigenvalue(p, ell, kk);
        j["samples"] = arr;
        write_report(j, out_path, out);
      }
      return 0;
    }

    if (sc_ve->parsed()) {
      const Parameters p(m, dim);
      const SpectrumComparison cmp = numerical_spectrum(p, ell, elements, degree, count);
      if (format == "csv") {
        write_report(comparison_csv(cmp).str(), out_path, out);
      } else {
        ordered_json j;
        j["params"] = params_json(p);
        j["ell"] = cmp.ell;
        j["elements"] = cmp.elements;
        j["degree"] = cmp.degree;
        j["converged"] = cmp.converged;
        j["max_rel_error"] = cmp.max_rel_error;
        j["refined_max_rel_error"] = cmp.refined_max_rel_error;
        ordered_json rows = ordered_json::array();
        for (const auto& r : cmp.rows) {
          ordered_json row;
          row["k"] = r.k;
          row["lambda_closed"] = r.lambda_closed;
          row["lambda_numeric"] = r.lambda_numeric;
          row["rel_error"] = r.rel_error;
          rows.push_back(row);
        }
        j["rows"] = rows;
        write_report(j, out_path, out);
      }
      return 0;
    }

    if (sc_sim->parsed()) {
      const Parameters p(m, dim);
      const auto [ml, mk] = parse_mode(mode, dim);
      SimState st = pushforward_init(p, ModeIndex{ml, mk, 1}, amplitude, cells, box);
      const double mass_start = total_mass(st);
      auto series = run(st, tmax, observe_every);

      ordered_json fitj;
      std::string status = "ok";
      try {
        std::vector<double> ts, ds;
        for (const auto& rec : series) {
          ts.push_back(rec.t_hat);
          ds.push_back(rec.d_w2);
        }
        const DecayFit fit = fit_decay_rate(ts, ds, FitOptions{0.2, fit_floor});
        fitj["rate"] = fit.rate;
        fitj["r_squared"] = fit.r_squared;
        fitj["window"] = {fit.window.first, fit.window.second};
        if (fit.r_squared < 0.5) status = "no decay (stationary)";
      } catch (const NumericalError&) {
        status = "no decay (stationary)";
      }
      fitj["status"] = status;

      ordered_json manifest;
      manifest["params"] = params_json(p);
      manifest["mode"] = mode;
      manifest["ell"] = ml;
      manifest["k"] = mk;
      manifest["amplitude"] = amplitude;
      manifest["grid"] = {{"cells", cells}, {"box", box}};
      manifest["tmax"] = tmax;
      manifest["observe_every"] = observe_every;
      manifest["dt_last"] = st.dt;
      manifest["steps"] = st.steps;
      manifest["mass_drift"] = std::abs(total_mass(st) - mass_start) /
                               std::max(mass_start, 1e-300);
      manifest["clipped_mass"] = st.clipped_mass;
      manifest["seed"] = 0;  // the scheme is deterministic
      manifest["fit"] = fitj;
      if (!manifest_path.empty()) write_report(manifest, manifest_path, err);

      CsvTable t;
      t.header = {"t_hat", "d_L1", "d_weightedL2", "d_W2"};
      ordered_json arr = ordered_json::array();
      for (const auto& rec : series) {
        if (format == "csv") {
          t.rows.push_back({format_double(rec.t_hat), format_double(rec.d_l1),
                            format_double(rec.d_wl2), format_double(rec.d_w2)});
        } else {
          ordered_json row;
          row["t_hat"] = rec.t_hat;
          row["d_L1"] = rec.d_l1;
          row["d_weightedL2"] = rec.d_wl2;
          row["d_W2"] = rec.d_w2;
          arr.push_back(row);
        }
      }
      if (format == "csv") {
        write_report(t.str(), out_path, out);
      } else {
        ordered_json j;
        j["manifest"] = manifest;
        j["series"] = arr;
        write_report(j, out_path, out);
      }
      if (status != "ok") err << "decay fit: " << status << "\n";
      return 0;
    }

    if (sc_hardy->parsed()) {
      const Parameters p(m, dim);
      if (!(pexp > 1.0) || !(pexp + p.m >= 3.0))
        throw std::invalid_argument("check-hardy: need p > 1 and p + m >= 3");
      std::mt19937_64 rng(seed);
      std::vector<Polynomial> polys;
      for (int i = 0; i < nsamples; ++i) polys.push_back(random_polynomial(rng, 8));
      std::vector<HardyReport> reports(nsamples);
      parallel_for(nsamples, [&](int i) {
        reports[i] = hardy_poincare_ratio(p, pexp, polys[i]);
      });
      double maxr = 0.0, minr = std::numeric_limits<double>::infinity();
      int worst = 0;
      bool finite = true;
      for (int i = 0; i < nsamples; ++i) {
        finite = finite && std::isfinite(reports[i].ratio);
        if (reports[i].ratio > maxr) {
          maxr = reports[i].ratio;
          worst = i;
        }
        minr = std::min(minr, reports[i].ratio);
      }
      ordered_json j;
      j["params"] = params_json(p);
      j["p"] = pexp;
      j["seed"] = seed;
      j["samples"] = nsamples;
      j["all_finite"] = finite;
      j["max_ratio"] = maxr;
      j["min_ratio"] = minr;
      j["worst"] = {{"lhs", reports[worst].lhs},
                    {"rhs", reports[worst].rhs},
                    {"ratio", reports[worst].ratio},
                    {"sample", worst}};
      write_report(j, out_path, out);
      return 0;
    }

    if (sc_poisson->parsed()) {
      const Parameters p(m, dim);
      if (!manufactured)
        throw std::invalid_argument("poisson: only --manufactured mode is provided");
      if (ell < 0 || (dim == 1 && ell > 1))
        throw std::invalid_argument("poisson: invalid ell for this dimension");
      // psi_exact = r^{ell+2} (1 - r^2): right parity for the sector,
      // vanishes at the origin, zero-mean image for ell=0.
      const int base = ell + 2;
      Polynomial psi_exact =
          Polynomial::monomial(base) - Polynomial::monomial(base + 2);
      const RadialField psi = poisson_solve(
          p, ell,
          [&](double r) { return apply_L_inverse_at(p, ell, psi_exact, r); },
          elements, degree);
      // compare in L2(rho_*^{2-m}) after matching constants for ell=0
      const DiscreteForms forms =
          assemble_forms(p, ell, RadialGrid::graded(elements, degree));
      Eigen::VectorXd diff(forms.dof_r.size());
      for (std::size_t i = 0; i < forms.dof_r.size(); ++i)
        diff(i) = psi.values[i + (ell >= 1 ? 1 : 0)] - psi_exact(forms.dof_r[i]);
      if (ell == 0) {
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(diff.size());
        diff.array() -= ones.dot(forms.B * diff) / ones.dot(forms.B * ones);
      }
      const double err_l2 = std::sqrt(diff.dot(forms.B * diff));
      ordered_json j;
      j["params"] = params_json(p);
      j["ell"] = ell;
      j["elements"] = elements;
      j["degree"] = degree;
      j["l2_error"] = err_l2;
      write_report(j, out_path, out);
      return 0;
    }

    if (sc_cross->parsed()) {
      if (dim < 1) throw std::invalid_argument("crossings: dim >= 1 required");
      const auto cm = level_crossing(dim, {l1, k1}, {l2, k2});
      ordered_json j;
      j["dim"] = dim;
      j["mode1"] = {l1, k1};
      j["mode2"] = {l2, k2};
      if (cm)
        j["crossing_m"] = *cm;
      else
        j["crossing_m"] = nullptr;
      write_report(j, out_path, out);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::overflow_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::ios_base::failure& e) {
    err << "i/o error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace pme::cli
