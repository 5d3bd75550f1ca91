#pragma once

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dimlab/core.hpp"
#include "dimlab/generators.hpp"
#include "dimlab/io.hpp"
#include "dimlab/measure_dims.hpp"
#include "dimlab/set_dims.hpp"
#include "dimlab/verify.hpp"

namespace dimlab {

// exit codes: 0 success/all-pass, 1 verification failure, 2 usage error,
// 3 capacity/guard error
enum ExitCode { kOk = 0, kVerifyFail = 1, kUsage = 2, kCapacity = 3 };

namespace cli_detail {

struct GridArgs {
  double r_max = 0.25;
  double r_min = 0;
  int per_octave = 3;
  int window = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--rmax", r_max, "coarsest scale (default 0.25)");
    cmd->add_option("--rmin", r_min, "finest scale (default: 4x the fixture mesh)");
    cmd->add_option("--per-octave", per_octave, "scales per octave (default 3)");
    cmd->add_option("--window", window, "envelope window rows (default: auto)");
  }

  ScaleGrid build(double mesh) const {
    double lo = r_min;
    if (lo <= 0) lo = mesh > 0 ? 4 * mesh : r_max / 4096;
    if (lo >= r_max) lo = r_max / 16;
    return ScaleGrid::geometric(r_max, lo, per_octave);
  }
};

inline std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::istringstream in(csv);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::strtod(tok.c_str(), nullptr));
  }
  if (out.empty()) throw InputError("empty list: " + csv);
  return out;
}

inline std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  for (double v : parse_list(csv)) out.push_back(static_cast<int>(v));
  return out;
}

inline std::shared_ptr<PointCloud> require_points(const std::string& path) {
  if (!std::filesystem::exists(path)) throw InputError("no such file: " + path);
  return load_points(path);
}

inline DiscreteMeasure require_measure(const std::string& path) {
  if (!std::filesystem::exists(path)) throw InputError("no such file: " + path);
  return load_measure(path);
}

inline json grid_json(const ScaleGrid& g) {
  return {{"r_max", json_num(g.r_max)},
          {"r_min", json_num(g.r_min)},
          {"per_octave", g.per_octave},
          {"scales", g.scales.size()}};
}

}  // namespace cli_detail

/// The whole command surface; returns the process exit code. Machine output
/// goes to files or `out`; diagnostics go to `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"dimension spectra of finite metric samples and atomic measures"};
  app.require_subcommand(1);

  // ---- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a fixture");
  std::string gen_fixture;
  gen->add_option("fixture", gen_fixture,
                  "cantor | sequence | grid | bm | corner | inhomog")
      ->required();
  std::string gen_out;
  gen->add_option("-o,--output", gen_out, "output prefix")->required();
  int gen_depth = 10, gen_n = 10000, gen_count = 1001, gen_p = 2, gen_q = 3;
  int gen_kmax = 3;
  double gen_s = 1.0, gen_ratio = 0.25, gen_cond = 0.5;
  std::string gen_digits = "0,0;1,0;1,1";
  gen->add_option("--depth", gen_depth, "iteration depth");
  gen->add_option("--n", gen_n, "sequence length");
  gen->add_option("--count", gen_count, "grid point count");
  gen->add_option("--p", gen_p, "carpet horizontal base");
  gen->add_option("--q", gen_q, "carpet vertical base");
  gen->add_option("--digits", gen_digits, "carpet digits, e.g. 0,0;1,0;1,1");
  gen->add_option("--s", gen_s, "corner fixture target exponent in (0,2]");
  gen->add_option("--kmax", gen_kmax, "corner fixture component count");
  gen->add_option("--ratio", gen_ratio, "inhomog map contraction ratio");
  gen->add_option("--cond", gen_cond, "inhomog condensation point");

  // ---- dim ----------------------------------------------------------------
  auto* dim = app.add_subcommand("dim", "dimension estimates for a fixture");
  std::string dim_mode;
  dim->add_option("mode", dim_mode, "set | measure")->required();
  std::string dim_in, dim_measure, dim_out, dim_pointwise;
  dim->add_option("-i,--input", dim_in, "points file")->required();
  dim->add_option("--measure", dim_measure, "measure file (mode=measure)");
  dim->add_option("-o,--output", dim_out, "output JSON")->required();
  dim->add_option("--pointwise", dim_pointwise, "density pointwise CSV");
  cli_detail::GridArgs dim_grid;
  dim_grid.attach(dim);
  int dim_ratio_floor = 3;
  dim->add_option("--ratio-floor", dim_ratio_floor, "Assouad stratum span floor (octaves)");
  unsigned dim_seed = 0;
  bool dim_shuffle = false;
  dim->add_option("--seed", dim_seed, "seed for the shuffled-order variant");
  dim->add_flag("--shuffle-order", dim_shuffle, "use a seeded shuffled scan order");

  // ---- spectrum -----------------------------------------------------------
  auto* spectrum = app.add_subcommand("spectrum", "spectra over theta or q");
  std::string spec_kind;
  spectrum
      ->add_option("kind", spec_kind,
                   "assouad-set | assouad-measure | lower-set | lower-measure | lq")
      ->required();
  std::string spec_in, spec_measure, spec_out, spec_thetas, spec_qs;
  spectrum->add_option("-i,--input", spec_in, "points file")->required();
  spectrum->add_option("--measure", spec_measure, "measure file");
  spectrum->add_option("-o,--output", spec_out, "output JSON (CSV written beside)")
      ->required();
  spectrum->add_option("--thetas", spec_thetas, "comma list of theta values");
  spectrum->add_option("--qs", spec_qs, "comma list of q values");
  cli_detail::GridArgs spec_grid;
  spec_grid.attach(spectrum);

  // ---- witness ------------------------------------------------------------
  auto* witness = app.add_subcommand("witness", "ladder measure construction");
  std::string wit_in, wit_out, wit_klist;
  int wit_kmax = 0;
  witness->add_option("-i,--input", wit_in, "points file")->required();
  witness->add_option("-o,--output", wit_out, "output measure file")->required();
  witness->add_option("--kmax", wit_kmax, "full ladder 1..kmax");
  witness->add_option("--klist", wit_klist, "explicit comma list of levels");

  // ---- verify -------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "run the inequality suite");
  std::string ver_in, ver_measure, ver_out;
  verify->add_option("-i,--input", ver_in, "points file")->required();
  verify->add_option("--measure", ver_measure, "measure file");
  verify->add_option("-o,--output", ver_out, "output JSON");
  double ver_slack = 0.1;
  verify->add_option("--slack", ver_slack, "inequality slack (default 0.1)");
  cli_detail::GridArgs ver_grid;
  ver_grid.attach(verify);

  // ---- oracle -------------------------------------------------------------
  auto* oracle = app.add_subcommand("oracle", "exact small-instance oracles");
  auto* oracle_pack = oracle->add_subcommand("pack", "exact packing number");
  std::string orc_in;
  double orc_r = 0;
  int orc_cap = 20;
  oracle_pack->add_option("-i,--input", orc_in, "points file")->required();
  oracle_pack->add_option("--r", orc_r, "packing radius")->required();
  oracle_pack->add_option("--cap", orc_cap, "instance size cap (default 20)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (gen->parsed()) {
      std::shared_ptr<PointCloud> cloud;
      std::optional<DiscreteMeasure> mu;
      json targets;
      if (gen_fixture == "cantor") {
        cloud = cantor_cloud(gen_depth).cloud;
        mu = uniform_measure(cloud);
        targets["minkowski"] = json_num(std::log(2.0) / std::log(3.0));
      } else if (gen_fixture == "sequence") {
        FixturePair pair = sequence_fixture(gen_n);
        cloud = pair.cloud;
        mu = std::move(pair.measure);
        targets["set_minkowski_upper"] = json_num(0.5);
        targets["density"] = json_num(0.0);
        targets["frostman"] = json_num(0.0);
        targets["total_mass"] = json_num(mu->total_mass());
      } else if (gen_fixture == "grid") {
        cloud = grid_fixture(gen_count).cloud;
        mu = uniform_measure(cloud);
        targets["minkowski"] = json_num(1.0);
      } else if (gen_fixture == "bm") {
        BMCarpetSpec spec;
        spec.p = gen_p;
        spec.q = gen_q;
        std::istringstream in(gen_digits);
        std::string tok;
        while (std::getline(in, tok, ';')) {
          const auto comma = tok.find(',');
          if (comma == std::string::npos) throw InputError("bad digit pair: " + tok);
          spec.digits.push_back({std::atoi(tok.substr(0, comma).c_str()),
                                 std::atoi(tok.substr(comma + 1).c_str())});
        }
        BMResult bm = bedford_mcmullen_cloud(spec, gen_depth);
        cloud = bm.cloud;
        mu = uniform_measure(cloud);
        int cols = 0, nmax = 0;
        for (int c : bm.column_counts) {
          cols += c > 0;
          nmax = std::max(nmax, c);
        }
        const double n_digits = static_cast<double>(spec.digits.size());
        targets["minkowski"] =
            json_num(std::log(cols) / std::log(spec.p) +
                     std::log(n_digits / cols) / std::log(spec.q));
        targets["assouad"] = json_num(std::log(cols) / std::log(spec.p) +
                                      std::log(nmax) / std::log(spec.q));
        targets["uniform_fibers"] = bm.uniform_fibers;
        json ncols = json::array();
        for (int c : bm.column_counts) ncols.push_back(c);
        targets["column_counts"] = ncols;
      } else if (gen_fixture == "corner") {
        cloud = corner_fixture(gen_s, gen_kmax, gen_depth).cloud;
        mu = uniform_measure(cloud);
        targets["s"] = json_num(gen_s);
      } else if (gen_fixture == "inhomog") {
        IFSSpec spec;
        spec.dim = 1;
        spec.maps = {{gen_ratio, {}, {0.0}}, {gen_ratio, {}, {1.0 - gen_ratio}}};
        PointCloud cond({gen_cond}, 1, Metric::euclidean, {});
        cloud = inhomogeneous_cloud(spec, cond, gen_depth).cloud;
        mu = uniform_measure(cloud);
        targets["similitude_dimension"] =
            json_num(similitude_dimension({gen_ratio, gen_ratio}));
        targets["condensation_assouad"] = json_num(0.0);
      } else {
        throw InputError("unknown fixture: " + gen_fixture);
      }
      save_points(*cloud, gen_out + ".points");
      if (mu) save_measure(*mu, gen_out + ".measure");
      json side;
      side["fixture"] = {{"name", cloud->meta().name},
                         {"kind", cloud->meta().kind},
                         {"points", cloud->size()},
                         {"dim", cloud->dim()},
                         {"metric", metric_name(cloud->metric())}};
      side["meta"] = {{"scale_factor", json_num(cloud->meta().scale_factor)},
                      {"mesh", json_num(cloud->meta().mesh)},
                      {"dedup_eps", json_num(cloud->meta().dedup_eps)}};
      side["targets"] = targets;
      side["files"] = {{"points", gen_out + ".points"}};
      if (mu) side["files"]["measure"] = gen_out + ".measure";
      atomic_write(gen_out + ".json", side.dump(2) + "\n");
      return kOk;
    }

    if (dim->parsed()) {
      auto cloud = cli_detail::require_points(dim_in);
      const ScaleGrid grid = dim_grid.build(cloud->meta().mesh);
      json result;
      result["input"] = dim_in;
      result["grid"] = cli_detail::grid_json(grid);
      if (dim_mode == "set") {
        std::optional<std::vector<int>> order;
        if (dim_shuffle) {
          std::vector<int> perm(cloud->size());
          std::iota(perm.begin(), perm.end(), 0);
          std::mt19937 rng(dim_seed);
          std::shuffle(perm.begin(), perm.end(), rng);
          order = std::move(perm);
        }
        MinkowskiSetResult mink = order
            ? minkowski_dims_set_ordered(*cloud, grid, *order, dim_grid.window)
            : minkowski_dims_set(*cloud, grid, dim_grid.window);
        result["estimates"]["minkowski_upper"] = estimate_to_json(mink.upper);
        result["estimates"]["minkowski_lower"] = estimate_to_json(mink.lower);
        result["estimates"]["assouad"] =
            estimate_to_json(assouad_dim_set(*cloud, grid, dim_ratio_floor));
      } else if (dim_mode == "measure") {
        if (dim_measure.empty()) throw InputError("mode=measure needs --measure");
        const DiscreteMeasure mu = cli_detail::require_measure(dim_measure);
        const MinkowskiMeasureResult mink =
            minkowski_dims_measure(mu, grid, dim_grid.window);
        result["estimates"]["minkowski_upper"] = estimate_to_json(mink.upper);
        result["estimates"]["minkowski_lower"] = estimate_to_json(mink.lower);
        result["estimates"]["frostman"] =
            estimate_to_json(frostman_dim(mu, grid, dim_grid.window));
        const DensityResult density = density_dim(mu, grid, dim_grid.window);
        result["estimates"]["density"] = estimate_to_json(density.estimate);
        result["estimates"]["assouad"] =
            estimate_to_json(assouad_dim_measure(mu, grid, dim_ratio_floor));
        if (!dim_pointwise.empty()) {
          std::ostringstream csv;
          csv << "point_index";
          for (int k = 0; k < mu.host().dim(); ++k) csv << ",x" << k;
          csv << ",exponent\n";
          char buf[64];
          for (const auto& pw : density.pointwise) {
            csv << pw.point_index;
            auto p = mu.host().point(pw.point_index);
            for (double c : p) {
              std::snprintf(buf, sizeof buf, ",%.12g", c);
              csv << buf;
            }
            std::snprintf(buf, sizeof buf, ",%.12g\n", pw.exponent);
            csv << buf;
          }
          atomic_write(dim_pointwise, csv.str());
        }
      } else {
        throw InputError("dim mode must be set or measure");
      }
      atomic_write(dim_out, result.dump(2) + "\n");
      return kOk;
    }

    if (spectrum->parsed()) {
      auto cloud = cli_detail::require_points(spec_in);
      const ScaleGrid grid = spec_grid.build(cloud->meta().mesh);
      SpectrumCurve curve;
      curve.fixture = cloud->meta().name;
      const bool needs_measure = spec_kind == "assouad-measure" ||
                                 spec_kind == "lower-measure" || spec_kind == "lq";
      std::optional<DiscreteMeasure> mu;
      if (needs_measure) {
        if (spec_measure.empty()) throw InputError(spec_kind + " needs --measure");
        mu = cli_detail::require_measure(spec_measure);
      }
      if (spec_kind == "lq") {
        if (spec_qs.empty()) throw InputError("lq needs --qs");
        curve.quantity = Quantity::lq;
        for (double q : cli_detail::parse_list(spec_qs)) {
          curve.parameter.push_back(q);
          curve.estimates.push_back(
              lq_spectrum(*mu, q, grid, spec_grid.window).dim);
        }
      } else {
        if (spec_thetas.empty()) throw InputError(spec_kind + " needs --thetas");
        for (double theta : cli_detail::parse_list(spec_thetas)) {
          curve.parameter.push_back(theta);
          if (spec_kind == "assouad-set") {
            curve.quantity = Quantity::assouad_spectrum;
            curve.estimates.push_back(
                assouad_spectrum_set(*cloud, theta, grid, spec_grid.window));
          } else if (spec_kind == "assouad-measure") {
            curve.quantity = Quantity::assouad_spectrum;
            curve.estimates.push_back(
                assouad_spectrum_measure(*mu, theta, grid, spec_grid.window));
          } else if (spec_kind == "lower-set") {
            curve.quantity = Quantity::lower_spectrum;
            curve.estimates.push_back(
                lower_spectrum_set(*cloud, theta, grid, spec_grid.window));
          } else if (spec_kind == "lower-measure") {
            curve.quantity = Quantity::lower_spectrum;
            curve.estimates.push_back(
                lower_spectrum_measure(*mu, theta, grid, spec_grid.window));
          } else {
            throw InputError("unknown spectrum kind: " + spec_kind);
          }
        }
      }
      for (std::size_t i = 1; i < curve.parameter.size(); ++i)
        if (curve.parameter[i] <= curve.parameter[i - 1])
          throw InputError("parameter list must be strictly increasing");
      atomic_write(spec_out, spectrum_to_json(curve).dump(2) + "\n");
      std::filesystem::path csv_path(spec_out);
      csv_path.replace_extension(".csv");
      atomic_write(csv_path, spectrum_to_csv(curve));
      return kOk;
    }

    if (witness->parsed()) {
      auto cloud = cli_detail::require_points(wit_in);
      std::vector<int> klist;
      if (!wit_klist.empty()) {
        klist = cli_detail::parse_int_list(wit_klist);
      } else if (wit_kmax > 0) {
        for (int k = 1; k <= wit_kmax; ++k) klist.push_back(k);
      } else {
        throw InputError("witness needs --kmax or --klist");
      }
      const WitnessResult result = witness_measure(*cloud, klist);
      if (result.mesh_warning)
        err << "warning: ladder reaches below the fixture mesh\n";
      save_measure(result.measure, wit_out);
      return kOk;
    }

    if (verify->parsed()) {
      auto cloud = cli_detail::require_points(ver_in);
      std::optional<DiscreteMeasure> mu;
      if (!ver_measure.empty()) mu = cli_detail::require_measure(ver_measure);
      VerifyConfig config;
      config.slack = ver_slack;
      config.r_max = ver_grid.r_max;
      config.r_min = ver_grid.r_min;
      config.per_octave = ver_grid.per_octave;
      config.window = ver_grid.window;
      const VerifyReport report = verify_suite(cloud, mu, config);
      json j;
      j["fixture"] = report.fixture;
      j["mesh_warning"] = report.mesh_warning;
      json checks = json::array();
      for (const auto& c : report.checks)
        checks.push_back({{"name", c.name},
                          {"lhs", json_num(c.lhs)},
                          {"rhs", json_num(c.rhs)},
                          {"slack", json_num(c.slack)},
                          {"pass", c.pass}});
      j["checks"] = checks;
      json gaps;
      for (const auto& [k, v] : report.gap_metrics) gaps[k] = json_num(v);
      j["gap_metrics"] = gaps;
      j["failures"] = report.failures();
      if (!ver_out.empty()) atomic_write(ver_out, j.dump(2) + "\n");
      else out << j.dump(2) << "\n";
      if (!report.all_pass()) {
        err << report.failures() << " check(s) failed\n";
        return kVerifyFail;
      }
      return kOk;
    }

    if (oracle_pack->parsed()) {
      auto cloud = cli_detail::require_points(orc_in);
      out << exact_packing_number(*cloud, orc_r, orc_cap) << "\n";
      return kOk;
    }
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << "\n";
    return kCapacity;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const ContractViolation& e) {
    err << "contract violation: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  err << "usage error: no subcommand\n";
  return kUsage;
}

}  // namespace dimlab
