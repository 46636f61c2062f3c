#pragma once

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "supersat/io.hpp"

namespace supersat::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitInvariant = 4;

namespace detail {

struct SetSpec {
  std::string set_path;
  std::string density;  // exact rational text
  bool full = false;
  i64 n = 0;
  std::string p_text;  // "", "auto", or a number
  u64 set_seed = 0;
};

struct BuiltSet {
  GroundSet set;
  json generator;  // enough to regenerate the set bit-identically
};

inline i64 resolve_prime(const SetSpec& spec, const InvariantEquation& eq) {
  if (spec.p_text == "auto") {
    if (spec.n < 2) throw config_error("--p auto requires --n");
    return choose_prime(spec.n, eq.a_sum()).p;
  }
  const i64 p = std::stoll(spec.p_text);
  if (!is_prime(p)) throw config_error("--p must be prime (or 'auto')");
  return p;
}

// Build S over F_p from a file, an exact density, or the full field.
inline BuiltSet build_field_set(const SetSpec& spec, const InvariantEquation& eq) {
  const i64 p = resolve_prime(spec, eq);
  json gen{{"p", p}};
  if (spec.n > 0) gen["n"] = spec.n;
  if (!spec.set_path.empty()) {
    const auto file = read_set_file(spec.set_path);
    gen["set_file"] = spec.set_path;
    return BuiltSet{GroundSet::prime_field(p, file.members), gen};
  }
  if (spec.full) {
    gen["generator"] = "full";
    return BuiltSet{GroundSet::full_field(p), gen};
  }
  if (spec.density.empty()) throw config_error("need --set, --density or --full-set");
  const Ratio eps = parse_ratio(spec.density);
  const i64 size = eps.ceil_mul(p);
  if (size > p) throw config_error("--density must be at most 1");
  gen["generator"] = "random";
  gen["density"] = spec.density;
  gen["set_seed"] = spec.set_seed;
  return BuiltSet{
      GroundSet::random_subset(GroundSet::Universe::kPrimeField, p, size, spec.set_seed),
      gen};
}

inline BuiltSet build_interval_set(const SetSpec& spec) {
  if (!spec.set_path.empty()) {
    const auto file = read_set_file(spec.set_path);
    i64 n = spec.n;
    if (n == 0 && file.declared_n) n = *file.declared_n;
    if (n == 0)
      for (const i64 v : file.members) n = std::max(n, v);
    if (n < 1) throw config_error("cannot infer n for interval set; pass --n");
    json gen{{"n", n}, {"set_file", spec.set_path}};
    return BuiltSet{GroundSet::interval(n, file.members), gen};
  }
  if (spec.n < 1) throw config_error("interval sets require --n");
  if (spec.full)
    return BuiltSet{GroundSet::full_interval(spec.n),
                    json{{"n", spec.n}, {"generator", "full"}}};
  if (spec.density.empty()) throw config_error("need --set, --density or --full-set");
  const Ratio eps = parse_ratio(spec.density);
  const i64 size = eps.ceil_mul(spec.n);
  if (size > spec.n) throw config_error("--density must be at most 1");
  json gen{{"n", spec.n},
           {"generator", "random"},
           {"density", spec.density},
           {"set_seed", spec.set_seed}};
  return BuiltSet{
      GroundSet::random_subset(GroundSet::Universe::kInterval, spec.n, size, spec.set_seed),
      gen};
}

inline std::vector<i64> parse_int_list(const std::string& text, char sep) {
  std::vector<i64> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.empty()) continue;
    out.push_back(std::stoll(item));
  }
  return out;
}

inline std::vector<LatticePoint> parse_points(const std::string& text) {
  std::vector<LatticePoint> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    out.push_back(parse_int_list(item, ','));
  }
  return out;
}

inline void emit(const json& report, const std::string& out_path, std::ostream& os) {
  if (out_path.empty())
    os << dump_report(report);
  else
    write_json_file(out_path, report);
}

}  // namespace detail

// The whole command surface; returns the process exit code.
inline int cli_main(int argc, const char* const* argv, std::ostream& os = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"supersat: counting, extremal and amplification experiments for "
               "invariant linear equations"};
  app.require_subcommand(1);

  int threads = 1;
  app.add_option("--threads", threads, "worker thread count")
      ->envname("SUPERSAT_THREADS");

  std::string eq_text, out_path, csv_path;
  detail::SetSpec spec;
  u64 seed = 0;

  auto add_common = [&](CLI::App* sub, bool with_set) {
    sub->add_option("--out", out_path, "write the JSON report here (default: stdout)");
    if (with_set) {
      sub->add_option("--set", spec.set_path, "set file (text or JSON)");
      sub->add_option("--density", spec.density, "generate a random set of this density");
      sub->add_flag("--full-set", spec.full, "use the entire universe");
      sub->add_option("--set-seed", spec.set_seed, "seed for set generation (default --seed)");
    }
  };

  // ---- count
  auto* count_cmd = app.add_subcommand("count", "count solutions inside a set");
  std::string mode = "distinct", engine = "auto";
  i64 sweep_steps = 0;
  count_cmd->add_option("--eq", eq_text, "equation, e.g. 1,1,-2")->required();
  count_cmd->add_option("--n", spec.n, "interval upper end (or ground size for --p auto)");
  count_cmd->add_option("--p", spec.p_text, "prime modulus or 'auto' for a field universe");
  count_cmd->add_option("--mode", mode, "distinct | all | all-naive")
      ->check(CLI::IsMember({"distinct", "all", "all-naive"}));
  count_cmd->add_option("--engine", engine, "auto | naive | conv")
      ->check(CLI::IsMember({"auto", "naive", "conv"}));
  count_cmd->add_option("--seed", seed, "seed for --density generation");
  count_cmd->add_option("--csv", csv_path, "write a density/count sweep CSV");
  count_cmd->add_option("--sweep", sweep_steps, "number of density steps for --csv");
  add_common(count_cmd, true);

  // ---- extremal
  auto* ext_cmd = app.add_subcommand("extremal", "max-free / threshold / min-count search");
  i64 ext_n = 0, ext_m = -1, horizon = 0, budget = 1000000;
  std::string epsilon_text, ext_mode = "exact";
  bool exact_flag = false;
  i64 limit = kDefaultExhaustionLimit;
  ext_cmd->add_option("--eq", eq_text)->required();
  ext_cmd->add_option("--n", ext_n, "ground size");
  ext_cmd->add_flag("--exact", exact_flag, "exhaustive search (default)");
  ext_cmd->add_option("--m", ext_m, "target subset size (min-count search)");
  ext_cmd->add_option("--epsilon", epsilon_text, "density for a threshold scan");
  ext_cmd->add_option("--horizon", horizon, "largest n for the threshold scan");
  ext_cmd->add_option("--mode", ext_mode, "exact | anneal")
      ->check(CLI::IsMember({"exact", "anneal"}));
  ext_cmd->add_option("--budget", budget, "enumeration/iteration budget");
  ext_cmd->add_option("--seed", seed, "seed for annealing");
  ext_cmd->add_option("--limit", limit, "exhaustion limit for exact search");
  ext_cmd->add_option("--csv", csv_path, "write the max-free table as CSV");
  add_common(ext_cmd, false);

  // ---- sphere
  auto* sphere_cmd = app.add_subcommand("sphere", "best sphere slice of [t]^d");
  i64 sp_t = 0, sp_d = 0, geo_budget = kDefaultGeometryBudget;
  sphere_cmd->add_option("--t", sp_t)->required();
  sphere_cmd->add_option("--d", sp_d)->required();
  sphere_cmd->add_option("--budget", geo_budget, "point enumeration budget");
  add_common(sphere_cmd, false);

  // ---- behrend
  auto* beh_cmd = app.add_subcommand("behrend", "3-AP-free subset of [n]");
  i64 beh_n = 0, beh_t = 0, beh_d = 0;
  bool beh_sweep = false;
  std::string set_out;
  beh_cmd->add_option("--n", beh_n)->required();
  beh_cmd->add_option("--t", beh_t, "override box side");
  beh_cmd->add_option("--d", beh_d, "override dimension");
  beh_cmd->add_flag("--sweep", beh_sweep, "search all fitting (t,d)");
  beh_cmd->add_option("--set-out", set_out, "also write the set as a text file");
  add_common(beh_cmd, false);

  // ---- encode-check
  auto* enc_cmd = app.add_subcommand("encode-check", "no-carry lemma property sweep");
  i64 enc_samples = 10000, enc_tmax = 5, enc_dmax = 4;
  enc_cmd->add_option("--eq", eq_text, "fixed equation (default: random per sample)");
  enc_cmd->add_option("--samples", enc_samples);
  enc_cmd->add_option("--seed", seed)->required();
  enc_cmd->add_option("--t-max", enc_tmax);
  enc_cmd->add_option("--d-max", enc_dmax);
  add_common(enc_cmd, false);

  // ---- varnavides
  auto* var_cmd = app.add_subcommand("varnavides", "3-variable affine amplification");
  i64 var_r = 0, var_trials = 10000;
  bool var_full = false, auto_r = false;
  i64 var_horizon = 30;
  var_cmd->add_option("--eq", eq_text)->required();
  var_cmd->add_option("--n", spec.n, "ground size for --p auto");
  var_cmd->add_option("--p", spec.p_text, "prime modulus or 'auto'")->required();
  var_cmd->add_option("--r", var_r, "interval length R (certified externally)");
  var_cmd->add_flag("--auto-r", auto_r, "derive R from a threshold scan at density eps/2");
  var_cmd->add_option("--horizon", var_horizon, "horizon for --auto-r");
  var_cmd->add_option("--trials", var_trials);
  var_cmd->add_flag("--enumerate", var_full, "enumerate all p^2 samples");
  var_cmd->add_option("--seed", seed);
  add_common(var_cmd, true);

  // ---- amplify
  auto* amp_cmd = app.add_subcommand("amplify", "4-variable sphere-cap amplification");
  i64 amp_t = 0, amp_d = 0, amp_trials = 10000;
  double amp_c = 1.0;
  bool amp_full = false;
  amp_cmd->add_option("--eq", eq_text)->required();
  amp_cmd->add_option("--n", spec.n, "ground size for --p auto");
  amp_cmd->add_option("--p", spec.p_text, "prime modulus or 'auto'")->required();
  amp_cmd->add_option("--t", amp_t, "cap box side (override)");
  amp_cmd->add_option("--d", amp_d, "cap dimension (override)");
  amp_cmd->add_option("--C", amp_c, "sparseness exponent for the parameter formula");
  amp_cmd->add_option("--trials", amp_trials);
  amp_cmd->add_flag("--enumerate", amp_full, "enumerate all p^(d+1) samples");
  amp_cmd->add_option("--seed", seed);
  add_common(amp_cmd, true);

  // ---- fibercount
  auto* fib_cmd = app.add_subcommand("fibercount", "affine samples hitting three targets");
  std::string points_text, targets_text;
  i64 fc_p = 0, fc_d = 0;
  bool fc_check = false;
  fib_cmd->add_option("--points", points_text, "three points, e.g. 1,1;2,3;3,1")->required();
  fib_cmd->add_option("--targets", targets_text, "three residues, e.g. 2,4,5")->required();
  fib_cmd->add_option("--p", fc_p)->required();
  fib_cmd->add_option("--d", fc_d)->required();
  fib_cmd->add_flag("--check", fc_check, "cross-check by enumerating all p^(d+1) samples");
  add_common(fib_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, os, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (!spec.set_seed && seed) spec.set_seed = seed;

    if (*count_cmd) {
      const auto eq = InvariantEquation::parse_text(eq_text);
      const bool field = !spec.p_text.empty();
      const CountEngine ce = engine == "naive"
                                 ? CountEngine::kNaive
                                 : engine == "conv" ? CountEngine::kConvolution
                                                    : CountEngine::kAuto;
      auto built = field ? detail::build_field_set(spec, eq) : detail::build_interval_set(spec);
      i64 value = 0;
      if (mode == "distinct")
        value = count_distinct(eq, built.set, ce);
      else if (mode == "all")
        value = count_all(eq, built.set, ce);
      else
        value = count_all_naive(eq, built.set);
      os << value << "\n";

      json rep{{"command", "count"},
               {"equation", eq.text()},
               {"mode", mode},
               {"engine", engine},
               {"universe", field ? "prime_field" : "interval"},
               {"universe_size", built.set.universe_size()},
               {"set_size", built.set.count()},
               {"count", value},
               {"config", built.generator}};

      if (!csv_path.empty()) {
        if (sweep_steps < 1) throw config_error("--csv needs --sweep steps");
        std::ofstream csv(csv_path);
        if (!csv) throw config_error("cannot write csv: " + csv_path);
        csv << "density,set_size,count_all,count_distinct,normalized\n";
        const i64 u = built.set.universe_size();
        for (i64 step = 1; step <= sweep_steps; ++step) {
          const Ratio eps(step, sweep_steps);
          const i64 size = eps.ceil_mul(u);
          const GroundSet s = GroundSet::random_subset(built.set.universe(), u, size,
                                                       splitmix64(seed + static_cast<u64>(step)));
          const i64 all = count_all(eq, s, ce);
          const i64 dist = count_distinct(eq, s, ce);
          double norm = static_cast<double>(dist);
          for (int i = 0; i < eq.k() - 1; ++i) norm /= static_cast<double>(u);
          csv << eps.value() << "," << size << "," << all << "," << dist << "," << norm << "\n";
        }
        rep["csv"] = csv_path;
      }
      detail::emit(rep, out_path, os);
      return kExitOk;
    }

    if (*ext_cmd) {
      const auto eq = InvariantEquation::parse_text(eq_text);
      json rep{{"command", "extremal"}, {"equation", eq.text()}};
      if (!epsilon_text.empty()) {
        if (horizon < 1) throw config_error("threshold scan needs --horizon");
        const auto est = turan_threshold(eq, parse_ratio(epsilon_text), horizon, limit);
        rep["threshold"] = threshold_to_json(est);
        os << "r_hat=" << est.r_hat << " certified=" << (est.certified ? "true" : "false")
           << "\n";
        if (!csv_path.empty()) {
          std::ofstream csv(csv_path);
          if (!csv) throw config_error("cannot write csv: " + csv_path);
          csv << "n,max_free_size,threshold\n";
          for (i64 n = 1; n <= est.horizon; ++n)
            csv << n << "," << est.max_free_table[static_cast<std::size_t>(n)] << ","
                << est.epsilon.ceil_mul(n) << "\n";
          rep["csv"] = csv_path;
        }
      } else if (ext_m >= 0) {
        const auto est = min_solution_count(
            eq, ext_n, ext_m, ext_mode == "anneal" ? SearchMode::kAnneal : SearchMode::kExact,
            budget, seed);
        rep["min_count"] = min_count_to_json(est);
        rep["seed"] = seed;
        os << "min_count=" << est.min_count << (est.exact ? " (exact)" : " (upper bound)")
           << "\n";
      } else {
        if (ext_n < 1) throw config_error("max-free search needs --n");
        const auto rec = max_free_subset(eq, ext_n, limit);
        rep["max_free"] = extremal_to_json(rec);
        os << "max_free_size=" << rec.max_free_size << "\n";
      }
      detail::emit(rep, out_path, os);
      return kExitOk;
    }

    if (*sphere_cmd) {
      const SphereCap cap = sphere_cap(sp_t, sp_d, geo_budget);
      const bool ok = verify_no_three_collinear(cap.points);
      require(ok, "sphere slice contains three collinear points");
      json rep = sphere_cap_to_json(cap);
      rep["size"] = static_cast<i64>(cap.points.size());
      rep["no_three_collinear"] = ok;
      os << "r=" << cap.r << " size=" << cap.points.size() << "\n";
      detail::emit(rep, out_path, os);
      return kExitOk;
    }

    if (*beh_cmd) {
      BehrendOptions opts;
      if (beh_t > 0) opts.t = beh_t;
      if (beh_d > 0) opts.d = beh_d;
      opts.sweep = beh_sweep;
      const BehrendResult res = behrend_construct(beh_n, opts);
      json rep{{"command", "behrend"}, {"n", res.n},     {"t", res.t},
               {"d", res.d},           {"r", res.r},     {"size", res.cap_size},
               {"members", res.values}, {"ap_free", true}};
      os << "size=" << res.values.size() << "\n";
      if (!set_out.empty()) {
        write_set_file(set_out, res.values, "behrend n=" + std::to_string(res.n));
        rep["set_out"] = set_out;
      }
      detail::emit(rep, out_path, os);
      return kExitOk;
    }

    if (*enc_cmd) {
      Rng rng(splitmix64(seed));
      i64 counterexamples = 0, zero_cases = 0;
      const bool fixed_eq = !eq_text.empty();
      const auto fixed = fixed_eq ? std::optional<InvariantEquation>(
                                        InvariantEquation::parse_text(eq_text))
                                  : std::nullopt;
      for (i64 i = 0; i < enc_samples; ++i) {
        const i64 t = 2 + static_cast<i64>(rng.below(static_cast<u64>(enc_tmax - 1)));
        const i64 d = 2 + static_cast<i64>(rng.below(static_cast<u64>(enc_dmax - 1)));
        InvariantEquation eq = fixed ? *fixed : [&] {
          // random invariant equation with 4 variables
          for (;;) {
            std::vector<i64> c(4);
            i64 sum = 0;
            for (int j = 0; j < 3; ++j) {
              i64 v = 0;
              while (v == 0) v = static_cast<i64>(rng.below(9)) - 4;
              c[static_cast<std::size_t>(j)] = v;
              sum += v;
            }
            if (sum == 0) continue;
            c[3] = -sum;
            return InvariantEquation::parse(std::move(c));
          }
        }();
        std::vector<LatticePoint> pts(static_cast<std::size_t>(eq.k()));
        for (auto& pt : pts) {
          pt.resize(static_cast<std::size_t>(d));
          for (auto& c : pt) c = 1 + static_cast<i64>(rng.below(static_cast<u64>(t)));
        }
        bool coord_zero = true;
        for (i64 c = 0; c < d && coord_zero; ++c) {
          i64 acc = 0;
          for (int j = 0; j < eq.k(); ++j)
            acc += eq.coeffs()[static_cast<std::size_t>(j)] *
                   pts[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
          coord_zero = acc == 0;
        }
        const bool encoded_zero = check_no_carry(eq, pts, t);
        if (encoded_zero != coord_zero) ++counterexamples;
        if (encoded_zero) ++zero_cases;
      }
      json rep{{"command", "encode-check"}, {"samples", enc_samples},
               {"seed", seed},              {"t_max", enc_tmax},
               {"d_max", enc_dmax},         {"counterexamples", counterexamples},
               {"zero_cases", zero_cases}};
      os << "counterexamples=" << counterexamples << "\n";
      detail::emit(rep, out_path, os);
      return kExitOk;
    }

    if (*var_cmd) {
      const auto eq = InvariantEquation::parse_text(eq_text);
      auto built = detail::build_field_set(spec, eq);
      i64 R = var_r;
      json r_info;
      if (auto_r) {
        const Ratio eps = built.set.density();
        const Ratio half(eps.num, checked_mul(eps.den, 2));
        const auto est = turan_threshold(eq, half, var_horizon);
        R = est.r_hat;
        r_info = threshold_to_json(est);
      }
      if (R < 3) throw config_error("varnavides needs --r >= 3 or --auto-r");
      auto rep = run_varnavides3(eq, built.set, R, var_trials, seed, var_full, threads);
      json j = report_to_json(rep);
      j["config"] = built.generator;
      j["config"]["r"] = R;
      if (!r_info.is_null()) j["threshold"] = r_info;
      os << "emitted=" << rep.solutions_emitted << " distinct=" << rep.distinct_solutions
         << " validity_failures=" << rep.validity_failures << "\n";
      detail::emit(j, out_path, os);
      return kExitOk;
    }

    if (*amp_cmd) {
      const auto eq = InvariantEquation::parse_text(eq_text);
      auto built = detail::build_field_set(spec, eq);
      const double eps_hint = built.set.density().value();
      AmplifierParams params;
      if (amp_t > 0 && amp_d > 0) {
        params = choose_parameters(eps_hint < 1.0 ? eps_hint : 0.5, amp_c, eq.a_sum(),
                                   std::make_pair(amp_t, amp_d));
      } else {
        if (!(eps_hint > 0.0) || !(eps_hint < 1.0))
          throw config_error("parameter formula needs density in (0,1); pass --t/--d");
        params = choose_parameters(eps_hint, amp_c, eq.a_sum());
      }
      params.trials = amp_trials;
      params.seed = seed;
      params.full_enum = amp_full;
      params.threads = threads;
      auto rep = run_amplifier4(eq, built.set, params);
      json j = report_to_json(rep);
      j["config"] = built.generator;
      j["config"]["t"] = params.t;
      j["config"]["d"] = params.d;
      j["config"]["C"] = params.C;
      j["eq2_upper_ok"] = params.validity.eq2_upper;
      j["eq2_lower_ok"] = params.validity.eq2_lower;
      j["cap_bound_chebyshev_ok"] = params.validity.chebyshev;
      os << "emitted=" << rep.solutions_emitted << " distinct=" << rep.distinct_solutions
         << " validity_failures=" << rep.validity_failures << "\n";
      detail::emit(j, out_path, os);
      return kExitOk;
    }

    if (*fib_cmd) {
      const auto pts = detail::parse_points(points_text);
      const auto targets = detail::parse_int_list(targets_text, ',');
      const auto fc = affine_fiber_count(pts, targets, fc_p, fc_d);
      json rep = fiber_count_to_json(fc, fc_p, fc_d);
      if (fc_check) {
        const u128 space = supersat::detail::pow_u128(fc_p, fc_d + 1);
        if (space > (u128{1} << 24)) throw budget_error("fibercount --check space too large");
        i64 brute = 0;
        for (u64 idx = 0; idx < static_cast<u64>(space); ++idx) {
          const auto b =
              supersat::detail::sample_digits(static_cast<i64>(idx), fc_p, fc_d + 1, true, 0);
          const AffineSample sample{b, fc_p};
          bool all = true;
          for (int i = 0; i < 3 && all; ++i)
            all = eval_affine(sample, pts[static_cast<std::size_t>(i)]) ==
                  mod_norm(targets[static_cast<std::size_t>(i)], fc_p);
          if (all) ++brute;
        }
        rep["enumerated_count"] = brute;
        require(!rep.contains("count") || rep["count"].get<i64>() == brute,
                "rank-based fiber count disagrees with enumeration");
      }
      os << "rank=" << fc.rank << " exponent=" << fc.exponent
         << " consistent=" << (fc.consistent ? "true" : "false") << "\n";
      detail::emit(rep, out_path, os);
      return kExitOk;
    }

    throw config_error("no subcommand selected");
  } catch (const config_error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const budget_error& e) {
    err << "budget refusal: " << e.what() << "\n";
    return kExitBudget;
  } catch (const invariant_error& e) {
    err << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

// Convenience wrapper for tests.
inline int cli_run(const std::vector<std::string>& args, std::ostream& os = std::cout,
                   std::ostream& err = std::cerr) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  static const char* prog = "supersat";
  argv.push_back(prog);
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data(), os, err);
}

}  // namespace supersat::cli
