#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wfared/aak.hpp"
#include "wfared/errors.hpp"
#include "wfared/extensions.hpp"
#include "wfared/hankel.hpp"
#include "wfared/io.hpp"
#include "wfared/random.hpp"
#include "wfared/symbol.hpp"
#include "wfared/wfa.hpp"

namespace wfared::cli {

namespace {

using nlohmann::json;

struct CommonOpts {
  std::string input;
  std::string output;
  std::string report;
  Index states = 0;
  bool verify = true;
  std::string hankel_size = "auto";
  double tol_mult = 1e-9;
  double tol_circle = 1e-8;
  Index samples = 1000;
  std::uint64_t seed = 1;
  Index jobs = 1;
  Index k_stable = 0;
  Index k_unstable = 0;
  Index count = 50;
  bool random = false;
};

ReduceOptions make_reduce_options(const CommonOpts& o) {
  ReduceOptions opt;
  opt.verify = o.verify;
  opt.unimodular_samples = o.samples;
  opt.tol.multiplicity = o.tol_mult;
  opt.tol.circle = o.tol_circle;
  if (o.hankel_size != "auto") {
    try {
      opt.hankel_size = std::stol(o.hankel_size);
    } catch (...) {
      throw Error(ErrorCode::invalid_input,
                  "--hankel-size must be an integer or 'auto'");
    }
    if (opt.hankel_size <= 0)
      throw Error(ErrorCode::invalid_input, "--hankel-size must be positive");
  }
  return opt;
}

void emit_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::invalid_input, "cannot open output file: " + path);
  out << text;
}

json baseline_rows(const ReductionReport& rep) {
  json rows = json::array();
  rows.push_back({{"method", "aak"},
                  {"rank", rep.k},
                  {"spectral_error", rep.achieved_error},
                  {"is_hankel", true},
                  {"certified", rep.certified}});
  for (const auto& [name, err] : rep.baselines) {
    rows.push_back({{"method", name},
                    {"rank", rep.k},
                    {"spectral_error", err},
                    {"is_hankel", name != "svd_truncation"},
                    {"certified", false}});
  }
  return rows;
}

json report_json(const SvaWfa& sva, const ReductionReport& rep) {
  json j;
  j["input"]["n"] = sva.wfa.states();
  j["input"]["spectral_radius"] = spectral_radius(sva.wfa.A);
  j["input"]["singular_numbers"] =
      std::vector<double>(sva.singular_numbers.data(),
                          sva.singular_numbers.data() + sva.singular_numbers.size());
  json& r = j["reduction"];
  r["k"] = rep.k;
  r["r"] = rep.r;
  r["branch"] = to_string(rep.branch);
  r["sigma_k"] = rep.sigma_k;
  r["achieved_error"] = rep.achieved_error;
  r["tail_bound"] = rep.tail_bound;
  r["oracle_size"] = rep.oracle_size;
  r["verified"] = rep.verified;
  r["certified"] = rep.certified;
  r["l2_bound_check"] = rep.l2_bound_check;
  r["residuals"] = {{"lyapunov", rep.sva_residual},
                    {"allpass_a", rep.allpass_residuals.a},
                    {"allpass_b", rep.allpass_residuals.b},
                    {"allpass_c", rep.allpass_residuals.c},
                    {"unimodularity", rep.unimodularity_deviation}};
  j["baselines"] = baseline_rows(rep);
  j["warnings"] = rep.warnings;
  if (!rep.failures.empty()) j["failures"] = rep.failures;
  return j;
}

SvaWfa load_sva(const CommonOpts& o, const ReduceOptions& opt) {
  const Wfa w = read_wfa_json(o.input);
  return to_sva(minimize(w, opt.tol), opt.tol);
}

int cmd_eval(const CommonOpts& o, Index k) {
  const Wfa w = read_wfa_json(o.input);
  std::cout << json(evaluate(w, k)).dump() << "\n";
  return 0;
}

int cmd_minimize(const CommonOpts& o) {
  const Wfa w = read_wfa_json(o.input);
  const Wfa m = minimize(w);
  emit_text(o.output, emit_wfa_json(m, "minimized"));
  return 0;
}

int cmd_sva(const CommonOpts& o) {
  const ReduceOptions opt = make_reduce_options(o);
  const SvaWfa s = load_sva(o, opt);
  emit_text(o.output, emit_wfa_json(s.wfa, "singular value automaton"));
  if (!o.report.empty()) {
    json j;
    j["singular_numbers"] = std::vector<double>(
        s.singular_numbers.data(),
        s.singular_numbers.data() + s.singular_numbers.size());
    j["signs"] = std::vector<int>(s.sign_vector.data(),
                                  s.sign_vector.data() + s.sign_vector.size());
    j["gramian_residual"] = sva_residual(s);
    emit_text(o.report, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_singular_values(const CommonOpts& o) {
  const ReduceOptions opt = make_reduce_options(o);
  const SvaWfa s = load_sva(o, opt);
  const Vector d = hankel_singular_numbers(s);
  std::cout << json(std::vector<double>(d.data(), d.data() + d.size())).dump()
            << "\n";
  return 0;
}

int cmd_reduce(const CommonOpts& o) {
  const ReduceOptions opt = make_reduce_options(o);
  const SvaWfa s = load_sva(o, opt);
  if (o.states <= 0 || o.states >= s.wfa.states()) {
    throw Error(ErrorCode::invalid_input,
                "reduce: --states must satisfy 0 < k < n (n = " +
                    std::to_string(s.wfa.states()) + ")");
  }
  const ReductionReport rep = aak_reduce(s, o.states, opt);

  if (!o.output.empty())
    write_wfa_json(rep.reduced, o.output, "aak rank-" + std::to_string(rep.k));
  const json j = report_json(s, rep);
  if (!o.report.empty())
    emit_text(o.report, j.dump(2) + "\n");
  else if (o.output.empty())
    std::cout << j.dump(2) << "\n";

  if (rep.verified && !rep.certified) {
    json diag;
    diag["error"] = {{"code", "VerificationFailed"},
                     {"message", "certificates failed"},
                     {"failures", rep.failures}};
    std::cerr << diag.dump() << "\n";
    return 3;
  }
  return 0;
}

int cmd_reduce_general(const CommonOpts& o) {
  const ReduceOptions opt = make_reduce_options(o);
  const Wfa w = read_wfa_json(o.input);
  const GeneralReduceReport rep =
      reduce_general(w, o.k_stable, o.k_unstable, opt);

  if (!o.output.empty()) write_wfa_json(rep.reduced, o.output, "non-optimal");
  json j;
  j["non_optimal"] = rep.non_optimal;
  j["states"] = rep.reduced.states();
  j["coefficient_l2"] = rep.coefficient_l2;
  j["coefficient_max"] = rep.coefficient_max;
  j["horizon"] = rep.horizon;
  j["warnings"] = rep.warnings;
  auto part = [](const std::optional<ReductionReport>& r) -> json {
    if (!r) return nullptr;
    return {{"sigma_k", r->sigma_k},
            {"achieved_error", r->achieved_error},
            {"certified", r->certified},
            {"k", r->k}};
  };
  j["stable"] = part(rep.stable_report);
  j["unstable_reflected"] = part(rep.unstable_report);
  if (!o.report.empty())
    emit_text(o.report, j.dump(2) + "\n");
  else if (o.output.empty())
    std::cout << j.dump(2) << "\n";

  const bool bad = (rep.stable_report && rep.stable_report->verified &&
                    !rep.stable_report->certified) ||
                   (rep.unstable_report && rep.unstable_report->verified &&
                    !rep.unstable_report->certified);
  return bad ? 3 : 0;
}

int cmd_compare(const CommonOpts& o) {
  const ReduceOptions opt = make_reduce_options(o);
  const SvaWfa s = load_sva(o, opt);
  if (s.singular_numbers.size() == 0) {
    // Zero function: every method reproduces it exactly.
    json rows = json::array();
    for (const char* m : {"aak", "sva_truncation", "svd_truncation"}) {
      rows.push_back({{"method", m},
                      {"rank", o.states},
                      {"spectral_error", 0.0},
                      {"is_hankel", std::string(m) != "svd_truncation"},
                      {"certified", true}});
    }
    emit_text(o.report, rows.dump(2) + "\n");
    return 0;
  }
  if (o.states <= 0 || o.states >= s.wfa.states())
    throw Error(ErrorCode::invalid_input,
                "compare: --states must satisfy 0 < k < n");
  ReduceOptions vopt = opt;
  vopt.verify = true;
  vopt.force_verify = true;
  const ReductionReport rep = aak_reduce(s, o.states, vopt);
  const json rows = baseline_rows(rep);

  if (!o.output.empty()) {
    std::ostringstream csv;
    csv << "method,rank,spectral_error,is_hankel,certified\n";
    for (const auto& row : rows) {
      csv << row["method"].get<std::string>() << "," << row["rank"] << ","
          << json(row["spectral_error"]).dump() << ","
          << (row["is_hankel"].get<bool>() ? "true" : "false") << ","
          << (row["certified"].get<bool>() ? "true" : "false") << "\n";
    }
    emit_text(o.output, csv.str());
  }
  if (!o.report.empty())
    emit_text(o.report, rows.dump(2) + "\n");
  else if (o.output.empty())
    std::cout << rows.dump(2) << "\n";
  return 0;
}

int cmd_hankel(const CommonOpts& o) {
  const ReduceOptions opt = make_reduce_options(o);
  const Wfa w = read_wfa_json(o.input);
  Index N = opt.hankel_size;
  if (N <= 0) N = auto_hankel_size(w, 1e-8, 1024, nullptr, opt.tol);
  const TruncatedHankel th = truncated_hankel(w, N, opt.tol);

  std::ostringstream csv;
  csv.precision(17);
  for (Index i = 0; i < N; ++i) {
    for (Index j = 0; j < N; ++j) {
      csv << th.H(i, j);
      csv << (j + 1 < N ? ',' : '\n');
    }
  }
  emit_text(o.output, csv.str());

  if (!o.output.empty()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(th.H, Eigen::EigenvaluesOnly);
    Vector sv = es.eigenvalues().cwiseAbs();
    std::sort(sv.data(), sv.data() + sv.size(), std::greater<double>());
    json j;
    j["size"] = N;
    j["tail_bound"] = th.tail_bound;
    j["singular_values"] =
        std::vector<double>(sv.data(), sv.data() + std::min<Index>(sv.size(), 32));
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

struct CheckRecord {
  Index instance = 0;
  Index n = 0;
  Index k = 0;
  bool certified = false;
  double sigma_k = 0.0;
  double achieved = 0.0;
  std::vector<std::string> failures;
};

int cmd_check(const CommonOpts& o) {
  ReduceOptions opt = make_reduce_options(o);
  opt.verify = true;
  opt.force_verify = true;

  if (!o.random) {
    if (o.input.empty())
      throw Error(ErrorCode::invalid_input,
                  "check: provide --input or --random");
    const SvaWfa s = load_sva(o, opt);
    if (o.states <= 0 || o.states >= s.wfa.states())
      throw Error(ErrorCode::invalid_input,
                  "check: --states must satisfy 0 < k < n");
    const ReductionReport rep = aak_reduce(s, o.states, opt);
    auto line = [&](const char* name, bool ok, double value) {
      std::cout << (ok ? "PASS " : "FAIL ") << name << " = "
                << json(value).dump() << "\n";
    };
    const auto& c = opt.cert;
    line("optimality |achieved/sigma_k - 1|",
         std::abs(rep.achieved_error - rep.sigma_k) <=
             c.error_rel * rep.sigma_k,
         std::abs(rep.achieved_error / rep.sigma_k - 1.0));
    line("eckart_young_floor achieved - sigma_k",
         rep.achieved_error >= rep.sigma_k - c.floor_slack,
         rep.achieved_error - rep.sigma_k);
    line("allpass max residual", rep.allpass_residuals.max() <= c.allpass,
         rep.allpass_residuals.max());
    line("unimodularity deviation",
         rep.unimodularity_deviation <= c.unimodularity,
         rep.unimodularity_deviation);
    line("l2_bound sum - sigma_k^2",
         rep.l2_bound_check <= rep.sigma_k * rep.sigma_k + c.l2_slack,
         rep.l2_bound_check - rep.sigma_k * rep.sigma_k);
    if (!rep.baselines.empty())
      line("baseline_domination sva_truncation - achieved",
           rep.achieved_error <=
               rep.baselines.at("sva_truncation") + c.baseline_slack,
           rep.baselines.at("sva_truncation") - rep.achieved_error);
    return rep.certified ? 0 : 3;
  }

  // Randomized property suite; deterministic for a fixed seed, instances
  // independent so --jobs parallelizes cleanly.
  const Index count = o.count;
  auto run_instance = [&](Index idx) {
    std::vector<CheckRecord> records;
    Rng rng(o.seed * 1000003 + static_cast<std::uint64_t>(idx));
    SvaGenOptions gen;
    gen.n = rng.uniform_index(2, 6);
    const SvaWfa s = random_sva(rng, gen);
    for (Index k = 1; k < s.wfa.states(); ++k) {
      CheckRecord rec;
      rec.instance = idx;
      rec.n = s.wfa.states();
      rec.k = k;
      try {
        const ReductionReport rep = aak_reduce(s, k, opt);
        rec.certified = rep.certified;
        rec.sigma_k = rep.sigma_k;
        rec.achieved = rep.achieved_error;
        rec.failures = rep.failures;
      } catch (const Error& e) {
        rec.certified = false;
        rec.failures.push_back(std::string(to_string(e.code())) + ": " +
                               e.what());
      }
      records.push_back(rec);
    }
    return records;
  };

  std::vector<std::vector<CheckRecord>> all(count);
  if (o.jobs > 1) {
    std::vector<std::future<std::vector<CheckRecord>>> futures;
    futures.reserve(count);
    for (Index i = 0; i < count; ++i)
      futures.push_back(std::async(std::launch::async, run_instance, i));
    for (Index i = 0; i < count; ++i) all[i] = futures[i].get();
  } else {
    for (Index i = 0; i < count; ++i) all[i] = run_instance(i);
  }

  Index reductions = 0;
  Index failed = 0;
  double worst = 0.0;
  json failures = json::array();
  for (const auto& recs : all) {
    for (const auto& rec : recs) {
      ++reductions;
      if (rec.sigma_k > 0.0)
        worst = std::max(worst, std::abs(rec.achieved / rec.sigma_k - 1.0));
      if (!rec.certified) {
        ++failed;
        failures.push_back({{"instance", rec.instance},
                            {"n", rec.n},
                            {"k", rec.k},
                            {"failures", rec.failures}});
      }
    }
  }
  json j;
  j["seed"] = o.seed;
  j["instances"] = count;
  j["reductions"] = reductions;
  j["failed"] = failed;
  j["max_relative_error_deviation"] = worst;
  j["failures"] = failures;
  std::cout << j.dump(2) << "\n";
  return failed == 0 ? 0 : 3;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{
      "Optimal spectral-norm reduction of weighted finite automata over a "
      "one-letter alphabet"};
  app.require_subcommand(1);

  CommonOpts o;
  Index eval_k = 0;

  auto add_io = [&](CLI::App* sub, bool needs_input = true) {
    auto* in = sub->add_option("--input", o.input, "WFA JSON file");
    if (needs_input) in->required();
    sub->add_option("--output", o.output, "result file (default: stdout)");
    sub->add_option("--report", o.report, "report JSON file");
    sub->add_option("--tol-mult", o.tol_mult,
                    "relative multiplicity grouping tolerance");
    sub->add_option("--tol-circle", o.tol_circle,
                    "unit-circle exclusion tolerance");
    sub->add_option("--hankel-size", o.hankel_size,
                    "oracle truncation size, integer or 'auto'");
    sub->add_option("--samples", o.samples, "circle samples");
  };

  auto* c_eval = app.add_subcommand("eval", "evaluate f(k)");
  add_io(c_eval);
  c_eval->add_option("--k", eval_k, "string length")->required();

  auto* c_min = app.add_subcommand("minimize", "minimal equivalent WFA");
  add_io(c_min);

  auto* c_sva = app.add_subcommand("sva", "singular value automaton form");
  add_io(c_sva);

  auto* c_sv =
      app.add_subcommand("singular-values", "Hankel singular numbers");
  add_io(c_sv);

  auto* c_red = app.add_subcommand("reduce", "optimal spectral-norm reduction");
  add_io(c_red);
  c_red->add_option("--states", o.states, "target state count")->required();
  c_red->add_flag("--verify,!--no-verify", o.verify,
                  "oracle verification (default on)");

  auto* c_gen = app.add_subcommand(
      "reduce-general", "split/reflect reduction for rho(A) > 1 inputs");
  add_io(c_gen);
  c_gen->add_option("--k-stable", o.k_stable, "rank of the stable part")
      ->required();
  c_gen->add_option("--k-unstable", o.k_unstable,
                    "rank of the reflected unstable part")
      ->required();
  c_gen->add_flag("--verify,!--no-verify", o.verify, "verify sub-reductions");

  auto* c_cmp =
      app.add_subcommand("compare", "AAK vs truncation baselines");
  add_io(c_cmp);
  c_cmp->add_option("--states", o.states, "target rank")->required();

  auto* c_chk = app.add_subcommand("check", "certificate bundle");
  add_io(c_chk, /*needs_input=*/false);
  c_chk->add_option("--states", o.states, "target rank (with --input)");
  c_chk->add_flag("--random", o.random, "randomized property suite");
  c_chk->add_option("--count", o.count, "random instance count");
  c_chk->add_option("--seed", o.seed, "random seed");
  c_chk->add_option("--jobs", o.jobs, "parallel workers");

  auto* c_hk = app.add_subcommand("hankel", "truncated Hankel section dump");
  add_io(c_hk);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(c_eval)) return cmd_eval(o, eval_k);
    if (app.got_subcommand(c_min)) return cmd_minimize(o);
    if (app.got_subcommand(c_sva)) return cmd_sva(o);
    if (app.got_subcommand(c_sv)) return cmd_singular_values(o);
    if (app.got_subcommand(c_red)) return cmd_reduce(o);
    if (app.got_subcommand(c_gen)) return cmd_reduce_general(o);
    if (app.got_subcommand(c_cmp)) return cmd_compare(o);
    if (app.got_subcommand(c_chk)) return cmd_check(o);
    if (app.got_subcommand(c_hk)) return cmd_hankel(o);
  } catch (const Error& e) {
    json diag;
    diag["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
    std::cerr << diag.dump() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    json diag;
    diag["error"] = {{"code", "Internal"}, {"message", e.what()}};
    std::cerr << diag.dump() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace wfared::cli
