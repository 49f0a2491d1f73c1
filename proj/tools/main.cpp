// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

// tvelim: run queries on plated factor graph model files.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tvelim/adjoint.hpp"
#include "tvelim/einsum.hpp"
#include "tvelim/engine.hpp"
#include "tvelim/error.hpp"
#include "tvelim/model_io.hpp"
#include "tvelim/models.hpp"
#include "tvelim/oracle.hpp"
#include "tvelim/parallel.hpp"

namespace {

using nlohmann::json;
using namespace tvelim;

constexpr int kUsage = 1;
constexpr int kIntractable = 2;
constexpr int kNumeric = 3;

struct Common {
  std::string model;
  std::string semiring;
  std::size_t threads = 1;
  bool oracle = false;
};

std::optional<Semiring> chosen(const Common& c) {
  if (c.semiring.empty()) return std::nullopt;
  return Semiring::from_name(c.semiring);
}

EngineOptions engine_options(const Common& c) {
  EngineOptions o;
  o.threads = c.threads;
  return o;
}

std::string scalar_text(double v, const Semiring& s) {
  const auto text = json(v).dump();
  return s.log_space() ? "log=" + text : text;
}

void add_common(CLI::App* cmd, Common& c, bool needs_model = true) {
  if (needs_model) cmd->add_option("MODEL", c.model, "Model file (JSON)")->required();
  cmd->add_option("--semiring", c.semiring, "real, log, maxprod or maxsum")
      ->check(CLI::IsMember({"real", "log", "maxprod", "maxsum"}));
  cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--oracle", c.oracle, "Answer by brute-force enumeration")->group("");
}

int contract_cmd(const Common& c) {
  const auto m = load_model(c.model, chosen(c));
  const double v = c.oracle ? oracle::brute_plated_sum_product(m.graph, m.semiring)
                            : tensor_variable_elimination(m.graph, m.semiring, engine_options(c)).value.item();
  std::cout << scalar_text(v, m.semiring) << '\n';
  return 0;
}

int marginals_cmd(const Common& c) {
  const auto m = load_model(c.model, chosen(c).value_or(Semiring::log()));
  json out;
  out["semiring"] = std::string(m.semiring.name());
  if (c.oracle) {
    out["marginals"] = to_json(oracle::brute_marginals(m.graph, m.semiring), m.semiring);
    out["partition"] = oracle::brute_plated_sum_product(m.graph, m.semiring);
  } else {
    const auto r = marginals(m.graph, m.semiring, true, engine_options(c));
    out["marginals"] = to_json(r.marginals, m.semiring);
    out["partition"] = r.partition;
  }
  std::cout << out.dump() << '\n';
  return 0;
}

int map_cmd(const Common& c) {
  auto s = chosen(c);
  if (!s) {
    const auto file = load_model(c.model);
    s = file.semiring.log_space() ? Semiring::max_sum() : Semiring::max_product();
  }
  const auto m = load_model(c.model, s);
  const auto a = c.oracle ? oracle::brute_map(m.graph, m.semiring) : map_assignment(m.graph, m.semiring, engine_options(c));
  json out;
  out["semiring"] = std::string(m.semiring.name());
  out["assignment"] = to_json(a);
  out["score"] = a.score;
  std::cout << out.dump() << '\n';
  return 0;
}

int sample_cmd(const Common& c, std::uint64_t seed, std::size_t n) {
  const auto m = load_model(c.model, chosen(c).value_or(Semiring::log()));
  json out = json::array();
  for (const auto& a : sample(m.graph, m.semiring, seed, n, engine_options(c))) {
    out.push_back({{"assignment", to_json(a)}, {"score", a.score}});
  }
  std::cout << out.dump() << '\n';
  return 0;
}

int check_cmd(const Common& c) {
  const auto m = load_model(c.model);
  const auto d = dry_run(m.graph);
  if (d.tractable()) {
    std::cout << "tractable\n" << d.schedule.trace() << "op_count=" << d.schedule.op_count << '\n';
    return 0;
  }
  std::cout << "intractable\n" << d.intractable->to_string() << '\n';
  if (const auto w = detect_forbidden_minor(m.graph)) std::cout << "witness " << w->to_string() << '\n';
  return kIntractable;
}

DenseArray load_operand(const std::string& path) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".ten") return read_ten(path);
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  try {
    return from_nested(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Validation, "'" + path + "': " + e.what());
  }
}

int einsum_cmd(const Common& c, const std::string& spec_text, const std::string& plates,
               const std::vector<std::string>& files) {
  const auto spec = parse_einsum(spec_text, plates);
  std::vector<DenseArray> operands;
  for (const auto& f : files) operands.push_back(load_operand(f));
  const auto s = chosen(c).value_or(Semiring::real());
  std::optional<ThreadPool> pool;
  if (c.threads > 1) pool.emplace(c.threads);
  const auto result = plated_einsum(spec, operands, s, pool ? &*pool : nullptr);
  json out;
  out["output"] = spec.output;
  out["semiring"] = std::string(s.name());
  out["values"] = to_nested(to_output_order(spec, result));
  std::cout << out.dump() << '\n';
  return 0;
}

int bench_cmd(const Common& c, const std::string& model, const std::vector<std::size_t>& sizes, std::size_t domain,
              bool assert_linear) {
  if (model != "benchmark" && model != "fig4") throw CLI::ValidationError("--model", "only 'benchmark' is available");
  const auto s = chosen(c).value_or(Semiring::log());
  std::cout << "size,op_count,wall_seconds\n";
  std::vector<std::pair<std::size_t, double>> counts;
  for (auto k : sizes) {
    const auto g = models::in_semiring(models::benchmark(domain, k, k, k), s);
    const auto start = std::chrono::steady_clock::now();
    const auto r = tensor_variable_elimination(g, s, engine_options(c));
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
    std::cout << k << ',' << r.schedule.op_count << ',' << wall.count() << '\n';
    counts.emplace_back(k, static_cast<double>(r.schedule.op_count));
  }
  if (!assert_linear) return 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i].first != 2 * counts[i - 1].first || counts[i - 1].first < 8) continue;
    const double ratio = counts[i].second / counts[i - 1].second;
    if (ratio < 3.4 || ratio > 4.6) {
      std::cerr << "op-count ratio " << ratio << " from size " << counts[i - 1].first << " to " << counts[i].first
                << " is outside [3.4, 4.6]\n";
      return kNumeric;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor variable elimination on plated factor graphs"};
  app.require_subcommand(1);

  Common common;
  auto* contract = app.add_subcommand("contract", "Plated sum-product of a model");
  add_common(contract, common);
  auto* marg = app.add_subcommand("marginals", "Marginals of every variable (log semiring unless --semiring)");
  add_common(marg, common);
  auto* map = app.add_subcommand("map", "Most probable assignment");
  add_common(map, common);

  auto* smp = app.add_subcommand("sample", "Joint samples (log semiring unless --semiring)");
  add_common(smp, common);
  std::uint64_t seed = 0;
  std::size_t n = 1;
  smp->add_option("--seed", seed, "Random seed");
  smp->add_option("--n", n, "Number of samples");

  auto* check = app.add_subcommand("check", "Tractability check with schedule or minor witness");
  check->add_option("MODEL", common.model, "Model file (JSON)")->required();

  auto* ein = app.add_subcommand("einsum", "Plated einsum over tensor files (.json nested arrays or .ten)");
  add_common(ein, common, false);
  std::string spec, plates;
  std::vector<std::string> tensors;
  ein->add_option("--spec", spec, "e.g. xy,iyz->xz")->required();
  ein->add_option("--plates", plates, "Plate symbols, e.g. i");
  ein->add_option("TENSORS", tensors, "One file per operand");

  auto* bench = app.add_subcommand("bench", "Scaling table for the benchmark model, as CSV");
  add_common(bench, common, false);
  std::string bench_model = "benchmark";
  std::vector<std::size_t> sizes = {2, 4, 8, 16};
  std::size_t domain = 32;
  bool assert_linear = false;
  bench->add_option("--model", bench_model, "Benchmark model: 'benchmark' (alias 'fig4')");
  bench->add_option("--sizes", sizes, "Plate sizes I=J")->delimiter(',');
  bench->add_option("--domain", domain, "Variable domain size");
  bench->add_flag("--assert-linear", assert_linear, "Fail unless op counts grow linearly in I*J");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  try {
    if (*contract) return contract_cmd(common);
    if (*marg) return marginals_cmd(common);
    if (*map) return map_cmd(common);
    if (*smp) return sample_cmd(common, seed, n);
    if (*check) return check_cmd(common);
    if (*ein) return einsum_cmd(common, spec, plates, tensors);
    if (*bench) return bench_cmd(common, bench_model, sizes, domain, assert_linear);
  } catch (const IntractableError& e) {
    std::cerr << "intractable: " << e.what() << '\n';
    if (!common.model.empty()) {
      if (const auto w = detect_forbidden_minor(load_model(common.model).graph)) std::cerr << "witness " << w->to_string() << '\n';
    }
    return kIntractable;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::Syntax || e.code() == ErrorCode::Io ? kUsage : kNumeric;
  }
  return kUsage;
}
