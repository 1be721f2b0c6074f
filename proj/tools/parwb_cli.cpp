// parwb: deterministic parallel-computing workbench CLI. Every subcommand
// writes one CSV table (fixed header, LF endings) to --out or stdout; netsim
// additionally prints a line-oriented transcript above its summary.
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "parwb/collectives.hpp"
#include "parwb/csvio.hpp"
#include "parwb/distapps.hpp"
#include "parwb/errors.hpp"
#include "parwb/kernels.hpp"
#include "parwb/netsim.hpp"
#include "parwb/perfcalc.hpp"
#include "parwb/pram.hpp"
#include "parwb/taskgraph.hpp"
#include "parwb/topology.hpp"

namespace {

using parwb::DomainError;
using parwb::require;
namespace csv = parwb::csv;

constexpr int kExitBadArgs = 1;
constexpr int kExitDomainError = 2;
constexpr int kExitDeadlock = 3;

// Plain key=value config file; '#' starts a comment, blank lines are skipped.
// Command-line flags override file values.
std::map<std::string, std::string> load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "config: cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      std::size_t b = s.find_first_not_of(" \t\r");
      std::size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    require(eq != std::string::npos, "config: expected key=value, got '" + line + "'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

// Records how to set each option from a config value so file values can fill
// in anything the command line left unset.
struct ConfigBindings {
  struct Binding {
    CLI::Option* opt = nullptr;
    std::function<void(const std::string&)> set;
  };
  // Keyed by subcommand: several subcommands reuse flag names like --n.
  std::map<const CLI::App*, std::map<std::string, Binding>> by_sub;
  std::string* config_path = nullptr;

  void apply(const CLI::App* sub) const {
    if (config_path == nullptr || config_path->empty()) return;
    auto sub_it = by_sub.find(sub);
    if (sub_it == by_sub.end()) return;
    std::map<std::string, std::string> kv = load_config(*config_path);
    for (const auto& [key, value] : kv) {
      auto it = sub_it->second.find(key);
      require(it != sub_it->second.end(), "config: unknown key '" + key + "'");
      if (it->second.opt->count() == 0) it->second.set(value);
    }
  }
};

std::int64_t parse_i64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    std::int64_t v = std::stoll(value, &used);
    require(used == value.size(), "config: bad integer for " + key);
    return v;
  } catch (const DomainError&) {
    throw;
  } catch (const std::exception&) {
    throw DomainError("config: bad integer for " + key);
  }
}

double parse_f64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    require(used == value.size(), "config: bad number for " + key);
    return v;
  } catch (const DomainError&) {
    throw;
  } catch (const std::exception&) {
    throw DomainError("config: bad number for " + key);
  }
}

void bind_i64(CLI::App* sub, ConfigBindings& cb, const std::string& flag, std::int64_t& var,
              const std::string& desc) {
  CLI::Option* opt = sub->add_option(flag, var, desc);
  std::string key = flag.substr(flag.find_first_not_of('-'));
  cb.by_sub[sub][key] = {opt, [&var, key](const std::string& v) { var = parse_i64(key, v); }};
}

void bind_f64(CLI::App* sub, ConfigBindings& cb, const std::string& flag, double& var,
              const std::string& desc) {
  CLI::Option* opt = sub->add_option(flag, var, desc);
  std::string key = flag.substr(flag.find_first_not_of('-'));
  cb.by_sub[sub][key] = {opt, [&var, key](const std::string& v) { var = parse_f64(key, v); }};
}

void bind_str(CLI::App* sub, ConfigBindings& cb, const std::string& flag, std::string& var,
              const std::string& desc) {
  CLI::Option* opt = sub->add_option(flag, var, desc);
  std::string key = flag.substr(flag.find_first_not_of('-'));
  cb.by_sub[sub][key] = {opt, [&var](const std::string& v) { var = v; }};
}

void bind_flag(CLI::App* sub, ConfigBindings& cb, const std::string& flag, bool& var,
               const std::string& desc) {
  CLI::Option* opt = sub->add_flag(flag, var, desc);
  std::string key = flag.substr(flag.find_first_not_of('-'));
  cb.by_sub[sub][key] = {opt, [&var, key](const std::string& v) {
                      require(v == "0" || v == "1" || v == "true" || v == "false",
                              "config: bad flag value for " + key);
                      var = v == "1" || v == "true";
                    }};
}

void bind_i64_list(CLI::App* sub, ConfigBindings& cb, const std::string& flag,
                   std::vector<std::int64_t>& var, const std::string& desc) {
  CLI::Option* opt = sub->add_option(flag, var, desc)->delimiter(',');
  std::string key = flag.substr(flag.find_first_not_of('-'));
  cb.by_sub[sub][key] = {opt, [&var, key](const std::string& v) {
                      var.clear();
                      std::stringstream ss(v);
                      std::string item;
                      while (std::getline(ss, item, ','))
                        var.push_back(parse_i64(key, item));
                    }};
}

// Common per-subcommand state: --seed/--out/--config plus the output buffer.
struct Common {
  std::int64_t seed = 1;
  std::string out_path;
  std::string config_path;
  ConfigBindings cfg;
  std::string out;

  void attach(CLI::App* sub) {
    bind_i64(sub, cfg, "--seed", seed, "Deterministic RNG seed");
    bind_str(sub, cfg, "--out", out_path, "Output file (default stdout)");
    sub->add_option("--config", config_path, "key=value config file; flags take precedence");
    cfg.config_path = &config_path;
  }

  void flush() const {
    if (out_path.empty()) {
      std::cout << out;
      return;
    }
    std::ofstream f(out_path, std::ios::binary);
    require(f.good(), "cannot open output file " + out_path);
    f << out;
  }
};

std::mt19937_64 rng_for(std::int64_t seed) { return std::mt19937_64(static_cast<std::uint64_t>(seed)); }

std::vector<std::int64_t> random_values(std::mt19937_64& rng, std::int64_t n, std::int64_t lo,
                                        std::int64_t hi) {
  std::uniform_int_distribution<std::int64_t> d(lo, hi);
  std::vector<std::int64_t> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// ---------------------------------------------------------------- analyze --

int run_analyze(Common& c, std::int64_t n, std::int64_t pmax, double C) {
  namespace pc = parwb::perfcalc;
  require(n >= 1, "analyze: n must be >= 1");
  require(pmax >= 1, "analyze: pmax must be >= 1");
  c.out += "model,n,p,time,speedup,efficiency\n";
  const std::pair<pc::TimeModel::Kind, const char*> kinds[] = {
      {pc::TimeModel::Kind::N_over_P_plus_1, "n_over_p_plus_1"},
      {pc::TimeModel::Kind::N_over_P_plus_logP, "n_over_p_plus_logp"},
      {pc::TimeModel::Kind::N_over_P_plus_logN, "n_over_p_plus_logn"},
      {pc::TimeModel::Kind::N_over_P_plus_P, "n_over_p_plus_p"},
  };
  for (const auto& [kind, name] : kinds) {
    pc::TimeModel model;
    model.kind = kind;
    model.leading_constant = C;
    double t1 = pc::model_time(model, n, 1);
    for (std::int64_t p = 1; p <= pmax; ++p) {
      double t = pc::model_time(model, n, p);
      pc::SpeedupEfficiency se = pc::speedup_efficiency(t1, t, p);
      c.out += csv::row({name, csv::num(n), csv::num(p), csv::num(t), csv::num(se.speedup),
                         csv::num(se.efficiency)});
    }
  }
  return 0;
}

// ------------------------------------------------------------------- pram --

int run_pram(Common& c, const std::string& algo, std::int64_t n, std::string variant_str) {
  namespace pr = parwb::pram;
  require(n >= 1, "pram: n must be >= 1");
  auto pick_variant = [&](pr::Variant fallback) {
    if (variant_str.empty()) return fallback;
    std::optional<pr::Variant> v = pr::variant_from_name(variant_str);
    require(v.has_value(), "pram: unknown variant " + variant_str);
    return *v;
  };
  std::mt19937_64 rng = rng_for(c.seed);
  c.out += "algo,n,variant,steps,ops,ok\n";
  pr::Variant variant = pr::Variant::CREW;
  pr::PramStats stats;
  bool ok = false;
  if (algo == "fastmax" || algo == "logmax" || algo == "loglogmax") {
    std::vector<pr::Word> a = random_values(rng, n, -999, 999);
    pr::MaxResult r;
    if (algo == "fastmax") {
      variant = pick_variant(pr::Variant::CRCW_Common);
      r = pr::fastmax(a, variant);
    } else if (algo == "logmax") {
      variant = pick_variant(pr::Variant::CREW);
      r = pr::logmax(a, variant);
    } else {
      variant = pick_variant(pr::Variant::CRCW_Common);
      r = pr::loglogmax(a, variant);
    }
    stats = r.stats;
    ok = r.max == *std::max_element(a.begin(), a.end());
  } else if (algo == "matmul") {
    variant = pick_variant(pr::Variant::CREW);
    pr::WordMatrix a{n, n, random_values(rng, n * n, -9, 9)};
    pr::WordMatrix b{n, n, random_values(rng, n * n, -9, 9)};
    pr::MatmulResult r = pr::pram_matmul(a, b, variant);
    stats = r.stats;
    ok = true;
    for (std::int64_t i = 0; i < n && ok; ++i)
      for (std::int64_t j = 0; j < n && ok; ++j) {
        pr::Word s = 0;
        for (std::int64_t k = 0; k < n; ++k) s += a.at(i, k) * b.at(k, j);
        ok = r.c.at(i, j) == s;
      }
  } else if (algo == "listrank") {
    variant = pick_variant(pr::Variant::CREW);
    std::vector<std::int64_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::int64_t> next(n);
    for (std::int64_t i = 0; i + 1 < n; ++i) next[order[i]] = order[i + 1];
    next[order[n - 1]] = order[n - 1];
    std::vector<pr::Word> values = random_values(rng, n, -9, 9);
    pr::ListRankResult r = pr::wyllie_list_rank(next, values, variant);
    stats = r.stats;
    ok = true;
    for (std::int64_t i = 0; i < n && ok; ++i) {
      std::int64_t hops = 0;
      pr::Word sum = values[i];
      std::int64_t at = i;
      while (next[at] != at) {
        at = next[at];
        sum += values[at];
        ++hops;
      }
      ok = r.dist[i] == hops && r.sums[i] == sum;
    }
  } else {
    throw DomainError("pram: unknown algo " + algo);
  }
  c.out += csv::row({algo, csv::num(n), pr::variant_name(variant), csv::num(stats.steps),
                     csv::num(stats.ops), csv::num(ok ? 1 : 0)});
  return 0;
}

// -------------------------------------------------------------------- dag --

parwb::taskgraph::TaskDag load_dag(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "dag: cannot open " + path);
  parwb::taskgraph::TaskDag dag;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string word;
    if (!(ss >> word)) continue;
    std::int64_t a = 0, b = 0;
    if (word == "task" && (ss >> a >> b)) {
      dag.tasks.push_back({a, b});
    } else if (word == "edge" && (ss >> a >> b)) {
      dag.edges.emplace_back(a, b);
    } else {
      throw DomainError("dag: bad line " + std::to_string(lineno) + " in " + path);
    }
  }
  return dag;
}

int run_dag(Common& c, const std::string& file, const std::vector<std::int64_t>& plist) {
  namespace tg = parwb::taskgraph;
  require(!plist.empty(), "dag: p list must be non-empty");
  tg::TaskDag dag = load_dag(file);
  tg::WorkSpan ws = tg::work_span(dag);
  c.out += "work,span,parallelism,p,makespan,bound\n";
  for (std::int64_t p : plist) {
    require(p >= 1, "dag: p must be >= 1");
    tg::Schedule sched = tg::greedy_schedule(dag, p);
    std::int64_t bound = ws.work / p + ws.span;
    c.out += csv::row({csv::num(ws.work), csv::num(ws.span), csv::num(ws.parallelism),
                       csv::num(p), csv::num(sched.makespan), csv::num(bound)});
  }
  return 0;
}

// ---------------------------------------------------------------- kernels --

int run_kernels(Common& c, const std::string& algo, std::int64_t n, std::int64_t p,
                const std::string& exec_str) {
  namespace k = parwb::kernels;
  require(n >= 1, "kernels: n must be >= 1");
  require(p >= 1, "kernels: p must be >= 1");
  require(exec_str == "serial" || exec_str == "omp", "kernels: exec must be serial or omp");
  k::Exec exec = exec_str == "omp" ? k::Exec::OpenMP : k::Exec::Serial;
  std::mt19937_64 rng = rng_for(c.seed);
  k::BinOp<std::int64_t> plus{[](const std::int64_t& a, const std::int64_t& b) { return a + b; },
                              0};
  k::InstrumentedRun run;
  bool ok = false;

  auto scan_case = [&](const k::ScanVariant& variant) {
    std::vector<std::int64_t> a = random_values(rng, n, -99, 99);
    k::ScanResult<std::int64_t> r = k::scan(variant, a, plus, true, exec);
    std::vector<std::int64_t> want(a.size());
    std::partial_sum(a.begin(), a.end(), want.begin());
    run = r.run;
    ok = r.values == want;
  };
  auto sorted_halves = [&] {
    std::vector<std::int64_t> v = random_values(rng, n, -999, 999);
    std::vector<std::int64_t> a(v.begin(), v.begin() + n / 2);
    std::vector<std::int64_t> b(v.begin() + n / 2, v.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return std::pair{a, b};
  };
  auto merge_case = [&](const k::MergeVariant& variant) {
    auto [a, b] = sorted_halves();
    k::MergeResult<std::int64_t> r = k::merge(variant, a, b, std::less<std::int64_t>{}, exec);
    std::vector<std::int64_t> want;
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(want));
    run = r.run;
    ok = r.values == want;
  };

  if (algo == "scan_seq") {
    scan_case(k::ScanVariant::sequential());
  } else if (algo == "scan_recursive") {
    scan_case(k::ScanVariant::recursive());
  } else if (algo == "scan_updown") {
    scan_case(k::ScanVariant::updown());
  } else if (algo == "scan_hs") {
    scan_case(k::ScanVariant::hillis_steele());
  } else if (algo == "scan_blocked") {
    scan_case(k::ScanVariant::blocked(p));
  } else if (algo == "scan_tradeoff") {
    scan_case(k::ScanVariant::optimal_tradeoff(p));
  } else if (algo == "merge_seq") {
    merge_case(k::MergeVariant::sequential());
  } else if (algo == "merge_corank") {
    merge_case(k::MergeVariant::corank(p));
  } else if (algo == "merge_rankblocks") {
    merge_case(k::MergeVariant::rank_blocks(p));
  } else if (algo == "bitonic") {
    auto [a, b] = sorted_halves();
    k::BitonicResult<std::int64_t> r = k::bitonic_merge(a, b, std::less<std::int64_t>{}, exec);
    std::vector<std::int64_t> want;
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(want));
    run = r.run;
    ok = r.values == want;
  } else if (algo == "partition") {
    std::vector<std::int64_t> a = random_values(rng, n, -999, 999);
    std::int64_t pivot = a[n / 2];
    k::PartitionResult<std::int64_t> r =
        k::parallel_partition(a, pivot, std::less<std::int64_t>{}, exec);
    run = r.run;
    ok = true;
    for (std::int64_t i = 0; i < n; ++i) {
      bool lt = r.values[i] < pivot, gt = r.values[i] > pivot;
      if (i < r.lt)
        ok = ok && lt;
      else if (i < r.lt + r.eq)
        ok = ok && !lt && !gt;
      else
        ok = ok && gt;
    }
    std::vector<std::int64_t> sa = a, sb = r.values;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    ok = ok && sa == sb;
  } else if (algo == "quicksort") {
    std::vector<std::int64_t> a = random_values(rng, n, -999, 999);
    k::SortResult<std::int64_t> r = k::quicksort(a, std::less<std::int64_t>{}, exec);
    std::vector<std::int64_t> want = a;
    std::sort(want.begin(), want.end());
    run = r.run;
    ok = r.values == want;
  } else if (algo == "sieve") {
    k::SieveResult r = k::prime_sieve(n, exec);
    std::vector<std::int64_t> want;
    for (std::int64_t x = 2; x < n; ++x) {
      bool prime = true;
      for (std::int64_t d = 2; d * d <= x; ++d)
        if (x % d == 0) {
          prime = false;
          break;
        }
      if (prime) want.push_back(x);
    }
    run = r.run;
    ok = r.primes == want;
  } else {
    throw DomainError("kernels: unknown algo " + algo);
  }
  c.out += "n,p,ops,depth,rounds,ok\n";
  c.out += csv::row({csv::num(n), csv::num(p), csv::num(run.ops), csv::num(run.depth),
                     csv::num(run.rounds), csv::num(ok ? 1 : 0)});
  return 0;
}

// ----------------------------------------------------------------- netsim --

parwb::net::Topology build_topology(const std::string& kind, std::int64_t p,
                                    const std::string& dims_str) {
  namespace net = parwb::net;
  auto parse_dims = [&]() -> std::vector<std::int64_t> {
    if (dims_str.empty()) {
      // Near-square factorization p = r x c with the largest divisor r <= sqrt(p).
      std::int64_t r = 1;
      for (std::int64_t d = 1; d * d <= p; ++d)
        if (p % d == 0) r = d;
      return {r, p / r};
    }
    std::vector<std::int64_t> dims;
    std::stringstream ss(dims_str);
    std::string item;
    while (std::getline(ss, item, 'x')) dims.push_back(parse_i64("dims", item));
    std::int64_t prod = 1;
    for (std::int64_t d : dims) prod *= d;
    require(prod == p, "netsim: dims product must equal p");
    return dims;
  };
  if (kind == "ring") return net::Topology::ring(p);
  if (kind == "full") return net::Topology::fully_connected(p);
  if (kind == "mesh") return net::Topology::mesh(parse_dims());
  if (kind == "torus") return net::Topology::torus(parse_dims());
  if (kind == "hypercube") {
    std::int64_t d = 0;
    while ((std::int64_t{1} << d) < p) ++d;
    require((std::int64_t{1} << d) == p, "netsim: hypercube needs p a power of two");
    return net::Topology::hypercube(d);
  }
  throw DomainError("netsim: unknown topology " + kind);
}

int run_netsim(Common& c, const std::string& scenario, const std::string& topo_kind,
               std::int64_t p, const std::string& dims, double alpha, double beta,
               std::int64_t eager, const std::string& switching, std::int64_t packet,
               std::int64_t m, std::int64_t ports) {
  namespace net = parwb::net;
  require(p >= 2, "netsim: p must be >= 2");
  require(m >= 1, "netsim: m must be >= 1");
  net::SimConfig cfg;
  cfg.topology = build_topology(topo_kind, p, dims);
  cfg.cost.alpha = alpha;
  cfg.cost.beta = beta;
  cfg.cost.packet = packet;
  cfg.eager_threshold = eager;
  if (switching == "direct")
    cfg.cost.switching = net::CostModel::Switching::Direct;
  else if (switching == "store_forward")
    cfg.cost.switching = net::CostModel::Switching::StoreAndForward;
  else if (switching == "pipelined")
    cfg.cost.switching = net::CostModel::Switching::Pipelined;
  else
    throw DomainError("netsim: unknown switching mode " + switching);
  require(ports >= 1, "netsim: ports must be >= 1");
  if (ports > 1) {
    cfg.cost.ports = net::CostModel::Ports::KPorted;
    cfg.cost.k = ports;
  }

  std::vector<net::ProcessFn> progs;
  if (scenario == "pingpong") {
    for (std::int64_t r = 0; r < p; ++r)
      progs.push_back([r, m](net::ProcCtx& ctx) {
        if (r == 0) {
          ctx.send(ctx.world(), 1, 0, m);
          ctx.recv(ctx.world(), 1, 1);
        } else if (r == 1) {
          ctx.recv(ctx.world(), 0, 0);
          ctx.send(ctx.world(), 0, 1, m);
        }
      });
  } else if (scenario == "ring_shift_unsafe") {
    for (std::int64_t r = 0; r < p; ++r)
      progs.push_back([r, p, m](net::ProcCtx& ctx) {
        ctx.send(ctx.world(), (r + 1) % p, 0, m);
        ctx.recv(ctx.world(), (r - 1 + p) % p, 0);
      });
  } else if (scenario == "ring_shift_sendrecv") {
    for (std::int64_t r = 0; r < p; ++r)
      progs.push_back([r, p, m](net::ProcCtx& ctx) {
        ctx.sendrecv(ctx.world(), (r + 1) % p, 0, m, {}, (r - 1 + p) % p, 0);
      });
  } else {
    throw DomainError("netsim: unknown scenario " + scenario);
  }

  net::SimResult res = net::sim_run(cfg, progs);
  for (const net::TranscriptEvent& ev : res.transcript) {
    const char* name = nullptr;
    switch (ev.kind) {
      case net::TranscriptEvent::Kind::Send: name = "send"; break;
      case net::TranscriptEvent::Kind::Recv: name = "recv"; break;
      case net::TranscriptEvent::Kind::Match: name = "match"; break;
      case net::TranscriptEvent::Kind::Deadlock: name = "deadlock"; break;
      default: break;
    }
    if (name == nullptr) continue;
    c.out += "t=" + csv::num(ev.t) + " ev=" + name + " src=" + csv::num(ev.src) +
             " dst=" + csv::num(ev.dst) + " tag=" + csv::num(ev.tag) + " m=" + csv::num(ev.m) +
             "\n";
  }
  c.out += "p,topology,total_time,rounds,deadlock\n";
  c.out += csv::row({csv::num(p), net::topology_name(cfg.topology), csv::num(res.total_time),
                     csv::num(net::dependent_rounds(res.transcript)),
                     csv::num(res.deadlock.has_value() ? 1 : 0)});
  for (const std::string& w : res.unmatched) std::cerr << "warning: " << w << "\n";
  if (res.deadlock.has_value()) {
    std::cerr << "deadlock: blocked ranks";
    for (std::int64_t r : res.deadlock->blocked) std::cerr << " " << r;
    std::cerr << "\n";
    for (auto [a, b] : res.deadlock->wait_for)
      std::cerr << "deadlock: " << a << " waits for " << b << "\n";
    return kExitDeadlock;
  }
  return 0;
}

// ------------------------------------------------------------------- coll --

int run_coll(Common& c, const std::string& kind, const std::string& alg, std::int64_t p,
             std::int64_t m, double alpha, double beta, std::int64_t root) {
  namespace net = parwb::net;
  namespace coll = parwb::coll;
  require(p >= 1, "coll: p must be >= 1");
  require(m >= 1, "coll: m must be >= 1");
  require(root >= 0 && root < p, "coll: root out of range");
  net::SimConfig cfg;
  cfg.topology = net::Topology::fully_connected(p);
  cfg.cost.alpha = alpha;
  cfg.cost.beta = beta;

  coll::BcastAlg balg = coll::BcastAlg::Binomial;
  coll::ScanAlg salg = coll::ScanAlg::Binomial;
  if (alg == "flat")
    balg = coll::BcastAlg::Flat;
  else if (alg == "ring")
    balg = coll::BcastAlg::Ring;
  else if (alg == "linear")
    salg = coll::ScanAlg::Linear;
  else
    require(alg == "binomial", "coll: unknown alg " + alg);

  coll::VecOp sum = coll::vec_op(coll::ReduceOp::Sum);
  auto block = [&](std::int64_t r, std::int64_t len) {
    std::vector<std::int64_t> v(len);
    for (std::int64_t i = 0; i < len; ++i) v[i] = r * len + i;
    return v;
  };
  std::vector<net::ProcessFn> progs;
  for (std::int64_t r = 0; r < p; ++r) {
    progs.push_back([&, r](net::ProcCtx& ctx) {
      const net::Comm& w = ctx.world();
      if (kind == "barrier") {
        coll::barrier(ctx, w);
      } else if (kind == "bcast") {
        coll::bcast(ctx, w, root, r == root ? block(0, m) : std::vector<std::int64_t>{}, balg);
      } else if (kind == "gather") {
        coll::gather(ctx, w, root, block(r, m));
      } else if (kind == "scatter") {
        coll::scatter(ctx, w, root, r == root ? block(0, p * m) : std::vector<std::int64_t>{}, m);
      } else if (kind == "allgather") {
        coll::allgather(ctx, w, block(r, m));
      } else if (kind == "alltoall") {
        coll::alltoall(ctx, w, block(r, p * m), m);
      } else if (kind == "reduce") {
        coll::reduce(ctx, w, root, block(r, m), sum);
      } else if (kind == "allreduce") {
        coll::allreduce(ctx, w, block(r, m), sum);
      } else if (kind == "reduce_scatter") {
        coll::reduce_scatter_block(ctx, w, block(r, p * m), m, sum);
      } else if (kind == "scan") {
        coll::scan(ctx, w, block(r, m), sum, salg);
      } else if (kind == "exscan") {
        coll::exscan(ctx, w, block(r, m), sum, salg);
      } else {
        throw DomainError("coll: unknown kind " + kind);
      }
    });
  }
  net::SimResult res = net::sim_run(cfg, progs);
  require(!res.deadlock.has_value(), "coll: internal deadlock");
  double lower = 0.0;  // one process: nothing to communicate
  if (p >= 2) {
    coll::Bounds bounds = coll::collective_bounds(p, 1, *net::closed_form_bisection(cfg.topology));
    lower = kind == "alltoall" ? bounds.alltoall_rounds_lower
                               : static_cast<double>(bounds.bcast_rounds_lower);
  }
  c.out += "kind,alg,p,m,rounds,total_time,lower_bound\n";
  c.out += csv::row({kind, alg, csv::num(p), csv::num(m),
                     csv::num(net::dependent_rounds(res.transcript)), csv::num(res.total_time),
                     csv::num(lower)});
  return 0;
}

// ------------------------------------------------------------------- apps --

int run_apps(Common& c, const std::string& kernel, std::int64_t n, std::int64_t p, double alpha,
             double beta, std::int64_t iters, std::int64_t range, const std::string& boundary_str,
             double eps, bool speedup) {
  namespace apps = parwb::apps;
  require(n >= 1, "apps: n must be >= 1");
  require(p >= 1, "apps: p must be >= 1");
  apps::AppOpts opts;
  opts.alpha = alpha;
  opts.beta = beta;

  // Runs the kernel at the given p and returns (total_time, collectives, ok).
  std::function<std::tuple<double, std::int64_t, bool>(std::int64_t)> once;
  std::mt19937_64 rng = rng_for(c.seed);

  if (kernel == "matvec_row" || kernel == "matvec_col") {
    std::vector<std::int64_t> A = random_values(rng, n * n, -9, 9);
    std::vector<std::int64_t> x = random_values(rng, n, -9, 9);
    std::vector<std::int64_t> want(n, 0);
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < n; ++j) want[i] += A[i * n + j] * x[j];
    once = [=](std::int64_t pp) {
      apps::IntDist r = kernel == "matvec_row" ? apps::matvec_rowwise(A, n, n, x, pp, opts)
                                               : apps::matvec_colwise(A, n, n, x, pp, opts);
      return std::tuple{r.sim.total_time, parwb::net::collective_count(r.sim.transcript, 0), r.global == want};
    };
  } else if (kernel == "summa") {
    std::vector<std::int64_t> A = random_values(rng, n * n, -9, 9);
    std::vector<std::int64_t> B = random_values(rng, n * n, -9, 9);
    std::vector<std::int64_t> want(n * n, 0);
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t k = 0; k < n; ++k)
        for (std::int64_t j = 0; j < n; ++j) want[i * n + j] += A[i * n + k] * B[k * n + j];
    once = [=](std::int64_t pp) {
      apps::IntDist r = apps::summa(A, B, n, n, n, pp, opts);
      return std::tuple{r.sim.total_time, parwb::net::collective_count(r.sim.transcript, 0), r.global == want};
    };
  } else if (kernel == "quicksort" || kernel == "counting_sort") {
    require(n % p == 0, "apps: p must divide n");
    std::vector<std::int64_t> all = kernel == "quicksort" ? random_values(rng, n, -999, 999)
                                                          : random_values(rng, n, 0, range - 1);
    std::vector<std::int64_t> want = all;
    std::sort(want.begin(), want.end());
    once = [=](std::int64_t pp) {
      std::vector<std::vector<std::int64_t>> locals(pp);
      std::int64_t nb = n / pp;
      for (std::int64_t r = 0; r < pp; ++r)
        locals[r].assign(all.begin() + r * nb, all.begin() + (r + 1) * nb);
      apps::IntDist r = kernel == "quicksort" ? apps::dist_quicksort(locals, opts)
                                              : apps::counting_sort(locals, range, opts);
      return std::tuple{r.sim.total_time, parwb::net::collective_count(r.sim.transcript, 0), r.global == want};
    };
  } else if (kernel == "stencil") {
    apps::Boundary boundary = apps::Boundary::FixedValues;
    if (boundary_str == "reflecting")
      boundary = apps::Boundary::Reflecting;
    else
      require(boundary_str == "fixed", "apps: boundary must be fixed or reflecting");
    std::uniform_real_distribution<double> d(0.0, 1.0);
    std::vector<double> grid(n * n);
    for (auto& v : grid) v = d(rng);
    std::vector<double> want = apps::stencil_seq(grid, n, iters, boundary, eps);
    once = [=](std::int64_t pp) {
      apps::RealDist r = apps::stencil_iterate(grid, n, pp, iters, boundary, eps, opts);
      return std::tuple{r.sim.total_time, parwb::net::collective_count(r.sim.transcript, 0), r.global == want};
    };
  } else if (kernel == "bfs") {
    require(n % p == 0, "apps: p must divide n");
    std::uniform_int_distribution<std::int64_t> d(0, n - 1);
    std::vector<std::pair<std::int64_t, std::int64_t>> edges;
    for (std::int64_t i = 0; i < 3 * n; ++i) edges.emplace_back(d(rng), d(rng));
    std::vector<std::int64_t> want(n, apps::BFS_UNREACHABLE);
    {
      std::vector<std::vector<std::int64_t>> adj(n);
      for (auto [u, v] : edges) {
        adj[u].push_back(v);
        if (u != v) adj[v].push_back(u);
      }
      std::vector<std::int64_t> queue{0};
      want[0] = 0;
      for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        std::int64_t u = queue[qi];
        for (std::int64_t v : adj[u])
          if (want[v] == apps::BFS_UNREACHABLE) {
            want[v] = want[u] + 1;
            queue.push_back(v);
          }
      }
    }
    once = [=](std::int64_t pp) {
      apps::IntDist r = apps::bfs_levelwise(n, edges, 0, pp, opts);
      return std::tuple{r.sim.total_time, parwb::net::collective_count(r.sim.transcript, 0), r.global == want};
    };
  } else {
    throw DomainError("apps: unknown kernel " + kernel);
  }

  auto [time_p, colls, ok] = once(p);
  c.out += speedup ? "kernel,n,p,total_time,collectives,ok,speedup\n"
                   : "kernel,n,p,total_time,collectives,ok\n";
  std::vector<std::string> fields{kernel,           csv::num(n),     csv::num(p),
                                  csv::num(time_p), csv::num(colls), csv::num(ok ? 1 : 0)};
  if (speedup) {
    auto [time_1, colls_1, ok_1] = once(1);
    (void)colls_1;
    (void)ok_1;
    fields.push_back(csv::num(time_p > 0.0 ? time_1 / time_p : 1.0));
  }
  c.out += csv::row(fields);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "parwb: deterministic parallel-computing workbench. Subcommands emit CSV "
      "(comma-separated, '.' decimals, LF endings); exit codes: 1 bad arguments, "
      "2 domain error, 3 simulated deadlock."};
  app.require_subcommand(1);

  Common c;

  // analyze
  std::int64_t an_n = 128, an_pmax = 64;
  double an_C = 1.0;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Analytic model curves; CSV header: model,n,p,time,speedup,efficiency");
  c.attach(analyze);
  bind_i64(analyze, c.cfg, "--n", an_n, "Problem size");
  bind_i64(analyze, c.cfg, "--pmax", an_pmax, "Largest processor count (curves span 1..pmax)");
  bind_f64(analyze, c.cfg, "--C", an_C, "Leading constant of the time model");

  // pram
  std::string pr_algo, pr_variant;
  std::int64_t pr_n = 16;
  CLI::App* pram = app.add_subcommand(
      "pram", "Shared-memory algorithms; CSV header: algo,n,variant,steps,ops,ok");
  c.attach(pram);
  bind_str(pram, c.cfg, "--algo", pr_algo,
           "fastmax|logmax|loglogmax|matmul|listrank");
  bind_i64(pram, c.cfg, "--n", pr_n, "Input size (matrix side for matmul)");
  bind_str(pram, c.cfg, "--variant", pr_variant,
           "EREW|CREW|CRCW_Common|CRCW_Arbitrary|CRCW_Priority (default per algo)");

  // dag
  std::string dg_file;
  std::vector<std::int64_t> dg_p{1, 2, 4, 8};
  CLI::App* dag = app.add_subcommand(
      "dag", "Task-graph scheduling; CSV header: work,span,parallelism,p,makespan,bound");
  c.attach(dag);
  bind_str(dag, c.cfg, "--file", dg_file,
           "Edge-list file: 'task <id> <weight>' lines then 'edge <u> <v>' lines");
  bind_i64_list(dag, c.cfg, "--p", dg_p, "Processor counts (comma-separated)");

  // kernels
  std::string kr_algo, kr_exec = "serial";
  std::int64_t kr_n = 64, kr_p = 4;
  CLI::App* kernels = app.add_subcommand(
      "kernels", "Instrumented data-parallel kernels; CSV header: n,p,ops,depth,rounds,ok");
  c.attach(kernels);
  bind_str(kernels, c.cfg, "--algo", kr_algo,
           "scan_seq|scan_recursive|scan_updown|scan_hs|scan_blocked|scan_tradeoff|"
           "merge_seq|merge_corank|merge_rankblocks|bitonic|partition|quicksort|sieve");
  bind_i64(kernels, c.cfg, "--n", kr_n, "Input size");
  bind_i64(kernels, c.cfg, "--p", kr_p, "Piece/block count for blocked variants");
  bind_str(kernels, c.cfg, "--exec", kr_exec, "serial|omp");

  // netsim
  std::string ns_scenario = "pingpong", ns_topo = "full", ns_dims, ns_switching = "direct";
  std::int64_t ns_p = 4, ns_eager = 0, ns_packet = 1, ns_m = 8, ns_ports = 1;
  double ns_alpha = 1.0, ns_beta = 1.0;
  CLI::App* netsim = app.add_subcommand(
      "netsim",
      "Message-passing simulation; transcript lines 't=<time> ev=<send|recv|match|deadlock> "
      "src=<r> dst=<r> tag=<t> m=<units>' then CSV header: p,topology,total_time,rounds,deadlock");
  c.attach(netsim);
  bind_str(netsim, c.cfg, "--scenario", ns_scenario,
           "pingpong|ring_shift_unsafe|ring_shift_sendrecv");
  bind_str(netsim, c.cfg, "--topo", ns_topo, "ring|full|mesh|torus|hypercube");
  bind_i64(netsim, c.cfg, "--p", ns_p, "Process count");
  bind_str(netsim, c.cfg, "--dims", ns_dims, "Mesh/torus extents, e.g. 4x4");
  bind_f64(netsim, c.cfg, "--alpha", ns_alpha, "Startup cost per message");
  bind_f64(netsim, c.cfg, "--beta", ns_beta, "Cost per unit");
  bind_i64(netsim, c.cfg, "--E", ns_eager, "Eager threshold: sends with m <= E buffer locally");
  bind_str(netsim, c.cfg, "--switching", ns_switching, "direct|store_forward|pipelined");
  bind_i64(netsim, c.cfg, "--packet", ns_packet, "Pipelined packet size");
  bind_i64(netsim, c.cfg, "--m", ns_m, "Message size in units");
  bind_i64(netsim, c.cfg, "--ports", ns_ports, "Port slots per process (1 = one-ported)");

  // coll
  std::string cl_kind, cl_alg = "binomial";
  std::int64_t cl_p = 8, cl_m = 1, cl_root = 0;
  double cl_alpha = 1.0, cl_beta = 1.0;
  CLI::App* coll = app.add_subcommand(
      "coll", "Collective algorithms; CSV header: kind,alg,p,m,rounds,total_time,lower_bound");
  c.attach(coll);
  bind_str(coll, c.cfg, "--kind", cl_kind,
           "barrier|bcast|gather|scatter|allgather|alltoall|reduce|allreduce|"
           "reduce_scatter|scan|exscan");
  bind_str(coll, c.cfg, "--alg", cl_alg, "flat|ring|binomial (bcast), linear|binomial (scans)");
  bind_i64(coll, c.cfg, "--p", cl_p, "Process count");
  bind_i64(coll, c.cfg, "--m", cl_m, "Block size per rank in units");
  bind_f64(coll, c.cfg, "--alpha", cl_alpha, "Startup cost per message");
  bind_f64(coll, c.cfg, "--beta", cl_beta, "Cost per unit");
  bind_i64(coll, c.cfg, "--root", cl_root, "Root rank for rooted collectives");

  // apps
  std::string ap_kernel, ap_boundary = "fixed";
  std::int64_t ap_n = 16, ap_p = 4, ap_iters = 4, ap_range = 32;
  double ap_alpha = 1.0, ap_beta = 1.0, ap_eps = 0.0;
  bool ap_speedup = false;
  CLI::App* appsub = app.add_subcommand(
      "apps", "Distributed application kernels; CSV header: kernel,n,p,total_time,collectives,ok"
              " (plus speedup with --speedup)");
  c.attach(appsub);
  bind_str(appsub, c.cfg, "--kernel", ap_kernel,
           "matvec_row|matvec_col|summa|quicksort|counting_sort|stencil|bfs");
  bind_i64(appsub, c.cfg, "--n", ap_n, "Problem size (vector length, matrix side, grid side)");
  bind_i64(appsub, c.cfg, "--p", ap_p, "Process count");
  bind_f64(appsub, c.cfg, "--alpha", ap_alpha, "Startup cost per message");
  bind_f64(appsub, c.cfg, "--beta", ap_beta, "Cost per unit");
  bind_i64(appsub, c.cfg, "--iters", ap_iters, "Stencil iterations");
  bind_i64(appsub, c.cfg, "--range", ap_range, "Counting-sort key range [0, range)");
  bind_str(appsub, c.cfg, "--boundary", ap_boundary, "fixed|reflecting");
  bind_f64(appsub, c.cfg, "--eps", ap_eps, "Stencil convergence threshold (0 = run all iters)");
  bind_flag(appsub, c.cfg, "--speedup", ap_speedup, "Also run p=1 and append T(1)/T(p)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitBadArgs;
  }

  try {
    for (const CLI::App* sub : app.get_subcommands()) c.cfg.apply(sub);
    int code = 0;
    if (analyze->parsed()) {
      code = run_analyze(c, an_n, an_pmax, an_C);
    } else if (pram->parsed()) {
      require(!pr_algo.empty(), "pram: --algo is required");
      code = run_pram(c, pr_algo, pr_n, pr_variant);
    } else if (dag->parsed()) {
      require(!dg_file.empty(), "dag: --file is required");
      code = run_dag(c, dg_file, dg_p);
    } else if (kernels->parsed()) {
      require(!kr_algo.empty(), "kernels: --algo is required");
      code = run_kernels(c, kr_algo, kr_n, kr_p, kr_exec);
    } else if (netsim->parsed()) {
      code = run_netsim(c, ns_scenario, ns_topo, ns_p, ns_dims, ns_alpha, ns_beta, ns_eager,
                        ns_switching, ns_packet, ns_m, ns_ports);
    } else if (coll->parsed()) {
      require(!cl_kind.empty(), "coll: --kind is required");
      code = run_coll(c, cl_kind, cl_alg, cl_p, cl_m, cl_alpha, cl_beta, cl_root);
    } else if (appsub->parsed()) {
      require(!ap_kernel.empty(), "apps: --kernel is required");
      code = run_apps(c, ap_kernel, ap_n, ap_p, ap_alpha, ap_beta, ap_iters, ap_range,
                      ap_boundary, ap_eps, ap_speedup);
    }
    c.flush();
    return code;
  } catch (const parwb::pram::ConflictViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
}
