#include "fsupart/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <iostream>
#include <sstream>

#include "fsupart/dmpc.hpp"
#include "fsupart/error.hpp"
#include "fsupart/exact.hpp"
#include "fsupart/fsu.hpp"
#include "fsupart/greedy.hpp"
#include "fsupart/io.hpp"
#include "fsupart/metrics.hpp"
#include "fsupart/netgen.hpp"

namespace fsupart::cli {

namespace {

enum class Level { Error, Warn, Info, Debug };

struct Globals {
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string log_level = "warn";
};

class Context {
 public:
  Context(std::istream& in, std::ostream& out, std::ostream& err) : in_(in), out_(out), err_(err) {}

  Globals g;

  Level level() const {
    if (g.log_level == "error") return Level::Error;
    if (g.log_level == "info") return Level::Info;
    if (g.log_level == "debug") return Level::Debug;
    return Level::Warn;
  }
  void log(Level l, const std::string& msg) {
    static const char* names[] = {"error", "warn", "info", "debug"};
    if (l <= level()) err_ << "[" << names[static_cast<int>(l)] << "] " << msg << "\n";
  }

  Json read_json(const std::string& path) {
    if (path != "-") return read_json_file(path);
    try {
      return Json::parse(in_);
    } catch (const Json::parse_error& e) {
      throw Error("invalid_json", std::string("stdin: ") + e.what());
    }
  }

  void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
      out_ << text;
    } else {
      write_text_file(path, text);
      log(Level::Info, "wrote " + path);
    }
  }

  std::ostream& err() { return err_; }

 private:
  std::istream& in_;
  std::ostream& out_;
  std::ostream& err_;
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// Graph of a system file (or an fsu file embedding one). PWA systems use
// the requested mode.
std::shared_ptr<const EquivalentGraph> graph_of(const SystemModel& model, int mode) {
  if (const auto* lin = std::get_if<LinearModel>(&model)) {
    return std::make_shared<const EquivalentGraph>(build_linear_graph(*lin));
  }
  if (const auto* pwa = std::get_if<PwaModel>(&model)) {
    return std::make_shared<const EquivalentGraph>(build_pwa_graph(*pwa, static_cast<std::size_t>(mode)));
  }
  throw Error("invalid_argument", "only linear and PWA systems can be read from files");
}

struct Loaded {
  SystemModel model;
  std::shared_ptr<const FsuCollection> fsus;
};

// Accepts a system file or the output of `fsu`; in the latter case the
// stored FSUs are reused instead of recomputed.
Loaded load(Context& ctx, const std::string& path, int mode) {
  const Json j = ctx.read_json(path);
  Loaded l{system_from_json(j), nullptr};
  auto g = graph_of(l.model, mode);
  if (j.is_object() && j.contains("fsus") && j.contains("system")) {
    l.fsus = std::make_shared<const FsuCollection>(fsus_from_json(j, g));
  } else {
    l.fsus = std::make_shared<const FsuCollection>(select_fsus(g));
  }
  ctx.log(Level::Info, std::to_string(l.fsus->size()) + " FSUs");
  return l;
}

IndexConfig index_config(const FsuCollection& coll, const std::optional<double>& alpha,
                         const std::optional<double>& kappa, const std::string& size_measure) {
  if (alpha.has_value() == kappa.has_value()) {
    throw Error("invalid_argument", "give exactly one of --alpha and --kappa");
  }
  IndexConfig cfg = alpha ? IndexConfig::from_alpha(*alpha) : IndexConfig::from_kappa(*kappa, coll);
  cfg.size_measure = size_measure == "nodes" ? SizeMeasure::Nodes : SizeMeasure::Fsus;
  return cfg;
}

std::string trace_csv(const std::vector<GreedyStep>& steps) {
  std::ostringstream os;
  os.precision(12);
  os << "iteration,kind,fsu,from_block,to_block,gain,index\n";
  for (const auto& s : steps) {
    os << s.iteration << ',' << s.kind << ',' << s.fsu << ',' << s.from_block << ',' << s.to_block
       << ',' << s.gain << ',' << s.index << '\n';
  }
  return os.str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error("invalid_argument", "not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw Error("invalid_argument", "empty list");
  return out;
}

Objective parse_objective(const std::string& s) {
  return s == "ratio" ? Objective::Ratio : Objective::Quadratic;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Context ctx(in, out, err);
  CLI::App app{"Equivalent graphs, FSU selection and control partitioning of networked systems", "fsupart"};
  app.require_subcommand(1);
  // Global flags may also follow the subcommand.
  app.fallthrough();
  app.add_option("--seed", ctx.g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--format", ctx.g.format, "Output and error format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--log-level", ctx.g.log_level, "Diagnostics on stderr")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}))
      ->capture_default_str();

  std::string out_path, system_path = "-";
  int mode = 0;

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a test network");
  gen->require_subcommand(1);
  ModularSpec mspec;
  auto* gmod = gen->add_subcommand("modular", "Multi-level modular network");
  gmod->add_option("--levels", mspec.levels)->capture_default_str();
  gmod->add_option("--base", mspec.base_size)->capture_default_str();
  gmod->add_option("--strong", mspec.strong_w)->capture_default_str();
  gmod->add_option("--weak", mspec.weak_w)->capture_default_str();
  gmod->add_option("--level-scale", mspec.level_scale)->capture_default_str();
  gmod->add_option("--out", out_path);
  RandomFsuSpec rspec;
  auto* grnd = gen->add_subcommand("random", "Random network of scalar FSUs");
  grnd->add_option("--n", rspec.n_fsus)->capture_default_str();
  grnd->add_option("--density", rspec.edge_density)->capture_default_str();
  grnd->add_option("--w-lo", rspec.w_lo)->capture_default_str();
  grnd->add_option("--w-hi", rspec.w_hi)->capture_default_str();
  grnd->add_flag("--pwa", rspec.pwa, "Two modes with self loops of opposite sign");
  grnd->add_option("--out", out_path);
  GenericSpec gspec;
  auto* ggen = gen->add_subcommand("generic", "Random sparse input/state system");
  ggen->add_option("--n", gspec.n)->capture_default_str();
  ggen->add_option("--p", gspec.p)->capture_default_str();
  ggen->add_option("--density", gspec.density)->capture_default_str();
  ggen->add_option("--w-lo", gspec.w_lo)->capture_default_str();
  ggen->add_option("--w-hi", gspec.w_hi)->capture_default_str();
  ggen->add_flag("--planted", gspec.planted, "Plant p clusters for recovery tests");
  ggen->add_option("--out", out_path);

  // graph
  auto* graph = app.add_subcommand("graph", "Equivalent graph of a system");
  graph->add_option("--system", system_path, "System JSON, - for stdin")->capture_default_str();
  graph->add_option("--mode", mode, "PWA mode (0-based)")->capture_default_str();
  graph->add_option("--out", out_path);

  // fsu
  std::string dot_path;
  auto* fsu = app.add_subcommand("fsu", "Select fundamental system units");
  fsu->add_option("--system", system_path)->capture_default_str();
  fsu->add_option("--mode", mode)->capture_default_str();
  fsu->add_option("--out", out_path);
  fsu->add_option("--dot", dot_path, "Also write the FSU-grouped graph");

  // partition
  std::optional<double> alpha, kappa;
  std::string size_measure = "fsus", trace_path, engine = "bnb", objective = "quadratic";
  double time_limit = 60.0, gap = 0.0;
  auto* part = app.add_subcommand("partition", "Aggregate FSUs into CSUs");
  part->require_subcommand(1);
  auto add_common = [&](CLI::App* c) {
    c->add_option("--system", system_path, "System or fsu JSON")->capture_default_str();
    c->add_option("--mode", mode)->capture_default_str();
    c->add_option("--alpha", alpha, "Granularity");
    c->add_option("--kappa", kappa, "alpha = (kappa / w_min)^2");
    c->add_option("--size-measure", size_measure)->check(CLI::IsMember({"fsus", "nodes"}))->capture_default_str();
    c->add_option("--out", out_path);
  };
  auto* pgreedy = part->add_subcommand("greedy", "Greedy aggregation");
  add_common(pgreedy);
  pgreedy->add_option("--trace", trace_path, "CSV of every assignment");
  auto* prefined = part->add_subcommand("refined", "Greedy aggregation followed by local moves");
  add_common(prefined);
  prefined->add_option("--trace", trace_path, "CSV of every assignment and move");
  auto* pexact = part->add_subcommand("exact", "Branch-and-bound or exhaustive search");
  add_common(pexact);
  pexact->add_option("--engine", engine)->check(CLI::IsMember({"bnb", "brute"}))->capture_default_str();
  pexact->add_option("--objective", objective)->check(CLI::IsMember({"quadratic", "ratio"}))->capture_default_str();
  pexact->add_option("--time-limit", time_limit, "Seconds, <= 0 for none")->capture_default_str();
  pexact->add_option("--gap", gap, "Relative gap tolerance")->capture_default_str();

  // metrics
  std::string partition_path;
  auto* metrics = app.add_subcommand("metrics", "Index components of a partition");
  metrics->add_option("--system", system_path)->capture_default_str();
  metrics->add_option("--mode", mode)->capture_default_str();
  metrics->add_option("--partition", partition_path)->required();
  metrics->add_option("--alpha", alpha);
  metrics->add_option("--kappa", kappa);
  metrics->add_option("--size-measure", size_measure)->check(CLI::IsMember({"fsus", "nodes"}))->capture_default_str();
  metrics->add_option("--out", out_path);

  // sweep
  std::string kappas_text, sweep_engine = "exact";
  auto* sweep = app.add_subcommand("sweep", "Partitions over a list of kappa values");
  sweep->add_option("--system", system_path)->capture_default_str();
  sweep->add_option("--mode", mode)->capture_default_str();
  sweep->add_option("--kappas", kappas_text, "Comma separated")->required();
  sweep->add_option("--engine", sweep_engine)
      ->check(CLI::IsMember({"greedy", "refined", "exact", "brute"}))
      ->capture_default_str();
  sweep->add_option("--time-limit", time_limit)->capture_default_str();
  sweep->add_option("--out", out_path);

  // simulate
  std::string scenario_path, traces_dir;
  auto* sim = app.add_subcommand("simulate", "Closed-loop MPC / DMPC-ADMM run");
  sim->add_option("--system", system_path)->capture_default_str();
  sim->add_option("--partition", partition_path)->required();
  sim->add_option("--scenario", scenario_path, "Scenario JSON; defaults when omitted");
  sim->add_option("--out", out_path, "Metrics CSV");
  sim->add_option("--traces", traces_dir, "Directory for state, input and residual traces");

  // export-dot
  bool with_fsus = false;
  auto* dot = app.add_subcommand("export-dot", "Graphviz rendering of a system");
  dot->add_option("--system", system_path)->capture_default_str();
  dot->add_option("--mode", mode)->capture_default_str();
  dot->add_flag("--fsus", with_fsus, "Group vertices by FSU");
  dot->add_option("--partition", partition_path, "Group FSUs by CSU");
  dot->add_option("--out", out_path);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    const CLI::App* failing = &app;
    for (auto* sub : app.get_subcommands()) {
      failing = sub;
      for (auto* s2 : sub->get_subcommands()) failing = s2;
    }
    err << failing->help();
    return kUsage;
  }

  const auto fail = [&](const std::string& kind, const std::string& message, const std::vector<long>& idx) {
    if (ctx.g.format == "json") {
      err << Json{{"error", {{"kind", kind}, {"message", message}, {"indices", idx}}}}.dump() << "\n";
    } else {
      err << "error: " << kind << ": " << message << "\n";
    }
    return kDomainError;
  };

  try {
    if (gen->parsed()) {
      SystemModel model;
      if (gmod->parsed()) {
        model = gen_modular(mspec);
      } else if (grnd->parsed()) {
        rspec.seed = ctx.g.seed;
        model = gen_random_fsu(rspec);
      } else {
        gspec.seed = ctx.g.seed;
        model = gen_generic(gspec);
      }
      ctx.emit(out_path, dump(system_to_json(model)));
      return kOk;
    }
    if (graph->parsed()) {
      auto model = system_from_json(ctx.read_json(system_path));
      auto g = graph_of(model, mode);
      if (ctx.g.format == "csv") {
        std::ostringstream os;
        os << "source,target,weight\n";
        for (const auto& e : g->edges()) {
          os << g->vertex_name(e.source) << ',' << g->vertex_name(e.target) << ',' << format_weight(e.weight) << '\n';
        }
        ctx.emit(out_path, os.str());
      } else {
        ctx.emit(out_path, dump(graph_to_json(*g)));
      }
      return kOk;
    }
    if (fsu->parsed()) {
      auto model = system_from_json(ctx.read_json(system_path));
      auto coll = select_fsus(graph_of(model, mode));
      Json j = fsus_to_json(coll);
      j["system"] = system_to_json(model);
      ctx.emit(out_path, dump(j));
      if (!dot_path.empty()) {
        DotOptions o;
        o.fsus = &coll;
        ctx.emit(dot_path, to_dot(coll.graph(), o));
      }
      return kOk;
    }
    if (part->parsed()) {
      auto l = load(ctx, system_path, mode);
      const auto cfg = index_config(*l.fsus, alpha, kappa, size_measure);
      Json j;
      int status = kOk;
      if (pexact->parsed()) {
        const Objective obj = parse_objective(objective);
        std::optional<ExactResult> r;
        if (engine == "brute") {
          r.emplace(brute_force_partition(*l.fsus, cfg, obj));
        } else {
          BnbOptions o;
          o.objective = obj;
          o.time_limit = time_limit;
          o.gap_tol = gap;
          r.emplace(branch_and_bound(*l.fsus, cfg, o));
        }
        if (engine == "brute") r->optimal = true;
        j = partition_to_json(r->partition);
        j["engine"] = engine;
        j["objective"] = objective;
        j["value"] = r->value;
        j["bound"] = r->bound;
        j["gap"] = r->gap;
        j["optimal"] = r->optimal;
        j["nodes"] = r->nodes;
        j["seconds"] = r->seconds;
        if (!r->optimal) {
          status = kAnytime;
          ctx.log(Level::Warn, "search stopped before proving optimality, gap " + std::to_string(r->gap));
        }
      } else {
        std::vector<GreedyStep> trace;
        GreedyOptions o;
        if (!trace_path.empty()) o.trace = &trace;
        auto p = prefined->parsed() ? greedy_refined(*l.fsus, cfg, o) : greedy_partition(*l.fsus, cfg, o);
        j = partition_to_json(p);
        j["engine"] = prefined->parsed() ? "refined" : "greedy";
        j["objective"] = "ratio";
        j["value"] = index_ratio(p, cfg);
        if (!trace_path.empty()) ctx.emit(trace_path, trace_csv(trace));
      }
      j["alpha"] = cfg.alpha;
      if (cfg.kappa) j["kappa"] = *cfg.kappa;
      ctx.emit(out_path, dump(j));
      return status;
    }
    if (metrics->parsed()) {
      auto l = load(ctx, system_path, mode);
      const auto cfg = index_config(*l.fsus, alpha, kappa, size_measure);
      Partition p(l.fsus, blocks_from_json(ctx.read_json(partition_path)));
      const auto c = p.components();
      const double ratio = index_ratio(p, cfg);
      const double quad = index_quadratic(p, cfg);
      if (ctx.g.format == "json") {
        ctx.emit(out_path, dump(Json{{"n_blocks", p.size()}, {"alpha", cfg.alpha}, {"w_intra", c.intra},
                                     {"w_inter", c.inter}, {"w_size", c.size},
                                     {"index_ratio", ratio}, {"index_quadratic", quad}}));
      } else {
        std::ostringstream os;
        os.precision(12);
        os << "n_blocks,alpha,w_intra,w_inter,w_size,index_ratio,index_quadratic\n"
           << p.size() << ',' << cfg.alpha << ',' << c.intra << ',' << c.inter << ',' << c.size << ','
           << ratio << ',' << quad << '\n';
        ctx.emit(out_path, os.str());
      }
      return kOk;
    }
    if (sweep->parsed()) {
      auto l = load(ctx, system_path, mode);
      Engine e = Engine::Exact;
      if (sweep_engine == "greedy") e = Engine::Greedy;
      if (sweep_engine == "refined") e = Engine::Refined;
      if (sweep_engine == "brute") e = Engine::Brute;
      BnbOptions o;
      o.time_limit = time_limit;
      auto r = alpha_sweep(*l.fsus, parse_list(kappas_text), e, o);
      if (ctx.g.format == "csv") {
        std::ostringstream os;
        os.precision(12);
        os << "kappa,alpha,n_blocks,value,optimal,distinct_id\n";
        for (const auto& run : r.runs) {
          os << run.kappa << ',' << run.alpha << ',' << run.partition.size() << ',' << run.value << ','
             << (run.optimal ? 1 : 0) << ',' << run.distinct_id << '\n';
        }
        ctx.emit(out_path, os.str());
      } else {
        Json runs = Json::array(), distinct = Json::array();
        for (const auto& run : r.runs) {
          runs.push_back(Json{{"kappa", run.kappa}, {"alpha", run.alpha}, {"n_blocks", run.partition.size()},
                              {"value", run.value}, {"optimal", run.optimal}, {"distinct_id", run.distinct_id}});
        }
        for (const auto& p : r.distinct) distinct.push_back(partition_to_json(p));
        ctx.emit(out_path, dump(Json{{"engine", sweep_engine}, {"runs", runs}, {"distinct", distinct}}));
      }
      return kOk;
    }
    if (sim->parsed()) {
      auto l = load(ctx, system_path, 0);
      const auto* lin = std::get_if<LinearModel>(&l.model);
      if (!lin) throw Error("invalid_argument", "simulate needs a linear system");
      Partition p(l.fsus, blocks_from_json(ctx.read_json(partition_path)));
      Scenario scn = scenario_path.empty() ? Scenario{} : scenario_from_json(ctx.read_json(scenario_path));
      auto m = simulate(*lin, p, scn);
      ctx.emit(out_path, metrics_csv(m));
      if (!traces_dir.empty()) write_traces(m, traces_dir);
      std::ostringstream summary;
      summary << m.n_csu << " CSUs, cost " << m.cumulative_cost() << ", core-seconds " << m.core_seconds();
      ctx.log(Level::Info, summary.str());
      for (const auto& s : m.steps) {
        if (!s.converged) ctx.log(Level::Warn, "step " + std::to_string(s.step) + " hit the iteration cap");
      }
      return kOk;
    }
    if (dot->parsed()) {
      auto l = load(ctx, system_path, mode);
      DotOptions o;
      std::optional<Partition> p;
      if (with_fsus || !partition_path.empty()) o.fsus = l.fsus.get();
      if (!partition_path.empty()) {
        p.emplace(l.fsus, blocks_from_json(ctx.read_json(partition_path)));
        o.partition = &*p;
      }
      ctx.emit(out_path, to_dot(l.fsus->graph(), o));
      return kOk;
    }
  } catch (const Error& e) {
    return fail(e.kind(), e.what(), e.indices());
  } catch (const Json::exception& e) {
    return fail("invalid_json", e.what(), {});
  } catch (const std::exception& e) {
    return fail("internal", e.what(), {});
  }
  return kUsage;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cin, std::cout, std::cerr);
}

}  // namespace fsupart::cli
