// bfoml: command-line driver for the bundled FOML toolkit.
//
// Exit codes: 0 definite answer, 2 usage / input / fragment errors,
// 3 resource limit reached, 4 internal error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bfoml/encodings.hpp"
#include "bfoml/formula.hpp"
#include "bfoml/fragment.hpp"
#include "bfoml/json_io.hpp"
#include "bfoml/kripke.hpp"
#include "bfoml/oracle.hpp"
#include "bfoml/sampler.hpp"
#include "bfoml/syntax.hpp"
#include "bfoml/tableau.hpp"

using json = nlohmann::ordered_json;
using namespace bfoml;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kResource = 3;
constexpr int kInternal = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Ctx {
  std::vector<std::string> argv;
  bool json_out = false;
};

json verdict(const Ctx& c, const std::string& status) {
  json v;
  v["command"] = c.argv;
  v["status"] = status;
  return v;
}

void emit(const Ctx& c, const json& v, const std::string& text) {
  if (c.json_out)
    std::cout << v.dump(2) << "\n";
  else
    std::cout << text;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

Formula load_formula(const std::string& file, const std::string& expr) {
  if (!file.empty() && !expr.empty()) throw UsageError("give --formula or --expr, not both");
  if (file.empty() && expr.empty()) throw UsageError("missing --formula FILE or --expr TEXT");
  std::string text;
  if (!file.empty()) {
    try {
      text = read_text_file(file);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  } else {
    text = expr;
  }
  return parse(text);
}

json stats_json(const SolveStats& s) {
  return {{"nodes_created", s.nodes_created}, {"worlds_created", s.worlds_created},
          {"max_domain", s.max_domain},       {"backtracks", s.backtracks},
          {"witness_pairs", s.witness_pairs}, {"rounds", s.rounds},
          {"seconds", s.seconds}};
}

// ---------------------------------------------------------------------------

struct SatArgs {
  std::string fragment = "lbf";
  std::string formula, expr, model_out;
  std::size_t max_nodes = SolverOptions{}.max_nodes;
  std::size_t max_witness_pairs = SolverOptions{}.max_witness_pairs;
  bool trace = false;
  bool invariants = false;
};

int run_sat(const Ctx& c, const SatArgs& a) {
  Formula phi = load_formula(a.formula, a.expr);
  SolverOptions opts;
  opts.max_nodes = a.max_nodes;
  opts.max_witness_pairs = a.max_witness_pairs;
  opts.check_invariants = a.invariants;
  if (a.trace) opts.trace = &std::cerr;
  SolveResult r;
  try {
    r = a.fragment == "lbf" ? solve_lbf(phi, opts) : solve_abbabe(phi, opts);
  } catch (const NotInFragment& e) {
    json v = verdict(c, "not-in-fragment");
    v["error"] = e.what();
    if (c.json_out)
      std::cout << v.dump(2) << "\n";
    else
      std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  json v;
  std::ostringstream text;
  if (r.is_sat()) {
    const auto& ex = std::get<Sat>(r.outcome).extraction;
    v = verdict(c, "sat");
    text << "sat\n";
    std::string model = write_model(ex.model);
    if (!a.model_out.empty()) {
      write_file(a.model_out, model);
      v["model_path"] = a.model_out;
    } else {
      v["model"] = json::parse(model);
    }
    v["world"] = ex.model.world_name(ex.root);
    VarSet fv = free_vars(phi);
    json assign = json::object();
    for (const auto& [x, d] : ex.sigma)
      if (fv.contains(x)) assign[x.name()] = ex.model.element_name(d);
    v["assignment"] = assign;
    text << "worlds: " << ex.model.world_count() << ", root " << ex.model.world_name(ex.root)
         << "\n";
    if (!assign.empty()) {
      text << "assignment:";
      for (const auto& [x, d] : assign.items()) text << " " << x << "=" << d.get<std::string>();
      text << "\n";
    }
    if (a.model_out.empty() && !c.json_out) text << model;
  } else if (r.is_unsat()) {
    v = verdict(c, "unsat");
    text << "unsat\n";
  } else {
    const auto& lim = std::get<ResourceExceeded>(r.outcome).limit;
    v = verdict(c, "resource-exceeded");
    v["limit"] = lim;
    text << "resource exceeded: " << lim << "\n";
  }
  v["stats"] = stats_json(r.stats);
  v["notes"] = json::array({"fragment " + a.fragment, "normalized input: " + print(r.theta)});
  text << "nodes: " << r.stats.nodes_created << ", max |Dom|: " << r.stats.max_domain
       << ", time: " << r.stats.seconds << "s\n";
  emit(c, v, text.str());
  return r.exceeded() ? kResource : kOk;
}

// ---------------------------------------------------------------------------

struct CheckArgs {
  std::string model, world, formula, expr;
  std::vector<std::string> assign;
};

Assignment parse_assignment(const KripkeModel& m, const std::vector<std::string>& items) {
  Assignment sigma;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string pair;
    while (std::getline(ss, pair, ',')) {
      if (pair.empty()) continue;
      auto eq = pair.find('=');
      if (eq == std::string::npos) throw UsageError("bad assignment '" + pair + "', want x=d");
      std::string x = pair.substr(0, eq), d = pair.substr(eq + 1);
      auto id = m.find_element(d);
      if (!id) throw UsageError("unknown element '" + d + "'");
      sigma[Var::named(x)] = *id;
    }
  }
  return sigma;
}

int run_check(const Ctx& c, const CheckArgs& a) {
  KripkeModel m = read_model_file(a.model);
  auto w = m.find_world(a.world);
  if (!w) throw UsageError("unknown world '" + a.world + "'");
  Formula phi = load_formula(a.formula, a.expr);
  Assignment sigma = parse_assignment(m, a.assign);
  CheckTrace t = explain(m, *w, sigma, phi);
  json v = verdict(c, t.value ? "true" : "false");
  v["world"] = a.world;
  std::string text = t.value ? "true\n" : "false\n";
  if (!t.value) {
    v["path"] = t.path;
    for (const auto& step : t.path) text += "  " + step + "\n";
  }
  emit(c, v, text);
  return kOk;
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
  std::string formula, expr, bundles, domain = "increasing";
};

int run_classify(const Ctx& c, const ClassifyArgs& a) {
  if (a.formula.empty() && a.expr.empty()) {
    if (a.bundles.empty()) throw UsageError("give --formula, --expr or --bundles");
    BundleSet s;
    try {
      s = BundleSet::parse(a.bundles);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    DomainRegime r;
    if (a.domain == "constant")
      r = DomainRegime::Constant;
    else if (a.domain == "increasing")
      r = DomainRegime::Increasing;
    else
      throw UsageError("--domain must be constant or increasing");
    FragmentStatus st = classify(s, r);
    json v = verdict(c, st.label());
    v["bundles"] = s.to_string();
    v["domain"] = regime_name(r);
    v["via_closure"] = st.via_closure;
    v["notes"] = json::array({st.note});
    emit(c, v, st.label() + " (" + st.note + ")\n");
    return kOk;
  }
  Formula phi = to_nnf(load_formula(a.formula, a.expr));
  auto used = bundles_used(phi);
  auto lbf = lbf_violation(phi);
  auto abb = abbabe_violation(phi);
  std::vector<std::string> parses;
  for (auto s : bundle_parses(phi)) parses.push_back(s.to_string());

  json v = verdict(c, "classified");
  v["bundled"] = used.has_value();
  v["bundles_used"] = used ? used->to_string() : "";
  v["bundle_parses"] = parses;
  v["lbf"] = !lbf;
  v["abbabe"] = !abb;
  json notes = json::array();
  std::ostringstream text;
  if (used)
    text << "bundled: " << used->to_string() << "\n";
  else
    text << "not bundled: " << bundled_violation(phi).value_or("?") << "\n";
  if (!used) notes.push_back(bundled_violation(phi).value_or("?"));
  text << (lbf ? "not LBF: " + *lbf : std::string("LBF")) << "\n";
  text << (abb ? "not ABBABE: " + *abb : std::string("ABBABE")) << "\n";
  if (lbf) notes.push_back("not LBF: " + *lbf);
  if (abb) notes.push_back("not ABBABE: " + *abb);
  if (used) {
    FragmentStatus st = classify(*used, DomainRegime::Increasing);
    text << "increasing domains: " << st.label() << "\n";
    v["increasing"] = st.label();
  }
  v["notes"] = notes;
  emit(c, v, text.str());
  return kOk;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string family, tiling, out;
  std::size_t n = 1;
};

int run_generate(const Ctx& c, const GenerateArgs& a) {
  auto need_tiling = [&] {
    if (a.tiling.empty()) throw UsageError("family " + a.family + " needs --tiling FILE");
    try {
      return read_tiling_file(a.tiling);
    } catch (const SchemaError& e) {
      throw UsageError(e.what());
    }
  };
  Formula f;
  const std::string& fam = a.family;
  if (fam == "delta")
    f = delta_n(a.n);
  else if (fam == "ebba")
    f = encode_ebba(need_tiling());
  else if (fam == "abebbe")
    f = encode_abebbe(need_tiling());
  else if (fam == "phi1")
    f = no_fmp_formulas().phi1;
  else if (fam == "phi2")
    f = no_fmp_formulas().phi2;
  else if (fam == "phi3")
    f = no_fmp_formulas().phi3;
  else if (fam == "alpha-n")
    f = alpha_n(a.n);
  else if (fam == "beta-nt")
    f = beta_nt(need_tiling(), a.n);
  else
    throw UsageError("unknown family '" + fam + "'");
  std::string text = print(f) + "\n";
  json v = verdict(c, "generated");
  v["family"] = fam;
  v["size"] = size(f);
  if (!a.out.empty()) {
    write_file(a.out, text);
    v["path"] = a.out;
  } else {
    v["formula"] = print(f);
  }
  if (c.json_out)
    std::cout << v.dump(2) << "\n";
  else if (a.out.empty())
    std::cout << text;
  return kOk;
}

// ---------------------------------------------------------------------------

struct OracleArgs {
  std::string formula, expr, model_out;
  SearchBounds b;
  double state_ceiling = OracleOptions{}.state_ceiling;
};

int run_oracle(const Ctx& c, const OracleArgs& a) {
  Formula phi = load_formula(a.formula, a.expr);
  OracleOptions opts;
  opts.state_ceiling = a.state_ceiling;
  OracleResult r;
  try {
    r = sat_bounded(phi, a.b, opts);
  } catch (const OracleLimit& e) {
    json v = verdict(c, "resource-exceeded");
    v["limit"] = e.what();
    emit(c, v, std::string("resource exceeded: ") + e.what() + "\n");
    return kResource;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  json v;
  std::ostringstream text;
  if (r.found()) {
    const auto& f = std::get<Found>(r.outcome);
    v = verdict(c, "found");
    std::string model = write_model(f.model);
    if (!a.model_out.empty()) {
      write_file(a.model_out, model);
      v["model_path"] = a.model_out;
    } else {
      v["model"] = json::parse(model);
    }
    v["world"] = f.model.world_name(f.world);
    json assign = json::object();
    for (const auto& [x, d] : f.assignment) assign[x.name()] = f.model.element_name(d);
    v["assignment"] = assign;
    text << "Found at " << f.model.world_name(f.world) << "\n";
    if (a.model_out.empty()) text << model;
  } else {
    v = verdict(c, "none-within-bounds");
    text << "NoneWithinBounds " << a.b.to_string() << "\n";
  }
  v["bounds"] = a.b.to_string();
  v["stats"] = {{"steps", r.steps}};
  text << "steps: " << r.steps << "\n";
  emit(c, v, text.str());
  return kOk;
}

// ---------------------------------------------------------------------------

struct SampleArgs {
  std::string grammar = "lbf";
  std::size_t size = 10, count = 10;
  std::optional<std::uint64_t> seed;
};

int run_sample(const Ctx& c, const SampleArgs& a) {
  Sampler s(a.seed ? *a.seed : sampler_seed());
  json list = json::array();
  std::ostringstream text;
  for (std::size_t i = 0; i < a.count; ++i) {
    Formula f;
    if (a.grammar == "foml")
      f = s.foml(a.size);
    else if (a.grammar == "lbf")
      f = s.lbf(a.size);
    else if (a.grammar == "abbabe")
      f = s.abbabe(a.size);
    else if (a.grammar == "abeb")
      f = s.abeb(a.size);
    else if (a.grammar == "babe")
      f = s.babe(a.size);
    else
      throw UsageError("unknown grammar '" + a.grammar + "'");
    list.push_back(print(f));
    text << print(f) << "\n";
  }
  json v = verdict(c, "sampled");
  v["formulas"] = list;
  emit(c, v, text.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Ctx ctx;
  ctx.argv.assign(argv + 1, argv + argc);

  CLI::App app{"Bundled first-order modal logic: satisfiability, model checking, encodings"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", ctx.json_out, "Emit a JSON verdict record");

  SatArgs sat;
  auto* sat_cmd = app.add_subcommand("sat", "Decide satisfiability with the tableau solver");
  sat_cmd->add_option("--fragment", sat.fragment, "lbf or abbabe")
      ->check(CLI::IsMember({"lbf", "abbabe"}));
  sat_cmd->add_option("--formula", sat.formula, "Formula file");
  sat_cmd->add_option("-e,--expr", sat.expr, "Formula text");
  sat_cmd->add_option("--model-out", sat.model_out, "Write the model here on sat");
  sat_cmd->add_option("--max-nodes", sat.max_nodes, "Node limit");
  sat_cmd->add_option("--max-witness-pairs", sat.max_witness_pairs, "Witness bound (abbabe)");
  sat_cmd->add_flag("--trace", sat.trace, "Stream rule applications to stderr");
  sat_cmd->add_flag("--check-invariants", sat.invariants, "Assert cleanliness at every node");

  CheckArgs chk;
  auto* check_cmd = app.add_subcommand("check", "Evaluate a formula in a model");
  check_cmd->add_option("--model", chk.model, "Model JSON file")->required();
  check_cmd->add_option("--world", chk.world, "World name")->required();
  check_cmd->add_option("--formula", chk.formula, "Formula file");
  check_cmd->add_option("-e,--expr", chk.expr, "Formula text");
  check_cmd->add_option("--assign", chk.assign, "x=d,... assignment");

  ClassifyArgs cls;
  auto* classify_cmd = app.add_subcommand("classify", "Fragment membership or complexity status");
  classify_cmd->add_option("--formula", cls.formula, "Formula file");
  classify_cmd->add_option("-e,--expr", cls.expr, "Formula text");
  classify_cmd->add_option("--bundles", cls.bundles, "Comma-separated bundles, e.g. ab,be");
  classify_cmd->add_option("--domain", cls.domain, "constant or increasing");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Print an encoding formula");
  gen_cmd->add_option("family", gen.family,
                      "delta|ebba|abebbe|phi1|phi2|phi3|alpha-n|beta-nt")
      ->required();
  gen_cmd->add_option("--n", gen.n, "Size parameter");
  gen_cmd->add_option("--tiling", gen.tiling, "Tiling instance JSON file");
  gen_cmd->add_option("-o,--out", gen.out, "Write the formula here");

  OracleArgs orc;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive bounded model search");
  oracle_cmd->add_option("--formula", orc.formula, "Formula file");
  oracle_cmd->add_option("-e,--expr", orc.expr, "Formula text");
  oracle_cmd->add_option("--max-depth", orc.b.max_depth, "Tree depth");
  oracle_cmd->add_option("--max-branching", orc.b.max_branching, "Children per world");
  oracle_cmd->add_option("--max-domain", orc.b.max_root_domain, "Root domain size");
  oracle_cmd->add_option("--max-growth", orc.b.max_growth, "New elements per child");
  oracle_cmd->add_option("--state-ceiling", orc.state_ceiling, "Refuse larger searches");
  oracle_cmd->add_option("--model-out", orc.model_out, "Write the model here when found");

  SampleArgs smp;
  std::uint64_t seed = 0;
  auto* sample_cmd = app.add_subcommand("sample", "Random formulas from a grammar");
  sample_cmd->add_option("--grammar", smp.grammar, "foml|lbf|abbabe|abeb|babe");
  sample_cmd->add_option("--size", smp.size, "Size bound");
  sample_cmd->add_option("--count", smp.count, "Number of formulas");
  auto* seed_opt = sample_cmd->add_option("--seed", seed, "Seed (default BUNDLED_FOML_SEED)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  if (seed_opt->count()) smp.seed = seed;

  try {
    if (*sat_cmd) return run_sat(ctx, sat);
    if (*check_cmd) return run_check(ctx, chk);
    if (*classify_cmd) return run_classify(ctx, cls);
    if (*gen_cmd) return run_generate(ctx, gen);
    if (*oracle_cmd) return run_oracle(ctx, orc);
    if (*sample_cmd) return run_sample(ctx, smp);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ModelInvalid& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
