#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "jointslab/json_io.hpp"
#include "jointslab/parallel.hpp"
#include "jointslab/verification.hpp"

using namespace jointslab;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCapHit = 3;

struct Options {
  std::string config;
  std::optional<unsigned> n;
  std::string tau;
  std::size_t cap = 10000;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> field_p;
  std::size_t workers = 0;
  std::string out_dir = ".";
  std::string normalizer = "binomial";
  std::string handicap = "zero";
  std::string alpha;

  // generate
  GenerateParams gen;
  bool rational = false;
  std::string out;

  // verify witness / sz
  std::optional<std::size_t> joint;
  std::string poly;
  std::optional<unsigned> order;
  unsigned degree = 4;
  std::size_t nvars = 2;
  std::string set = "0,1,2,3";
  std::size_t trials = 1;
};

class Run {
 public:
  Run(std::string command, const Options& opt) : command_(std::move(command)), opt_(opt), start_(clock::now()) {}

  void write(const std::string& name, const std::string& text) {
    fs::create_directories(opt_.out_dir);
    fs::path path = fs::path(opt_.out_dir) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
    f << text;
    outputs_.push_back(path.string());
  }

  void time(const std::string& label) {
    auto now = clock::now();
    timings_[label] = std::chrono::duration<double>(now - lap_).count();
    lap_ = now;
  }

  double elapsed() const { return std::chrono::duration<double>(clock::now() - start_).count(); }

  void set_field(const FieldSpec& spec) { field_ = spec; }
  void set_n(unsigned n) { n_ = n; }

  void finish() {
    ordered_json m;
    m["command"] = command_;
    m["tool_version"] = JOINTSLAB_VERSION;
    m["config"] = opt_.config;
    if (field_.kind == FieldKind::Prime) m["field"] = {{"kind", "prime"}, {"p", field_.modulus}};
    else m["field"] = {{"kind", "rational"}};
    if (n_) m["n"] = *n_;
    else m["n"] = nullptr;
    m["seed"] = opt_.seed;
    m["workers"] = default_workers();
    ordered_json outs = ordered_json::array();
    for (const auto& o : outputs_) outs.push_back(o);
    outs.push_back((fs::path(opt_.out_dir) / "manifest.json").string());
    m["outputs"] = outs;
    ordered_json t = timings_;
    t["total_seconds"] = elapsed();
    m["timings"] = t;
    fs::create_directories(opt_.out_dir);
    std::ofstream(fs::path(opt_.out_dir) / "manifest.json") << m.dump(2) << "\n";
  }

 private:
  using clock = std::chrono::steady_clock;
  std::string command_;
  const Options& opt_;
  clock::time_point start_;
  clock::time_point lap_ = clock::now();
  FieldSpec field_{FieldKind::Prime, kDefaultPrime};
  std::optional<unsigned> n_;
  std::vector<std::string> outputs_;
  ordered_json timings_ = ordered_json::object();
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ordered_json big(const mpz_class& x) {
  if (x.fits_slong_p()) return x.get_si();
  return x.get_str();
}

ordered_json rational_json(const mpq_class& x) {
  if (x.get_den() == 1) return big(x.get_num());
  return x.get_str();
}

mpq_class parse_rational(const std::string& text) {
  auto dot = text.find('.');
  try {
    if (dot == std::string::npos) {
      mpq_class q(text);
      q.canonicalize();
      return q;
    }
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, text.size() - dot - 1);
    mpq_class q{mpz_class(digits), den};
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::InvalidArgument, "not a rational number: '" + text + "'");
  }
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoll(item));
  return out;
}

unsigned default_n(std::size_t d) {
  if (d <= 3) return 6;
  if (d <= 5) return 4;
  return 3;
}

void print(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

template <ExactField F>
struct Loaded {
  std::shared_ptr<const JointsConfiguration<F>> cfg;
  std::uint64_t seed = 0;
};

template <ExactField F>
Loaded<F> load(const std::string& text, const F& field) {
  auto in = parse_config(text, field);
  auto cfg = std::make_shared<JointsConfiguration<F>>(detect_joints(in));
  for (std::size_t v = 0; v < cfg->varieties.size(); ++v)
    if (cfg->varieties[v].id.empty()) cfg->varieties[v].id = "V" + std::to_string(v);
  return {cfg, in.seed};
}

template <ExactField F>
BalanceOptions balance_options(const Options& opt) {
  BalanceOptions b;
  if (!opt.tau.empty()) b.tau = parse_rational(opt.tau);
  b.cap = opt.cap;
  if (opt.normalizer == "flat") b.normalizer = Normalizer::FlatDimension;
  else if (opt.normalizer != "binomial") throw Error(ErrorCode::InvalidArgument, "normalizer must be binomial or flat");
  return b;
}

/// One connected component with its own ledger context.
template <ExactField F>
struct Component {
  std::vector<std::size_t> joints;  // global indices
  std::shared_ptr<const JointsConfiguration<F>> cfg;
  std::unique_ptr<LedgerContext<F>> ctx;
  Handicap alpha;
  BasisLedger<F> ledger;
  std::optional<BalanceState<F>> balance;
};

template <ExactField F>
std::vector<Component<F>> split(const JointsConfiguration<F>& cfg, unsigned n) {
  std::vector<Component<F>> out;
  for (const auto& set : component_joint_sets(cfg)) {
    Component<F> c;
    c.joints = set;
    c.cfg = std::make_shared<const JointsConfiguration<F>>(restrict_to(cfg, set));
    c.ctx = std::make_unique<LedgerContext<F>>(c.cfg, n);
    out.push_back(std::move(c));
  }
  return out;
}

/// Builds ledgers for every component: balanced, zero, or an explicit global alpha.
template <ExactField F>
void prepare_ledgers(std::vector<Component<F>>& comps, const Options& opt, bool balanced) {
  std::vector<std::int64_t> global;
  if (!opt.alpha.empty()) global = parse_int_list(opt.alpha);
  for (auto& c : comps) {
    if (balanced) {
      c.balance = jointslab::balance(*c.ctx, balance_options<F>(opt));
      c.alpha = c.balance->alpha;
      c.ledger = c.balance->ledger;
      continue;
    }
    std::vector<std::int64_t> a;
    for (auto p : c.joints) {
      if (!global.empty() && p >= global.size())
        throw Error(ErrorCode::InvalidArgument, "--alpha needs one entry per joint");
      a.push_back(global.empty() ? 0 : global[p]);
    }
    c.alpha = Handicap::from_alpha(a);
    c.ledger = build_ledgers(*c.ctx, c.alpha);
  }
}

template <ExactField F>
std::pair<std::string, std::string> ledger_dumps(const std::vector<Component<F>>& comps) {
  std::string csv = "variety,joint,r,count\n";
  ordered_json summary = ordered_json::object();
  for (const auto& c : comps) {
    std::string part = ledger_csv(*c.cfg, c.ledger);
    csv += part.substr(part.find('\n') + 1);
    const ordered_json part_summary = ordered_json::parse(ledger_summary_json(*c.cfg, c.ledger));
    for (const auto& [k, v] : part_summary.items()) summary[k] = v;
  }
  return {csv, summary.dump(2) + "\n"};
}

template <ExactField F>
ordered_json alpha_json(const JointsConfiguration<F>& cfg, const std::vector<Component<F>>& comps) {
  ordered_json alpha = ordered_json::object(), w = ordered_json::object(), list = ordered_json::array();
  std::vector<std::int64_t> a(cfg.joints.size(), 0);
  std::vector<std::string> ws(cfg.joints.size());
  for (const auto& c : comps)
    for (std::size_t i = 0; i < c.joints.size(); ++i) {
      a[c.joints[i]] = c.alpha.alpha[i];
      if (c.balance) ws[c.joints[i]] = c.balance->W[i].to_string();
    }
  for (std::size_t p = 0; p < cfg.joints.size(); ++p) {
    alpha[cfg.joint_id(p)] = a[p];
    w[cfg.joint_id(p)] = ws[p];
  }
  for (const auto& c : comps) {
    ordered_json co;
    ordered_json js = ordered_json::array();
    for (auto p : c.joints) js.push_back(cfg.joint_id(p));
    co["joints"] = js;
    if (c.balance) {
      co["status"] = balance_status_name(c.balance->status);
      co["iterations"] = c.balance->iteration;
      co["rebuilds"] = c.balance->rebuilds;
      co["tau"] = rational_json(c.balance->tau);
      co["distinct_profiles"] = c.balance->distinct_profiles;
    }
    list.push_back(co);
  }
  ordered_json out;
  out["alpha"] = alpha;
  out["W"] = w;
  out["components"] = list;
  return out;
}

template <ExactField F>
bool any_cap_hit(const std::vector<Component<F>>& comps) {
  for (const auto& c : comps)
    if (c.balance && c.balance->status == BalanceStatus::CapHit) return true;
  return false;
}

ordered_json rank_json(const std::vector<RankCheck>& checks) {
  ordered_json out;
  out["check"] = "rank";
  std::size_t lhs = 0, rhs = 0;
  bool pass = true, skipped = false;
  ordered_json parts = ordered_json::array();
  for (const auto& r : checks) {
    lhs += r.rank;
    rhs += r.expected;
    if (r.skipped) skipped = true;
    else pass = pass && r.pass;
    ordered_json p;
    p["rank"] = r.rank;
    p["expected"] = r.expected;
    p["rows"] = r.rows;
    p["pass"] = r.pass;
    if (r.skipped) p["skipped"] = *r.skipped;
    parts.push_back(p);
  }
  out["lhs"] = lhs;
  out["rhs"] = rhs;
  if (skipped) {
    out["pass"] = nullptr;
    out["skipped"] = "size";
  } else {
    out["pass"] = pass;
  }
  out["components"] = parts;
  return out;
}

ordered_json count_json(const std::vector<CountCheck>& checks) {
  ordered_json out;
  out["check"] = "count";
  mpz_class lhs = 0, rhs = 0;
  bool pass = true;
  ordered_json parts = ordered_json::array();
  for (const auto& c : checks) {
    lhs += c.lhs;
    rhs += c.rhs;
    pass = pass && c.pass;
    parts.push_back({{"lhs", big(c.lhs)}, {"rhs", big(c.rhs)}, {"pass", c.pass}});
  }
  out["lhs"] = big(lhs);
  out["rhs"] = big(rhs);
  out["pass"] = pass;
  out["components"] = parts;
  return out;
}

ordered_json bound_json(const BoundReport& r) {
  ordered_json out;
  out["check"] = "bound";
  out["lhs"] = r.joint_count;
  out["rhs"] = r.applicable ? decimal(r.rhs_a) : "n/a";
  out["pass"] = r.pass();
  out["applicable"] = r.applicable;
  out["s"] = r.s;
  ordered_json degs = ordered_json::array();
  for (const auto& d : r.family_degrees) degs.push_back(big(d));
  out["family_degrees"] = degs;
  if (!r.applicable) return out;
  out["a"] = {{"joints", r.joint_count},
              {"constant", r.constant_a.to_string()},
              {"constant_decimal", decimal(r.constant_a)},
              {"rhs", r.rhs_a.to_string()},
              {"rhs_decimal", decimal(r.rhs_a)},
              {"pass", r.pass_a}};
  out["b"] = {{"multiplicity_sum_lo", rational_json(r.multiplicity_lo)},
              {"multiplicity_sum_hi", rational_json(r.multiplicity_hi)},
              {"multiplicity_sum_decimal", decimal(r.multiplicity_lo)},
              {"bracket_bits", r.bracket_bits},
              {"exact", r.multiplicity_exact},
              {"constant", r.constant_b.to_string()},
              {"constant_decimal", decimal(r.constant_b)},
              {"rhs", r.rhs_b.to_string()},
              {"rhs_decimal", decimal(r.rhs_b)},
              {"decided", r.decided_b},
              {"pass", r.pass_b}};
  return out;
}

template <ExactField F>
ordered_json witness_json(const JointsConfiguration<F>& cfg, std::size_t p, const Polynomial<F>& g, const Witness<F>& w) {
  ordered_json o;
  o["joint"] = cfg.joint_id(p);
  o["g"] = to_string(g);
  o["order"] = w.order;
  o["orders"] = w.orders;
  ordered_json gs = ordered_json::array();
  for (const auto& x : w.gammas) gs.push_back(ordered_json::parse(x.to_string()));
  o["gammas"] = gs;
  o["value"] = ordered_json::parse(element_json(cfg.field, w.value));
  o["pass"] = w.pass;
  return o;
}

template <ExactField F>
ordered_json run_witnesses(const JointsConfiguration<F>& cfg, const Options& opt, std::mt19937_64& rng) {
  std::vector<std::size_t> joints;
  if (opt.joint) joints.push_back(*opt.joint);
  else
    for (std::size_t p = 0; p < cfg.joints.size(); ++p) joints.push_back(p);
  ordered_json list = ordered_json::array();
  std::size_t passed = 0, total = 0;
  for (auto p : joints) {
    if (p >= cfg.joints.size()) throw Error(ErrorCode::UnknownJoint, "joint " + std::to_string(p) + " does not exist");
    for (std::size_t t = 0; t < opt.trials; ++t) {
      Polynomial<F> g = opt.poly.empty()
                            ? random_polynomial_at(cfg.field, cfg.joints[p],
                                                   opt.order.value_or(static_cast<unsigned>(uniform_below(rng, opt.degree + 1))),
                                                   opt.degree, rng)
                            : parse_polynomial(opt.poly, cfg.field, cfg.ambient);
      auto charts = joint_charts(cfg, p, std::max(1, g.degree()));
      auto w = hasse_vanishing_witness(cfg.joints[p], charts, g);
      ++total;
      if (w.pass) ++passed;
      list.push_back(witness_json(cfg, p, g, w));
    }
  }
  ordered_json out;
  out["check"] = "witness";
  out["lhs"] = passed;
  out["rhs"] = total;
  out["pass"] = passed == total;
  out["instances"] = list;
  return out;
}

int exit_for(bool pass) { return pass ? kExitPass : kExitFail; }

// Emits the file version (no timings) and stdout version (with timings).
void emit(Run& run, const std::string& file, ordered_json j) {
  run.write(file, j.dump(2) + "\n");
  j["timings"] = {{"seconds", run.elapsed()}};
  print(j);
}

template <ExactField F>
int cmd_generate(const Options& opt, const F& field, Run& run) {
  GenerateParams gp = opt.gen;
  gp.seed = opt.seed;
  auto in = generate(gp, field);
  run.time("generate");
  std::string text = write_config(in);
  if (!opt.out.empty()) {
    fs::path p(opt.out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
  } else {
    run.write("config.json", text);
  }
  std::size_t members = 0;
  for (const auto& f : in.families) members += f.members.size();
  std::cout << "generated " << gp.kind << ": " << members << " varieties in " << in.families.size()
            << (in.families.size() == 1 ? " family, " : " families, ")
            << (in.candidates ? in.candidates->size() : 0) << " candidate joints\n";
  return kExitPass;
}

template <ExactField F>
int cmd_ledger(const Options& opt, const Loaded<F>& L, unsigned n, Run& run) {
  auto comps = split(*L.cfg, n);
  prepare_ledgers(comps, opt, opt.handicap == "balanced");
  run.time("ledger");
  auto [csv, summary] = ledger_dumps(comps);
  run.write("ledger.csv", csv);
  run.write("ledger_summary.json", summary);
  std::cout << "ledger: " << L.cfg->joints.size() << " joints, " << L.cfg->varieties.size() << " varieties, n = " << n
            << "\n";
  return any_cap_hit(comps) ? kExitCapHit : kExitPass;
}

template <ExactField F>
int cmd_balance(const Options& opt, const Loaded<F>& L, unsigned n, Run& run) {
  auto comps = split(*L.cfg, n);
  prepare_ledgers(comps, opt, true);
  run.time("balance");
  for (std::size_t i = 0; i < comps.size(); ++i) {
    std::string name = comps.size() == 1 ? "balance_trace.csv" : "balance_trace_c" + std::to_string(i) + ".csv";
    run.write(name, balance_trace_csv(comps[i].balance->trace));
  }
  ordered_json a = alpha_json(*L.cfg, comps);
  run.write("alpha.json", a.dump(2) + "\n");
  auto [csv, summary] = ledger_dumps(comps);
  run.write("ledger.csv", csv);
  run.write("ledger_summary.json", summary);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto& st = *comps[i].balance;
    std::cout << "component " << i << ": " << balance_status_name(st.status) << " after " << st.iteration
              << " moves, " << st.rebuilds << " rebuilds, tau = " << st.tau.get_str() << "\n";
  }
  return any_cap_hit(comps) ? kExitCapHit : kExitPass;
}

template <ExactField F>
int cmd_verify(const std::string& check, const Options& opt, const Loaded<F>& L, unsigned n, Run& run) {
  const auto& cfg = *L.cfg;
  std::mt19937_64 rng(opt.seed);
  if (check == "bound") {
    auto r = bound_report(cfg);
    run.time("bound");
    emit(run, "verify_bound.json", bound_json(r));
    return exit_for(r.pass());
  }
  if (check == "witness") {
    ordered_json j = run_witnesses(cfg, opt, rng);
    run.time("witness");
    bool pass = j["pass"].get<bool>();
    emit(run, "verify_witness.json", j);
    return exit_for(pass);
  }
  auto comps = split(cfg, n);
  prepare_ledgers(comps, opt, opt.handicap == "balanced");
  run.time("ledger");
  if (check == "rank") {
    std::vector<RankCheck> rs;
    for (auto& c : comps) rs.push_back(vanishing_rank_check(*c.ctx, c.ledger));
    run.time("rank");
    auto j = rank_json(rs);
    bool pass = j["pass"].is_null() || j["pass"].get<bool>();
    emit(run, "verify_rank.json", j);
    return exit_for(pass);
  }
  std::vector<CountCheck> cs;
  for (auto& c : comps) cs.push_back(parameter_count_check(*c.ctx, c.ledger));
  run.time("count");
  auto j = count_json(cs);
  bool pass = j["pass"].get<bool>();
  emit(run, "verify_count.json", j);
  return exit_for(pass);
}

template <ExactField F>
int cmd_sz(const Options& opt, const F& field, Run& run) {
  std::vector<typename F::Element> A;
  std::stringstream ss(opt.set);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) A.push_back(field.parse(item));
  std::mt19937_64 rng(opt.seed);
  ordered_json list = ordered_json::array();
  std::size_t passed = 0;
  mpz_class lhs = 0, rhs = 0;
  for (std::size_t t = 0; t < opt.trials; ++t) {
    Polynomial<F> g(field, opt.nvars);
    if (!opt.poly.empty()) {
      g = parse_polynomial(opt.poly, field, opt.nvars);
    } else {
      auto exps = exponents_in_degree_range(opt.nvars, 0, opt.degree);
      while (g.is_zero())
        for (std::size_t i = 0; i < 6; ++i) g.add_term(exps[uniform_below(rng, exps.size())], field.random(rng));
    }
    auto r = schwartz_zippel_mult(g, A);
    lhs += r.lhs;
    rhs += r.rhs;
    if (r.pass) ++passed;
    list.push_back({{"g", to_string(g)}, {"lhs", big(r.lhs)}, {"rhs", big(r.rhs)}, {"pass", r.pass}});
  }
  run.time("sz");
  ordered_json j;
  j["check"] = "sz";
  j["lhs"] = big(lhs);
  j["rhs"] = big(rhs);
  j["pass"] = passed == opt.trials;
  j["instances"] = list;
  emit(run, "verify_sz.json", j);
  return exit_for(passed == opt.trials);
}

template <ExactField F>
int cmd_pipeline(Options opt, const Loaded<F>& L, unsigned n, Run& run) {
  const auto& cfg = *L.cfg;
  auto comps = split(cfg, n);
  run.time("detect");
  prepare_ledgers(comps, opt, true);
  run.time("balance");
  for (std::size_t i = 0; i < comps.size(); ++i) {
    std::string name = comps.size() == 1 ? "balance_trace.csv" : "balance_trace_c" + std::to_string(i) + ".csv";
    run.write(name, balance_trace_csv(comps[i].balance->trace));
  }
  run.write("alpha.json", alpha_json(cfg, comps).dump(2) + "\n");
  auto [csv, summary] = ledger_dumps(comps);
  run.write("ledger.csv", csv);
  run.write("ledger_summary.json", summary);

  std::vector<RankCheck> rs;
  std::vector<CountCheck> cs;
  for (auto& c : comps) {
    rs.push_back(vanishing_rank_check(*c.ctx, c.ledger));
    cs.push_back(parameter_count_check(*c.ctx, c.ledger));
  }
  run.time("rank_count");
  std::mt19937_64 rng(opt.seed);
  opt.joint.reset();
  ordered_json witness = run_witnesses(cfg, opt, rng);
  run.time("witness");
  auto bound = bound_report(cfg);
  ordered_json per = ordered_json::array();
  bool comp_bounds = true;
  for (const auto& c : comps) {
    auto b = bound_report(*c.cfg);
    comp_bounds = comp_bounds && b.pass();
    per.push_back({{"joints", b.joint_count}, {"pass_a", b.pass_a}, {"pass_b", b.pass_b}});
  }
  run.time("bound");

  ordered_json report;
  report["joints"] = cfg.joints.size();
  report["varieties"] = cfg.varieties.size();
  report["components"] = comps.size();
  report["n"] = n;
  report["rank"] = rank_json(rs);
  report["count"] = count_json(cs);
  report["witness"] = witness;
  report["bound"] = bound_json(bound);
  report["bound"]["components"] = per;
  const bool rank_ok = report["rank"]["pass"].is_null() || report["rank"]["pass"].get<bool>();
  const bool pass = rank_ok && report["count"]["pass"].get<bool>() && witness["pass"].get<bool>() && bound.pass() &&
                    comp_bounds;
  const bool cap = any_cap_hit(comps);
  report["balance"] = cap ? "CapHit" : "Balanced";
  report["pass"] = pass;
  run.write("pipeline.json", report.dump(2) + "\n");
  std::cout << "pipeline: " << cfg.joints.size() << " joints in " << comps.size() << " component(s), n = " << n
            << "; rank " << (rank_ok ? "pass" : "FAIL") << ", count " << (report["count"]["pass"].get<bool>() ? "pass" : "FAIL")
            << ", witness " << (witness["pass"].get<bool>() ? "pass" : "FAIL") << ", bound "
            << (bound.pass() && comp_bounds ? "pass" : "FAIL") << ", balance " << report["balance"].get<std::string>()
            << " (" << run.elapsed() << " s)\n";
  if (cap) return kExitCapHit;
  return exit_for(pass);
}

int dispatch(const std::string& command, const std::string& check, Options& opt) {
  Run run(command, opt);
  int code = kExitPass;
  if (command == "generate" || (command == "verify" && check == "sz")) {
    FieldSpec spec = opt.rational ? FieldSpec{FieldKind::Rational, 0}
                                  : FieldSpec{FieldKind::Prime, opt.field_p.value_or(kDefaultPrime)};
    run.set_field(spec);
    code = with_field(spec, [&](auto field) -> int {
      if (command == "generate") return cmd_generate(opt, field, run);
      return cmd_sz(opt, field, run);
    });
  } else {
    if (opt.config.empty()) throw CLI::RequiredError("--config");
    const std::string text = read_file(opt.config);
    FieldSpec spec = opt.field_p ? FieldSpec{FieldKind::Prime, *opt.field_p} : parse_field_spec(text);
    run.set_field(spec);
    code = with_field(spec, [&](auto field) -> int {
      auto L = load(text, field);
      const unsigned n = opt.n.value_or(default_n(L.cfg->ambient));
      run.set_n(n);
      run.time("load");
      if (command == "ledger") return cmd_ledger(opt, L, n, run);
      if (command == "balance") return cmd_balance(opt, L, n, run);
      if (command == "verify") return cmd_verify(check, opt, L, n, run);
      return cmd_pipeline(opt, L, n, run);
    });
  }
  run.finish();
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joints configurations: vanishing-condition ledgers, handicap balancing and verification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(JOINTSLAB_VERSION));
  Options opt;

  auto common = [&](CLI::App* sub, bool config) {
    if (config) sub->add_option("--config", opt.config, "configuration JSON")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--field-p", opt.field_p, "prime modulus (overrides the config's field)");
    sub->add_option("--workers", opt.workers, "worker threads (JOINTSLAB_WORKERS overrides)");
    sub->add_option("--out-dir", opt.out_dir, "directory for outputs and manifest.json");
  };
  auto ledger_flags = [&](CLI::App* sub) {
    sub->add_option("--n", opt.n, "degree bound n");
    sub->add_option("--tau", opt.tau, "balance gap threshold (rational, e.g. 1/10)");
    sub->add_option("--cap", opt.cap, "total ledger rebuilds allowed while balancing");
    sub->add_option("--normalizer", opt.normalizer, "W normalizer: binomial or flat");
  };
  auto handicap_flags = [&](CLI::App* sub) {
    sub->add_option("--handicap", opt.handicap, "zero or balanced")->check(CLI::IsMember({"zero", "balanced"}));
    sub->add_option("--alpha", opt.alpha, "explicit handicaps, comma separated, one per joint");
  };

  auto* gen = app.add_subcommand("generate", "write a generated configuration");
  gen->set_help_flag("--help", "print this help message and exit");
  common(gen, false);
  gen->add_option("--kind", opt.gen.kind, "generator kind")->required()->check(CLI::IsMember(generator_kinds()));
  gen->add_option("--d", opt.gen.d, "ambient dimension");
  gen->add_option("--h", opt.gen.h, "hyperplane count");
  gen->add_option("--k", opt.gen.k, "member dimension (0: d / m)");
  gen->add_option("--m", opt.gen.m, "members per joint");
  gen->add_option("--t", opt.gen.t, "grid side");
  gen->add_option("--copies", opt.gen.copies, "disjoint translated copies");
  gen->add_option("--flats", opt.gen.flats, "random flats");
  gen->add_option("--points", opt.gen.points, "random anchor points");
  gen->add_flag("--rational", opt.rational, "use the rationals");
  gen->add_option("--out", opt.out, "config path (default <out-dir>/config.json)");

  auto* led = app.add_subcommand("ledger", "dump per-variety vanishing-condition counts");
  common(led, true);
  ledger_flags(led);
  handicap_flags(led);

  auto* bal = app.add_subcommand("balance", "balance handicaps per connected component");
  common(bal, true);
  ledger_flags(bal);

  auto* ver = app.add_subcommand("verify", "run one verification check");
  ver->require_subcommand(1);
  std::map<std::string, CLI::App*> checks;
  for (const char* name : {"rank", "count", "witness", "sz", "bound"}) {
    auto* c = ver->add_subcommand(name);
    common(c, std::string(name) != "sz");
    checks[name] = c;
  }
  for (const char* name : {"rank", "count"}) {
    ledger_flags(checks[name]);
    handicap_flags(checks[name]);
  }
  checks["witness"]->add_option("--joint", opt.joint, "joint index (default: every joint)");
  checks["witness"]->add_option("--poly", opt.poly, "polynomial g (default: random)");
  checks["witness"]->add_option("--order", opt.order, "vanishing order for random g");
  checks["witness"]->add_option("--degree", opt.degree, "degree bound for random g");
  checks["witness"]->add_option("--trials", opt.trials, "random g per joint");
  checks["sz"]->add_option("--poly", opt.poly, "polynomial g (default: random)");
  checks["sz"]->add_option("--nvars", opt.nvars, "number of variables");
  checks["sz"]->add_option("--set", opt.set, "finite set A, comma separated");
  checks["sz"]->add_option("--degree", opt.degree, "degree bound for random g");
  checks["sz"]->add_option("--trials", opt.trials, "random polynomials");
  checks["sz"]->add_flag("--rational", opt.rational, "use the rationals");

  auto* pipe = app.add_subcommand("pipeline", "detect, decompose, balance, verify and bound");
  common(pipe, true);
  ledger_flags(pipe);
  pipe->add_option("--trials", opt.trials, "random witness polynomials per joint");
  pipe->add_option("--degree", opt.degree, "degree bound for witness polynomials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  set_default_workers(resolve_workers(opt.workers));

  std::string command, check;
  for (auto* sub : app.get_subcommands()) command = sub->get_name();
  if (command == "verify")
    for (auto* sub : ver->get_subcommands()) check = sub->get_name();
  try {
    return dispatch(command, check, opt);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
