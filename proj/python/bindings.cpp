#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "jointslab/balance.hpp"
#include "jointslab/json_io.hpp"
#include "jointslab/verification.hpp"

namespace py = pybind11;
using namespace jointslab;

namespace {

using Cfg = std::shared_ptr<const JointsConfiguration<PrimeField>>;

PrimeField field_of(const std::string& text) {
  auto spec = parse_field_spec(text);
  if (spec.kind != FieldKind::Prime) throw Error(ErrorCode::UnsupportedKind, "the Python module works over prime fields");
  return PrimeField(spec.modulus);
}

Cfg detect(const std::string& text) {
  auto field = field_of(text);
  return std::make_shared<const JointsConfiguration<PrimeField>>(detect_joints(parse_config(text, field)));
}

std::string generate_config(const std::string& kind, std::size_t d, std::size_t h, std::size_t k, std::size_t m,
                            std::size_t t, std::size_t copies, std::size_t flats, std::size_t points,
                            std::uint64_t seed, std::uint64_t prime) {
  GenerateParams g;
  g.kind = kind;
  g.d = d;
  g.h = h;
  g.k = k;
  g.m = m;
  g.t = t;
  g.copies = copies;
  g.flats = flats;
  g.points = points;
  g.seed = seed;
  return write_config(generate(g, PrimeField(prime)));
}

py::dict summary(const std::string& text) {
  auto cfg = detect(text);
  py::list mult;
  for (std::size_t p = 0; p < cfg->joints.size(); ++p) mult.append(cfg->multiplicity(p));
  py::dict out;
  out["varieties"] = cfg->varieties.size();
  out["joints"] = cfg->joints.size();
  out["multiplicities"] = mult;
  out["components"] = connected_components(*cfg).size();
  return out;
}

std::vector<std::int64_t> alpha_or_zero(const std::optional<std::vector<std::int64_t>>& alpha, std::size_t count) {
  return alpha ? *alpha : std::vector<std::int64_t>(count, 0);
}

/// Per variety id, the number of vanishing conditions kept at each joint.
py::dict ledger_totals(const std::string& text, unsigned n, std::optional<std::vector<std::int64_t>> alpha) {
  auto cfg = detect(text);
  LedgerContext<PrimeField> ctx(cfg, n);
  auto ledger = build_ledgers(ctx, Handicap::from_alpha(alpha_or_zero(alpha, cfg->joints.size())));
  py::dict out;
  for (std::size_t v = 0; v < cfg->varieties.size(); ++v) {
    if (!ledger.per_variety[v]) continue;
    py::dict row;
    for (const auto& [p, c] : ledger.at(v).totals) row[py::str(cfg->joint_id(p))] = c;
    out[py::str(cfg->varieties[v].id)] = row;
  }
  return out;
}

py::dict run_balance(const std::string& text, unsigned n, std::optional<std::string> tau) {
  auto cfg = detect(text);
  LedgerContext<PrimeField> ctx(cfg, n);
  BalanceOptions opt;
  if (tau) opt.tau = mpq_class(*tau);
  auto st = balance(ctx, opt);
  py::list w;
  for (const auto& x : st.W) w.append(x.to_double());
  py::dict out;
  out["status"] = balance_status_name(st.status);
  out["iteration"] = st.iteration;
  out["rebuilds"] = st.rebuilds;
  out["alpha"] = st.alpha.alpha;
  out["W"] = w;
  out["tau"] = st.tau.get_str();
  return out;
}

py::dict rank_summary(const std::string& text, unsigned n, bool balanced) {
  auto cfg = detect(text);
  LedgerContext<PrimeField> ctx(cfg, n);
  auto h = balanced ? balance(ctx).alpha : Handicap::zero(cfg->joints.size());
  auto rc = vanishing_rank_check(ctx, build_ledgers(ctx, h));
  py::dict out;
  out["rank"] = rc.rank;
  out["expected"] = rc.expected;
  out["pass"] = rc.pass;
  out["skipped"] = rc.skipped;
  return out;
}

py::dict bound(const std::string& text) {
  auto cfg = detect(text);
  auto b = bound_report(*cfg);
  py::dict out;
  out["joints"] = b.joint_count;
  out["applicable"] = b.applicable;
  out["constant"] = decimal(b.constant_a);
  out["rhs"] = decimal(b.rhs_a);
  out["pass"] = b.pass();
  return out;
}

std::optional<unsigned> order_at(const std::string& poly, std::size_t nvars, const std::vector<std::uint64_t>& point,
                                 std::uint64_t prime) {
  PrimeField f(prime);
  auto g = parse_polynomial(poly, f, nvars);
  std::vector<PrimeField::Element> p;
  for (auto x : point) p.push_back(f.from_int(static_cast<std::int64_t>(x % prime)));
  return vanishing_order(g, std::span<const PrimeField::Element>(p));
}

}  // namespace

PYBIND11_MODULE(_jointslab, m) {
  m.doc() = "Exact joints configurations, vanishing ledgers and verification checks";
  py::register_exception<Error>(m, "JointslabError", PyExc_ValueError);
  m.attr("DEFAULT_PRIME") = kDefaultPrime;
  m.def("generate", &generate_config, py::arg("kind"), py::kw_only(), py::arg("d") = 6, py::arg("h") = 6,
        py::arg("k") = 0, py::arg("m") = 3, py::arg("t") = 3, py::arg("copies") = 1, py::arg("flats") = 8,
        py::arg("points") = 3, py::arg("seed") = 1, py::arg("prime") = kDefaultPrime,
        "Configuration JSON for a generator kind.");
  m.def("summary", &summary, py::arg("config"), "Joint counts, multiplicities and components.");
  m.def("ledger_totals", &ledger_totals, py::arg("config"), py::arg("n"), py::arg("alpha") = py::none());
  m.def("balance", &run_balance, py::arg("config"), py::arg("n"), py::arg("tau") = py::none(),
        "tau is a rational string such as \"1/20\"; the default is K/n.");
  m.def("rank_check", &rank_summary, py::arg("config"), py::arg("n"), py::arg("balanced") = false);
  m.def("bound", &bound, py::arg("config"));
  m.def("vanishing_order", &order_at, py::arg("polynomial"), py::arg("nvars"), py::arg("point"),
        py::arg("prime") = kDefaultPrime, "None for the zero polynomial.");
}
