#include "jointslab/json_io.hpp"

#include <json.hpp>

namespace jointslab {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ParseError, "config: " + what); }

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad(e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("field '") + key + "' has the wrong type");
  }
}

template <ExactField F>
typename F::Element read_element(const json& j, const F& field) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return field.from_mpz(mpz_class(std::to_string(j.get<std::uint64_t>())));
    return field.from_int(j.get<std::int64_t>());
  }
  if (j.is_string()) return field.parse(j.get<std::string>());
  bad("field elements must be integers or strings, got " + j.dump());
}

template <ExactField F>
Vec<F> read_vec(const json& j, const F& field) {
  if (!j.is_array()) bad("expected an array of elements, got " + j.dump());
  Vec<F> v;
  for (const auto& x : j) v.push_back(read_element(x, field));
  return v;
}

template <ExactField F>
Matrix<F> read_matrix(const json& j, const F& field) {
  if (!j.is_array()) bad("expected an array of vectors, got " + j.dump());
  Matrix<F> m;
  for (const auto& row : j) m.push_back(read_vec(row, field));
  return m;
}

template <ExactField F>
AffineMap<F> read_frame(const json& j, const F& field) {
  if (!j.is_object() || !j.contains("matrix")) bad("frame needs a matrix");
  Matrix<F> a = read_matrix(j.at("matrix"), field);
  Vec<F> b = j.contains("translation") ? read_vec(j.at("translation"), field) : Vec<F>(a.size(), field.zero());
  return AffineMap<F>(field, std::move(a), std::move(b));
}

template <ExactField F>
std::vector<Polynomial<F>> read_polys(const json& j, const F& field, std::size_t nvars) {
  std::vector<Polynomial<F>> out;
  if (!j.is_array()) bad("equations must be an array of strings");
  for (const auto& e : j) {
    if (!e.is_string()) bad("equations must be strings");
    out.push_back(parse_polynomial(e.get<std::string>(), field, nvars));
  }
  return out;
}

template <ExactField F>
VarietySpec<F> read_variety(const json& j, const F& field, std::size_t ambient) {
  if (!j.is_object()) bad("variety must be an object");
  VarietySpec<F> v;
  v.kind = parse_variety_kind(get_or<std::string>(j, "kind", "flat"));
  v.ambient = ambient;
  v.id = get_or<std::string>(j, "id", "");
  if (j.contains("point")) v.point = read_vec(j.at("point"), field);
  if (j.contains("directions")) v.directions = read_matrix(j.at("directions"), field);
  const std::size_t k_default = v.kind == VarietyKind::Flat ? v.directions.size()
                                : v.kind == VarietyKind::HypersurfaceInFlat && !v.directions.empty()
                                    ? v.directions.size() - 1
                                    : 0;
  v.dim = get_or<std::size_t>(j, "dim", k_default);
  if (j.contains("frame")) v.frame = read_frame(j.at("frame"), field);
  v.slice_degree = get_or<unsigned>(j, "slice_degree", 0);
  const json eqs = j.contains("equations") ? j.at("equations") : json::array();
  switch (v.kind) {
    case VarietyKind::Flat: v.degree = 1; break;
    case VarietyKind::Graph: {
      v.equations = read_polys(eqs, field, v.dim);
      int top = 1;
      for (const auto& f : v.equations) top = std::max(top, f.degree());
      unsigned bound = 1;
      for (std::size_t i = 0; i < v.dim; ++i) bound *= static_cast<unsigned>(top);
      v.degree = get_or<unsigned>(j, "degree", bound);
      break;
    }
    case VarietyKind::HypersurfaceInFlat:
      v.equations = read_polys(eqs, field, v.dim + 1);
      v.degree = get_or<unsigned>(j, "degree", v.equations.empty() ? 1u : static_cast<unsigned>(std::max(1, v.equations[0].degree())));
      break;
    case VarietyKind::RawIdealSlice:
      v.equations = read_polys(eqs, field, ambient);
      if (!j.contains("degree")) bad("raw varieties need an explicit degree");
      v.degree = get_or<unsigned>(j, "degree", 1);
      if (j.contains("charts"))
        for (const auto& c : j.at("charts")) {
          if (!c.contains("center") || !c.contains("frame")) bad("supplied charts need center and frame");
          Chart<F> chart{v.dim, read_vec(c.at("center"), field), read_frame(c.at("frame"), field),
                         read_polys(c.contains("series") ? c.at("series") : json::array(), field, v.dim),
                         get_or<unsigned>(c, "truncation", 0)};
          v.supplied_charts.push_back(std::move(chart));
        }
      break;
  }
  validate(v, field);
  return v;
}

template <ExactField F>
ordered_json element_value(const F& field, const typename F::Element& x) {
  if constexpr (std::is_same_v<F, PrimeField>) {
    return x.v;
  } else {
    if (x.get_den() == 1 && x.get_num().fits_slong_p()) return x.get_num().get_si();
    return field.to_string(x);
  }
}

template <ExactField F>
ordered_json vec_json(const F& field, const Vec<F>& v) {
  ordered_json a = ordered_json::array();
  for (const auto& x : v) a.push_back(element_value(field, x));
  return a;
}

template <ExactField F>
ordered_json matrix_json(const F& field, const Matrix<F>& m) {
  ordered_json a = ordered_json::array();
  for (const auto& r : m) a.push_back(vec_json(field, r));
  return a;
}

template <ExactField F>
ordered_json frame_json(const AffineMap<F>& t) {
  ordered_json o;
  o["matrix"] = matrix_json(t.field(), t.matrix());
  o["translation"] = vec_json(t.field(), t.translation());
  return o;
}

template <ExactField F>
ordered_json polys_json(const std::vector<Polynomial<F>>& ps) {
  ordered_json a = ordered_json::array();
  for (const auto& p : ps) a.push_back(to_string(p));
  return a;
}

template <ExactField F>
ordered_json variety_json(const VarietySpec<F>& v, const F& field) {
  ordered_json o;
  o["kind"] = variety_kind_name(v.kind);
  o["dim"] = v.dim;
  if (!v.id.empty()) o["id"] = v.id;
  if (v.kind != VarietyKind::Flat) o["degree"] = v.degree;
  if (!v.point.empty()) o["point"] = vec_json(field, v.point);
  if (!v.directions.empty()) o["directions"] = matrix_json(field, v.directions);
  if (v.frame) o["frame"] = frame_json(*v.frame);
  if (!v.equations.empty()) o["equations"] = polys_json(v.equations);
  if (v.kind == VarietyKind::RawIdealSlice) {
    o["slice_degree"] = v.slice_degree;
    if (!v.supplied_charts.empty()) {
      ordered_json cs = ordered_json::array();
      for (const auto& c : v.supplied_charts) {
        ordered_json co;
        co["center"] = vec_json(field, c.center);
        co["frame"] = frame_json(c.frame);
        co["series"] = polys_json(c.series);
        co["truncation"] = c.truncation;
        cs.push_back(co);
      }
      o["charts"] = cs;
    }
  }
  return o;
}

}  // namespace

FieldSpec parse_field_spec(const std::string& text) {
  json j = parse_json(text);
  if (!j.is_object()) bad("top level must be an object");
  if (!j.contains("field")) return {FieldKind::Prime, kDefaultPrime};
  const json& f = j.at("field");
  const std::string kind = get_or<std::string>(f, "kind", "prime");
  if (kind == "rational") return {FieldKind::Rational, 0};
  if (kind != "prime") bad("unknown field kind '" + kind + "'");
  return {FieldKind::Prime, get_or<std::uint64_t>(f, "p", kDefaultPrime)};
}

template <ExactField F>
ConfigInput<F> parse_config(const std::string& text, const F& field) {
  json j = parse_json(text);
  if (!j.is_object()) bad("top level must be an object");
  ConfigInput<F> in{field, 0, {}, std::nullopt, 0};
  in.seed = get_or<std::uint64_t>(j, "seed", 0);
  if (!j.contains("families") || !j.at("families").is_array()) bad("missing families array");
  std::size_t ambient = get_or<std::size_t>(j, "ambient", 0);
  if (ambient == 0) {
    for (const auto& fam : j.at("families"))
      for (const auto& m : fam.value("members", json::array())) {
        if (m.contains("point")) ambient = std::max(ambient, m.at("point").size());
        else if (m.contains("frame") && m.at("frame").contains("matrix")) ambient = std::max(ambient, m.at("frame").at("matrix").size());
      }
    if (ambient == 0 && j.contains("joints") && !j.at("joints").empty()) ambient = j.at("joints").at(0).size();
    if (ambient == 0) bad("cannot infer the ambient dimension; set \"ambient\"");
  }
  in.ambient = ambient;
  for (const auto& fj : j.at("families")) {
    Family<F> fam;
    fam.k = get_or<std::size_t>(fj, "k", 0);
    fam.m = get_or<std::size_t>(fj, "m", 0);
    if (!fj.contains("members") || !fj.at("members").is_array()) bad("family needs a members array");
    for (const auto& mj : fj.at("members")) fam.members.push_back(read_variety(mj, field, ambient));
    in.families.push_back(std::move(fam));
  }
  if (j.contains("joints")) {
    std::vector<Vec<F>> pts;
    for (const auto& p : j.at("joints")) pts.push_back(read_vec(p, field));
    in.candidates = std::move(pts);
  }
  return in;
}

template <ExactField F>
std::string write_config(const ConfigInput<F>& in) {
  ordered_json o;
  const FieldSpec spec = in.field.spec();
  ordered_json f;
  if (spec.kind == FieldKind::Prime) {
    f["kind"] = "prime";
    f["p"] = spec.modulus;
  } else {
    f["kind"] = "rational";
  }
  o["field"] = f;
  o["ambient"] = in.ambient;
  ordered_json fams = ordered_json::array();
  for (const auto& fam : in.families) {
    ordered_json fo;
    fo["k"] = fam.k;
    fo["m"] = fam.m;
    ordered_json ms = ordered_json::array();
    for (const auto& v : fam.members) ms.push_back(variety_json(v, in.field));
    fo["members"] = ms;
    fams.push_back(fo);
  }
  o["families"] = fams;
  if (in.candidates) o["joints"] = matrix_json(in.field, *in.candidates);
  o["seed"] = in.seed;
  return o.dump(2) + "\n";
}

template <ExactField F>
ConfigInput<F> to_input(const JointsConfiguration<F>& cfg, std::uint64_t seed) {
  ConfigInput<F> in{cfg.field, 0, {}, std::nullopt, 0};
  in.ambient = cfg.ambient;
  in.families = cfg.families;
  in.candidates = cfg.joints;
  in.seed = seed;
  return in;
}

template <ExactField F>
std::string element_json(const F& field, const typename F::Element& x) {
  return element_value(field, x).dump();
}

#define JOINTSLAB_INSTANTIATE(F)                                                            \
  template ConfigInput<F> parse_config<F>(const std::string&, const F&);                   \
  template std::string write_config<F>(const ConfigInput<F>&);                              \
  template ConfigInput<F> to_input<F>(const JointsConfiguration<F>&, std::uint64_t);        \
  template std::string element_json<F>(const F&, const typename F::Element&);

JOINTSLAB_INSTANTIATE(PrimeField)
JOINTSLAB_INSTANTIATE(RationalField)

}  // namespace jointslab
