#include "jointslab/configuration.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "jointslab/parallel.hpp"

namespace jointslab {

template <ExactField F>
std::vector<std::size_t> JointsConfiguration<F>::varieties_at(std::size_t p) const {
  std::set<std::size_t> out;
  for (const auto& t : tuples.at(p)) out.insert(t.begin(), t.end());
  return {out.begin(), out.end()};
}

template <ExactField F>
std::vector<std::size_t> JointsConfiguration<F>::joints_on(std::size_t v) const {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < joints.size(); ++p) {
    bool hit = false;
    for (const auto& t : tuples[p])
      if (std::find(t.begin(), t.end(), v) != t.end()) hit = true;
    if (hit) out.push_back(p);
  }
  return out;
}

template <ExactField F>
bool is_joint(const Vec<F>& p, const std::vector<const Chart<F>*>& charts, const F& field) {
  std::size_t total = 0;
  Matrix<F> stacked;
  for (const auto* c : charts) {
    if (c->ambient() != p.size()) throw Error(ErrorCode::DimensionMismatch, "chart lives in another ambient space");
    total += c->dim;
    for (auto& row : tangent_space(*c)) stacked.push_back(std::move(row));
  }
  if (total != p.size()) throw Error(ErrorCode::DimensionMismatch, "tuple dimensions do not sum to the ambient dimension");
  return rank(stacked, field) == p.size();
}

template <ExactField F>
void validate_input(const ConfigInput<F>& in) {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfiguration, msg); };
  const std::size_t d = in.ambient;
  if (d < 2) bad("ambient dimension must be at least 2");
  if (in.families.empty()) bad("configuration needs at least one family");
  std::size_t sum = 0;
  for (const auto& fam : in.families) {
    if (fam.k == 0 || fam.m == 0) bad("family dimension and multiplicity must be positive");
    sum += fam.k * fam.m;
    for (const auto& v : fam.members) {
      if (v.ambient != d) bad("member " + v.id + " lives in the wrong ambient dimension");
      if (v.dim != fam.k) bad("member " + v.id + " has the wrong dimension for its family");
      validate(v, in.field);
    }
  }
  if (sum != d) bad("family dimensions times multiplicities must sum to the ambient dimension");
  if (in.candidates)
    for (const auto& p : *in.candidates)
      if (p.size() != d) bad("candidate point has the wrong dimension");
}

namespace {

// All increasing m-subsets of {0..n-1}, lexicographically.
std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t m) {
  std::vector<std::vector<std::size_t>> out;
  if (m > n) return out;
  std::vector<std::size_t> c(m);
  std::iota(c.begin(), c.end(), 0);
  for (;;) {
    out.push_back(c);
    std::size_t i = m;
    while (i > 0 && c[i - 1] == n - m + i - 1) --i;
    if (i == 0) return out;
    ++c[i - 1];
    for (std::size_t j = i; j < m; ++j) c[j] = c[j - 1] + 1;
  }
}

// Calls fn(choice) for every element of the product of the lists, the first
// list varying slowest.
template <class T, class Fn>
void for_each_product(const std::vector<std::vector<T>>& lists, Fn&& fn) {
  for (const auto& l : lists)
    if (l.empty()) return;
  std::vector<std::size_t> idx(lists.size(), 0);
  std::vector<const T*> choice(lists.size());
  for (;;) {
    for (std::size_t i = 0; i < lists.size(); ++i) choice[i] = &lists[i][idx[i]];
    fn(choice);
    std::size_t i = lists.size();
    while (i > 0) {
      if (++idx[i - 1] < lists[i - 1].size()) break;
      idx[i - 1] = 0;
      --i;
    }
    if (i == 0) return;
  }
}

// Offsets of each family's first member in the flattened variety list.
template <ExactField F>
std::vector<std::size_t> family_offsets(const std::vector<Family<F>>& families) {
  std::vector<std::size_t> off;
  std::size_t o = 0;
  for (const auto& f : families) {
    off.push_back(o);
    o += f.members.size();
  }
  return off;
}

// Unique intersection point of flats, if any.
template <ExactField F>
std::optional<Vec<F>> flat_intersection(const std::vector<const VarietySpec<F>*>& flats, const F& field) {
  const std::size_t d = flats.front()->ambient;
  Matrix<F> a;
  Vec<F> b;
  for (const auto* v : flats)
    for (const auto& e : defining_equations(*v, field)) {
      Vec<F> row(d, field.zero());
      Vec<F> origin(d, field.zero());
      for (std::size_t i = 0; i < d; ++i) row[i] = e.coefficient(ExponentVector::unit(d, i));
      a.push_back(std::move(row));
      b.push_back(field.neg(e.evaluate(origin)));
    }
  if (rank(a, field) != d) return std::nullopt;
  return solve(a, b, d, field);
}

template <ExactField F>
std::vector<Vec<F>> enumerate_flat_points(const ConfigInput<F>& in) {
  std::vector<std::vector<std::vector<std::size_t>>> per_family;
  for (const auto& fam : in.families) per_family.push_back(combinations(fam.members.size(), fam.m));
  std::vector<Vec<F>> points;
  std::set<Vec<F>> seen;
  for_each_product(per_family, [&](const std::vector<const std::vector<std::size_t>*>& choice) {
    std::vector<const VarietySpec<F>*> flats;
    for (std::size_t f = 0; f < choice.size(); ++f)
      for (auto i : *choice[f]) flats.push_back(&in.families[f].members[i]);
    auto p = flat_intersection(flats, in.field);
    if (p && seen.insert(*p).second) points.push_back(*p);
  });
  return points;
}

// Qualifying tuples at p, as flattened indices.
template <ExactField F>
std::vector<Tuple> qualifying_tuples(const ConfigInput<F>& in, const Vec<F>& p) {
  const auto off = family_offsets(in.families);
  std::vector<std::vector<std::size_t>> through(in.families.size());
  std::map<std::size_t, Chart<F>> charts;
  for (std::size_t f = 0; f < in.families.size(); ++f) {
    const auto& fam = in.families[f];
    for (std::size_t i = 0; i < fam.members.size(); ++i) {
      const auto& v = fam.members[i];
      if (!contains_point(v, p, in.field)) continue;
      try {
        charts.emplace(off[f] + i, make_chart(v, p, 1, in.field));
        through[f].push_back(i);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularPoint && e.code() != ErrorCode::UnsupportedKind &&
            e.code() != ErrorCode::NotOnVariety)
          throw;
      }
    }
  }
  std::vector<std::vector<Tuple>> per_family;
  for (std::size_t f = 0; f < in.families.size(); ++f) {
    std::vector<Tuple> options;
    for (const auto& c : combinations(through[f].size(), in.families[f].m)) {
      Tuple t;
      for (auto j : c) t.push_back(off[f] + through[f][j]);
      options.push_back(std::move(t));
    }
    per_family.push_back(std::move(options));
  }
  std::vector<Tuple> out;
  for_each_product(per_family, [&](const std::vector<const Tuple*>& choice) {
    Tuple t;
    std::vector<const Chart<F>*> cs;
    for (const auto* part : choice)
      for (auto v : *part) {
        t.push_back(v);
        cs.push_back(&charts.at(v));
      }
    if (is_joint(p, cs, in.field)) out.push_back(std::move(t));
  });
  return out;
}

}  // namespace

template <ExactField F>
JointsConfiguration<F> detect_joints(const ConfigInput<F>& in) {
  validate_input(in);
  std::vector<Vec<F>> candidates;
  if (in.candidates) {
    std::set<Vec<F>> seen;
    for (const auto& p : *in.candidates)
      if (seen.insert(p).second) candidates.push_back(p);
  } else {
    for (const auto& fam : in.families)
      for (const auto& v : fam.members)
        if (v.kind != VarietyKind::Flat)
          throw Error(ErrorCode::MissingCandidates, "non-flat member " + v.id + " requires candidate joints");
    candidates = enumerate_flat_points(in);
  }

  std::vector<std::vector<Tuple>> found(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) { found[i] = qualifying_tuples(in, candidates[i]); });

  JointsConfiguration<F> cfg{in.field, in.ambient, in.families, {}, {}, {}, {}, {}};
  for (std::size_t f = 0; f < in.families.size(); ++f)
    for (const auto& v : in.families[f].members) {
      cfg.varieties.push_back(v);
      cfg.family_of.push_back(f);
    }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (found[i].empty()) continue;
    cfg.joints.push_back(candidates[i]);
    cfg.tuples.push_back(std::move(found[i]));
  }
  return cfg;
}

template <ExactField F>
JointsConfiguration<F> restrict_to(const JointsConfiguration<F>& cfg, const std::vector<std::size_t>& joints) {
  std::set<std::size_t> used;
  for (auto p : joints)
    for (auto v : cfg.varieties_at(p)) used.insert(v);
  std::map<std::size_t, std::size_t> remap;
  JointsConfiguration<F> out{cfg.field, cfg.ambient, {}, {}, {}, {}, {}, {}};
  for (const auto& fam : cfg.families) out.families.push_back({fam.k, fam.m, {}});
  for (auto v : used) {
    remap[v] = out.varieties.size();
    out.varieties.push_back(cfg.varieties[v]);
    out.family_of.push_back(cfg.family_of[v]);
    out.families[cfg.family_of[v]].members.push_back(cfg.varieties[v]);
  }
  for (auto p : joints) {
    out.joints.push_back(cfg.joints.at(p));
    out.joint_names.push_back(cfg.joint_id(p));
    std::vector<Tuple> ts;
    for (const auto& t : cfg.tuples[p]) {
      Tuple r;
      for (auto v : t) r.push_back(remap.at(v));
      ts.push_back(std::move(r));
    }
    out.tuples.push_back(std::move(ts));
  }
  return out;
}

template <ExactField F>
std::vector<std::vector<std::size_t>> component_joint_sets(const JointsConfiguration<F>& cfg) {
  const std::size_t n = cfg.joints.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t v = 0; v < cfg.varieties.size(); ++v) {
    auto on = cfg.joints_on(v);
    for (std::size_t i = 1; i < on.size(); ++i) {
      auto a = find(on[0]), b = find(on[i]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t p = 0; p < n; ++p) groups[find(p)].push_back(p);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

template <ExactField F>
std::vector<JointsConfiguration<F>> connected_components(const JointsConfiguration<F>& cfg) {
  std::vector<JointsConfiguration<F>> out;
  for (const auto& set : component_joint_sets(cfg)) out.push_back(restrict_to(cfg, set));
  return out;
}

std::vector<std::string> generator_kinds() {
  return {"generic-hyperplanes", "coordinate-flats", "grid", "line", "random-flats", "composite"};
}

namespace {

template <ExactField F>
Vec<F> random_vec(const F& field, std::size_t d, std::mt19937_64& rng) {
  Vec<F> v(d);
  for (auto& x : v) x = field.random(rng);
  return v;
}

template <ExactField F>
Vec<F> unit(const F& field, std::size_t d, std::size_t i) {
  Vec<F> v(d, field.zero());
  v[i] = field.one();
  return v;
}

template <ExactField F>
void check_field_size(const F& field, const GenerateParams& params, double size) {
  if (field.characteristic() == 0) return;
  const double factor = params.genericity_factor.value_or(1e6);
  if (static_cast<double>(field.characteristic()) <= factor * size * size)
    throw Error(ErrorCode::FieldTooSmall, "field of size " + std::to_string(field.characteristic()) +
                                              " is too small for a generic instance of size " +
                                              std::to_string(static_cast<std::uint64_t>(size)));
}

// Distinct random elements.
template <ExactField F>
std::vector<typename F::Element> distinct_elements(const F& field, std::size_t count, std::mt19937_64& rng,
                                                   const std::set<typename F::Element>& avoid = {}) {
  std::vector<typename F::Element> out;
  std::set<typename F::Element> seen = avoid;
  while (out.size() < count) {
    auto x = field.random(rng);
    if (seen.insert(x).second) out.push_back(x);
  }
  return out;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, msg);
}

template <ExactField F>
ConfigInput<F> generic_hyperplanes(const GenerateParams& params, const F& field, std::mt19937_64& rng) {
  const std::size_t d = params.d, m = params.m;
  require(d >= 2 && m >= 2, "generic-hyperplanes needs d >= 2 and m >= 2");
  const std::size_t k = params.k ? params.k : d / m;
  require(k * m == d && k >= 1, "generic-hyperplanes needs k * m = d");
  require(params.h >= d, "generic-hyperplanes needs h >= d");
  check_field_size(field, params, static_cast<double>(params.h));
  Matrix<F> normals;
  Vec<F> offsets;
  for (std::size_t i = 0; i < params.h; ++i) {
    normals.push_back(random_vec(field, d, rng));
    offsets.push_back(field.random(rng));
  }
  auto subsystem = [&](const std::vector<std::size_t>& s) {
    Matrix<F> a;
    Vec<F> b;
    for (auto i : s) {
      a.push_back(normals[i]);
      b.push_back(offsets[i]);
    }
    return std::pair{a, b};
  };
  auto label = [](const std::vector<std::size_t>& s) {
    std::string id = "H";
    for (std::size_t i = 0; i < s.size(); ++i) id += (i ? "." : "") + std::to_string(s[i] + 1);
    return id;
  };
  ConfigInput<F> in{field, d, {}, std::vector<Vec<F>>{}, params.seed};
  Family<F> fam{k, m, {}};
  for (const auto& s : combinations(params.h, d - k)) {
    auto [a, b] = subsystem(s);
    auto point = solve(a, b, d, field);
    auto dirs = nullspace(a, d, field);
    if (!point || dirs.size() != k) throw Error(ErrorCode::FieldTooSmall, "random hyperplanes are degenerate");
    fam.members.push_back(make_flat(field, *point, dirs, label(s)));
  }
  for (const auto& s : combinations(params.h, d)) {
    auto [a, b] = subsystem(s);
    auto point = solve(a, b, d, field);
    if (!point || rank(a, field) != d) throw Error(ErrorCode::FieldTooSmall, "random hyperplanes are degenerate");
    in.candidates->push_back(*point);
  }
  in.families.push_back(std::move(fam));
  return in;
}

template <ExactField F>
ConfigInput<F> coordinate_flats(const GenerateParams& params, const F& field) {
  const std::size_t d = params.d;
  const std::size_t k = params.k ? params.k : std::max<std::size_t>(1, d / params.m);
  require(d >= 2 && k >= 1 && k < d && d % k == 0, "coordinate-flats needs k dividing d with k < d");
  require(params.copies >= 1, "coordinate-flats needs at least one copy");
  ConfigInput<F> in{field, d, {}, std::nullopt, params.seed};
  Family<F> fam{k, d / k, {}};
  for (std::size_t c = 0; c < params.copies; ++c) {
    Vec<F> base(d, field.from_int(static_cast<std::int64_t>(100 * c)));
    for (std::size_t b = 0; b < d / k; ++b) {
      Matrix<F> dirs;
      for (std::size_t j = 0; j < k; ++j) dirs.push_back(unit(field, d, b * k + j));
      std::string id = "E";
      for (std::size_t j = 0; j < k; ++j) id += std::to_string(b * k + j + 1);
      if (params.copies > 1) id += "@" + std::to_string(c);
      fam.members.push_back(make_flat(field, base, dirs, id));
    }
  }
  in.families.push_back(std::move(fam));
  return in;
}

template <ExactField F>
ConfigInput<F> planar_points(const GenerateParams& params, const F& field, std::vector<Vec<F>> pts) {
  ConfigInput<F> in{field, 2, {}, std::move(pts), params.seed};
  Family<F> fam{2, 1, {}};
  fam.members.push_back(make_flat(field, Vec<F>(2, field.zero()), {unit(field, 2, 0), unit(field, 2, 1)}, "plane"));
  in.families.push_back(std::move(fam));
  return in;
}

template <ExactField F>
std::vector<Vec<F>> grid_points(const F& field, std::size_t t, std::mt19937_64& rng) {
  auto a = distinct_elements(field, t, rng);
  std::vector<Vec<F>> pts;
  for (const auto& x : a)
    for (const auto& y : a) pts.push_back({x, y});
  return pts;
}

template <ExactField F>
ConfigInput<F> random_flats(const GenerateParams& params, const F& field, std::mt19937_64& rng) {
  const std::size_t d = params.d, m = params.m;
  const std::size_t k = params.k ? params.k : d / m;
  require(k >= 1 && k * m == d && m >= 2, "random-flats needs k * m = d with m >= 2");
  require(params.points >= 1 && params.flats >= 1, "random-flats needs points and flats");
  check_field_size(field, params, static_cast<double>(params.flats + params.points));
  std::vector<Vec<F>> anchors;
  for (std::size_t i = 0; i < params.points; ++i) anchors.push_back(random_vec(field, d, rng));
  ConfigInput<F> in{field, d, {}, anchors, params.seed};
  Family<F> fam{k, m, {}};
  for (std::size_t i = 0; i < params.flats; ++i) {
    // Flat i passes through anchor i mod P, and also through the next anchor
    // when k >= 2 and i is odd, which links the anchors into a chain.
    const auto& p = anchors[i % params.points];
    Matrix<F> dirs;
    if (k >= 2 && params.points > 1 && i % 2 == 1) {
      const auto& q = anchors[(i + 1) % params.points];
      Vec<F> diff(d);
      for (std::size_t j = 0; j < d; ++j) diff[j] = field.sub(q[j], p[j]);
      dirs.push_back(diff);
    }
    while (dirs.size() < k) {
      dirs.push_back(random_vec(field, d, rng));
      if (rank(dirs, field) != dirs.size()) dirs.pop_back();
    }
    fam.members.push_back(make_flat(field, p, dirs, "R" + std::to_string(i + 1)));
  }
  in.families.push_back(std::move(fam));
  return in;
}

template <ExactField F>
ConfigInput<F> composite(const GenerateParams& params, const F& field, std::mt19937_64& rng) {
  const std::size_t d = params.d, t = params.t;
  require(d >= 4 && d % 2 == 0, "composite needs an even d >= 4");
  require(t >= 1, "composite needs t >= 1");
  check_field_size(field, params, static_cast<double>(2 * t * t));
  auto a = distinct_elements(field, t, rng);
  std::set<typename F::Element> used(a.begin(), a.end());
  auto line_y = distinct_elements(field, 1, rng, used).front();
  auto line_x = distinct_elements(field, t * t, rng);
  std::vector<Vec<F>> pts;
  for (const auto& x : a)
    for (const auto& y : a) {
      Vec<F> p(d, field.zero());
      p[0] = x;
      p[1] = y;
      pts.push_back(p);
    }
  for (const auto& x : line_x) {
    Vec<F> p(d, field.zero());
    p[0] = x;
    p[1] = line_y;
    pts.push_back(p);
  }
  ConfigInput<F> in{field, d, {}, pts, params.seed};
  Family<F> fam{2, d / 2, {}};
  fam.members.push_back(make_flat(field, Vec<F>(d, field.zero()), {unit(field, d, 0), unit(field, d, 1)}, "shared"));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t b = 1; b < d / 2; ++b)
      fam.members.push_back(make_flat(field, pts[i], {unit(field, d, 2 * b), unit(field, d, 2 * b + 1)},
                                      (i < t * t ? "grid" : "line") + std::to_string(i) + "." + std::to_string(b)));
  in.families.push_back(std::move(fam));
  return in;
}

}  // namespace

template <ExactField F>
ConfigInput<F> generate(const GenerateParams& params, const F& field) {
  std::mt19937_64 rng(params.seed);
  const auto& kind = params.kind;
  if (kind == "generic-hyperplanes") return generic_hyperplanes(params, field, rng);
  if (kind == "coordinate-flats") return coordinate_flats(params, field);
  if (kind == "grid") {
    require(params.t >= 1, "grid needs t >= 1");
    check_field_size(field, params, static_cast<double>(params.t));
    return planar_points(params, field, grid_points(field, params.t, rng));
  }
  if (kind == "line") {
    require(params.t >= 1, "line needs t >= 1");
    check_field_size(field, params, static_cast<double>(params.t * params.t));
    std::vector<Vec<F>> pts;
    for (const auto& x : distinct_elements(field, params.t * params.t, rng)) pts.push_back({x, field.zero()});
    return planar_points(params, field, pts);
  }
  if (kind == "random-flats") return random_flats(params, field, rng);
  if (kind == "composite") return composite(params, field, rng);
  throw Error(ErrorCode::InvalidArgument, "unknown generator kind '" + kind + "'");
}

#define JOINTSLAB_INSTANTIATE(F)                                                                          \
  template struct JointsConfiguration<F>;                                                                 \
  template bool is_joint<F>(const Vec<F>&, const std::vector<const Chart<F>*>&, const F&);                \
  template void validate_input<F>(const ConfigInput<F>&);                                                 \
  template JointsConfiguration<F> detect_joints<F>(const ConfigInput<F>&);                                \
  template JointsConfiguration<F> restrict_to<F>(const JointsConfiguration<F>&, const std::vector<std::size_t>&); \
  template std::vector<std::vector<std::size_t>> component_joint_sets<F>(const JointsConfiguration<F>&);  \
  template std::vector<JointsConfiguration<F>> connected_components<F>(const JointsConfiguration<F>&);    \
  template ConfigInput<F> generate<F>(const GenerateParams&, const F&);

JOINTSLAB_INSTANTIATE(PrimeField)
JOINTSLAB_INSTANTIATE(RationalField)

}  // namespace jointslab
