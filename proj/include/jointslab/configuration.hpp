#pragma once

// Joints configurations: families of varieties, detected joints with their
// qualifying tuples, the joint adjacency graph, and instance generators.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jointslab/variety.hpp"

namespace jointslab {

template <ExactField F>
struct Family {
  std::size_t k = 0;  // member dimension
  std::size_t m = 0;  // members taken per joint
  std::vector<VarietySpec<F>> members;
};

/// Unassembled configuration: what a config file holds.
template <ExactField F>
struct ConfigInput {
  F field;
  std::size_t ambient = 0;
  std::vector<Family<F>> families;
  std::optional<std::vector<Vec<F>>> candidates;
  std::uint64_t seed = 0;
};

/// Indices into JointsConfiguration::varieties, one per chosen member,
/// grouped by family in family order and increasing within a family.
using Tuple = std::vector<std::size_t>;

template <ExactField F>
struct JointsConfiguration {
  F field;
  std::size_t ambient = 0;
  std::vector<Family<F>> families;
  std::vector<VarietySpec<F>> varieties;  // all members, family by family
  std::vector<std::size_t> family_of;
  std::vector<Vec<F>> joints;              // preassigned order = index order
  std::vector<std::vector<Tuple>> tuples;  // M(p) multiset; tuples[p][0] is designated
  std::vector<std::string> joint_names;    // empty: "p<index>"

  std::size_t s() const {
    std::size_t total = 0;
    for (const auto& f : families) total += f.m;
    return total;
  }
  std::size_t multiplicity(std::size_t p) const { return tuples.at(p).size(); }
  const Tuple& designated(std::size_t p) const { return tuples.at(p).front(); }
  /// Varieties in at least one qualifying tuple at p.
  std::vector<std::size_t> varieties_at(std::size_t p) const;
  /// Joints at which variety v is incident, increasing.
  std::vector<std::size_t> joints_on(std::size_t v) const;
  std::string joint_id(std::size_t p) const {
    return joint_names.empty() ? "p" + std::to_string(p) : joint_names.at(p);
  }
};

/// Tangent directions from each chart stacked have rank d. Throws
/// DimensionMismatch unless the chart dimensions sum to d.
template <ExactField F>
bool is_joint(const Vec<F>& p, const std::vector<const Chart<F>*>& charts, const F& field);

/// Checks d = sum m_i k_i, d >= 2, and member shapes.
template <ExactField F>
void validate_input(const ConfigInput<F>& in);

template <ExactField F>
JointsConfiguration<F> detect_joints(const ConfigInput<F>& in);

/// Joints of `cfg` whose indices are listed, with the varieties incident to
/// them; joint order is preserved.
template <ExactField F>
JointsConfiguration<F> restrict_to(const JointsConfiguration<F>& cfg, const std::vector<std::size_t>& joints);

/// Connected components of the joint graph (joints adjacent when some
/// incident variety contains both), ordered by least joint index.
template <ExactField F>
std::vector<std::vector<std::size_t>> component_joint_sets(const JointsConfiguration<F>& cfg);

template <ExactField F>
std::vector<JointsConfiguration<F>> connected_components(const JointsConfiguration<F>& cfg);

struct GenerateParams {
  std::string kind;  // generic-hyperplanes | coordinate-flats | grid | line | random-flats | composite
  std::size_t d = 6;
  std::size_t h = 6;       // hyperplane count
  std::size_t k = 0;       // member dimension; 0 means d / m
  std::size_t m = 3;       // members per joint
  std::size_t t = 3;       // grid side; line and composite use t^2 points per part
  std::size_t copies = 1;  // coordinate-flats: translated disjoint copies
  std::size_t flats = 8;   // random-flats
  std::size_t points = 3;  // random-flats anchor points
  std::uint64_t seed = 1;
  std::optional<double> genericity_factor;  // default 1e6
};

/// Deterministic in (params, field). Randomized kinds throw FieldTooSmall
/// unless p > factor * size^2. In the composite the first t^2 candidates are
/// the grid part and the rest the line part.
template <ExactField F>
ConfigInput<F> generate(const GenerateParams& params, const F& field);

std::vector<std::string> generator_kinds();

}  // namespace jointslab
