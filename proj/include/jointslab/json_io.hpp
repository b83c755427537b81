#pragma once

// JSON configuration files.
//
// {"field": {"kind": "prime", "p": 2147483629} | {"kind": "rational"},
//  "ambient": d,                       (optional when a point fixes it)
//  "families": [{"k": 2, "m": 3, "members": [variety, ...]}, ...],
//  "joints": [[...], ...],             (optional for all-flat families)
//  "seed": 1}
//
// variety: {"kind": "flat" | "graph" | "hypersurface" | "raw", "dim": k,
//           "id": "...", "degree": e, "point": [...], "directions": [[...]],
//           "equations": ["..."], "frame": {"matrix": [[...]], "translation": [...]},
//           "slice_degree": m, "charts": [{"center", "frame", "series", "truncation"}]}
//
// Prime elements are written as integers in [0, p); rationals as integers
// or "a/b" strings. Either form is accepted on input.

#include <string>

#include "jointslab/configuration.hpp"

namespace jointslab {

/// The config's field, PrimeField(kDefaultPrime) when absent. Throws ParseError.
FieldSpec parse_field_spec(const std::string& text);

/// Throws ParseError, InvalidVariety.
template <ExactField F>
ConfigInput<F> parse_config(const std::string& text, const F& field);

/// Deterministic, 2-space indented, trailing newline.
template <ExactField F>
std::string write_config(const ConfigInput<F>& in);

/// The families with the detected joints as candidates.
template <ExactField F>
ConfigInput<F> to_input(const JointsConfiguration<F>& cfg, std::uint64_t seed = 0);

/// Element as JSON text: an integer, or a quoted fraction.
template <ExactField F>
std::string element_json(const F& field, const typename F::Element& x);

}  // namespace jointslab
