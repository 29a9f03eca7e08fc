#pragma once

// Built-in world functions and the deformation principle: replace the
// Euclidean σ inside every σ-expressed proposition by another σ.

#include "worldfn/core.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace worldfn {

// σ(x, y) = ½ Σ (xᵢ − yᵢ)². `box` is the default sampling region, [-1, 1]ⁿ if
// not given.
WorldFunction make_euclidean(std::size_t n, std::optional<Box> box = std::nullopt);

// σ(x, y) = ½[(Δx⁰)² − Σ_{i≥1} (Δxⁱ)²], coordinate 0 timelike; may be negative.
WorldFunction make_minkowski(std::size_t n, std::optional<Box> box = std::nullopt);

// d(σ_base, P, Q) added to σ_base for P ≠ Q.
using Deformation = std::function<Real(Real base_sigma, const Point& p, const Point& q)>;

struct DeformationCheck {
  std::size_t samples = 256;
  std::uint64_t seed = 0x5eed;
  Real relative_tolerance = 1e-12;
};

// σ_new(P, Q) = σ_base(P, Q) + d(σ_base(P, Q), P, Q) for P ≠ Q and σ_new(P, P) = 0.
// The deformation is sampled for symmetry on the base domain (all pairs when
// the base is discrete and small); throws ValidationError on asymmetry or
// non-finite values.
WorldFunction make_deformed(const WorldFunction& base, Deformation d,
                            std::string name = "deformed", DeformationCheck check = {});

// Constant offset λ²/2 off the diagonal: σ_new = σ + λ²/2 for P ≠ Q.
Deformation offset_deformation(Real lambda);

// σ_new = σ + α σ². Lengths grow faster than Euclidean ones, so the triangle
// axiom fails on collinear triples and vector equivalence becomes multivariant.
Deformation quadratic_stretch(Real alpha);

// Deformation from the expression language. Variables: `s` (base σ), `x0..`
// (coordinates of P) and `y0..` (coordinates of Q); for discrete bases `i`
// and `j` are the point ids.
Deformation deformation_from_expression(const std::string& text, const Domain& base_domain);

// σ(i, j) = table[i][j]. Rejects non-square, asymmetric or nonzero-diagonal
// tables and non-finite entries.
WorldFunction make_tabulated(const std::vector<std::vector<double>>& table);

// Comma-separated rows; row i, column j holds σ(i, j).
std::vector<std::vector<double>> read_sigma_table_csv(const std::filesystem::path& path);

}  // namespace worldfn
